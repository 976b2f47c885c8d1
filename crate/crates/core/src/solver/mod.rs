//! Strang split-step integration of
//! `i eps u_t + eps^2/2 Lap u = V u + lambda |u|^{2 sigma} u`
//! with adaptive step control and blow-up detection.
//!
//! The x-diagonal flow `i eps u_t = (V + lambda |u|^{2 sigma}) u` leaves `|u|`
//! unchanged, so it is an exact pointwise phase; the kinetic flow is an exact
//! Fourier multiplier. All time-discretization error is commutator error.

mod ground_state;
mod nonlinearity;

pub use ground_state::{ground_state_proxy, ground_state_with_history, GroundState, GroundStateConfig};
pub use nonlinearity::{Nonlinearity, CRITICAL_TOLERANCE};

use num_complex::Complex;

use crate::error::{NlspError, Result};
use crate::grid::{check_finite, grad_sq_of, Grid, WaveFunction};
use crate::observables::{record, ObservableRecord};
use crate::potential::QuadraticPotential;
use crate::propagator::LinearFlow;
use crate::scalar::Real;

/// How one step is split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Splitting {
    /// `V + lambda |u|^{2 sigma}` as one pointwise phase, kinetic flow in
    /// Fourier space.
    #[default]
    PotentialKinetic,
    /// Nonlinear phase only, with the linear flow `U_V(dt)` applied exactly.
    /// Needs a gauge-free potential; removes the splitting error that grows
    /// with `|V|` on wide boxes.
    ExactLinear,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub dt_initial: T,
    pub dt_min: T,
    /// After a run of clean steps `dt` is divided by `safety` (capped at
    /// `dt_initial`); a value in `(0, 1)`.
    pub safety: T,
    /// Clean steps required before `dt` may grow again.
    pub regrow_after: usize,
    /// Blow-up threshold on `||grad u(t)|| / ||grad u(0)||`.
    pub gradient_ratio_max: T,
    /// Blow-up threshold on the spectral mass fraction in the outer third.
    pub spectral_tail_max: T,
    /// Per-step relative mass drift that forces a smaller step.
    pub mass_drift_max: T,
    /// Per-step relative gradient growth that forces a smaller step.
    pub gradient_growth_max: T,
    /// Consecutive steps at `dt_min` without a threshold trip before the run
    /// is declared under-resolved.
    pub max_steps_at_dt_min: usize,
    /// Disable step control entirely (fixed `dt_initial`).
    pub adaptive: bool,
    pub splitting: Splitting,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            dt_initial: T::lit(1e-3),
            dt_min: T::lit(1e-3 / 1_048_576.0),
            safety: T::lit(0.5),
            regrow_after: 8,
            gradient_ratio_max: T::lit(1e3),
            spectral_tail_max: T::lit(1e-6),
            mass_drift_max: T::lit(1e-12),
            gradient_growth_max: T::lit(0.05),
            max_steps_at_dt_min: 10_000,
            adaptive: true,
            splitting: Splitting::PotentialKinetic,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn with_dt(dt: T) -> Self {
        Self {
            dt_initial: dt,
            dt_min: dt / T::lit(1_048_576.0),
            ..Self::default()
        }
    }

    pub fn fixed(dt: T) -> Self {
        Self {
            adaptive: false,
            ..Self::with_dt(dt)
        }
    }

    pub fn with_splitting(mut self, splitting: Splitting) -> Self {
        self.splitting = splitting;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.dt_min > T::zero()
            && self.dt_min < self.dt_initial
            && self.dt_initial.is_finite()
            && self.safety > T::zero()
            && self.safety < T::one()
            && self.gradient_ratio_max > T::zero()
            && self.spectral_tail_max > T::zero()
            && self.mass_drift_max > T::zero()
            && self.gradient_growth_max > T::zero();
        if ok {
            Ok(())
        } else {
            Err(NlspError::Domain(format!("invalid solver configuration {self:?}")))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Completed,
    BlowUpDetected,
    ResolutionLost,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Completed => "completed",
            RunStatus::BlowUpDetected => "blow_up_detected",
            RunStatus::ResolutionLost => "resolution_lost",
        }
    }
}

/// What to record during a run.
#[derive(Clone, Debug, PartialEq)]
pub struct Monitors<T> {
    /// Absolute times at which records (and optionally states) are taken;
    /// every one is hit exactly.
    pub times: Vec<T>,
    pub keep_states: bool,
    /// Exponents `p` for the `L^p` columns.
    pub lp: Vec<T>,
}

impl<T: Real> Monitors<T> {
    pub fn at(times: Vec<T>) -> Self {
        Self {
            times,
            keep_states: false,
            lp: Vec::new(),
        }
    }

    /// `t0 + k * cadence` up to and including `t_end`.
    pub fn every(t0: T, t_end: T, cadence: T) -> Self {
        let mut times = Vec::new();
        if cadence > T::zero() {
            let n = ((t_end - t0) / cadence + T::lit(1e-9)).floor().to_usize().unwrap_or(0);
            for k in 1..=n {
                times.push(t0 + cadence * T::from_usize_exact(k));
            }
            if times.last().is_none_or(|&l| l < t_end) && t_end > t0 {
                times.push(t_end);
            }
        }
        Self::at(times)
    }

    pub fn keeping_states(mut self) -> Self {
        self.keep_states = true;
        self
    }

    pub fn with_lp(mut self, lp: Vec<T>) -> Self {
        self.lp = lp;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome<T: Real> {
    pub status: RunStatus,
    pub final_time: T,
    /// `[t_lo, t_hi]`: the last two accepted times when blow-up is detected.
    pub bracket: Option<(T, T)>,
    /// Record at the initial time, then one per monitor time reached.
    pub records: Vec<ObservableRecord<T>>,
    /// States at monitor times (when requested).
    pub snapshots: Vec<WaveFunction<T>>,
    pub final_state: WaveFunction<T>,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Precomputed multipliers for one grid, potential and `eps`.
pub struct SplitStep<'a, T: Real> {
    grid: &'a Grid<T>,
    epsilon: T,
    nl: Nonlinearity<T>,
    splitting: Splitting,
    pot: QuadraticPotential<T>,
    potential: Vec<T>,
    xi_sq: Vec<T>,
    cached_dt: Option<T>,
    kinetic: Vec<Complex<T>>,
    linear: Option<(T, LinearFlow<'a, T>)>,
}

impl<'a, T: Real> SplitStep<'a, T> {
    pub fn new(
        grid: &'a Grid<T>,
        epsilon: T,
        pot: &QuadraticPotential<T>,
        nl: &Nonlinearity<T>,
        splitting: Splitting,
    ) -> Result<Self> {
        if pot.dim() != grid.dim() || nl.dim != grid.dim() {
            return Err(NlspError::Domain("grid, potential and nonlinearity dimensions differ".into()));
        }
        if splitting == Splitting::ExactLinear && !pot.is_gauge_free() {
            return Err(NlspError::Domain(
                "exact-linear splitting needs a gauge-free potential".into(),
            ));
        }
        let potential = match splitting {
            Splitting::PotentialKinetic => grid.sample_real(|x| pot.value(x)),
            Splitting::ExactLinear => vec![T::zero(); grid.total_points()],
        };
        let freqs = grid.frequency_tables();
        let xi_sq = (0..grid.total_points())
            .map(|flat| {
                let idx = grid.multi_index(flat);
                (0..grid.dim()).fold(T::zero(), |a, j| a + freqs[j][idx[j]] * freqs[j][idx[j]])
            })
            .collect();
        Ok(Self {
            grid,
            epsilon,
            nl: *nl,
            splitting,
            pot: pot.clone(),
            potential,
            xi_sq,
            cached_dt: None,
            kinetic: Vec::new(),
            linear: None,
        })
    }

    fn half_phase(&self, values: &mut [Complex<T>], dt: T) {
        let scale = -dt / (T::lit(2.0) * self.epsilon);
        let lambda = self.nl.lambda;
        if self.splitting == Splitting::ExactLinear && lambda == T::zero() {
            return;
        }
        if lambda == T::zero() {
            for (v, &p) in values.iter_mut().zip(&self.potential) {
                *v = *v * Complex::from_polar(T::one(), scale * p);
            }
        } else {
            for (v, &p) in values.iter_mut().zip(&self.potential) {
                let q = p + lambda * self.nl.density_power(v.norm_sqr());
                *v = *v * Complex::from_polar(T::one(), scale * q);
            }
        }
    }

    fn kinetic_factors(&mut self, dt: T) -> &[Complex<T>] {
        if self.cached_dt != Some(dt) {
            let scale = -self.epsilon * dt * T::lit(0.5);
            self.kinetic = self
                .xi_sq
                .iter()
                .map(|&k2| Complex::from_polar(T::one(), scale * k2))
                .collect();
            self.cached_dt = Some(dt);
        }
        &self.kinetic
    }

    /// One Strang step of length `dt`, in place.
    pub fn advance(&mut self, values: &mut [Complex<T>], dt: T) -> Result<()> {
        self.half_phase(values, dt);
        match self.splitting {
            Splitting::PotentialKinetic => {
                let grid = self.grid;
                grid.forward_in_place(values);
                for (v, f) in values.iter_mut().zip(self.kinetic_factors(dt)) {
                    *v = *v * *f;
                }
                grid.inverse_in_place(values);
            }
            Splitting::ExactLinear => {
                if self.linear.as_ref().map(|(t, _)| *t) != Some(dt) {
                    self.linear = Some((dt, LinearFlow::new(self.grid, &self.pot, self.epsilon, dt)?));
                }
                if let Some((_, flow)) = &self.linear {
                    flow.apply(values);
                }
            }
        }
        self.half_phase(values, dt);
        check_finite(values)
    }
}

/// One Strang step: half x-diagonal phase, full kinetic flow, half phase.
pub fn step<T: Real>(
    w: &WaveFunction<T>,
    dt: T,
    pot: &QuadraticPotential<T>,
    nl: &Nonlinearity<T>,
) -> Result<WaveFunction<T>> {
    if !(dt > T::zero()) {
        return Err(NlspError::Domain(format!("step needs dt > 0, got {dt}")));
    }
    let mut s = SplitStep::new(w.grid(), w.epsilon(), pot, nl, Splitting::PotentialKinetic)?;
    let mut values = w.values().to_vec();
    s.advance(&mut values, dt)?;
    WaveFunction::new(w.grid().clone(), values, w.time() + dt, w.epsilon())
}

/// Spectral tail fraction and `||grad u||^2` from one transform.
fn spectral_diagnostics<T: Real>(grid: &Grid<T>, values: &[Complex<T>], xi_sq: &[T]) -> (T, T) {
    let mut spec = values.to_vec();
    grid.forward_in_place(&mut spec);
    let mut tail = T::zero();
    let mut total = T::zero();
    let mut grad = T::zero();
    for (flat, (c, &k2)) in spec.iter().zip(xi_sq).enumerate() {
        let m = c.norm_sqr();
        total = total + m;
        grad = grad + m * k2;
        let idx = grid.multi_index(flat);
        let outer = (0..grid.dim()).any(|j| {
            let a = grid.axis(j);
            3 * a.signed_index(idx[j]).unsigned_abs() > a.points()
        });
        if outer {
            tail = tail + m;
        }
    }
    let tail = if total > T::zero() { tail / total } else { T::zero() };
    (tail, grad * grid.cell_volume())
}

/// Integrate from `w0.time()` to `t_end`.
pub fn evolve<T: Real>(
    w0: &WaveFunction<T>,
    t_end: T,
    pot: &QuadraticPotential<T>,
    nl: &Nonlinearity<T>,
    cfg: &SolverConfig<T>,
    monitors: &Monitors<T>,
) -> Result<RunOutcome<T>> {
    cfg.validate()?;
    w0.check_finite()?;
    let grid = w0.grid();
    let mut stepper = SplitStep::new(grid, w0.epsilon(), pot, nl, cfg.splitting)?;
    let t0 = w0.time();
    let mut stops: Vec<T> = monitors
        .times
        .iter()
        .copied()
        .filter(|&s| s > t0 && s <= t_end)
        .collect();
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    stops.dedup();

    let mut records = vec![record(w0, pot, nl, &monitors.lp)?];
    let mut snapshots = Vec::new();
    if monitors.keep_states && monitors.times.contains(&t0) {
        snapshots.push(w0.clone());
    }

    let mut values = w0.values().to_vec();
    let mut t = t0;
    let mut prev_t: Option<T> = None;
    let mut dt = cfg.dt_initial;
    let mass0 = grid.l2_norm_sq(&values);
    let grad0 = grad_sq_of(grid, &values).sqrt();
    let grad_ref = if grad0 > T::zero() { grad0 } else { T::one() };
    let mut grad_old = grad0;
    let mut mass_old = mass0;
    let mut clean = 0usize;
    let mut at_floor = 0usize;
    let (mut accepted, mut rejected) = (0usize, 0usize);
    let mut status = RunStatus::Completed;
    let mut bracket = None;
    let mut next_stop = 0usize;
    let tiny = T::lit(1e-10) * mass0.sqrt();

    while t < t_end {
        let target = stops.get(next_stop).copied().unwrap_or(t_end).min(t_end);
        let remaining = target - t;
        let h = dt.min(remaining);
        let lands = h == remaining;
        let can_shrink = cfg.adaptive && dt > cfg.dt_min;

        let mut trial = values.clone();
        let ok = stepper.advance(&mut trial, h).is_ok();
        let (tail, grad_sq) = if ok {
            spectral_diagnostics(grid, &trial, &stepper.xi_sq)
        } else {
            (T::infinity(), T::infinity())
        };
        let grad_new = grad_sq.sqrt();
        let tripped = !ok || grad_new / grad_ref > cfg.gradient_ratio_max || tail > cfg.spectral_tail_max;
        if tripped {
            if can_shrink {
                dt = (dt * T::lit(0.5)).max(cfg.dt_min);
                clean = 0;
                rejected += 1;
                continue;
            }
            status = RunStatus::BlowUpDetected;
            bracket = Some(match prev_t {
                Some(p) => (p, t),
                None => (t, t + h),
            });
            break;
        }
        let mass_new = grid.l2_norm_sq(&trial);
        let drift = ((mass_new - mass_old) / mass_old.max(T::min_positive_value())).abs();
        let growth = grad_new > grad_old * (T::one() + cfg.gradient_growth_max) + tiny;
        if (drift > cfg.mass_drift_max || growth) && can_shrink {
            dt = (dt * T::lit(0.5)).max(cfg.dt_min);
            clean = 0;
            rejected += 1;
            continue;
        }

        values = trial;
        prev_t = Some(t);
        t = if lands { target } else { t + h };
        accepted += 1;
        grad_old = grad_new;
        mass_old = mass_new;

        if cfg.adaptive && dt <= cfg.dt_min {
            at_floor += 1;
            if at_floor > cfg.max_steps_at_dt_min {
                status = RunStatus::ResolutionLost;
                break;
            }
        } else {
            at_floor = 0;
        }
        clean += 1;
        if cfg.adaptive && clean >= cfg.regrow_after && dt < cfg.dt_initial {
            dt = (dt / cfg.safety).min(cfg.dt_initial);
            clean = 0;
        }

        if lands && next_stop < stops.len() && target == stops[next_stop] {
            let w = WaveFunction::new(grid.clone(), values.clone(), t, w0.epsilon())?;
            records.push(record(&w, pot, nl, &monitors.lp)?);
            if monitors.keep_states {
                snapshots.push(w);
            }
            next_stop += 1;
        }
    }

    let final_state = WaveFunction::new(grid.clone(), values, t, w0.epsilon())?;
    Ok(RunOutcome {
        status,
        final_time: t,
        bracket,
        records,
        snapshots,
        final_state,
        accepted_steps: accepted,
        rejected_steps: rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::norm_l2;
    use crate::observables::{blowup_criteria_report, energy};
    use crate::propagator::mehler_propagate;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn rel(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
        let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let n: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (d / n).sqrt()
    }

    fn gaussian(n: usize, l: f64, eps: f64, amp: f64) -> WaveFunction<f64> {
        let g = Grid::new(1, n, l).unwrap();
        WaveFunction::from_fn(g, 0.0, eps, |x| {
            c(amp * (-(x[0] - 0.3).powi(2)).exp(), 0.0) * Complex::from_polar(1.0, 0.4 * x[0] / eps)
        })
        .unwrap()
    }

    #[test]
    fn linear_free_step_is_exact() {
        let w = gaussian(256, 16.0, 1.0, 1.0);
        let pot = QuadraticPotential::free(1);
        let nl = Nonlinearity::linear(1);
        let a = step(&w, 0.37, &pot, &nl).unwrap();
        let b = mehler_propagate(&w, &pot, 0.37).unwrap();
        assert!(rel(a.values(), b.values()) < 1e-13);
    }

    #[test]
    fn harmonic_splitting_converges_at_second_order() {
        let w = gaussian(256, 12.0, 1.0, 1.0);
        let pot = QuadraticPotential::harmonic(1, 1.0).unwrap();
        let nl = Nonlinearity::linear(1);
        let exact = mehler_propagate(&w, &pot, 1.0).unwrap();
        let errs: Vec<f64> = [0.02, 0.01, 0.005]
            .iter()
            .map(|&dt| {
                let out = evolve(&w, 1.0, &pot, &nl, &SolverConfig::fixed(dt), &Monitors::at(vec![])).unwrap();
                rel(out.final_state.values(), exact.values())
            })
            .collect();
        for pair in errs.windows(2) {
            let order = (pair[0] / pair[1]).log2();
            assert!((order - 2.0).abs() < 0.1, "order {order}, errors {errs:?}");
        }
    }

    #[test]
    fn exact_linear_splitting_is_exact_without_nonlinearity() {
        let w = gaussian(512, 16.0, 1.0, 1.0);
        let pot = QuadraticPotential::repulsive(1, 1.0).unwrap();
        let nl = Nonlinearity::linear(1);
        let cfg = SolverConfig::fixed(0.05).with_splitting(Splitting::ExactLinear);
        let out = evolve(&w, 1.0, &pot, &nl, &cfg, &Monitors::at(vec![])).unwrap();
        let exact = mehler_propagate(&w, &pot, 1.0).unwrap();
        assert!(rel(out.final_state.values(), exact.values()) < 1e-12);
        let stark = QuadraticPotential::stark(&[1.0]).unwrap();
        assert!(evolve(&w, 1.0, &stark, &nl, &cfg, &Monitors::at(vec![])).is_err());
    }

    #[test]
    fn homogeneous_state_rotates() {
        let g = Grid::new(1, 64, 8.0).unwrap();
        let w = WaveFunction::from_fn(g, 0.0, 0.5, |_| c(0.8, 0.0)).unwrap();
        let nl = Nonlinearity::new(-1.0, 1.0, 1).unwrap();
        let u = step(&w, 0.1, &QuadraticPotential::free(1), &nl).unwrap();
        let expect = Complex::from_polar(0.8, 0.64 * 0.1 / 0.5);
        for v in u.values() {
            assert!((v - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn defocusing_run_completes_and_conserves() {
        let w = gaussian(1024, 24.0, 1.0, 1.0);
        let pot = QuadraticPotential::free(1);
        let nl = Nonlinearity::new(1.0, 1.0, 1).unwrap();
        let out = evolve(&w, 2.0, &pot, &nl, &SolverConfig::default(), &Monitors::every(0.0, 2.0, 0.5)).unwrap();
        assert_eq!(out.status, RunStatus::Completed);
        assert_eq!(out.records.len(), 5);
        assert!((out.final_time - 2.0).abs() < 1e-15);
        let m0 = out.records[0].mass;
        let e0 = out.records[0].energy;
        for r in &out.records {
            assert!(((r.mass - m0) / m0).abs() < 1e-12);
            assert!(((r.energy - e0) / e0).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_horizon_returns_immediately() {
        let w = gaussian(64, 8.0, 1.0, 1.0);
        let out = evolve(
            &w,
            0.0,
            &QuadraticPotential::free(1),
            &Nonlinearity::linear(1),
            &SolverConfig::default(),
            &Monitors::at(vec![]),
        )
        .unwrap();
        assert_eq!(out.status, RunStatus::Completed);
        assert_eq!(out.accepted_steps, 0);
        assert_eq!(out.records.len(), 1);
    }

    #[test]
    fn glassey_datum_blows_up() {
        let w = gaussian(2048, 16.0, 1.0, 3.0);
        let w = w.with_values(w.grid().sample(|x| c(3.0 * (-x[0] * x[0]).exp(), 0.0))).unwrap();
        let pot = QuadraticPotential::free(1);
        let nl = Nonlinearity::new(-1.0, 2.0, 1).unwrap();
        assert!(blowup_criteria_report(&w, &pot, &nl).unwrap().glassey.holds);
        let out = evolve(&w, 1.0, &pot, &nl, &SolverConfig::default(), &Monitors::at(vec![])).unwrap();
        assert_eq!(out.status, RunStatus::BlowUpDetected);
        let (lo, hi) = out.bracket.unwrap();
        assert!(lo < hi && hi < 1.0);
    }

    #[test]
    fn unimodular_phase_commutes_with_flow() {
        let w = gaussian(256, 12.0, 0.7, 1.2);
        let pot = QuadraticPotential::harmonic(1, 1.0).unwrap();
        let nl = Nonlinearity::new(-1.0, 1.0, 1).unwrap();
        let phase = Complex::from_polar(1.0, 0.9);
        let cfg = SolverConfig::fixed(1e-3);
        let a = evolve(&w, 0.3, &pot, &nl, &cfg, &Monitors::at(vec![])).unwrap();
        let b = evolve(&w.scaled(phase), 0.3, &pot, &nl, &cfg, &Monitors::at(vec![])).unwrap();
        let rotated: Vec<_> = a.final_state.values().iter().map(|v| v * phase).collect();
        assert!(rel(b.final_state.values(), &rotated) < 1e-12);
        assert!((norm_l2(&a.final_state) - norm_l2(&w)).abs() < 1e-12);
        let _ = energy(&a.final_state, &pot, &nl).unwrap();
    }
}
