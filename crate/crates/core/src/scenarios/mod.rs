//! Scenario files, single runs with optional transform oracles, the
//! phenomenon drivers, parameter sweeps and the built-in check suite.
//!
//! Everything here is `f64`.

mod config;
pub mod drivers;
mod output;
pub mod suite;
mod sweep;

use num_complex::Complex;

pub use config::{
    parse_scenario, parse_scenario_with, DatumKind, GridSpec, InitialSpec, NonlinearitySpec, ObservablesSpec,
    OracleKind, OutputSpec, PotentialSpec, ProfileKind, ScenarioSpec, TimeSpec, SECTIONS,
};
pub use output::{csv_string, format_number, verdict_string, write_failure, write_report};
pub use sweep::{parameter_grid, pool_size, summary_csv, sweep, write_sweep, SweepAxis, SweepCell};

use config::PotentialParts;

use crate::error::{NlspError, Result};
use crate::grid::{Grid, WaveFunction};
use crate::observables::{blowup_criteria_report, scattering_monitor, BlowupCriteriaReport, ScatteringResult};
use crate::potential::{CanonicalForm, QuadraticPotential, Signature};
use crate::solver::{evolve, ground_state_proxy, Monitors, Nonlinearity, RunOutcome, SolverConfig};
use crate::transforms::{avron_herbst, harmonic_lens, repulsive_lens};

/// Relative `L^2` tolerance of the transform oracles.
pub const ORACLE_TOLERANCE: f64 = 5e-4;

/// Everything needed to integrate one scenario.
#[derive(Clone, Debug)]
pub struct Setup {
    pub grid: Grid<f64>,
    /// Potential in the coordinates of `grid`.
    pub potential: QuadraticPotential<f64>,
    /// For matrix potentials, the canonical frame the run is carried out in.
    pub frame: Option<CanonicalForm<f64>>,
    pub nonlinearity: Nonlinearity<f64>,
    pub datum: WaveFunction<f64>,
}

impl ScenarioSpec {
    pub fn setup(&self) -> Result<Setup> {
        let grid = Grid::from_axes(&self.grid_axes()?)?;
        let (potential, frame) = match self.potential_parts()? {
            PotentialParts::Canonical(p) => (p, None),
            PotentialParts::Matrix(f) => (f.potential.clone(), Some(f)),
        };
        let dim = self.grid.dim;
        let eps = self.initial.epsilon;
        let nl = &self.nonlinearity;
        let lambda = if nl.critical_scaling {
            nl.lambda * eps.powf(dim as f64 * nl.sigma)
        } else {
            nl.lambda
        };
        let nonlinearity = Nonlinearity::new(lambda, nl.sigma, dim)?;
        let datum = self.datum(&grid, frame.as_ref())?;
        Ok(Setup {
            grid,
            potential,
            frame,
            nonlinearity,
            datum,
        })
    }

    pub fn solver_config(&self) -> SolverConfig<f64> {
        let t = &self.time;
        let mut cfg = SolverConfig::with_dt(t.dt).with_splitting(t.splitting);
        if let Some(m) = t.dt_min {
            cfg.dt_min = m;
        }
        cfg.adaptive = t.adaptive;
        cfg
    }

    pub fn monitors(&self) -> Monitors<f64> {
        let m = Monitors::every(0.0, self.time.t_end, self.time.cadence).with_lp(self.observables.lp.clone());
        if self.observables.scattering || self.observables.oracle.is_some() {
            m.keeping_states()
        } else {
            m
        }
    }

    fn datum(&self, grid: &Grid<f64>, frame: Option<&CanonicalForm<f64>>) -> Result<WaveFunction<f64>> {
        let init = &self.initial;
        let eps = init.epsilon;
        let dim = self.grid.dim;
        let to_x = |z: &[f64]| frame.map_or_else(|| z.to_vec(), |f| f.from_canonical(z));
        // Profile phase `b |y|^2 / (2 e) + xi . y / e` with `e` the phase scale.
        let phase = |y: &[f64], e: f64| {
            let r2: f64 = y.iter().map(|v| v * v).sum();
            let dot: f64 = y.iter().zip(&init.momentum).map(|(a, b)| a * b).sum();
            Complex::from_polar(1.0, init.chirp * r2 / (2.0 * e) + dot / e)
        };
        let gaussian = |y: &[f64]| {
            let d2: f64 = y.iter().zip(&init.center).map(|(a, c)| (a - c) * (a - c)).sum();
            init.amplitude * (-d2 / (2.0 * init.width * init.width)).exp()
        };
        let concentrating = init.kind == DatumKind::Concentrating;
        if concentrating && eps < 8.0 * grid.max_spacing() {
            return Err(NlspError::Resolution(format!(
                "eps = {eps} needs at least eight cells per eps; spacing is {}",
                grid.max_spacing()
            )));
        }
        let ground_state = init.kind == DatumKind::GroundState
            || (concentrating && init.profile == ProfileKind::GroundState);
        let values = if ground_state {
            // The profile is computed with the file's lambda, before any
            // semiclassical scaling.
            let profile_nl = Nonlinearity::new(self.nonlinearity.lambda, self.nonlinearity.sigma, dim)?;
            let scale = if concentrating { eps } else { 1.0 };
            let axes: Vec<(usize, f64)> = grid.axes().iter().map(|a| (a.points(), a.half_width() / scale)).collect();
            let pgrid = Grid::from_axes(&axes)?;
            let q = ground_state_proxy(&pgrid, &profile_nl)?;
            let center_x: Vec<f64> = init.center.iter().map(|c| c * scale).collect();
            let center_z = frame.map_or_else(|| center_x.clone(), |f| f.to_canonical(&center_x));
            let offset: Vec<f64> = center_z.iter().map(|c| -c / scale).collect();
            let shifted = pgrid.shift(q.values(), &offset);
            let coords = grid.coordinate_tables();
            let amp = init.amplitude * scale.powf(-(dim as f64) / 2.0);
            shifted
                .iter()
                .enumerate()
                .map(|(flat, q)| {
                    let idx = grid.multi_index(flat);
                    let z: Vec<f64> = (0..dim).map(|j| coords[j][idx[j]]).collect();
                    let y: Vec<f64> = to_x(&z).iter().map(|x| x / scale).collect();
                    q * amp * phase(&y, if concentrating { 1.0 } else { eps })
                })
                .collect()
        } else if concentrating {
            let amp = eps.powf(-(dim as f64) / 2.0);
            grid.sample(|z| {
                let y: Vec<f64> = to_x(z).iter().map(|x| x / eps).collect();
                phase(&y, 1.0) * (amp * gaussian(&y))
            })
        } else {
            grid.sample(|z| {
                let x = to_x(z);
                phase(&x, eps) * gaussian(&x)
            })
        };
        WaveFunction::new(grid.clone(), values, 0.0, eps)
    }
}

/// One checkpoint of a transform oracle.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleRow {
    pub time: f64,
    /// Time of the free solution that the transform maps to `time`.
    pub warped_time: f64,
    /// `||direct - transformed|| / ||direct||`.
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleTable {
    pub kind: OracleKind,
    pub rows: Vec<OracleRow>,
    pub max_difference: f64,
    pub passed: bool,
}

pub fn relative_l2(a: &WaveFunction<f64>, reference: &WaveFunction<f64>) -> f64 {
    let diff: Vec<Complex<f64>> = a.values().iter().zip(reference.values()).map(|(x, y)| x - y).collect();
    let g = reference.grid();
    (g.l2_norm_sq(&diff) / g.l2_norm_sq(reference.values())).sqrt()
}

/// Compare direct snapshots (solved with `pot`) against a free solve mapped
/// through the transform that removes `pot`.
pub fn transform_oracle(
    kind: OracleKind,
    datum: &WaveFunction<f64>,
    pot: &QuadraticPotential<f64>,
    nl: &Nonlinearity<f64>,
    cfg: &SolverConfig<f64>,
    direct: &[WaveFunction<f64>],
) -> Result<OracleTable> {
    let dim = datum.dim();
    let gauge_free = pot.is_gauge_free();
    let lens_omega = |want: Signature| match pot.isotropic() {
        Some((s, w)) if s == want && gauge_free => Ok(w),
        _ => Err(NlspError::Domain(format!(
            "the {} oracle needs an isotropic {want:?} potential",
            kind.as_str()
        ))),
    };
    let (omega, warp): (f64, Box<dyn Fn(f64) -> Option<f64>>) = match kind {
        OracleKind::AvronHerbst => {
            if !pot.is_free() || pot.constant() != 0.0 {
                return Err(NlspError::Domain("the Avron-Herbst oracle needs a pure Stark potential".into()));
            }
            (0.0, Box::new(Some))
        }
        OracleKind::HarmonicLens => {
            let w = lens_omega(Signature::Harmonic)?;
            let focus = std::f64::consts::FRAC_PI_2 / w;
            (w, Box::new(move |t: f64| (t.abs() < focus * (1.0 - 1e-9)).then(|| (w * t).tan() / w)))
        }
        OracleKind::RepulsiveLens => {
            let w = lens_omega(Signature::Repulsive)?;
            (w, Box::new(move |t: f64| Some((w * t).tanh() / w)))
        }
    };
    let usable: Vec<(&WaveFunction<f64>, f64)> = direct
        .iter()
        .filter_map(|u| warp(u.time()).map(|tau| (u, tau)))
        .collect();
    if usable.is_empty() {
        return Ok(OracleTable {
            kind,
            rows: vec![],
            max_difference: f64::NAN,
            passed: false,
        });
    }
    let warped: Vec<f64> = usable.iter().map(|(_, tau)| *tau).collect();
    let horizon = warped.iter().copied().fold(0.0, f64::max);
    let free = QuadraticPotential::free(dim);
    let free_run = evolve(datum, horizon, &free, nl, cfg, &Monitors::at(warped).keeping_states())?;
    let series = &free_run.snapshots;
    let mapped = match kind {
        OracleKind::AvronHerbst => avron_herbst(series, pot.linear())?,
        OracleKind::HarmonicLens => harmonic_lens(series, omega, nl)?,
        OracleKind::RepulsiveLens => repulsive_lens(series, omega, nl, None)?,
    };
    let rows: Vec<OracleRow> = usable
        .iter()
        .zip(&mapped)
        .map(|((u, tau), v)| OracleRow {
            time: u.time(),
            warped_time: *tau,
            difference: relative_l2(v, u),
        })
        .collect();
    let max_difference = rows.iter().map(|r| r.difference).fold(0.0, f64::max);
    let passed = rows.len() == usable.len() && max_difference < ORACLE_TOLERANCE;
    Ok(OracleTable {
        kind,
        rows,
        max_difference,
        passed,
    })
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub spec: ScenarioSpec,
    pub outcome: RunOutcome<f64>,
    pub criteria: Option<BlowupCriteriaReport<f64>>,
    pub oracle: Option<OracleTable>,
    pub scattering: Option<ScatteringResult<f64>>,
    /// `key=value` verdicts, each computed from the fields above.
    pub verdicts: Vec<(String, String)>,
}

/// Largest `|q(t) - q(0)| / |q(0)|` over a series.
pub fn max_relative_drift(series: impl IntoIterator<Item = f64>) -> f64 {
    let mut it = series.into_iter();
    let Some(q0) = it.next() else { return 0.0 };
    let scale = if q0 != 0.0 { q0.abs() } else { 1.0 };
    it.map(|q| (q - q0).abs() / scale).fold(0.0, f64::max)
}

pub fn run_scenario(spec: &ScenarioSpec) -> Result<ExperimentReport> {
    let setup = spec.setup()?;
    let cfg = spec.solver_config();
    let criteria = if spec.observables.criteria {
        Some(blowup_criteria_report(&setup.datum, &setup.potential, &setup.nonlinearity)?)
    } else {
        None
    };
    let outcome = evolve(
        &setup.datum,
        spec.time.t_end,
        &setup.potential,
        &setup.nonlinearity,
        &cfg,
        &spec.monitors(),
    )?;
    let scattering = if spec.observables.scattering {
        Some(scattering_monitor(
            &outcome.snapshots,
            &setup.potential,
            spec.observables.scattering_tolerance,
        )?)
    } else {
        None
    };
    let oracle = match spec.observables.oracle {
        Some(kind) => Some(transform_oracle(
            kind,
            &setup.datum,
            &setup.potential,
            &setup.nonlinearity,
            &cfg,
            &outcome.snapshots,
        )?),
        None => None,
    };
    let mut report = ExperimentReport {
        spec: spec.clone(),
        outcome,
        criteria,
        oracle,
        scattering,
        verdicts: vec![],
    };
    report.verdicts = verdicts(&report);
    Ok(report)
}

fn verdicts(r: &ExperimentReport) -> Vec<(String, String)> {
    let f = format_number;
    let o = &r.outcome;
    let mut v: Vec<(String, String)> = vec![
        ("name".into(), r.spec.name.clone()),
        ("status".into(), o.status.as_str().into()),
        ("final_time".into(), f(o.final_time)),
    ];
    match o.bracket {
        Some((lo, hi)) => {
            v.push(("bracket_lo".into(), f(lo)));
            v.push(("bracket_hi".into(), f(hi)));
        }
        None => {
            v.push(("bracket_lo".into(), "none".into()));
            v.push(("bracket_hi".into(), "none".into()));
        }
    }
    v.push(("records".into(), o.records.len().to_string()));
    v.push(("accepted_steps".into(), o.accepted_steps.to_string()));
    v.push(("rejected_steps".into(), o.rejected_steps.to_string()));
    v.push(("mass_drift".into(), f(max_relative_drift(o.records.iter().map(|q| q.mass)))));
    v.push(("energy_drift".into(), f(max_relative_drift(o.records.iter().map(|q| q.energy)))));
    if let Some(c) = &r.criteria {
        for line in c.to_lines() {
            if let Some((k, val)) = line.split_once('=') {
                v.push((format!("criteria.{k}"), val.to_string()));
            }
        }
    }
    if let Some(s) = &r.scattering {
        v.push(("scattering.converged".into(), s.converged.to_string()));
        v.push((
            "scattering.final_difference".into(),
            s.consecutive.last().map_or("none".into(), |d| f(*d)),
        ));
    }
    if let Some(t) = &r.oracle {
        v.push(("oracle.kind".into(), t.kind.as_str().into()));
        v.push(("oracle.checkpoints".into(), t.rows.len().to_string()));
        v.push(("oracle.max_difference".into(), f(t.max_difference)));
        v.push(("oracle.passed".into(), t.passed.to_string()));
    }
    v
}
