//! Pre-parameterized scenario families. Each driver runs its family,
//! tabulates the outcome and states whether the expected phenomenon showed
//! up. Defaults are sized for a desktop run.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex;
use rayon::prelude::*;

use super::output::{format_number, verdict_string};
use super::relative_l2;
use crate::error::{NlspError, Result};
use crate::grid::{Grid, WaveFunction};
use crate::observables::{blowup_criteria_report, scattering_monitor};
use crate::potential::{AxisPotential, QuadraticPotential};
use crate::propagator::mehler_propagate;
use crate::solver::{evolve, Monitors, Nonlinearity, RunOutcome, RunStatus, SolverConfig, Splitting};
use crate::transforms::{semiclassical_rescale, RescaleDirection};

#[derive(Clone, Debug, PartialEq)]
pub struct DriverReport {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub verdicts: Vec<(String, String)>,
    pub passed: bool,
}

impl DriverReport {
    fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: vec![],
            verdicts: vec![],
            passed: false,
        }
    }

    fn verdict(&mut self, key: impl Into<String>, value: impl ToString) {
        self.verdicts.push((key.into(), value.to_string()));
    }

    pub fn verdict_value(&self, key: &str) -> Option<&str> {
        self.verdicts.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn table_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let _ = writeln!(s, "{}", r.join(","));
        }
        s
    }

    /// `<name>.csv` with the table and `<name>.verdicts`.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let table = dir.join(format!("{}.csv", self.name));
        fs::write(&table, self.table_csv())?;
        let mut v = self.verdicts.clone();
        v.push(("passed".into(), self.passed.to_string()));
        let verdicts = dir.join(format!("{}.verdicts", self.name));
        fs::write(&verdicts, verdict_string(&v))?;
        Ok(vec![table, verdicts])
    }
}

/// Names accepted by [`run_driver`].
pub const DRIVERS: [&str; 7] = [
    "blowup_harmonic",
    "global_repulsive",
    "scattering",
    "refocusing",
    "chirped_blowup",
    "quad_anisotropic",
    "boundary_layer",
];

/// Run a driver with its default parameters.
pub fn run_driver(name: &str) -> Result<DriverReport> {
    match name {
        "blowup_harmonic" => blowup_harmonic(&BlowupHarmonicParams::default()),
        "global_repulsive" => global_repulsive(&GlobalRepulsiveParams::default()),
        "scattering" => scattering(&ScatteringParams::default()),
        "refocusing" => refocusing(&RefocusingParams::default()),
        "chirped_blowup" => chirped_blowup(&ChirpedBlowupParams::default()),
        "quad_anisotropic" => quad_anisotropic(&QuadAnisotropicParams::default()),
        "boundary_layer" => boundary_layer(&BoundaryLayerParams::default()),
        other => Err(NlspError::Domain(format!(
            "unknown driver `{other}`; expected one of {}",
            DRIVERS.join(", ")
        ))),
    }
}

fn num(x: f64) -> String {
    format_number(x)
}

fn bracket_cells(o: &RunOutcome<f64>) -> [String; 2] {
    match o.bracket {
        Some((lo, hi)) => [num(lo), num(hi)],
        None => ["none".into(), "none".into()],
    }
}

/// `amplitude exp(-alpha |x|^2) exp(i chirp |x|^2 / (2 eps))`.
fn gaussian(grid: &Grid<f64>, eps: f64, amplitude: f64, alpha: f64, chirp: f64) -> Result<WaveFunction<f64>> {
    WaveFunction::from_fn(grid.clone(), 0.0, eps, |x| {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        Complex::from_polar(amplitude * (-alpha * r2).exp(), chirp * r2 / (2.0 * eps))
    })
}

/// Indices of blow-up and completed runs, ordered by the swept parameter:
/// `(monotone flip, last blow-up value, first completed value)`.
fn transition(values: &[f64], statuses: &[RunStatus]) -> (bool, Option<f64>, Option<f64>) {
    let first_completed = statuses.iter().position(|&s| s == RunStatus::Completed);
    let monotone = match first_completed {
        Some(k) => {
            statuses[..k].iter().all(|&s| s == RunStatus::BlowUpDetected)
                && statuses[k..].iter().all(|&s| s == RunStatus::Completed)
        }
        None => statuses.iter().all(|&s| s == RunStatus::BlowUpDetected),
    };
    let lower = statuses
        .iter()
        .rposition(|&s| s == RunStatus::BlowUpDetected)
        .map(|k| values[k]);
    (monotone, lower, first_completed.map(|k| values[k]))
}

fn opt(x: Option<f64>) -> String {
    x.map_or("none".into(), num)
}

/// Focusing `L^2`-critical quintic in one dimension: a negative-energy datum
/// blows up freely (with a concave virial) and under a harmonic confinement
/// before the quarter period.
#[derive(Clone, Debug, PartialEq)]
pub struct BlowupHarmonicParams {
    /// Datum `amplitude exp(-x^2)`.
    pub amplitude: f64,
    pub omegas: Vec<f64>,
    pub points: usize,
    pub half_width: f64,
    /// Record spacing for the virial series of the free run.
    pub cadence: f64,
    pub free_horizon: f64,
    /// Allowed relative excess of the bracket over `pi / (2 omega)`.
    pub margin: f64,
}

impl Default for BlowupHarmonicParams {
    fn default() -> Self {
        Self {
            amplitude: 3.0,
            omegas: vec![0.5, 1.0],
            points: 2048,
            half_width: 16.0,
            cadence: 1e-3,
            free_horizon: 1.0,
            margin: 0.02,
        }
    }
}

pub fn blowup_harmonic(p: &BlowupHarmonicParams) -> Result<DriverReport> {
    let grid = Grid::new(1, p.points, p.half_width)?;
    let nl = Nonlinearity::new(-1.0, 2.0, 1)?;
    let u0 = gaussian(&grid, 1.0, p.amplitude, 1.0, 0.0)?;
    let cfg = SolverConfig::default();
    let mut rep = DriverReport::new(
        "blowup_harmonic",
        &["omega", "status", "bracket_lo", "bracket_hi", "time_bound", "criterion_holds"],
    );

    let free = QuadraticPotential::free(1);
    let criteria = blowup_criteria_report(&u0, &free, &nl)?;
    let run = evolve(&u0, p.free_horizon, &free, &nl, &cfg, &Monitors::every(0.0, p.free_horizon, p.cadence))?;
    let virial: Vec<f64> = run.records.iter().map(|r| r.virial).collect();
    let concave = virial.len() >= 3 && virial.windows(3).all(|w| w[2] - 2.0 * w[1] + w[0] < 0.0);
    let free_blows = run.status == RunStatus::BlowUpDetected && run.bracket.is_some_and(|(_, hi)| hi.is_finite());
    let [lo, hi] = bracket_cells(&run);
    rep.rows.push(vec![
        num(0.0),
        run.status.as_str().into(),
        lo,
        hi,
        "none".into(),
        criteria.glassey.holds.to_string(),
    ]);
    rep.verdict("free_energy", num(criteria.free_energy));
    rep.verdict("glassey_holds", criteria.glassey.holds);
    rep.verdict("free_status", run.status.as_str());
    rep.verdict("virial_interior_points", virial.len().saturating_sub(2));
    rep.verdict("virial_concave", concave);
    let glassey_passed = criteria.glassey.holds && free_blows && concave;
    rep.verdict("glassey_passed", glassey_passed);

    let mut harmonic_passed = true;
    for &w in &p.omegas {
        let pot = QuadraticPotential::harmonic(1, w)?;
        let c = blowup_criteria_report(&u0, &pot, &nl)?;
        let check = c.harmonic.ok_or_else(|| NlspError::Domain("harmonic criterion missing".into()))?;
        let bound = FRAC_PI_2 / w;
        let run = evolve(&u0, bound * 1.1, &pot, &nl, &cfg, &Monitors::at(vec![]))?;
        let within = run.status == RunStatus::BlowUpDetected
            && run.bracket.is_some_and(|(_, hi)| hi <= bound * (1.0 + p.margin));
        harmonic_passed &= check.holds && within;
        let [lo, hi] = bracket_cells(&run);
        rep.rows.push(vec![num(w), run.status.as_str().into(), lo, hi, num(bound), check.holds.to_string()]);
        rep.verdict(format!("omega_{w}_criterion_holds"), check.holds);
        rep.verdict(format!("omega_{w}_within_bound"), within);
    }
    rep.verdict("harmonic_passed", harmonic_passed);
    rep.passed = glassey_passed && harmonic_passed;
    Ok(rep)
}

/// Repulsive sweep on a datum that blows up freely: strong enough
/// repulsion makes the solution global.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalRepulsiveParams {
    /// Datum `amplitude exp(-x^2)`, quintic focusing.
    pub amplitude: f64,
    /// Increasing; `0` is the free reference.
    pub omegas: Vec<f64>,
    pub points: usize,
    pub half_width: f64,
    pub t_end: f64,
}

impl Default for GlobalRepulsiveParams {
    fn default() -> Self {
        Self {
            amplitude: 1.5,
            omegas: vec![0.0, 0.5, 1.0, 2.0, 4.0],
            points: 16384,
            half_width: 48.0,
            t_end: 1.5,
        }
    }
}

fn repulsive_or_free(dim: usize, omega: f64) -> Result<QuadraticPotential<f64>> {
    if omega == 0.0 {
        Ok(QuadraticPotential::free(dim))
    } else {
        QuadraticPotential::repulsive(dim, omega)
    }
}

pub fn global_repulsive(p: &GlobalRepulsiveParams) -> Result<DriverReport> {
    let grid = Grid::new(1, p.points, p.half_width)?;
    let nl = Nonlinearity::new(-1.0, 2.0, 1)?;
    let u0 = gaussian(&grid, 1.0, p.amplitude, 1.0, 0.0)?;
    let cfg = SolverConfig::default();
    let mut rep = DriverReport::new(
        "global_repulsive",
        &["omega", "status", "bracket_lo", "bracket_hi", "final_time", "lens_prediction"],
    );
    let mut statuses = Vec::new();
    let mut free_time: Option<f64> = None;
    for &w in &p.omegas {
        let run = evolve(&u0, p.t_end, &repulsive_or_free(1, w)?, &nl, &cfg, &Monitors::at(vec![]))?;
        if w == 0.0 {
            free_time = run.bracket.map(|(_, hi)| hi);
        }
        // Conformal lens: free blow-up at T maps to atanh(omega T) / omega.
        let prediction = match free_time {
            Some(t) if w == 0.0 => num(t),
            Some(t) if w * t < 1.0 => num((w * t).atanh() / w),
            Some(_) => "global".into(),
            None => "none".into(),
        };
        let [lo, hi] = bracket_cells(&run);
        rep.rows.push(vec![num(w), run.status.as_str().into(), lo, hi, num(run.final_time), prediction]);
        statuses.push(run.status);
    }
    let (monotone, lower, upper) = transition(&p.omegas, &statuses);
    rep.verdict("transition_omega_lower", opt(lower));
    rep.verdict("transition_omega_upper", opt(upper));
    rep.verdict("monotone", monotone);
    let reference_blows = p.omegas.first() == Some(&0.0) && statuses.first() == Some(&RunStatus::BlowUpDetected);
    let largest_completes = statuses.last() == Some(&RunStatus::Completed);
    rep.verdict("reference_blows_up", reference_blows);
    rep.verdict("largest_omega_completes", largest_completes);
    rep.passed = reference_blows && largest_completes && monotone;
    Ok(rep)
}

/// Defocusing cubic with a repulsive potential: `U_V(-t) u(t)` settles.
#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringParams {
    /// Datum `amplitude exp(-x^2 / 2)`.
    pub amplitude: f64,
    pub omega: f64,
    pub lambda: f64,
    pub sigma: f64,
    pub points: usize,
    pub half_width: f64,
    pub checkpoints: Vec<f64>,
    pub dt: f64,
    pub tolerance: f64,
}

impl Default for ScatteringParams {
    fn default() -> Self {
        Self {
            amplitude: 0.1,
            omega: 1.0,
            lambda: 1.0,
            sigma: 1.0,
            points: 65536,
            half_width: 256.0,
            checkpoints: (0..7).map(|k| 1.0 + 0.5 * k as f64).collect(),
            dt: 5e-3,
            tolerance: 1e-4,
        }
    }
}

pub fn scattering(p: &ScatteringParams) -> Result<DriverReport> {
    let grid = Grid::new(1, p.points, p.half_width)?;
    let nl = Nonlinearity::new(p.lambda, p.sigma, 1)?;
    let pot = QuadraticPotential::repulsive(1, p.omega)?;
    let u0 = gaussian(&grid, 1.0, p.amplitude, 0.5, 0.0)?;
    let cfg = SolverConfig::with_dt(p.dt).with_splitting(Splitting::ExactLinear);
    let t_end = p.checkpoints.iter().copied().fold(0.0, f64::max);
    let run = evolve(&u0, t_end, &pot, &nl, &cfg, &Monitors::at(p.checkpoints.clone()).keeping_states())?;
    let s = scattering_monitor(&run.snapshots, &pot, p.tolerance)?;
    let mut rep = DriverReport::new("scattering", &["t_from", "t_to", "sigma_difference"]);
    for (k, d) in s.consecutive.iter().enumerate() {
        rep.rows.push(vec![num(s.times[k]), num(s.times[k + 1]), num(*d)]);
    }
    let decreasing = s.consecutive.windows(2).all(|w| w[1] < w[0]);
    rep.verdict("status", run.status.as_str());
    rep.verdict("decreasing", decreasing);
    rep.verdict("final_difference", opt(s.consecutive.last().copied()));
    rep.verdict("tolerance", num(p.tolerance));
    rep.verdict("converged", s.converged);
    rep.passed = run.status == RunStatus::Completed && s.converged;
    Ok(rep)
}

/// Harmonic focusing of `u0 = exp(-x^2/2)`: the linear focus profile and the
/// pre-focus WKB profile at the critical nonlinear scale.
#[derive(Clone, Debug, PartialEq)]
pub struct RefocusingParams {
    /// Decreasing.
    pub epsilons: Vec<f64>,
    pub omega: f64,
    pub points: usize,
    pub half_width: f64,
    /// Nonlinear run: `lambda = eps^sigma`.
    pub sigma: f64,
    /// Pre-focus comparison time.
    pub prefocus_time: f64,
    /// Focus errors below this are round-off and count as converged.
    pub round_off_floor: f64,
}

impl Default for RefocusingParams {
    fn default() -> Self {
        Self {
            epsilons: vec![0.2, 0.1, 0.05],
            omega: 1.0,
            points: 2048,
            half_width: 16.0,
            sigma: 2.0,
            prefocus_time: FRAC_PI_4,
            round_off_floor: 1e-12,
        }
    }
}

pub fn refocusing(p: &RefocusingParams) -> Result<DriverReport> {
    let grid = Grid::new(1, p.points, p.half_width)?;
    let pot = QuadraticPotential::harmonic(1, p.omega)?;
    let w = p.omega;
    let mut rep = DriverReport::new("refocusing", &["epsilon", "focus_error", "prefocus_error"]);
    let mut focus = Vec::new();
    let mut prefocus = Vec::new();
    for &eps in &p.epsilons {
        let u0 = gaussian(&grid, eps, 1.0, 0.5, 0.0)?;

        // Linear focus: |u| = (omega/eps)^{1/2} |f^(omega x / eps)|, f^ = exp(-xi^2/2).
        let at_focus = mehler_propagate(&u0, &pot, FRAC_PI_2 / w)?;
        let target = grid.sample(|x| {
            let xi = w * x[0] / eps;
            Complex::new((w / eps).sqrt() * (-0.5 * xi * xi).exp(), 0.0)
        });
        let modulus: Vec<Complex<f64>> = at_focus.values().iter().map(|c| Complex::new(c.norm(), 0.0)).collect();
        let diff: Vec<Complex<f64>> = modulus.iter().zip(&target).map(|(a, b)| a - b).collect();
        let focus_err = (grid.l2_norm_sq(&diff) / grid.l2_norm_sq(&target)).sqrt();

        // Critical nonlinear scale against the linear WKB profile.
        let nl = Nonlinearity::new(eps.powf(p.sigma), p.sigma, 1)?;
        let t = p.prefocus_time;
        let cfg = SolverConfig::default().with_splitting(Splitting::ExactLinear);
        let run = evolve(&u0, t, &pot, &nl, &cfg, &Monitors::at(vec![]))?;
        let (c, tn) = ((w * t).cos(), (w * t).tan());
        let approx = WaveFunction::from_fn(grid.clone(), t, eps, |x| {
            let y = x[0] / c;
            Complex::from_polar(c.abs().powf(-0.5) * (-0.5 * y * y).exp(), -w * x[0] * x[0] * tn / (2.0 * eps))
        })?;
        let pre_err = if run.status == RunStatus::Completed {
            relative_l2(&run.final_state, &approx)
        } else {
            f64::INFINITY
        };
        rep.rows.push(vec![num(eps), num(focus_err), num(pre_err)]);
        focus.push(focus_err);
        prefocus.push(pre_err);
    }
    let monotone = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let focus_monotone = monotone(&focus);
    let focus_floor = focus.iter().all(|&e| e < p.round_off_floor);
    rep.verdict("focus_monotone", focus_monotone);
    rep.verdict("focus_below_round_off_floor", focus_floor);
    rep.verdict("focus_passed", focus_monotone || focus_floor);
    rep.verdict("prefocus_decreasing", monotone(&prefocus));
    rep.passed = (focus_monotone || focus_floor) && monotone(&prefocus);
    Ok(rep)
}

/// Quadratic chirp `exp(i b x^2 / 2)` on a free blow-up datum: large
/// positive `b` defers blow-up past the horizon, negative `b` forces it
/// before `-1/b`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChirpedBlowupParams {
    pub amplitude: f64,
    /// Increasing.
    pub chirps: Vec<f64>,
    pub points: usize,
    pub half_width: f64,
    pub t_end: f64,
    pub margin: f64,
}

impl Default for ChirpedBlowupParams {
    fn default() -> Self {
        Self {
            amplitude: 1.5,
            chirps: vec![-8.0, -4.0, 0.0, 2.0, 8.0],
            points: 4096,
            half_width: 32.0,
            t_end: 1.0,
            margin: 0.05,
        }
    }
}

pub fn chirped_blowup(p: &ChirpedBlowupParams) -> Result<DriverReport> {
    let grid = Grid::new(1, p.points, p.half_width)?;
    let nl = Nonlinearity::new(-1.0, 2.0, 1)?;
    let pot = QuadraticPotential::free(1);
    let cfg = SolverConfig::default();
    let run_b = |b: f64| -> Result<RunOutcome<f64>> {
        let u0 = gaussian(&grid, 1.0, p.amplitude, 1.0, b)?;
        evolve(&u0, p.t_end, &pot, &nl, &cfg, &Monitors::at(vec![]))
    };
    let reference = run_b(0.0)?;
    let free_time = reference.bracket.map(|(_, hi)| hi);
    let mut rep = DriverReport::new(
        "chirped_blowup",
        &["b", "status", "bracket_lo", "bracket_hi", "bound", "lens_prediction"],
    );
    rep.verdict("free_blowup_time", opt(free_time));
    let Some(t_free) = free_time else {
        rep.verdict("reference_blows_up", false);
        return Ok(rep);
    };
    let mut bounds_ok = true;
    let mut checked = 0;
    let mut largest_completes = false;
    for (k, &b) in p.chirps.iter().enumerate() {
        let run = if b == 0.0 { reference.clone() } else { run_b(b)? };
        let bound = (b < 0.0).then(|| -1.0 / b);
        if b < -1.0 / t_free {
            checked += 1;
            let ok = run.status == RunStatus::BlowUpDetected
                && run.bracket.is_some_and(|(_, hi)| hi <= bound.unwrap() * (1.0 + p.margin));
            bounds_ok &= ok;
        }
        if k + 1 == p.chirps.len() {
            largest_completes = run.status == RunStatus::Completed;
        }
        // The chirp is a lens: T_b = T / (1 - b T) when b T < 1.
        let prediction = if b * t_free < 1.0 {
            num(t_free / (1.0 - b * t_free))
        } else {
            "global".into()
        };
        let [lo, hi] = bracket_cells(&run);
        rep.rows.push(vec![num(b), run.status.as_str().into(), lo, hi, opt(bound), prediction]);
    }
    let largest = p.chirps.last().copied().unwrap_or(0.0);
    rep.verdict("reference_blows_up", true);
    rep.verdict("negative_chirps_checked", checked);
    rep.verdict("negative_bounds_hold", bounds_ok);
    rep.verdict("largest_b", num(largest));
    rep.verdict("largest_b_exceeds_inverse_time", largest * t_free > 1.0);
    rep.verdict("largest_b_completes", largest_completes);
    rep.passed = checked > 0 && bounds_ok && largest * t_free > 1.0 && largest_completes;
    Ok(rep)
}

/// Two dimensions, confining along `x_1` and repulsive along `x_2`, focusing
/// cubic: sweep the repulsive frequency and report where blow-up stops.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadAnisotropicParams {
    pub omega_plus: f64,
    /// Increasing; `0` is the reference without repulsion.
    pub omega_minus: Vec<f64>,
    /// Datum `amplitude exp(-|x|^2)`.
    pub amplitude: f64,
    /// `(points, half_width)` for the confined and the repulsive axis.
    pub axes: [(usize, f64); 2],
    pub t_end: f64,
}

impl Default for QuadAnisotropicParams {
    fn default() -> Self {
        Self {
            omega_plus: 1.0,
            omega_minus: vec![0.0, 1.0, 2.0, 4.0],
            amplitude: 2.4,
            axes: [(128, 6.0), (2048, 32.0)],
            t_end: 0.6,
        }
    }
}

pub fn quad_anisotropic(p: &QuadAnisotropicParams) -> Result<DriverReport> {
    let grid = Grid::from_axes(&p.axes)?;
    let nl = Nonlinearity::new(-1.0, 1.0, 2)?;
    let u0 = gaussian(&grid, 1.0, p.amplitude, 1.0, 0.0)?;
    let cfg = SolverConfig::default();
    let mut rep = DriverReport::new(
        "quad_anisotropic",
        &["omega_minus", "status", "bracket_lo", "bracket_hi", "final_time"],
    );
    let runs = p
        .omega_minus
        .par_iter()
        .map(|&wm| {
            let repulsive = if wm == 0.0 { AxisPotential::free() } else { AxisPotential::repulsive(wm) };
            let pot =
                QuadraticPotential::new(vec![AxisPotential::harmonic(p.omega_plus), repulsive], vec![0.0; 2], 0.0)?;
            evolve(&u0, p.t_end, &pot, &nl, &cfg, &Monitors::at(vec![]))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut statuses = Vec::new();
    for (&wm, run) in p.omega_minus.iter().zip(&runs) {
        let [lo, hi] = bracket_cells(run);
        rep.rows.push(vec![num(wm), run.status.as_str().into(), lo, hi, num(run.final_time)]);
        statuses.push(run.status);
    }
    let (monotone, lower, upper) = transition(&p.omega_minus, &statuses);
    rep.verdict("omega_plus", num(p.omega_plus));
    rep.verdict("transition_omega_minus_lower", opt(lower));
    rep.verdict("transition_omega_minus_upper", opt(upper));
    rep.verdict("monotone", monotone);
    let reference_blows = statuses.first() == Some(&RunStatus::BlowUpDetected);
    rep.verdict("reference_blows_up", reference_blows);
    rep.passed = reference_blows && upper.is_some();
    Ok(rep)
}

/// Concentrating datum `eps^{-1/2} phi(x / eps)` with a repulsive potential
/// and `lambda = eps^sigma`: on `|t| <= window eps` the solution is the
/// rescaled free nonlinear profile.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryLayerParams {
    /// Decreasing.
    pub epsilons: Vec<f64>,
    pub omega: f64,
    pub sigma: f64,
    /// Sign and size of the profile coupling.
    pub lambda: f64,
    pub points: usize,
    pub half_width: f64,
    /// Time window in units of `eps`.
    pub window: f64,
    pub checkpoints: usize,
    /// Step of the profile run; the direct run uses `eps` times this.
    pub dt: f64,
}

impl Default for BoundaryLayerParams {
    fn default() -> Self {
        Self {
            epsilons: vec![0.2, 0.1],
            omega: 1.0,
            sigma: 1.0,
            lambda: 1.0,
            points: 4096,
            half_width: 16.0,
            window: 2.0,
            checkpoints: 10,
            dt: 1e-3,
        }
    }
}

pub fn boundary_layer(p: &BoundaryLayerParams) -> Result<DriverReport> {
    let pot = QuadraticPotential::repulsive(1, p.omega)?;
    let profile_nl = Nonlinearity::new(p.lambda, p.sigma, 1)?;
    let free = QuadraticPotential::free(1);
    let s_times: Vec<f64> = (1..=p.checkpoints)
        .map(|k| p.window * k as f64 / p.checkpoints as f64)
        .collect();
    let mut rep = DriverReport::new("boundary_layer", &["epsilon", "max_error", "final_error"]);
    let mut errors = Vec::new();
    for &eps in &p.epsilons {
        let pgrid = Grid::new(1, p.points, p.half_width / eps)?;
        let phi = gaussian(&pgrid, 1.0, 1.0, 0.5, 0.0)?;
        let profile_run = evolve(
            &phi,
            p.window,
            &free,
            &profile_nl,
            &SolverConfig::with_dt(p.dt),
            &Monitors::at(s_times.clone()).keeping_states(),
        )?;
        let u0 = semiclassical_rescale(&phi, eps, 0.0, RescaleDirection::ToSemiclassical)?;
        let nl = Nonlinearity::new(p.lambda * eps.powf(p.sigma), p.sigma, 1)?;
        let t_times: Vec<f64> = s_times.iter().map(|s| eps * s).collect();
        let direct = evolve(
            &u0,
            eps * p.window,
            &pot,
            &nl,
            &SolverConfig::with_dt(eps * p.dt).with_splitting(Splitting::ExactLinear),
            &Monitors::at(t_times).keeping_states(),
        )?;
        if direct.snapshots.len() != s_times.len() || profile_run.snapshots.len() != s_times.len() {
            return Err(NlspError::Convergence(format!("boundary-layer runs stopped early at eps = {eps}")));
        }
        let errs = profile_run
            .snapshots
            .iter()
            .zip(&direct.snapshots)
            .map(|(psi, u)| Ok(relative_l2(&semiclassical_rescale(psi, eps, 0.0, RescaleDirection::ToSemiclassical)?, u)))
            .collect::<Result<Vec<f64>>>()?;
        let max = errs.iter().copied().fold(0.0, f64::max);
        rep.rows.push(vec![num(eps), num(max), num(*errs.last().unwrap())]);
        errors.push(max);
    }
    let decreasing = errors.windows(2).all(|w| w[1] < w[0]);
    // Real profile and even potential: u(-t) is the conjugate of u(t), so the
    // positive half of the window covers |t| <= window eps.
    rep.verdict("negative_times", "conjugation_symmetry");
    rep.verdict("decreasing", decreasing);
    rep.passed = decreasing && errors.len() >= 2;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transition_reports_flip_between_last_blow_up_and_first_completion() {
        use RunStatus::{BlowUpDetected as B, Completed as C};
        let values = [0.0, 1.0, 2.0, 4.0];
        assert_eq!(transition(&values, &[B, B, C, C]), (true, Some(1.0), Some(2.0)));
        assert_eq!(transition(&values, &[B, B, B, B]), (true, Some(4.0), None));
        let (monotone, _, _) = transition(&values, &[B, C, B, C]);
        assert!(!monotone);
    }

    #[test]
    fn unknown_driver_is_a_domain_error() {
        assert!(matches!(run_driver("nope"), Err(NlspError::Domain(_))));
    }

    #[test]
    fn report_csv_has_header_and_rows() {
        let mut rep = DriverReport::new("t", &["a", "b"]);
        rep.rows.push(vec!["1".into(), "2".into()]);
        assert_eq!(rep.table_csv(), "a,b\n1,2\n");
    }
}
