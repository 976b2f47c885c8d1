//! Built-in checks: exact identities and invariants of the numerical core,
//! then the phenomenon drivers. Each check reports pass or fail together
//! with the measured numbers.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;

use num_complex::Complex;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::drivers::{self, DriverReport};
use super::{transform_oracle, OracleKind};
use crate::error::Result;
use crate::grid::{Grid, WaveFunction};
use crate::observables::{blowup_criteria_report, h_norm_sq, j_norm_sq, mass, pseudo_conformal_functional};
use crate::potential::{phase_functions, QuadraticPotential, Signature};
use crate::propagator::{dispersion_bound, mehler_propagate};
use crate::solver::{evolve, Monitors, Nonlinearity, RunOutcome, SolverConfig};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Copy)]
pub struct Check {
    pub name: &'static str,
    body: fn() -> Result<(bool, String)>,
}

impl Check {
    /// Errors and panics count as failures.
    pub fn run(&self) -> CheckResult {
        let (passed, detail) = match catch_unwind(AssertUnwindSafe(self.body)) {
            Ok(Ok(r)) => r,
            Ok(Err(e)) => (false, format!("error: {e}")),
            Err(_) => (false, "panicked".into()),
        };
        CheckResult {
            name: self.name,
            passed,
            detail,
        }
    }
}

/// Fast checks on the propagator, observables and integrator.
pub fn invariant_checks() -> Vec<Check> {
    vec![
        Check { name: "determinant identity", body: determinant_identity },
        Check { name: "mehler unitarity and group law", body: unitarity_and_group_law },
        Check { name: "harmonic revival", body: harmonic_revival },
        Check { name: "dispersive bound", body: dispersive_bound },
        Check { name: "heisenberg constancy", body: heisenberg_constancy },
        Check { name: "lens transform oracles", body: lens_oracles },
        Check { name: "conservation and second order", body: conservation },
        Check { name: "pseudo-conformal conservation", body: pseudo_conformal },
        Check { name: "e1 evolution laws", body: e1_laws },
    ]
}

/// Blow-up, global existence, scattering and semiclassical scenarios.
pub fn phenomenon_checks() -> Vec<Check> {
    vec![
        Check { name: "virial blow-up", body: virial_blowup },
        Check { name: "harmonic blow-up bound", body: harmonic_blowup },
        Check { name: "repulsive global existence", body: repulsive_global },
        Check { name: "chirped blow-up control", body: chirped_control },
        Check { name: "scattering", body: scattering },
        Check { name: "semiclassical refocusing", body: refocusing },
        Check { name: "boundary layer", body: boundary_layer },
    ]
}

pub fn all_checks() -> Vec<Check> {
    let mut v = invariant_checks();
    v.extend(phenomenon_checks());
    v
}

fn line(points: usize, half_width: f64) -> Result<Grid<f64>> {
    Grid::new(1, points, half_width)
}

/// `amplitude exp(-alpha (x - c)^2) exp(i (k x + b x^2 / 2) / eps)`.
fn packet(grid: &Grid<f64>, eps: f64, amplitude: f64, alpha: f64, c: f64, k: f64, b: f64) -> Result<WaveFunction<f64>> {
    WaveFunction::from_fn(grid.clone(), 0.0, eps, |x| {
        let y = x[0] - c;
        Complex::from_polar(amplitude * (-alpha * y * y).exp(), (k * x[0] + 0.5 * b * x[0] * x[0]) / eps)
    })
}

fn l2_distance(a: &WaveFunction<f64>, b: &WaveFunction<f64>) -> f64 {
    let d: Vec<Complex<f64>> = a.values().iter().zip(b.values()).map(|(x, y)| x - y).collect();
    a.grid().l2_norm_sq(&d).sqrt()
}

fn linear_potentials() -> Result<Vec<(&'static str, QuadraticPotential<f64>)>> {
    Ok(vec![
        ("free", QuadraticPotential::free(1)),
        ("harmonic", QuadraticPotential::harmonic(1, 1.0)?),
        ("repulsive", QuadraticPotential::repulsive(1, 0.5)?),
    ])
}

/// Transform, potential, lambda, sigma and direct-run times.
type OracleCase<'a> = (OracleKind, QuadraticPotential<f64>, f64, f64, &'a [f64]);

fn max_drift(values: &[f64]) -> f64 {
    super::max_relative_drift(values.iter().copied())
}

fn determinant_identity() -> Result<(bool, String)> {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let signatures = [Signature::Repulsive, Signature::Free, Signature::Harmonic];
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let s = signatures[rng.gen_range(0..3)];
        let omega: f64 = rng.gen_range(0.1..2.0);
        let t: f64 = rng.gen_range(-1.5..1.5);
        let (g, h) = phase_functions(s, omega, t);
        let det = -(s.delta() as f64) * omega * omega * g * g - h * h;
        worst = worst.max((det + 1.0).abs());
    }
    Ok((worst < 1e-12, format!("max |det + 1| = {worst:.3e} over 10000 samples")))
}

fn unitarity_and_group_law() -> Result<(bool, String)> {
    let grid = line(1024, 24.0)?;
    let f = packet(&grid, 1.0, 1.0, 0.5, 0.5, 0.7, 0.3)?;
    let (t, s) = (0.7, 0.4);
    let mut worst_mass: f64 = 0.0;
    let mut worst_group: f64 = 0.0;
    let norm = mass(&f).sqrt();
    for (_, pot) in linear_potentials()? {
        let direct = mehler_propagate(&f, &pot, t + s)?;
        let composed = mehler_propagate(&mehler_propagate(&f, &pot, s)?, &pot, t)?;
        worst_mass = worst_mass.max((mass(&direct) / mass(&f) - 1.0).abs());
        worst_group = worst_group.max(l2_distance(&direct, &composed) / norm);
    }
    Ok((
        worst_mass < 1e-10 && worst_group < 1e-8,
        format!("mass drift {worst_mass:.3e}, group-law defect {worst_group:.3e}"),
    ))
}

fn harmonic_revival() -> Result<(bool, String)> {
    let grid = line(1024, 12.0)?;
    let pot = QuadraticPotential::harmonic(1, 1.0)?;
    let mut worst: f64 = 0.0;
    for eps in [1.0, 0.1] {
        let u0 = packet(&grid, eps, 1.0, 0.5, 1.0, 0.5, 0.0)?;
        let u = mehler_propagate(&u0, &pot, TAU)?;
        let sum = u0.with_values(u.values().iter().zip(u0.values()).map(|(a, b)| a + b).collect())?;
        worst = worst.max(mass(&sum).sqrt() / mass(&u0).sqrt());
    }
    Ok((worst < 1e-6, format!("max ||u(2 pi) + u(0)|| / ||u(0)|| = {worst:.3e}")))
}

fn dispersive_bound() -> Result<(bool, String)> {
    let grid = line(2048, 16.0)?;
    let mut rng = StdRng::seed_from_u64(0xd15);
    let pots = [
        QuadraticPotential::free(1),
        QuadraticPotential::harmonic(1, 1.0)?,
        QuadraticPotential::repulsive(1, 1.0)?,
    ];
    let mut worst: f64 = 0.0;
    for pot in &pots {
        for _ in 0..20 {
            let t: f64 = rng.gen_range(0.2..1.3);
            let eps: f64 = rng.gen_range(0.5..1.0);
            let width: f64 = rng.gen_range(0.1..1.0);
            let f = packet(
                &grid,
                eps,
                rng.gen_range(0.5..2.0),
                0.5 / (width * width),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )?;
            let l1: f64 = f.values().iter().map(|c| c.norm()).sum::<f64>() * grid.cell_volume();
            let sup = mehler_propagate(&f, pot, t)?.values().iter().map(|c| c.norm()).fold(0.0, f64::max);
            worst = worst.max(sup / (dispersion_bound(pot, eps, t) * l1));
        }
    }
    Ok((
        worst <= 1.0 + 1e-6,
        format!("max sup|U f| / (bound ||f||_1) = {worst:.6} over 60 samples"),
    ))
}

fn heisenberg_constancy() -> Result<(bool, String)> {
    let grid = line(2048, 32.0)?;
    let f = packet(&grid, 1.0, 1.0, 0.5, 0.3, 0.5, 0.2)?;
    let mut worst: f64 = 0.0;
    for (_, pot) in linear_potentials()? {
        let mut j = Vec::new();
        let mut h = Vec::new();
        for k in 0..=6 {
            let t = 0.5 * k as f64;
            let u = mehler_propagate(&f, &pot, t)?;
            j.push(j_norm_sq(&u, t, &pot)?.sqrt());
            h.push(h_norm_sq(&u, t, &pot)?.sqrt());
        }
        worst = worst.max(max_drift(&j)).max(max_drift(&h));
    }
    Ok((worst < 1e-8, format!("max relative drift of ||J u||, ||H u|| = {worst:.3e}")))
}

fn lens_oracles() -> Result<(bool, String)> {
    let grid = line(2048, 32.0)?;
    let u0 = packet(&grid, 1.0, 1.0, 0.5, 0.0, 0.0, 0.0)?;
    let cfg = SolverConfig::default();
    let harmonic_times: Vec<f64> = (1..=10).map(|k| 0.08 * k as f64 * FRAC_PI_2).collect();
    let repulsive_times: Vec<f64> = (1..=10).map(|k| 0.3 * k as f64).collect();
    let stark_times: Vec<f64> = (1..=10).map(|k| 0.2 * k as f64).collect();
    let mut cases: Vec<OracleCase> = Vec::new();
    for lambda in [1.0, -1.0] {
        cases.push((OracleKind::HarmonicLens, QuadraticPotential::harmonic(1, 1.0)?, lambda, 2.0, &harmonic_times));
        cases.push((OracleKind::RepulsiveLens, QuadraticPotential::repulsive(1, 0.5)?, lambda, 2.0, &repulsive_times));
        for sigma in [1.0, 2.0] {
            cases.push((OracleKind::AvronHerbst, QuadraticPotential::stark(&[0.5])?, lambda, sigma, &stark_times));
        }
    }
    let mut passed = true;
    let mut parts = Vec::new();
    for (kind, pot, lambda, sigma, times) in cases {
        let nl = Nonlinearity::new(lambda, sigma, 1)?;
        let horizon = times[times.len() - 1];
        let direct = evolve(&u0, horizon, &pot, &nl, &cfg, &Monitors::at(times.to_vec()).keeping_states())?;
        let table = transform_oracle(kind, &u0, &pot, &nl, &cfg, &direct.snapshots)?;
        passed &= table.passed && table.rows.len() == 10;
        parts.push(format!(
            "{}(lambda={lambda}, sigma={sigma}) {:.2e}",
            kind.as_str(),
            table.max_difference
        ));
    }
    Ok((passed, parts.join("; ")))
}

fn drifts(run: &RunOutcome<f64>) -> (f64, f64) {
    let m: Vec<f64> = run.records.iter().map(|r| r.mass).collect();
    let e: Vec<f64> = run.records.iter().map(|r| r.energy).collect();
    (max_drift(&m), max_drift(&e))
}

/// Below this, mass drifts are round-off accumulated over the steps and
/// carry no order information: every sub-flow is unitary.
const MASS_ROUND_OFF: f64 = 1e-12;

fn conservation() -> Result<(bool, String)> {
    let grid = line(512, 16.0)?;
    let u0 = packet(&grid, 1.0, 1.0, 0.5, 0.0, 0.3, 0.0)?;
    let cases = [
        (QuadraticPotential::harmonic(1, 1.0)?, Nonlinearity::new(1.0, 1.0, 1)?),
        (QuadraticPotential::free(1), Nonlinearity::new(-1.0, 1.0, 1)?),
    ];
    let t_end = 2.0;
    let monitors = Monitors::every(0.0, t_end, 0.1);
    let mut passed = true;
    let mut parts = Vec::new();
    for (pot, nl) in &cases {
        let run = evolve(&u0, t_end, pot, nl, &SolverConfig::default(), &monitors)?;
        let (dm, de) = drifts(&run);
        let mut ok = dm < 1e-10 && de < 1e-6;
        let mut series = Vec::new();
        for dt in [0.02, 0.01, 0.005] {
            series.push(drifts(&evolve(&u0, t_end, pot, nl, &SolverConfig::fixed(dt), &monitors)?));
        }
        for w in series.windows(2) {
            let energy_order = w[0].1 / w[1].1 >= 3.0;
            let mass_order = w[1].0 < MASS_ROUND_OFF || w[0].0 / w[1].0 >= 3.0;
            ok &= energy_order && mass_order;
        }
        passed &= ok;
        parts.push(format!(
            "default dt: mass {dm:.2e}, energy {de:.2e}; refinements energy {:.2e} {:.2e} {:.2e}, mass {:.2e} {:.2e} {:.2e}",
            series[0].1, series[1].1, series[2].1, series[0].0, series[1].0, series[2].0
        ));
    }
    Ok((passed, parts.join("; ")))
}

/// `P(t)` is not an invariant of the splitting; its drift is second order
/// in `dt` and needs half the default step to stay below `1e-6`.
const PSEUDO_CONFORMAL_DT: f64 = 5e-4;

fn pseudo_conformal() -> Result<(bool, String)> {
    let grid = line(1024, 24.0)?;
    let u0 = packet(&grid, 1.0, 1.0, 0.5, 0.0, 0.0, 0.0)?;
    let pot = QuadraticPotential::free(1);
    let times: Vec<f64> = (1..=10).map(|k| 0.2 * k as f64).collect();
    let cfg = SolverConfig::with_dt(PSEUDO_CONFORMAL_DT);
    let mut worst: f64 = 0.0;
    for lambda in [1.0, -1.0] {
        let nl = Nonlinearity::new(lambda, 2.0, 1)?;
        let run = evolve(&u0, 2.0, &pot, &nl, &cfg, &Monitors::at(times.clone()).keeping_states())?;
        let mut p = vec![pseudo_conformal_functional(&u0, 0.0, &pot, &nl)?];
        for u in &run.snapshots {
            p.push(pseudo_conformal_functional(u, u.time(), &pot, &nl)?);
        }
        worst = worst.max(max_drift(&p));
    }
    Ok((worst < 1e-6, format!("max relative drift of P(t) = {worst:.3e} at dt = {PSEUDO_CONFORMAL_DT}")))
}

/// `max |central difference of E1 - rate| / max |rate|` for one run.
fn e1_residual(pot: &QuadraticPotential<f64>, nl: &Nonlinearity<f64>, u0: &WaveFunction<f64>, dt: f64, t_end: f64) -> Result<f64> {
    let steps = (t_end / dt).round() as usize;
    let times: Vec<f64> = (1..=steps).map(|k| k as f64 * dt).collect();
    let run = evolve(u0, t_end, pot, nl, &SolverConfig::fixed(dt), &Monitors::at(times))?;
    let (sig, omega) = pot.isotropic().expect("isotropic potential");
    let n = 1.0;
    let factor = (n * nl.sigma - 2.0) * sig.delta() as f64 * omega * omega;
    let rate = |k: usize| {
        let r = &run.records[k];
        let (g, h) = phase_functions(sig, omega, r.time);
        factor * r.nonlinear * g * h
    };
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 1..run.records.len() - 1 {
        let fd = (run.records[k + 1].e1 - run.records[k - 1].e1) / (run.records[k + 1].time - run.records[k - 1].time);
        worst = worst.max((fd - rate(k)).abs());
        scale = scale.max(rate(k).abs());
    }
    Ok(worst / scale)
}

fn e1_laws() -> Result<(bool, String)> {
    let grid = line(512, 16.0)?;
    let u0 = packet(&grid, 1.0, 1.0, 0.5, 0.0, 0.0, 0.0)?;
    let nl = Nonlinearity::new(1.0, 1.0, 1)?;
    let mut passed = true;
    let mut parts = Vec::new();
    for pot in [QuadraticPotential::harmonic(1, 1.0)?, QuadraticPotential::repulsive(1, 1.0)?] {
        let r: Vec<f64> = [0.02, 0.01, 0.005]
            .iter()
            .map(|&dt| e1_residual(&pot, &nl, &u0, dt, 1.0))
            .collect::<Result<_>>()?;
        let ok = r[0] / r[1] >= 3.0 && r[1] / r[2] >= 3.0;
        passed &= ok;
        let (sig, _) = pot.isotropic().unwrap();
        parts.push(format!("{sig:?}: residuals {:.2e} {:.2e} {:.2e}", r[0], r[1], r[2]));
    }
    Ok((passed, parts.join("; ")))
}

fn cached(cell: &'static OnceLock<Result<DriverReport>>, run: fn() -> Result<DriverReport>) -> Result<DriverReport> {
    cell.get_or_init(run).clone()
}

fn blowup_report() -> Result<DriverReport> {
    static CELL: OnceLock<Result<DriverReport>> = OnceLock::new();
    cached(&CELL, || drivers::blowup_harmonic(&drivers::BlowupHarmonicParams::default()))
}

fn verdicts(rep: &DriverReport, keys: &[&str]) -> String {
    keys.iter()
        .map(|k| format!("{k}={}", rep.verdict_value(k).unwrap_or("?")))
        .collect::<Vec<_>>()
        .join(", ")
}

fn virial_blowup() -> Result<(bool, String)> {
    let rep = blowup_report()?;
    // Closed form for A exp(-x^2), quintic focusing:
    // E0 = A^2 sqrt(pi/2) / 2 - A^6 sqrt(pi/6) / 3.
    let p = drivers::BlowupHarmonicParams::default();
    let a = p.amplitude;
    let exact = a * a * (PI / 2.0).sqrt() / 2.0 - a.powi(6) * (PI / 6.0).sqrt() / 3.0;
    let grid = line(p.points, p.half_width)?;
    let u0 = packet(&grid, 1.0, a, 1.0, 0.0, 0.0, 0.0)?;
    let quad = blowup_criteria_report(&u0, &QuadraticPotential::free(1), &Nonlinearity::new(-1.0, 2.0, 1)?)?.free_energy;
    let energy_ok = quad < 0.0 && ((quad - exact) / exact).abs() < 1e-10;
    let passed = energy_ok && rep.verdict_value("glassey_passed") == Some("true");
    let bracket = rep.rows.first().map(|r| format!("[{}, {}]", r[2], r[3])).unwrap_or_default();
    Ok((
        passed,
        format!(
            "E0 quadrature {quad:.10} vs closed form {exact:.10}; bracket {bracket}; {}",
            verdicts(&rep, &["virial_concave", "virial_interior_points"])
        ),
    ))
}

fn harmonic_blowup() -> Result<(bool, String)> {
    let rep = blowup_report()?;
    let rows: Vec<String> = rep
        .rows
        .iter()
        .skip(1)
        .map(|r| format!("omega {}: t_hi {} <= {}", r[0], r[3], r[4]))
        .collect();
    Ok((rep.verdict_value("harmonic_passed") == Some("true"), rows.join("; ")))
}

fn status_table(rep: &DriverReport) -> String {
    rep.rows
        .iter()
        .map(|r| format!("{}:{}", r[0].parse::<f64>().map_or(r[0].clone(), |v| v.to_string()), r[1]))
        .collect::<Vec<_>>()
        .join(" ")
}

fn repulsive_global() -> Result<(bool, String)> {
    let rep = drivers::global_repulsive(&drivers::GlobalRepulsiveParams::default())?;
    Ok((
        rep.passed,
        format!(
            "{}; {}",
            status_table(&rep),
            verdicts(&rep, &["transition_omega_lower", "transition_omega_upper"])
        ),
    ))
}

fn chirped_control() -> Result<(bool, String)> {
    let rep = drivers::chirped_blowup(&drivers::ChirpedBlowupParams::default())?;
    let brackets: Vec<String> = rep
        .rows
        .iter()
        .map(|r| format!("b {}: {} t_hi {}", r[0].parse::<f64>().unwrap_or(f64::NAN), r[1], r[3]))
        .collect();
    Ok((rep.passed, format!("T = {}; {}", rep.verdict_value("free_blowup_time").unwrap_or("?"), brackets.join("; "))))
}

fn scattering() -> Result<(bool, String)> {
    let rep = drivers::scattering(&drivers::ScatteringParams::default())?;
    let diffs: Vec<String> = rep.rows.iter().map(|r| r[2].clone()).collect();
    Ok((rep.passed, format!("differences {}", diffs.join(" "))))
}

fn refocusing() -> Result<(bool, String)> {
    let rep = drivers::refocusing(&drivers::RefocusingParams::default())?;
    let rows: Vec<String> = rep
        .rows
        .iter()
        .map(|r| format!("eps {}: focus {} prefocus {}", r[0].parse::<f64>().unwrap_or(f64::NAN), r[1], r[2]))
        .collect();
    Ok((rep.passed, rows.join("; ")))
}

fn boundary_layer() -> Result<(bool, String)> {
    let rep = drivers::boundary_layer(&drivers::BoundaryLayerParams::default())?;
    let rows: Vec<String> = rep
        .rows
        .iter()
        .map(|r| format!("eps {}: max error {}", r[0].parse::<f64>().unwrap_or(f64::NAN), r[1]))
        .collect();
    Ok((rep.passed, rows.join("; ")))
}
