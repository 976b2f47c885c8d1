//! Monitored functionals: conserved quantities, the Heisenberg observables
//! `J(t)` and `H(t)`, pseudo-conformal and `E1/E2` laws, weighted
//! Gagliardo–Nirenberg diagnostics, blow-up criteria and scattering.
//!
//! Per axis, with `(g, h)` the phase functions of the potential,
//! `J_j = -delta omega^2 g x_j / eps + i h d_j` and
//! `H_j = h x_j + i eps g d_j`. At `t = 0` they reduce to `i grad` and `x`.

mod criteria;
mod scattering;

pub use criteria::{blowup_criteria_report, BlowupCriteriaReport, CriterionCheck};
pub use scattering::{scattering_monitor, ScatteringResult, DEFAULT_SCATTERING_TOLERANCE};

use num_complex::Complex;

use crate::error::{NlspError, Result};
use crate::grid::{grad_sq_of, linf_of, lp_of, x_sq_of, boundary_fraction_of, Grid, WaveFunction};
use crate::potential::QuadraticPotential;
use crate::scalar::Real;
use crate::solver::Nonlinearity;

/// One time sample of every monitored functional.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservableRecord<T> {
    pub time: T,
    pub mass: T,
    pub energy: T,
    /// `1/2 ||eps grad u||^2`
    pub kinetic: T,
    /// `int V |u|^2`
    pub potential: T,
    /// `lambda / (sigma + 1) ||u||_{2 sigma + 2}^{2 sigma + 2}`
    pub nonlinear: T,
    pub j_norm_sq: T,
    pub h_norm_sq: T,
    /// `||x u||^2`
    pub virial: T,
    /// NaN unless the potential is isotropic.
    pub e1: T,
    pub e2: T,
    pub linf: T,
    pub boundary_mass: T,
    /// `(p, ||u||_p)` for each requested exponent.
    pub lp: Vec<(T, T)>,
}

impl<T: Real> ObservableRecord<T> {
    /// Column names in serialization order.
    pub fn header(lp: &[T]) -> Vec<String> {
        let mut cols: Vec<String> = [
            "t",
            "mass",
            "energy",
            "kinetic",
            "potential",
            "nonlinear",
            "j_norm_sq",
            "h_norm_sq",
            "virial",
            "e1",
            "e2",
            "linf",
            "boundary_mass",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        cols.extend(lp.iter().map(|p| format!("lp_{p}")));
        cols
    }

    /// Field values in the order of [`header`](Self::header).
    pub fn values(&self) -> Vec<T> {
        let mut v = vec![
            self.time,
            self.mass,
            self.energy,
            self.kinetic,
            self.potential,
            self.nonlinear,
            self.j_norm_sq,
            self.h_norm_sq,
            self.virial,
            self.e1,
            self.e2,
            self.linf,
            self.boundary_mass,
        ];
        v.extend(self.lp.iter().map(|(_, n)| *n));
        v
    }
}

/// Energy split `E_V = kinetic + potential + nonlinear`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Energy<T> {
    pub kinetic: T,
    pub potential: T,
    pub nonlinear: T,
}

impl<T: Real> Energy<T> {
    pub fn total(&self) -> T {
        self.kinetic + self.potential + self.nonlinear
    }
}

fn check_dims<T: Real>(w: &WaveFunction<T>, pot: &QuadraticPotential<T>) -> Result<()> {
    if w.dim() != pot.dim() {
        return Err(NlspError::Domain(format!(
            "wavefunction is {}-dimensional, potential {}-dimensional",
            w.dim(),
            pot.dim()
        )));
    }
    Ok(())
}

pub fn mass<T: Real>(w: &WaveFunction<T>) -> T {
    w.grid().l2_norm_sq(w.values())
}

/// `||u||_{2 sigma + 2}^{2 sigma + 2}`.
pub fn potential_norm<T: Real>(w: &WaveFunction<T>, nl: &Nonlinearity<T>) -> T {
    let s = w
        .values()
        .iter()
        .fold(T::zero(), |acc, c| acc + nl.density_power(c.norm_sqr()) * c.norm_sqr());
    s * w.grid().cell_volume()
}

pub fn potential_term<T: Real>(w: &WaveFunction<T>, pot: &QuadraticPotential<T>) -> T {
    let grid = w.grid();
    let tables = grid.coordinate_tables();
    let per_axis: Vec<Vec<T>> = tables
        .iter()
        .enumerate()
        .map(|(j, xs)| xs.iter().map(|&x| pot.axis_value(j, x)).collect())
        .collect();
    let s = w.values().iter().enumerate().fold(T::zero(), |acc, (flat, c)| {
        let idx = grid.multi_index(flat);
        let v = (0..grid.dim()).fold(pot.constant(), |a, j| a + per_axis[j][idx[j]]);
        acc + v * c.norm_sqr()
    });
    s * grid.cell_volume()
}

pub fn energy<T: Real>(w: &WaveFunction<T>, pot: &QuadraticPotential<T>, nl: &Nonlinearity<T>) -> Result<Energy<T>> {
    check_dims(w, pot)?;
    let eps = w.epsilon();
    Ok(Energy {
        kinetic: T::lit(0.5) * eps * eps * grad_sq_of(w.grid(), w.values()),
        potential: potential_term(w, pot),
        nonlinear: nl.lambda / (nl.sigma + T::one()) * potential_norm(w, nl),
    })
}

/// `E_0 = 1/2 ||eps grad u||^2 + lambda/(sigma+1) ||u||^{2 sigma + 2}`.
pub fn free_energy<T: Real>(w: &WaveFunction<T>, nl: &Nonlinearity<T>) -> T {
    let eps = w.epsilon();
    T::lit(0.5) * eps * eps * grad_sq_of(w.grid(), w.values())
        + nl.lambda / (nl.sigma + T::one()) * potential_norm(w, nl)
}

/// `a x_j w + b d_j w` for every axis, with per-axis coefficients.
fn axis_combination<T: Real>(
    grid: &Grid<T>,
    values: &[Complex<T>],
    coeffs: &[(Complex<T>, Complex<T>)],
) -> Vec<Vec<Complex<T>>> {
    let tables = grid.coordinate_tables();
    (0..grid.dim())
        .map(|j| {
            let (a, b) = coeffs[j];
            let d = grid.partial(values, j);
            values
                .iter()
                .zip(d)
                .enumerate()
                .map(|(flat, (v, dv))| {
                    let x = tables[j][grid.multi_index(flat)[j]];
                    a * x * v + b * dv
                })
                .collect()
        })
        .collect()
}

fn j_coefficients<T: Real>(pot: &QuadraticPotential<T>, eps: T, t: T) -> Vec<(Complex<T>, Complex<T>)> {
    pot.axes()
        .iter()
        .map(|a| {
            let (g, h) = a.phase_functions(t);
            (Complex::new(-a.curvature() * g / eps, T::zero()), Complex::new(T::zero(), h))
        })
        .collect()
}

fn h_coefficients<T: Real>(pot: &QuadraticPotential<T>, eps: T, t: T) -> Vec<(Complex<T>, Complex<T>)> {
    pot.axes()
        .iter()
        .map(|a| {
            let (g, h) = a.phase_functions(t);
            (Complex::new(h, T::zero()), Complex::new(T::zero(), eps * g))
        })
        .collect()
}

fn wrap<T: Real>(w: &WaveFunction<T>, comps: Vec<Vec<Complex<T>>>) -> Result<Vec<WaveFunction<T>>> {
    comps.into_iter().map(|c| w.with_values(c)).collect()
}

/// `J(t) w`, one component per axis.
pub fn apply_j<T: Real>(w: &WaveFunction<T>, t: T, pot: &QuadraticPotential<T>) -> Result<Vec<WaveFunction<T>>> {
    check_dims(w, pot)?;
    let c = j_coefficients(pot, w.epsilon(), t);
    wrap(w, axis_combination(w.grid(), w.values(), &c))
}

/// `H(t) w`, one component per axis.
pub fn apply_h<T: Real>(w: &WaveFunction<T>, t: T, pot: &QuadraticPotential<T>) -> Result<Vec<WaveFunction<T>>> {
    check_dims(w, pot)?;
    let c = h_coefficients(pot, w.epsilon(), t);
    wrap(w, axis_combination(w.grid(), w.values(), &c))
}

fn field_norm_sq<T: Real>(grid: &Grid<T>, comps: &[Vec<Complex<T>>]) -> T {
    comps.iter().fold(T::zero(), |acc, c| acc + grid.l2_norm_sq(c))
}

/// `||J(t) w||^2`.
pub fn j_norm_sq<T: Real>(w: &WaveFunction<T>, t: T, pot: &QuadraticPotential<T>) -> Result<T> {
    check_dims(w, pot)?;
    let c = j_coefficients(pot, w.epsilon(), t);
    Ok(field_norm_sq(w.grid(), &axis_combination(w.grid(), w.values(), &c)))
}

/// `||H(t) w||^2`.
pub fn h_norm_sq<T: Real>(w: &WaveFunction<T>, t: T, pot: &QuadraticPotential<T>) -> Result<T> {
    check_dims(w, pot)?;
    let c = h_coefficients(pot, w.epsilon(), t);
    Ok(field_norm_sq(w.grid(), &axis_combination(w.grid(), w.values(), &c)))
}

/// Factorized form of `J_j(t) w = i h_j e^{i phi/eps} d_j (e^{-i phi/eps} w)`,
/// `phi = -delta omega^2 g x_j^2 / (2 h)`; needs `h_j(t) != 0`.
pub fn apply_j_factorized<T: Real>(
    w: &WaveFunction<T>,
    t: T,
    pot: &QuadraticPotential<T>,
) -> Result<Vec<WaveFunction<T>>> {
    check_dims(w, pot)?;
    let grid = w.grid();
    let eps = w.epsilon();
    let tables = grid.coordinate_tables();
    let mut out = Vec::with_capacity(grid.dim());
    for (j, a) in pot.axes().iter().enumerate() {
        let (g, h) = a.phase_functions(t);
        if h == T::zero() {
            return Err(NlspError::SingularTime {
                t: t.as_f64(),
                reason: format!("h vanishes on axis {j}"),
            });
        }
        let k = -a.curvature() * g / (h + h);
        let phase = |flat: usize| {
            let x = tables[j][grid.multi_index(flat)[j]];
            Complex::from_polar(T::one(), k * x * x / eps)
        };
        let stripped: Vec<Complex<T>> = w
            .values()
            .iter()
            .enumerate()
            .map(|(f, v)| phase(f).conj() * v)
            .collect();
        let d = grid.partial(&stripped, j);
        let ih = Complex::new(T::zero(), h);
        out.push(w.with_values(d.into_iter().enumerate().map(|(f, v)| ih * phase(f) * v).collect())?);
    }
    Ok(out)
}

/// `(E1, E2)` for an isotropic potential `delta omega^2 |x|^2 / 2`:
/// `E1 = 1/2 ||eps J u||^2 + h^2 lambda/(sigma+1) N`,
/// `E2 = delta omega^2 (1/2 ||H u||^2 + g^2 lambda/(sigma+1) N)`,
/// where `N = ||u||_{2 sigma + 2}^{2 sigma + 2}`. Their sum is `E_V`.
pub fn e1_e2<T: Real>(
    w: &WaveFunction<T>,
    t: T,
    pot: &QuadraticPotential<T>,
    nl: &Nonlinearity<T>,
) -> Result<(T, T)> {
    check_dims(w, pot)?;
    let (sig, omega) = pot
        .isotropic()
        .ok_or_else(|| NlspError::Domain("E1/E2 need an isotropic potential".into()))?;
    if !pot.is_gauge_free() {
        return Err(NlspError::Domain("E1/E2 need a potential without linear or constant terms".into()));
    }
    let eps = w.epsilon();
    let half = T::lit(0.5);
    let (g, h) = crate::potential::phase_functions(sig, omega, t);
    let curv = T::lit(sig.delta() as f64) * omega * omega;
    let nonlinear = nl.lambda / (nl.sigma + T::one()) * potential_norm(w, nl);
    let e1 = half * eps * eps * j_norm_sq(w, t, pot)? + h * h * nonlinear;
    let e2 = curv * (half * h_norm_sq(w, t, pot)? + g * g * nonlinear);
    Ok((e1, e2))
}

/// Pseudo-conformal functional for the free equation,
/// `P(t) = 1/2 ||(x + i eps t grad) u||^2 + lambda/(sigma+1) t^2 N`.
pub fn pseudo_conformal_functional<T: Real>(
    w: &WaveFunction<T>,
    t: T,
    pot: &QuadraticPotential<T>,
    nl: &Nonlinearity<T>,
) -> Result<T> {
    check_dims(w, pot)?;
    if !pot.is_free() || !pot.is_gauge_free() {
        return Err(NlspError::Domain(
            "the pseudo-conformal law holds without potential; use E1/E2 instead".into(),
        ));
    }
    Ok(T::lit(0.5) * h_norm_sq(w, t, pot)? + nl.lambda / (nl.sigma + T::one()) * t * t * potential_norm(w, nl))
}

/// Sample every functional at the wavefunction's own time stamp.
pub fn record<T: Real>(
    w: &WaveFunction<T>,
    pot: &QuadraticPotential<T>,
    nl: &Nonlinearity<T>,
    lp: &[T],
) -> Result<ObservableRecord<T>> {
    check_dims(w, pot)?;
    let t = w.time();
    let en = energy(w, pot, nl)?;
    let (e1, e2) = e1_e2(w, t, pot, nl).unwrap_or((T::nan(), T::nan()));
    let lp = lp
        .iter()
        .map(|&p| Ok((p, lp_of(w.grid(), w.values(), p)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ObservableRecord {
        time: t,
        mass: mass(w),
        energy: en.total(),
        kinetic: en.kinetic,
        potential: en.potential,
        nonlinear: en.nonlinear,
        j_norm_sq: j_norm_sq(w, t, pot)?,
        h_norm_sq: h_norm_sq(w, t, pot)?,
        virial: x_sq_of(w.grid(), w.values()),
        e1,
        e2,
        linf: linf_of(w.values()),
        boundary_mass: boundary_fraction_of(w.grid(), w.values()),
        lp,
    })
}

/// `delta(p) = n (1/2 - 1/p)`.
pub fn delta_p(n: usize, p: f64) -> f64 {
    n as f64 * (0.5 - 1.0 / p)
}

/// Threshold `sigma_0(n) = (2 - n + sqrt(n^2 + 12 n + 4)) / (4 n)` above
/// which the scattering operator is defined on the whole of `Sigma`.
pub fn sigma0(n: usize) -> f64 {
    let n = n as f64;
    (2.0 - n + (n * n + 12.0 * n + 4.0).sqrt()) / (4.0 * n)
}

/// Gagliardo–Nirenberg constant calibrated on `e^{-|x|^2/2}`, the ratio
/// `||f||_p / (||f||^{1-delta} ||grad f||^delta)`.
pub fn gaussian_gn_constant(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    let pi = std::f64::consts::PI;
    let d = delta_p(n, p);
    let lp = if p.is_infinite() {
        1.0
    } else {
        (2.0 * pi / p).powf(nf / (2.0 * p))
    };
    let l2 = pi.powf(nf / 4.0);
    let grad = (nf / 2.0).sqrt() * pi.powf(nf / 4.0);
    lp / (l2.powf(1.0 - d) * grad.powf(d))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GnCheck<T> {
    pub lhs: T,
    pub rhs: T,
    pub ratio: T,
}

/// Weighted Gagliardo–Nirenberg monitor
/// `||w||_p <= C prod_j |h_j|^{-delta/n} ||w||^{1-delta} ||J w||^delta`.
pub fn weighted_gn_check<T: Real>(
    w: &WaveFunction<T>,
    t: T,
    pot: &QuadraticPotential<T>,
    p: T,
) -> Result<GnCheck<T>> {
    check_dims(w, pot)?;
    let n = w.dim();
    let pf = p.as_f64();
    let in_range = match n {
        1 => pf >= 2.0,
        2 => pf >= 2.0 && pf.is_finite(),
        _ => pf >= 2.0 && pf < 2.0 * n as f64 / (n as f64 - 2.0),
    };
    if !in_range || pf.is_nan() {
        return Err(NlspError::Domain(format!("exponent p = {pf} outside the Gagliardo–Nirenberg range for n = {n}")));
    }
    let d = T::lit(delta_p(n, pf));
    let c = T::lit(gaussian_gn_constant(n, pf));
    let weight = pot.axes().iter().fold(T::one(), |acc, a| {
        let (_, h) = a.phase_functions(t);
        acc * h.abs().powf(-d / T::from_usize_exact(n))
    });
    let lhs = lp_of(w.grid(), w.values(), p)?;
    let l2 = mass(w).sqrt();
    let jn = j_norm_sq(w, t, pot)?.sqrt();
    let rhs = c * weight * l2.powf(T::one() - d) * jn.powf(d);
    let ratio = if rhs > T::zero() { lhs / rhs } else { T::zero() };
    Ok(GnCheck { lhs, rhs, ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::mehler_propagate;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn sample(eps: f64) -> WaveFunction<f64> {
        let g = Grid::new(1, 512, 16.0).unwrap();
        WaveFunction::from_fn(g, 0.0, eps, |x| {
            c((-(x[0] - 0.4).powi(2)).exp(), 0.3 * x[0] * (-x[0] * x[0] / 2.0).exp())
                * Complex::from_polar(1.0, 0.5 * x[0])
        })
        .unwrap()
    }

    fn rel(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
        let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let n: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (d / n).sqrt()
    }

    #[test]
    fn j_and_h_at_time_zero() {
        let w = sample(0.7);
        let pot = QuadraticPotential::harmonic(1, 1.3).unwrap();
        let j = apply_j(&w, 0.0, &pot).unwrap();
        let grad = w.grid().partial(w.values(), 0);
        let igrad: Vec<_> = grad.iter().map(|d| c(0.0, 1.0) * d).collect();
        assert!(rel(j[0].values(), &igrad) < 1e-15);
        let h = apply_h(&w, 0.0, &pot).unwrap();
        let xs = w.grid().axis(0).coordinates();
        let xw: Vec<_> = w.values().iter().zip(&xs).map(|(v, &x)| v * x).collect();
        assert!(rel(h[0].values(), &xw) < 1e-15);
    }

    #[test]
    fn free_j_is_transported_gradient() {
        let w = sample(1.0);
        let pot = QuadraticPotential::free(1);
        let u = mehler_propagate(&w, &pot, 1.2).unwrap();
        let jn = j_norm_sq(&u, 1.2, &pot).unwrap();
        let g = crate::grid::norm_grad_l2(&w).powi(2);
        assert_relative_eq!(jn, g, max_relative = 1e-9);
    }

    #[test]
    fn factorized_j_matches_matrix_form() {
        let w = sample(0.5);
        for pot in [
            QuadraticPotential::harmonic(1, 1.1).unwrap(),
            QuadraticPotential::repulsive(1, 0.7).unwrap(),
        ] {
            let a = apply_j(&w, 0.6, &pot).unwrap();
            let b = apply_j_factorized(&w, 0.6, &pot).unwrap();
            assert!(rel(a[0].values(), b[0].values()) < 1e-10);
        }
    }

    #[test]
    fn j_acts_as_derivation_on_cubic() {
        let eps = 0.8;
        let g = Grid::new(1, 512, 16.0).unwrap();
        let w = WaveFunction::from_fn(g, 0.0, eps, |x: &[f64]| {
            c((-(x[0] * x[0]) / 2.0).exp(), 0.2 * (-(x[0] - 1.0).powi(2)).exp())
        })
        .unwrap();
        let pot = QuadraticPotential::harmonic(1, 1.0).unwrap();
        let t = 0.4;
        let jw = &apply_j(&w, t, &pot).unwrap()[0];
        let cubic = w.with_values(w.values().iter().map(|v| v * v.norm_sqr()).collect()).unwrap();
        let direct = &apply_j(&cubic, t, &pot).unwrap()[0];
        let chain: Vec<_> = w
            .values()
            .iter()
            .zip(jw.values())
            .map(|(v, j)| j * (2.0 * v.norm_sqr()) - v * v * j.conj())
            .collect();
        assert!(rel(&chain, direct.values()) < 1e-9);
    }

    #[test]
    fn energy_split_and_e1_e2_sum() {
        let w = sample(0.6);
        let nl = Nonlinearity::new(-0.7, 1.0, 1).unwrap();
        for pot in [
            QuadraticPotential::harmonic(1, 1.4).unwrap(),
            QuadraticPotential::repulsive(1, 0.9).unwrap(),
        ] {
            let r = record(&w.clone().with_time(0.8), &pot, &nl, &[4.0]).unwrap();
            assert_relative_eq!(r.energy, r.kinetic + r.potential + r.nonlinear, max_relative = 1e-15);
            assert_relative_eq!(r.e1 + r.e2, r.energy, max_relative = 1e-9);
        }
    }

    #[test]
    fn e1_e2_at_time_zero() {
        let w = sample(1.0);
        let nl = Nonlinearity::new(-1.0, 2.0, 1).unwrap();
        let pot = QuadraticPotential::harmonic(1, 2.0).unwrap();
        let (e1, e2) = e1_e2(&w, 0.0, &pot, &nl).unwrap();
        assert_relative_eq!(e1, free_energy(&w, &nl), max_relative = 1e-12);
        assert_relative_eq!(e2, 2.0 * crate::grid::norm_x_l2(&w).powi(2), max_relative = 1e-12);
        let aniso = QuadraticPotential::new(
            vec![crate::AxisPotential::harmonic(1.0), crate::AxisPotential::harmonic(2.0)],
            vec![0.0; 2],
            0.0,
        )
        .unwrap();
        let w2 = WaveFunction::from_fn(Grid::new(2, 16, 4.0).unwrap(), 0.0, 1.0, |_| c(0.0, 0.0)).unwrap();
        assert!(e1_e2(&w2, 0.0, &aniso, &Nonlinearity::new(1.0, 1.0, 2).unwrap()).is_err());
    }

    #[test]
    fn pseudo_conformal_at_zero_and_domain() {
        let w = sample(1.0);
        let nl = Nonlinearity::new(1.0, 2.0, 1).unwrap();
        let p = pseudo_conformal_functional(&w, 0.0, &QuadraticPotential::free(1), &nl).unwrap();
        assert_relative_eq!(p, 0.5 * crate::grid::norm_x_l2(&w).powi(2), max_relative = 1e-14);
        assert!(pseudo_conformal_functional(&w, 0.0, &QuadraticPotential::harmonic(1, 1.0).unwrap(), &nl).is_err());
    }

    #[test]
    fn closed_forms() {
        assert_relative_eq!(sigma0(1), (1.0 + 17f64.sqrt()) / 4.0);
        assert_relative_eq!(sigma0(1), 1.28078, epsilon = 1e-5);
        assert_eq!(delta_p(3, 2.0), 0.0);
        assert_eq!(delta_p(1, f64::INFINITY), 0.5);
    }

    #[test]
    fn gn_check_examples() {
        let g = Grid::new(1, 1024, 16.0).unwrap();
        let gauss = WaveFunction::from_fn(g, 0.0, 1.0, |x: &[f64]| c((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap();
        let free = QuadraticPotential::free(1);
        let r2 = weighted_gn_check(&gauss, 0.0, &free, 2.0).unwrap();
        assert_relative_eq!(r2.ratio, 1.0, max_relative = 1e-12);
        for p in [3.0, 4.0, 6.0, f64::INFINITY] {
            let r = weighted_gn_check(&gauss, 0.0, &free, p).unwrap();
            assert!(r.ratio <= 1.0 + 1e-9, "p = {p}: {}", r.ratio);
            assert_relative_eq!(r.ratio, 1.0, max_relative = 1e-8);
        }
        assert!(weighted_gn_check(&gauss, 0.0, &free, 1.5).is_err());
    }

    #[test]
    fn repulsive_flow_decays_in_lp() {
        let g = Grid::new(1, 4096, 160.0).unwrap();
        let w = WaveFunction::from_fn(g, 0.0, 1.0, |x: &[f64]| c((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap();
        let pot = QuadraticPotential::repulsive(1, 1.0).unwrap();
        let mut prev = f64::INFINITY;
        for t in [0.5, 1.0, 2.0] {
            let u = mehler_propagate(&w, &pot, t).unwrap();
            let r = weighted_gn_check(&u, t, &pot, 6.0).unwrap();
            assert!(r.ratio <= 1.0 + 1e-6);
            // the rhs carries cosh(t)^{-delta}
            assert_relative_eq!(r.rhs, r2_rhs(&w, 6.0) * t.cosh().powf(-delta_p(1, 6.0)), max_relative = 1e-6);
            assert!(r.lhs < prev);
            prev = r.lhs;
        }
    }

    fn r2_rhs(w: &WaveFunction<f64>, p: f64) -> f64 {
        weighted_gn_check(w, 0.0, &QuadraticPotential::free(1), p).unwrap().rhs
    }
}
