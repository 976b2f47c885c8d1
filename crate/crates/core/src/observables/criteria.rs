//! Sufficient conditions for finite-time blow-up, evaluated by quadrature
//! on the initial datum.

use num_complex::Complex;

use super::{free_energy, mass};
use crate::error::Result;
use crate::grid::{x_sq_of, WaveFunction};
use crate::potential::{QuadraticPotential, Signature};
use crate::scalar::Real;
use crate::solver::Nonlinearity;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriterionCheck<T> {
    /// Hypotheses and inequality both satisfied.
    pub holds: bool,
    pub lhs: T,
    pub rhs: T,
    /// Upper bound on the blow-up time, when the criterion provides one.
    pub time_bound: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlowupCriteriaReport<T> {
    /// `lambda < 0` and `sigma >= 2/n`.
    pub hypotheses: bool,
    /// `E_0 = 1/2 ||eps grad u0||^2 + lambda/(sigma+1) ||u0||^{2 sigma + 2}`.
    pub free_energy: T,
    pub mass: T,
    /// `||x u0||^2`.
    pub virial: T,
    /// `Im int conj(u0) x . eps grad u0`.
    pub momentum_moment: T,
    /// Isotropic harmonic potential: `E_0 <= 0` forces `T <= pi / (2 omega)`.
    pub harmonic: Option<CriterionCheck<T>>,
    /// Isotropic repulsive potential: `E_0 < -omega^2/2 ||x u0||^2`.
    pub repulsive: Option<CriterionCheck<T>>,
    /// As `repulsive`, with the extra `-omega |Im int conj(u0) x . eps grad u0|`.
    pub repulsive_moment: Option<CriterionCheck<T>>,
    /// No potential: `E_0 < 0`.
    pub glassey: CriterionCheck<T>,
}

impl<T: Real> BlowupCriteriaReport<T> {
    /// `key=value` lines in a fixed order.
    pub fn to_lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("hypotheses={}", self.hypotheses),
            format!("free_energy={:.16e}", self.free_energy),
            format!("mass={:.16e}", self.mass),
            format!("virial={:.16e}", self.virial),
            format!("momentum_moment={:.16e}", self.momentum_moment),
        ];
        let mut push = |name: &str, c: &Option<CriterionCheck<T>>| match c {
            None => out.push(format!("{name}=not_applicable")),
            Some(c) => {
                out.push(format!("{name}={}", c.holds));
                out.push(format!("{name}_lhs={:.16e}", c.lhs));
                out.push(format!("{name}_rhs={:.16e}", c.rhs));
                if let Some(b) = c.time_bound {
                    out.push(format!("{name}_time_bound={:.16e}", b));
                }
            }
        };
        push("harmonic", &self.harmonic);
        push("repulsive", &self.repulsive);
        push("repulsive_moment", &self.repulsive_moment);
        push("glassey", &Some(self.glassey));
        out
    }
}

pub fn blowup_criteria_report<T: Real>(
    u0: &WaveFunction<T>,
    pot: &QuadraticPotential<T>,
    nl: &Nonlinearity<T>,
) -> Result<BlowupCriteriaReport<T>> {
    let grid = u0.grid();
    let eps = u0.epsilon();
    let hypotheses = nl.focusing() && nl.l2_supercritical();
    let e0 = free_energy(u0, nl);
    let virial = x_sq_of(grid, u0.values());
    let tables = grid.coordinate_tables();
    let mut moment = Complex::new(T::zero(), T::zero());
    for j in 0..grid.dim() {
        let d = grid.partial(u0.values(), j);
        for (flat, (v, dv)) in u0.values().iter().zip(&d).enumerate() {
            let x = tables[j][grid.multi_index(flat)[j]];
            moment = moment + v.conj() * *dv * x;
        }
    }
    let moment = moment.im * eps * grid.cell_volume();
    let half = T::lit(0.5);
    let iso = pot.isotropic().filter(|_| pot.is_gauge_free());

    let harmonic = match iso {
        Some((Signature::Harmonic, omega)) => Some(CriterionCheck {
            holds: hypotheses && e0 <= T::zero(),
            lhs: e0,
            rhs: T::zero(),
            time_bound: Some(T::FRAC_PI_2() / omega),
        }),
        _ => None,
    };
    let (repulsive, repulsive_moment) = match iso {
        Some((Signature::Repulsive, omega)) => {
            let rhs = -half * omega * omega * virial;
            let rhs_m = rhs - omega * moment.abs();
            (
                Some(CriterionCheck {
                    holds: hypotheses && e0 < rhs,
                    lhs: e0,
                    rhs,
                    time_bound: None,
                }),
                Some(CriterionCheck {
                    holds: hypotheses && e0 < rhs_m,
                    lhs: e0,
                    rhs: rhs_m,
                    time_bound: None,
                }),
            )
        }
        _ => (None, None),
    };
    let glassey = CriterionCheck {
        holds: hypotheses && pot.is_free() && e0 < T::zero(),
        lhs: e0,
        rhs: T::zero(),
        time_bound: None,
    };
    Ok(BlowupCriteriaReport {
        hypotheses,
        free_energy: e0,
        mass: mass(u0),
        virial,
        momentum_moment: moment,
        harmonic,
        repulsive,
        repulsive_moment,
        glassey,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    fn datum(amp: f64, chirp: f64) -> WaveFunction<f64> {
        let g = Grid::new(1, 1024, 16.0).unwrap();
        WaveFunction::from_fn(g, 0.0, 1.0, |x: &[f64]| {
            Complex::from_polar(amp * (-x[0] * x[0]).exp(), chirp * x[0] * x[0] / 2.0)
        })
        .unwrap()
    }

    #[test]
    fn defocusing_never_qualifies() {
        let u = datum(3.0, 0.0);
        let nl = Nonlinearity::new(1.0, 2.0, 1).unwrap();
        for pot in [
            QuadraticPotential::free(1),
            QuadraticPotential::harmonic(1, 1.0).unwrap(),
            QuadraticPotential::repulsive(1, 1.0).unwrap(),
        ] {
            let r = blowup_criteria_report(&u, &pot, &nl).unwrap();
            assert!(!r.glassey.holds);
            assert!(r.harmonic.is_none_or(|c| !c.holds));
            assert!(r.repulsive.is_none_or(|c| !c.holds));
        }
    }

    #[test]
    fn quartic_gaussian_energy_fixture() {
        // E0 for 3 e^{-x^2}, sigma = 2, lambda = -1:
        // 1/2 * 9 * sqrt(pi/2) - (1/3) * 3^6 * sqrt(pi/6).
        let u = datum(3.0, 0.0);
        let nl = Nonlinearity::new(-1.0, 2.0, 1).unwrap();
        let pi = std::f64::consts::PI;
        let e0 = 4.5 * (pi / 2.0).sqrt() - 243.0 * (pi / 6.0).sqrt();
        let r = blowup_criteria_report(&u, &QuadraticPotential::harmonic(1, 1.0).unwrap(), &nl).unwrap();
        assert!((r.free_energy - e0).abs() < 1e-10 * e0.abs());
        let h = r.harmonic.unwrap();
        assert!(h.holds);
        assert_eq!(h.time_bound, Some(pi / 2.0));
        assert!(r.glassey.lhs < 0.0 && !r.glassey.holds);
    }

    #[test]
    fn real_datum_has_no_moment() {
        let u = datum(3.0, 0.0);
        let nl = Nonlinearity::new(-1.0, 2.0, 1).unwrap();
        let r = blowup_criteria_report(&u, &QuadraticPotential::repulsive(1, 0.5).unwrap(), &nl).unwrap();
        assert!(r.momentum_moment.abs() < 1e-12);
        assert_eq!(r.repulsive.unwrap().holds, r.repulsive_moment.unwrap().holds);
        let chirped = datum(3.0, 0.8);
        let rc = blowup_criteria_report(&chirped, &QuadraticPotential::repulsive(1, 0.5).unwrap(), &nl).unwrap();
        assert!(rc.momentum_moment.abs() > 1e-3);
    }
}
