//! Exact linear evolution for canonical quadratic potentials.
//!
//! Per axis the Mehler operator for a step `tau` factors as
//! chirp(c) . free(g) . chirp(c), with `g = g(tau)` and `c = (h - 1) / g`:
//! multiplication by `exp(i c x^2 / (2 eps))`, the free flow for time `g`
//! (a Fourier multiplier), and the same chirp again. Each factor is exact
//! on band-limited data. A long time is cut into equal pieces short enough
//! that the factorization varies continuously with `tau`, which keeps the
//! metaplectic sign (the phase of `(i g)^{1/2}`) on the right branch.

use num_complex::Complex;

use crate::error::{NlspError, Result};
use crate::grid::{Grid, WaveFunction};
use crate::potential::{QuadraticPotential, Signature};
use crate::scalar::Real;

/// `|g_j(t)| < SINGULAR_TOLERANCE * max(1, 1/omega_j)` marks a focus.
pub const SINGULAR_TOLERANCE: f64 = 1e-6;
/// Maximum number of step halvings to satisfy the chirp sampling criterion.
pub const MAX_SPLIT_DEPTH: u32 = 8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelAxis<T> {
    pub g: T,
    pub h: T,
    /// `(2 pi i eps g)^{-1/2}`, principal branch.
    pub prefactor: Complex<T>,
    /// Coefficient of `x^2 + y^2` in the action.
    pub diagonal: T,
    /// Coefficient of `x y` in the action.
    pub cross: T,
}

/// Integral kernel of `U(t)`:
/// `prod_j prefactor_j exp(i S(t, x, y) / eps)`,
/// `S = sum_j ((x_j^2 + y_j^2) h_j / 2 - x_j y_j) / g_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct MehlerKernel<T> {
    pub time: T,
    pub epsilon: T,
    pub axes: Vec<KernelAxis<T>>,
}

impl<T: Real> MehlerKernel<T> {
    pub fn new(pot: &QuadraticPotential<T>, epsilon: T, t: T) -> Result<Self> {
        require_gauge_free(pot)?;
        let two_pi = T::TAU();
        let axes = pot
            .axes()
            .iter()
            .map(|a| {
                let (g, h) = a.phase_functions(t);
                if is_singular(a.signature, a.omega, g) {
                    return Err(NlspError::SingularTime {
                        t: t.as_f64(),
                        reason: "kernel is singular at a focus".into(),
                    });
                }
                let prefactor = Complex::new(T::zero(), two_pi * epsilon * g).sqrt().inv();
                Ok(KernelAxis {
                    g,
                    h,
                    prefactor,
                    diagonal: h / (g + g),
                    cross: -T::one() / g,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            time: t,
            epsilon,
            axes,
        })
    }

    pub fn action(&self, x: &[T], y: &[T]) -> T {
        self.axes
            .iter()
            .zip(x.iter().zip(y))
            .fold(T::zero(), |acc, (k, (&xj, &yj))| {
                acc + k.diagonal * (xj * xj + yj * yj) + k.cross * xj * yj
            })
    }

    pub fn evaluate(&self, x: &[T], y: &[T]) -> Complex<T> {
        let pre = self
            .axes
            .iter()
            .fold(Complex::new(T::one(), T::zero()), |acc, k| acc * k.prefactor);
        pre * Complex::from_polar(T::one(), self.action(x, y) / self.epsilon)
    }
}

fn is_singular<T: Real>(signature: Signature, omega: T, g: T) -> bool {
    let tol = T::lit(SINGULAR_TOLERANCE);
    let scale = match signature {
        Signature::Free => T::one(),
        _ => T::one().max(T::one() / omega),
    };
    g.abs() < tol * scale
}

fn require_gauge_free<T: Real>(pot: &QuadraticPotential<T>) -> Result<()> {
    if pot.is_gauge_free() {
        Ok(())
    } else {
        Err(NlspError::Domain(
            "exact propagation needs a potential without linear or constant terms; apply the gauge transforms first".into(),
        ))
    }
}

/// How a propagation over time `t` is carried out.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagationPlan<T> {
    pub pieces: usize,
    pub piece_time: T,
    /// Chirp coefficient per axis for one piece.
    pub chirp: Vec<T>,
    /// Equivalent free-flow time per axis for one piece.
    pub free_time: Vec<T>,
    /// `max_j |c_j| L_j h_j / eps`; must stay below `pi`.
    pub sampling: T,
    /// Some `g_j(t)` lies within the singular tolerance of zero.
    pub near_focus: bool,
}

/// Chirp coefficient `(h - 1) / g` in a form that is stable for small steps.
fn chirp_coefficient<T: Real>(signature: Signature, omega: T, tau: T) -> T {
    let half = T::lit(0.5);
    match signature {
        Signature::Free => T::zero(),
        Signature::Harmonic => -omega * (omega * tau * half).tan(),
        Signature::Repulsive => omega * (omega * tau * half).tanh(),
    }
}

pub fn plan<T: Real>(grid: &Grid<T>, pot: &QuadraticPotential<T>, epsilon: T, t: T) -> Result<PropagationPlan<T>> {
    require_gauge_free(pot)?;
    if pot.dim() != grid.dim() {
        return Err(NlspError::Domain("potential and grid dimensions differ".into()));
    }
    let quarter_turn = T::FRAC_PI_2();
    let mut pieces = pot
        .axes()
        .iter()
        .filter(|a| a.signature == Signature::Harmonic)
        .map(|a| (a.omega * t).abs() / quarter_turn)
        .fold(T::one(), |a, b| a.max(b.ceil()))
        .to_usize()
        .ok_or_else(|| NlspError::Domain(format!("cannot split propagation time {t}")))?;
    let near_focus = pot
        .axes()
        .iter()
        .any(|a| is_singular(a.signature, a.omega, a.phase_functions(t).0));
    for _ in 0..=MAX_SPLIT_DEPTH {
        let tau = t / T::from_usize_exact(pieces);
        let chirp: Vec<T> = pot
            .axes()
            .iter()
            .map(|a| chirp_coefficient(a.signature, a.omega, tau))
            .collect();
        let sampling = chirp
            .iter()
            .zip(grid.axes())
            .map(|(c, ax)| c.abs() * ax.half_width() * ax.spacing() / epsilon)
            .fold(T::zero(), |a, b| a.max(b));
        if sampling < T::PI() {
            let free_time = pot.axes().iter().map(|a| a.phase_functions(tau).0).collect();
            return Ok(PropagationPlan {
                pieces,
                piece_time: tau,
                chirp,
                free_time,
                sampling,
                near_focus,
            });
        }
        pieces *= 2;
    }
    Err(NlspError::Resolution(format!(
        "chirp sampling criterion still violated after {MAX_SPLIT_DEPTH} halvings (t = {t}, eps = {epsilon})"
    )))
}

/// The factors of `U_V(t)` on one grid, ready to apply repeatedly.
pub struct LinearFlow<'a, T: Real> {
    grid: &'a Grid<T>,
    pieces: usize,
    single: Vec<Vec<Complex<T>>>,
    double: Vec<Vec<Complex<T>>>,
    kinetic: Vec<Vec<Complex<T>>>,
}

impl<'a, T: Real> LinearFlow<'a, T> {
    pub fn new(grid: &'a Grid<T>, pot: &QuadraticPotential<T>, epsilon: T, t: T) -> Result<Self> {
        let p = plan(grid, pot, epsilon, t)?;
        let half = T::lit(0.5);
        let chirp_factors = |scale: T| -> Vec<Vec<Complex<T>>> {
            grid.axes()
                .iter()
                .zip(&p.chirp)
                .map(|(ax, &c)| {
                    ax.coordinates()
                        .into_iter()
                        .map(|x| Complex::from_polar(T::one(), scale * c * x * x * half / epsilon))
                        .collect()
                })
                .collect()
        };
        let kinetic = grid
            .axes()
            .iter()
            .zip(&p.free_time)
            .map(|(ax, &g)| {
                ax.frequencies()
                    .into_iter()
                    .map(|k| Complex::from_polar(T::one(), -epsilon * g * k * k * half))
                    .collect()
            })
            .collect();
        Ok(Self {
            grid,
            pieces: p.pieces,
            single: chirp_factors(T::one()),
            double: chirp_factors(T::lit(2.0)),
            kinetic,
        })
    }

    pub fn apply(&self, values: &mut [Complex<T>]) {
        let grid = self.grid;
        grid.multiply_separable(values, &self.single);
        for piece in 0..self.pieces {
            grid.forward_in_place(values);
            grid.multiply_separable(values, &self.kinetic);
            grid.inverse_in_place(values);
            let last = piece + 1 == self.pieces;
            grid.multiply_separable(values, if last { &self.single } else { &self.double });
        }
    }
}

/// `U_V(t) w` for a canonical, gauge-free potential.
pub fn mehler_propagate<T: Real>(w: &WaveFunction<T>, pot: &QuadraticPotential<T>, t: T) -> Result<WaveFunction<T>> {
    w.check_finite()?;
    if t == T::zero() {
        return Ok(w.clone());
    }
    let grid = w.grid();
    let flow = LinearFlow::new(grid, pot, w.epsilon(), t)?;
    let mut values = w.values().to_vec();
    flow.apply(&mut values);
    WaveFunction::new(grid.clone(), values, w.time() + t, w.epsilon())
}

/// `U_V(-t) w`.
pub fn inverse_propagate<T: Real>(w: &WaveFunction<T>, pot: &QuadraticPotential<T>, t: T) -> Result<WaveFunction<T>> {
    mehler_propagate(w, pot, -t)
}

/// `prod_j (2 pi eps |g_j(t)|)^{-1/2}`, the `L^1 -> L^inf` norm of `U_V(t)`;
/// `+inf` at a focus.
pub fn dispersion_bound<T: Real>(pot: &QuadraticPotential<T>, epsilon: T, t: T) -> T {
    let two_pi = T::TAU();
    pot.axes().iter().fold(T::one(), |acc, a| {
        let (g, _) = a.phase_functions(t);
        if is_singular(a.signature, a.omega, g) {
            T::infinity()
        } else {
            acc / (two_pi * epsilon * g.abs()).sqrt()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::norm_l2;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn rel_l2(a: &[Complex<f64>], b: &[Complex<f64>]) -> f64 {
        let d: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let n: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (d / n).sqrt()
    }

    fn gaussian(n: usize, l: f64, eps: f64, x0: f64, k0: f64) -> WaveFunction<f64> {
        let g = Grid::new(1, n, l).unwrap();
        WaveFunction::from_fn(g, 0.0, eps, |x| {
            c((-(x[0] - x0).powi(2) / 2.0).exp(), 0.0) * Complex::from_polar(1.0, k0 * x[0] / eps)
        })
        .unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let w = gaussian(128, 10.0, 1.0, 0.3, 0.2);
        let pot = QuadraticPotential::harmonic(1, 1.0).unwrap();
        let u = mehler_propagate(&w, &pot, 0.0).unwrap();
        assert_eq!(u.values(), w.values());
    }

    #[test]
    fn free_gaussian_closed_form() {
        let w = gaussian(512, 20.0, 1.0, 0.0, 0.0);
        let pot = QuadraticPotential::free(1);
        let u = mehler_propagate(&w, &pot, 1.0).unwrap();
        let z = c(1.0, 1.0);
        let expect = w.grid().sample(|x| z.sqrt().inv() * (-(x[0] * x[0]) / (z * 2.0)).exp());
        assert!(rel_l2(u.values(), &expect) < 1e-8);
        assert_relative_eq!(u.time(), 1.0);
    }

    #[test]
    fn harmonic_revival() {
        for (eps, n) in [(1.0, 512), (0.1, 2048)] {
            let w = gaussian(n, 12.0, eps, 1.0, 0.5);
            let pot = QuadraticPotential::harmonic(1, 1.0).unwrap();
            let u = mehler_propagate(&w, &pot, 2.0 * PI).unwrap();
            let neg: Vec<_> = w.values().iter().map(|v| -v).collect();
            assert!(rel_l2(u.values(), &neg) < 1e-8, "eps {eps}");
        }
    }

    #[test]
    fn matches_kernel_quadrature() {
        // Brute-force quadrature of the Mehler integral on a fine grid.
        let w = gaussian(1024, 14.0, 1.0, 0.5, 0.3);
        for (pot, t) in [
            (QuadraticPotential::harmonic(1, 1.3).unwrap(), 0.7),
            (QuadraticPotential::repulsive(1, 0.8).unwrap(), 0.5),
            (QuadraticPotential::free(1), 0.4),
        ] {
            let u = mehler_propagate(&w, &pot, t).unwrap();
            let k = MehlerKernel::new(&pot, 1.0, t).unwrap();
            let xs = w.grid().axis(0).coordinates();
            let dx = w.grid().axis(0).spacing();
            for idx in [400usize, 512, 530, 600] {
                let direct: Complex<f64> = xs
                    .iter()
                    .zip(w.values())
                    .map(|(&y, f)| k.evaluate(&[xs[idx]], &[y]) * f)
                    .sum::<Complex<f64>>()
                    * dx;
                assert!((direct - u.values()[idx]).norm() < 1e-8, "{t}: {direct} vs {}", u.values()[idx]);
            }
        }
    }

    #[test]
    fn unitarity_and_group_law() {
        let w = gaussian(1024, 24.0, 1.0, 0.5, 0.4);
        for pot in [
            QuadraticPotential::free(1),
            QuadraticPotential::harmonic(1, 1.0).unwrap(),
            QuadraticPotential::repulsive(1, 0.5).unwrap(),
        ] {
            let (t, s) = (0.9, 1.3);
            let ut = mehler_propagate(&w, &pot, t).unwrap();
            let uts = mehler_propagate(&ut, &pot, s).unwrap();
            let direct = mehler_propagate(&w, &pot, t + s).unwrap();
            assert!(((norm_l2(&uts) - norm_l2(&w)) / norm_l2(&w)).abs() < 1e-10);
            assert!(rel_l2(uts.values(), direct.values()) < 1e-8);
        }
    }

    #[test]
    fn inverse_round_trip() {
        let w = gaussian(256, 12.0, 0.5, -0.4, 0.8);
        let pot = QuadraticPotential::harmonic(1, 2.0).unwrap();
        let u = inverse_propagate(&mehler_propagate(&w, &pot, 1.1).unwrap(), &pot, 1.1).unwrap();
        assert!(rel_l2(u.values(), w.values()) < 1e-9);
        assert_relative_eq!(u.time(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn focus_map_is_inverted() {
        let w = gaussian(512, 12.0, 0.25, 0.0, 0.0);
        let pot = QuadraticPotential::harmonic(1, 1.0).unwrap();
        let t = PI / 2.0;
        let focus = mehler_propagate(&w, &pot, t).unwrap();
        // At the focus the profile is the rescaled Fourier transform.
        let eps: f64 = 0.25;
        let expect = w.grid().sample(|x| {
            let xi = x[0] / eps;
            c((2.0 * PI * eps).sqrt().recip() * (2.0 * PI).sqrt() * (-xi * xi / 2.0).exp(), 0.0)
        });
        let mods: Vec<_> = focus.values().iter().map(|v| c(v.norm(), 0.0)).collect();
        assert!(rel_l2(&mods, &expect) < 1e-10);
        let back = inverse_propagate(&focus, &pot, t).unwrap();
        assert!(rel_l2(back.values(), w.values()) < 1e-10);
    }

    #[test]
    fn free_time_reversal_symmetry() {
        let w = gaussian(256, 16.0, 1.0, 0.7, 0.9);
        let pot = QuadraticPotential::free(1);
        let back = inverse_propagate(&w, &pot, 0.8).unwrap();
        let conj_in = w.with_values(w.values().iter().map(|v| v.conj()).collect()).unwrap();
        let fwd = mehler_propagate(&conj_in, &pot, 0.8).unwrap();
        let conj_out: Vec<_> = fwd.values().iter().map(|v| v.conj()).collect();
        assert!(rel_l2(back.values(), &conj_out) < 1e-12);
    }

    #[test]
    fn dispersion_examples() {
        let free = QuadraticPotential::<f64>::free(1);
        assert_relative_eq!(dispersion_bound(&free, 1.0, 2.0), (4.0 * PI).powf(-0.5), epsilon = 1e-15);
        let rep = QuadraticPotential::repulsive(1, 1.0).unwrap();
        for t in [0.1, 1.0, 5.0] {
            assert!(dispersion_bound(&rep, 0.3, t) <= (2.0 * PI * 0.3 * t).powf(-0.5));
        }
        let harm = QuadraticPotential::harmonic(1, 1.0).unwrap();
        assert!(dispersion_bound(&harm, 1.0, PI).is_infinite());
    }

    #[test]
    fn refuses_gauge_terms() {
        let w = gaussian(64, 8.0, 1.0, 0.0, 0.0);
        let stark = QuadraticPotential::stark(&[1.0]).unwrap();
        assert!(matches!(mehler_propagate(&w, &stark, 1.0), Err(NlspError::Domain(_))));
    }

    #[test]
    fn two_dimensional_mixed_signature() {
        let g = Grid::new(2, 256, 20.0).unwrap();
        let w = WaveFunction::from_fn(g, 0.0, 1.0, |x: &[f64]| {
            c((-(x[0] * x[0] + (x[1] - 0.5).powi(2)) / 2.0).exp(), 0.0)
        })
        .unwrap();
        let pot = QuadraticPotential::new(
            vec![crate::AxisPotential::harmonic(1.0), crate::AxisPotential::repulsive(0.4)],
            vec![0.0, 0.0],
            0.0,
        )
        .unwrap();
        let a = mehler_propagate(&mehler_propagate(&w, &pot, 0.6).unwrap(), &pot, 0.9).unwrap();
        let b = mehler_propagate(&w, &pot, 1.5).unwrap();
        let e = rel_l2(a.values(), b.values());
        assert!(e < 1e-9, "{e}");
    }
}
