//! Ground state `Q` of `1/2 Lap Q - Q + |lambda| |Q|^{2 sigma} Q = 0`.
//!
//! Semi-implicit normalized gradient flow: each iteration takes one implicit
//! step of `phi_s = 1/2 Lap phi - phi + |lambda| |phi|^{2 sigma} phi` with
//! the nonlinear term explicit, then rescales onto the Nehari manifold
//! `1/2 ||grad phi||^2 + ||phi||^2 = |lambda| ||phi||_{2 sigma + 2}^{2 sigma + 2}`.
//! On that manifold the action is a positive multiple of the left-hand side,
//! and the flow descends it to the ground level.

use num_complex::Complex;

use super::Nonlinearity;
use crate::error::{NlspError, Result};
use crate::grid::{grad_sq_of, Grid, WaveFunction};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroundStateConfig<T> {
    pub step: T,
    pub tolerance: T,
    pub max_iterations: usize,
}

impl<T: Real> Default for GroundStateConfig<T> {
    fn default() -> Self {
        Self {
            step: T::lit(2.0),
            tolerance: T::lit(1e-8),
            max_iterations: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundState<T: Real> {
    pub profile: WaveFunction<T>,
    /// `||1/2 Lap Q - Q + |lambda| |Q|^{2 sigma} Q||_{L^2}`.
    pub residual: T,
    pub iterations: usize,
    /// Action `1/4 ||grad Q||^2 + 1/2 ||Q||^2 - |lambda|/(2 sigma + 2) ||Q||^p_p`
    /// after each iteration.
    pub action_history: Vec<T>,
}

struct Parts<T> {
    kinetic: T,
    mass: T,
    power: T,
}

fn parts<T: Real>(grid: &Grid<T>, v: &[Complex<T>], p: T) -> Parts<T> {
    Parts {
        kinetic: T::lit(0.5) * grad_sq_of(grid, v),
        mass: grid.l2_norm_sq(v),
        power: v.iter().fold(T::zero(), |a, c| a + c.norm().powf(p)) * grid.cell_volume(),
    }
}

fn residual<T: Real>(grid: &Grid<T>, v: &[Complex<T>], coupling: T, nl: &Nonlinearity<T>, xi_sq: &[T]) -> T {
    let mut lap = v.to_vec();
    grid.forward_in_place(&mut lap);
    for (c, &k2) in lap.iter_mut().zip(xi_sq) {
        *c = *c * (-T::lit(0.5) * k2);
    }
    grid.inverse_in_place(&mut lap);
    let r: Vec<Complex<T>> = lap
        .iter()
        .zip(v)
        .map(|(l, &u)| l - u + u * (coupling * nl.density_power(u.norm_sqr())))
        .collect();
    grid.l2_norm_sq(&r).sqrt()
}

/// Solve for the ground state on `grid` and return the iteration record.
pub fn ground_state_with_history<T: Real>(
    grid: &Grid<T>,
    nl: &Nonlinearity<T>,
    cfg: &GroundStateConfig<T>,
) -> Result<GroundState<T>> {
    if nl.dim != grid.dim() {
        return Err(NlspError::Domain("nonlinearity and grid dimensions differ".into()));
    }
    if !nl.focusing() {
        return Err(NlspError::Domain("the ground state exists only for focusing nonlinearities".into()));
    }
    let coupling = nl.lambda.abs();
    let p = T::lit(2.0) * nl.sigma + T::lit(2.0);
    let freqs = grid.frequency_tables();
    let xi_sq: Vec<T> = (0..grid.total_points())
        .map(|flat| {
            let idx = grid.multi_index(flat);
            (0..grid.dim()).fold(T::zero(), |a, j| a + freqs[j][idx[j]] * freqs[j][idx[j]])
        })
        .collect();

    let mut v = grid.sample(|x| {
        let r2 = x.iter().fold(T::zero(), |a, &y| a + y * y);
        Complex::new((-r2 * T::lit(0.5)).exp(), T::zero())
    });
    let project = |v: &mut Vec<Complex<T>>| -> Result<T> {
        let q = parts(grid, v, p);
        if !(q.power > T::zero()) {
            return Err(NlspError::Convergence("ground-state iterate collapsed to zero".into()));
        }
        let s = ((q.kinetic + q.mass) / (coupling * q.power)).powf(T::one() / (T::lit(2.0) * nl.sigma));
        for c in v.iter_mut() {
            *c = *c * s;
        }
        let q = parts(grid, v, p);
        Ok(T::lit(0.5) * (q.kinetic + q.mass) - coupling * q.power / p)
    };
    let mut history = vec![project(&mut v)?];
    let dt = cfg.step;
    let mut res = residual(grid, &v, coupling, nl, &xi_sq);
    let mut iterations = 0;
    while res >= cfg.tolerance && iterations < cfg.max_iterations {
        let mut rhs: Vec<Complex<T>> = v
            .iter()
            .map(|&u| u + u * (dt * coupling * nl.density_power(u.norm_sqr())))
            .collect();
        grid.forward_in_place(&mut rhs);
        for (c, &k2) in rhs.iter_mut().zip(&xi_sq) {
            *c = *c / (T::one() + dt * (T::one() + T::lit(0.5) * k2));
        }
        grid.inverse_in_place(&mut rhs);
        // The ground state is real and even; drop round-off imaginary parts.
        for c in rhs.iter_mut() {
            c.im = T::zero();
        }
        v = rhs;
        history.push(project(&mut v)?);
        res = residual(grid, &v, coupling, nl, &xi_sq);
        iterations += 1;
    }
    if res >= cfg.tolerance {
        return Err(NlspError::Convergence(format!(
            "ground-state residual {res:e} after {iterations} iterations"
        )));
    }
    Ok(GroundState {
        profile: WaveFunction::new(grid.clone(), v, T::zero(), T::one())?,
        residual: res,
        iterations,
        action_history: history,
    })
}

/// Ground-state profile with the default iteration settings.
pub fn ground_state_proxy<T: Real>(grid: &Grid<T>, nl: &Nonlinearity<T>) -> Result<WaveFunction<T>> {
    ground_state_with_history(grid, nl, &GroundStateConfig::default()).map(|g| g.profile)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_soliton_in_one_dimension() {
        // 1/2 Q'' - Q + Q^3 = 0 has Q = sqrt(2) sech(sqrt(2) x).
        let g = Grid::<f64>::new(1, 512, 20.0).unwrap();
        let nl = Nonlinearity::new(-1.0, 1.0, 1).unwrap();
        let gs = ground_state_with_history(&g, &nl, &GroundStateConfig::default()).unwrap();
        assert!(gs.residual < 1e-8);
        let expect = g.sample_real(|x| 2f64.sqrt() / (2f64.sqrt() * x[0]).cosh());
        let err = gs
            .profile
            .values()
            .iter()
            .zip(&expect)
            .map(|(a, b)| (a.re - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-7, "{err}");
    }

    #[test]
    fn quintic_soliton_and_monotone_action() {
        // 1/2 Q'' - Q + Q^5 = 0 has Q = 3^{1/4} sech(2 sqrt(2) x)^{1/2}.
        let g = Grid::<f64>::new(1, 512, 20.0).unwrap();
        let nl = Nonlinearity::new(-1.0, 2.0, 1).unwrap();
        let gs = ground_state_with_history(&g, &nl, &GroundStateConfig::default()).unwrap();
        let expect = g.sample_real(|x| 3f64.powf(0.25) / (8f64.sqrt() * x[0]).cosh().sqrt());
        let err = gs
            .profile
            .values()
            .iter()
            .zip(&expect)
            .map(|(a, b)| (a.re - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-7, "{err}");
        for pair in gs.action_history.windows(2) {
            assert!(pair[1] <= pair[0] * (1.0 + 1e-12), "{pair:?}");
        }
    }

    #[test]
    fn defocusing_is_rejected() {
        let g = Grid::<f64>::new(1, 64, 10.0).unwrap();
        let nl = Nonlinearity::new(1.0, 1.0, 1).unwrap();
        assert!(ground_state_proxy(&g, &nl).is_err());
    }
}
