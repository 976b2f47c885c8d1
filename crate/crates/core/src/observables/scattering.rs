//! Convergence of `U_V(-t) u(t)` along a sequence of checkpoints.

use crate::error::{NlspError, Result};
use crate::grid::{sigma_of, WaveFunction};
use crate::potential::QuadraticPotential;
use crate::propagator::inverse_propagate;
use crate::scalar::Real;

pub const DEFAULT_SCATTERING_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq)]
pub struct ScatteringResult<T: Real> {
    pub times: Vec<T>,
    /// `U_V(-t_k) u(t_k)`.
    pub states: Vec<WaveFunction<T>>,
    /// Symmetric table of Sigma-norm differences.
    pub differences: Vec<Vec<T>>,
    /// `||w_{k+1} - w_k||_Sigma`.
    pub consecutive: Vec<T>,
    pub tolerance: T,
    pub converged: bool,
}

impl<T: Real> ScatteringResult<T> {
    /// Estimate of the asymptotic state: the last pulled-back checkpoint.
    pub fn limit(&self) -> Option<&WaveFunction<T>> {
        self.states.last()
    }
}

/// Pull every snapshot back to time zero with the linear flow and compare.
pub fn scattering_monitor<T: Real>(
    snapshots: &[WaveFunction<T>],
    pot: &QuadraticPotential<T>,
    tolerance: T,
) -> Result<ScatteringResult<T>> {
    if !(pot.has_repulsive_axis() || pot.is_free()) {
        return Err(NlspError::Domain(
            "no scattering without a repulsive direction or a free potential".into(),
        ));
    }
    let states = snapshots
        .iter()
        .map(|u| inverse_propagate(u, pot, u.time()))
        .collect::<Result<Vec<_>>>()?;
    let k = states.len();
    let mut differences = vec![vec![T::zero(); k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let diff: Vec<_> = states[i]
                .values()
                .iter()
                .zip(states[j].values())
                .map(|(a, b)| a - b)
                .collect();
            let d = sigma_of(states[i].grid(), &diff);
            differences[i][j] = d;
            differences[j][i] = d;
        }
    }
    let consecutive: Vec<T> = (1..k).map(|i| differences[i - 1][i]).collect();
    let decreasing = consecutive.windows(2).all(|w| w[1] < w[0]);
    let converged = !consecutive.is_empty() && decreasing && *consecutive.last().unwrap() < tolerance;
    Ok(ScatteringResult {
        times: snapshots.iter().map(|u| u.time()).collect(),
        states,
        differences,
        consecutive,
        tolerance,
        converged,
    })
}
