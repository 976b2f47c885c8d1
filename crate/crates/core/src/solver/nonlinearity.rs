use crate::error::{NlspError, Result};
use crate::scalar::Real;

/// Power nonlinearity `lambda |u|^{2 sigma} u` in dimension `dim`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Nonlinearity<T> {
    pub lambda: T,
    pub sigma: T,
    pub dim: usize,
}

/// Tolerance for recognising the conformal exponent `sigma = 2 / n`.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

impl<T: Real> Nonlinearity<T> {
    pub fn new(lambda: T, sigma: T, dim: usize) -> Result<Self> {
        if !lambda.is_finite() {
            return Err(NlspError::Domain("lambda must be finite".into()));
        }
        if !(sigma > T::zero()) || !sigma.is_finite() {
            return Err(NlspError::Domain(format!("sigma must be positive, got {sigma}")));
        }
        if dim == 0 {
            return Err(NlspError::Domain("dimension must be positive".into()));
        }
        let nl = Self { lambda, sigma, dim };
        if !nl.h1_subcritical() {
            return Err(NlspError::Domain(format!(
                "sigma = {sigma} is not energy-subcritical in dimension {dim} (need sigma < 2/(n-2))"
            )));
        }
        Ok(nl)
    }

    /// The linear equation.
    pub fn linear(dim: usize) -> Self {
        Self {
            lambda: T::zero(),
            sigma: T::one(),
            dim,
        }
    }

    pub fn critical_sigma(&self) -> T {
        T::lit(2.0) / T::from_usize_exact(self.dim)
    }

    pub fn l2_critical(&self) -> bool {
        (self.sigma - self.critical_sigma()).abs() <= T::lit(CRITICAL_TOLERANCE)
    }

    pub fn l2_supercritical(&self) -> bool {
        self.sigma >= self.critical_sigma() || self.l2_critical()
    }

    pub fn h1_subcritical(&self) -> bool {
        self.dim <= 2 || self.sigma < T::lit(2.0) / T::from_usize_exact(self.dim - 2)
    }

    pub fn is_linear(&self) -> bool {
        self.lambda == T::zero()
    }

    pub fn focusing(&self) -> bool {
        self.lambda < T::zero()
    }

    /// Exponent `2 sigma + 2` of the potential-energy norm.
    pub fn energy_exponent(&self) -> T {
        T::lit(2.0) * self.sigma + T::lit(2.0)
    }

    /// `|z|^{2 sigma}` from `|z|^2`.
    #[inline]
    pub fn density_power(&self, modulus_sq: T) -> T {
        if self.sigma == T::one() {
            modulus_sq
        } else if self.sigma == T::lit(2.0) {
            modulus_sq * modulus_sq
        } else {
            modulus_sq.powf(self.sigma)
        }
    }
}
