//! Second-order polynomial potentials in canonical form
//! `V(x) = sum_j delta_j omega_j^2 x_j^2 / 2 + sum_j b_j x_j + c`,
//! where linear terms survive only on free axes.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{NlspError, Result};
use crate::scalar::Real;

/// Sign of the quadratic coefficient on one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Signature {
    Repulsive,
    Free,
    Harmonic,
}

impl Signature {
    pub fn delta(self) -> i8 {
        match self {
            Signature::Repulsive => -1,
            Signature::Free => 0,
            Signature::Harmonic => 1,
        }
    }

    pub fn from_delta(delta: i64) -> Result<Self> {
        match delta {
            -1 => Ok(Signature::Repulsive),
            0 => Ok(Signature::Free),
            1 => Ok(Signature::Harmonic),
            d => Err(NlspError::Domain(format!("delta must be -1, 0 or 1, got {d}"))),
        }
    }

    fn delta_real<T: Real>(self) -> T {
        T::lit(self.delta() as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AxisPotential<T> {
    pub signature: Signature,
    /// Frequency; irrelevant (kept at zero) on free axes.
    pub omega: T,
}

impl<T: Real> AxisPotential<T> {
    pub fn free() -> Self {
        Self {
            signature: Signature::Free,
            omega: T::zero(),
        }
    }

    pub fn harmonic(omega: T) -> Self {
        Self {
            signature: Signature::Harmonic,
            omega,
        }
    }

    pub fn repulsive(omega: T) -> Self {
        Self {
            signature: Signature::Repulsive,
            omega,
        }
    }

    /// Coefficient `delta * omega^2` of `x^2` in `2 V`.
    pub fn curvature(&self) -> T {
        self.signature.delta_real::<T>() * self.omega * self.omega
    }

    pub fn phase_functions(&self, t: T) -> (T, T) {
        phase_functions(self.signature, self.omega, t)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticPotential<T> {
    axes: Vec<AxisPotential<T>>,
    linear: Vec<T>,
    constant: T,
}

impl<T: Real> QuadraticPotential<T> {
    pub fn new(axes: Vec<AxisPotential<T>>, linear: Vec<T>, constant: T) -> Result<Self> {
        if axes.is_empty() {
            return Err(NlspError::Domain("potential needs at least one axis".into()));
        }
        if linear.len() != axes.len() {
            return Err(NlspError::Domain(format!(
                "linear coefficients: expected {}, got {}",
                axes.len(),
                linear.len()
            )));
        }
        for (j, (a, b)) in axes.iter().zip(&linear).enumerate() {
            match a.signature {
                Signature::Free => {}
                _ if !(a.omega > T::zero()) || !a.omega.is_finite() => {
                    return Err(NlspError::Domain(format!(
                        "axis {j}: omega must be positive, got {}",
                        a.omega
                    )))
                }
                _ if *b != T::zero() => {
                    return Err(NlspError::Domain(format!(
                        "axis {j}: linear term allowed only on free axes"
                    )))
                }
                _ => {}
            }
            if !b.is_finite() {
                return Err(NlspError::Domain(format!("axis {j}: non-finite linear term")));
            }
        }
        if !constant.is_finite() {
            return Err(NlspError::Domain("non-finite constant term".into()));
        }
        let axes = axes
            .into_iter()
            .map(|a| match a.signature {
                Signature::Free => AxisPotential::free(),
                _ => a,
            })
            .collect();
        Ok(Self {
            axes,
            linear,
            constant,
        })
    }

    pub fn free(dim: usize) -> Self {
        Self::uniform(dim, AxisPotential::free())
    }

    pub fn harmonic(dim: usize, omega: T) -> Result<Self> {
        Self::new(vec![AxisPotential::harmonic(omega); dim], vec![T::zero(); dim], T::zero())
    }

    pub fn repulsive(dim: usize, omega: T) -> Result<Self> {
        Self::new(vec![AxisPotential::repulsive(omega); dim], vec![T::zero(); dim], T::zero())
    }

    /// Uniform field `V(x) = E . x`.
    pub fn stark(field: &[T]) -> Result<Self> {
        Self::new(vec![AxisPotential::free(); field.len()], field.to_vec(), T::zero())
    }

    fn uniform(dim: usize, axis: AxisPotential<T>) -> Self {
        Self {
            axes: vec![axis; dim],
            linear: vec![T::zero(); dim],
            constant: T::zero(),
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[AxisPotential<T>] {
        &self.axes
    }

    pub fn axis(&self, j: usize) -> &AxisPotential<T> {
        &self.axes[j]
    }

    pub fn linear(&self) -> &[T] {
        &self.linear
    }

    pub fn constant(&self) -> T {
        self.constant
    }

    pub fn value(&self, x: &[T]) -> T {
        let half = T::lit(0.5);
        self.axes
            .iter()
            .zip(&self.linear)
            .zip(x)
            .fold(self.constant, |acc, ((a, &b), &xj)| {
                acc + half * a.curvature() * xj * xj + b * xj
            })
    }

    /// Per-axis contribution `V_j(x_j)`; the constant term is not included.
    pub fn axis_value(&self, j: usize, xj: T) -> T {
        T::lit(0.5) * self.axes[j].curvature() * xj * xj + self.linear[j] * xj
    }

    pub fn is_free(&self) -> bool {
        self.axes.iter().all(|a| a.signature == Signature::Free)
    }

    /// No residual linear or constant terms.
    pub fn is_gauge_free(&self) -> bool {
        self.constant == T::zero() && self.linear.iter().all(|b| *b == T::zero())
    }

    /// `Some((signature, omega))` when all axes carry the same data.
    pub fn isotropic(&self) -> Option<(Signature, T)> {
        let first = self.axes[0];
        self.axes
            .iter()
            .all(|a| a.signature == first.signature && a.omega == first.omega)
            .then_some((first.signature, first.omega))
    }

    pub fn has_repulsive_axis(&self) -> bool {
        self.axes.iter().any(|a| a.signature == Signature::Repulsive)
    }

    pub fn phase_functions(&self, t: T) -> Vec<(T, T)> {
        self.axes.iter().map(|a| a.phase_functions(t)).collect()
    }

    pub fn classify(&self) -> PotentialClassification<T> {
        let max_of = |s: Signature| {
            self.axes
                .iter()
                .filter(|a| a.signature == s)
                .map(|a| a.omega)
                .fold(T::zero(), |a, b| a.max(b))
        };
        let harmonic: Vec<f64> = self
            .axes
            .iter()
            .filter(|a| a.signature == Signature::Harmonic)
            .map(|a| a.omega.as_f64())
            .collect();
        let dependent = harmonic.iter().enumerate().all(|(i, &a)| {
            harmonic[i + 1..]
                .iter()
                .all(|&b| rational_approximation(a / b, RATIONAL_MAX_DENOMINATOR, RATIONAL_TOLERANCE).is_some())
        });
        PotentialClassification {
            omega_plus: max_of(Signature::Harmonic),
            omega_minus: max_of(Signature::Repulsive),
            has_repulsive_axis: self.has_repulsive_axis(),
            fully_harmonic: self.axes.iter().all(|a| a.signature == Signature::Harmonic),
            rationally_dependent_frequencies: dependent,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialClassification<T> {
    pub omega_plus: T,
    pub omega_minus: T,
    pub has_repulsive_axis: bool,
    pub fully_harmonic: bool,
    /// Every pair of harmonic frequencies has a rational ratio (within the
    /// continued-fraction heuristic). Vacuously true with fewer than two.
    pub rationally_dependent_frequencies: bool,
}

pub const RATIONAL_MAX_DENOMINATOR: u64 = 64;
pub const RATIONAL_TOLERANCE: f64 = 1e-9;

/// Best continued-fraction convergent `p/q` of `x` with `q <= max_den`
/// whose relative error is within `tol`.
pub fn rational_approximation(x: f64, max_den: u64, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1u64, 0u64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            return None;
        }
        let ai = a as i64;
        let h2 = ai.checked_mul(h1)?.checked_add(h0)?;
        let k2 = (ai as u64).checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            return None;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let approx = h1 as f64 / k1 as f64;
        if (approx - x).abs() <= tol * x.abs().max(1e-300) {
            return Some((h1, k1));
        }
        let frac = r - a;
        if frac == 0.0 {
            return None;
        }
        r = 1.0 / frac;
    }
    None
}

/// `(g, h)` solving `g' = h`, `h' = -delta omega^2 g`, `g(0) = 0`, `h(0) = 1`.
pub fn phase_functions<T: Real>(signature: Signature, omega: T, t: T) -> (T, T) {
    match signature {
        Signature::Repulsive => ((omega * t).sinh() / omega, (omega * t).cosh()),
        Signature::Free => (t, T::one()),
        Signature::Harmonic => ((omega * t).sin() / omega, (omega * t).cos()),
    }
}

/// Hamilton flow of `|xi|^2 / 2 + V(x)` from `(x0, xi0)`.
pub fn classical_trajectory<T: Real>(
    x0: &[T],
    xi0: &[T],
    pot: &QuadraticPotential<T>,
    t: T,
) -> (Vec<T>, Vec<T>) {
    let half = T::lit(0.5);
    let mut x = Vec::with_capacity(pot.dim());
    let mut xi = Vec::with_capacity(pot.dim());
    for (j, a) in pot.axes().iter().enumerate() {
        let (g, h) = a.phase_functions(t);
        let b = pot.linear()[j];
        x.push(x0[j] * h + xi0[j] * g - half * b * t * t);
        xi.push(-a.curvature() * g * x0[j] + h * xi0[j] - b * t);
    }
    (x, xi)
}

/// Result of reducing a general quadratic form to canonical axes.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalForm<T> {
    pub potential: QuadraticPotential<T>,
    /// Orthonormal basis; column `j` is canonical axis `j` in original
    /// coordinates, stored row-major as `basis[row][col]`.
    pub basis: Vec<Vec<T>>,
    /// Origin of the canonical frame in original coordinates. Canonical
    /// coordinates are `z = basis^T (x - origin)`.
    pub origin: Vec<T>,
}

impl<T: Real> CanonicalForm<T> {
    pub fn to_canonical(&self, x: &[T]) -> Vec<T> {
        let n = x.len();
        (0..n)
            .map(|j| (0..n).fold(T::zero(), |acc, i| acc + self.basis[i][j] * (x[i] - self.origin[i])))
            .collect()
    }

    pub fn from_canonical(&self, z: &[T]) -> Vec<T> {
        let n = z.len();
        (0..n)
            .map(|i| (0..n).fold(self.origin[i], |acc, j| acc + self.basis[i][j] * z[j]))
            .collect()
    }
}

pub const EIGEN_ZERO_TOLERANCE: f64 = 1e-12;

/// Reduce `V(x) = x^T a x + b . x + c` to canonical form.
pub fn canonicalize<T: Real>(a: &[Vec<T>], b: &[T], c: T) -> Result<CanonicalForm<T>> {
    let n = a.len();
    if n == 0 || b.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(NlspError::Domain("quadratic form must be square and match the linear term".into()));
    }
    let m = DMatrix::<f64>::from_fn(n, n, |i, j| a[i][j].as_f64());
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if m.iter().any(|v| !v.is_finite()) || b.iter().any(|v| !v.is_finite()) || !c.is_finite() {
        return Err(NlspError::Domain("non-finite potential coefficients".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale.max(1.0) {
                return Err(NlspError::Domain(format!(
                    "quadratic form is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let diagonal = (0..n).all(|i| (0..n).all(|j| i == j || m[(i, j)] == 0.0));
    let (eigen, basis) = if diagonal {
        ((0..n).map(|i| m[(i, i)]).collect::<Vec<_>>(), DMatrix::<f64>::identity(n, n))
    } else {
        let sym = (&m + m.transpose()) * 0.5;
        let se = SymmetricEigen::new(sym);
        (se.eigenvalues.iter().copied().collect(), se.eigenvectors)
    };
    let mu_max = eigen.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let bf: Vec<f64> = b.iter().map(|v| v.as_f64()).collect();
    let mut axes = Vec::with_capacity(n);
    let mut linear = Vec::with_capacity(n);
    let mut shift = vec![0.0f64; n];
    let mut constant = c.as_f64();
    for j in 0..n {
        let beta: f64 = (0..n).map(|i| basis[(i, j)] * bf[i]).sum();
        let mu = eigen[j];
        if mu_max == 0.0 || mu.abs() < EIGEN_ZERO_TOLERANCE * mu_max {
            axes.push(AxisPotential::free());
            linear.push(T::lit(beta));
        } else {
            let omega = T::lit((2.0 * mu.abs()).sqrt());
            axes.push(if mu > 0.0 {
                AxisPotential::harmonic(omega)
            } else {
                AxisPotential::repulsive(omega)
            });
            linear.push(T::zero());
            shift[j] = -beta / (2.0 * mu);
            constant -= beta * beta / (4.0 * mu);
        }
    }
    let origin = (0..n)
        .map(|i| T::lit((0..n).map(|j| basis[(i, j)] * shift[j]).sum()))
        .collect();
    let basis = (0..n)
        .map(|i| (0..n).map(|j| T::lit(basis[(i, j)])).collect())
        .collect();
    Ok(CanonicalForm {
        potential: QuadraticPotential::new(axes, linear, T::lit(constant))?,
        basis,
        origin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn canonical_examples() {
        let cf = canonicalize(&[vec![0.5]], &[0.0], 0.0).unwrap();
        assert_eq!(cf.potential.axis(0).signature, Signature::Harmonic);
        assert_relative_eq!(cf.potential.axis(0).omega, 1.0);

        let cf = canonicalize(&[vec![-2.0]], &[0.0], 0.0).unwrap();
        assert_eq!(cf.potential.axis(0).signature, Signature::Repulsive);
        assert_relative_eq!(cf.potential.axis(0).omega, 2.0);

        let cf = canonicalize(&[vec![0.0]], &[1.5], 0.0).unwrap();
        assert_eq!(cf.potential.axis(0).signature, Signature::Free);
        assert_eq!(cf.potential.linear(), &[1.5]);
    }

    #[test]
    fn rotated_form_reproduces_values() {
        let a = vec![vec![1.0, 0.3], vec![0.3, -0.4]];
        let b = [0.7, -1.1];
        let c = 0.25;
        let cf = canonicalize(&a, &b, c).unwrap();
        for x in [[0.3, -0.2], [1.5, 2.0], [-3.0, 0.1]] {
            let direct = x[0] * (a[0][0] * x[0] + a[0][1] * x[1])
                + x[1] * (a[1][0] * x[0] + a[1][1] * x[1])
                + b[0] * x[0]
                + b[1] * x[1]
                + c;
            let z = cf.to_canonical(&x);
            assert_relative_eq!(cf.potential.value(&z), direct, epsilon = 1e-12);
            let back = cf.from_canonical(&z);
            assert_relative_eq!(back[0], x[0], epsilon = 1e-12);
            assert_relative_eq!(back[1], x[1], epsilon = 1e-12);
        }
        assert!(cf.potential.has_repulsive_axis());
    }

    #[test]
    fn degenerate_axis_keeps_linear_term() {
        let a = vec![vec![0.5, 0.0], vec![0.0, 0.0]];
        let cf = canonicalize(&a, &[1.0, 2.0], 0.0).unwrap();
        assert_eq!(cf.potential.axis(1).signature, Signature::Free);
        assert_relative_eq!(cf.potential.linear()[1], 2.0);
        assert_relative_eq!(cf.origin[0], -1.0);
        assert_relative_eq!(cf.potential.constant(), -0.5);
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(canonicalize(&[vec![1.0, 0.2], vec![0.0, 1.0]], &[0.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let a = vec![vec![0.5, 0.0, 0.0], vec![0.0, -2.0, 0.0], vec![0.0, 0.0, 0.0]];
        let cf = canonicalize(&a, &[0.0, 0.0, 0.3], 0.0).unwrap();
        let p = &cf.potential;
        let a2: Vec<Vec<f64>> = (0..3)
            .map(|i| (0..3).map(|j| if i == j { p.axis(i).curvature() / 2.0 } else { 0.0 }).collect())
            .collect();
        let cf2 = canonicalize(&a2, p.linear(), p.constant()).unwrap();
        assert_eq!(cf2.potential, cf.potential);
    }

    #[test]
    fn phase_function_examples() {
        let (g, h) = phase_functions(Signature::Harmonic, 2.0, PI / 4.0);
        assert_relative_eq!(g, 0.5, epsilon = 1e-15);
        assert!(h.abs() < 1e-15);
        for s in [Signature::Repulsive, Signature::Free, Signature::Harmonic] {
            assert_eq!(phase_functions(s, 1.3, 0.0), (0.0, 1.0));
        }
        // Series oracle for sinh 1 and cosh 1.
        let (mut sh, mut ch, mut term) = (0.0, 0.0, 1.0);
        for k in 0..30 {
            if k % 2 == 0 {
                ch += term;
            } else {
                sh += term;
            }
            term /= (k + 1) as f64;
        }
        let (g, h) = phase_functions(Signature::Repulsive, 1.0, 1.0);
        assert_relative_eq!(g, sh, epsilon = 1e-15);
        assert_relative_eq!(h, ch, epsilon = 1e-15);
        assert_relative_eq!(g, 1.17520, epsilon = 1e-5);
        assert_relative_eq!(h, 1.54308, epsilon = 1e-5);
    }

    #[test]
    fn trajectories() {
        let rep = QuadraticPotential::repulsive(1, 1.0).unwrap();
        for t in [0.5f64, 1.0, 3.0] {
            let (x, xi) = classical_trajectory(&[1.0], &[-1.0], &rep, t);
            assert_relative_eq!(x[0], (-t).exp(), epsilon = 1e-12);
            assert_relative_eq!(xi[0], -(-t).exp(), epsilon = 1e-12);
        }
        let harm = QuadraticPotential::harmonic(1, 1.0).unwrap();
        let (x, _) = classical_trajectory(&[1.0], &[0.0], &harm, PI / 2.0);
        assert!(x[0].abs() < 1e-15);
        let (x, xi) = classical_trajectory(&[0.4, -0.2], &[1.0, 2.0], &QuadraticPotential::free(2), 0.0);
        assert_eq!((x, xi), (vec![0.4, -0.2], vec![1.0, 2.0]));
    }

    #[test]
    fn derivatives_of_phase_functions() {
        let dt = 1e-4;
        for (s, w) in [(Signature::Harmonic, 1.7), (Signature::Repulsive, 0.6), (Signature::Free, 0.0)] {
            for t in [0.1f64, 0.9, 2.3] {
                let (gp, hp) = phase_functions(s, w, t + dt);
                let (gm, hm) = phase_functions(s, w, t - dt);
                let (g, h) = phase_functions(s, w, t);
                let d = s.delta() as f64;
                assert!(((gp - gm) / (2.0 * dt) - h).abs() < 1e-7);
                assert!(((hp - hm) / (2.0 * dt) + d * w * w * g).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn classification() {
        let p = QuadraticPotential::new(
            vec![AxisPotential::harmonic(1.0), AxisPotential::harmonic(1.5), AxisPotential::repulsive(0.3)],
            vec![0.0; 3],
            0.0,
        )
        .unwrap();
        let c = p.classify();
        assert_eq!(c.omega_plus, 1.5);
        assert_eq!(c.omega_minus, 0.3);
        assert!(c.has_repulsive_axis && !c.fully_harmonic && c.rationally_dependent_frequencies);
        let q = QuadraticPotential::new(
            vec![AxisPotential::harmonic(1.0), AxisPotential::harmonic(2f64.sqrt())],
            vec![0.0; 2],
            0.0,
        )
        .unwrap();
        assert!(!q.classify().rationally_dependent_frequencies);
        assert!(q.classify().fully_harmonic);
        let f = QuadraticPotential::<f64>::free(2).classify();
        assert_eq!((f.omega_plus, f.omega_minus), (0.0, 0.0));
    }

    #[test]
    fn rejects_invalid_axes() {
        assert!(QuadraticPotential::new(vec![AxisPotential::harmonic(0.0)], vec![0.0], 0.0).is_err());
        assert!(QuadraticPotential::new(vec![AxisPotential::harmonic(1.0)], vec![0.5], 0.0).is_err());
        assert!(Signature::from_delta(2).is_err());
    }
}
