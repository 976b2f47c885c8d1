//! Tensor-product periodic grids, wavefunction samples and the spectral
//! machinery (unitary DFT, spectral derivatives, quadrature norms).
//!
//! Values are stored row-major: axis 0 varies slowest. Axis `j` covers
//! `[-L_j, L_j)` with `N_j` points, `x_k = -L_j + k h_j`, `h_j = 2 L_j / N_j`.
//! Frequencies use the standard discrete ordering
//! `xi_k = k * pi / L_j` for `k < N_j / 2` and `(k - N_j) * pi / L_j` otherwise.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{NlspError, Result};
use crate::scalar::Real;

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 3;
/// Smallest admissible number of points on one axis.
pub const MIN_POINTS: usize = 8;

#[derive(Clone)]
pub struct Axis<T: Real> {
    points: usize,
    half_width: T,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> Axis<T> {
    pub fn new(points: usize, half_width: T) -> Result<Self> {
        if points < MIN_POINTS || !points.is_power_of_two() {
            return Err(NlspError::Domain(format!(
                "axis point count {points} must be a power of two >= {MIN_POINTS}"
            )));
        }
        if !(half_width > T::zero()) || !half_width.is_finite() {
            return Err(NlspError::Domain(format!(
                "half width must be positive and finite, got {half_width}"
            )));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            points,
            half_width,
            forward: planner.plan_fft_forward(points),
            inverse: planner.plan_fft_inverse(points),
        })
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn half_width(&self) -> T {
        self.half_width
    }

    pub fn spacing(&self) -> T {
        (self.half_width + self.half_width) / T::from_usize_exact(self.points)
    }

    /// Frequency lattice step `pi / L`.
    pub fn frequency_step(&self) -> T {
        T::PI() / self.half_width
    }

    pub fn coordinates(&self) -> Vec<T> {
        let h = self.spacing();
        (0..self.points)
            .map(|k| -self.half_width + h * T::from_usize_exact(k))
            .collect()
    }

    /// Signed integer index of frequency bin `k` in standard ordering.
    pub fn signed_index(&self, k: usize) -> isize {
        if k < self.points / 2 {
            k as isize
        } else {
            k as isize - self.points as isize
        }
    }

    pub fn frequencies(&self) -> Vec<T> {
        let dk = self.frequency_step();
        (0..self.points)
            .map(|k| T::from_isize(self.signed_index(k)).unwrap() * dk)
            .collect()
    }

    /// Largest representable |xi| on this axis.
    pub fn nyquist(&self) -> T {
        T::from_usize_exact(self.points / 2) * self.frequency_step()
    }
}

impl<T: Real> fmt::Debug for Axis<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Axis")
            .field("points", &self.points)
            .field("half_width", &self.half_width)
            .finish()
    }
}

impl<T: Real> PartialEq for Axis<T> {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.half_width == other.half_width
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Grid<T: Real> {
    axes: Vec<Axis<T>>,
}

impl<T: Real> Grid<T> {
    /// Isotropic grid: `dim` axes with identical point count and half width.
    pub fn new(dim: usize, points: usize, half_width: T) -> Result<Self> {
        Self::from_axes(&vec![(points, half_width); dim])
    }

    pub fn from_axes(spec: &[(usize, T)]) -> Result<Self> {
        if spec.is_empty() || spec.len() > MAX_DIM {
            return Err(NlspError::Domain(format!(
                "dimension must be in 1..={MAX_DIM}, got {}",
                spec.len()
            )));
        }
        let axes = spec
            .iter()
            .map(|&(n, l)| Axis::new(n, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, j: usize) -> &Axis<T> {
        &self.axes[j]
    }

    pub fn axes(&self) -> &[Axis<T>] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.points).collect()
    }

    pub fn total_points(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    /// Quadrature weight `h_1 ... h_n`.
    pub fn cell_volume(&self) -> T {
        self.axes.iter().fold(T::one(), |acc, a| acc * a.spacing())
    }

    pub fn max_spacing(&self) -> T {
        self.axes
            .iter()
            .map(|a| a.spacing())
            .fold(T::zero(), |a, b| a.max(b))
    }

    /// Stride (in flat storage) of axis `j`.
    pub fn stride(&self, j: usize) -> usize {
        self.axes[j + 1..].iter().map(|a| a.points).product()
    }

    /// Multi-index of a flat storage position.
    pub fn multi_index(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut idx = [0; MAX_DIM];
        for j in (0..self.dim()).rev() {
            let n = self.axes[j].points;
            idx[j] = flat % n;
            flat /= n;
        }
        idx
    }

    /// Coordinates of every grid point, axis-major (`coords[j][flat]` would be
    /// wasteful, so callers receive per-axis coordinate tables instead).
    pub fn coordinate_tables(&self) -> Vec<Vec<T>> {
        self.axes.iter().map(|a| a.coordinates()).collect()
    }

    pub fn frequency_tables(&self) -> Vec<Vec<T>> {
        self.axes.iter().map(|a| a.frequencies()).collect()
    }

    /// Evaluate `f` at every grid point (row-major order).
    pub fn sample<F>(&self, mut f: F) -> Vec<Complex<T>>
    where
        F: FnMut(&[T]) -> Complex<T>,
    {
        let tables = self.coordinate_tables();
        let mut point = vec![T::zero(); self.dim()];
        (0..self.total_points())
            .map(|flat| {
                let idx = self.multi_index(flat);
                for j in 0..self.dim() {
                    point[j] = tables[j][idx[j]];
                }
                f(&point)
            })
            .collect()
    }

    /// Evaluate a real function at every grid point.
    pub fn sample_real<F>(&self, mut f: F) -> Vec<T>
    where
        F: FnMut(&[T]) -> T,
    {
        let tables = self.coordinate_tables();
        let mut point = vec![T::zero(); self.dim()];
        (0..self.total_points())
            .map(|flat| {
                let idx = self.multi_index(flat);
                for j in 0..self.dim() {
                    point[j] = tables[j][idx[j]];
                }
                f(&point)
            })
            .collect()
    }

    /// Multiply `values` by the separable product `prod_j factors[j][i_j]`.
    pub fn multiply_separable(&self, values: &mut [Complex<T>], factors: &[Vec<Complex<T>>]) {
        debug_assert_eq!(factors.len(), self.dim());
        match self.dim() {
            1 => {
                for (v, f) in values.iter_mut().zip(&factors[0]) {
                    *v = *v * *f;
                }
            }
            _ => {
                for (flat, v) in values.iter_mut().enumerate() {
                    let idx = self.multi_index(flat);
                    let mut f = factors[0][idx[0]];
                    for j in 1..self.dim() {
                        f = f * factors[j][idx[j]];
                    }
                    *v = *v * f;
                }
            }
        }
    }

    /// Unnormalized in-place DFT over every axis.
    fn dft_in_place(&self, data: &mut [Complex<T>], forward: bool) {
        assert_eq!(data.len(), self.total_points(), "value count mismatch");
        let shape = self.shape();
        for (j, axis) in self.axes.iter().enumerate() {
            let plan = if forward { &axis.forward } else { &axis.inverse };
            let n = shape[j];
            let stride = self.stride(j);
            let mut scratch = vec![Complex::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
            if stride == 1 {
                for line in data.chunks_exact_mut(n) {
                    plan.process_with_scratch(line, &mut scratch);
                }
            } else {
                let outer = data.len() / (n * stride);
                let mut line = vec![Complex::new(T::zero(), T::zero()); n];
                for o in 0..outer {
                    for s in 0..stride {
                        let base = o * n * stride + s;
                        for k in 0..n {
                            line[k] = data[base + k * stride];
                        }
                        plan.process_with_scratch(&mut line, &mut scratch);
                        for k in 0..n {
                            data[base + k * stride] = line[k];
                        }
                    }
                }
            }
        }
    }

    /// Unitary forward transform in place.
    pub fn forward_in_place(&self, data: &mut [Complex<T>]) {
        self.dft_in_place(data, true);
        let scale = T::one() / T::from_usize_exact(self.total_points()).sqrt();
        data.iter_mut().for_each(|c| *c = *c * scale);
    }

    /// Unitary inverse transform in place.
    pub fn inverse_in_place(&self, data: &mut [Complex<T>]) {
        self.dft_in_place(data, false);
        let scale = T::one() / T::from_usize_exact(self.total_points()).sqrt();
        data.iter_mut().for_each(|c| *c = *c * scale);
    }

    /// `h^n * sum |v|^2`.
    pub fn l2_norm_sq(&self, values: &[Complex<T>]) -> T {
        self.cell_volume() * values.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    }

    /// Discrete `L^2` inner product `<a, b> = h^n sum conj(a) b`.
    pub fn inner(&self, a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
        let s = a
            .iter()
            .zip(b)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (x, y)| acc + x.conj() * y);
        s * self.cell_volume()
    }

    /// Spectral partial derivative along axis `j`.
    pub fn partial(&self, values: &[Complex<T>], j: usize) -> Vec<Complex<T>> {
        let mut spec = values.to_vec();
        self.forward_in_place(&mut spec);
        let xi = self.axes[j].frequencies();
        let mut factors: Vec<Vec<Complex<T>>> = self
            .axes
            .iter()
            .map(|a| vec![Complex::new(T::one(), T::zero()); a.points])
            .collect();
        factors[j] = xi.iter().map(|&k| Complex::new(T::zero(), k)).collect();
        self.multiply_separable(&mut spec, &factors);
        self.inverse_in_place(&mut spec);
        spec
    }

    /// Shift `v(x) -> v(x + a)` by spectral phase multiplication (exact for
    /// band-limited periodic data).
    pub fn shift(&self, values: &[Complex<T>], offset: &[T]) -> Vec<Complex<T>> {
        let mut spec = values.to_vec();
        self.forward_in_place(&mut spec);
        let factors: Vec<Vec<Complex<T>>> = self
            .axes
            .iter()
            .zip(offset)
            .map(|(a, &s)| {
                a.frequencies()
                    .into_iter()
                    .map(|k| Complex::from_polar(T::one(), k * s))
                    .collect()
            })
            .collect();
        self.multiply_separable(&mut spec, &factors);
        self.inverse_in_place(&mut spec);
        spec
    }
}

/// Samples of `u^eps(t, .)` on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveFunction<T: Real> {
    grid: Grid<T>,
    values: Vec<Complex<T>>,
    time: T,
    epsilon: T,
}

impl<T: Real> WaveFunction<T> {
    pub fn new(grid: Grid<T>, values: Vec<Complex<T>>, time: T, epsilon: T) -> Result<Self> {
        if values.len() != grid.total_points() {
            return Err(NlspError::Domain(format!(
                "expected {} values, got {}",
                grid.total_points(),
                values.len()
            )));
        }
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(NlspError::Domain(format!("epsilon must be positive, got {epsilon}")));
        }
        check_finite(&values)?;
        Ok(Self {
            grid,
            values,
            time,
            epsilon,
        })
    }

    pub fn from_fn<F>(grid: Grid<T>, time: T, epsilon: T, f: F) -> Result<Self>
    where
        F: FnMut(&[T]) -> Complex<T>,
    {
        let values = grid.sample(f);
        Self::new(grid, values, time, epsilon)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn time(&self) -> T {
        self.time
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn set_time(&mut self, t: T) {
        self.time = t;
    }

    /// Same metadata, new samples (validated).
    pub fn with_values(&self, values: Vec<Complex<T>>) -> Result<Self> {
        Self::new(self.grid.clone(), values, self.time, self.epsilon)
    }

    pub fn with_time(mut self, t: T) -> Self {
        self.time = t;
        self
    }

    pub fn scaled(&self, factor: Complex<T>) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = *v * factor);
        out
    }

    pub fn check_finite(&self) -> Result<()> {
        check_finite(&self.values)
    }
}

pub(crate) fn check_finite<T: Real>(values: &[Complex<T>]) -> Result<()> {
    if let Some(pos) = values.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
        return Err(NlspError::NumericalCorruption(format!(
            "non-finite sample at index {pos}"
        )));
    }
    Ok(())
}

/// Unitary discrete Fourier coefficients of `w`.
pub fn forward_spectral<T: Real>(w: &WaveFunction<T>) -> Result<Vec<Complex<T>>> {
    w.check_finite()?;
    let mut data = w.values.clone();
    w.grid.forward_in_place(&mut data);
    Ok(data)
}

/// Inverse of [`forward_spectral`].
pub fn inverse_spectral<T: Real>(grid: &Grid<T>, coefficients: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
    check_finite(coefficients)?;
    let mut data = coefficients.to_vec();
    grid.inverse_in_place(&mut data);
    Ok(data)
}

pub fn norm_l2<T: Real>(w: &WaveFunction<T>) -> T {
    w.grid.l2_norm_sq(&w.values).sqrt()
}

/// `L^p` quadrature norm; `p = +inf` gives the sample maximum.
pub fn norm_lp<T: Real>(w: &WaveFunction<T>, p: T) -> Result<T> {
    lp_of(&w.grid, &w.values, p)
}

pub(crate) fn lp_of<T: Real>(grid: &Grid<T>, values: &[Complex<T>], p: T) -> Result<T> {
    if p.is_nan() || p < T::one() {
        return Err(NlspError::Domain(format!("L^p norm needs p >= 1, got {p}")));
    }
    if p.is_infinite() {
        return Ok(linf_of(values));
    }
    let two = T::lit(2.0);
    let s = if p == two {
        values.iter().fold(T::zero(), |acc, c| acc + c.norm_sqr())
    } else {
        let half = p / two;
        values
            .iter()
            .fold(T::zero(), |acc, c| acc + c.norm_sqr().powf(half))
    };
    Ok((grid.cell_volume() * s).powf(T::one() / p))
}

pub(crate) fn linf_of<T: Real>(values: &[Complex<T>]) -> T {
    values.iter().fold(T::zero(), |acc, c| acc.max(c.norm()))
}

pub fn norm_linf<T: Real>(w: &WaveFunction<T>) -> T {
    linf_of(&w.values)
}

/// `||grad w||_{L^2}` evaluated in frequency space.
pub fn norm_grad_l2<T: Real>(w: &WaveFunction<T>) -> T {
    grad_sq_of(&w.grid, &w.values).sqrt()
}

pub(crate) fn grad_sq_of<T: Real>(grid: &Grid<T>, values: &[Complex<T>]) -> T {
    let mut spec = values.to_vec();
    grid.forward_in_place(&mut spec);
    let xi2: Vec<Vec<T>> = grid
        .frequency_tables()
        .into_iter()
        .map(|v| v.into_iter().map(|k| k * k).collect())
        .collect();
    let s = if grid.dim() == 1 {
        spec.iter()
            .zip(&xi2[0])
            .fold(T::zero(), |acc, (c, &k2)| acc + c.norm_sqr() * k2)
    } else {
        spec.iter().enumerate().fold(T::zero(), |acc, (flat, c)| {
            let idx = grid.multi_index(flat);
            let k2 = (0..grid.dim()).fold(T::zero(), |a, j| a + xi2[j][idx[j]]);
            acc + c.norm_sqr() * k2
        })
    };
    grid.cell_volume() * s
}

/// `|| |x| w ||_{L^2}`.
pub fn norm_x_l2<T: Real>(w: &WaveFunction<T>) -> T {
    x_sq_of(&w.grid, &w.values).sqrt()
}

pub(crate) fn x_sq_of<T: Real>(grid: &Grid<T>, values: &[Complex<T>]) -> T {
    let r2 = grid.sample_real(|x| x.iter().fold(T::zero(), |a, &xi| a + xi * xi));
    grid.cell_volume()
        * values
            .iter()
            .zip(&r2)
            .fold(T::zero(), |acc, (c, &r)| acc + c.norm_sqr() * r)
}

/// `||f||_Sigma = ||f|| + ||grad f|| + ||x f||`.
pub fn norm_sigma<T: Real>(w: &WaveFunction<T>) -> T {
    sigma_of(&w.grid, &w.values)
}

pub(crate) fn sigma_of<T: Real>(grid: &Grid<T>, values: &[Complex<T>]) -> T {
    grid.l2_norm_sq(values).sqrt() + grad_sq_of(grid, values).sqrt() + x_sq_of(grid, values).sqrt()
}

/// Fraction of `|u|^2` carried by the outer 10% of the box on any axis.
pub fn boundary_mass_fraction<T: Real>(w: &WaveFunction<T>) -> T {
    boundary_fraction_of(&w.grid, &w.values)
}

pub(crate) fn boundary_fraction_of<T: Real>(grid: &Grid<T>, values: &[Complex<T>]) -> T {
    let tables = grid.coordinate_tables();
    let cut: Vec<T> = grid
        .axes()
        .iter()
        .map(|a| a.half_width() * T::lit(0.9))
        .collect();
    let mut outer = T::zero();
    let mut total = T::zero();
    for (flat, c) in values.iter().enumerate() {
        let idx = grid.multi_index(flat);
        let m = c.norm_sqr();
        total = total + m;
        if (0..grid.dim()).any(|j| tables[j][idx[j]].abs() >= cut[j]) {
            outer = outer + m;
        }
    }
    if total > T::zero() {
        outer / total
    } else {
        T::zero()
    }
}

/// Fraction of spectral mass in the outer third of the frequency lattice
/// (any axis with `|k| > N/3`).
pub fn spectral_tail_fraction<T: Real>(w: &WaveFunction<T>) -> T {
    let mut spec = w.values.clone();
    w.grid.forward_in_place(&mut spec);
    let grid = &w.grid;
    let mut tail = T::zero();
    let mut total = T::zero();
    for (flat, c) in spec.iter().enumerate() {
        let idx = grid.multi_index(flat);
        let m = c.norm_sqr();
        total = total + m;
        let outer = (0..grid.dim()).any(|j| {
            let a = grid.axis(j);
            3 * a.signed_index(idx[j]).unsigned_abs() > a.points()
        });
        if outer {
            tail = tail + m;
        }
    }
    if total > T::zero() {
        tail / total
    } else {
        T::zero()
    }
}

/// Spectral gradient, one component per axis.
pub fn gradient<T: Real>(w: &WaveFunction<T>) -> Vec<Vec<Complex<T>>> {
    (0..w.dim()).map(|j| w.grid.partial(&w.values, j)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn rejects_bad_axes() {
        assert!(Grid::<f64>::new(1, 6, 1.0).is_err());
        assert!(Grid::<f64>::new(1, 4, 1.0).is_err());
        assert!(Grid::<f64>::new(1, 16, 0.0).is_err());
        assert!(Grid::<f64>::new(4, 16, 1.0).is_err());
        assert!(Grid::<f64>::new(0, 16, 1.0).is_err());
    }

    #[test]
    fn frequency_lattice_is_symmetric() {
        let g = Grid::<f64>::new(1, 16, 2.0).unwrap();
        let xi = g.axis(0).frequencies();
        assert_eq!(xi[0], 0.0);
        assert_relative_eq!(xi[1], std::f64::consts::PI / 2.0);
        assert_relative_eq!(xi[8], -8.0 * std::f64::consts::PI / 2.0);
        for k in 1..8 {
            assert_relative_eq!(xi[k], -xi[16 - k]);
        }
        assert_eq!(g.total_points(), 16);
        let g3 = Grid::<f64>::from_axes(&[(8, 1.0), (16, 2.0), (32, 3.0)]).unwrap();
        assert_eq!(g3.total_points(), 8 * 16 * 32);
        assert_eq!(g3.multi_index(16 * 32 + 3), [1, 0, 3]);
    }

    #[test]
    fn constant_has_single_zero_frequency() {
        let g = Grid::<f64>::new(1, 32, 4.0).unwrap();
        let w = WaveFunction::from_fn(g, 0.0, 1.0, |_| c(1.0, 0.0)).unwrap();
        let spec = forward_spectral(&w).unwrap();
        assert_relative_eq!(spec[0].re, (32.0f64).sqrt(), epsilon = 1e-12);
        for z in &spec[1..] {
            assert!(z.norm() < 1e-12);
        }
    }

    #[test]
    fn plane_wave_lands_in_one_bin() {
        // Direct summation oracle on 16 points.
        let n = 16;
        let g = Grid::<f64>::new(1, n, 3.0).unwrap();
        let xs = g.axis(0).coordinates();
        for k in [0usize, 1, 5, 8, 11, 15] {
            let xi = g.axis(0).frequencies()[k];
            let w = WaveFunction::from_fn(g.clone(), 0.0, 1.0, |x| Complex::from_polar(1.0, xi * x[0])).unwrap();
            let spec = forward_spectral(&w).unwrap();
            #[allow(clippy::needless_range_loop)]
            for m in 0..n {
                let direct: Complex<f64> = (0..n)
                    .map(|j| {
                        w.values()[j]
                            * Complex::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * m) as f64 / n as f64)
                    })
                    .sum::<Complex<f64>>()
                    / (n as f64).sqrt();
                assert!((direct - spec[m]).norm() < 1e-12);
            }
            let total: f64 = spec.iter().map(|z| z.norm_sqr()).sum();
            assert_relative_eq!(spec[k].norm_sqr() / total, 1.0, epsilon = 1e-13);
            let _ = &xs;
        }
    }

    #[test]
    fn round_trip() {
        let g = Grid::<f64>::from_axes(&[(16, 3.0), (32, 4.0)]).unwrap();
        let w = WaveFunction::from_fn(g.clone(), 0.0, 1.0, |x| {
            c((-x[0] * x[0]).exp() * (1.0 + x[1]).cos(), x[0] * (-x[1] * x[1]).exp())
        })
        .unwrap();
        let spec = forward_spectral(&w).unwrap();
        let back = inverse_spectral(&g, &spec).unwrap();
        let err: f64 = back.iter().zip(w.values()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let nrm: f64 = w.values().iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        assert!(err / nrm < 1e-13);
    }

    #[test]
    fn non_finite_is_corruption() {
        let g = Grid::<f64>::new(1, 8, 1.0).unwrap();
        let mut v = vec![c(0.0, 0.0); 8];
        v[3] = c(f64::NAN, 0.0);
        assert!(matches!(
            WaveFunction::new(g.clone(), v.clone(), 0.0, 1.0),
            Err(NlspError::NumericalCorruption(_))
        ));
        assert!(inverse_spectral(&g, &v).is_err());
    }

    #[test]
    fn gaussian_norms() {
        let g = Grid::<f64>::new(1, 1024, 12.0).unwrap();
        let w = WaveFunction::from_fn(g, 0.0, 1.0, |x| c((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap();
        let pi = std::f64::consts::PI;
        assert_relative_eq!(norm_l2(&w).powi(2), pi.sqrt(), epsilon = 1e-10);
        // ||f'||^2 = sqrt(pi)/2, ||x f||^2 = sqrt(pi)/2, ||f||_4^4 = sqrt(pi/2)
        assert_relative_eq!(norm_grad_l2(&w).powi(2), pi.sqrt() / 2.0, epsilon = 1e-10);
        assert_relative_eq!(norm_x_l2(&w).powi(2), pi.sqrt() / 2.0, epsilon = 1e-10);
        assert_relative_eq!(norm_lp(&w, 4.0).unwrap().powi(4), (pi / 2.0).sqrt(), epsilon = 1e-10);
        assert_relative_eq!(norm_lp(&w, f64::INFINITY).unwrap(), 1.0, epsilon = 1e-12);
        let s = norm_sigma(&w);
        assert_relative_eq!(s, norm_l2(&w) + norm_grad_l2(&w) + norm_x_l2(&w), epsilon = 1e-14);
        assert!(norm_lp(&w, 0.5).is_err());
    }

    #[test]
    fn zero_function_norms() {
        let g = Grid::<f64>::new(2, 16, 2.0).unwrap();
        let w = WaveFunction::from_fn(g, 0.0, 1.0, |_| c(0.0, 0.0)).unwrap();
        assert_eq!(norm_l2(&w), 0.0);
        assert_eq!(norm_grad_l2(&w), 0.0);
        assert_eq!(norm_x_l2(&w), 0.0);
        assert_eq!(norm_sigma(&w), 0.0);
        assert_eq!(norm_lp(&w, 3.0).unwrap(), 0.0);
        assert_eq!(norm_linf(&w), 0.0);
        assert_eq!(boundary_mass_fraction(&w), 0.0);
    }

    #[test]
    fn spectral_derivative_of_plane_wave() {
        let g = Grid::<f64>::new(1, 64, 5.0).unwrap();
        for k in [1usize, 7, 31, 32, 50] {
            let xi = g.axis(0).frequencies()[k];
            let w = WaveFunction::from_fn(g.clone(), 0.0, 1.0, |x| Complex::from_polar(1.0, xi * x[0])).unwrap();
            let d = g.partial(w.values(), 0);
            for (dv, v) in d.iter().zip(w.values()) {
                assert!((dv - c(0.0, xi) * v).norm() < 1e-11 * xi.abs().max(1.0));
            }
        }
    }

    #[test]
    fn shift_matches_translated_gaussian() {
        let g = Grid::<f64>::new(1, 256, 10.0).unwrap();
        let w = WaveFunction::from_fn(g.clone(), 0.0, 1.0, |x| c((-x[0] * x[0]).exp(), 0.0)).unwrap();
        let shifted = g.shift(w.values(), &[1.3]);
        let expect = g.sample(|x| c((-(x[0] + 1.3).powi(2)).exp(), 0.0));
        for (a, b) in shifted.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn f32_grid_works() {
        let g = Grid::<f32>::new(1, 256, 8.0).unwrap();
        let w = WaveFunction::from_fn(g, 0.0f32, 1.0f32, |x| Complex::new((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap();
        let pi = std::f32::consts::PI;
        assert!((norm_l2(&w).powi(2) - pi.sqrt()).abs() < 1e-5);
    }
}
