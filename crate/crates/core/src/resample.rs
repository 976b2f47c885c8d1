//! Evaluation of the trigonometric interpolant of gridded data on an affine
//! lattice of points, via Bluestein's chirp-z algorithm.
//!
//! This is the rescaling primitive behind the lens transforms: sampling
//! `v(x / c)` on an output grid is the affine lattice `start + p * step`
//! with `start = x_0 / c` and `step = h / c`. Points outside the source box
//! are set to zero; callers guard the discarded mass.

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{NlspError, Result};
use crate::grid::{Axis, Grid};
use crate::scalar::Real;

/// Evaluate the interpolant of one line of samples on `src` at
/// `start + p * step`, `p = 0..count`.
pub fn resample_line<T: Real>(
    values: &[Complex<T>],
    src: &Axis<T>,
    start: T,
    step: T,
    count: usize,
) -> Vec<Complex<T>> {
    let n = src.points();
    assert_eq!(values.len(), n);
    if count == 0 {
        return Vec::new();
    }
    let zero = Complex::new(T::zero(), T::zero());
    let half = n / 2;
    let l = src.half_width();
    let kappa = src.frequency_step();

    let mut planner = FftPlanner::<T>::new();
    let mut spec = values.to_vec();
    planner.plan_fft_forward(n).process(&mut spec);

    // Coefficients for signed frequencies m = -N/2 ..= N/2, the Nyquist bin
    // split evenly between its two aliases so real data stays real.
    let inv_n = T::one() / T::from_usize_exact(n);
    // Output index p is evaluated as p - p0, so the phase origin sits at the
    // lattice point p0.
    let p0 = (count / 2) as isize;
    let origin = start + step * T::from_isize(p0).unwrap() + l;
    let terms = n + 1;
    let mut coeff = vec![zero; terms];
    for (q, c) in coeff.iter_mut().enumerate() {
        let m = q as isize - half as isize;
        let bin = m.rem_euclid(n as isize) as usize;
        let mut v = spec[bin] * inv_n;
        if m.unsigned_abs() == half {
            v = v * T::lit(0.5);
        }
        let mf = T::from_isize(m).unwrap();
        *c = v * Complex::from_polar(T::one(), kappa * mf * origin);
    }

    // sum_m C_m e^{i theta m p}, with p centered to keep chirp arguments small.
    let theta = kappa * step;
    let m_lo = -(half as isize);
    let d_min = -p0 - half as isize;
    let conv_len = terms + count - 1;
    let size = conv_len.next_power_of_two();
    let half_theta = theta * T::lit(0.5);
    let chirp = |k: isize| {
        let kf = T::from_isize(k).unwrap();
        Complex::from_polar(T::one(), half_theta * kf * kf)
    };

    let mut a = vec![zero; size];
    for (q, c) in coeff.iter().enumerate() {
        a[q] = *c * chirp(q as isize + m_lo);
    }
    let mut b = vec![zero; size];
    for (k, slot) in b.iter_mut().enumerate().take(conv_len) {
        *slot = chirp(d_min + k as isize).conj();
    }
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x = *x * *y;
    }
    inv.process(&mut a);
    let scale = T::one() / T::from_usize_exact(size);

    let lo = -l;
    (0..count)
        .map(|p| {
            let pc = p as isize - p0;
            let y = start + step * T::from_usize_exact(p);
            if y < lo || y > l {
                return zero;
            }
            // index of p in the linear convolution: p + (terms - 1)
            a[p + terms - 1] * scale * chirp(pc)
        })
        .collect()
}

/// Affine map `x -> start_j + p * step_j` per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineLattice<T> {
    pub start: Vec<T>,
    pub step: Vec<T>,
}

impl<T: Real> AffineLattice<T> {
    /// Lattice sampling `v(x / scale)` at the points of `out`.
    pub fn dilation(out: &Grid<T>, scale: T) -> Self {
        let start = out.axes().iter().map(|a| -a.half_width() / scale).collect();
        let step = out.axes().iter().map(|a| a.spacing() / scale).collect();
        Self { start, step }
    }
}

/// Sample the interpolant of `values` (on `src`) at the lattice points of
/// `out` given by `lattice`, one axis at a time.
pub fn resample<T: Real>(
    src: &Grid<T>,
    values: &[Complex<T>],
    out: &Grid<T>,
    lattice: &AffineLattice<T>,
) -> Result<Vec<Complex<T>>> {
    if src.dim() != out.dim() || lattice.start.len() != src.dim() || lattice.step.len() != src.dim() {
        return Err(NlspError::Domain("resampling dimension mismatch".into()));
    }
    let mut shape = src.shape();
    let mut data = values.to_vec();
    for j in 0..src.dim() {
        let n_in = shape[j];
        let n_out = out.axis(j).points();
        let inner: usize = shape[j + 1..].iter().product();
        let outer: usize = shape[..j].iter().product();
        let mut next = vec![Complex::new(T::zero(), T::zero()); outer * n_out * inner];
        let mut line = vec![Complex::new(T::zero(), T::zero()); n_in];
        for o in 0..outer {
            for s in 0..inner {
                for k in 0..n_in {
                    line[k] = data[(o * n_in + k) * inner + s];
                }
                let res = resample_line(&line, src.axis(j), lattice.start[j], lattice.step[j], n_out);
                for (k, v) in res.into_iter().enumerate() {
                    next[(o * n_out + k) * inner + s] = v;
                }
            }
        }
        shape[j] = n_out;
        data = next;
    }
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_lattice_reproduces_samples() {
        let g = Grid::<f64>::new(1, 64, 6.0).unwrap();
        let v = g.sample(|x| Complex::new((-x[0] * x[0]).exp(), x[0] * (-x[0] * x[0]).exp()));
        let a = g.axis(0);
        let out = resample_line(&v, a, -6.0, a.spacing(), 64);
        for (x, y) in out.iter().zip(&v) {
            assert!((x - y).norm() < 1e-13, "{x} {y}");
        }
    }

    #[test]
    fn dilation_matches_closed_form() {
        let g = Grid::<f64>::new(1, 256, 10.0).unwrap();
        let f = |x: f64| Complex::new((-x * x / 2.0).exp(), 0.0) * Complex::from_polar(1.0, 0.7 * x);
        let v = g.sample(|x| f(x[0]));
        for scale in [0.4, 0.9, 1.7] {
            let out = Grid::<f64>::new(1, 128, 7.0).unwrap();
            let lat = AffineLattice::dilation(&out, scale);
            let r = resample(&g, &v, &out, &lat).unwrap();
            let expect = out.sample(|x| {
                let y = x[0] / scale;
                if y.abs() > 10.0 {
                    Complex::new(0.0, 0.0)
                } else {
                    f(y)
                }
            });
            for (a, b) in r.iter().zip(&expect) {
                assert!((a - b).norm() < 1e-11, "scale {scale}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn two_dimensional_dilation() {
        let g = Grid::<f64>::from_axes(&[(64, 8.0), (64, 8.0)]).unwrap();
        let f = |x: &[f64]| Complex::new((-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 2.0).exp(), 0.0);
        let v = g.sample(f);
        let lat = AffineLattice::dilation(&g, 1.3);
        let r = resample(&g, &v, &g, &lat).unwrap();
        let expect = g.sample(|x| f(&[x[0] / 1.3, x[1] / 1.3]));
        for (a, b) in r.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-11);
        }
    }
}
