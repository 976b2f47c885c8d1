//! Exact gauge and lens transforms between solutions with different
//! potentials.
//!
//! Every map here acts on a time series of states and rewrites both the
//! values and the time stamp, so the output series can be compared point by
//! point with a direct solve. Spatial shifts are spectral phase shifts and
//! spatial dilations go through [`crate::resample`]; both are exact on
//! band-limited data, and each map refuses inputs it cannot represent on
//! the grid instead of silently aliasing.

use num_complex::Complex;

use crate::error::{NlspError, Result};
use crate::grid::{Grid, WaveFunction};
use crate::resample::{resample, AffineLattice};
use crate::scalar::Real;
use crate::solver::Nonlinearity;

/// Largest mass fraction a shift may wrap around the periodic box, and
/// the largest fraction a dilation may push out of the output box.
pub const BOUNDARY_MASS_LIMIT: f64 = 1e-8;
/// Largest spectral mass fraction a dilation may push past the Nyquist
/// frequency of the output grid.
pub const ALIASING_LIMIT: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RescaleDirection {
    /// `u^eps(t, x) -> psi(s, y) = eps^{n/2} u^eps(t0 + eps s, eps y)`.
    ToProfile,
    /// `psi(s, y) -> u^eps(t, x) = eps^{-n/2} psi((t - t0)/eps, x/eps)`.
    ToSemiclassical,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TransformSpec<T> {
    AvronHerbst { field: Vec<T> },
    HarmonicLens { omega: T },
    RepulsiveLens { omega: T },
    PlaneOscillation { xi0: Vec<T> },
    SemiclassicalRescale { epsilon: T, t0: T, direction: RescaleDirection },
}

impl<T: Real> TransformSpec<T> {
    pub fn kind(&self) -> &'static str {
        match self {
            TransformSpec::AvronHerbst { .. } => "avron_herbst",
            TransformSpec::HarmonicLens { .. } => "harmonic_lens",
            TransformSpec::RepulsiveLens { .. } => "repulsive_lens",
            TransformSpec::PlaneOscillation { .. } => "plane_oscillation",
            TransformSpec::SemiclassicalRescale { .. } => "semiclassical_rescale",
        }
    }

    /// Check the parameters and, for the lenses, the nonlinearity.
    pub fn validate(&self, nl: &Nonlinearity<T>) -> Result<()> {
        match self {
            TransformSpec::AvronHerbst { field } => finite_vector(field, "field"),
            TransformSpec::PlaneOscillation { xi0 } => finite_vector(xi0, "xi0"),
            TransformSpec::HarmonicLens { omega } | TransformSpec::RepulsiveLens { omega } => {
                positive(*omega, "omega")?;
                require_conformal(nl)
            }
            TransformSpec::SemiclassicalRescale { epsilon, t0, .. } => {
                positive(*epsilon, "epsilon")?;
                if t0.is_finite() {
                    Ok(())
                } else {
                    Err(NlspError::Domain("t0 must be finite".into()))
                }
            }
        }
    }

    pub fn apply(&self, series: &[WaveFunction<T>], nl: &Nonlinearity<T>) -> Result<Vec<WaveFunction<T>>> {
        self.validate(nl)?;
        match self {
            TransformSpec::AvronHerbst { field } => avron_herbst(series, field),
            TransformSpec::HarmonicLens { omega } => harmonic_lens(series, *omega, nl),
            TransformSpec::RepulsiveLens { omega } => repulsive_lens(series, *omega, nl, None),
            TransformSpec::PlaneOscillation { xi0 } => plane_oscillation_gauge(series, xi0),
            TransformSpec::SemiclassicalRescale { epsilon, t0, direction } => series
                .iter()
                .map(|w| semiclassical_rescale(w, *epsilon, *t0, *direction))
                .collect(),
        }
    }
}

fn finite_vector<T: Real>(v: &[T], name: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(NlspError::Domain(format!("{name} must be finite")))
    }
}

fn positive<T: Real>(x: T, name: &str) -> Result<()> {
    if x > T::zero() && x.is_finite() {
        Ok(())
    } else {
        Err(NlspError::Domain(format!("{name} must be positive, got {x}")))
    }
}

/// The lens identities hold for the linear equation and for `sigma = 2/n`.
fn require_conformal<T: Real>(nl: &Nonlinearity<T>) -> Result<()> {
    if nl.is_linear() || nl.l2_critical() {
        Ok(())
    } else {
        Err(NlspError::Domain(format!(
            "lens transforms need sigma = 2/n (sigma = {}, n = {})",
            nl.sigma, nl.dim
        )))
    }
}

fn require_dim<T: Real>(w: &WaveFunction<T>, v: &[T]) -> Result<()> {
    if v.len() == w.dim() {
        Ok(())
    } else {
        Err(NlspError::Domain(format!(
            "vector of length {} for a {}-dimensional state",
            v.len(),
            w.dim()
        )))
    }
}

/// Mass fraction of `shifted` (sampled at `x + offset`) whose source point
/// lies outside the box and was therefore wrapped around.
fn wrapped_fraction<T: Real>(grid: &Grid<T>, shifted: &[Complex<T>], offset: &[T]) -> T {
    let coords = grid.coordinate_tables();
    let mut wrapped = T::zero();
    let mut total = T::zero();
    for (flat, v) in shifted.iter().enumerate() {
        let m = v.norm_sqr();
        total = total + m;
        let idx = grid.multi_index(flat);
        let outside = (0..grid.dim()).any(|j| {
            let l = grid.axis(j).half_width();
            let s = coords[j][idx[j]] + offset[j];
            s < -l || s >= l
        });
        if outside {
            wrapped = wrapped + m;
        }
    }
    if total > T::zero() {
        wrapped / total
    } else {
        T::zero()
    }
}

/// `v(x + offset)` with a guard on the mass carried across the boundary.
fn guarded_shift<T: Real>(w: &WaveFunction<T>, offset: &[T]) -> Result<Vec<Complex<T>>> {
    let shifted = w.grid().shift(w.values(), offset);
    let fraction = wrapped_fraction(w.grid(), &shifted, offset);
    if fraction > T::lit(BOUNDARY_MASS_LIMIT) {
        return Err(NlspError::BoundaryMass {
            fraction: fraction.as_f64(),
            limit: BOUNDARY_MASS_LIMIT,
        });
    }
    Ok(shifted)
}

/// A plane wave `exp(i k.x / eps)` must stay below the Nyquist frequency.
fn require_resolved_momentum<T: Real>(grid: &Grid<T>, momentum: &[T], epsilon: T) -> Result<()> {
    for (a, &k) in grid.axes().iter().zip(momentum) {
        if (k / epsilon).abs() >= a.nyquist() {
            return Err(NlspError::Resolution(format!(
                "momentum {k} at eps = {epsilon} exceeds the grid Nyquist frequency {}",
                a.nyquist()
            )));
        }
    }
    Ok(())
}

/// Free solution `v` to the solution `u` with the Stark potential
/// `V(x) = E.x`:
/// `u(t, x) = v(t, x + t^2 E/2) exp(-i (t E.x + t^3 |E|^2/6) / eps)`.
pub fn avron_herbst<T: Real>(series: &[WaveFunction<T>], field: &[T]) -> Result<Vec<WaveFunction<T>>> {
    let half = T::lit(0.5);
    let sixth = T::one() / T::lit(6.0);
    series
        .iter()
        .map(|v| {
            require_dim(v, field)?;
            let t = v.time();
            let eps = v.epsilon();
            let offset: Vec<T> = field.iter().map(|&e| t * t * half * e).collect();
            let momentum: Vec<T> = field.iter().map(|&e| -t * e).collect();
            require_resolved_momentum(v.grid(), &momentum, eps)?;
            let mut values = guarded_shift(v, &offset)?;
            let e_sq = field.iter().fold(T::zero(), |a, &e| a + e * e);
            let constant = t * t * t * e_sq * sixth;
            let coords = v.grid().coordinate_tables();
            let grid = v.grid();
            for (flat, val) in values.iter_mut().enumerate() {
                let idx = grid.multi_index(flat);
                let ex = (0..grid.dim()).fold(T::zero(), |a, j| a + field[j] * coords[j][idx[j]]);
                *val = *val * Complex::from_polar(T::one(), -(t * ex + constant) / eps);
            }
            WaveFunction::new(grid.clone(), values, t, eps)
        })
        .collect()
}

/// `c^{-n/2} exp(i kappa |x|^2 / (2 eps)) v(x / c)` on `out`, where the
/// chirp is applied before (`chirp_first`) or after the dilation.
fn dilate_with_chirp<T: Real>(
    v: &WaveFunction<T>,
    out: &Grid<T>,
    scale: T,
    kappa: T,
    chirp_first: bool,
) -> Result<Vec<Complex<T>>> {
    let eps = v.epsilon();
    let half = T::lit(0.5);
    let chirp = |grid: &Grid<T>, values: &mut [Complex<T>]| {
        let factors: Vec<Vec<Complex<T>>> = grid
            .axes()
            .iter()
            .map(|a| {
                a.coordinates()
                    .into_iter()
                    .map(|x| Complex::from_polar(T::one(), kappa * x * x * half / eps))
                    .collect()
            })
            .collect();
        grid.multiply_separable(values, &factors);
    };
    let chirp_grid = if chirp_first { v.grid() } else { out };
    let sampling = chirp_grid
        .axes()
        .iter()
        .map(|a| kappa.abs() * a.half_width() * a.spacing() / eps)
        .fold(T::zero(), |a, b| a.max(b));
    if sampling >= T::PI() {
        return Err(NlspError::Resolution(format!(
            "lens chirp is under-sampled (|kappa| L h / eps = {sampling})"
        )));
    }

    let mut src = v.values().to_vec();
    if chirp_first {
        chirp(v.grid(), &mut src);
    }
    // Frequencies of v(x / c) are those of v divided by c.
    let mut spec = src.clone();
    v.grid().forward_in_place(&mut spec);
    let total = spec.iter().fold(T::zero(), |a, c| a + c.norm_sqr());
    let freqs = v.grid().frequency_tables();
    let aliased = spec.iter().enumerate().fold(T::zero(), |a, (flat, c)| {
        let idx = v.grid().multi_index(flat);
        let beyond = (0..v.dim()).any(|j| (freqs[j][idx[j]] / scale).abs() > out.axis(j).nyquist());
        if beyond {
            a + c.norm_sqr()
        } else {
            a
        }
    });
    if total > T::zero() && aliased / total > T::lit(ALIASING_LIMIT) {
        return Err(NlspError::Resolution(format!(
            "dilation by {scale} aliases a spectral fraction {}",
            aliased / total
        )));
    }

    let lattice = AffineLattice::dilation(out, scale);
    let mut values = resample(v.grid(), &src, out, &lattice)?;
    let amplitude = scale.abs().powf(-T::lit(0.5) * T::from_usize_exact(v.dim()));
    for c in values.iter_mut() {
        *c = *c * amplitude;
    }
    if !chirp_first {
        chirp(out, &mut values);
    }
    let before = v.grid().l2_norm_sq(v.values());
    let after = out.l2_norm_sq(&values);
    if before > T::zero() {
        let lost = T::one() - after / before;
        if lost > T::lit(BOUNDARY_MASS_LIMIT) {
            return Err(NlspError::BoundaryMass {
                fraction: lost.as_f64(),
                limit: BOUNDARY_MASS_LIMIT,
            });
        }
    }
    Ok(values)
}

/// Free solution `v` (sampled at warped times `tau`) to the solution with
/// `V = omega^2 |x|^2 / 2`:
/// `u(t, x) = cos(wt)^{-n/2} exp(-i w |x|^2 tan(wt) / (2 eps)) v(tan(wt)/w, x / cos(wt))`,
/// with `t = atan(w tau) / w`.
pub fn harmonic_lens<T: Real>(
    series: &[WaveFunction<T>],
    omega: T,
    nl: &Nonlinearity<T>,
) -> Result<Vec<WaveFunction<T>>> {
    positive(omega, "omega")?;
    require_conformal(nl)?;
    series
        .iter()
        .map(|v| {
            let t = (omega * v.time()).atan() / omega;
            let (s, c) = (omega * t).sin_cos();
            let kappa = -omega * s / c;
            let values = dilate_with_chirp(v, v.grid(), c, kappa, false)?;
            WaveFunction::new(v.grid().clone(), values, t, v.epsilon())
        })
        .collect()
}

/// Inverse of [`harmonic_lens`]: harmonic-potential states at times
/// `|t| < pi/(2 omega)` to free states at `tau = tan(omega t) / omega`.
pub fn harmonic_lens_inverse<T: Real>(
    series: &[WaveFunction<T>],
    omega: T,
    nl: &Nonlinearity<T>,
) -> Result<Vec<WaveFunction<T>>> {
    positive(omega, "omega")?;
    require_conformal(nl)?;
    series
        .iter()
        .map(|u| {
            let t = u.time();
            if (omega * t).abs() >= T::FRAC_PI_2() {
                return Err(NlspError::Domain(format!(
                    "harmonic lens is undefined at t = {t} (needs |t| < pi/(2 omega))"
                )));
            }
            let (s, c) = (omega * t).sin_cos();
            let values = dilate_with_chirp(u, u.grid(), c.recip(), omega * s / c, true)?;
            WaveFunction::new(u.grid().clone(), values, (s / c) / omega, u.epsilon())
        })
        .collect()
}

/// Free solution `v` (sampled at warped times `tau < 1/omega`) to the
/// solution with `V = -omega^2 |x|^2 / 2`:
/// `u(t, x) = cosh(wt)^{-n/2} exp(i w |x|^2 tanh(wt) / (2 eps)) v(tanh(wt)/w, x / cosh(wt))`,
/// with `t = atanh(w tau) / w`. The output lives on `out` (default: the
/// input grid); the repulsive flow spreads the state by `cosh(wt)`.
pub fn repulsive_lens<T: Real>(
    series: &[WaveFunction<T>],
    omega: T,
    nl: &Nonlinearity<T>,
    out: Option<&Grid<T>>,
) -> Result<Vec<WaveFunction<T>>> {
    positive(omega, "omega")?;
    require_conformal(nl)?;
    series
        .iter()
        .map(|v| {
            let x = omega * v.time();
            if x.abs() >= T::one() {
                return Err(NlspError::Domain(format!(
                    "repulsive lens needs |tau| < 1/omega, got tau = {}",
                    v.time()
                )));
            }
            let t = x.atanh() / omega;
            let grid = out.unwrap_or(v.grid());
            if grid.dim() != v.dim() {
                return Err(NlspError::Domain("output grid dimension differs".into()));
            }
            let c = (omega * t).cosh();
            let values = dilate_with_chirp(v, grid, c, omega * (omega * t).tanh(), false)?;
            WaveFunction::new(grid.clone(), values, t, v.epsilon())
        })
        .collect()
}

/// Inverse of [`repulsive_lens`].
pub fn repulsive_lens_inverse<T: Real>(
    series: &[WaveFunction<T>],
    omega: T,
    nl: &Nonlinearity<T>,
    out: Option<&Grid<T>>,
) -> Result<Vec<WaveFunction<T>>> {
    positive(omega, "omega")?;
    require_conformal(nl)?;
    series
        .iter()
        .map(|u| {
            let t = u.time();
            let grid = out.unwrap_or(u.grid());
            if grid.dim() != u.dim() {
                return Err(NlspError::Domain("output grid dimension differs".into()));
            }
            let c = (omega * t).cosh();
            let tanh = (omega * t).tanh();
            let values = dilate_with_chirp(u, grid, c.recip(), -omega * tanh, true)?;
            WaveFunction::new(grid.clone(), values, tanh / omega, u.epsilon())
        })
        .collect()
}

/// Maps the solution with datum `f` under `V = |x|^2/2` to the solution with
/// datum `f exp(i x.xi0 / eps)`:
/// `u(t, x - xi0 sin t) exp(i (x - xi0 sin t / 2).xi0 cos t / eps)`.
pub fn plane_oscillation_gauge<T: Real>(series: &[WaveFunction<T>], xi0: &[T]) -> Result<Vec<WaveFunction<T>>> {
    let half = T::lit(0.5);
    series
        .iter()
        .map(|u| {
            require_dim(u, xi0)?;
            let t = u.time();
            let eps = u.epsilon();
            let (s, c) = t.sin_cos();
            let momentum: Vec<T> = xi0.iter().map(|&k| k * c).collect();
            require_resolved_momentum(u.grid(), &momentum, eps)?;
            let offset: Vec<T> = xi0.iter().map(|&k| -k * s).collect();
            let mut values = guarded_shift(u, &offset)?;
            let grid = u.grid();
            let coords = grid.coordinate_tables();
            for (flat, val) in values.iter_mut().enumerate() {
                let idx = grid.multi_index(flat);
                let phase = (0..grid.dim()).fold(T::zero(), |a, j| {
                    a + (coords[j][idx[j]] - xi0[j] * s * half) * xi0[j] * c
                });
                *val = *val * Complex::from_polar(T::one(), phase / eps);
            }
            WaveFunction::new(grid.clone(), values, t, eps)
        })
        .collect()
}

/// Exact relabelling between the semiclassical frame (`eps`, box `L`) and
/// the profile frame (`eps = 1`, box `L / eps`, same points). Mass is
/// preserved; the semiclassical grid must resolve the `eps` scale with at
/// least eight cells.
pub fn semiclassical_rescale<T: Real>(
    w: &WaveFunction<T>,
    epsilon: T,
    t0: T,
    direction: RescaleDirection,
) -> Result<WaveFunction<T>> {
    positive(epsilon, "epsilon")?;
    let n = T::from_usize_exact(w.dim());
    let (axes, factor, time, out_eps) = match direction {
        RescaleDirection::ToProfile => {
            let axes: Vec<(usize, T)> = w
                .grid()
                .axes()
                .iter()
                .map(|a| (a.points(), a.half_width() / epsilon))
                .collect();
            (axes, epsilon.powf(n * T::lit(0.5)), (w.time() - t0) / epsilon, T::one())
        }
        RescaleDirection::ToSemiclassical => {
            let axes: Vec<(usize, T)> = w
                .grid()
                .axes()
                .iter()
                .map(|a| (a.points(), a.half_width() * epsilon))
                .collect();
            (axes, epsilon.powf(-n * T::lit(0.5)), t0 + epsilon * w.time(), epsilon)
        }
    };
    let grid = Grid::from_axes(&axes)?;
    let semiclassical = match direction {
        RescaleDirection::ToProfile => w.grid(),
        RescaleDirection::ToSemiclassical => &grid,
    };
    let h = semiclassical.max_spacing();
    if epsilon < T::lit(8.0) * h {
        return Err(NlspError::Resolution(format!(
            "eps = {epsilon} is below eight grid cells (h = {h})"
        )));
    }
    let values = w.values().iter().map(|v| v * factor).collect();
    WaveFunction::new(grid, values, time, out_eps)
}
