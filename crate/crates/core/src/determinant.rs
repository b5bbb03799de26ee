//! The path determinant functional on piecewise smooth paths of invertible
//! matrices: `(1/2 pi i) \int tau(xi'(t) xi(t)^{-1}) dt`, with a closed form
//! on linear segments and adaptive quadrature in general, plus the winding
//! invariant of an almost-commuting tuple.

use num_complex::Complex64;
use thiserror::Error;

use crate::groups::{commutator_defect, GroupError, UnitaryTuple};
use crate::matrix::{self, MatrixError, TracialMatrix};

/// Hard cap on quadrature panels before reporting a stall.
pub const MAX_PANELS: usize = 1 << 20;

/// Smallest admissible singular value along a path.
pub const PATH_SINGULARITY_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DeterminantError {
    #[error("segment leaves the invertible ball: ‖b a^-1 - 1‖ = {norm:.6} >= 1")]
    SegmentNotInvertible { norm: f64 },
    #[error("quadrature failed to reach tolerance within {panels} panels")]
    QuadratureStall { panels: usize },
    #[error("spectrum within {distance:.3e} of -1; winding undefined")]
    BranchCutHit { distance: f64 },
    #[error("sampled path times must strictly increase from 0 to 1")]
    BadSampleTimes,
    #[error("sampled path needs at least 4 samples, got {0}")]
    TooFewSamples(usize),
    #[error("path sample at t = {time} is singular (sigma_min = {sigma:.3e})")]
    SingularSample { time: f64, sigma: f64 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Real value of the path determinant together with the magnitude of the
/// discarded imaginary part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathDeterminant {
    pub value: f64,
    pub imaginary_residual: f64,
}

impl PathDeterminant {
    fn from_complex(z: Complex64) -> Self {
        PathDeterminant {
            value: z.re,
            imaginary_residual: z.im.abs(),
        }
    }
}

/// A path of invertible matrices on `[0, 1]`: either the linear segment
/// between two endpoints or a densely sampled path.
#[derive(Debug, Clone)]
pub enum MatrixPath {
    Linear {
        a: TracialMatrix,
        b: TracialMatrix,
    },
    Sampled {
        samples: Vec<(f64, TracialMatrix)>,
    },
}

impl MatrixPath {
    pub fn linear(a: TracialMatrix, b: TracialMatrix) -> Result<Self, DeterminantError> {
        matrix::assert_invertible(&a, PATH_SINGULARITY_FLOOR)?;
        matrix::assert_invertible(&b, PATH_SINGULARITY_FLOOR)?;
        Ok(MatrixPath::Linear { a, b })
    }

    /// Samples must strictly increase in time with endpoints 0 and 1; each
    /// sample is checked for invertibility.
    pub fn sampled(samples: Vec<(f64, TracialMatrix)>) -> Result<Self, DeterminantError> {
        if samples.len() < 4 {
            return Err(DeterminantError::TooFewSamples(samples.len()));
        }
        let first = samples.first().unwrap().0;
        let last = samples.last().unwrap().0;
        if first != 0.0 || last != 1.0 {
            return Err(DeterminantError::BadSampleTimes);
        }
        if samples.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(DeterminantError::BadSampleTimes);
        }
        for (time, m) in &samples {
            let sigma = m.smallest_singular_value();
            if sigma <= PATH_SINGULARITY_FLOOR {
                return Err(DeterminantError::SingularSample {
                    time: *time,
                    sigma,
                });
            }
        }
        Ok(MatrixPath::Sampled { samples })
    }
}

// ---------------------------------------------------------------------------
// Closed form on linear segments
// ---------------------------------------------------------------------------

/// Complex value `(1/2 pi i) tau(log(b a^-1))` of the linear segment from
/// `a` to `b`.
///
/// The eigenvalues of the segment `(1-t) + t b a^-1` are the chords from 1
/// to the eigenvalues of `b a^-1`, so the segment stays invertible and the
/// logarithm stays on its principal branch exactly when no eigenvalue of
/// `b a^-1` lies on the closed negative real axis. That is the precondition
/// enforced here; `‖b a^-1 - 1‖ < 1` is a special case.
pub fn dhs_linear_complex(
    a: &TracialMatrix,
    b: &TracialMatrix,
) -> Result<Complex64, DeterminantError> {
    let x = b.mul(&a.inverse()?);
    match matrix::principal_log(&x) {
        Ok(log) => Ok(log.normalized_trace() / Complex64::new(0.0, 2.0 * std::f64::consts::PI)),
        Err(MatrixError::SpectrumOnBranchCut { .. }) => {
            Err(DeterminantError::SegmentNotInvertible {
                norm: x.distance_to_identity(),
            })
        }
        Err(e) => Err(e.into()),
    }
}

/// Real part of the linear-segment determinant, with the imaginary residual
/// as diagnostics.
pub fn dhs_linear(
    a: &TracialMatrix,
    b: &TracialMatrix,
) -> Result<PathDeterminant, DeterminantError> {
    Ok(PathDeterminant::from_complex(dhs_linear_complex(a, b)?))
}

// ---------------------------------------------------------------------------
// Quadrature
// ---------------------------------------------------------------------------

/// Adaptive Simpson over a complex integrand with a panel budget.
pub(crate) fn adaptive_simpson(
    f: &mut dyn FnMut(f64) -> Result<Complex64, DeterminantError>,
    t0: f64,
    t1: f64,
    tolerance: f64,
) -> Result<Complex64, DeterminantError> {
    struct State {
        panels: usize,
    }
    fn simpson(fa: Complex64, fm: Complex64, fb: Complex64, h: f64) -> Complex64 {
        (fa + fm * 4.0 + fb) * (h / 6.0)
    }
    #[allow(clippy::too_many_arguments)]
    fn recurse(
        f: &mut dyn FnMut(f64) -> Result<Complex64, DeterminantError>,
        a: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: usize,
        state: &mut State,
    ) -> Result<Complex64, DeterminantError> {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm)?;
        let frm = f(rm)?;
        state.panels += 2;
        if state.panels > MAX_PANELS {
            return Err(DeterminantError::QuadratureStall {
                panels: state.panels,
            });
        }
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if delta.norm() <= 15.0 * tol || depth >= 48 {
            if depth >= 48 && delta.norm() > 15.0 * tol {
                return Err(DeterminantError::QuadratureStall {
                    panels: state.panels,
                });
            }
            return Ok(left + right + delta / 15.0);
        }
        let l = recurse(f, a, m, fa, flm, fm, left, tol * 0.5, depth + 1, state)?;
        let r = recurse(f, m, b, fm, frm, fb, right, tol * 0.5, depth + 1, state)?;
        Ok(l + r)
    }

    let mut state = State { panels: 3 };
    let fa = f(t0)?;
    let fm = f(0.5 * (t0 + t1))?;
    let fb = f(t1)?;
    let whole = simpson(fa, fm, fb, t1 - t0);
    recurse(f, t0, t1, fa, fm, fb, whole, tolerance, 0, &mut state)
}

/// Value and derivative of the cubic Lagrange interpolant through four
/// nodes, evaluated entrywise.
fn lagrange4(
    ts: [f64; 4],
    ms: [&TracialMatrix; 4],
    t: f64,
) -> (TracialMatrix, TracialMatrix) {
    let n = ms[0].dim();
    let mut weights = [0.0f64; 4];
    let mut dweights = [0.0f64; 4];
    for i in 0..4 {
        let mut w = 1.0;
        let mut denom = 1.0;
        for j in 0..4 {
            if j != i {
                w *= t - ts[j];
                denom *= ts[i] - ts[j];
            }
        }
        weights[i] = w / denom;
        // derivative of the product: sum over omitted factor
        let mut dw = 0.0;
        for j in 0..4 {
            if j == i {
                continue;
            }
            let mut prod = 1.0;
            for (k, &tk) in ts.iter().enumerate() {
                if k != i && k != j {
                    prod *= t - tk;
                }
            }
            dw += prod;
        }
        dweights[i] = dw / denom;
    }
    let mut value = TracialMatrix::zeros(n);
    let mut derivative = TracialMatrix::zeros(n);
    for i in 0..4 {
        value = value.add(&ms[i].scale(Complex64::new(weights[i], 0.0)));
        derivative = derivative.add(&ms[i].scale(Complex64::new(dweights[i], 0.0)));
    }
    (value, derivative)
}

/// Complex path determinant by adaptive quadrature of
/// `tau(xi' xi^-1)/(2 pi i)`. Linear paths use the exact derivative. Sampled
/// paths are interpolated by sliding local cubics and integrated interval by
/// interval: within each sample interval the interpolant is smooth, and its
/// contribution depends only on the endpoint samples, so refining the sample
/// grid refines the derivative data without moving the answer.
pub fn dhs_quadrature_complex(
    path: &MatrixPath,
    tolerance: f64,
) -> Result<Complex64, DeterminantError> {
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    match path {
        MatrixPath::Linear { a, b } => {
            let diff = b.sub(a);
            let mut f = |t: f64| -> Result<Complex64, DeterminantError> {
                let xi = a
                    .scale(Complex64::new(1.0 - t, 0.0))
                    .add(&b.scale(Complex64::new(t, 0.0)));
                let y = xi.solve(&diff)?;
                Ok(y.normalized_trace())
            };
            Ok(adaptive_simpson(&mut f, 0.0, 1.0, tolerance)? / two_pi_i)
        }
        MatrixPath::Sampled { samples } => {
            let n = samples.len();
            let intervals = n - 1;
            let mut total = Complex64::new(0.0, 0.0);
            for i in 0..intervals {
                let start = i.saturating_sub(1).min(n - 4);
                let ts = [
                    samples[start].0,
                    samples[start + 1].0,
                    samples[start + 2].0,
                    samples[start + 3].0,
                ];
                let ms = [
                    &samples[start].1,
                    &samples[start + 1].1,
                    &samples[start + 2].1,
                    &samples[start + 3].1,
                ];
                let mut f = |t: f64| -> Result<Complex64, DeterminantError> {
                    let (xi, dxi) = lagrange4(ts, ms, t);
                    let y = xi.solve(&dxi)?;
                    Ok(y.normalized_trace())
                };
                let (t0, t1) = (samples[i].0, samples[i + 1].0);
                total += adaptive_simpson(&mut f, t0, t1, tolerance * (t1 - t0))?;
            }
            Ok(total / two_pi_i)
        }
    }
}

/// Real part of the quadrature determinant with imaginary diagnostics; the
/// default absolute tolerance is `1e-10`.
pub fn dhs_quadrature(
    path: &MatrixPath,
    tolerance: f64,
) -> Result<PathDeterminant, DeterminantError> {
    Ok(PathDeterminant::from_complex(dhs_quadrature_complex(
        path, tolerance,
    )?))
}

// ---------------------------------------------------------------------------
// Winding invariant
// ---------------------------------------------------------------------------

/// `(1/2 pi i) tau(log prod_k [u_k, v_k])`: the winding invariant of an
/// almost-commuting tuple. Requires commutator defect below 2 and spectrum
/// of the commutator product away from -1.
pub fn winding_invariant(t: &UnitaryTuple) -> Result<PathDeterminant, DeterminantError> {
    let prod = t.commutator_product();
    let mut min_dist = f64::INFINITY;
    for lambda in prod.eigenvalues()? {
        min_dist = min_dist.min((lambda + Complex64::new(1.0, 0.0)).norm());
    }
    if min_dist < 1e-10 {
        return Err(DeterminantError::BranchCutHit { distance: min_dist });
    }
    let defect = commutator_defect(t);
    if defect >= 2.0 {
        return Err(DeterminantError::SegmentNotInvertible { norm: defect });
    }
    let log = matrix::principal_log(&prod)?;
    let z = log.normalized_trace() / Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    Ok(PathDeterminant::from_complex(z))
}

#[cfg(test)]
#[path = "determinant_tests.rs"]
mod determinant_tests;
