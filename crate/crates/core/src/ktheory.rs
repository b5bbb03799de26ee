//! The three computable realizations of the push-forward pairing and their
//! cross-checks: the winding invariant `W`, the simplicial determinant sum
//! `S` over the labeled triangulation, the genus-one Bott-type invariant
//! `kappa`, and the bundle-side diagnostics (almost-idempotent fields,
//! locally constant rank, boundary-integral quadrature).

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use thiserror::Error;

use crate::determinant::{
    dhs_linear_complex, dhs_quadrature_complex, winding_invariant, DeterminantError, MatrixPath,
};
use crate::groups::{
    build_surface_group, commutator_defect, GroupError, UnitaryTuple,
};
use crate::matrix::{riesz_half_plane, MatrixError, TracialMatrix};
use crate::surface::{
    build_complex, edge_labels, interpolation_coefficient, orientation_signs,
    partition_of_unity_at, triangle_transitions, EdgeLabeling, SurfaceComplex, SurfaceError,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum KTheoryError {
    #[error("input is not unitary: ‖u*u - 1‖ = {defect:.3e}")]
    NotUnitary { defect: f64 },
    #[error("inputs have dimensions {left} and {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("triangle {triangle}: transition segment leaves the invertible ball (‖x - 1‖ = {norm:.6})")]
    SimplexSegmentNotInvertible { triangle: usize, norm: f64 },
    #[error("almost-idempotent residual {residual:.6} is not below 1/4; push-forward undefined")]
    PushForwardUndefined { residual: f64 },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Determinant(#[from] DeterminantError),
}

// ---------------------------------------------------------------------------
// Bott projection
// ---------------------------------------------------------------------------

/// The almost-idempotent `e(u, v)` built from a unitary pair, with its
/// idempotency residual and the measured spectral gap at `Re z = 1/2`.
#[derive(Debug, Clone)]
pub struct BottProjectionData {
    pub u: TracialMatrix,
    pub v: TracialMatrix,
    pub matrix: TracialMatrix,
    pub idempotency_residual: f64,
}

/// Chord functions on the circle, parameterized by `t in [0, 1)` with
/// `z = e^{2 pi i t}`: `f` is the tent map rising from 0 at `z = 1` to 1 at
/// `z = -1` and back, `g` carries `sqrt(f - f^2)` on the first half, `h` on
/// the second. Then `g h = 0`, `g^2 + h^2 = f - f^2` and
/// `f(1) = g(1) = h(1) = 0`. The full rise to 1 matters: a shallower tent
/// never passes through the rank-one pole at `z = -1` and the resulting
/// family carries no index (measured: the clock/shift invariant collapses
/// to 0).
fn chord_functions(t: f64) -> (f64, f64, f64) {
    let f = if t <= 0.5 { 2.0 * t } else { 2.0 - 2.0 * t };
    let root = (f - f * f).max(0.0).sqrt();
    if t <= 0.5 {
        (f, root, 0.0)
    } else {
        (f, 0.0, root)
    }
}

fn circle_parameter(z: Complex64) -> f64 {
    let theta = z.im.atan2(z.re);
    let t = theta / (2.0 * PI);
    if t < 0.0 {
        t + 1.0
    } else {
        t
    }
}

fn check_unitary(m: &TracialMatrix) -> Result<(), KTheoryError> {
    let defect = m.unitarity_defect();
    if defect > 1e-10 {
        return Err(KTheoryError::NotUnitary { defect });
    }
    Ok(())
}

/// Applies the three chord functions to `v` by spectral calculus.
fn chord_calculus(
    v: &TracialMatrix,
) -> Result<(TracialMatrix, TracialMatrix, TracialMatrix), KTheoryError> {
    let form = v.schur()?;
    let n = v.dim();
    let mut fd = TracialMatrix::zeros(n);
    let mut gd = TracialMatrix::zeros(n);
    let mut hd = TracialMatrix::zeros(n);
    for i in 0..n {
        let (f, g, h) = chord_functions(circle_parameter(form.t[(i, i)]));
        fd[(i, i)] = Complex64::new(f, 0.0);
        gd[(i, i)] = Complex64::new(g, 0.0);
        hd[(i, i)] = Complex64::new(h, 0.0);
    }
    let qs = form.q.adjoint();
    Ok((
        form.q.mul(&fd).mul(&qs),
        form.q.mul(&gd).mul(&qs),
        form.q.mul(&hd).mul(&qs),
    ))
}

/// Builds the self-adjoint `2n x 2n` matrix
/// `[[f(v), g(v) + h(v) u*], [g(v) + u h(v), 1 - f(v)]]`.
pub fn bott_projection(
    u: &TracialMatrix,
    v: &TracialMatrix,
) -> Result<BottProjectionData, KTheoryError> {
    if u.dim() != v.dim() {
        return Err(KTheoryError::DimensionMismatch {
            left: u.dim(),
            right: v.dim(),
        });
    }
    check_unitary(u)?;
    check_unitary(v)?;
    let n = u.dim();
    let (fv, gv, hv) = chord_calculus(v)?;
    let upper_right = gv.add(&hv.mul(&u.adjoint()));
    let lower_left = gv.add(&u.mul(&hv));
    let mut e = TracialMatrix::zeros(2 * n);
    for i in 0..n {
        for j in 0..n {
            e[(i, j)] = fv[(i, j)];
            e[(i, n + j)] = upper_right[(i, j)];
            e[(n + i, j)] = lower_left[(i, j)];
            e[(n + i, n + j)] = -fv[(i, j)];
        }
        e[(n + i, n + i)] += 1.0;
    }
    let idempotency_residual = e.mul(&e).sub(&e).operator_norm();
    Ok(BottProjectionData {
        u: u.clone(),
        v: v.clone(),
        matrix: e,
        idempotency_residual,
    })
}

/// The Bott-type invariant of a unitary pair: trace of the half-plane
/// spectral projector of `e(u, v)`, minus `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaValue {
    pub value: f64,
    pub rounded: i64,
    pub rounding_residual: f64,
    /// Spectral gap of `e(u, v)` at `Re z = 1/2`.
    pub gap: f64,
}

/// Minimum spectral gap demanded of the Bott matrix before the projector
/// trace is trusted.
pub const KAPPA_GAP_MIN: f64 = 1e-6;

pub fn kappa_invariant(
    u: &TracialMatrix,
    v: &TracialMatrix,
) -> Result<KappaValue, KTheoryError> {
    let data = bott_projection(u, v)?;
    let r = riesz_half_plane(&data.matrix)?;
    if r.gap < KAPPA_GAP_MIN {
        return Err(KTheoryError::Matrix(MatrixError::SpectralGapTooSmall {
            gap: r.gap,
        }));
    }
    let n = u.dim() as f64;
    let trace = r.projector.trace();
    let value = trace.re - n;
    let rounded = value.round() as i64;
    Ok(KappaValue {
        value,
        rounded,
        rounding_residual: (value - rounded as f64).abs().max(trace.im.abs()),
        gap: r.gap,
    })
}

// ---------------------------------------------------------------------------
// Simplicial determinant sum
// ---------------------------------------------------------------------------

/// One triangle's contribution to the simplicial sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexTerm {
    pub triangle: usize,
    pub sign: u8,
    pub value: f64,
    pub imaginary_residual: f64,
}

#[derive(Debug, Clone)]
pub struct SimplicialSum {
    pub total: f64,
    pub terms: Vec<SimplexTerm>,
}

/// `S = sum_sigma (-1)^{s(sigma)} * Delta(xi_sigma)` with `xi_sigma` the
/// linear path from `pi(s_ik)` to `pi(s_ij) pi(s_jk)`, summed in triangle
/// order for reproducibility. Per-simplex terms are returned for diagnostics.
pub fn simplicial_pushforward(
    complex: &SurfaceComplex,
    labels: &EdgeLabeling,
    tuple: &UnitaryTuple,
) -> Result<SimplicialSum, KTheoryError> {
    let signs = orientation_signs(complex)?;
    let mut terms = Vec::with_capacity(complex.triangles().len());
    let mut total = 0.0f64;
    for (idx, sign_entry) in signs.iter().enumerate() {
        let trans = triangle_transitions(complex, labels, tuple, idx)?;
        let z = dhs_linear_complex(&trans.min_max, &trans.product).map_err(|e| match e {
            DeterminantError::SegmentNotInvertible { norm } => {
                KTheoryError::SimplexSegmentNotInvertible {
                    triangle: idx,
                    norm,
                }
            }
            other => other.into(),
        })?;
        let sign = sign_entry.sign;
        let signed = if sign == 0 { z.re } else { -z.re };
        total += signed;
        terms.push(SimplexTerm {
            triangle: idx,
            sign,
            value: signed,
            imaginary_residual: z.im.abs(),
        });
    }
    Ok(SimplicialSum { total, terms })
}

// ---------------------------------------------------------------------------
// Bundle fields
// ---------------------------------------------------------------------------

/// The bundle field at a barycentric point of a triangle, built from the
/// interpolating transition functions and restricted to the active `3 x 3`
/// block grid (blocks ordered by the triangle's sorted vertices; the ambient
/// matrix is this block grid embedded at those vertex indices, zero
/// elsewhere).
///
/// The collar of the transition functions is matched to the support cutoff
/// of the partition of unity, so this field is an exact idempotent up to
/// rounding error at every interior point, whatever the commutator defect:
/// the middle weight vanishes wherever the interpolation is still under way.
pub fn e_pi_at(
    complex: &SurfaceComplex,
    labels: &EdgeLabeling,
    tuple: &UnitaryTuple,
    triangle: usize,
    bary: &[f64; 3],
) -> Result<TracialMatrix, KTheoryError> {
    let n = tuple.dim();
    let trans = triangle_transitions(complex, labels, tuple, triangle)?;
    let weights = partition_of_unity_at(bary);
    let sq: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    // interpolated long transition, driven by the middle barycentric
    // coordinate: constant near the barycenter level, linear below
    let s = interpolation_coefficient(3.0 * bary[1]);
    debug_assert!((0.0..=1.0).contains(&s));
    let v02 = trans
        .min_max
        .scale(Complex64::new(1.0 - s, 0.0))
        .add(&trans.product.scale(Complex64::new(s, 0.0)));
    let identity = TracialMatrix::identity(n);
    let v01 = trans.min_mid;
    let v12 = trans.mid_max;
    let v10 = v01.inverse()?;
    let v21 = v12.inverse()?;
    let v20 = v02.inverse()?;
    let blocks: [[&TracialMatrix; 3]; 3] = [
        [&identity, &v01, &v02],
        [&v10, &identity, &v12],
        [&v20, &v21, &identity],
    ];
    let mut out = TracialMatrix::zeros(3 * n);
    for r in 0..3 {
        for c in 0..3 {
            let w = sq[r] * sq[c];
            if w == 0.0 {
                continue;
            }
            let block = blocks[r][c];
            for i in 0..n {
                for j in 0..n {
                    out[(r * n + i, c * n + j)] = block[(i, j)] * w;
                }
            }
        }
    }
    Ok(out)
}

/// The push-forward field at a barycentric point: block `(i, j)` is
/// `chi_i^{1/2} chi_j^{1/2} pi(s_ij)` with constant labels. This is the image
/// of the bundle idempotent under the quasi-representation; it is only almost
/// idempotent, with residual controlled by the commutator defect, and its
/// half-plane projector realizes the push-forward at each point.
pub fn pushforward_field_at(
    complex: &SurfaceComplex,
    labels: &EdgeLabeling,
    tuple: &UnitaryTuple,
    triangle: usize,
    bary: &[f64; 3],
) -> Result<TracialMatrix, KTheoryError> {
    let n = tuple.dim();
    let trans = triangle_transitions(complex, labels, tuple, triangle)?;
    let weights = partition_of_unity_at(bary);
    let sq: Vec<f64> = weights.iter().map(|w| w.sqrt()).collect();
    let identity = TracialMatrix::identity(n);
    let v01 = trans.min_mid;
    let v12 = trans.mid_max;
    let v02 = trans.min_max;
    let v10 = v01.adjoint();
    let v21 = v12.adjoint();
    let v20 = v02.adjoint();
    let blocks: [[&TracialMatrix; 3]; 3] = [
        [&identity, &v01, &v02],
        [&v10, &identity, &v12],
        [&v20, &v21, &identity],
    ];
    let mut out = TracialMatrix::zeros(3 * n);
    for r in 0..3 {
        for c in 0..3 {
            let w = sq[r] * sq[c];
            if w == 0.0 {
                continue;
            }
            let block = blocks[r][c];
            for i in 0..n {
                for j in 0..n {
                    out[(r * n + i, c * n + j)] = block[(i, j)] * w;
                }
            }
        }
    }
    Ok(out)
}

/// Result of sampling the push-forward field: the worst idempotency residual
/// and the worst deviation of the projector trace from the fiber dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BundleCheck {
    pub samples: usize,
    pub max_idempotency_residual: f64,
    pub max_rank_deviation: f64,
}

fn random_barycentric(rng: &mut ChaCha8Rng) -> [f64; 3] {
    // normalized exponentials give the uniform distribution on the simplex
    let mut x = [0.0f64; 3];
    let mut total = 0.0;
    for xi in &mut x {
        let u: f64 = rng.gen_range(1e-12..1.0);
        *xi = -u.ln();
        total += *xi;
    }
    [x[0] / total, x[1] / total, x[2] / total]
}

/// Samples the push-forward field at random interior points: each sample
/// must stay within the push-forward regime (idempotency residual below
/// 1/4), and the rank of its half-plane projector must be the fiber
/// dimension everywhere.
pub fn bundle_rank_check(
    complex: &SurfaceComplex,
    labels: &EdgeLabeling,
    tuple: &UnitaryTuple,
    samples: usize,
    seed: u64,
) -> Result<BundleCheck, KTheoryError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = tuple.dim() as f64;
    let mut max_residual = 0.0f64;
    let mut max_dev = 0.0f64;
    for _ in 0..samples {
        let triangle = rng.gen_range(0..complex.triangles().len());
        let bary = random_barycentric(&mut rng);
        let e = pushforward_field_at(complex, labels, tuple, triangle, &bary)?;
        let residual = e.mul(&e).sub(&e).operator_norm();
        max_residual = max_residual.max(residual);
        if residual >= 0.25 {
            return Err(KTheoryError::PushForwardUndefined { residual });
        }
        let r = riesz_half_plane(&e)?;
        let trace = r.projector.trace();
        let dev = (trace - Complex64::new(n, 0.0)).norm();
        max_dev = max_dev.max(dev);
    }
    Ok(BundleCheck {
        samples,
        max_idempotency_residual: max_residual,
        max_rank_deviation: max_dev,
    })
}

/// Cross-validates the quadrature of `tau(v^-1 dv)` along a triangle's
/// interpolating segment against the closed-form path determinant; returns
/// the absolute discrepancy of the two `(2 pi i)`-normalized values.
pub fn boundary_integral_check(
    complex: &SurfaceComplex,
    labels: &EdgeLabeling,
    tuple: &UnitaryTuple,
    triangle: usize,
    tolerance: f64,
) -> Result<f64, KTheoryError> {
    let trans = triangle_transitions(complex, labels, tuple, triangle)?;
    let closed = dhs_linear_complex(&trans.min_max, &trans.product)?;
    let path = MatrixPath::linear(trans.min_max, trans.product)?;
    let quad = dhs_quadrature_complex(&path, tolerance)?;
    Ok((quad - closed).norm())
}

// ---------------------------------------------------------------------------
// Verification report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Tolerance on `|S - W|`.
    pub tol_sw: f64,
    /// Tolerance on `|kappa - dim * W|` at genus one.
    pub tol_kw: f64,
    /// Tolerance on the integrality of `dim * W`.
    pub tol_quant: f64,
    /// Absolute tolerance handed to quadrature cross-checks.
    pub quad_tol: f64,
    /// Random field samples for the rank check; 0 disables the bundle pass.
    pub bundle_samples: usize,
    pub bundle_seed: u64,
    /// Run the per-simplex boundary-integral quadrature cross-check.
    pub check_boundary: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol_sw: 1e-8,
            tol_kw: 1e-6,
            tol_quant: 1e-8,
            quad_tol: 1e-10,
            bundle_samples: 100,
            bundle_seed: 0xB077,
            check_boundary: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdicts {
    pub sw_error: f64,
    pub sw_ok: bool,
    pub tol_sw: f64,
    pub kw_error: Option<f64>,
    pub kw_ok: Option<bool>,
    pub tol_kw: f64,
    pub quant_error: f64,
    pub quant_ok: bool,
    pub tol_quant: f64,
}

impl Verdicts {
    pub fn all_pass(&self) -> bool {
        self.sw_ok && self.kw_ok.unwrap_or(true) && self.quant_ok
    }
}

/// Full record of one verification run: the defect, all computed invariants,
/// per-simplex diagnostics and pass/fail verdicts at the stated tolerances.
#[derive(Debug, Clone)]
pub struct InvariantReport {
    pub genus: usize,
    pub dim: usize,
    pub family: String,
    pub defect: f64,
    pub winding: f64,
    pub winding_imag_residual: f64,
    pub simplicial: f64,
    pub per_simplex_terms: Vec<SimplexTerm>,
    pub kappa: Option<KappaValue>,
    /// Set when the Bott matrix spectrum met the line `Re z = 1/2` closer
    /// than the gap precondition allows, so the invariant is undefined; the
    /// value is the measured gap. Happens only at resonant phases with
    /// commutator defect well above the small-defect regime.
    pub kappa_undefined_gap: Option<f64>,
    pub bundle: Option<BundleCheck>,
    pub boundary_residual_max: Option<f64>,
    pub verdicts: Verdicts,
}

/// Computes every invariant of the tuple against a freshly built complex.
pub fn verify(
    tuple: &UnitaryTuple,
    family: &str,
    options: &VerifyOptions,
) -> Result<InvariantReport, KTheoryError> {
    let g = tuple.genus();
    let sg = build_surface_group(g);
    let complex = build_complex(g);
    let labels = edge_labels(&complex, &sg)?;
    verify_with(&complex, &labels, tuple, family, options)
}

/// As [`verify`], reusing an already built complex and labeling.
pub fn verify_with(
    complex: &SurfaceComplex,
    labels: &EdgeLabeling,
    tuple: &UnitaryTuple,
    family: &str,
    options: &VerifyOptions,
) -> Result<InvariantReport, KTheoryError> {
    let defect = commutator_defect(tuple);
    let w = winding_invariant(tuple)?;
    let s = simplicial_pushforward(complex, labels, tuple)?;

    let mut kappa_undefined_gap = None;
    let kappa = if tuple.genus() == 1 {
        match kappa_invariant(tuple.u(1), tuple.v(1)) {
            Ok(k) => Some(k),
            Err(KTheoryError::Matrix(MatrixError::SpectralGapTooSmall { gap })) => {
                kappa_undefined_gap = Some(gap);
                None
            }
            Err(e) => return Err(e),
        }
    } else {
        None
    };

    let bundle = if options.bundle_samples > 0 {
        Some(bundle_rank_check(
            complex,
            labels,
            tuple,
            options.bundle_samples,
            options.bundle_seed,
        )?)
    } else {
        None
    };

    let boundary_residual_max = if options.check_boundary {
        let mut max_res = 0.0f64;
        for idx in 0..complex.triangles().len() {
            max_res =
                max_res.max(boundary_integral_check(complex, labels, tuple, idx, options.quad_tol)?);
        }
        Some(max_res)
    } else {
        None
    };

    let sw_error = (s.total - w.value).abs();
    let dim_w = tuple.dim() as f64 * w.value;
    let quant_error = (dim_w - dim_w.round()).abs();
    let kw_error = kappa.as_ref().map(|k| (k.value - dim_w).abs());
    let verdicts = Verdicts {
        sw_error,
        sw_ok: sw_error <= options.tol_sw,
        tol_sw: options.tol_sw,
        kw_error,
        kw_ok: kw_error.map(|e| e <= options.tol_kw),
        tol_kw: options.tol_kw,
        quant_error,
        quant_ok: quant_error <= options.tol_quant,
        tol_quant: options.tol_quant,
    };

    Ok(InvariantReport {
        genus: tuple.genus(),
        dim: tuple.dim(),
        family: family.to_string(),
        defect,
        winding: w.value,
        winding_imag_residual: w.imaginary_residual,
        simplicial: s.total,
        per_simplex_terms: s.terms,
        kappa,
        kappa_undefined_gap,
        bundle,
        boundary_residual_max,
        verdicts,
    })
}

#[cfg(test)]
#[path = "ktheory_tests.rs"]
mod ktheory_tests;
