//! Matrix functions built on the Schur form: principal logarithm by inverse
//! scaling-and-squaring on the triangular factor, the half-plane Riesz
//! projector from a reordered Schur form, polar decomposition, and matrix
//! exponentials.

use num_complex::Complex64;

use super::decomp::{hermitian_eigen, reorder_schur, schur, sylvester_triangular};
use super::{MatrixError, RieszProjector, TracialMatrix, BRANCH_CUT_MIN, SPECTRAL_GAP_MIN};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// 8-point Gauss-Legendre nodes and weights on [0, 1]; integrating
/// `x/(1+sx)` against them yields the diagonal Pade approximant of
/// `log(1+x)`.
#[allow(clippy::excessive_precision)]
const GL8: [(f64, f64); 8] = [
    (0.019855071751231884, 0.050614268145188130),
    (0.101666761293186630, 0.111190517226687235),
    (0.237233795041835507, 0.156853322938943644),
    (0.408282678752175097, 0.181341891689180991),
    (0.591717321247824903, 0.181341891689180991),
    (0.762766204958164493, 0.156853322938943644),
    (0.898333238706813370, 0.111190517226687235),
    (0.980144928248768116, 0.050614268145188130),
];

/// Distance from `z` to the closed negative real axis `(-inf, 0]`.
fn branch_cut_distance(z: Complex64) -> f64 {
    if z.re <= 0.0 {
        z.im.abs()
    } else {
        z.norm()
    }
}

/// Principal square root of an upper triangular matrix by the recurrence of
/// Bjorck and Hammarling.
fn sqrt_triangular(t: &TracialMatrix) -> TracialMatrix {
    let n = t.dim();
    let mut r = TracialMatrix::zeros(n);
    for i in 0..n {
        r[(i, i)] = t[(i, i)].sqrt();
    }
    for offset in 1..n {
        for i in 0..n - offset {
            let j = i + offset;
            let mut s = ZERO;
            for k in i + 1..j {
                s += r[(i, k)] * r[(k, j)];
            }
            r[(i, j)] = (t[(i, j)] - s) / (r[(i, i)] + r[(j, j)]);
        }
    }
    r
}

/// `log(I + e)` for a strictly triangular-plus-small `e` with `‖e‖ <= 1/4`,
/// via the Gauss-Legendre form of the diagonal Pade approximant. All solves
/// are upper triangular.
fn log_near_identity_triangular(e: &TracialMatrix) -> TracialMatrix {
    let n = e.dim();
    let mut acc = TracialMatrix::zeros(n);
    for &(node, weight) in GL8.iter() {
        // solve (I + node * e) y = e, upper triangular
        let mut a = e.scale(Complex64::new(node, 0.0));
        for i in 0..n {
            a[(i, i)] += 1.0;
        }
        let mut y = TracialMatrix::zeros(n);
        for col in 0..n {
            for row in (0..n).rev() {
                let mut sum = e[(row, col)];
                for k in row + 1..n {
                    sum -= a[(row, k)] * y[(k, col)];
                }
                y[(row, col)] = sum / a[(row, row)];
            }
        }
        acc = acc.add(&y.scale(Complex64::new(weight, 0.0)));
    }
    acc
}

fn off_identity_norm(t: &TracialMatrix) -> f64 {
    let n = t.dim();
    let mut m = t.clone();
    for i in 0..n {
        m[(i, i)] -= 1.0;
    }
    m.one_norm()
}

pub fn principal_log(m: &TracialMatrix) -> Result<TracialMatrix, MatrixError> {
    let form = schur(m)?;
    for i in 0..m.dim() {
        let d = branch_cut_distance(form.t[(i, i)]);
        if d < BRANCH_CUT_MIN {
            return Err(MatrixError::SpectrumOnBranchCut { distance: d });
        }
    }
    let mut t = form.t.clone();
    let mut sqrts = 0u32;
    while off_identity_norm(&t) > 0.25 && sqrts < 60 {
        t = sqrt_triangular(&t);
        sqrts += 1;
    }
    let n = m.dim();
    let mut e = t;
    for i in 0..n {
        e[(i, i)] -= 1.0;
    }
    let log_t = log_near_identity_triangular(&e).scale(Complex64::new(f64::powi(2.0, sqrts as i32), 0.0));
    Ok(form.q.mul(&log_t).mul(&form.q.adjoint()))
}

pub fn riesz_half_plane(m: &TracialMatrix) -> Result<RieszProjector, MatrixError> {
    let mut form = schur(m)?;
    let n = m.dim();
    let gap = (0..n)
        .map(|i| (form.t[(i, i)].re - 0.5).abs())
        .fold(f64::INFINITY, f64::min);
    if gap < SPECTRAL_GAP_MIN {
        return Err(MatrixError::SpectralGapTooSmall { gap });
    }
    let p = reorder_schur(&mut form, |z| z.re > 0.5);
    let projector = if p == 0 {
        TracialMatrix::zeros(n)
    } else if p == n {
        TracialMatrix::identity(n)
    } else {
        let q = n - p;
        let t11 = TracialMatrix::from_fn(p, |i, j| form.t[(i, j)]);
        let t22 = TracialMatrix::from_fn(q, |i, j| form.t[(p + i, p + j)]);
        let c: Vec<Vec<Complex64>> = (0..p)
            .map(|i| (0..q).map(|j| form.t[(i, p + j)]).collect())
            .collect();
        let x = sylvester_triangular(&t11, &t22, &c);
        let mut pt = TracialMatrix::zeros(n);
        for i in 0..p {
            pt[(i, i)] = Complex64::new(1.0, 0.0);
            for j in 0..q {
                pt[(i, p + j)] = x[i][j];
            }
        }
        form.q.mul(&pt).mul(&form.q.adjoint())
    };
    Ok(RieszProjector {
        source: m.clone(),
        projector,
        gap,
        rank: p,
    })
}

/// Scaled Newton iteration for the unitary polar factor: converges
/// quadratically and keeps full unitarity even at large condition numbers,
/// where the Gram-matrix route would lose half the digits.
pub fn polar_unitary(m: &TracialMatrix) -> Result<TracialMatrix, MatrixError> {
    let sigma_min = m.smallest_singular_value();
    if sigma_min < 1e-12 {
        return Err(MatrixError::SingularInput { sigma_min });
    }
    let mut u = m.clone();
    for _ in 0..60 {
        let inv = u.inverse()?;
        let inv_adj = inv.adjoint();
        // balance by the (1, inf)-norm estimate of the singular spectrum
        let gamma = ((inv.one_norm() * inv_adj.one_norm())
            / (u.one_norm() * u.adjoint().one_norm()))
        .sqrt()
        .sqrt();
        let next = u
            .scale(Complex64::new(gamma * 0.5, 0.0))
            .add(&inv_adj.scale(Complex64::new(0.5 / gamma, 0.0)));
        let delta = next.sub(&u).one_norm();
        u = next;
        if delta <= 1e-14 * u.one_norm() {
            break;
        }
    }
    // one unscaled polishing step
    let inv_adj = u.inverse()?.adjoint();
    Ok(u.add(&inv_adj).scale(Complex64::new(0.5, 0.0)))
}

pub fn exp(m: &TracialMatrix) -> TracialMatrix {
    let norm = m.one_norm();
    let s = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let b = m.scale(Complex64::new(f64::powi(2.0, -s), 0.0));
    let n = m.dim();
    let mut sum = TracialMatrix::identity(n);
    let mut term = TracialMatrix::identity(n);
    for k in 1..=40 {
        term = term.mul(&b).scale(Complex64::new(1.0 / k as f64, 0.0));
        sum = sum.add(&term);
        if term.one_norm() <= f64::EPSILON * sum.one_norm() {
            break;
        }
    }
    let mut out = sum;
    for _ in 0..s {
        out = out.mul(&out);
    }
    out
}

pub fn exp_skew_hermitian(s: &TracialMatrix) -> TracialMatrix {
    // -i s is Hermitian; exp(s) = V diag(exp(i lambda)) V*
    let h = s.scale(Complex64::new(0.0, -1.0));
    let eig = hermitian_eigen(&h);
    let n = s.dim();
    let phases = TracialMatrix::from_fn(n, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, eig.values[i])
        } else {
            ZERO
        }
    });
    eig.vectors.mul(&phases).mul(&eig.vectors.adjoint())
}

/// Spectrum check used by path preconditions: smallest singular value via the
/// LU pivot estimate is too crude, so this goes through the Gram eigenvalues.
pub fn assert_invertible(m: &TracialMatrix, floor: f64) -> Result<(), MatrixError> {
    let sigma = m.smallest_singular_value();
    if sigma <= floor {
        return Err(MatrixError::SingularInput { sigma_min: sigma });
    }
    Ok(())
}
