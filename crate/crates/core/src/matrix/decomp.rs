//! Dense factorizations: LU with partial pivoting, a cyclic Jacobi solver for
//! Hermitian matrices, Householder reduction to Hessenberg form, the shifted
//! QR iteration producing the complex Schur form, and eigenvalue reordering
//! within a Schur form by unitary adjacent swaps.

use num_complex::Complex64;

use super::{MatrixError, TracialMatrix};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

// ---------------------------------------------------------------------------
// LU with partial pivoting
// ---------------------------------------------------------------------------

pub struct LuFactors {
    lu: TracialMatrix,
    perm: Vec<usize>,
    pub sigma_min_estimate: f64,
}

/// Factors `m = P L U`; fails when a pivot falls below a tiny absolute floor.
pub fn lu_factor(m: &TracialMatrix) -> Result<LuFactors, MatrixError> {
    let n = m.dim();
    let mut lu = m.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = m.max_abs().max(1e-300);
    let mut min_pivot = f64::INFINITY;
    for k in 0..n {
        let mut p = k;
        let mut best = lu[(k, k)].norm();
        for i in k + 1..n {
            let v = lu[(i, k)].norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best < 1e-300 * scale.max(1.0) {
            return Err(MatrixError::SingularInput { sigma_min: best });
        }
        min_pivot = min_pivot.min(best);
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            perm.swap(k, p);
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for j in k + 1..n {
                let v = lu[(k, j)];
                lu[(i, j)] -= factor * v;
            }
        }
    }
    Ok(LuFactors {
        lu,
        perm,
        sigma_min_estimate: min_pivot / scale.max(1.0),
    })
}

impl LuFactors {
    pub fn solve_matrix(&self, rhs: &TracialMatrix) -> TracialMatrix {
        let n = self.lu.dim();
        assert_eq!(n, rhs.dim(), "dimension mismatch in solve");
        let mut x = TracialMatrix::zeros(n);
        // apply permutation to rhs rows
        for (i, &pi) in self.perm.iter().enumerate() {
            for j in 0..n {
                x[(i, j)] = rhs[(pi, j)];
            }
        }
        // forward substitution (unit lower)
        for col in 0..n {
            for i in 0..n {
                let mut sum = x[(i, col)];
                for k in 0..i {
                    sum -= self.lu[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = sum;
            }
            // back substitution
            for i in (0..n).rev() {
                let mut sum = x[(i, col)];
                for k in i + 1..n {
                    sum -= self.lu[(i, k)] * x[(k, col)];
                }
                x[(i, col)] = sum / self.lu[(i, i)];
            }
        }
        x
    }
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition (cyclic Jacobi)
// ---------------------------------------------------------------------------

pub struct HermitianEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the corresponding eigenvectors.
    pub vectors: TracialMatrix,
}

/// Cyclic Jacobi iteration for a Hermitian matrix. The input is symmetrized
/// first, so slightly non-Hermitian inputs are tolerated.
pub fn hermitian_eigen(m: &TracialMatrix) -> HermitianEigen {
    let n = m.dim();
    let mut h = TracialMatrix::from_fn(n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let mut v = TracialMatrix::identity(n);
    let norm = h.frobenius_norm().max(1e-300);
    let tol = f64::EPSILON * norm;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off += h[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let b = h[(p, q)];
                let babs = b.norm();
                if babs <= tol * 1e-2 / (n as f64) {
                    continue;
                }
                let phase = b / babs;
                let a = h[(p, p)].re;
                let d = h[(q, q)].re;
                let tau = (d - a) / (2.0 * babs);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sigma = phase * (t * c);
                // columns: col_p' = c col_p - conj(sigma) col_q ; col_q' = sigma col_p + c col_q
                for i in 0..n {
                    let hip = h[(i, p)];
                    let hiq = h[(i, q)];
                    h[(i, p)] = hip * c - hiq * sigma.conj();
                    h[(i, q)] = hip * sigma + hiq * c;
                    let vip = v[(i, p)];
                    let viq = v[(i, q)];
                    v[(i, p)] = vip * c - viq * sigma.conj();
                    v[(i, q)] = vip * sigma + viq * c;
                }
                // rows: row_p' = c row_p - sigma row_q ; row_q' = conj(sigma) row_p + c row_q
                for j in 0..n {
                    let hpj = h[(p, j)];
                    let hqj = h[(q, j)];
                    h[(p, j)] = hpj * c - hqj * sigma;
                    h[(q, j)] = hpj * sigma.conj() + hqj * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| h[(i, i)].re.partial_cmp(&h[(j, j)].re).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| h[(i, i)].re).collect();
    let vectors = TracialMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    HermitianEigen { values, vectors }
}

// ---------------------------------------------------------------------------
// Schur decomposition
// ---------------------------------------------------------------------------

/// Complex Schur form `a = q t q*` with `t` upper triangular and `q` unitary.
#[derive(Clone)]
pub struct SchurForm {
    pub q: TracialMatrix,
    pub t: TracialMatrix,
}

impl SchurForm {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.t.dim()).map(|i| self.t[(i, i)]).collect()
    }

    /// Reconstructs `q t q*`.
    pub fn reconstruct(&self) -> TracialMatrix {
        self.q.mul(&self.t).mul(&self.q.adjoint())
    }
}

fn householder_hessenberg(a: &mut TracialMatrix, q: &mut TracialMatrix) {
    let n = a.dim();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let mut x: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let norm_x = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm_x < 1e-300 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 { x[0] / x[0].norm() } else { ONE };
        let alpha = -phase * norm_x;
        x[0] -= alpha;
        let vnorm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if vnorm < 1e-300 {
            continue;
        }
        let v: Vec<Complex64> = x.iter().map(|z| z / vnorm).collect();
        // left: rows k+1..n, columns k..n   (A <- (I - 2 v v*) A)
        for j in k..n {
            let mut dot = ZERO;
            for (idx, i) in (k + 1..n).enumerate() {
                dot += v[idx].conj() * a[(i, j)];
            }
            let dot2 = dot * 2.0;
            for (idx, i) in (k + 1..n).enumerate() {
                a[(i, j)] -= v[idx] * dot2;
            }
        }
        // right: all rows, columns k+1..n  (A <- A (I - 2 v v*))
        for i in 0..n {
            let mut dot = ZERO;
            for (idx, j) in (k + 1..n).enumerate() {
                dot += a[(i, j)] * v[idx];
            }
            let dot2 = dot * 2.0;
            for (idx, j) in (k + 1..n).enumerate() {
                a[(i, j)] -= dot2 * v[idx].conj();
            }
        }
        // accumulate Q <- Q (I - 2 v v*)
        for i in 0..n {
            let mut dot = ZERO;
            for (idx, j) in (k + 1..n).enumerate() {
                dot += q[(i, j)] * v[idx];
            }
            let dot2 = dot * 2.0;
            for (idx, j) in (k + 1..n).enumerate() {
                q[(i, j)] -= dot2 * v[idx].conj();
            }
        }
    }
}

/// Complex Givens pair `(c, s)` with `c` real such that
/// `[c, s; -conj(s), c] [a; b] = [r; 0]`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64, Complex64) {
    let anorm = a.norm();
    let bnorm = b.norm();
    if bnorm == 0.0 {
        return (1.0, ZERO, a);
    }
    if anorm == 0.0 {
        return (0.0, b.conj() / bnorm, Complex64::new(bnorm, 0.0));
    }
    let r = (anorm * anorm + bnorm * bnorm).sqrt();
    let alpha = a / anorm;
    let c = anorm / r;
    let s = alpha * b.conj() / r;
    (c, s, alpha * r)
}

/// Wilkinson shift: eigenvalue of the trailing 2x2 block closest to its
/// bottom-right entry.
fn wilkinson_shift(t: &TracialMatrix, m: usize) -> Complex64 {
    if m == 0 {
        return t[(0, 0)];
    }
    let a = t[(m - 1, m - 1)];
    let b = t[(m - 1, m)];
    let c = t[(m, m - 1)];
    let d = t[(m, m)];
    let tr = a + d;
    let det = a * d - b * c;
    let disc = (tr * tr - det * 4.0).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Shifted QR iteration on the Hessenberg form; returns the Schur factors.
pub fn schur(a: &TracialMatrix) -> Result<SchurForm, MatrixError> {
    let n = a.dim();
    let mut t = a.clone();
    let mut q = TracialMatrix::identity(n);
    householder_hessenberg(&mut t, &mut q);

    let max_total = 60 * n.max(4);
    let mut total_iters = 0usize;
    let mut m = n.saturating_sub(1);
    let mut stall = 0usize;
    // norm-wise deflation floor: clusters of near-zero eigenvalues would
    // otherwise never satisfy a purely local threshold
    let scale = t.one_norm().max(1e-300);

    while m > 0 {
        // deflate negligible subdiagonals
        let mut l = m;
        while l > 0 {
            let sub = t[(l, l - 1)].norm();
            let local = t[(l - 1, l - 1)].norm() + t[(l, l)].norm();
            if sub <= f64::EPSILON * local.max(scale) {
                t[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == m {
            m -= 1;
            stall = 0;
            continue;
        }

        total_iters += 1;
        stall += 1;
        if total_iters > max_total {
            return Err(MatrixError::ConvergenceFailed {
                iterations: total_iters,
            });
        }
        let mu = if stall.is_multiple_of(12) {
            // exceptional shift to break symmetric stalls
            let off = t[(m, m - 1)].norm() + if m > 1 { t[(m - 1, m - 2)].norm() } else { 0.0 };
            t[(m, m)] + Complex64::new(off, 0.0)
        } else {
            wilkinson_shift(&t, m)
        };

        // explicit shifted QR step on the active block l..=m
        for i in l..=m {
            t[(i, i)] -= mu;
        }
        let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(m - l);
        for i in l..m {
            let (c, s, r) = givens(t[(i, i)], t[(i + 1, i)]);
            t[(i, i)] = r;
            t[(i + 1, i)] = ZERO;
            for j in i + 1..n {
                let x = t[(i, j)];
                let y = t[(i + 1, j)];
                t[(i, j)] = x * c + y * s;
                t[(i + 1, j)] = -x * s.conj() + y * c;
            }
            rots.push((c, s));
        }
        for (idx, i) in (l..m).enumerate() {
            let (c, s) = rots[idx];
            // right-multiply by G*: col_i' = c col_i + conj(s) col_{i+1}; col_{i+1}' = -s col_i + c col_{i+1}
            let top = (i + 2).min(m) + 1;
            for r in 0..top.min(n) {
                let x = t[(r, i)];
                let y = t[(r, i + 1)];
                t[(r, i)] = x * c + y * s.conj();
                t[(r, i + 1)] = -x * s + y * c;
            }
            for r in 0..n {
                let x = q[(r, i)];
                let y = q[(r, i + 1)];
                q[(r, i)] = x * c + y * s.conj();
                q[(r, i + 1)] = -x * s + y * c;
            }
        }
        for i in l..=m {
            t[(i, i)] += mu;
        }
    }

    // scrub the strictly lower part left over from deflation thresholds
    for i in 1..n {
        for j in 0..i {
            t[(i, j)] = ZERO;
        }
    }
    Ok(SchurForm { q, t })
}

// ---------------------------------------------------------------------------
// Schur reordering
// ---------------------------------------------------------------------------

/// Swaps the adjacent diagonal entries `j, j+1` of an upper triangular `t` by
/// a unitary similarity, updating `q` accordingly.
fn swap_adjacent(t: &mut TracialMatrix, q: &mut TracialMatrix, j: usize) {
    let n = t.dim();
    let a = t[(j, j)];
    let b = t[(j, j + 1)];
    let d = t[(j + 1, j + 1)];
    // eigenvector of [[a, b],[0, d]] for eigenvalue d is (b, d - a)
    let v0 = b;
    let v1 = d - a;
    let r = (v0.norm_sqr() + v1.norm_sqr()).sqrt();
    let (g00, g01, g10, g11);
    if r < 1e-300 {
        // equal eigenvalues and no coupling: plain transposition
        g00 = ZERO;
        g01 = ONE;
        g10 = -ONE;
        g11 = ZERO;
    } else {
        g00 = v0 / r;
        g10 = v1 / r;
        g01 = -(v1 / r).conj();
        g11 = (v0 / r).conj();
    }
    // T <- G* T G on rows/cols j, j+1
    for col in 0..n {
        let x = t[(j, col)];
        let y = t[(j + 1, col)];
        t[(j, col)] = g00.conj() * x + g10.conj() * y;
        t[(j + 1, col)] = g01.conj() * x + g11.conj() * y;
    }
    for row in 0..n {
        let x = t[(row, j)];
        let y = t[(row, j + 1)];
        t[(row, j)] = x * g00 + y * g10;
        t[(row, j + 1)] = x * g01 + y * g11;
        let qx = q[(row, j)];
        let qy = q[(row, j + 1)];
        q[(row, j)] = qx * g00 + qy * g10;
        q[(row, j + 1)] = qx * g01 + qy * g11;
    }
    t[(j + 1, j)] = ZERO;
}

/// Reorders a Schur form so that eigenvalues selected by `select` occupy the
/// leading diagonal positions; returns the number selected.
pub fn reorder_schur(
    form: &mut SchurForm,
    mut select: impl FnMut(Complex64) -> bool,
) -> usize {
    let n = form.t.dim();
    let mut target = 0usize;
    for i in 0..n {
        if select(form.t[(i, i)]) {
            let mut pos = i;
            while pos > target {
                swap_adjacent(&mut form.t, &mut form.q, pos - 1);
                pos -= 1;
            }
            target += 1;
        }
    }
    target
}

/// Solves the triangular Sylvester equation `t11 x - x t22 = c` by forward
/// substitution over columns; `t11` (p×p) and `t22` (q×q) are upper
/// triangular with disjoint spectra.
pub fn sylvester_triangular(
    t11: &TracialMatrix,
    t22: &TracialMatrix,
    c: &[Vec<Complex64>],
) -> Vec<Vec<Complex64>> {
    let p = t11.dim();
    let qd = t22.dim();
    let mut x = vec![vec![ZERO; qd]; p];
    for j in 0..qd {
        // rhs_j = c[:, j] + sum_{i<j} t22[i][j] x[:, i]
        let mut rhs: Vec<Complex64> = (0..p).map(|r| c[r][j]).collect();
        for i in 0..j {
            let w = t22[(i, j)];
            if w.norm_sqr() == 0.0 {
                continue;
            }
            for r in 0..p {
                rhs[r] += w * x[r][i];
            }
        }
        // solve (t11 - t22[j][j] I) y = rhs, upper triangular back substitution
        let shift = t22[(j, j)];
        for r in (0..p).rev() {
            let mut sum = rhs[r];
            for k in r + 1..p {
                sum -= t11[(r, k)] * x[k][j];
            }
            x[r][j] = sum / (t11[(r, r)] - shift);
        }
    }
    x
}
