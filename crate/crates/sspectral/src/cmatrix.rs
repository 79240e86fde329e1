//! Dense complex matrices and the eigensolvers built on them.
//!
//! Quaternionic n x n problems are rephrased as complex 2n x 2n problems
//! through the adjoint representation (see [`crate::qmatrix`]).  The solvers
//! here are self-contained: Householder reduction to Hessenberg form followed
//! by a shifted QR iteration yields a Schur decomposition of a general
//! matrix, and a cyclic Jacobi iteration diagonalizes Hermitian matrices.
//! Both are deterministic: identical inputs produce identical output bits.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// A dense, square, row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    d: Vec<Complex64>,
}

impl CMatrix {
    /// The zero matrix of side `n`.
    pub fn zeros(n: usize) -> Self {
        CMatrix { n, d: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    /// The identity matrix of side `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from an entry-generating closure.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Side length.
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix product dimension mismatch");
        let n = self.n;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        let n = self.n;
        CMatrix::from_fn(n, |i, j| self[(j, i)].conj())
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.n, x.len(), "matrix-vector dimension mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.n];
        for i in 0..self.n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..self.n {
                acc += self[(i, j)] * x[j];
            }
            out[i] = acc;
        }
        out
    }

    /// Frobenius norm.
    pub fn frob_norm(&self) -> f64 {
        self.d.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Entrywise difference `self - rhs`.
    pub fn sub(&self, rhs: &CMatrix) -> CMatrix {
        assert_eq!(self.n, rhs.n, "matrix difference dimension mismatch");
        let mut out = self.clone();
        for (a, b) in out.d.iter_mut().zip(rhs.d.iter()) {
            *a -= *b;
        }
        out
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Residual of the Hermitian symmetry `self = self^H`.
    pub fn hermitian_residual(&self) -> f64 {
        self.sub(&self.adjoint()).max_abs()
    }

    /// Column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.n).map(|i| self[(i, j)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.d[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.d[i * self.n + j]
    }
}

/// Hermitian inner product `<x, y> = sum conj(y_i) x_i` of complex vectors.
pub fn cvec_inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y.iter()).map(|(a, b)| b.conj() * a).sum()
}

/// Euclidean norm of a complex vector.
pub fn cvec_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// A Schur decomposition `A = Q * R * Q^H` with `Q` unitary and `R` upper
/// triangular.  The eigenvalues of `A` are the diagonal entries of `R`; for
/// a normal `A` the matrix `R` is diagonal up to roundoff and the columns of
/// `Q` are orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct Schur {
    /// Accumulated unitary transform.
    pub q: CMatrix,
    /// Triangular factor.
    pub r: CMatrix,
    /// Number of QR steps spent.
    pub iterations: usize,
}

impl Schur {
    /// The diagonal of `R`.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        (0..self.r.dim()).map(|i| self.r[(i, i)]).collect()
    }

    /// Largest magnitude below the diagonal of `R`; for normal input this
    /// doubles as a residual for `R` being diagonal when combined with the
    /// strict upper part.
    pub fn off_diagonal_magnitude(&self) -> f64 {
        let n = self.r.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    worst = worst.max(self.r[(i, j)].norm());
                }
            }
        }
        worst
    }
}

/// Reduces `a` to upper Hessenberg form by Householder reflections,
/// returning `(q, h)` with `a = q * h * q^H`.
fn hessenberg(a: &CMatrix) -> (CMatrix, CMatrix) {
    let n = a.dim();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    if n < 3 {
        return (q, h);
    }
    for k in 0..n - 2 {
        // Householder vector for column k below the subdiagonal.
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = cvec_norm(&v);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = v[0];
        let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm = cvec_norm(&v);
        if vnorm == 0.0 {
            continue;
        }
        for z in v.iter_mut() {
            *z /= vnorm;
        }
        // h <- P h P and q <- q P with P = I - 2 v v^H acting on rows and
        // columns k+1..n.
        for col in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (t, vt) in v.iter().enumerate() {
                dot += vt.conj() * h[(k + 1 + t, col)];
            }
            let dot = dot * 2.0;
            for (t, vt) in v.iter().enumerate() {
                let upd = *vt * dot;
                h[(k + 1 + t, col)] -= upd;
            }
        }
        for row in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (t, vt) in v.iter().enumerate() {
                dot += h[(row, k + 1 + t)] * *vt;
            }
            let dot = dot * 2.0;
            for (t, vt) in v.iter().enumerate() {
                let upd = dot * vt.conj();
                h[(row, k + 1 + t)] -= upd;
            }
        }
        for row in 0..n {
            let mut dot = Complex64::new(0.0, 0.0);
            for (t, vt) in v.iter().enumerate() {
                dot += q[(row, k + 1 + t)] * *vt;
            }
            let dot = dot * 2.0;
            for (t, vt) in v.iter().enumerate() {
                let upd = dot * vt.conj();
                q[(row, k + 1 + t)] -= upd;
            }
        }
        // Entries below the subdiagonal are now zero up to roundoff.
        for i in k + 2..n {
            h[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
    (q, h)
}

/// A complex Givens rotation `[[c, s], [-conj(s), c]]` with real `c` that
/// maps `(f, g)` to `(r, 0)`.
fn givens(f: Complex64, g: Complex64) -> (f64, Complex64) {
    let fa = f.norm();
    let ga = g.norm();
    if ga == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    if fa == 0.0 {
        return (0.0, g.conj() / ga);
    }
    let d = (fa * fa + ga * ga).sqrt();
    let c = fa / d;
    let s = (f / fa) * g.conj() / d;
    (c, s)
}

/// Eigenvalue of the trailing 2x2 block closest to its bottom-right entry.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr = a + d;
    let disc = ((a - d) * (a - d) + b * c * 4.0).sqrt();
    let l1 = (tr + disc) * 0.5;
    let l2 = (tr - disc) * 0.5;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Schur decomposition of a general complex matrix by Hessenberg reduction
/// and shifted QR iteration.
///
/// Errors with [`Error::EigensolverFailure`] if deflation stalls beyond the
/// iteration cap.
pub fn schur(a: &CMatrix) -> Result<Schur> {
    let n = a.dim();
    if n == 0 {
        return Ok(Schur { q: CMatrix::zeros(0), r: CMatrix::zeros(0), iterations: 0 });
    }
    let (mut q, mut h) = hessenberg(a);
    let hnorm = h.frob_norm();
    let eps = f64::EPSILON;
    let cap = 40 * n.max(4);
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut stall = 0usize;
    while hi > 0 {
        // Zero negligible subdiagonals.
        for i in 0..hi {
            let thresh = {
                let t = eps * (h[(i, i)].norm() + h[(i + 1, i + 1)].norm());
                if t > 0.0 {
                    t
                } else {
                    eps * hnorm
                }
            };
            if h[(i + 1, i)].norm() <= thresh {
                h[(i + 1, i)] = Complex64::new(0.0, 0.0);
            }
        }
        if h[(hi, hi - 1)] == Complex64::new(0.0, 0.0) {
            hi -= 1;
            stall = 0;
            continue;
        }
        let mut lo = hi;
        while lo > 0 && h[(lo, lo - 1)] != Complex64::new(0.0, 0.0) {
            lo -= 1;
        }
        total += 1;
        stall += 1;
        if total > cap {
            return Err(Error::EigensolverFailure { iterations: total });
        }
        let mu = if stall % 12 == 0 {
            // Exceptional shift to break rare symmetric cycles.
            h[(hi, hi)] + Complex64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };
        for i in lo..=hi {
            h[(i, i)] -= mu;
        }
        // QR step: eliminate the subdiagonal with a chain of Givens
        // rotations, then multiply them back on the right.
        let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(hi - lo);
        for i in lo..hi {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            rots.push((c, s));
            for col in i..n {
                let hi_c = h[(i, col)];
                let lo_c = h[(i + 1, col)];
                h[(i, col)] = hi_c * c + lo_c * s;
                h[(i + 1, col)] = -hi_c * s.conj() + lo_c * c;
            }
            h[(i + 1, i)] = Complex64::new(0.0, 0.0);
        }
        for (idx, (c, s)) in rots.iter().enumerate() {
            let i = lo + idx;
            let row_end = (i + 2).min(hi);
            for row in 0..=row_end {
                let col_i = h[(row, i)];
                let col_n = h[(row, i + 1)];
                h[(row, i)] = col_i * *c + col_n * s.conj();
                h[(row, i + 1)] = -col_i * *s + col_n * *c;
            }
            for row in 0..n {
                let col_i = q[(row, i)];
                let col_n = q[(row, i + 1)];
                q[(row, i)] = col_i * *c + col_n * s.conj();
                q[(row, i + 1)] = -col_i * *s + col_n * *c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += mu;
        }
    }
    // Clean the strictly lower triangle.
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = Complex64::new(0.0, 0.0);
        }
    }
    Ok(Schur { q, r: h, iterations: total })
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns the eigenvalues in ascending order together with a unitary matrix
/// of eigenvectors in matching column order, so `a = v * diag(w) * v^H`.
/// The input is validated against `tol_hermitian` on the symmetry residual.
pub fn eigh(a: &CMatrix, tol_hermitian: f64) -> Result<(Vec<f64>, CMatrix)> {
    let n = a.dim();
    let sym_residual = a.hermitian_residual();
    if sym_residual > tol_hermitian {
        return Err(Error::NotHermitian { residual: sym_residual, tol: tol_hermitian });
    }
    let mut m = a.clone();
    let mut v = CMatrix::identity(n);
    if n <= 1 {
        let w = if n == 1 { vec![m[(0, 0)].re] } else { vec![] };
        return Ok((w, v));
    }
    let frob = m.frob_norm();
    let eps = f64::EPSILON;
    let floor = frob * 1e-30;
    let max_sweeps = 100;
    let mut converged = false;
    for _sweep in 0..max_sweeps {
        let mut rotated = false;
        // Off-diagonal mass, used as a secondary termination criterion.
        let mut off2 = 0.0;
        for p in 0..n {
            for qi in p + 1..n {
                off2 += m[(p, qi)].norm_sqr();
            }
        }
        if (2.0 * off2).sqrt() <= 1e-15 * frob.max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }
        for p in 0..n {
            for qi in p + 1..n {
                let c = m[(p, qi)];
                let ca = c.norm();
                let app = m[(p, p)].re;
                let aqq = m[(qi, qi)].re;
                // Relative threshold keeps small eigenvalues of graded
                // matrices accurate; the floor guards zero diagonals.
                if ca <= floor + eps * (app.abs() * aqq.abs()).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = c / ca;
                let tau = (app - aqq) / (2.0 * ca);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                // Two-sided update with U = [[cs, -sn*phase], [sn*conj(phase), cs]].
                let sp = Complex64::new(sn, 0.0) * phase;
                for r in 0..n {
                    let mp = m[(r, p)];
                    let mq = m[(r, qi)];
                    m[(r, p)] = mp * cs + mq * sp.conj();
                    m[(r, qi)] = -mp * sp + mq * cs;
                }
                for col in 0..n {
                    let rp = m[(p, col)];
                    let rq = m[(qi, col)];
                    m[(p, col)] = rp * cs + rq * sp;
                    m[(qi, col)] = -rp * sp.conj() + rq * cs;
                }
                m[(p, qi)] = Complex64::new(0.0, 0.0);
                m[(qi, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(qi, qi)] = Complex64::new(m[(qi, qi)].re, 0.0);
                for r in 0..n {
                    let vp = v[(r, p)];
                    let vq = v[(r, qi)];
                    v[(r, p)] = vp * cs + vq * sp.conj();
                    v[(r, qi)] = -vp * sp + vq * cs;
                }
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::EigensolverFailure { iterations: max_sweeps });
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.partial_cmp(&m[(y, y)].re).unwrap());
    let w: Vec<f64> = order.iter().map(|&x| m[(x, x)].re).collect();
    let vs = CMatrix::from_fn(n, |i, j| v[(i, order[j])]);
    Ok((w, vs))
}

/// Singular values of `a` as square roots of the eigenvalues of `a^H a`,
/// returned in ascending order.
pub fn singular_values(a: &CMatrix) -> Result<Vec<f64>> {
    // One-sided (Hestenes) Jacobi: rotate column pairs of A until they are
    // mutually orthogonal; the singular values are the final column norms.
    // Unlike an eigendecomposition of A^H A, this resolves tiny singular
    // values down to roundoff of |A| instead of sqrt(roundoff).
    let n = a.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let eps = f64::EPSILON;
    let max_sweeps = 60;
    let mut swept = 0;
    loop {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    app += cols[p][i].norm_sqr();
                    aqq += cols[q][i].norm_sqr();
                    apq += cols[p][i].conj() * cols[q][i];
                }
                if apq.norm() <= eps * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                // Diagonalize [[app, apq], [conj(apq), aqq]] with the same
                // rotation convention as `eigh` and apply it to the columns.
                let abs_apq = apq.norm();
                let tau = (app - aqq) / (2.0 * abs_apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;
                let phase = apq / abs_apq;
                for i in 0..n {
                    let cp = cols[p][i];
                    let cq = cols[q][i];
                    cols[p][i] = cp * cs + cq * phase.conj() * sn;
                    cols[q][i] = cq * cs - cp * phase * sn;
                }
            }
        }
        swept += 1;
        if !rotated {
            break;
        }
        if swept >= max_sweeps {
            return Err(Error::EigensolverFailure { iterations: swept });
        }
    }
    let mut sv: Vec<f64> =
        cols.iter().map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()).collect();
    sv.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(sv)
}

/// Operator (spectral) norm of `a`.
pub fn operator_norm(a: &CMatrix) -> Result<f64> {
    let sv = singular_values(a)?;
    Ok(sv.last().copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Deterministic pseudo-random complex matrix for tests (splitmix-style).
    fn scrambled(n: usize, seed: u64) -> CMatrix {
        let mut state = seed;
        let mut next = move || {
            state = state.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z = z ^ (z >> 31);
            (z as f64 / u64::MAX as f64) * 2.0 - 1.0
        };
        CMatrix::from_fn(n, |_, _| c(next(), next()))
    }

    fn check_unitary(u: &CMatrix, tol: f64) {
        let res = u.adjoint().mul(u).sub(&CMatrix::identity(u.dim())).max_abs();
        assert!(res < tol, "unitarity residual {res}");
    }

    #[test]
    fn schur_factors_random_matrices() {
        for seed in 0..5u64 {
            for n in [1, 2, 3, 5, 8, 12] {
                let a = scrambled(n, seed * 31 + n as u64);
                let s = schur(&a).unwrap();
                check_unitary(&s.q, 1e-12);
                let rebuilt = s.q.mul(&s.r).mul(&s.q.adjoint());
                let res = rebuilt.sub(&a).max_abs();
                assert!(res < 1e-12 * (1.0 + a.frob_norm()), "n={n} residual {res}");
                for i in 0..n {
                    for j in 0..i {
                        assert_eq!(s.r[(i, j)], c(0.0, 0.0));
                    }
                }
            }
        }
    }

    #[test]
    fn schur_eigenvalues_match_power_traces() {
        // Newton-sum oracle: sum of k-th powers of eigenvalues equals the
        // trace of the k-th power of the matrix, independently of the solver.
        for seed in [3u64, 17, 99] {
            let n = 6;
            let a = scrambled(n, seed);
            let eig = schur(&a).unwrap().eigenvalues();
            let mut p = CMatrix::identity(n);
            for k in 1..=3 {
                p = p.mul(&a);
                let tr: Complex64 = (0..n).map(|i| p[(i, i)]).sum();
                let sum: Complex64 = eig.iter().map(|l| l.powu(k as u32)).sum();
                assert!(
                    (tr - sum).norm() < 1e-9 * (1.0 + tr.norm()),
                    "power {k} trace mismatch: {tr} vs {sum}"
                );
            }
        }
    }

    #[test]
    fn schur_of_diagonal_is_immediate() {
        let mut a = CMatrix::zeros(3);
        a[(0, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(2.0, -1.0);
        a[(2, 2)] = c(-0.5, 3.0);
        let s = schur(&a).unwrap();
        let mut eig = s.eigenvalues();
        eig.sort_by(|x, y| x.re.partial_cmp(&y.re).unwrap());
        assert!((eig[0] - c(-0.5, 3.0)).norm() < 1e-14);
        assert!((eig[1] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((eig[2] - c(2.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn schur_known_two_by_two() {
        // [[0, 1], [-1, 0]] has eigenvalues +-i.
        let mut a = CMatrix::zeros(2);
        a[(0, 1)] = c(1.0, 0.0);
        a[(1, 0)] = c(-1.0, 0.0);
        let s = schur(&a).unwrap();
        let mut eig = s.eigenvalues();
        eig.sort_by(|x, y| x.im.partial_cmp(&y.im).unwrap());
        assert!((eig[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((eig[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn schur_of_normal_matrix_has_diagonal_r() {
        // Conjugate a diagonal by an exact unitary (Givens product).
        let n = 4;
        let mut d = CMatrix::zeros(n);
        d[(0, 0)] = c(1.0, 2.0);
        d[(1, 1)] = c(1.0, -2.0);
        d[(2, 2)] = c(-3.0, 0.0);
        d[(3, 3)] = c(0.0, 1.0);
        let mut u = CMatrix::identity(n);
        let th: f64 = 0.7;
        u[(0, 0)] = c(th.cos(), 0.0);
        u[(0, 2)] = c(th.sin(), 0.0);
        u[(2, 0)] = c(-th.sin(), 0.0);
        u[(2, 2)] = c(th.cos(), 0.0);
        let a = u.mul(&d).mul(&u.adjoint());
        let s = schur(&a).unwrap();
        assert!(s.off_diagonal_magnitude() < 1e-13 * (1.0 + a.frob_norm()));
        // Columns of q are eigenvectors.
        for k in 0..n {
            let v = s.q.column(k);
            let av = a.apply(&v);
            let lam = s.r[(k, k)];
            let res: f64 = av
                .iter()
                .zip(v.iter())
                .map(|(x, y)| (x - lam * y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(res < 1e-12, "eigenpair residual {res}");
        }
    }

    #[test]
    fn eigh_matches_known_spectrum() {
        // [[2, 1], [1, 2]] -> {1, 3}.
        let mut a = CMatrix::zeros(2);
        a[(0, 0)] = c(2.0, 0.0);
        a[(0, 1)] = c(1.0, 0.0);
        a[(1, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(2.0, 0.0);
        let (w, v) = eigh(&a, 1e-12).unwrap();
        assert!((w[0] - 1.0).abs() < 1e-14);
        assert!((w[1] - 3.0).abs() < 1e-14);
        check_unitary(&v, 1e-13);
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        for seed in 0..4u64 {
            for n in [2, 3, 6, 10] {
                let g = scrambled(n, 1000 + seed * 7 + n as u64);
                let a = g.adjoint().mul(&g); // Hermitian positive semidefinite
                let (w, v) = eigh(&a, 1e-10 * (1.0 + a.frob_norm())).unwrap();
                check_unitary(&v, 1e-12);
                let mut rebuilt = CMatrix::zeros(n);
                for i in 0..n {
                    for j in 0..n {
                        let mut acc = c(0.0, 0.0);
                        for k in 0..n {
                            acc += v[(i, k)] * w[k] * v[(j, k)].conj();
                        }
                        rebuilt[(i, j)] = acc;
                    }
                }
                let res = rebuilt.sub(&a).max_abs();
                assert!(res < 1e-11 * (1.0 + a.frob_norm()), "n={n} residual {res}");
                for k in 1..n {
                    assert!(w[k] >= w[k - 1]);
                }
                assert!(w[0] > -1e-10, "Gram matrix eigenvalues must be nonnegative");
            }
        }
    }

    #[test]
    fn eigh_handles_zero_diagonal() {
        // [[0, i], [-i, 0]] -> {-1, +1}; the relative rotation threshold must
        // not dead-lock on the zero diagonal.
        let mut a = CMatrix::zeros(2);
        a[(0, 1)] = c(0.0, 1.0);
        a[(1, 0)] = c(0.0, -1.0);
        let (w, _) = eigh(&a, 1e-12).unwrap();
        assert!((w[0] + 1.0).abs() < 1e-14);
        assert!((w[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_keeps_graded_eigenvalues_accurate() {
        // diag(1e-8, 1, 1e8) conjugated by a rotation: the tiny eigenvalue
        // must come back with small *relative* error.
        let n = 3;
        let mut d = CMatrix::zeros(n);
        d[(0, 0)] = c(1e-8, 0.0);
        d[(1, 1)] = c(1.0, 0.0);
        d[(2, 2)] = c(1e8, 0.0);
        let mut u = CMatrix::identity(n);
        let th: f64 = 0.4;
        u[(0, 0)] = c(th.cos(), 0.0);
        u[(0, 1)] = c(th.sin(), 0.0);
        u[(1, 0)] = c(-th.sin(), 0.0);
        u[(1, 1)] = c(th.cos(), 0.0);
        let a = u.mul(&d).mul(&u.adjoint());
        let (w, _) = eigh(&a, 1e-4).unwrap();
        assert!((w[0] / 1e-8 - 1.0).abs() < 1e-6, "tiny eigenvalue {}", w[0]);
        assert!((w[2] / 1e8 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let mut a = CMatrix::zeros(2);
        a[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(eigh(&a, 1e-12), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn singular_values_of_known_matrix() {
        // diag(3, -4i) has singular values {3, 4}.
        let mut a = CMatrix::zeros(2);
        a[(0, 0)] = c(3.0, 0.0);
        a[(1, 1)] = c(0.0, -4.0);
        let sv = singular_values(&a).unwrap();
        assert!((sv[0] - 3.0).abs() < 1e-12);
        assert!((sv[1] - 4.0).abs() < 1e-12);
        assert!((operator_norm(&a).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn singular_values_resolve_near_singular_matrices() {
        // A rank-one perturbation of size 1e-13 must not be reported as
        // having sigma_min anywhere near sqrt(eps).
        let mut a = CMatrix::zeros(2);
        a[(0, 0)] = c(1.0, 0.0);
        a[(0, 1)] = c(1.0, 0.0);
        a[(1, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(1.0 + 1e-13, 0.0);
        let sv = singular_values(&a).unwrap();
        assert!(sv[0] < 1e-13, "sigma_min {} should be ~5e-14", sv[0]);
        assert!(sv[0] > 1e-15);
        assert!((sv[1] - 2.0).abs() < 1e-12);
        // An exactly singular matrix reports sigma_min at roundoff level.
        let mut b = CMatrix::zeros(2);
        b[(0, 0)] = c(1.0, 0.0);
        b[(0, 1)] = c(2.0, 0.0);
        b[(1, 0)] = c(0.5, 0.0);
        b[(1, 1)] = c(1.0, 0.0);
        let sv = singular_values(&b).unwrap();
        assert!(sv[0] < 1e-15, "sigma_min {}", sv[0]);
        // Orthogonality of singular values: frob^2 = sum of squares.
        let g = scrambled(5, 99);
        let sv = singular_values(&g).unwrap();
        let mass: f64 = sv.iter().map(|s| s * s).sum();
        assert!((mass - g.frob_norm().powi(2)).abs() < 1e-12 * g.frob_norm().powi(2));
    }

    #[test]
    fn schur_is_deterministic() {
        let a = scrambled(7, 42);
        let s1 = schur(&a).unwrap();
        let s2 = schur(&a).unwrap();
        assert_eq!(s1.q, s2.q);
        assert_eq!(s1.r, s2.r);
    }
}
