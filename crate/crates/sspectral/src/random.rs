//! Seeded random generators for quaternions, vectors and structured
//! matrices.
//!
//! Every generator consumes a [`SeededRng`] so that property suites are
//! reproducible from a single integer seed.  Normal matrices are produced
//! in factored form `U diag(q) U*`, and the factors are returned so tests
//! can compare computed spectra against their ground truth.

use crate::qmatrix::{mgs_orthonormalize, QMatrix};
use crate::quaternion::{ImaginaryUnit, Quaternion};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Deterministic random stream.
pub struct SeededRng(ChaCha8Rng);

impl SeededRng {
    /// Creates a stream from an integer seed.
    pub fn new(seed: u64) -> Self {
        SeededRng(ChaCha8Rng::seed_from_u64(seed))
    }

    /// Derives an independent stream for a sub-task, leaving `self` usable.
    pub fn fork(&mut self, tag: u64) -> SeededRng {
        let base: u64 = self.0.random();
        SeededRng::new(base ^ tag.wrapping_mul(0x9e3779b97f4a7c15))
    }

    /// Uniform draw from `[-1, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>() * 2.0 - 1.0
    }

    /// Uniform draw from `[lo, hi)`.
    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.0.random::<f64>()
    }

    /// Uniform index below `n`.
    pub fn index(&mut self, n: usize) -> usize {
        self.0.random_range(0..n)
    }

    /// Fair coin.
    pub fn coin(&mut self) -> bool {
        self.0.random::<bool>()
    }
}

/// Random quaternion with components uniform in `[-1, 1)`.
pub fn quaternion(rng: &mut SeededRng) -> Quaternion {
    Quaternion::new(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform())
}

/// Random vector of independent quaternions.
pub fn vector(rng: &mut SeededRng, n: usize) -> Vec<Quaternion> {
    (0..n).map(|_| quaternion(rng)).collect()
}

/// Random purely imaginary unit, uniform over directions drawn from the
/// cube and normalized.
pub fn imaginary_unit(rng: &mut SeededRng) -> ImaginaryUnit {
    loop {
        let q = Quaternion::new(0.0, rng.uniform(), rng.uniform(), rng.uniform());
        let nrm = q.norm();
        if nrm > 1e-3 {
            let inv = 1.0 / nrm;
            return ImaginaryUnit::new(q * inv, 1e-12).expect("normalized imaginary quaternion");
        }
    }
}

/// Dense matrix with independent random entries.
pub fn matrix(rng: &mut SeededRng, n: usize) -> QMatrix {
    QMatrix::from_fn(n, |_, _| quaternion(rng))
}

/// Random self-adjoint matrix `(G + G*)/2`.
pub fn hermitian(rng: &mut SeededRng, n: usize) -> QMatrix {
    let g = matrix(rng, n);
    g.add(&g.adjoint()).scale(0.5)
}

/// Random anti-self-adjoint matrix `(G - G*)/2`.
pub fn anti_hermitian(rng: &mut SeededRng, n: usize) -> QMatrix {
    let g = matrix(rng, n);
    g.sub(&g.adjoint()).scale(0.5)
}

/// Random unitary matrix whose columns come from Gram-Schmidt applied to
/// random vectors.
pub fn unitary(rng: &mut SeededRng, n: usize) -> QMatrix {
    let mut columns: Vec<Vec<Quaternion>> = Vec::with_capacity(n);
    while columns.len() < n {
        let mut cands: Vec<Vec<Quaternion>> = columns.clone();
        cands.push(vector(rng, n));
        let kept = mgs_orthonormalize(&cands, 1e-3);
        if kept.len() == columns.len() + 1 {
            columns = kept;
        }
    }
    QMatrix::from_fn(n, |i, k| columns[k][i])
}

/// A normal matrix together with the factors that built it.
pub struct NormalSample {
    /// `unitary * diag(diagonal) * unitary^*`.
    pub matrix: QMatrix,
    /// Prescribed diagonal entries (right eigenvalues).
    pub diagonal: Vec<Quaternion>,
    /// The conjugating unitary.
    pub unitary: QMatrix,
}

/// Normal matrix with the prescribed diagonal entries, conjugated by a
/// random unitary.
pub fn normal_from_points(rng: &mut SeededRng, points: &[Quaternion]) -> NormalSample {
    let n = points.len();
    let u = unitary(rng, n);
    let m = u.matmul(&QMatrix::diagonal(points)).matmul(&u.adjoint());
    NormalSample { matrix: m, diagonal: points.to_vec(), unitary: u }
}

/// Normal matrix with independent random eigenvalues of magnitude O(1).
pub fn normal(rng: &mut SeededRng, n: usize) -> NormalSample {
    let points = vector(rng, n);
    normal_from_points(rng, &points)
}

/// Normal matrix whose eigenspheres sit at the prescribed `(u, v)` pairs,
/// each embedded along a fresh random imaginary unit.
pub fn normal_from_spheres(rng: &mut SeededRng, spheres: &[(f64, f64)]) -> NormalSample {
    let points: Vec<Quaternion> = spheres
        .iter()
        .map(|&(u, v)| {
            let j = imaginary_unit(rng);
            j.embed(u, v.abs())
        })
        .collect();
    normal_from_points(rng, &points)
}
