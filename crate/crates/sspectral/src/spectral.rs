//! Spectral measures for normal quaternionic matrices.
//!
//! A normal matrix decomposes as `T = A + J B` with `A` self-adjoint, `B`
//! positive and `J` anti-self-adjoint unitary, all mutually commuting.  Once
//! a slice unit `j` is fixed, `T` admits an orthonormal basis of right
//! eigenvectors whose eigenvalues lie in the closed upper half-slice
//! `C_j^+`, and the atomic projection-valued measure built on those
//! eigenspaces reconstructs `T` as the finite sum
//!
//! ```text
//! T x = sum_k  y_k p_k <x, y_k>
//! ```
//!
//! over the basis; scalar coefficients act through the left multiplication
//! induced by the basis.  Everything in this module is exact linear algebra
//! at atom level: sets are unions of atoms and integrals are finite sums.

use crate::error::{Error, Result};
use crate::qmatrix::{
    self, assemble_from_eigenpairs, canonicalize_phase_full, complex_pair, from_complex_pair,
    inner, vec_scale_right, QMatrix,
};
use crate::quaternion::{ImaginaryUnit, Quaternion};
use crate::random::SeededRng;
use crate::s_spectrum::extract_spheres;
use serde::Serialize;

/// Orthonormal basis realizing `J` as left multiplication by `j`.
#[derive(Debug, Clone, Serialize)]
pub struct HilbertBasisNj {
    /// Orthonormal vectors over the quaternions.
    pub vectors: Vec<Vec<Quaternion>>,
    /// The slice unit the basis is attached to.
    pub j: ImaginaryUnit,
}

/// One atom of a spectral measure: an eigensphere representative together
/// with the projection onto, and an orthonormal basis of, its eigenspace.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralAtom {
    /// Eigenvalue representative in the closed upper half-slice.
    pub p: Quaternion,
    /// Orthogonal projection onto the eigenspace.
    pub projection: QMatrix,
    /// Orthonormal right eigenvectors spanning the eigenspace:
    /// `T y = y p` for each.
    pub vectors: Vec<Vec<Quaternion>>,
}

/// Atomic projection-valued measure on `sigma_S(T) \cap C_j^+`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralMeasure {
    /// The slice unit.
    pub j: ImaginaryUnit,
    /// Atoms sorted by `(Re p, |Im p|)`.
    pub atoms: Vec<SpectralAtom>,
    /// Ambient dimension.
    pub dim: usize,
}

impl SpectralMeasure {
    /// Number of atoms.
    pub fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    /// The flattened eigenvector basis, in atom order.
    pub fn basis(&self) -> HilbertBasisNj {
        let vectors = self.atoms.iter().flat_map(|a| a.vectors.iter().cloned()).collect();
        HilbertBasisNj { vectors, j: self.j }
    }

    /// Projection of a union of atoms, `E(sigma)` for
    /// `sigma = {atoms[i] : i in indices}`.  Repeated indices are ignored.
    pub fn projection_of(&self, indices: &[usize]) -> QMatrix {
        let mut seen = vec![false; self.atoms.len()];
        let mut p = QMatrix::zeros(self.dim);
        for &i in indices {
            if !seen[i] {
                seen[i] = true;
                p = p.add(&self.atoms[i].projection);
            }
        }
        p
    }

    /// The operator `sum_k y_k f(p) <., y_k>` for a value assignment `f` on
    /// the atoms — the common form of every functional calculus below.
    pub fn assemble(&self, mut f: impl FnMut(usize, Quaternion) -> Quaternion) -> QMatrix {
        let mut values = Vec::with_capacity(self.dim);
        let mut vectors = Vec::with_capacity(self.dim);
        for (idx, atom) in self.atoms.iter().enumerate() {
            for y in &atom.vectors {
                values.push(f(idx, atom.p));
                vectors.push(y.clone());
            }
        }
        assemble_from_eigenpairs(self.dim, &values, &vectors)
    }
}

/// Left scalar multiplication `L_p` induced by a basis:
/// `L_p x = sum_k y_k p <x, y_k>`.
pub fn left_multiplication(basis: &HilbertBasisNj, p: Quaternion) -> QMatrix {
    let n = basis.vectors.first().map_or(0, |v| v.len());
    let values = vec![p; basis.vectors.len()];
    assemble_from_eigenpairs(n, &values, &basis.vectors)
}

/// Pins the residual right-phase freedom of an eigenvector attached to a
/// non-real eigenvalue.  The allowed phases live in the slice `C_{e1}`
/// (they must commute with the eigenvalue), and the canonical choice makes
/// the dominant half of the leading component positive real.
fn canonicalize_phase_slice(v: Vec<Quaternion>) -> Vec<Quaternion> {
    let max = v.iter().map(|q| q.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return v;
    }
    let lead = v.iter().find(|q| q.norm() >= 0.5 * max).copied().unwrap_or(Quaternion::ONE);
    let (c, d) = complex_pair(lead);
    // Divide by whichever half is larger, preferring the complex part on a
    // tie: `[e2]`'s canonical eigenvector is then (1 + e3)/sqrt(2).
    let a = if d.norm_sqr() > c.norm_sqr() { d / d.norm() } else { c.conj() / c.norm() };
    vec_scale_right(&v, from_complex_pair(a, num_complex::Complex64::new(0.0, 0.0)))
}

/// The spectral measure of a normal matrix on the upper half-slice of `j`.
///
/// Atoms are the eigenspheres of the S-spectrum; each carries an
/// orthonormal set of right eigenvectors with `T y = y p`, phase-fixed
/// deterministically, and the projection onto its eigenspace.
pub fn spectral_measure(t: &QMatrix, j: ImaginaryUnit) -> Result<SpectralMeasure> {
    spectral_measure_with_grouping(t, j, None)
}

/// Same as [`spectral_measure`] with an explicit eigensphere grouping
/// width, for callers whose spectra cluster far more tightly than the
/// default `1e-8 * max(1, |T|)` — e.g. operators contracted toward the
/// unit sphere.
pub fn spectral_measure_with_grouping(
    t: &QMatrix,
    j: ImaginaryUnit,
    grouping_tol: Option<f64>,
) -> Result<SpectralMeasure> {
    let ex = extract_spheres(t, grouping_tol, false)?;
    if !ex.normal {
        let comm = t.matmul(&t.adjoint()).sub(&t.adjoint().matmul(t)).frob_norm();
        return Err(Error::NotNormal {
            residual: comm,
            tol: 1e-10 * 1.0f64.max(ex.norm_t * ex.norm_t),
        });
    }
    measure_from_extraction(t.dim(), &ex, j)
}

pub(crate) fn measure_from_extraction(
    n: usize,
    ex: &crate::s_spectrum::Extraction,
    j: ImaginaryUnit,
) -> Result<SpectralMeasure> {
    // Eigenvectors come out of the extraction attached to eigenvalues in
    // the upper half of C_{e1}; a fixed right rotation moves them to C_j.
    let rot = ImaginaryUnit::E1.rotation_to(j);
    let mut atoms = Vec::with_capacity(ex.groups.len());
    for grp in &ex.groups {
        let vectors: Vec<Vec<Quaternion>> = grp
            .vectors
            .iter()
            .map(|y| {
                if grp.v == 0.0 {
                    canonicalize_phase_full(y.clone())
                } else {
                    let canon = canonicalize_phase_slice(y.clone());
                    if rot == Quaternion::ONE {
                        canon
                    } else {
                        vec_scale_right(&canon, rot)
                    }
                }
            })
            .collect();
        let ones = vec![Quaternion::ONE; vectors.len()];
        let projection = assemble_from_eigenpairs(n, &ones, &vectors);
        atoms.push(SpectralAtom { p: j.embed(grp.u, grp.v), projection, vectors });
    }
    Ok(SpectralMeasure { j, atoms, dim: n })
}

/// The spectral integral `sum_k y_k p_k <., y_k>`; reproduces the matrix
/// the measure was built from.
pub fn reconstruct(e: &SpectralMeasure) -> QMatrix {
    e.assemble(|_, p| p)
}

/// The decomposition `T = A + J B` of a normal matrix.
#[derive(Debug, Clone)]
pub struct DecompositionABJ {
    /// Self-adjoint part `(T + T*)/2`.
    pub a: QMatrix,
    /// Positive part `|T - T*|/2`.
    pub b: QMatrix,
    /// Anti-self-adjoint unitary factor.
    pub j_op: QMatrix,
    /// Projection onto `Ker(T - T*)`, where `J` is conventional.
    pub kernel_projection: QMatrix,
    /// Whether that kernel is nonzero.
    pub kernel_present: bool,
    /// Slice unit used for the conventional extension of `J`.
    pub j: ImaginaryUnit,
}

/// Computes `T = A + J B` for normal `T`.
///
/// `A` and `B` use their defining formulas directly; `J` multiplies every
/// spectral basis vector by `j` on the right, which agrees with
/// `(T - T*) |T - T*|^{-1}` away from `Ker(T - T*)` and extends it as the
/// left multiplication `L_j` on the kernel.
pub fn decompose_tabj(t: &QMatrix, j: ImaginaryUnit) -> Result<DecompositionABJ> {
    let e = spectral_measure(t, j)?;
    let a = t.add(&t.adjoint()).scale(0.5);
    let b = t.sub(&t.adjoint()).abs_op(1e-10)?.scale(0.5);
    let jq = j.as_quaternion();
    let j_op = e.assemble(|_, _| jq);
    let kernel_atoms: Vec<usize> = (0..e.atoms.len())
        .filter(|&k| e.atoms[k].p.imag_norm() == 0.0)
        .collect();
    let kernel_projection = e.projection_of(&kernel_atoms);
    Ok(DecompositionABJ {
        a,
        b,
        j_op,
        kernel_present: !kernel_atoms.is_empty(),
        kernel_projection,
        j,
    })
}

/// Residuals of every invariant of a computed decomposition.
#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    /// `|T - (A + J B)|`.
    pub sum_residual: f64,
    /// `|A - (T + T*)/2|`.
    pub a_formula_residual: f64,
    /// `|B - |T - T*|/2|`.
    pub b_formula_residual: f64,
    /// `|J + J*|`.
    pub anti_self_adjoint_residual: f64,
    /// `|J J* - I|`.
    pub unitary_residual: f64,
    /// Worst of `|XY - YX|` over pairs from `{A, B, J}`.
    pub commutation_residual: f64,
}

impl DecompositionReport {
    /// Largest residual in the report.
    pub fn max_residual(&self) -> f64 {
        self.sum_residual
            .max(self.a_formula_residual)
            .max(self.b_formula_residual)
            .max(self.anti_self_adjoint_residual)
            .max(self.unitary_residual)
            .max(self.commutation_residual)
    }
}

/// Frobenius-norm residuals of the decomposition invariants.
pub fn decomposition_residuals(t: &QMatrix, d: &DecompositionABJ) -> Result<DecompositionReport> {
    let n = t.dim();
    let sum = d.a.add(&d.j_op.matmul(&d.b));
    let a_direct = t.add(&t.adjoint()).scale(0.5);
    let b_direct = t.sub(&t.adjoint()).abs_op(1e-10)?.scale(0.5);
    let comm = |x: &QMatrix, y: &QMatrix| x.matmul(y).sub(&y.matmul(x)).frob_norm();
    Ok(DecompositionReport {
        sum_residual: t.sub(&sum).frob_norm(),
        a_formula_residual: d.a.sub(&a_direct).frob_norm(),
        b_formula_residual: d.b.sub(&b_direct).frob_norm(),
        anti_self_adjoint_residual: d.j_op.add(&d.j_op.adjoint()).frob_norm(),
        unitary_residual: d.j_op.matmul(&d.j_op.adjoint()).sub(&QMatrix::identity(n)).frob_norm(),
        commutation_residual: comm(&d.a, &d.b).max(comm(&d.a, &d.j_op)).max(comm(&d.b, &d.j_op)),
    })
}

/// Builds the basis realizing a given anti-self-adjoint unitary `J` as left
/// multiplication by `j`: orthonormal vectors with `J y = y j`.
///
/// The input is validated against the two structural requirements at
/// tolerance `tol`.
pub fn build_basis_nj(j_op: &QMatrix, j: ImaginaryUnit, tol: f64) -> Result<HilbertBasisNj> {
    let scale = 1.0f64.max(j_op.frob_norm());
    let anti = j_op.add(&j_op.adjoint()).frob_norm();
    if anti > tol * scale {
        return Err(Error::NotAntiHermitian { residual: anti, tol: tol * scale });
    }
    let uni = j_op.matmul(&j_op.adjoint()).sub(&QMatrix::identity(j_op.dim())).frob_norm();
    if uni > tol * scale {
        return Err(Error::NotUnitary { residual: uni, tol: tol * scale });
    }
    let e = spectral_measure(j_op, j)?;
    for atom in &e.atoms {
        if (atom.p - j.as_quaternion()).norm() > 1e-8 {
            return Err(Error::Internal(format!(
                "anti-self-adjoint unitary with eigenvalue {} off the imaginary unit sphere",
                atom.p
            )));
        }
    }
    Ok(e.basis())
}

/// Reconstructs `<Tx, y>` from the eight quadratic-form evaluations of the
/// polarization formula
///
/// ```text
/// 4<Tx,y> = Q(x+y) - Q(x-y) + e1 Q(x+y e1) - e1 Q(x-y e1)
///         + e1 Q(x-y e2) e3 - e1 Q(x+y e2) e3 + Q(x+y e3) e3 - Q(x-y e3) e3
/// ```
///
/// where `Q(z) = <Tz, z>`, with the `e1`/`e3` factors multiplied exactly as
/// written.
pub fn polarization(
    mut q: impl FnMut(&[Quaternion]) -> Quaternion,
    x: &[Quaternion],
    y: &[Quaternion],
) -> Quaternion {
    let e1 = Quaternion::E1;
    let e3 = Quaternion::E3;
    let plus = |s: Quaternion| {
        let ys = vec_scale_right(y, s);
        qmatrix::vec_add(x, &ys)
    };
    let minus = |s: Quaternion| {
        let ys = vec_scale_right(y, s);
        qmatrix::vec_sub(x, &ys)
    };
    let total = q(&plus(Quaternion::ONE)) - q(&minus(Quaternion::ONE))
        + e1 * q(&plus(e1))
        - e1 * q(&minus(e1))
        + e1 * q(&minus(Quaternion::E2)) * e3
        - e1 * q(&plus(Quaternion::E2)) * e3
        + q(&plus(e3)) * e3
        - q(&minus(e3)) * e3;
    total * 0.25
}

/// The atomic quaternion-valued measure `mu_{x,y}({p_k}) = <P_k x, y>`,
/// returned in atom order.
pub fn measure_mu_xy(e: &SpectralMeasure, x: &[Quaternion], y: &[Quaternion]) -> Vec<Quaternion> {
    e.atoms.iter().map(|atom| inner(&atom.projection.apply(x), y)).collect()
}

/// One named verification inside a measure-axiom report.
#[derive(Debug, Clone, Serialize)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub worst: f64,
    pub ok: bool,
}

/// Result of [`verify_measure_axioms`].
#[derive(Debug, Clone, Serialize)]
pub struct MeasureAxiomReport {
    pub checks: Vec<AxiomCheck>,
    pub passed: bool,
}

/// Verifies the eight defining properties of a projection-valued measure on
/// every atom pair and on randomly sampled unions:
///
/// 1. `|E(sigma)| <= 1`
/// 2. `E(empty) = 0` and `E(everything) = I`
/// 3. additivity over disjoint unions
/// 4. `E(sigma cap tau) = E(sigma) E(tau)`
/// 5. `E(sigma)* = E(sigma)`
/// 6. `E(sigma)^2 = E(sigma)`
/// 7. `E(sigma)` commutes with `f(T)` for sampled continuous slice-valued
///    value assignments `f`
/// 8. `E(sigma)` and `E(tau)` commute
pub fn verify_measure_axioms(
    e: &SpectralMeasure,
    rng: &mut SeededRng,
    tol: f64,
) -> Result<MeasureAxiomReport> {
    let m = e.atoms.len();
    let sample_union = |rng: &mut SeededRng| -> Vec<usize> {
        (0..m).filter(|_| rng.coin()).collect()
    };
    let unions: Vec<Vec<usize>> = (0..6).map(|_| sample_union(rng)).collect();
    let mut checks = Vec::new();
    let mut push = |name, worst: f64, bound: f64| {
        checks.push(AxiomCheck { name, worst, ok: worst <= bound });
    };

    let mut worst_norm: f64 = 0.0;
    for sigma in &unions {
        worst_norm = worst_norm.max(e.projection_of(sigma).operator_norm()?);
    }
    for atom in &e.atoms {
        worst_norm = worst_norm.max(atom.projection.operator_norm()?);
    }
    push("projection_norm_at_most_one", (worst_norm - 1.0).max(0.0), tol);

    let empty = e.projection_of(&[]).frob_norm();
    let all: Vec<usize> = (0..m).collect();
    let full = e.projection_of(&all).sub(&QMatrix::identity(e.dim)).frob_norm();
    push("empty_is_zero_full_is_identity", empty.max(full), tol);

    let mut worst_add: f64 = 0.0;
    for sigma in &unions {
        let tau: Vec<usize> = (0..m).filter(|k| !sigma.contains(k)).collect();
        let union: Vec<usize> = sigma.iter().chain(tau.iter()).copied().collect();
        let sum = e.projection_of(sigma).add(&e.projection_of(&tau));
        worst_add = worst_add.max(e.projection_of(&union).sub(&sum).frob_norm());
    }
    push("additive_over_disjoint_unions", worst_add, tol);

    let mut worst_mult: f64 = 0.0;
    let mut worst_comm: f64 = 0.0;
    for sigma in &unions {
        for tau in &unions {
            let inter: Vec<usize> =
                sigma.iter().filter(|k| tau.contains(k)).copied().collect();
            let ps = e.projection_of(sigma);
            let pt = e.projection_of(tau);
            worst_mult = worst_mult.max(e.projection_of(&inter).sub(&ps.matmul(&pt)).frob_norm());
            worst_comm = worst_comm.max(ps.matmul(&pt).sub(&pt.matmul(&ps)).frob_norm());
        }
    }
    for a in 0..m {
        for b in 0..m {
            let inter: Vec<usize> = if a == b { vec![a] } else { vec![] };
            let ps = &e.atoms[a].projection;
            let pt = &e.atoms[b].projection;
            worst_mult = worst_mult.max(e.projection_of(&inter).sub(&ps.matmul(pt)).frob_norm());
        }
    }
    push("intersection_is_product", worst_mult, tol);

    let mut worst_sa: f64 = 0.0;
    let mut worst_idem: f64 = 0.0;
    let singletons: Vec<Vec<usize>> = (0..m).map(|k| vec![k]).collect();
    for sigma in unions.iter().chain(singletons.iter()) {
        let p = e.projection_of(sigma);
        worst_sa = worst_sa.max(p.sub(&p.adjoint()).frob_norm());
        worst_idem = worst_idem.max(p.matmul(&p).sub(&p).frob_norm());
    }
    push("projections_self_adjoint", worst_sa, tol);
    push("projections_idempotent", worst_idem, tol);

    // Random continuous slice-valued functions on a finite atom set are
    // arbitrary C_j-value assignments.
    let jq = e.j.as_quaternion();
    let mut worst_fcomm: f64 = 0.0;
    for _ in 0..5 {
        let values: Vec<Quaternion> = (0..m)
            .map(|_| Quaternion::real(rng.uniform()) + jq * rng.uniform())
            .collect();
        let f_t = e.assemble(|idx, _| values[idx]);
        for sigma in &unions {
            let p = e.projection_of(sigma);
            let comm = p.matmul(&f_t).sub(&f_t.matmul(&p)).frob_norm();
            worst_fcomm = worst_fcomm.max(comm);
        }
    }
    push("commutes_with_continuous_calculus", worst_fcomm, tol);
    push("projections_commute", worst_comm, tol);

    let passed = checks.iter().all(|c| c.ok);
    Ok(MeasureAxiomReport { checks, passed })
}

/// Tests whether `W` commutes with the decomposition `{A, B, J}` of `T` and,
/// independently, with every spectral projection of `T`.  The two answers
/// are equal for normal `T`.
pub fn commutant_check(t: &QMatrix, w: &QMatrix, j: ImaginaryUnit, tol: f64) -> Result<(bool, bool)> {
    let d = decompose_tabj(t, j)?;
    let e = spectral_measure(t, j)?;
    let scale_w = 1.0f64.max(w.frob_norm());
    let comm_ok = |x: &QMatrix| {
        let scale = tol * scale_w * 1.0f64.max(x.frob_norm());
        x.matmul(w).sub(&w.matmul(x)).frob_norm() <= scale
    };
    let with_abj = comm_ok(&d.a) && comm_ok(&d.b) && comm_ok(&d.j_op);
    let with_e = e.atoms.iter().all(|atom| comm_ok(&atom.projection));
    Ok((with_abj, with_e))
}

/// Whether two measures have the same atoms (within `tol` in the half-plane
/// metric) and the same projections (within `tol` in Frobenius norm).
pub fn measures_equal(e1: &SpectralMeasure, e2: &SpectralMeasure, tol: f64) -> bool {
    if e1.atoms.len() != e2.atoms.len() || e1.dim != e2.dim {
        return false;
    }
    let mut used = vec![false; e2.atoms.len()];
    for a in &e1.atoms {
        let hit = e2.atoms.iter().enumerate().find(|(k, b)| {
            !used[*k]
                && (a.p - b.p).norm() <= tol
                && a.projection.sub(&b.projection).max_abs() <= tol
        });
        match hit {
            Some((k, _)) => used[k] = true,
            None => return false,
        }
    }
    true
}

/// Whether the diagonal measures `mu_{x,x}` of two spectral measures agree
/// atomwise (within `tol`) on the given set of vectors.  When the vectors
/// span the space, agreement forces the measures to coincide.
pub fn diagonal_measures_agree(
    e1: &SpectralMeasure,
    e2: &SpectralMeasure,
    xs: &[Vec<Quaternion>],
    tol: f64,
) -> bool {
    if e1.atoms.len() != e2.atoms.len() {
        return false;
    }
    for x in xs {
        let m1 = measure_mu_xy(e1, x, x);
        let m2 = measure_mu_xy(e2, x, x);
        for (a, b) in m1.iter().zip(m2.iter()) {
            if (*a - *b).norm() > tol {
                return false;
            }
        }
    }
    true
}
