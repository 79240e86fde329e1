//! The bounded transform `Z_T = T (I + T*T)^{-1/2}` and its inverse map.
//!
//! `Z_T` compresses any matrix into the closed unit ball of operators while
//! `C_T = (I + T*T)^{-1} = I - Z_T* Z_T` remembers how much compression
//! happened at each eigensphere.  The scalar map
//! `phi(p) = p (1 - |p|^2)^{-1/2}` undoes the compression on the spectrum,
//! so a normal `T` is recovered from the spectral measure of `Z_T` by
//! pushing every atom through `phi`.  That detour is what makes very large
//! operator norms tractable: the spectral data of the well-conditioned `Z`
//! is computed first and only the scalar map touches the large numbers.

use crate::error::{Error, Result};
use crate::qmatrix::{assemble_from_eigenpairs, inner, QMatrix};
use crate::quaternion::{ImaginaryUnit, Quaternion};
use crate::random::{self, SeededRng};
use crate::s_spectrum::extract_spheres;
use crate::spectral::{
    measure_from_extraction, reconstruct, spectral_measure, SpectralAtom, SpectralMeasure,
};
use serde::Serialize;

/// A matrix together with its bounded transform and the operators that
/// define it.
#[derive(Debug, Clone)]
pub struct TransformPair {
    /// The original matrix.
    pub t: QMatrix,
    /// `C = (I + T*T)^{-1}`, computed through the eigendecomposition of
    /// `T*T` so that tiny eigenvalues keep full relative accuracy.
    pub c: QMatrix,
    /// `C^{1/2}`.
    pub zroot: QMatrix,
    /// `Z = T C^{1/2}`.
    pub z: QMatrix,
    /// Eigenvalues of `T*T` in ascending order, clamped at zero.  Kept
    /// because the compression gap `1/(1 + lambda)` of a large eigenvalue
    /// cannot be read back off the dense `C` with any relative accuracy,
    /// while the largest eigenvalues of `T*T` are relatively accurate.
    pub tt_eigenvalues: Vec<f64>,
    /// The orthonormal eigenvectors the eigenvalues came with.
    pub tt_vectors: Vec<Vec<Quaternion>>,
}

/// The defining inverse `C_T = (I + T*T)^{-1}`, evaluated literally.
pub fn c_transform(t: &QMatrix) -> Result<QMatrix> {
    let n = t.dim();
    QMatrix::identity(n).add(&t.adjoint().matmul(t)).inverse()
}

/// Builds the bounded transform of an arbitrary (not necessarily normal)
/// matrix from one Hermitian eigendecomposition of `T*T`.
pub fn z_transform(t: &QMatrix) -> Result<TransformPair> {
    let n = t.dim();
    let tt = t.adjoint().matmul(t);
    // The eigenvalue pairing width must track the roundoff split of
    // duplicated eigenvalues (~eps * |T*T|) without swallowing moderate
    // spectral structure sitting next to eigenvalues of size |T|^2.
    let cluster = 1e-13 * 1.0f64.max(tt.frob_norm());
    let eig = tt.hermitian_eigen_grouped(1e-8, cluster)?;
    let lambda: Vec<f64> = eig.eigenvalues.iter().map(|&l| l.max(0.0)).collect();
    let c_values: Vec<Quaternion> =
        lambda.iter().map(|&l| Quaternion::real(1.0 / (1.0 + l))).collect();
    let r_values: Vec<Quaternion> =
        lambda.iter().map(|&l| Quaternion::real(1.0 / (1.0 + l).sqrt())).collect();
    let c = assemble_from_eigenpairs(n, &c_values, &eig.vectors);
    let zroot = assemble_from_eigenpairs(n, &r_values, &eig.vectors);
    let z = t.matmul(&zroot);
    Ok(TransformPair {
        t: t.clone(),
        c,
        zroot,
        z,
        tt_eigenvalues: lambda,
        tt_vectors: eig.vectors,
    })
}

/// `phi(p) = p (1 - |p|^2)^{-1/2}`, defined on the open unit ball.
pub fn phi(p: Quaternion) -> Result<Quaternion> {
    let gap = 1.0 - p.norm_sqr();
    if gap <= 0.0 {
        return Err(Error::Domain(format!(
            "phi needs |p| < 1, got |p| = {}",
            p.norm()
        )));
    }
    Ok(p * gap.sqrt().recip())
}

/// `psi(q) = q (1 + |q|^2)^{-1/2}`, the inverse of [`phi`], mapping all of
/// the quaternions into the open unit ball.
pub fn psi(q: Quaternion) -> Quaternion {
    q * (1.0 + q.norm_sqr()).sqrt().recip()
}

/// Result of [`recover_t`]: the reconstructed matrix, the pushforward
/// spectral measure, and the conditioning diagnostic.
#[derive(Debug, Clone)]
pub struct Recovery {
    /// The reconstructed matrix.
    pub t: QMatrix,
    /// Spectral measure of the reconstruction: the measure of `Z` with
    /// every atom pushed through `phi`.
    pub measure: SpectralMeasure,
    /// Smallest `1 - |p|^2` over the atoms of `Z`.  Values near the
    /// floating-point precision mean the original norm is at the edge of
    /// what the transform can represent.
    pub min_gap_one_minus_p2: f64,
}

/// Undoes the bounded transform of a normal matrix: takes the spectral
/// measure of `Z` and rescales each atom `q` to `phi(q)`, reading the
/// compression gap `1 - |q|^2 = 1/(1 + lambda)` off the eigenvalue
/// `lambda` of `T*T` whose eigenspace carries the atom.
///
/// Computing the gap from `|q|` itself, or from the dense `C`, loses all
/// relative accuracy once `|q|` approaches the unit sphere; the eigenvalue
/// route keeps the recovery error proportional to `|T|` times roundoff.
pub fn recover_t(pair: &TransformPair) -> Result<Recovery> {
    let j = ImaginaryUnit::DEFAULT;
    // Normality is checked on the original matrix, not on Z: building Z
    // goes through the eigenvectors of T*T, whose errors scale with
    // |T|^2, so the commutator of a computed Z can sit far above the
    // usual gate even when T is exactly normal.  Those errors stay inside
    // eigenspace clusters and do not move the recovered atoms beyond the
    // roundtrip budget.
    let norm_t = pair.t.frob_norm();
    let comm = pair
        .t
        .matmul(&pair.t.adjoint())
        .sub(&pair.t.adjoint().matmul(&pair.t))
        .frob_norm();
    let gate = 1e-10 * 1.0f64.max(norm_t * norm_t);
    if comm > gate {
        return Err(Error::NotNormal { residual: comm, tol: gate });
    }
    let grouping = 1e-12 * 1.0f64.max(pair.z.frob_norm());
    let ex = extract_spheres(&pair.z, Some(grouping), true)?;
    let f_measure = measure_from_extraction(pair.z.dim(), &ex, j)?;
    let mut min_gap = f64::INFINITY;
    let mut atoms = Vec::with_capacity(f_measure.atoms.len());
    for atom in &f_measure.atoms {
        // Aggregate the squared overlaps of the atom's eigenvector with
        // the eigenvectors of T*T, grouped by (exactly equal) eigenvalue;
        // the dominant group identifies lambda for this eigensphere.
        let y = atom.vectors.first().ok_or_else(|| {
            Error::Internal("transform atom carries no eigenvector".to_string())
        })?;
        let mut best_lambda = 0.0f64;
        let mut best_mass = 0.0f64;
        let mut k = 0usize;
        while k < pair.tt_eigenvalues.len() {
            let lambda = pair.tt_eigenvalues[k];
            let mut mass = 0.0;
            while k < pair.tt_eigenvalues.len() && pair.tt_eigenvalues[k] == lambda {
                mass += inner(y, &pair.tt_vectors[k]).norm_sqr();
                k += 1;
            }
            if mass > best_mass {
                best_mass = mass;
                best_lambda = lambda;
            }
        }
        if best_mass < 0.5 {
            return Err(Error::Internal(format!(
                "eigensphere {} of the transform overlaps no eigenspace of \
                 T*T (best squared overlap {best_mass:.3})",
                atom.p
            )));
        }
        let gap = 1.0 / (1.0 + best_lambda);
        min_gap = min_gap.min(gap);
        let s = (1.0 + best_lambda).sqrt();
        let sp = atom.p.slice_split(j);
        atoms.push(SpectralAtom {
            p: j.embed(sp.u * s, sp.v * s),
            projection: atom.projection.clone(),
            vectors: atom.vectors.clone(),
        });
    }
    atoms.sort_by(|a, b| {
        let sa = a.p.slice_split(j);
        let sb = b.p.slice_split(j);
        sa.u.partial_cmp(&sb.u).unwrap().then(sa.v.partial_cmp(&sb.v).unwrap())
    });
    let measure = SpectralMeasure { j, atoms, dim: pair.z.dim() };
    let t = reconstruct(&measure);
    Ok(Recovery { t, measure, min_gap_one_minus_p2: min_gap })
}

/// The literal operator form `phi(Z_T) = Z_T (C_T^{1/2})^{-1}`.  Exact in
/// principle but ill-conditioned for large `|T|`; kept as a cross-check
/// for moderate norms.
pub fn recover_t_direct(pair: &TransformPair) -> Result<QMatrix> {
    Ok(pair.z.matmul(&pair.zroot.inverse()?))
}

/// A normal matrix with prescribed eigenspheres and multiplicities,
/// conjugated by a random unitary.  Stands in for truncations of diagonal
/// unbounded operators in stress tests.
///
/// Each representative is first moved to the closed upper half-plane of
/// the slice through `j`, so two inputs naming the same sphere by
/// different points produce matrices with the same S-spectrum.
pub fn unbounded_model(
    spheres: &[(Quaternion, usize)],
    j: ImaginaryUnit,
    rng: &mut SeededRng,
) -> QMatrix {
    let n: usize = spheres.iter().map(|(_, m)| m).sum();
    let mut d = Vec::with_capacity(n);
    for (rep, m) in spheres {
        let sp = rep.slice_split(j);
        let canonical = j.embed(sp.u, sp.v);
        for _ in 0..*m {
            d.push(canonical);
        }
    }
    let u = random::unitary(rng, n);
    u.matmul(&QMatrix::diagonal(&d)).matmul(&u.adjoint())
}

/// One named check inside a [`CorollaryReport`].
#[derive(Debug, Clone, Serialize)]
pub struct FormCheck {
    pub name: &'static str,
    /// Whether the operator is in the class the check speaks about.
    pub applicable: bool,
    /// Worst deviation from the asserted atom form (0 when not applicable).
    pub worst: f64,
    pub ok: bool,
}

/// Verification that the atoms of special operator classes take their
/// canonical forms.
#[derive(Debug, Clone, Serialize)]
pub struct CorollaryReport {
    pub checks: Vec<FormCheck>,
    /// `|reconstruct(E) - T|` in Frobenius norm.
    pub reconstruction_residual: f64,
    pub passed: bool,
}

/// Checks the canonical integral forms: self-adjoint operators have real
/// atoms, anti-self-adjoint ones have atoms `j t` with `t >= 0`, unitary
/// ones have atoms `e^{j t}` with `t` in `[0, pi]`, and in every case the
/// spectral integral reproduces `T`.
pub fn corollary_forms_check(t: &QMatrix) -> Result<CorollaryReport> {
    let j = ImaginaryUnit::DEFAULT;
    let e = spectral_measure(t, j)?;
    let norm_t = t.operator_norm()?;
    let scale = 1.0f64.max(norm_t);
    let cls = t.classify(1e-10);
    let tol = 1e-8 * scale;

    let reps: Vec<(f64, f64)> = e
        .atoms
        .iter()
        .map(|a| {
            let sp = a.p.slice_split(j);
            (sp.u, sp.v)
        })
        .collect();
    let max_over = |f: &dyn Fn(&(f64, f64)) -> f64| reps.iter().map(f).fold(0.0, f64::max);

    let mut checks = Vec::new();
    let mut push = |name, applicable, worst: f64, bound: f64| {
        checks.push(FormCheck { name, applicable, worst, ok: !applicable || worst <= bound });
    };
    push(
        "self_adjoint_atoms_real",
        cls.hermitian,
        if cls.hermitian { max_over(&|&(_, v)| v) } else { 0.0 },
        tol,
    );
    push(
        "anti_self_adjoint_atoms_imaginary",
        cls.anti_hermitian,
        if cls.anti_hermitian { max_over(&|&(u, _)| u.abs()) } else { 0.0 },
        tol,
    );
    push(
        "unitary_atoms_on_the_arc",
        cls.unitary,
        if cls.unitary { max_over(&|&(u, v)| (u.hypot(v) - 1.0).abs()) } else { 0.0 },
        tol,
    );
    let reconstruction_residual = reconstruct(&e).sub(t).frob_norm();
    let passed = checks.iter().all(|c| c.ok) && reconstruction_residual <= 1e-9 * scale;
    Ok(CorollaryReport { checks, reconstruction_residual, passed })
}

/// Summary of the transform identities for one matrix.
#[derive(Debug, Clone, Serialize)]
pub struct TransformReport {
    pub norm_t: f64,
    pub norm_z: f64,
    /// `|C - (I - Z*Z)|` in Frobenius norm.
    pub c_identity_residual: f64,
    /// `|recover(z_transform(T)) - T|` in Frobenius norm.
    pub roundtrip_residual: f64,
    /// Conditioning diagnostic from the recovery.
    pub min_gap_1_minus_p2: f64,
}

/// Runs the transform and its inverse on a normal matrix and reports the
/// residuals of the defining identities.
pub fn transform_report(t: &QMatrix) -> Result<TransformReport> {
    let pair = z_transform(t)?;
    let n = t.dim();
    let c_identity_residual = pair
        .c
        .sub(&QMatrix::identity(n).sub(&pair.z.adjoint().matmul(&pair.z)))
        .frob_norm();
    let rec = recover_t(&pair)?;
    Ok(TransformReport {
        norm_t: t.operator_norm()?,
        norm_z: pair.z.operator_norm()?,
        c_identity_residual,
        roundtrip_residual: rec.t.sub(t).frob_norm(),
        min_gap_1_minus_p2: rec.min_gap_one_minus_p2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::Quaternion as Q;
    use crate::s_spectrum::{s_spectrum, sphere_distance};

    const J1: ImaginaryUnit = ImaginaryUnit::E1;

    #[test]
    fn c_transform_pinned_values() {
        let zero = QMatrix::zeros(2);
        assert!(c_transform(&zero).unwrap().sub(&QMatrix::identity(2)).max_abs() < 1e-15);

        let one = QMatrix::diagonal(&[Q::ONE]);
        assert!((c_transform(&one).unwrap()[(0, 0)] - Q::real(0.5)).norm() < 1e-14);

        let mut rng = SeededRng::new(139);
        for _ in 0..5 {
            let n = 1 + rng.index(5);
            let t = random::matrix(&mut rng, n);
            let c = c_transform(&t).unwrap();
            let eig = c.hermitian_eigen(1e-8).unwrap();
            for &l in &eig.eigenvalues {
                assert!(l > 0.0 && l <= 1.0 + 1e-12, "eigenvalue {l}");
            }
            // Literal inverse route agrees with the eigendecomposition route.
            let pair = z_transform(&t).unwrap();
            assert!(c.sub(&pair.c).frob_norm() <= 1e-10 * (1.0 + t.frob_norm().powi(2)));
        }
    }

    #[test]
    fn z_transform_pinned_values() {
        let zero = QMatrix::zeros(3);
        assert!(z_transform(&zero).unwrap().z.max_abs() < 1e-15);

        let t = QMatrix::diagonal(&[Q::real(2.0), Q::real(-0.5)]);
        let pair = z_transform(&t).unwrap();
        let want = QMatrix::diagonal(&[
            Q::real(2.0 / 5.0f64.sqrt()),
            Q::real(-0.5 / 1.25f64.sqrt()),
        ]);
        assert!(pair.z.sub(&want).max_abs() < 1e-13);

        let t = QMatrix::diagonal(&[Q::E1]);
        let pair = z_transform(&t).unwrap();
        assert!((pair.z[(0, 0)] - Q::E1 * (1.0 / 2.0f64.sqrt())).norm() < 1e-14);
        assert!((pair.c[(0, 0)] - Q::real(0.5)).norm() < 1e-14);
    }

    #[test]
    fn transform_invariants_hold_for_normal_and_general_matrices() {
        let mut rng = SeededRng::new(149);
        for trial in 0..20 {
            let n = 1 + rng.index(5);
            let t = if trial % 2 == 0 {
                random::normal(&mut rng, n).matrix
            } else {
                random::matrix(&mut rng, n)
            };
            let pair = z_transform(&t).unwrap();
            let norm_z = pair.z.operator_norm().unwrap();
            assert!(norm_z <= 1.0 + 1e-10, "norm {norm_z}");
            let identity = pair
                .c
                .sub(&QMatrix::identity(n).sub(&pair.z.adjoint().matmul(&pair.z)))
                .frob_norm();
            assert!(identity <= 1e-10, "identity residual {identity}");
            // Adjoint compatibility: (Z_T)* = Z_{T*}.
            let pair_adj = z_transform(&t.adjoint()).unwrap();
            let adj_res = pair.z.adjoint().sub(&pair_adj.z).frob_norm();
            assert!(adj_res <= 1e-10 * (1.0 + t.frob_norm()), "adjoint residual {adj_res}");
            // Normality is preserved.
            if trial % 2 == 0 {
                assert!(pair.z.classify(1e-8).normal);
            }
        }
    }

    #[test]
    fn phi_psi_scalar_maps() {
        assert_eq!(phi(Q::ZERO).unwrap(), Q::ZERO);
        let p = Q::real(1.0 / 2.0f64.sqrt());
        assert!((phi(p).unwrap() - Q::ONE).norm() < 1e-13);
        assert!(phi(Q::ONE).is_err());
        assert!(phi(Q::E1 * 1.5).is_err());

        let mut rng = SeededRng::new(151);
        for _ in 0..50 {
            let q = random::quaternion(&mut rng) * 10.0f64.powi(rng.index(7) as i32 - 2);
            let round = phi(psi(q)).unwrap();
            // Computing 1 - |psi(q)|^2 loses the digits |q|^2 consumed, so
            // the achievable roundtrip error grows like eps * |q|^3.
            let tol = 2e-15 * (1.0 + q.norm()).powi(3) + 1e-14;
            assert!((round - q).norm() <= tol, "q={q} round={round}");
        }
        for _ in 0..20 {
            let p = random::quaternion(&mut rng) * 0.49;
            let round = psi(phi(p).unwrap());
            assert!((round - p).norm() <= 1e-14);
        }
    }

    #[test]
    fn spectrum_of_z_is_psi_of_spectrum_of_t() {
        let mut rng = SeededRng::new(157);
        for _ in 0..8 {
            let n = 1 + rng.index(5);
            let t = random::normal(&mut rng, n).matrix;
            let pair = z_transform(&t).unwrap();
            let spec_t = s_spectrum(&t, J1).unwrap();
            let spec_z = s_spectrum(&pair.z, J1).unwrap();
            assert_eq!(spec_t.spheres.len(), spec_z.spheres.len());
            // psi does not preserve the (u, v) ordering, so pair each
            // sphere of T with the nearest sphere of Z.
            for st in &spec_t.spheres {
                let predicted = psi(st.rep).slice_split(J1);
                let sz = spec_z
                    .spheres
                    .iter()
                    .min_by(|a, b| {
                        let da = sphere_distance(a.rep, predicted.u, predicted.v);
                        let db = sphere_distance(b.rep, predicted.u, predicted.v);
                        da.partial_cmp(&db).unwrap()
                    })
                    .unwrap();
                let d = sphere_distance(sz.rep, predicted.u, predicted.v);
                assert!(d <= 1e-9, "distance {d}");
                assert_eq!(st.multiplicity, sz.multiplicity);
                // phi maps the transform sphere back; its derivative grows
                // like (1 - |p|^2)^{-3/2} = (1 + |q|^2)^{3/2}.
                let back = phi(sz.rep).unwrap();
                let spt = st.rep.slice_split(J1);
                let amp = (1.0 + st.rep.norm_sqr()).powf(1.5);
                assert!(sphere_distance(back, spt.u, spt.v) <= 1e-9 * amp);
            }
        }
    }

    #[test]
    fn recovery_pinned_and_random() {
        let zero = QMatrix::zeros(2);
        let rec = recover_t(&z_transform(&zero).unwrap()).unwrap();
        assert!(rec.t.max_abs() < 1e-14);
        assert!((rec.min_gap_one_minus_p2 - 1.0).abs() < 1e-12);

        let t = QMatrix::diagonal(&[Q::real(1000.0)]);
        let rec = recover_t(&z_transform(&t).unwrap()).unwrap();
        assert!((rec.t[(0, 0)] - Q::real(1000.0)).norm() <= 1e-6 * 1000.0);

        let mut rng = SeededRng::new(163);
        for trial in 0..10 {
            let n = 1 + rng.index(5);
            let scale = 10.0f64.powi(rng.index(4) as i32);
            let t = random::normal(&mut rng, n).matrix.scale(scale);
            let norm_t = t.operator_norm().unwrap();
            let rec = recover_t(&z_transform(&t).unwrap()).unwrap();
            let res = rec.t.sub(&t).frob_norm();
            assert!(
                res <= 1e-8 * 1.0f64.max(norm_t),
                "trial {trial}: residual {res} at norm {norm_t}"
            );
        }
    }

    #[test]
    fn recovery_agrees_with_the_literal_route_at_moderate_norms() {
        let mut rng = SeededRng::new(167);
        for _ in 0..6 {
            let n = 1 + rng.index(4);
            let t = random::normal(&mut rng, n).matrix.scale(1.0 + 4.0 * rng.index(3) as f64);
            let norm_t = t.operator_norm().unwrap();
            assert!(norm_t <= 40.0);
            let pair = z_transform(&t).unwrap();
            let spectral_route = recover_t(&pair).unwrap().t;
            let literal_route = recover_t_direct(&pair).unwrap();
            let gap = spectral_route.sub(&literal_route).frob_norm();
            assert!(gap <= 1e-8 * 1.0f64.max(norm_t), "routes differ by {gap}");
        }
    }

    #[test]
    fn large_norm_stress() {
        let mut rng = SeededRng::new(173);
        let huge = Q::real(1.0e6);
        let spheres = [
            (huge, 1usize),
            (Q::new(1.0, 2.0, 0.0, 0.0), 2usize),
            (Q::real(-3.0), 1usize),
        ];
        let t = unbounded_model(&spheres, J1, &mut rng);
        let norm_t = t.operator_norm().unwrap();
        assert!(norm_t >= 1.0e6 - 1.0);
        let rep = transform_report(&t).unwrap();
        assert!(rep.roundtrip_residual <= 1e-6 * norm_t, "{rep:?}");
        assert!(rep.min_gap_1_minus_p2 < 1e-11);
        assert!(rep.norm_z <= 1.0 + 1e-10);

        // An anti-self-adjoint model with a huge sphere.
        let t = unbounded_model(&[(Q::E1 * 1.0e6, 1), (Q::E1 * 2.0, 1)], J1, &mut rng);
        assert!(t.classify(1e-8).anti_hermitian);
        let rep = transform_report(&t).unwrap();
        assert!(rep.roundtrip_residual <= 1e-6 * 1.0e6, "{rep:?}");
    }

    #[test]
    fn unbounded_model_prescribes_the_spectrum() {
        let mut rng = SeededRng::new(179);
        let t = unbounded_model(&[(Q::ONE, 1), (Q::real(2.0), 1)], J1, &mut rng);
        let spec = s_spectrum(&t, J1).unwrap();
        assert_eq!(spec.spheres.len(), 2);
        assert!((spec.spheres[0].rep - Q::ONE).norm() < 1e-10);
        assert!((spec.spheres[1].rep - Q::real(2.0)).norm() < 1e-10);

        let spheres = [
            (Q::new(0.5, 1.5, 0.0, 0.0), 2usize),
            (Q::real(4.0), 1usize),
            (Q::new(-2.0, 0.5, 0.0, 0.0), 1usize),
        ];
        let t = unbounded_model(&spheres, J1, &mut rng);
        let spec = s_spectrum(&t, J1).unwrap();
        let norm_t = t.operator_norm().unwrap();
        assert_eq!(spec.total_multiplicity(), 4);
        for (rep, mult) in &spheres {
            let sp = rep.slice_split(J1);
            let hit = spec
                .spheres
                .iter()
                .find(|s| sphere_distance(s.rep, sp.u, sp.v) <= 1e-8 * 1.0f64.max(norm_t));
            assert_eq!(hit.expect("sphere missing").multiplicity, *mult);
        }
    }

    #[test]
    fn corollary_forms() {
        let t = QMatrix::diagonal(&[Q::real(-1.0), Q::real(3.0)]);
        let rep = corollary_forms_check(&t).unwrap();
        assert!(rep.passed, "{rep:?}");
        assert!(rep.checks.iter().any(|c| c.name == "self_adjoint_atoms_real" && c.applicable));

        let t = QMatrix::diagonal(&[Q::E1]);
        let rep = corollary_forms_check(&t).unwrap();
        assert!(rep.passed);
        assert!(rep
            .checks
            .iter()
            .any(|c| c.name == "anti_self_adjoint_atoms_imaginary" && c.applicable));
        // This one is unitary too: atom at angle pi/2 on the arc.
        assert!(rep.checks.iter().any(|c| c.name == "unitary_atoms_on_the_arc" && c.applicable));

        let theta = std::f64::consts::PI / 3.0;
        let t = QMatrix::diagonal(&[Q::real(theta.cos()) + Q::E2 * theta.sin()]);
        let rep = corollary_forms_check(&t).unwrap();
        assert!(rep.passed, "{rep:?}");
        let u = rep.checks.iter().find(|c| c.name == "unitary_atoms_on_the_arc").unwrap();
        assert!(u.applicable && u.ok);

        // A generic normal matrix: no class applies, reconstruction holds.
        let mut rng = SeededRng::new(181);
        let t = random::normal(&mut rng, 3).matrix;
        let rep = corollary_forms_check(&t).unwrap();
        assert!(rep.passed, "{rep:?}");
    }
}
