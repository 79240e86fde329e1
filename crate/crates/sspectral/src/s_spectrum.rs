//! The S-spectrum, S-resolvent operators, and their verification.
//!
//! For a right linear `T` the relevant spectral object is not the set of
//! eigenvalues of a single operator but the set of `s` for which the
//! *pseudo-resolvent*
//!
//! ```text
//! R_s(T) = T^2 - 2 Re(s) T + |s|^2 I
//! ```
//!
//! fails to be invertible.  That set, the S-spectrum, depends on `s` only
//! through `(Re s, |s|)`, so it is a union of 2-spheres `{u + iv : i in S}`;
//! each sphere is represented by its unique point `u + jv`, `v >= 0`, in the
//! chosen upper half-slice.  At matrix scale the S-spectrum coincides with
//! the set of right eigenvalues, which this module computes from the
//! eigenvalues of the complex adjoint representation.

use crate::cmatrix::{self};
use crate::error::{Error, Result};
use crate::qmatrix::{self, QMatrix};
use crate::quaternion::{ImaginaryUnit, Quaternion};
use serde::Serialize;

/// One sphere `{u + iv}` of the S-spectrum.
#[derive(Debug, Clone, Serialize)]
pub struct EigenSphere {
    /// The representative `u + jv` with `v >= 0` in the chosen slice.
    pub rep: Quaternion,
    /// Quaternionic dimension of the joint eigenspace.
    pub multiplicity: usize,
    /// Orthogonal projection onto the eigenspace; present only when the
    /// input was normal.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub projection: Option<QMatrix>,
}

/// The full S-spectrum of a matrix, spheres sorted by `(Re, |Im|)`.
#[derive(Debug, Clone, Serialize)]
pub struct SSpectrum {
    /// Spheres in ascending `(Re rep, |Im rep|)` order.
    pub spheres: Vec<EigenSphere>,
    /// The slice unit used for representatives.
    pub j: ImaginaryUnit,
    /// Whether the input passed the normality test; projections are only
    /// attached when it did.
    pub normal: bool,
}

impl SSpectrum {
    /// Representatives in order.
    pub fn reps(&self) -> Vec<Quaternion> {
        self.spheres.iter().map(|s| s.rep).collect()
    }

    /// Sum of multiplicities; equals the matrix dimension.
    pub fn total_multiplicity(&self) -> usize {
        self.spheres.iter().map(|s| s.multiplicity).sum()
    }
}

/// Half-plane distance from the point `q` to the sphere through `u + jv`:
/// `hypot(Re q - u, |Im q| - v)`, which equals the quaternionic distance
/// from `q` to the nearest point of the sphere.
pub fn sphere_distance(q: Quaternion, u: f64, v: f64) -> f64 {
    (q.re - u).hypot(q.imag_norm() - v)
}

/// The pseudo-resolvent `T^2 - 2 Re(s) T + |s|^2 I`.
///
/// Only `(Re s, |s|)` enter the formula, so every point of a sphere yields
/// the same matrix.
pub fn pseudo_resolvent(t: &QMatrix, s: Quaternion) -> QMatrix {
    let u = s.re;
    let modulus_sq = u * u + (s.i * s.i + s.j * s.j + s.k * s.k);
    let t2 = t.matmul(t);
    let shift = QMatrix::identity(t.dim()).scale(modulus_sq);
    t2.sub(&t.scale(2.0 * u)).add(&shift)
}

/// Whether `s` lies in the S-resolvent set of `T` at tolerance `tol`:
/// the smallest singular value of the pseudo-resolvent must reach
/// `tol * max(1, |T|^2)`.
pub fn in_s_resolvent_set(t: &QMatrix, s: Quaternion, tol: f64) -> Result<bool> {
    let norm_t = t.operator_norm()?;
    let scale = 1.0f64.max(norm_t * norm_t);
    let sigma_min = pseudo_resolvent(t, s).smallest_singular_value()?;
    Ok(sigma_min >= tol * scale)
}

/// Internal representation of one extracted eigensphere.
pub(crate) struct SphereGroup {
    /// Real part of the representative (snapped mean over the cluster).
    pub u: f64,
    /// Imaginary magnitude of the representative, `>= 0`.
    pub v: f64,
    /// Quaternionic multiplicity.
    pub multiplicity: usize,
    /// Orthonormal right eigenvectors with `T y = y (u + e1 v)`; empty when
    /// the matrix is not normal.
    pub vectors: Vec<Vec<Quaternion>>,
}

/// Shared eigensphere extraction.
pub(crate) struct Extraction {
    pub groups: Vec<SphereGroup>,
    pub normal: bool,
    pub norm_t: f64,
}

/// Computes the spheres of the S-spectrum from the complex adjoint
/// representation, grouping its eigenvalues into conjugate clusters.
///
/// Two eigenvalues belong to one sphere when both their real parts and
/// their imaginary magnitudes agree within the grouping tolerance
/// (`1e-8 * max(1, |T|)` unless overridden).  Components of the resulting
/// representative that fall below a much tighter snap threshold are set to
/// exactly zero so structurally real or imaginary spectra print cleanly.
pub(crate) fn extract_spheres(
    t: &QMatrix,
    grouping_tol: Option<f64>,
    force_vectors: bool,
) -> Result<Extraction> {
    let n = t.dim();
    let norm_t = t.operator_norm()?;
    let scale = 1.0f64.max(norm_t);
    let g = grouping_tol.unwrap_or(1e-8 * scale);
    let snap = (1e-12 * scale).min(0.1 * g);
    let normal = t.classify(1e-10).normal;
    // `force_vectors` extracts eigenvectors even when the strict normality
    // probe fails; callers use it for matrices that are normal up to a
    // construction error they account for themselves.
    let with_vectors = normal || force_vectors;

    let schur = cmatrix::schur(&t.chi())?;
    let eigs = schur.eigenvalues();

    // Sort eigenvalue indices by (Re, |Im|) and split on gaps larger than g.
    let mut order: Vec<usize> = (0..2 * n).collect();
    let key = |k: usize| (eigs[k].re, eigs[k].im.abs());
    order.sort_by(|&a, &b| {
        let (ua, va) = key(a);
        let (ub, vb) = key(b);
        ua.partial_cmp(&ub).unwrap().then(va.partial_cmp(&vb).unwrap())
    });
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut re_block: Vec<usize> = Vec::new();
    let flush =
        |block: &mut Vec<usize>, groups: &mut Vec<Vec<usize>>| {
            // Split one real-part block further along |Im|.
            block.sort_by(|&a, &b| key(a).1.partial_cmp(&key(b).1).unwrap());
            let mut sub: Vec<usize> = Vec::new();
            for &k in block.iter() {
                if let Some(&prev) = sub.last() {
                    if key(k).1 - key(prev).1 > g {
                        groups.push(std::mem::take(&mut sub));
                    }
                }
                sub.push(k);
            }
            if !sub.is_empty() {
                groups.push(sub);
            }
            block.clear();
        };
    for &k in &order {
        if let Some(&prev) = re_block.last() {
            if key(k).0 - key(prev).0 > g {
                flush(&mut re_block, &mut groups);
            }
        }
        re_block.push(k);
    }
    flush(&mut re_block, &mut groups);

    let mut spheres = Vec::with_capacity(groups.len());
    for members in groups {
        let count = members.len();
        if count % 2 != 0 {
            return Err(Error::Internal(format!(
                "eigenvalue cluster of odd size {count}; conjugate pairing failed"
            )));
        }
        let m = count / 2;
        let mut u = members.iter().map(|&k| eigs[k].re).sum::<f64>() / count as f64;
        let mut v = members.iter().map(|&k| eigs[k].im.abs()).sum::<f64>() / count as f64;
        if u.abs() <= snap {
            u = 0.0;
        }
        if v <= snap {
            v = 0.0;
        }
        let vectors = if with_vectors {
            // For normal input the Schur factor is diagonal, so the columns
            // of Q attached to the cluster are eigenvectors.  Real spheres
            // use all 2m columns (the eigenspace is one complex space of
            // dimension 2m); complex spheres use the m columns with largest
            // imaginary part, which carry the upper half-plane eigenvalue.
            let mut chosen: Vec<usize> = members.clone();
            if v > 0.0 {
                chosen.sort_by(|&a, &b| eigs[b].im.partial_cmp(&eigs[a].im).unwrap());
                chosen.truncate(m);
            }
            let candidates: Vec<Vec<Quaternion>> = chosen
                .iter()
                .map(|&k| qmatrix::cvec_to_qvec(&schur.q.column(k)))
                .collect();
            qmatrix::select_orthonormal(&candidates, m, 1e-2).map_err(|_| {
                Error::Internal(format!(
                    "sphere at ({u}, {v}): fewer than {m} independent \
                     quaternionic eigenvectors"
                ))
            })?
        } else {
            Vec::new()
        };
        spheres.push(SphereGroup { u, v, multiplicity: m, vectors });
    }
    spheres.sort_by(|a, b| a.u.partial_cmp(&b.u).unwrap().then(a.v.partial_cmp(&b.v).unwrap()));
    Ok(Extraction { groups: spheres, normal, norm_t })
}

/// The S-spectrum of `T` with representatives in the upper half-slice of
/// `j`.  Projections are attached when `T` is normal.
pub fn s_spectrum(t: &QMatrix, j: ImaginaryUnit) -> Result<SSpectrum> {
    let ex = extract_spheres(t, None, false)?;
    let n = t.dim();
    let spheres = ex
        .groups
        .iter()
        .map(|grp| {
            let projection = if ex.normal {
                let ones = vec![Quaternion::ONE; grp.vectors.len()];
                Some(qmatrix::assemble_from_eigenpairs(n, &ones, &grp.vectors))
            } else {
                None
            };
            EigenSphere { rep: j.embed(grp.u, grp.v), multiplicity: grp.multiplicity, projection }
        })
        .collect();
    Ok(SSpectrum { spheres, j, normal: ex.normal })
}

fn resolvent_preflight(t: &QMatrix, s: Quaternion, tol: f64) -> Result<QMatrix> {
    if !in_s_resolvent_set(t, s, tol)? {
        return Err(Error::Singular { context: "pseudo-resolvent at a point of the S-spectrum" });
    }
    pseudo_resolvent(t, s).inverse()
}

/// The left S-resolvent `-R_s(T)^{-1} (T - conj(s) I)`.
///
/// `s` must lie in the S-resolvent set at tolerance `tol`.
pub fn s_resolvent_left(t: &QMatrix, s: Quaternion, tol: f64) -> Result<QMatrix> {
    let rinv = resolvent_preflight(t, s, tol)?;
    let shifted = t.sub(&QMatrix::identity(t.dim()).scalar_left(s.conj()));
    Ok(rinv.matmul(&shifted).neg())
}

/// The right S-resolvent `-(T - conj(s) I) R_s(T)^{-1}`.
pub fn s_resolvent_right(t: &QMatrix, s: Quaternion, tol: f64) -> Result<QMatrix> {
    let rinv = resolvent_preflight(t, s, tol)?;
    let shifted = t.sub(&QMatrix::identity(t.dim()).scalar_left(s.conj()));
    Ok(shifted.matmul(&rinv).neg())
}

/// Norms of both sides of an operator identity and of their difference
/// (all Frobenius).
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub lhs_norm: f64,
    pub rhs_norm: f64,
    pub residual: f64,
}

/// Evaluates both sides of the S-resolvent equation
///
/// ```text
/// S_R^-1(s,T) S_L^-1(p,T) =
///   { (S_R^-1(s,T) - S_L^-1(p,T)) p  -  conj(s) (S_R^-1(s,T) - S_L^-1(p,T)) }
///   (p^2 - 2 Re(s) p + |s|^2)^-1
/// ```
///
/// with the scalar products placed exactly as written (`p` and the inverted
/// scalar multiply from the right, `conj(s)` from the left), and returns the
/// norms of the two sides and of their difference.
///
/// `s` and `p` must lie in the S-resolvent set, and `p` must stay off the
/// sphere of `s` so the scalar factor is invertible.
pub fn check_resolvent_equation(
    t: &QMatrix,
    s: Quaternion,
    p: Quaternion,
    tol: f64,
) -> Result<ResidualReport> {
    let sr_s = s_resolvent_right(t, s, tol)?;
    let sl_p = s_resolvent_left(t, p, tol)?;
    let scalar = p * p - p * (2.0 * s.re) + Quaternion::real(s.norm_sqr());
    let scalar_scale = 1.0f64.max(p.norm_sqr()).max(s.norm_sqr());
    if scalar.norm() <= 1e-10 * scalar_scale {
        return Err(Error::Domain(format!(
            "p = {p} lies on the sphere of s = {s}: the scalar factor is singular"
        )));
    }
    let lhs = sr_s.matmul(&sl_p);
    let diff = sr_s.sub(&sl_p);
    let bracket = diff.scalar_right(p).sub(&diff.scalar_left(s.conj()));
    let rhs = bracket.scalar_right(scalar.inverse()?);
    Ok(ResidualReport {
        lhs_norm: lhs.frob_norm(),
        rhs_norm: rhs.frob_norm(),
        residual: lhs.sub(&rhs).frob_norm(),
    })
}

/// One named containment check inside a [`SpectrumBoundReport`].
#[derive(Debug, Clone, Serialize)]
pub struct ClassCheck {
    /// Which containment was tested.
    pub name: &'static str,
    /// Worst violation observed (0 when fully inside).
    pub worst: f64,
    /// Whether the containment holds at the report's tolerance.
    pub ok: bool,
}

/// Result of [`spectrum_bound_check`].
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumBoundReport {
    pub norm_t: f64,
    /// Largest `|rep|` over the spheres.
    pub max_rep_norm: f64,
    /// `|rep| <= |T|` within tolerance for every sphere.
    pub norm_bound_ok: bool,
    /// Containments implied by the structure of the matrix.
    pub checks: Vec<ClassCheck>,
    pub passed: bool,
}

/// Verifies the norm bound `|rep| <= |T|` for every sphere and, when the
/// matrix is positive / self-adjoint / anti-self-adjoint / unitary, the
/// corresponding containment of the S-spectrum: `[0, |T|]` / `[-|T|, |T|]` /
/// the purely imaginary quaternions / the unit sphere `|q| = 1`.
pub fn spectrum_bound_check(t: &QMatrix, tol: f64) -> Result<SpectrumBoundReport> {
    let spec = s_spectrum(t, ImaginaryUnit::DEFAULT)?;
    let norm_t = t.operator_norm()?;
    let margin = tol * 1.0f64.max(norm_t);
    let class = t.classify(tol);
    let reps = spec.reps();
    let max_rep_norm = reps.iter().map(|r| r.norm()).fold(0.0, f64::max);
    let norm_bound_ok = max_rep_norm <= norm_t + margin;
    let mut checks = Vec::new();
    let worst_over = |f: &dyn Fn(&Quaternion) -> f64| reps.iter().map(f).fold(0.0, f64::max);
    if class.hermitian {
        let worst = worst_over(&|r| r.imag_norm());
        checks.push(ClassCheck { name: "self_adjoint_spectrum_real", worst, ok: worst <= margin });
    }
    if class.positive {
        let worst = worst_over(&|r| r.imag_norm().max(-r.re));
        checks.push(ClassCheck {
            name: "positive_spectrum_nonnegative",
            worst,
            ok: worst <= margin,
        });
    }
    if class.anti_hermitian {
        let worst = worst_over(&|r| r.re.abs());
        checks.push(ClassCheck {
            name: "anti_self_adjoint_spectrum_imaginary",
            worst,
            ok: worst <= margin,
        });
    }
    if class.unitary {
        let worst = worst_over(&|r| (r.norm() - 1.0).abs());
        checks.push(ClassCheck { name: "unitary_spectrum_unit_modulus", worst, ok: worst <= margin });
    }
    let passed = norm_bound_ok && checks.iter().all(|c| c.ok);
    Ok(SpectrumBoundReport { norm_t, max_rep_norm, norm_bound_ok, checks, passed })
}
