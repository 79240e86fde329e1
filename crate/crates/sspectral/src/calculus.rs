//! Functional calculi over a spectral measure.
//!
//! Four routes to `f(T)` for normal `T`, all reducing to weighted sums over
//! the eigenvector basis at finite dimension:
//!
//! * **continuous** — slice functions `f(u + jv) = alpha(u,v) + j beta(u,v)`
//!   evaluated on the atoms;
//! * **polynomial** — intrinsic `f` approximated by real bivariate
//!   polynomials in the commuting pair `(A, B)`, assembled as
//!   `f0(A,B) + J f1(A,B)`;
//! * **simple** — finitely many slice scalars on disjoint atom sets,
//!   `f(T) = sum_n c_n E(sigma_n)`;
//! * **extended measurable** — values in `C_j ∪ {infinity}` with a bounding
//!   sequence of atom sets and an explicit domain projection.
//!
//! Scalars act by left multiplication in the eigenvector basis throughout,
//! which is what makes the product identities hold.

use crate::error::{Error, Result};
use crate::qmatrix::{inner, vec_norm, QMatrix};
use crate::quaternion::{ImaginaryUnit, Quaternion};
use crate::random::SeededRng;
use crate::s_spectrum::{s_spectrum, sphere_distance};
use crate::spectral::{decompose_tabj, spectral_measure, SpectralAtom, SpectralMeasure};
use serde::Serialize;
use std::rc::Rc;

/// Where the component functions of a slice function take their values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Codomain {
    /// `alpha`, `beta` real-valued; the calculus is a *-homomorphism.
    Intrinsic,
    /// `alpha`, `beta` valued in the slice of the measure in use.
    SliceValued,
    /// Fully quaternion-valued components.  The type admits them, but no
    /// calculus is defined on them here.
    QuaternionValued,
}

type Bivariate = Rc<dyn Fn(f64, f64) -> Quaternion>;

/// A slice continuous function `f(u + jv) = alpha(u,v) + j beta(u,v)` with
/// `alpha` even and `beta` odd in `v`.
#[derive(Clone)]
pub struct SliceFunction {
    /// Display name, mostly for error messages.
    pub name: String,
    /// Declared codomain of `alpha` and `beta`.
    pub codomain: Codomain,
    alpha: Bivariate,
    beta: Bivariate,
}

impl std::fmt::Debug for SliceFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SliceFunction")
            .field("name", &self.name)
            .field("codomain", &self.codomain)
            .finish()
    }
}

fn join_codomain(a: Codomain, b: Codomain) -> Codomain {
    use Codomain::*;
    match (a, b) {
        (QuaternionValued, _) | (_, QuaternionValued) => QuaternionValued,
        (SliceValued, _) | (_, SliceValued) => SliceValued,
        _ => Intrinsic,
    }
}

impl SliceFunction {
    /// Builds a slice function from quaternion-valued components.
    pub fn new(
        name: impl Into<String>,
        codomain: Codomain,
        alpha: impl Fn(f64, f64) -> Quaternion + 'static,
        beta: impl Fn(f64, f64) -> Quaternion + 'static,
    ) -> Self {
        SliceFunction { name: name.into(), codomain, alpha: Rc::new(alpha), beta: Rc::new(beta) }
    }

    /// Builds an intrinsic slice function from real components.
    pub fn intrinsic(
        name: impl Into<String>,
        alpha: impl Fn(f64, f64) -> f64 + 'static,
        beta: impl Fn(f64, f64) -> f64 + 'static,
    ) -> Self {
        SliceFunction::new(
            name,
            Codomain::Intrinsic,
            move |u, v| Quaternion::real(alpha(u, v)),
            move |u, v| Quaternion::real(beta(u, v)),
        )
    }

    /// The even component at `(u, v)`.
    pub fn alpha(&self, u: f64, v: f64) -> Quaternion {
        (self.alpha)(u, v)
    }

    /// The odd component at `(u, v)`.
    pub fn beta(&self, u: f64, v: f64) -> Quaternion {
        (self.beta)(u, v)
    }

    /// The value `alpha(u,v) + j beta(u,v)`.
    pub fn value(&self, u: f64, v: f64, j: ImaginaryUnit) -> Quaternion {
        self.alpha(u, v) + j.as_quaternion() * self.beta(u, v)
    }

    /// How far the pair `(alpha, beta)` is from the required even/odd
    /// symmetry at `(u, ±v)`.
    pub fn symmetry_residual(&self, u: f64, v: f64) -> f64 {
        let a = (self.alpha(u, v) - self.alpha(u, -v)).norm();
        let b = (self.beta(u, v) + self.beta(u, -v)).norm();
        a + b
    }

    /// Errors with [`Error::InvalidSliceFunction`] when the even/odd
    /// symmetry fails at `(u, ±v)` beyond roundoff.
    pub fn check_symmetry(&self, u: f64, v: f64) -> Result<()> {
        let scale = 1.0
            + self.alpha(u, v).norm()
            + self.beta(u, v).norm();
        let residual = self.symmetry_residual(u, v);
        if residual > 1e-8 * scale {
            return Err(Error::InvalidSliceFunction { u, v, residual });
        }
        Ok(())
    }

    /// Pointwise sum.
    pub fn add(&self, g: &SliceFunction) -> SliceFunction {
        let (fa, fb) = (self.alpha.clone(), self.beta.clone());
        let (ga, gb) = (g.alpha.clone(), g.beta.clone());
        SliceFunction {
            name: format!("({} + {})", self.name, g.name),
            codomain: join_codomain(self.codomain, g.codomain),
            alpha: Rc::new(move |u, v| fa(u, v) + ga(u, v)),
            beta: Rc::new(move |u, v| fb(u, v) + gb(u, v)),
        }
    }

    /// Pointwise product, valid when component values commute with the
    /// slice unit (intrinsic or slice-valued operands):
    /// `(a1 + j b1)(a2 + j b2) = a1 a2 - b1 b2 + j (a1 b2 + b1 a2)`.
    pub fn mul(&self, g: &SliceFunction) -> SliceFunction {
        let (fa, fb) = (self.alpha.clone(), self.beta.clone());
        let (ga, gb) = (g.alpha.clone(), g.beta.clone());
        let fa2 = fa.clone();
        let fb2 = fb.clone();
        let ga2 = ga.clone();
        let gb2 = gb.clone();
        SliceFunction {
            name: format!("({} * {})", self.name, g.name),
            codomain: join_codomain(self.codomain, g.codomain),
            alpha: Rc::new(move |u, v| fa(u, v) * ga(u, v) - fb(u, v) * gb(u, v)),
            beta: Rc::new(move |u, v| fa2(u, v) * gb2(u, v) + fb2(u, v) * ga2(u, v)),
        }
    }

    /// Pointwise conjugate `conj(f) = conj(alpha) + j (-conj(beta))`.
    pub fn conj_fn(&self) -> SliceFunction {
        let (fa, fb) = (self.alpha.clone(), self.beta.clone());
        SliceFunction {
            name: format!("conj({})", self.name),
            codomain: self.codomain,
            alpha: Rc::new(move |u, v| fa(u, v).conj()),
            beta: Rc::new(move |u, v| -fb(u, v).conj()),
        }
    }
}

/// Evaluates a slice function at a quaternion through its half-plane
/// coordinates, checking the even/odd symmetry at the evaluation point.
pub fn eval_slice(f: &SliceFunction, q: Quaternion) -> Result<Quaternion> {
    let sp = q.slice_split(ImaginaryUnit::DEFAULT);
    if sp.v > 0.0 {
        f.check_symmetry(sp.u, sp.v)?;
    }
    Ok(f.value(sp.u, sp.v, sp.unit))
}

/// Named functions usable from the command line and in reports:
/// `id`, `re`, `immag`, `sq`, `sqrt`, `exp_re`, `inv`, `abs2`,
/// `const:r` / `const:a,b,c,d`.
pub fn builtin(spec: &str) -> Result<SliceFunction> {
    match spec {
        "id" => Ok(SliceFunction::intrinsic("id", |u, _| u, |_, v| v)),
        "re" => Ok(SliceFunction::intrinsic("re", |u, _| u, |_, _| 0.0)),
        "immag" => Ok(SliceFunction::intrinsic("immag", |_, _| 0.0, |_, v| v)),
        "sq" => Ok(SliceFunction::intrinsic("sq", |u, v| u * u - v * v, |u, v| 2.0 * u * v)),
        "abs2" => Ok(SliceFunction::intrinsic("abs2", |u, v| u * u + v * v, |_, _| 0.0)),
        "exp_re" => Ok(SliceFunction::intrinsic("exp_re", |u, _| u.exp(), |_, _| 0.0)),
        "sqrt" => Ok(SliceFunction::intrinsic(
            "sqrt",
            |u, v| {
                let r = u.hypot(v);
                r.sqrt() * (v.atan2(u) / 2.0).cos()
            },
            |u, v| {
                let r = u.hypot(v);
                r.sqrt() * (v.atan2(u) / 2.0).sin()
            },
        )),
        "inv" => Ok(SliceFunction::intrinsic(
            "inv",
            |u, v| u / (u * u + v * v),
            |u, v| -v / (u * u + v * v),
        )),
        _ => {
            if let Some(arg) = spec.strip_prefix("const:") {
                let parts: Vec<&str> = arg.split(',').collect();
                let comp = |s: &str| -> Result<f64> {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::Parse(format!("bad constant component '{s}'")))
                };
                let c = match parts.len() {
                    1 => Quaternion::real(comp(parts[0])?),
                    4 => Quaternion::new(
                        comp(parts[0])?,
                        comp(parts[1])?,
                        comp(parts[2])?,
                        comp(parts[3])?,
                    ),
                    _ => {
                        return Err(Error::Parse(format!(
                            "const takes 1 or 4 comma-separated numbers, got '{arg}'"
                        )))
                    }
                };
                let codomain = if c.imag_norm() == 0.0 {
                    Codomain::Intrinsic
                } else {
                    Codomain::SliceValued
                };
                Ok(SliceFunction::new(spec, codomain, move |_, _| c, |_, _| Quaternion::ZERO))
            } else {
                Err(Error::Parse(format!(
                    "unknown function '{spec}'; available: id, re, immag, sq, sqrt, exp_re, \
                     inv, abs2, const:<c>, chi:<k>"
                )))
            }
        }
    }
}

/// The indicator of a neighborhood of the `k`-th atom of a measure, which
/// on the atom set equals the indicator of that single atom.
pub fn indicator_of_atom(e: &SpectralMeasure, k: usize) -> Result<SliceFunction> {
    if k >= e.atoms.len() {
        return Err(Error::Domain(format!(
            "atom index {k} out of range for a measure with {} atoms",
            e.atoms.len()
        )));
    }
    let reps: Vec<(f64, f64)> = e
        .atoms
        .iter()
        .map(|a| {
            let sp = a.p.slice_split(e.j);
            (sp.u, sp.v)
        })
        .collect();
    let (uk, vk) = reps[k];
    let radius = reps
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != k)
        .map(|(_, &(u, v))| (u - uk).hypot(v - vk))
        .fold(f64::INFINITY, f64::min)
        .min(2.0)
        / 2.0;
    Ok(SliceFunction::intrinsic(
        format!("chi:{k}"),
        move |u, v| {
            if (u - uk).hypot(v.abs() - vk) < radius {
                1.0
            } else {
                0.0
            }
        },
        |_, _| 0.0,
    ))
}

/// Resolves a function name, including measure-dependent `chi:<k>`.
pub fn resolve_function(spec: &str, e: Option<&SpectralMeasure>) -> Result<SliceFunction> {
    if let Some(arg) = spec.strip_prefix("chi:") {
        let k: usize = arg
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad atom index '{arg}'")))?;
        let e = e.ok_or_else(|| {
            Error::Parse("chi:<k> needs a spectral measure to resolve the atom".into())
        })?;
        return indicator_of_atom(e, k);
    }
    builtin(spec)
}

/// How far a value is from the plane spanned by `1` and `j`.
fn off_slice_residual(w: Quaternion, j: ImaginaryUnit) -> f64 {
    let jq = j.as_quaternion();
    let along = w.i * jq.i + w.j * jq.j + w.k * jq.k;
    Quaternion::new(0.0, w.i - along * jq.i, w.j - along * jq.j, w.k - along * jq.k).norm()
}

/// The value of `f` at an atom of `e`, with codomain and finiteness checks.
fn atom_value(f: &SliceFunction, atom: &SpectralAtom, j: ImaginaryUnit) -> Result<Quaternion> {
    let sp = atom.p.slice_split(j);
    if sp.v > 0.0 {
        f.check_symmetry(sp.u, sp.v)?;
    }
    let a = f.alpha(sp.u, sp.v);
    let b = f.beta(sp.u, sp.v);
    let w = f.value(sp.u, sp.v, j);
    if !w.is_finite() {
        return Err(Error::Domain(format!(
            "'{}' is not finite at the atom {}",
            f.name, atom.p
        )));
    }
    let scale = 1.0 + w.norm();
    match f.codomain {
        Codomain::Intrinsic => {
            let residual = a.imag_norm() + b.imag_norm();
            if residual > 1e-8 * scale {
                return Err(Error::InvalidSliceFunction { u: sp.u, v: sp.v, residual });
            }
        }
        Codomain::SliceValued => {
            let residual = off_slice_residual(a, j) + off_slice_residual(b, j);
            if residual > 1e-8 * scale {
                return Err(Error::InvalidSliceFunction { u: sp.u, v: sp.v, residual });
            }
        }
        Codomain::QuaternionValued => {
            return Err(Error::Domain(format!(
                "no calculus is defined for the quaternion-valued function '{}'; \
                 use an intrinsic or slice-valued one",
                f.name
            )));
        }
    }
    Ok(w)
}

/// Values of `f` on all atoms of `e`, validated.
pub fn values_on_atoms(e: &SpectralMeasure, f: &SliceFunction) -> Result<Vec<Quaternion>> {
    e.atoms.iter().map(|atom| atom_value(f, atom, e.j)).collect()
}

/// The continuous calculus `f(T) = sum_k y_k f(p_k) <., y_k>`.
pub fn calc_continuous(e: &SpectralMeasure, f: &SliceFunction) -> Result<QMatrix> {
    let values = values_on_atoms(e, f)?;
    Ok(e.assemble(|idx, _| values[idx]))
}

// ---------------------------------------------------------------------------
// Polynomial route: Chebyshev approximation in the commuting pair (A, B).
// ---------------------------------------------------------------------------

/// A tensor-product Chebyshev interpolant on a rectangle.
struct Cheb2 {
    coeffs: Vec<Vec<f64>>,
    ulo: f64,
    uhi: f64,
    vlo: f64,
    vhi: f64,
}

fn cheb_nodes(d: usize) -> Vec<f64> {
    (0..=d)
        .map(|i| (std::f64::consts::PI * (i as f64 + 0.5) / (d as f64 + 1.0)).cos())
        .collect()
}

fn clenshaw(c: &[f64], x: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for k in (1..c.len()).rev() {
        let b = 2.0 * x * b1 - b2 + c[k];
        b2 = b1;
        b1 = b;
    }
    c[0] + x * b1 - b2
}

impl Cheb2 {
    fn fit(g: &dyn Fn(f64, f64) -> f64, bbox: (f64, f64, f64, f64), d: usize) -> Cheb2 {
        let (ulo, uhi, vlo, vhi) = bbox;
        let nodes = cheb_nodes(d);
        let map = |t: f64, lo: f64, hi: f64| 0.5 * (hi + lo) + 0.5 * (hi - lo) * t;
        let m = d + 1;
        let mut f_vals = vec![vec![0.0; m]; m];
        for (i, &ti) in nodes.iter().enumerate() {
            for (jn, &tj) in nodes.iter().enumerate() {
                f_vals[i][jn] = g(map(ti, ulo, uhi), map(tj, vlo, vhi));
            }
        }
        // Discrete cosine transforms along each axis in turn.
        let theta: Vec<f64> =
            (0..m).map(|i| std::f64::consts::PI * (i as f64 + 0.5) / m as f64).collect();
        let weight = |a: usize| if a == 0 { 1.0 / m as f64 } else { 2.0 / m as f64 };
        let mut pass1 = vec![vec![0.0; m]; m];
        for (a, row) in pass1.iter_mut().enumerate() {
            for (jn, out) in row.iter_mut().enumerate() {
                *out = (0..m).map(|i| (a as f64 * theta[i]).cos() * f_vals[i][jn]).sum();
            }
        }
        let mut coeffs = vec![vec![0.0; m]; m];
        for (a, row) in coeffs.iter_mut().enumerate() {
            for (b, out) in row.iter_mut().enumerate() {
                let s: f64 = (0..m).map(|jn| (b as f64 * theta[jn]).cos() * pass1[a][jn]).sum();
                *out = weight(a) * weight(b) * s;
            }
        }
        Cheb2 { coeffs, ulo, uhi, vlo, vhi }
    }

    fn eval(&self, u: f64, v: f64) -> f64 {
        let x = ((2.0 * u - (self.uhi + self.ulo)) / (self.uhi - self.ulo)).clamp(-1.0, 1.0);
        let y = ((2.0 * v - (self.vhi + self.vlo)) / (self.vhi - self.vlo)).clamp(-1.0, 1.0);
        let rows: Vec<f64> = self.coeffs.iter().map(|row| clenshaw(row, y)).collect();
        clenshaw(&rows, x)
    }

    /// Evaluates the polynomial at a commuting self-adjoint pair.
    fn eval_operator(&self, a_mat: &QMatrix, b_mat: &QMatrix) -> QMatrix {
        let n = a_mat.dim();
        let d = self.coeffs.len() - 1;
        let id = QMatrix::identity(n);
        let scaled = |mat: &QMatrix, lo: f64, hi: f64| {
            mat.scale(2.0 / (hi - lo)).sub(&id.scale((hi + lo) / (hi - lo)))
        };
        let cheb_seq = |hat: &QMatrix| -> Vec<QMatrix> {
            let mut seq = Vec::with_capacity(d + 1);
            seq.push(id.clone());
            if d >= 1 {
                seq.push(hat.clone());
            }
            for k in 2..=d {
                let next = hat.matmul(&seq[k - 1]).scale(2.0).sub(&seq[k - 2]);
                seq.push(next);
            }
            seq
        };
        let ta = cheb_seq(&scaled(a_mat, self.ulo, self.uhi));
        let tb = cheb_seq(&scaled(b_mat, self.vlo, self.vhi));
        let mut result = QMatrix::zeros(n);
        for (row, t_a) in self.coeffs.iter().zip(ta.iter()) {
            let mut inner_sum = QMatrix::zeros(n);
            let mut any = false;
            for (&c, t_b) in row.iter().zip(tb.iter()) {
                if c != 0.0 {
                    inner_sum = inner_sum.add(&t_b.scale(c));
                    any = true;
                }
            }
            if any {
                result = result.add(&t_a.matmul(&inner_sum));
            }
        }
        result
    }
}

/// Largest polynomial degree per variable attempted by
/// [`calc_poly_approx`].
pub const POLY_DEGREE_CAP: usize = 256;

/// The polynomial route to the continuous calculus for intrinsic `f`:
/// approximates `alpha`, `beta` by bivariate polynomials on the bounding
/// box of the atoms to pointwise error at most `eps` on the atom set, and
/// returns `f0(A, B) + J f1(A, B)`.
pub fn calc_poly_approx(t: &QMatrix, f: &SliceFunction, eps: f64) -> Result<QMatrix> {
    if f.codomain != Codomain::Intrinsic {
        return Err(Error::Domain(format!(
            "the polynomial route needs an intrinsic function, got '{}'",
            f.name
        )));
    }
    let j = ImaginaryUnit::DEFAULT;
    let e = spectral_measure(t, j)?;
    let d = decompose_tabj(t, j)?;
    let pts: Vec<(f64, f64)> = e
        .atoms
        .iter()
        .map(|a| {
            let sp = a.p.slice_split(j);
            (sp.u, sp.v)
        })
        .collect();
    let fold = |get: fn(&(f64, f64)) -> f64, init: f64, op: fn(f64, f64) -> f64| {
        pts.iter().map(get).fold(init, op)
    };
    let (mut ulo, mut uhi) = (
        fold(|p| p.0, f64::INFINITY, f64::min),
        fold(|p| p.0, f64::NEG_INFINITY, f64::max),
    );
    let (mut vlo, mut vhi) = (
        fold(|p| p.1, f64::INFINITY, f64::min),
        fold(|p| p.1, f64::NEG_INFINITY, f64::max),
    );
    let pad_u = 1e-9 * (1.0 + ulo.abs() + uhi.abs());
    let pad_v = 1e-9 * (1.0 + vlo.abs() + vhi.abs());
    ulo -= pad_u;
    uhi += pad_u;
    vlo -= pad_v;
    vhi += pad_v;
    let bbox = (ulo, uhi, vlo, vhi);
    let alpha = |u: f64, v: f64| f.alpha(u, v).re;
    let beta = |u: f64, v: f64| f.beta(u, v).re;

    let mut degree = 1usize;
    loop {
        let ca = Cheb2::fit(&alpha, bbox, degree);
        let cb = Cheb2::fit(&beta, bbox, degree);
        let err = pts
            .iter()
            .map(|&(u, v)| {
                (ca.eval(u, v) - alpha(u, v)).abs().max((cb.eval(u, v) - beta(u, v)).abs())
            })
            .fold(0.0, f64::max);
        if err <= eps {
            let f0 = ca.eval_operator(&d.a, &d.b);
            let f1 = cb.eval_operator(&d.a, &d.b);
            return Ok(f0.add(&d.j_op.matmul(&f1)));
        }
        if degree >= POLY_DEGREE_CAP {
            return Err(Error::Domain(format!(
                "polynomial approximation of '{}' still off by {err:.3e} > {eps:.3e} \
                 at degree {POLY_DEGREE_CAP}",
                f.name
            )));
        }
        degree = (degree * 2).min(POLY_DEGREE_CAP);
    }
}

// ---------------------------------------------------------------------------
// Simple functions.
// ---------------------------------------------------------------------------

/// A finite sum `f = sum_n c_n chi_{sigma_n}` with pairwise disjoint atom
/// sets and slice-scalar coefficients.
#[derive(Debug, Clone)]
pub struct SimpleFunction {
    /// Pairs of coefficient and atom-index set.
    pub parts: Vec<(Quaternion, Vec<usize>)>,
}

impl SimpleFunction {
    /// A single indicator `chi_sigma`.
    pub fn indicator(atoms: Vec<usize>) -> SimpleFunction {
        SimpleFunction { parts: vec![(Quaternion::ONE, atoms)] }
    }

    /// One part per atom from a dense value list.
    pub fn from_atom_values(values: &[Quaternion]) -> SimpleFunction {
        SimpleFunction {
            parts: values.iter().enumerate().map(|(k, &c)| (c, vec![k])).collect(),
        }
    }

    /// The value at atom `k` (zero off the support).
    pub fn value_on_atom(&self, k: usize) -> Quaternion {
        for (c, sigma) in &self.parts {
            if sigma.contains(&k) {
                return *c;
            }
        }
        Quaternion::ZERO
    }

    /// Sup norm over the atom set.
    pub fn sup_norm(&self) -> f64 {
        self.parts
            .iter()
            .filter(|(_, s)| !s.is_empty())
            .map(|(c, _)| c.norm())
            .fold(0.0, f64::max)
    }

    /// Left-scales every coefficient: `alpha * f`.
    pub fn scale_left(&self, alpha: Quaternion) -> SimpleFunction {
        SimpleFunction {
            parts: self.parts.iter().map(|(c, s)| (alpha * *c, s.clone())).collect(),
        }
    }

    /// Pointwise product, supported on the pairwise intersections.
    pub fn product(&self, g: &SimpleFunction) -> SimpleFunction {
        let mut parts = Vec::new();
        for (c, sigma) in &self.parts {
            for (dcoef, tau) in &g.parts {
                let inter: Vec<usize> =
                    sigma.iter().filter(|k| tau.contains(k)).copied().collect();
                if !inter.is_empty() {
                    parts.push((*c * *dcoef, inter));
                }
            }
        }
        SimpleFunction { parts }
    }

    /// Pointwise sum, refined to one part per atom.
    pub fn add(&self, g: &SimpleFunction, atom_count: usize) -> SimpleFunction {
        let values: Vec<Quaternion> =
            (0..atom_count).map(|k| self.value_on_atom(k) + g.value_on_atom(k)).collect();
        SimpleFunction::from_atom_values(&values)
    }

    /// Checks index bounds, pairwise disjointness, and that coefficients
    /// lie in the slice of `e`.
    pub fn validate(&self, e: &SpectralMeasure) -> Result<()> {
        let mut seen = vec![false; e.atoms.len()];
        for (c, sigma) in &self.parts {
            for &k in sigma {
                if k >= e.atoms.len() {
                    return Err(Error::InvalidSupport(format!(
                        "atom index {k} out of range for {} atoms",
                        e.atoms.len()
                    )));
                }
                if seen[k] {
                    return Err(Error::InvalidSupport(format!(
                        "atom {k} appears in two parts; the sets must be pairwise disjoint"
                    )));
                }
                seen[k] = true;
            }
            let res = off_slice_residual(*c, e.j);
            if res > 1e-8 * (1.0 + c.norm()) {
                return Err(Error::InvalidSupport(format!(
                    "coefficient {c} is off the slice by {res:.3e}"
                )));
            }
        }
        Ok(())
    }
}

/// The simple calculus `f(T) = sum_n c_n E(sigma_n)` with coefficients
/// acting by left multiplication in the eigenvector basis.
pub fn calc_simple(e: &SpectralMeasure, f: &SimpleFunction) -> Result<QMatrix> {
    f.validate(e)?;
    Ok(e.assemble(|k, _| f.value_on_atom(k)))
}

// ---------------------------------------------------------------------------
// Extended measurable functions with possible infinities.
// ---------------------------------------------------------------------------

/// A pointwise map on the atoms with values in the slice plane or
/// infinity (`None`).
#[derive(Debug, Clone)]
pub struct BInftyFunction {
    /// One entry per atom; `None` encodes infinity.
    pub values: Vec<Option<Quaternion>>,
}

impl BInftyFunction {
    /// Wraps a dense value list.
    pub fn from_values(values: Vec<Option<Quaternion>>) -> Self {
        BInftyFunction { values }
    }

    /// The pointwise reciprocal with `1/0 = infinity` and `1/infinity = 0`;
    /// values of modulus at most `zero_tol` count as zero.
    pub fn reciprocal(&self, zero_tol: f64) -> BInftyFunction {
        BInftyFunction {
            values: self
                .values
                .iter()
                .map(|v| match v {
                    None => Some(Quaternion::ZERO),
                    Some(c) if c.norm() <= zero_tol => None,
                    Some(c) => Some(c.inverse().expect("nonzero by the guard")),
                })
                .collect(),
        }
    }

    /// Whether no atom maps to infinity.
    pub fn finite_everywhere(&self) -> bool {
        self.values.iter().all(|v| v.is_some())
    }
}

/// Outcome of the extended calculus: the operator restricted to its
/// domain, the domain projection, and the bounding sequence used.
#[derive(Debug, Clone)]
pub struct BInftyResult {
    /// Action of `f(T)` composed with the domain projection.
    pub operator: QMatrix,
    /// Projection onto the domain of `f(T)`.
    pub domain_projection: QMatrix,
    /// Whether the domain is the whole space.
    pub domain_is_full: bool,
    /// Increasing atom sets on which `f` is bounded, with union of full
    /// measure exactly when the domain is the whole space.
    pub bounding_sets: Vec<Vec<usize>>,
    /// Index after which the partial sums stop changing.
    pub stabilization_step: usize,
}

/// The extended calculus `f(T) x = lim_n (chi_{sigma_n} f)(T) x` over a
/// bounding sequence of atom sets; at finite dimension the limit
/// stabilizes once every finite-valued atom has entered the sequence.
///
/// An infinity on an atom with a nonzero projection is not an error: the
/// domain becomes the range of the complementary projection.
pub fn calc_binf(e: &SpectralMeasure, f: &BInftyFunction) -> Result<BInftyResult> {
    if f.values.len() != e.atoms.len() {
        return Err(Error::Domain(format!(
            "value list has {} entries for {} atoms",
            f.values.len(),
            e.atoms.len()
        )));
    }
    for (k, v) in f.values.iter().enumerate() {
        if let Some(c) = v {
            if !c.is_finite() {
                return Err(Error::Domain(format!("non-finite value at atom {k}")));
            }
            let res = off_slice_residual(*c, e.j);
            if res > 1e-8 * (1.0 + c.norm()) {
                return Err(Error::Domain(format!(
                    "value {c} at atom {k} is off the slice by {res:.3e}"
                )));
            }
        }
    }
    let mut finite: Vec<usize> = (0..e.atoms.len()).filter(|&k| f.values[k].is_some()).collect();
    finite.sort_by(|&a, &b| {
        let na = f.values[a].unwrap().norm();
        let nb = f.values[b].unwrap().norm();
        na.partial_cmp(&nb).unwrap().then(a.cmp(&b))
    });
    let bounding_sets: Vec<Vec<usize>> =
        (0..=finite.len()).map(|n| finite[..n].to_vec()).collect();
    let operator =
        e.assemble(|k, _| f.values[k].unwrap_or(Quaternion::ZERO));
    let infinite: Vec<usize> = (0..e.atoms.len()).filter(|&k| f.values[k].is_none()).collect();
    let domain_projection =
        QMatrix::identity(e.dim).sub(&e.projection_of(&infinite));
    Ok(BInftyResult {
        operator,
        domain_projection,
        domain_is_full: infinite.is_empty(),
        stabilization_step: finite.len(),
        bounding_sets,
    })
}

/// The inverse of `f(T)` through the reciprocal value function.
///
/// Errors with [`Error::NotInvertible`] when `f` vanishes on an atom whose
/// projection is nonzero; otherwise returns the matrix of `(1/f)(T)`,
/// which multiplies `f(T)` to the identity.
pub fn invert_calc(e: &SpectralMeasure, f: &SliceFunction, zero_tol: f64) -> Result<QMatrix> {
    let values = values_on_atoms(e, f)?;
    let scale = 1.0f64.max(values.iter().map(|w| w.norm()).fold(0.0, f64::max));
    for (k, w) in values.iter().enumerate() {
        if w.norm() <= zero_tol * scale && e.atoms[k].projection.frob_norm() > zero_tol {
            return Err(Error::NotInvertible { atom_index: k });
        }
    }
    Ok(e.assemble(|k, _| values[k].inverse().expect("nonzero by the guard")))
}

// ---------------------------------------------------------------------------
// Pushforward and diagnostics.
// ---------------------------------------------------------------------------

/// The image measure `E o g^{-1}`: each atom moves to the half-plane
/// representative of `g(p)`, and atoms with the same image merge.
pub fn pushforward(e: &SpectralMeasure, g: &SliceFunction) -> Result<SpectralMeasure> {
    let values = values_on_atoms(e, g)?;
    let scale = 1.0f64.max(values.iter().map(|w| w.norm()).fold(0.0, f64::max));
    let merge_tol = 1e-10 * scale;
    let mut merged: Vec<(f64, f64, Vec<usize>)> = Vec::new();
    for (k, w) in values.iter().enumerate() {
        let sp = w.slice_split(e.j);
        match merged
            .iter_mut()
            .find(|(u, v, _)| (*u - sp.u).hypot(*v - sp.v) <= merge_tol)
        {
            Some((_, _, members)) => members.push(k),
            None => merged.push((sp.u, sp.v, vec![k])),
        }
    }
    merged.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));
    let atoms = merged
        .into_iter()
        .map(|(u, v, members)| {
            let projection = e.projection_of(&members);
            let vectors = members
                .iter()
                .flat_map(|&k| e.atoms[k].vectors.iter().cloned())
                .collect();
            SpectralAtom { p: e.j.embed(u, v), projection, vectors }
        })
        .collect();
    Ok(SpectralMeasure { j: e.j, atoms, dim: e.dim })
}

/// Frobenius residual of the change-of-variables identity
/// `int h d(E o g^{-1}) = int (h o g) dE`.
pub fn change_of_variables_check(
    e: &SpectralMeasure,
    g: &SliceFunction,
    h: &SliceFunction,
) -> Result<f64> {
    let image = pushforward(e, g)?;
    let lhs = calc_continuous(&image, h)?;
    let g_values = values_on_atoms(e, g)?;
    let mut composed = Vec::with_capacity(e.atoms.len());
    for w in &g_values {
        let sp = w.slice_split(e.j);
        if sp.v > 0.0 {
            h.check_symmetry(sp.u, sp.v)?;
        }
        let hv = h.value(sp.u, sp.v, e.j);
        if !hv.is_finite() {
            return Err(Error::Domain(format!(
                "'{}' is not finite at the image point {w}",
                h.name
            )));
        }
        composed.push(hv);
    }
    let rhs = e.assemble(|k, _| composed[k]);
    Ok(lhs.sub(&rhs).frob_norm())
}

/// Comparison of `sigma_S(f(T))` with the image of the atoms under `f`.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralMappingReport {
    /// Predicted `(u, v, multiplicity)` triples from the atom images.
    pub predicted: Vec<(f64, f64, usize)>,
    /// Computed triples from the spectrum of `f(T)`.
    pub computed: Vec<(f64, f64, usize)>,
    /// Largest half-plane distance over the matching.
    pub worst_distance: f64,
    /// Whether the two multisets agree within tolerance.
    pub passed: bool,
}

/// Verifies the spectral mapping identity `sigma_S(f(T)) = f(sigma_S(T))`
/// for intrinsic or slice-valued `f` as a multiset comparison with
/// multiplicity.
pub fn spectral_mapping_check(t: &QMatrix, f: &SliceFunction) -> Result<SpectralMappingReport> {
    let j = ImaginaryUnit::DEFAULT;
    let e = spectral_measure(t, j)?;
    let values = values_on_atoms(&e, f)?;
    let scale = 1.0f64.max(values.iter().map(|w| w.norm()).fold(0.0, f64::max));
    let tol = 1e-8 * scale;

    // Merge predicted images within tolerance, accumulating multiplicity.
    let mut predicted: Vec<(f64, f64, usize)> = Vec::new();
    for (k, w) in values.iter().enumerate() {
        let sp = w.slice_split(j);
        let mult = e.atoms[k].vectors.len();
        match predicted
            .iter_mut()
            .find(|(u, v, _)| (*u - sp.u).hypot(*v - sp.v) <= tol)
        {
            Some((_, _, m)) => *m += mult,
            None => predicted.push((sp.u, sp.v, mult)),
        }
    }
    predicted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.partial_cmp(&b.1).unwrap()));

    let ft = calc_continuous(&e, f)?;
    let spec = s_spectrum(&ft, j)?;
    let computed: Vec<(f64, f64, usize)> = spec
        .spheres
        .iter()
        .map(|s| {
            let sp = s.rep.slice_split(j);
            (sp.u, sp.v, s.multiplicity)
        })
        .collect();

    let mut worst: f64 = 0.0;
    let mut remaining = computed.clone();
    let mut passed = predicted.len() == computed.len();
    for &(u, v, m) in &predicted {
        let probe = j.embed(u, v);
        match remaining
            .iter()
            .enumerate()
            .filter(|(_, &(cu, cv, cm))| cm == m && sphere_distance(probe, cu, cv) <= tol)
            .min_by(|a, b| {
                let da = sphere_distance(probe, a.1 .0, a.1 .1);
                let db = sphere_distance(probe, b.1 .0, b.1 .1);
                da.partial_cmp(&db).unwrap()
            }) {
            Some((idx, &(cu, cv, _))) => {
                worst = worst.max(sphere_distance(probe, cu, cv));
                remaining.remove(idx);
            }
            None => passed = false,
        }
    }
    passed = passed && remaining.is_empty();
    Ok(SpectralMappingReport { predicted, computed, worst_distance: worst, passed })
}

/// Norm and self-adjointness diagnostics of the continuous calculus.
#[derive(Debug, Clone, Serialize)]
pub struct IsometryReport {
    /// Operator norm of `f(T)`.
    pub norm_f_t: f64,
    /// Sup of `|f|` over the atoms.
    pub sup_f: f64,
    /// `| norm_f_t - sup_f |`.
    pub isometry_residual: f64,
    /// Self-adjointness defect of the even part `f0(T)`.
    pub f0_selfadjoint_residual: f64,
    /// Self-adjointness defect of the odd part `f1(T)`.
    pub f1_selfadjoint_residual: f64,
    /// Worst defect of `|f(T)x|^2 = sum_k |f(p_k)|^2 mu_{x,x}(p_k)` over
    /// sampled `x`.
    pub norm_identity_residual: f64,
    /// All residuals within their bounds.
    pub passed: bool,
}

/// Verifies, for intrinsic `f`: the norm equality
/// `|f(T)| = max_k |f(p_k)|`, self-adjointness of the parts `f0(T)` and
/// `f1(T)`, and the squared-norm identity against the diagonal measure on
/// random vectors.
pub fn check_isometry_and_selfadjoint_parts(
    t: &QMatrix,
    f: &SliceFunction,
    rng: &mut SeededRng,
) -> Result<IsometryReport> {
    if f.codomain != Codomain::Intrinsic {
        return Err(Error::Domain(format!(
            "the norm equality is asserted for intrinsic functions only, got '{}'",
            f.name
        )));
    }
    let j = ImaginaryUnit::DEFAULT;
    let e = spectral_measure(t, j)?;
    let values = values_on_atoms(&e, f)?;
    let ft = calc_continuous(&e, f)?;
    let norm_f_t = ft.operator_norm()?;
    let sup_f = values.iter().map(|w| w.norm()).fold(0.0, f64::max);
    let isometry_residual = (norm_f_t - sup_f).abs();

    let f0 = e.assemble(|k, _| {
        let sp = e.atoms[k].p.slice_split(j);
        Quaternion::real(f.alpha(sp.u, sp.v).re)
    });
    let f1 = e.assemble(|k, _| {
        let sp = e.atoms[k].p.slice_split(j);
        Quaternion::real(f.beta(sp.u, sp.v).re)
    });
    let f0_selfadjoint_residual = f0.sub(&f0.adjoint()).frob_norm();
    let f1_selfadjoint_residual = f1.sub(&f1.adjoint()).frob_norm();

    let mut norm_identity_residual: f64 = 0.0;
    for _ in 0..5 {
        let x = crate::random::vector(rng, t.dim());
        let lhs = vec_norm(&ft.apply(&x)).powi(2);
        let rhs: f64 = e
            .atoms
            .iter()
            .zip(values.iter())
            .map(|(atom, w)| w.norm_sqr() * inner(&atom.projection.apply(&x), &x).re)
            .sum();
        norm_identity_residual = norm_identity_residual.max((lhs - rhs).abs());
    }

    let scale = 1.0f64.max(sup_f);
    let scale2 = 1.0f64.max(sup_f * sup_f);
    let passed = isometry_residual <= 1e-10 * scale
        && f0_selfadjoint_residual <= 1e-10 * scale
        && f1_selfadjoint_residual <= 1e-10 * scale
        && norm_identity_residual <= 1e-10 * scale2 * t.dim() as f64;
    Ok(IsometryReport {
        norm_f_t,
        sup_f,
        isometry_residual,
        f0_selfadjoint_residual,
        f1_selfadjoint_residual,
        norm_identity_residual,
        passed,
    })
}
