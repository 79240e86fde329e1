//! Deterministic report serialization.
//!
//! Every artifact the tools emit — spectrum listings, measure dumps,
//! residual summaries — goes through one canonical JSON writer: object
//! keys sorted, floats printed with 17 significant digits in the style of
//! C's `%.17g` (negative zero normalized away, two-digit exponents), and a
//! fixed layout.  Identical inputs therefore produce byte-identical
//! files, which is what makes golden-file testing and plain `diff`
//! meaningful for numerical output.

use crate::error::{Error, Result};
use crate::qmatrix::QMatrix;
use crate::quaternion::{ImaginaryUnit, Quaternion};
use crate::s_spectrum::SSpectrum;
use crate::spectral::{DecompositionReport, SpectralMeasure};
use crate::transform::{CorollaryReport, TransformReport};
use std::collections::BTreeMap;

/// Prints a float with up to 17 significant digits, choosing fixed or
/// scientific notation the way C's `%.17g` does and trimming trailing
/// zeros.  Zero always prints as `0`, erasing the sign of `-0.0`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    // 16 fractional digits in scientific form = 17 significant digits,
    // correctly rounded by the standard formatter.
    let sci = format!("{:.16e}", x);
    let (mant, exp_str) = sci.split_once('e').expect("scientific form");
    let exp: i32 = exp_str.parse().expect("exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 17);
    let sign = if neg { "-" } else { "" };
    if !(-4..17).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        let tail = tail.trim_end_matches('0');
        let mantissa = if tail.is_empty() {
            head.to_string()
        } else {
            format!("{head}.{tail}")
        };
        let esign = if exp < 0 { '-' } else { '+' };
        format!("{sign}{mantissa}e{esign}{:02}", exp.abs())
    } else if exp >= 0 {
        let split = exp as usize + 1;
        let int_part = &digits[..split];
        let frac = digits[split..].trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac}")
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        let with_zeros = format!("{zeros}{digits}");
        let frac = with_zeros.trim_end_matches('0');
        format!("{sign}0.{frac}")
    }
}

/// A JSON value rendered through the canonical writer.
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    Num(f64),
    Str(String),
    Arr(Vec<Json>),
    Obj(BTreeMap<String, Json>),
}

/// Builds an object node; keys are sorted by the underlying map.
pub fn obj(pairs: Vec<(&str, Json)>) -> Json {
    Json::Obj(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

impl Json {
    /// Renders the canonical form, ending with a newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn is_scalar(&self) -> bool {
        !matches!(self, Json::Arr(_) | Json::Obj(_))
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => out.push_str(&i.to_string()),
            Json::Num(x) => out.push_str(&format_float(*x)),
            Json::Str(s) => {
                out.push('"');
                for c in s.chars() {
                    match c {
                        '"' => out.push_str("\\\""),
                        '\\' => out.push_str("\\\\"),
                        '\n' => out.push_str("\\n"),
                        '\t' => out.push_str("\\t"),
                        '\r' => out.push_str("\\r"),
                        c if (c as u32) < 0x20 => {
                            out.push_str(&format!("\\u{:04x}", c as u32))
                        }
                        c => out.push(c),
                    }
                }
                out.push('"');
            }
            Json::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                } else if items.iter().all(Json::is_scalar) {
                    out.push('[');
                    for (k, item) in items.iter().enumerate() {
                        if k > 0 {
                            out.push_str(", ");
                        }
                        item.write(out, indent);
                    }
                    out.push(']');
                } else {
                    out.push_str("[\n");
                    let pad = "  ".repeat(indent + 1);
                    for (k, item) in items.iter().enumerate() {
                        out.push_str(&pad);
                        item.write(out, indent + 1);
                        if k + 1 < items.len() {
                            out.push(',');
                        }
                        out.push('\n');
                    }
                    out.push_str(&"  ".repeat(indent));
                    out.push(']');
                }
            }
            Json::Obj(map) => {
                if map.is_empty() {
                    out.push_str("{}");
                } else {
                    out.push_str("{\n");
                    let pad = "  ".repeat(indent + 1);
                    for (k, (key, value)) in map.iter().enumerate() {
                        out.push_str(&pad);
                        Json::Str(key.clone()).write(out, indent + 1);
                        out.push_str(": ");
                        value.write(out, indent + 1);
                        if k + 1 < map.len() {
                            out.push(',');
                        }
                        out.push('\n');
                    }
                    out.push_str(&"  ".repeat(indent));
                    out.push('}');
                }
            }
        }
    }
}

/// A quaternion as the 4-component array `[re, i, j, k]`.
pub fn quaternion_json(q: Quaternion) -> Json {
    let c = q.components();
    Json::Arr(c.iter().map(|&x| Json::Num(x)).collect())
}

/// An imaginary unit as its 3 imaginary components `[x, y, z]`.
pub fn unit_json(j: ImaginaryUnit) -> Json {
    let c = j.as_quaternion().components();
    Json::Arr(c[1..].iter().map(|&x| Json::Num(x)).collect())
}

/// A matrix in the same `{"entries", "n"}` shape the parser accepts, so
/// tool output can be fed back in as input.
pub fn matrix_json(m: &QMatrix) -> Json {
    let rows = m
        .rows()
        .into_iter()
        .map(|row| Json::Arr(row.into_iter().map(quaternion_json).collect()))
        .collect();
    obj(vec![("entries", Json::Arr(rows)), ("n", Json::Int(m.dim() as i64))])
}

/// Parses the `{"n", "entries"}` matrix file format.
pub fn parse_matrix(text: &str) -> Result<QMatrix> {
    serde_json::from_str::<QMatrix>(text).map_err(|e| Error::Parse(e.to_string()))
}

/// The spectrum listing: spheres as upper-half-plane coordinates with
/// multiplicities, plus the slice unit and normality flag.
pub fn spectrum_report(spec: &SSpectrum, dim: usize) -> Json {
    let spheres = spec
        .spheres
        .iter()
        .map(|s| {
            let sp = s.rep.slice_split(spec.j);
            obj(vec![
                ("im", Json::Num(sp.v)),
                ("multiplicity", Json::Int(s.multiplicity as i64)),
                ("re", Json::Num(sp.u)),
                ("rep", quaternion_json(s.rep)),
            ])
        })
        .collect();
    obj(vec![
        ("dim", Json::Int(dim as i64)),
        ("j", unit_json(spec.j)),
        ("normal", Json::Bool(spec.normal)),
        ("spheres", Json::Arr(spheres)),
    ])
}

/// Plot-ready CSV of the spectrum: one `re,im,multiplicity` row per
/// eigensphere.
pub fn spectrum_csv(spec: &SSpectrum) -> String {
    let mut out = String::from("re,im,multiplicity\n");
    for s in &spec.spheres {
        let sp = s.rep.slice_split(spec.j);
        out.push_str(&format!(
            "{},{},{}\n",
            format_float(sp.u),
            format_float(sp.v),
            s.multiplicity
        ));
    }
    out
}

/// The full spectral measure: every atom with its representative, basis
/// vectors and multiplicity, plus the reconstruction residual against the
/// matrix it came from.
pub fn measure_report(t: &QMatrix, e: &SpectralMeasure) -> Json {
    let residual = crate::spectral::reconstruct(e).sub(t).frob_norm();
    let atoms = e
        .atoms
        .iter()
        .map(|a| {
            let sp = a.p.slice_split(e.j);
            let basis = a
                .vectors
                .iter()
                .map(|y| Json::Arr(y.iter().map(|&q| quaternion_json(q)).collect()))
                .collect();
            obj(vec![
                ("basis", Json::Arr(basis)),
                ("im", Json::Num(sp.v)),
                ("multiplicity", Json::Int(a.vectors.len() as i64)),
                ("p", quaternion_json(a.p)),
                ("re", Json::Num(sp.u)),
            ])
        })
        .collect();
    obj(vec![
        ("atoms", Json::Arr(atoms)),
        ("dim", Json::Int(e.dim as i64)),
        ("j", unit_json(e.j)),
        ("reconstruction_residual", Json::Num(residual)),
    ])
}

/// Residuals of the `T = A + J B` decomposition.
pub fn decompose_report(rep: &DecompositionReport, kernel_present: bool) -> Json {
    obj(vec![
        ("a_formula_residual", Json::Num(rep.a_formula_residual)),
        ("anti_self_adjoint_residual", Json::Num(rep.anti_self_adjoint_residual)),
        ("b_formula_residual", Json::Num(rep.b_formula_residual)),
        ("commutation_residual", Json::Num(rep.commutation_residual)),
        ("kernel_present", Json::Bool(kernel_present)),
        ("max_residual", Json::Num(rep.max_residual())),
        ("sum_residual", Json::Num(rep.sum_residual)),
        ("unitary_residual", Json::Num(rep.unitary_residual)),
    ])
}

/// The bounded-transform summary.
pub fn transform_json(rep: &TransformReport) -> Json {
    obj(vec![
        ("c_identity_residual", Json::Num(rep.c_identity_residual)),
        ("min_gap_1_minus_p2", Json::Num(rep.min_gap_1_minus_p2)),
        ("norm_T", Json::Num(rep.norm_t)),
        ("norm_Z", Json::Num(rep.norm_z)),
        ("roundtrip_residual", Json::Num(rep.roundtrip_residual)),
    ])
}

/// Canonical-form checks for self-adjoint / anti-self-adjoint / unitary
/// operators.
pub fn corollary_json(rep: &CorollaryReport) -> Json {
    let checks = rep
        .checks
        .iter()
        .map(|c| {
            obj(vec![
                ("applicable", Json::Bool(c.applicable)),
                ("name", Json::Str(c.name.to_string())),
                ("ok", Json::Bool(c.ok)),
                ("worst", Json::Num(c.worst)),
            ])
        })
        .collect();
    obj(vec![
        ("checks", Json::Arr(checks)),
        ("passed", Json::Bool(rep.passed)),
        ("reconstruction_residual", Json::Num(rep.reconstruction_residual)),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::Quaternion as Q;
    use crate::spectral::spectral_measure;

    #[test]
    fn float_formatting_matches_the_printf_style() {
        assert_eq!(format_float(0.0), "0");
        assert_eq!(format_float(-0.0), "0");
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(-1.0), "-1");
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(1234.5), "1234.5");
        assert_eq!(format_float(1e-4), "0.0001");
        // 1e-5 is not exactly representable; the nearest double prints its
        // full 17 digits.
        assert_eq!(format_float(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_float(2.0f64.powi(-15)), "3.0517578125e-05");
        assert_eq!(format_float(1e16), "10000000000000000");
        assert_eq!(format_float(1e17), "1e+17");
        assert_eq!(format_float(1e6), "1000000");
        // -2.5e-13 is also inexact; its double neighbour below is nearer.
        assert_eq!(format_float(-2.5e-13), "-2.4999999999999999e-13");
        assert_eq!(format_float(1e20), "1e+20");
        assert_eq!(format_float(std::f64::consts::PI), "3.1415926535897931");
        assert_eq!(format_float(2.0f64.sqrt() / 2.0), "0.70710678118654757");
        assert_eq!(format_float(1.0 / 3.0), "0.33333333333333331");
    }

    #[test]
    fn float_formatting_round_trips() {
        let mut rng = crate::random::SeededRng::new(97);
        for _ in 0..500 {
            let x = (rng.uniform() - 0.5) * 10.0f64.powi(rng.index(41) as i32 - 20);
            let s = format_float(x);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back, x, "{x:e} printed as {s}");
        }
    }

    #[test]
    fn canonical_rendering_is_sorted_and_stable() {
        let v = obj(vec![
            ("zeta", Json::Num(1.5)),
            ("alpha", Json::Arr(vec![Json::Int(1), Json::Int(2)])),
            ("mid", Json::Str("a\"b".to_string())),
        ]);
        let text = v.render();
        assert_eq!(
            text,
            "{\n  \"alpha\": [1, 2],\n  \"mid\": \"a\\\"b\",\n  \"zeta\": 1.5\n}\n"
        );
        assert_eq!(text, v.render());
    }

    #[test]
    fn matrix_json_round_trips_through_the_parser() {
        let m = QMatrix::from_rows(vec![
            vec![Q::ONE, Q::E2],
            vec![Q::new(0.25, -1.0, 0.0, 3.5), Q::ZERO],
        ])
        .unwrap();
        let text = matrix_json(&m).render();
        let back = parse_matrix(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn parser_rejects_malformed_input() {
        assert!(matches!(parse_matrix("not json"), Err(Error::Parse(_))));
        assert!(matches!(
            parse_matrix(r#"{"n":2,"entries":[[[0,0,0,0],[0,0,0,0]],[[0,0,0,0]]]}"#),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_matrix(r#"{"n":1,"entries":[[[0,0,0]]]}"#),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn reports_are_deterministic() {
        let t = QMatrix::diagonal(&[Q::E2]);
        let e = spectral_measure(&t, ImaginaryUnit::E1).unwrap();
        let a = measure_report(&t, &e).render();
        let e2 = spectral_measure(&t, ImaginaryUnit::E1).unwrap();
        let b = measure_report(&t, &e2).render();
        assert_eq!(a, b);
        // The canonical basis vector of [e2] at slice e1 shows up verbatim.
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(a.contains(&format_float(r)), "report: {a}");
        let spec = crate::s_spectrum::s_spectrum(&t, ImaginaryUnit::E1).unwrap();
        let csv = spectrum_csv(&spec);
        // The eigensolver puts the sphere of [e2] within 2 ulp of height 1;
        // the CSV prints the computed value, not an idealized one.
        assert_eq!(csv, "re,im,multiplicity\n0,0.99999999999999978,1\n");
    }
}
