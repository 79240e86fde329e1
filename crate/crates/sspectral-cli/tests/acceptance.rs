//! The acceptance gate: ten end-to-end criteria covering the whole
//! pipeline, from eigensphere extraction to the command-line exit codes.
//! Each test prints one `criterion NN (...): PASS/FAIL` line so the suite
//! doubles as a checklist (run with `--nocapture` to see them all).

use sspectral::calculus::{
    builtin, calc_continuous, calc_poly_approx, spectral_mapping_check, values_on_atoms,
};
use sspectral::qmatrix::QMatrix;
use sspectral::quaternion::{ImaginaryUnit, Quaternion};
use sspectral::random::{self, SeededRng};
use sspectral::report;
use sspectral::s_spectrum::{
    check_resolvent_equation, in_s_resolvent_set, s_spectrum, sphere_distance,
};
use sspectral::spectral::{
    commutant_check, decompose_tabj, decomposition_residuals, reconstruct, spectral_measure,
    verify_measure_axioms,
};
use sspectral::transform::{recover_t, z_transform};
use std::path::{Path, PathBuf};
use std::time::Instant;

const J1: ImaginaryUnit = ImaginaryUnit::E1;

/// Prints the checklist line and fails the test with `detail` when the
/// criterion does not hold.
fn criterion(number: u32, name: &str, failure: Option<String>) {
    let verdict = if failure.is_none() { "PASS" } else { "FAIL" };
    println!("criterion {number:02} ({name}): {verdict}");
    if let Some(detail) = failure {
        panic!("criterion {number:02} ({name}): {detail}");
    }
}

fn corpus_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

#[test]
fn criterion_01_spectral_theorem_roundtrip() {
    let mut rng = SeededRng::new(1001);
    let start = Instant::now();
    let mut failure = None;
    for i in 0..100 {
        let n = 1 + i % 8;
        let t = random::normal(&mut rng, n).matrix;
        let e = spectral_measure(&t, J1).unwrap();
        let residual = reconstruct(&e).sub(&t).operator_norm().unwrap();
        let bound = 1e-10 * t.operator_norm().unwrap();
        if residual > bound {
            failure = Some(format!("trial {i} (n = {n}): residual {residual:.3e} > {bound:.3e}"));
            break;
        }
    }
    let elapsed = start.elapsed();
    if failure.is_none() && elapsed.as_secs_f64() > 10.0 {
        failure = Some(format!("runtime {elapsed:.2?} exceeds 10 s"));
    }
    criterion(1, "spectral theorem roundtrip, 100 matrices", failure);
}

#[test]
fn criterion_02_axial_symmetry_of_membership() {
    let mut rng = SeededRng::new(1002);
    let mut failure = None;
    'outer: for i in 0..12 {
        let n = 1 + i % 6;
        let t = random::normal(&mut rng, n).matrix;
        let spec = s_spectrum(&t, J1).unwrap();
        let spheres: Vec<(f64, f64)> = spec
            .spheres
            .iter()
            .map(|s| {
                let sp = s.rep.slice_split(J1);
                (sp.u, sp.v)
            })
            .collect();
        for &(u, v) in &spheres {
            // A nearby off-sphere point clear of the whole spectrum.
            let offsets =
                [(0.15, 0.0), (-0.15, 0.0), (0.0, 0.15), (0.0, -0.15), (0.12, 0.12), (-0.12, 0.12)];
            let off = offsets.iter().copied().find(|&(du, dv)| {
                let q = J1.embed(u + du, v + dv);
                spheres.iter().all(|&(su, sv)| sphere_distance(q, su, sv) >= 0.11)
            });
            let Some((du, dv)) = off else {
                failure = Some(format!("matrix {i}: no clear point near ({u}, {v})"));
                break 'outer;
            };
            for _ in 0..20 {
                let unit = random::imaginary_unit(&mut rng);
                let on_sphere = unit.embed(u, v);
                if in_s_resolvent_set(&t, on_sphere, 1e-8).unwrap() {
                    failure = Some(format!(
                        "matrix {i}: on-sphere point {on_sphere:?} claimed to be in the resolvent set"
                    ));
                    break 'outer;
                }
                let off_sphere = unit.embed(u + du, v + dv);
                if !in_s_resolvent_set(&t, off_sphere, 1e-8).unwrap() {
                    failure = Some(format!(
                        "matrix {i}: off-sphere point {off_sphere:?} claimed to be in the spectrum"
                    ));
                    break 'outer;
                }
            }
        }
    }
    criterion(2, "axial symmetry across 20 units per sphere", failure);
}

#[test]
fn criterion_03_s_resolvent_equation() {
    let mut rng = SeededRng::new(1003);
    let start = Instant::now();
    let mut failure = None;
    for i in 0..100 {
        let n = 2 + i % 4;
        let t = random::normal(&mut rng, n).matrix;
        let spec = s_spectrum(&t, J1).unwrap();
        let spheres: Vec<(f64, f64)> = spec
            .spheres
            .iter()
            .map(|s| {
                let sp = s.rep.slice_split(J1);
                (sp.u, sp.v)
            })
            .collect();
        let draw = |rng: &mut SeededRng| loop {
            let q = random::quaternion(rng) * 2.0;
            if spheres.iter().all(|&(u, v)| sphere_distance(q, u, v) >= 0.1) {
                return q;
            }
        };
        let s = draw(&mut rng);
        let mut p = draw(&mut rng);
        while sphere_distance(p, s.re, s.imag_norm()) < 0.1 {
            p = draw(&mut rng);
        }
        let rep = check_resolvent_equation(&t, s, p, 1e-10).unwrap();
        let bound = 1e-9 * 1.0f64.max(t.operator_norm().unwrap());
        if rep.residual > bound {
            failure = Some(format!("trial {i}: residual {:.3e} > {bound:.3e}", rep.residual));
            break;
        }
    }
    let elapsed = start.elapsed();
    if failure.is_none() && elapsed.as_secs_f64() > 5.0 {
        failure = Some(format!("runtime {elapsed:.2?} exceeds 5 s"));
    }
    criterion(3, "S-resolvent equation, 100 draws", failure);
}

#[test]
fn criterion_04_decomposition_invariants() {
    let mut rng = SeededRng::new(1004);
    let mut failure = None;
    for i in 0..100 {
        let n = 1 + i % 8;
        let t = random::normal(&mut rng, n).matrix;
        let d = decompose_tabj(&t, J1).unwrap();
        let rep = decomposition_residuals(&t, &d).unwrap();
        let bound = 1e-10 * 1.0f64.max(t.frob_norm());
        if rep.max_residual() > bound {
            failure = Some(format!(
                "trial {i} (n = {n}): worst residual {:.3e} > {bound:.3e}",
                rep.max_residual()
            ));
            break;
        }
    }
    criterion(4, "A + J B decomposition invariants, 100 matrices", failure);
}

#[test]
fn criterion_05_calculus_homomorphism_isometry_and_mapping() {
    let mut rng = SeededRng::new(1005);
    let pool = ["id", "re", "immag", "sq", "exp_re"];
    let mut failure = None;
    'outer: for i in 0..50 {
        let n = 2 + i % 4;
        let t = random::normal(&mut rng, n).matrix;
        let e = spectral_measure(&t, J1).unwrap();
        let f = builtin(pool[rng.index(pool.len())]).unwrap();
        let g = builtin(pool[rng.index(pool.len())]).unwrap();
        let ft = calc_continuous(&e, &f).unwrap();
        let gt = calc_continuous(&e, &g).unwrap();
        let scale_fg = 1.0f64.max(ft.operator_norm().unwrap())
            * 1.0f64.max(gt.operator_norm().unwrap());
        let checks = [
            ("product", calc_continuous(&e, &f.mul(&g)).unwrap().sub(&ft.matmul(&gt)).frob_norm()),
            ("sum", calc_continuous(&e, &f.add(&g)).unwrap().sub(&ft.add(&gt)).frob_norm()),
            ("adjoint", calc_continuous(&e, &f.conj_fn()).unwrap().sub(&ft.adjoint()).frob_norm()),
        ];
        for (what, residual) in checks {
            if residual > 1e-10 * scale_fg {
                failure = Some(format!(
                    "trial {i}: {what} identity residual {residual:.3e} for ({}, {})",
                    f.name,
                    g.name
                ));
                break 'outer;
            }
        }
        let sup = values_on_atoms(&e, &f)
            .unwrap()
            .iter()
            .map(|q| q.norm())
            .fold(0.0f64, f64::max);
        let gap = (ft.operator_norm().unwrap() - sup).abs();
        if gap > 1e-10 * 1.0f64.max(sup) {
            failure = Some(format!("trial {i}: norm/sup gap {gap:.3e} for {}", f.name));
            break;
        }
        let mapping = spectral_mapping_check(&t, &f).unwrap();
        if !mapping.passed || mapping.worst_distance > 1e-8 {
            failure = Some(format!(
                "trial {i}: spectral mapping distance {:.3e} for {}",
                mapping.worst_distance,
                f.name
            ));
            break;
        }
    }
    criterion(5, "calculus homomorphism, isometry, spectral mapping", failure);
}

#[test]
fn criterion_06_polynomial_approximation_cross_check() {
    let mut rng = SeededRng::new(1006);
    let mut failure = None;
    'outer: for &eps in &[1e-4, 1e-6] {
        for case in 0..3 {
            let n = 3 + case;
            let (t, f) = match case {
                0 => (random::normal(&mut rng, n).matrix, builtin("exp_re").unwrap()),
                1 => {
                    let points: Vec<Quaternion> =
                        (0..n).map(|_| Quaternion::real(rng.range(0.1, 4.0))).collect();
                    (random::normal_from_points(&mut rng, &points).matrix, builtin("sqrt").unwrap())
                }
                _ => (random::normal(&mut rng, n).matrix, builtin("abs2").unwrap()),
            };
            let e = spectral_measure(&t, J1).unwrap();
            let exact = calc_continuous(&e, &f).unwrap();
            let approx = calc_poly_approx(&t, &f, eps).unwrap();
            let gap = approx.sub(&exact).operator_norm().unwrap();
            let bound = eps + 1e-10 * 1.0f64.max(exact.operator_norm().unwrap());
            if gap > bound {
                failure = Some(format!(
                    "{} at eps {eps:.0e}: gap {gap:.3e} > {bound:.3e}",
                    f.name
                ));
                break 'outer;
            }
        }
    }
    criterion(6, "polynomial approximation matches exact calculus", failure);
}

#[test]
fn criterion_07_bounded_transform_contract() {
    let mut rng = SeededRng::new(1007);
    let mut failure = None;
    for i in 0..100 {
        let huge = i >= 96;
        let n = 1 + i % 4;
        let target = if huge { 1.0e6 } else { [0.5, 7.0, 80.0, 1000.0][i % 4] };
        let mut points = random::vector(&mut rng, n);
        let biggest = points.iter().map(|q| q.norm()).fold(0.0f64, f64::max);
        for q in &mut points {
            *q = *q * (target / biggest);
        }
        let t = random::normal_from_points(&mut rng, &points).matrix;
        let norm_t = t.operator_norm().unwrap();
        let pair = z_transform(&t).unwrap();
        let norm_z = pair.z.operator_norm().unwrap();
        if norm_z > 1.0 + 1e-10 {
            failure = Some(format!("trial {i}: |Z| = {norm_z} exceeds 1 + 1e-10"));
            break;
        }
        if !huge {
            let identity = QMatrix::identity(t.dim());
            let c_res = pair
                .c
                .sub(&identity.sub(&pair.z.adjoint().matmul(&pair.z)))
                .frob_norm();
            if c_res > 1e-10 {
                failure = Some(format!("trial {i}: C defect identity residual {c_res:.3e}"));
                break;
            }
            let adj_pair = z_transform(&t.adjoint()).unwrap();
            let adj_res = pair.z.adjoint().sub(&adj_pair.z).frob_norm();
            if adj_res > 1e-10 {
                failure = Some(format!("trial {i}: Z(T)* vs Z(T*) residual {adj_res:.3e}"));
                break;
            }
        }
        let recovered = recover_t(&pair).unwrap();
        let roundtrip = recovered.t.sub(&t).frob_norm();
        let bound = if huge { 1e-6 } else { 1e-8 } * norm_t;
        if roundtrip > bound {
            failure = Some(format!(
                "trial {i} (|T| = {norm_t:.1e}): roundtrip {roundtrip:.3e} > {bound:.3e}"
            ));
            break;
        }
    }
    criterion(7, "bounded transform contraction and roundtrip, 100 trials", failure);
}

#[test]
fn criterion_08_measure_axioms_and_commutant() {
    let mut rng = SeededRng::new(1008);
    let mut failure = None;
    for i in 0..50 {
        let n = 2 + i % 5;
        let t = random::normal(&mut rng, n).matrix;
        let e = spectral_measure(&t, J1).unwrap();
        let tol = 1e-10 * (1.0 + t.frob_norm());
        let axioms = verify_measure_axioms(&e, &mut rng, tol).unwrap();
        if !axioms.passed {
            let bad: Vec<&str> =
                axioms.checks.iter().filter(|c| !c.ok).map(|c| c.name).collect();
            failure = Some(format!("trial {i}: axioms failed: {bad:?}"));
            break;
        }
        // Commutant: both characterizations must agree for a commuting
        // operator (a function of T) and for a generic one.
        let commuting = e.assemble(|idx, _| Quaternion::real(1.0 + idx as f64));
        let (abj, ee) = commutant_check(&t, &commuting, J1, 1e-8).unwrap();
        if !(abj && ee) {
            failure = Some(format!("trial {i}: function of T escaped the commutant ({abj}, {ee})"));
            break;
        }
        let generic = random::matrix(&mut rng, n);
        let (abj, ee) = commutant_check(&t, &generic, J1, 1e-8).unwrap();
        if abj != ee {
            failure = Some(format!("trial {i}: commutant characterizations disagree ({abj}, {ee})"));
            break;
        }
    }
    // Negative control: a corrupted projection must be caught.
    if failure.is_none() {
        let t = random::normal(&mut rng, 4).matrix;
        let mut e = spectral_measure(&t, J1).unwrap();
        e.atoms[0].projection = e.atoms[0].projection.scale(1.5);
        let axioms = verify_measure_axioms(&e, &mut rng, 1e-10).unwrap();
        if axioms.passed {
            failure = Some("corrupted measure passed the axiom checks".to_string());
        }
    }
    criterion(8, "measure axioms, commutant equivalence, negative control", failure);
}

#[test]
fn criterion_09_golden_reports_are_byte_identical() {
    let root = corpus_root();
    let mut failure = None;
    'outer: for name in ["e1_1x1", "e2_1x1", "rotation_2x2"] {
        let input = std::fs::read_to_string(root.join(format!("inputs/{name}.json"))).unwrap();
        let t = report::parse_matrix(&input).unwrap();
        let e = spectral_measure(&t, J1).unwrap();
        let spec = s_spectrum(&t, J1).unwrap();
        let artifacts = [
            (format!("golden/{name}.measure.json"), report::measure_report(&t, &e).render()),
            (format!("golden/{name}.spectrum.json"), report::spectrum_report(&spec, t.dim()).render()),
            (format!("golden/{name}.spectrum.csv"), report::spectrum_csv(&spec)),
        ];
        for (path, produced) in artifacts {
            let frozen = std::fs::read_to_string(root.join(&path)).unwrap();
            if produced != frozen {
                failure = Some(format!("{path} differs from the frozen golden"));
                break 'outer;
            }
        }
        if name == "e2_1x1" {
            // The canonical basis rotates e1 onto e2: y = (1 + e3)/sqrt(2),
            // and the atom is the unit sphere represented by e1.
            let y = e.atoms[0].vectors[0][0];
            let expected = Quaternion::new(1.0, 0.0, 0.0, 1.0) * std::f64::consts::FRAC_1_SQRT_2;
            if (y - expected).norm() > 1e-12 {
                failure = Some(format!("canonical basis of [e2] is {y:?}"));
                break;
            }
            if (e.atoms[0].p - Quaternion::E1).norm() > 1e-12 {
                failure = Some(format!("atom of [e2] is {:?}", e.atoms[0].p));
                break;
            }
        }
    }
    criterion(9, "golden corpus reports byte-identical", failure);
}

#[test]
fn criterion_10_cli_verify_exit_codes_on_the_corpus() {
    let root = corpus_root();
    let run = |args: &[&str]| {
        std::process::Command::new(env!("CARGO_BIN_EXE_sspectral"))
            .args(args)
            .output()
            .unwrap()
            .status
            .code()
    };
    let mut failure = None;
    for name in ["e1_1x1", "e2_1x1", "rotation_2x2"] {
        let path = root.join(format!("inputs/{name}.json"));
        let code = run(&["verify", "--input", path.to_str().unwrap()]);
        if code != Some(0) {
            failure = Some(format!("verify on {name} exited {code:?}, expected 0"));
            break;
        }
    }
    if failure.is_none() {
        let cases = [
            (vec!["verify", "--input", "corrupt/truncated.json"], 2, "malformed input"),
            (vec!["verify", "--input", "corrupt/nonnormal.json"], 4, "non-normal input"),
            (
                vec!["verify", "--input", "inputs/e1_1x1.json", "--atol", "1e-22", "--rtol", "1e-22"],
                1,
                "unattainable tolerances",
            ),
        ];
        for (args, expected, what) in cases {
            let full: Vec<String> = args
                .iter()
                .map(|a| {
                    if a.ends_with(".json") {
                        root.join(a).to_str().unwrap().to_string()
                    } else {
                        a.to_string()
                    }
                })
                .collect();
            let argv: Vec<&str> = full.iter().map(String::as_str).collect();
            let code = run(&argv);
            if code != Some(expected) {
                failure = Some(format!("{what} exited {code:?}, expected {expected}"));
                break;
            }
        }
    }
    criterion(10, "CLI exit-code contract on the shipped corpus", failure);
}
