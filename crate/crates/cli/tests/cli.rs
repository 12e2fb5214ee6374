use std::path::PathBuf;
use std::process::{Command, Output};

use asep2_core::model::{markov_generator, BoundaryFamily, ModelParams};
use asep2_core::Complex64;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asep2"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn temp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("asep2-cli-{}-{}", std::process::id(), name))
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn verify_first_model_passes() {
    let o = run(&["verify", "--family", "A", "--N", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let arr = v.as_array().unwrap();
    assert!(arr.len() > 20);
    for r in arr {
        for key in ["name", "points", "residual", "tolerance", "passed"] {
            assert!(r.get(key).is_some(), "missing {key} in {r}");
        }
        assert_eq!(r["passed"], true, "{r}");
    }
}

#[test]
fn verify_second_model_three_sites_passes() {
    let o = run(&["verify", "--family", "B", "--N", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn verify_reports_failures_with_exit_one() {
    // an impossible tolerance turns every check into a failure
    let o = run(&["verify", "--family", "A", "--N", "1", "--tol", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAILED"));
}

#[test]
fn q_equal_one_is_a_config_error() {
    let o = run(&["verify", "--q", "1.0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("different from 1"), "{}", stderr(&o));
}

#[test]
fn malformed_flags_are_config_errors() {
    assert_eq!(run(&["curves", "--grid", "0:1"]).status.code(), Some(2));
    assert_eq!(
        run(&["spectrum", "--N", "3", "--theta", "1,1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["bae", "--variant", "A3", "--M", "5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["bae", "--variant", "A1", "--family", "B"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn spectrum_reproduces_first_table() {
    let o = run(&["spectrum", "--family", "A", "--N", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    let got: Vec<(f64, usize)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    let expect = [
        (-61.4, 1),
        (-58.0897, 2),
        (-56.4, 1),
        (-39.3654, 2),
        (-20.3449, 2),
        (0.0, 1),
    ];
    assert_eq!(got.len(), expect.len());
    for ((g, gm), (e, em)) in got.iter().zip(expect) {
        assert!((g - e).abs() < 5e-4, "{g} vs {e}");
        assert_eq!(*gm, em);
    }
    // 17 significant digits
    assert!(
        rows[0][0]
            .split('e')
            .next()
            .unwrap()
            .trim_start_matches('-')
            .len()
            == 18
    );
}

#[test]
fn spectrum_reproduces_second_table() {
    let o = run(&["spectrum", "--preset", "paper-B"]);
    let rows = csv_rows(&stdout(&o));
    let mut values: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    values.sort_by(f64::total_cmp);
    let expect = [-5.5301, -4.9531, -3.6350, -3.3771, -2.0590, -1.4819, 0.0];
    for (g, e) in values.iter().zip(expect) {
        assert!((g - e).abs() < 5e-4, "{g} vs {e}");
    }
    assert_eq!(rows.last().unwrap()[2], "3");
}

#[test]
fn single_site_spectrum_matches_the_characteristic_polynomial() {
    // Vieta: the eigenvalues of the 3×3 generator have sum tr(L), pairwise-product sum equal to the
    // sum of principal 2×2 minors, and product det(L)
    let p = ModelParams::paper_a(1);
    let l = markov_generator(1, &p, BoundaryFamily::A);
    let e = |i: usize, j: usize| l[(i, j)];
    let tr = e(0, 0) + e(1, 1) + e(2, 2);
    let minors = e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0) + e(0, 0) * e(2, 2) - e(0, 2) * e(2, 0)
        + e(1, 1) * e(2, 2)
        - e(1, 2) * e(2, 1);
    let det = e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1))
        - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
        + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0));
    let o = run(&["spectrum", "--family", "A", "--N", "1"]);
    let v: Vec<Complex64> = csv_rows(&stdout(&o))
        .iter()
        .flat_map(|r| {
            let v = Complex64::new(r[0].parse().unwrap(), r[1].parse().unwrap());
            std::iter::repeat_n(v, r[2].parse().unwrap())
        })
        .collect();
    assert_eq!(v.len(), 3);
    let scale = tr.norm();
    assert!((v[0] + v[1] + v[2] - tr).norm() < 1e-12 * scale);
    assert!((v[0] * v[1] + v[0] * v[2] + v[1] * v[2] - minors).norm() < 1e-12 * scale * scale);
    assert!((v[0] * v[1] * v[2] - det).norm() < 1e-12 * scale.powi(3));
}

#[test]
fn parameter_file_matches_the_preset() {
    let path = temp("params.txt");
    std::fs::write(&path, "# second model\nq = 1.8\nalpha = 0.22\nbeta = 0.41  # right\ngamma = 0.76\ndelta = 0.95\nN = 2\n").unwrap();
    let a = run(&[
        "spectrum",
        "--family",
        "B",
        "--params",
        path.to_str().unwrap(),
    ]);
    let b = run(&["spectrum", "--preset", "paper-B"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    std::fs::write(&path, "q: 1.8\n").unwrap();
    assert_eq!(
        run(&["spectrum", "--params", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    let _ = std::fs::remove_file(path);
}

#[test]
fn curves_have_nine_branches_and_collapse_at_one() {
    let o = run(&["curves", "--family", "A", "--N", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 181);
    assert!(rows.iter().all(|r| r.len() == 2 + 18));
    let o = run(&["curves", "--family", "B", "--grid", "0.5:1.5:3"]);
    let rows = csv_rows(&stdout(&o));
    let mid: Vec<f64> = rows[1].iter().map(|v| v.parse().unwrap()).collect();
    assert_eq!(mid[0], 1.0);
    for k in 1..9 {
        assert!(
            (mid[2 + 2 * k] - mid[2]).abs() < 1e-9 * mid[2].abs(),
            "{mid:?}"
        );
    }
}

#[test]
fn tq_curves_follow_exact_branches() {
    for v in ["A1", "B3"] {
        let o = run(&["curves", "--variant", v]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        assert!(stderr(&o).contains("match exact branches"));
    }
}

#[test]
fn bae_reproduces_the_third_type_table() {
    let o = run(&["bae", "--variant", "A3", "--N", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let sols = v.as_array().unwrap();
    assert_eq!(sols.len(), 2);
    for s in sols {
        for key in ["variant", "M", "lambda", "mu", "residual", "E_L"] {
            assert!(s.get(key).is_some(), "missing {key}");
        }
    }
    let with_root = sols.iter().find(|s| s["M"] == 1).unwrap();
    let l = &with_root["lambda"][0];
    assert!(
        (l["re"].as_f64().unwrap() - 1.6).abs() < 1e-9
            && (l["im"].as_f64().unwrap() - 1.2).abs() < 1e-9
    );
    assert!((with_root["E_L"]["re"].as_f64().unwrap() + 61.4).abs() < 5e-4);
    let empty = sols.iter().find(|s| s["M"] == 0).unwrap();
    assert!(empty["lambda"].as_array().unwrap().is_empty());
    assert!((empty["E_L"]["re"].as_f64().unwrap() + 56.4).abs() < 5e-4);
}

#[test]
fn bae_reproduces_the_second_type_table() {
    let o = run(&["bae", "--variant", "B2", "--N", "2"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let mus: Vec<Vec<f64>> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|s| {
            s["mu"]
                .as_array()
                .unwrap()
                .iter()
                .map(|m| m["re"].as_f64().unwrap())
                .collect()
        })
        .collect();
    assert_eq!(mus.len(), 3);
    assert!(mus[0].is_empty());
    assert!((mus[1][0] - 0.5377).abs() < 1e-4);
    assert!((mus[2][0] - 0.1207).abs() < 1e-4 && (mus[2][1] - 0.6181).abs() < 1e-4);
}

#[test]
fn bae_matches_the_spectrum_with_degeneracies() {
    let o = run(&["bae", "--variant", "A1", "--N", "2", "--match-spectrum"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["solutions"].as_array().unwrap().len(), 6);
    let lines = v["matching"]["markov"]["eigenvalues"].as_array().unwrap();
    let mult: Vec<u64> = lines
        .iter()
        .map(|l| l["multiplicity"].as_u64().unwrap())
        .collect();
    let recovered: Vec<u64> = v["matching"]["recovered"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_u64().unwrap())
        .collect();
    assert_eq!(mult, [1, 2, 1, 2, 2, 1]);
    assert_eq!(recovered, mult);
    assert!(stderr(&o).contains("lambda2-mode/literal: pass"));
}

#[test]
fn reproduce_all_tables() {
    for id in [
        "table-4.1",
        "table-4.2",
        "table-5.1",
        "table-5.2",
        "table-5.3",
    ] {
        let o = run(&["reproduce", id]);
        assert_eq!(o.status.code(), Some(0), "{id}: {}", stderr(&o));
        assert!(!stdout(&o).contains("MISMATCH"));
    }
    let o = run(&["reproduce", "table-5.3"]);
    let text = stdout(&o);
    let first = text
        .lines()
        .find(|l| l.starts_with("0,[1.1572-0.6788i]"))
        .unwrap();
    assert!(first.ends_with(",ok"), "{first}");
    assert!(first.contains("-5.5301,-5.5301"));
    assert!(text.contains("known misprint"));
}

#[test]
fn reproduce_json_rows() {
    let o = run(&["reproduce", "table-4.1", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    for row in v.as_array().unwrap() {
        assert_eq!(row["status"], "ok");
        assert!(row["delta"].as_f64().unwrap() <= 5e-4);
        assert_eq!(row["printed_degeneracy"], row["computed_degeneracy"]);
    }
}

#[test]
fn unknown_table_is_rejected() {
    let o = run(&["reproduce", "table-9.9"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unknown table"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let cases: [&[&str]; 3] = [
        &["bae", "--variant", "B1", "--seed", "11"],
        &["curves", "--family", "B", "--grid", "0.3+0.2i:2.4-0.3i:40"],
        &["verify", "--family", "A", "--N", "1"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let files: Vec<PathBuf> = (0..2).map(|k| temp(&format!("idem-{i}-{k}"))).collect();
        for f in &files {
            let mut a = args.to_vec();
            a.extend(["--out", f.to_str().unwrap()]);
            let o = run(&a);
            assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
        }
        let (a, b) = (
            std::fs::read(&files[0]).unwrap(),
            std::fs::read(&files[1]).unwrap(),
        );
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
        for f in files {
            let _ = std::fs::remove_file(f);
        }
    }
}
