use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn forge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_operad-forge")).args(args).env_remove("OPERAD_FORGE_MAX_STEPS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn d2check_passes() {
    let o = forge(&["difinfty", "d2check", "--max-arity", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS d^2(m6) = 0"));
}

#[test]
fn contract_verify_passes() {
    let o = forge(&["contract", "verify", "--max-arity", "4", "--max-degree", "2", "--jobs", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn non_associative_algebra_fails_with_alg_residual() {
    let o = forge(&["mc", "check", "--algebra", data("bad.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let s = stdout(&o);
    assert!(s.contains("FAIL associativity"), "{s}");
    assert!(s.contains("FAIL Maurer-Cartan residual vanishes"), "{s}");
    assert!(s.contains("Alg part, arity 3:"), "{s}");
    assert!(!s.contains("Do part"), "{s}");
}

#[test]
fn honest_algebra_passes_mc_check() {
    for f in ["idempotent.json", "dual_numbers.json", "square_zero.json"] {
        let o = forge(&["mc", "check", "--algebra", data(f).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{f}: {}", stdout(&o));
    }
}

#[test]
fn lambda_override_can_break_the_leibniz_rule() {
    // d(e) = −e is a weight-1 operator on e² = e but not a weight-0 one.
    let o = forge(&["mc", "check", "--algebra", data("idempotent.json").to_str().unwrap(), "--lambda", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("Do part, arity 2:"));
}

#[test]
fn twist_compare_reports_the_literal_bracket() {
    let alg = data("idempotent.json");
    let o = forge(&["mc", "twist-compare", "--algebra", alg.to_str().unwrap(), "--max-arity", "3"]);
    let s = stdout(&o);
    assert_eq!(o.status.code(), Some(1), "{s}");
    assert!(s.contains("PASS l1 twisted by (m, tau) vs -d_DA"));
    assert!(s.contains("PASS (l1^beta)^tau vs d_DO"));
    assert!(s.contains("PASS l2^beta vs the Koszul-signed C_DO bracket"));
    assert!(s.contains("FAIL l2^beta vs the literal C_DO bracket"));
    let o = forge(&["mc", "twist-compare", "--algebra", alg.to_str().unwrap(), "--max-arity", "3", "--bracket", "koszul"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn cohomology_table() {
    let o = forge(&[
        "cohomology",
        "compute",
        "--algebra",
        data("square_zero.json").to_str().unwrap(),
        "--max-level",
        "3",
    ]);
    let s = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{s}");
    let row = s.lines().find(|l| l.starts_with("DA ")).unwrap();
    let dims: Vec<usize> = row.split_whitespace().skip(1).map(|x| x.parse().unwrap()).collect();
    assert_eq!(dims, [1, 2, 2, 2]);
    let o = forge(&[
        "cohomology",
        "compute",
        "--algebra",
        data("square_zero.json").to_str().unwrap(),
        "--bimodule",
        data("square_zero_bimodule.json").to_str().unwrap(),
        "--max-level",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn compare_twist_passes() {
    let o = forge(&["cohomology", "compare-twist", "--algebra", data("dual_numbers.json").to_str().unwrap(), "--max-level", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn hda_structure_file() {
    let o = forge(&["hda", "check", "--structure", data("dg_structure.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("PASS arity 3: Maurer-Cartan residual vanishes"));
}

#[test]
fn hda_failure_dumps_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("s.json");
    // m_1 x = y with y ≠ 0 but d_1 only on x: d_1 m_1 ≠ m_1 d_1.
    std::fs::write(
        &p,
        r#"{ "space": { "dims": { "0": 1, "1": 1 }, "labels": ["y", "x"] }, "lambda": "1",
             "m": { "1": { "x": { "y": "1" } } }, "d": { "1": { "x": { "x": "1" } } } }"#,
    )
    .unwrap();
    let o = forge(&["hda", "check", "--structure", p.to_str().unwrap()]);
    let s = stdout(&o);
    assert_eq!(o.status.code(), Some(1), "{s}");
    assert!(s.contains("FAIL arity 1: weighted Leibniz identity"), "{s}");
    assert!(s.contains("x -> y"), "{s}");
}

#[test]
fn normalize_and_apply() {
    let el = data("element.json");
    let o = forge(&["dif", "normalize", "--in", el.to_str().unwrap()]);
    let s = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{s}");
    // Associativity holds in the strict operad.
    assert!(s.contains("normal form:\n[]"), "{s}");
    let o = forge(&["contract", "apply", "--in", el.to_str().unwrap()]);
    let s = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{s}");
    assert!(s.contains("(m3 _ _ _)"), "{s}");
}

#[test]
fn koszul_delta_lists_shapes() {
    let o = forge(&["koszul", "delta", "--gen", "sd3", "--list"]);
    let s = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{s}");
    assert!(s.contains("nonzero decompositions"));
    let o = forge(&["koszul", "crosscheck", "--max-arity", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn jacobi_command() {
    let o = forge(&["linfty", "jacobi", "--dim", "2", "--maxn", "3", "--arity", "2", "--trials", "4", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = forge(&["linfty", "jacobi", "--degrees", "0,1", "--maxn", "3", "--arity", "2", "--trials", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, jobs: &str| {
        let p = dir.path().join(name);
        let o = forge(&[
            "linfty", "jacobi", "--maxn", "3", "--trials", "5", "--seed", "11", "--jobs", jobs, "--out", p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        (stdout(&o), std::fs::read_to_string(p).unwrap())
    };
    let (h1, j1) = run("a.json", "1");
    let (h2, j2) = run("b.json", "2");
    assert_eq!(h1, h2);
    assert_eq!(j1, j2);
    let v: serde_json::Value = serde_json::from_str(&j1).unwrap();
    assert_eq!(v["seed"], 11);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["command"], "linfty jacobi");
}

#[test]
fn step_bound_is_enforced() {
    let o = Command::new(env!("CARGO_BIN_EXE_operad-forge"))
        .args(["contract", "apply", "--in", data("element.json").to_str().unwrap()])
        .env("OPERAD_FORGE_MAX_STEPS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("step bound"));
    let o = Command::new(env!("CARGO_BIN_EXE_operad-forge"))
        .args(["difinfty", "d2check"])
        .env("OPERAD_FORGE_MAX_STEPS", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors() {
    assert_eq!(forge(&["difinfty"]).status.code(), Some(2));
    assert_eq!(forge(&["hda", "check"]).status.code(), Some(2));
    assert_eq!(forge(&["difinfty", "diff", "--gen", "sd3"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.json");
    std::fs::write(&p, "{ \"dim\": 1 }").unwrap();
    let o = forge(&["mc", "check", "--algebra", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed JSON"));
}
