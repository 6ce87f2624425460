use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qgroupoid::io::ReportFile;
use qgroupoid::selftest::SelftestReport;

const MUTANT_FILES: [&str; 9] = [
    "pair2-dropped-leg",
    "pair2-noninvariant-haar",
    "pair3-corrupted",
    "s3-identity-antipode",
    "s3-right-trivial-coproduct",
    "z2-bundle-degenerate-haar",
    "z2-bundle-dropped-leg",
    "z3-corrupted",
    "z3-nonfunctorial-rep",
];

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"))
}

fn qg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgroupoid")).args(args).output().expect("binary runs")
}

fn verify(name: &str) -> Output {
    qg(&["verify", fixture(name).to_str().unwrap()])
}

#[test]
fn shipped_instances_pass() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let stem = path.file_stem().unwrap().to_str().unwrap().to_string();
        if MUTANT_FILES.contains(&stem.as_str()) {
            continue;
        }
        let o = verify(&stem);
        assert_eq!(o.status.code(), Some(0), "{stem}: {}", String::from_utf8_lossy(&o.stdout));
        seen += 1;
    }
    assert!(seen >= 19, "only {seen} passing fixtures shipped");
}

#[test]
fn shipped_mutants_fail_with_exit_one() {
    for name in MUTANT_FILES {
        let o = verify(name);
        assert_eq!(o.status.code(), Some(1), "{name}");
        assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"), "{name}");
    }
}

#[test]
fn bad_input_exits_two() {
    assert_eq!(qg(&["verify", "/nonexistent/instance.json"]).status.code(), Some(2));
    assert_eq!(qg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qg(&["verify", fixture("pair2").to_str().unwrap(), "--tol", "-1"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, r#"{"schema_version": 1, "kind": "groupoid", "payload": {"objects": 3}}"#).unwrap();
    let o = qg(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());

    std::fs::write(&path, r#"{"schema_version": 99, "kind": "groupoid", "payload": {}}"#).unwrap();
    assert_eq!(qg(&["verify", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn json_report_is_parseable() {
    let o = qg(&["verify", fixture("pair3-corrupted").to_str().unwrap(), "--json", "-"]);
    assert_eq!(o.status.code(), Some(1));
    let report: ReportFile = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!report.summary.pass);
    let failed: Vec<_> = report.checks.iter().filter(|c| !c.pass).collect();
    assert_eq!(failed.len(), report.summary.failed);
    assert!(failed.iter().all(|c| c.witness.is_some()));
    assert!(failed.iter().any(|c| c.name.starts_with("groupoid.")));
}

#[test]
fn json_to_file_also_prints_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let o = qg(&["verify", fixture("z3").to_str().unwrap(), "--json", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("PASS"));
    let report: ReportFile = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(report.summary.pass);
    assert!(report.summary.checks > 10);
}

#[test]
fn checks_filter_restricts_report() {
    let o = qg(&[
        "verify",
        fixture("s3-right-trivial-coproduct").to_str().unwrap(),
        "--checks",
        "coassociativity",
        "--json",
        "-",
    ]);
    let report: ReportFile = serde_json::from_slice(&o.stdout).unwrap();
    assert!(!report.checks.is_empty());
    assert!(report.checks.iter().all(|c| c.name.contains("coassociativity")));
    assert!(report.summary.pass);
    assert_eq!(o.status.code(), Some(0));

    let o = qg(&["verify", fixture("s3-right-trivial-coproduct").to_str().unwrap(), "--checks", "haar"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn generate_roundtrips_through_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 5] = [
        &["generate", "pair", "--n", "3"],
        &["generate", "group", "--table", "z4"],
        &["generate", "union"],
        &["generate", "quantum", "--group", "z2"],
        &["generate", "representation", "--fixture", "s3", "--rep", "irrep2"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let path = dir.path().join(format!("{i}.json"));
        let mut full = args.to_vec();
        full.extend(["--out", path.to_str().unwrap()]);
        let o = qg(&full);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        let o = qg(&["verify", path.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stdout));
    }
}

#[test]
fn selftest_passes_and_names_injected_fault() {
    let o = qg(&["selftest", "--seed", "3", "--json", "-"]);
    assert_eq!(o.status.code(), Some(0));
    let r: SelftestReport = serde_json::from_slice(&o.stdout).unwrap();
    assert!(r.pass);
    assert_eq!(r.seed, 3);

    let o = qg(&["selftest", "--seed", "3", "--inject-fault", "random_tensor_1", "--json", "-"]);
    assert_eq!(o.status.code(), Some(1));
    let r: SelftestReport = serde_json::from_slice(&o.stdout).unwrap();
    let failed: Vec<_> = r.cases.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    assert_eq!(failed, ["random_tensor_1"]);

    assert_eq!(qg(&["selftest", "--inject-fault", "no_such_case"]).status.code(), Some(2));
}

#[test]
fn bad_thread_count_is_input_error() {
    let o = Command::new(env!("CARGO_BIN_EXE_qgroupoid"))
        .args(["selftest"])
        .env("QGROUPOID_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
