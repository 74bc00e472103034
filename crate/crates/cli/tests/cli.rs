use std::path::Path;
use std::process::Command;

use enriques_cli::report::{ReportFile, VerificationReport};
use enriques_cli::{run_args, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK};
use enriques_core::cases::{bundled_case, save_case};

struct Run {
    code: u8,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let mut out = vec![];
    let mut err = vec![];
    let mut argv = vec!["enriques-verify"];
    argv.extend_from_slice(args);
    let code = run_args(argv, &mut out, &mut err);
    Run {
        code,
        out: String::from_utf8(out).unwrap(),
        err: String::from_utf8(err).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_single_case_lists_sets() {
    let r = run(&["verify", "56-0"]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("admissible sets (4):"), "{}", r.out);
    for s in ["{1}", "{1,2}", "{1,3}", "{1,2,3}"] {
        assert!(r.out.lines().any(|l| l.trim() == s), "{s} missing");
    }
}

#[test]
fn verify_needs_a_case() {
    assert_eq!(run(&["verify"]).code, EXIT_INPUT);
    assert_eq!(run(&["verify", "no-such-case"]).code, EXIT_INPUT);
    assert_eq!(run(&["verify", "56-0", "--all"]).code, EXIT_INPUT);
}

#[test]
fn bad_arguments_go_to_stderr() {
    let r = run(&["frobnicate"]);
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.out.is_empty() && !r.err.is_empty());
    let r = run(&["--help"]);
    assert_eq!(r.code, EXIT_OK);
    assert!(r.out.contains("verify"));
}

#[test]
fn enumerate_lists_and_counts() {
    let r = run(&["enumerate", "56-0", "--list"]);
    assert_eq!(
        r.out.lines().collect::<Vec<_>>(),
        ["{1}", "{1,2}", "{1,3}", "{1,2,3}"]
    );
    let r = run(&["enumerate", "9-1-ell", "--count"]);
    assert_eq!(r.out.trim().parse::<usize>().unwrap(), 27);
}

#[test]
fn toric_discrepancy() {
    let r = run(&["toric", "--alpha", "1", "--beta", "1", "--coeff", "1/2"]);
    assert_eq!((r.code, r.out.trim()), (EXIT_OK, "0"));
    let r = run(&["toric", "--alpha", "2", "--beta", "3", "--coeff", "4/5"]);
    assert_eq!(r.out.trim(), "0");
    assert_eq!(
        run(&["toric", "--alpha", "1", "--beta", "1", "--coeff", "x"]).code,
        EXIT_INPUT
    );
}

#[test]
fn solve_a_case_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("case6-2.json");
    save_case(&bundled_case("6-2-ell").unwrap(), &path).unwrap();
    let r = run(&["solve", "--graph", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert_eq!(r.out.lines().next(), Some("a = 6/7"));
    let r = run(&["solve", "--graph", path.to_str().unwrap(), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&r.out).unwrap();
    assert_eq!(v["a"], "6/7");
}

#[test]
fn klt_on_a_single_curve() {
    let dir = tempfile::tempdir().unwrap();
    let g = r#"{"vertices": [{"id": "e", "kind": "exceptional", "weight": -3}], "edges": []}"#;
    let path = write(dir.path(), "single-minus3.json", g);
    let r = run(&["klt", "--graph", &path]);
    assert_eq!(r.code, EXIT_OK, "{}", r.err);
    assert!(r.out.contains("verdict: klt"));
    assert!(r.out.contains("e b = 1/3"));
}

#[test]
fn missing_file_is_an_input_error() {
    let r = run(&["solve", "--graph", "/nonexistent/graph.json"]);
    assert_eq!(r.code, EXIT_INPUT);
    assert!(r.err.contains("graph.json"));
}

#[test]
fn delta_histogram() {
    let r = run(&["delta", "56-0"]);
    assert_eq!(
        (r.code, r.out.trim()),
        (EXIT_OK, "delta = 1: 4 admissible sets")
    );
}

#[test]
fn validate_flags_a_perturbed_case() {
    let dir = tempfile::tempdir().unwrap();
    let mut case = bundled_case("9-1-ell").unwrap();
    assert_eq!(run(&["validate", "9-1-ell"]).code, EXIT_OK);
    case.expected.index = 11;
    let path = dir.path().join("bad.json");
    save_case(&case, &path).unwrap();
    let r = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_MISMATCH);
    assert!(r
        .out
        .lines()
        .any(|l| l.starts_with("FAIL") && l.contains("index")));
}

#[test]
fn wrong_expectation_is_a_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let mut case = bundled_case("56-0").unwrap();
    case.expected.rho_max = 2;
    let path = dir.path().join("56.json");
    save_case(&case, &path).unwrap();
    let r = run(&["verify", path.to_str().unwrap()]);
    assert_eq!(r.code, EXIT_MISMATCH);
    assert!(r.out.contains("MISMATCH"));
}

#[test]
fn render_formats() {
    let r = run(&["render", "56-0", "--format", "dot"]);
    assert_eq!(r.out.matches("shape=box").count(), 1, "{}", r.out);
    assert!(r.out.starts_with("graph"));
    let r = run(&["render", "56-0", "--format", "ascii"]);
    assert_eq!(
        r.out.lines().filter(|l| l.starts_with("candidate")).count(),
        3
    );
}

#[test]
fn saturate_reproduces_the_figure() {
    let dir = tempfile::tempdir().unwrap();
    let case = bundled_case("53-2-ell").unwrap();
    let diagram = enriques_core::cases::graph_to_json(case.theorem_diagram.as_ref().unwrap());
    let d = write(dir.path(), "diagram.json", &diagram);
    let fig = dir.path().join("figure.json");
    save_case(&case, &fig).unwrap();
    let r = run(&[
        "saturate",
        "--graph",
        &d,
        "--compare",
        fig.to_str().unwrap(),
    ]);
    assert_eq!(r.code, EXIT_OK, "{}{}", r.out, r.err);
}

#[test]
fn list_bundled_ids() {
    let r = run(&["list"]);
    let ids: Vec<&str> = r.out.lines().collect();
    assert_eq!(ids.len(), 13);
    assert_eq!(ids[0], "6-2-ell");
}

#[test]
fn json_report_round_trips_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let paths: Vec<String> = (0..2)
        .map(|k| {
            dir.path()
                .join(format!("r{k}.json"))
                .to_str()
                .unwrap()
                .to_string()
        })
        .collect();
    for p in &paths {
        assert_eq!(run(&["verify", "9-1-ell", "--json", p]).code, EXIT_OK);
    }
    let files: Vec<ReportFile> = paths
        .iter()
        .map(|p| serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap())
        .collect();
    let reports: Vec<&VerificationReport> = files.iter().map(|f| &f.report).collect();
    assert_eq!(reports[0].to_json(), reports[1].to_json());
    assert_eq!(reports[0].cases[0].case_id, "9-1-ell");
    assert_eq!(reports[0].index_set_ok, None);
    assert!(reports[0].passed());
}

#[test]
fn binary_verifies_everything() {
    let out = Command::new(env!("CARGO_BIN_EXE_enriques-verify"))
        .args(["verify", "--all"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.contains("index set: {7, 8, 9, 10, 11, 13, 17} (as expected)"));
    assert!(text.contains("13/13 cases verified"));
}
