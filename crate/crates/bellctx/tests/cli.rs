use std::path::Path;
use std::process::{Command, Output};

use bellctx::schema::{ExperimentSpec, QuartetSpec};

fn bellctx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellctx")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn summary_value(text: &str, key: &str) -> String {
    let prefix = format!("{key},");
    text.lines().find_map(|l| l.strip_prefix(&prefix)).unwrap_or_else(|| panic!("{key} missing")).to_string()
}

fn write_json<T: serde::Serialize>(dir: &Path, name: &str, value: &T) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(value).unwrap()).unwrap();
    path.display().to_string()
}

#[test]
fn aspect_defaults_and_half_transmissivity() {
    let o = bellctx(&["aspect"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("# bellctx "));
    assert!(text.contains("# subcommand: aspect\n# seed: 42\n"));
    let standard: f64 = summary_value(&text, "standard_bell_lhs").parse().unwrap();
    assert!((standard - 2.8284).abs() < 1e-4);

    let dir = tempfile::tempdir().unwrap();
    let mut spec = ExperimentSpec::default();
    spec.arm1.gamma = 0.5;
    spec.arm2.gamma = 0.5;
    let path = write_json(dir.path(), "half.json", &spec);
    let text = stdout(&bellctx(&["aspect", "--input", &path]));
    assert_eq!(summary_value(&text, "joint exists"), "feasible");
}

#[test]
fn malformed_input_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\"arm1\": ").unwrap();
    let o = bellctx(&["aspect", "--input", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed JSON"));
    let o = bellctx(&["gamma-sweep", "--gammas", "0,1.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gamma_sweep_rows() {
    let text = stdout(&bellctx(&["gamma-sweep", "--gammas", "0,0.5,1"]));
    let rows: Vec<&str> = text.lines().skip_while(|l| *l != "# table: sweep").skip(2).collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.ends_with(",feasible")));
    let last: Vec<&str> = rows[8].split(',').collect();
    assert_eq!(&last[..2], &["1", "1"]);
    let aspect = stdout(&bellctx(&["aspect"]));
    assert_eq!(last[2], summary_value(&aspect, "bell_lhs"));
}

#[test]
fn joint_exit_codes() {
    let o = bellctx(&["joint"]);
    assert_eq!(o.status.code(), Some(3));
    let text = stdout(&o);
    assert_eq!(summary_value(&text, "joint exists"), "infeasible");
    assert!(text.contains("certificate_value,"));

    let dir = tempfile::tempdir().unwrap();
    let uniform = [[0.25, 0.25], [0.25, 0.25]];
    let spec = QuartetSpec { schema: None, a1a2: uniform, a1b2: uniform, b1a2: uniform, b1b2: uniform };
    let path = write_json(dir.path(), "u.json", &spec);
    let o = bellctx(&["joint", "--input", &path]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("# table: witness"));

    let bad = QuartetSpec { a1b2: [[0.5, 0.0], [0.0, 0.5]], b1b2: [[0.1, 0.1], [0.1, 0.7]], ..spec };
    let path = write_json(dir.path(), "bad.json", &bad);
    assert_eq!(bellctx(&["joint", "--input", &path]).status.code(), Some(2));
}

#[test]
fn hv_default_respects_bell() {
    let text = stdout(&bellctx(&["hv-run"]));
    let chsh: f64 = summary_value(&text, "chsh").parse().unwrap();
    assert!(chsh <= 2.0 + 1e-9);
}

#[test]
fn relax_default_endpoints() {
    let text = stdout(&bellctx(&["relax-sweep"]));
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip_while(|l| *l != "# table: curve")
        .skip(2)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    let (first, last) = (&rows[0], &rows[rows.len() - 1]);
    assert!(first[2] <= 2.0 + 3.0 * first[3]);
    assert!((last[2] - 2.0 * 2f64.sqrt()).abs() <= 3.0 * last[3]);
    assert_eq!(summary_value(&text, "crosses_two"), "true");
}

#[test]
fn json_output_and_macro_run() {
    let o = bellctx(&["macro-run", "--rounds", "2000", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["metadata"]["subcommand"], "macro-run");
    assert_eq!(v["summary"]["joint exists"], "infeasible");
    assert!(v["summary"]["assignment_inconsistent_fraction"].as_f64().unwrap() > 0.0);
}

#[test]
fn fine_check_agrees() {
    let o = bellctx(&["fine-check", "--count", "100"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(summary_value(&stdout(&o), "all_agree"), "true");
}

#[test]
fn shipped_examples_run() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples");
    let cases = [
        ("aspect", "experiment.json", 0),
        ("aspect", "experiment_matrix.json", 0),
        ("joint", "quartet_pr_box.json", 3),
        ("hv-run", "hv_sawtooth.json", 0),
        ("hv-run", "hv_finite.json", 0),
        ("macro-run", "macro_quantum_target.json", 0),
        ("macro-run", "macro_explicit.json", 0),
        ("relax-sweep", "relaxation_demo.json", 0),
    ];
    for (cmd, file, code) in cases {
        let path = dir.join(file);
        let mut args = vec![cmd, "--input", path.to_str().unwrap()];
        if cmd == "relax-sweep" {
            args.extend(["--samples", "2000"]);
        }
        let o = bellctx(&args);
        assert_eq!(o.status.code(), Some(code), "{cmd} {file}: {}", String::from_utf8_lossy(&o.stderr));
    }
}
