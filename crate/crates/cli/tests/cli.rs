use std::path::PathBuf;

use dimw_cli::{run, EXIT_FAIL, EXIT_OK, EXIT_USAGE};
use dimw_core::builtins::builtin;
use dimw_core::congruence::principal_congruence;
use dimw_core::geometry::GeometrySummary;
use dimw_core::io::{lattice_to_json, DimReport, DimVectorFile};
use dimw_core::lattice::PropertyReport;
use dimw_core::report::{CheckReport, Status};

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn dimw(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dimw").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    Output { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn ok_json(args: &[&str]) -> serde_json::Value {
    let o = dimw(args);
    assert_eq!(o.code, EXIT_OK, "{args:?}: {}", o.stderr);
    serde_json::from_str(&o.stdout).unwrap()
}

fn temp_file(tag: &str, body: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("dimw-cli-{}-{tag}.json", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &[][..],
        &["frobnicate"],
        &["dim"],
        &["dim", "--builtin", "N5", "--file", "x.json"],
        &["compare", "--builtin", "N5", "--word", "0..a"],
        &["compare", "--builtin", "N5", "--word", "0..a", "--word", "0..b", "--word", "0..c"],
        &["check", "--builtin", "N5"],
        &["check", "--builtin", "N5", "--all", "--only", "axioms"],
        &["check", "--builtin", "N5", "--only", "nonsense"],
        &["geom", "--builtin", "N5", "--bound", "many"],
    ] {
        let o = dimw(args);
        assert_eq!(o.code, EXIT_USAGE, "{args:?}");
        assert!(o.stderr.contains("Usage"), "{args:?}: {}", o.stderr);
    }
    assert_eq!(dimw(&["--help"]).code, EXIT_OK);
    assert!(dimw(&["--version"]).stdout.contains("dimw"));
}

#[test]
fn invalid_input_exits_one() {
    assert_eq!(dimw(&["validate", "--builtin", "N6"]).code, EXIT_FAIL);
    assert_eq!(dimw(&["validate", "--builtin", "boolean:40"]).code, EXIT_FAIL);
    assert_eq!(dimw(&["validate", "--file", "/nonexistent/dimw.json"]).code, EXIT_FAIL);
    let cyc = temp_file("cycle", r#"{"name":"c","elements":["0","a","1"],"covers":[["0","a"],["a","1"],["1","0"]]}"#);
    let o = dimw(&["validate", "--file", cyc.to_str().unwrap()]);
    assert_eq!(o.code, EXIT_FAIL);
    assert!(o.stderr.starts_with("error:"));
    let not_lattice = temp_file("nl", r#"{"name":"v","elements":["0","a","b"],"covers":[["0","a"],["0","b"]]}"#);
    assert_eq!(dimw(&["validate", "--file", not_lattice.to_str().unwrap()]).code, EXIT_FAIL);
    assert_eq!(dimw(&["eval", "--builtin", "N5", "--word", "a..0"]).code, EXIT_FAIL);
    assert_eq!(dimw(&["eval", "--builtin", "N5", "--word", "0..z"]).code, EXIT_FAIL);
}

#[test]
fn dim_examples() {
    let p4: DimReport = serde_json::from_value(ok_json(&["dim", "--json", "--builtin", "partition:4"])).unwrap();
    assert_eq!((p4.qosystem.points.len(), p4.p0.len()), (1, 1));
    let m3: DimReport = serde_json::from_value(ok_json(&["dim", "--json", "--builtin", "M3"])).unwrap();
    assert_eq!((m3.qosystem.points.len(), m3.p0.len()), (1, 0));
    let n5 = ok_json(&["dim", "--json", "--builtin", "N5"]);
    for key in ["qosystem", "generators", "p0", "classes"] {
        assert!(n5.get(key).is_some(), "{key}");
    }
    assert_eq!(n5["generators"].as_object().unwrap().len(), 5);
    assert_eq!(n5["qosystem"]["rel"].as_array().unwrap().len(), 2);
}

#[test]
fn check_all_on_n5_passes() {
    let o = dimw(&["check", "--all", "--builtin", "N5"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
    assert!(!o.stdout.contains("FAIL"));
    let reports: Vec<CheckReport> =
        serde_json::from_value(ok_json(&["check", "--all", "--json", "--builtin", "N5"])).unwrap();
    assert_eq!(reports.len(), dimw_cli::CHECKS.len());
    assert!(reports.iter().all(|r| r.elapsed_ms.is_none()));
    assert!(reports.iter().filter(|r| r.status == Status::Pass).count() >= 5);
    let timed: Vec<CheckReport> =
        serde_json::from_value(ok_json(&["check", "--only", "axioms", "--timings", "--json", "--builtin", "N5"]))
            .unwrap();
    assert!(timed[0].elapsed_ms.is_some());
}

#[test]
fn modular_checks_pass() {
    let o = dimw(&["check", "--all", "--builtin", "subspace:2:2"]);
    assert_eq!(o.code, EXIT_OK, "{}", o.stdout);
    assert!(o.stdout.contains("PASS normal "));
}

#[test]
fn repeated_runs_are_byte_identical() {
    for args in [
        &["validate", "--builtin", "N5"][..],
        &["props", "--json", "--builtin", "M3"],
        &["con", "--builtin", "N5"],
        &["dim", "--json", "--builtin", "partition:4"],
        &["eval", "--builtin", "N5", "--word", "0..a + 2*(c..1)"],
        &["compare", "--builtin", "N5", "--word", "0..a", "--word", "c..a"],
        &["geom", "--json", "--builtin", "N5"],
        &["check", "--all", "--json", "--builtin", "N5"],
        &["dot", "--labels", "--builtin", "N5"],
        &["catalog"],
    ] {
        let a = dimw(args);
        let b = dimw(args);
        assert_eq!(a.code, EXIT_OK, "{args:?}: {}", a.stderr);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn json_round_trips() {
    let props = ok_json(&["props", "--json", "--builtin", "N5"]);
    let p: PropertyReport = serde_json::from_value(props.clone()).unwrap();
    assert_eq!(serde_json::to_value(&p).unwrap(), props);
    assert_eq!(p, builtin("N5").unwrap().properties());

    let geom = ok_json(&["geom", "--json", "--builtin", "N5"]);
    let g: GeometrySummary = serde_json::from_value(geom.clone()).unwrap();
    assert_eq!(serde_json::to_value(&g).unwrap(), geom);

    let dim = ok_json(&["dim", "--json", "--builtin", "N5"]);
    let report: DimReport = serde_json::from_value(dim.clone()).unwrap();
    assert_eq!(serde_json::to_value(&report).unwrap(), dim);
    let qo = report.qosystem.build().unwrap();

    let eval = ok_json(&["eval", "--json", "--builtin", "N5", "--word", "0..1"]);
    assert_eq!(eval["word"], "0..1");
    let v: DimVectorFile = serde_json::from_value(eval["vector"].clone()).unwrap();
    v.build(&qo).unwrap();

    let cmp = ok_json(&["compare", "--json", "--builtin", "N5", "--word", "0..a", "--word", "0..b"]);
    assert!(cmp["relation"].is_string());
    for side in ["left", "right"] {
        let v: DimVectorFile = serde_json::from_value(cmp[side].clone()).unwrap();
        v.build(&qo).unwrap();
    }

    let catalog = ok_json(&["catalog", "--json"]);
    assert!(catalog.as_array().unwrap().iter().any(|e| e["headline"] == "2" && e["key"] == "partition:4"));
}

#[test]
fn files_and_sidecar_congruences() {
    let l = builtin("N5").unwrap();
    let theta = principal_congruence(&l, l.index_of("c").unwrap(), l.index_of("a").unwrap());
    let path = temp_file("n5", &lattice_to_json(&l, Some(&theta)));
    let path = path.to_str().unwrap();
    let v = ok_json(&["validate", "--json", "--file", path]);
    assert_eq!((v["elements"].as_u64(), v["congruence"].as_u64()), (Some(5), Some(theta.num_blocks() as u64)));
    let con = ok_json(&["con", "--json", "--file", path]);
    assert_eq!(con["count"], 5);
    assert_eq!(con["quotient"].as_array().unwrap().len(), theta.num_blocks());
    let builtin_dim = dimw(&["dim", "--json", "--builtin", "N5"]).stdout;
    assert_eq!(dimw(&["dim", "--json", "--file", path]).stdout, builtin_dim);
    let o = dimw(&["check", "--only", "functor-quotient", "--file", path]);
    assert_eq!(o.code, EXIT_OK);
    assert!(o.stdout.contains("1 quotients"));
}

#[test]
fn dot_and_compare_text() {
    let d = dimw(&["dot", "--builtin", "N5"]).stdout;
    assert!(d.starts_with("digraph"));
    assert_eq!(d.matches("->").count(), 5);
    assert_eq!(
        dimw(&["compare", "--builtin", "chain:3", "--word", "0..1", "--word", "1..2"]).stdout.trim(),
        "incomparable"
    );
    let less = dimw(&["compare", "--builtin", "chain:3", "--word", "0..1", "--word", "0..2"]).stdout;
    assert_ne!(less.trim(), "incomparable");
    assert_eq!(dimw(&["eval", "--builtin", "M3", "--word", "2*(0..a)"]).stdout.trim(), "{q1:2}");
}
