//! End-to-end runs of the `hbundle` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use hirsch_bundles::cli::{fmt_num, RunConfig, BUNDLE_HEADER};
use hirsch_bundles::solver::solve_bundle_point;
use hirsch_bundles::verify::SuiteReport;
use hirsch_bundles::{OperatorKind, OperatorSpec, RankFrequency, SolveConfig};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    p.to_string_lossy().into_owned()
}

fn hbundle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hbundle"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv_text: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_reader(csv_text.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

#[test]
fn bundle_round_trips_against_the_solver() {
    let cfg_path = fixture("stock.toml");
    let out = hbundle(&["bundle", &fixture("counts.csv"), "--config", &cfg_path]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().next().unwrap(), BUNDLE_HEADER.join(","));

    let cfg = RunConfig::from_toml(&std::fs::read_to_string(&cfg_path).unwrap()).unwrap();
    let solve_cfg = SolveConfig {
        abs_tol_x: cfg.tol,
        scan_points: cfg.scan_points,
        exact_when_possible: true,
    };
    let counts: Vec<(&str, Vec<f64>)> = vec![
        ("author_a", vec![10.0, 8.0, 5.0, 4.0, 3.0, 2.0, 1.0]),
        (
            "author_b",
            vec![25.0, 17.0, 12.0, 9.0, 9.0, 6.0, 3.0, 2.0, 1.0, 1.0, 0.0],
        ),
        ("author_c", vec![3.0, 7.0, 1.0, 4.0]),
    ];
    let table = rows(&text);
    assert_eq!(table.len(), 3 * cfg.index.len() * cfg.theta_grid.count);
    for row in table {
        let counts = &counts.iter().find(|(id, _)| *id == row[0]).unwrap().1;
        let f = RankFrequency::from_citation_counts(counts)
            .unwrap()
            .function;
        let def = cfg.index.iter().find(|d| d.name == row[1]).unwrap();
        let theta: f64 = row[5].parse().unwrap();
        let got = solve_bundle_point(
            &f,
            &OperatorSpec::for_function(def.operator, &f),
            &def.threshold().unwrap(),
            theta,
            &solve_cfg,
        );
        match got {
            Ok(p) => {
                assert_eq!(row[6], fmt_num(p.m), "{row:?}");
                assert_eq!(row[7], p.status.name());
            }
            Err(_) => assert!(row[6].is_empty() && row[7] == "no_root", "{row:?}"),
        }
    }
}

#[test]
fn csv_and_json_inputs_agree() {
    let cfg = fixture("stock.toml");
    let a = hbundle(&["bundle", &fixture("counts.csv"), "--config", &cfg]);
    let b = hbundle(&["bundle", &fixture("counts.json"), "--config", &cfg]);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8_lossy(&a.stderr).contains("author_c"));
}

#[test]
fn line_bundle_and_index_agree() {
    let out = stdout(&hbundle(&[
        "bundle",
        &fixture("shapes.json"),
        "--theta-grid",
        "0.5:2:3:log",
    ]));
    let line: Vec<Vec<String>> = rows(&out)
        .into_iter()
        .filter(|r| r[0] == "line" && r[1] == "h")
        .collect();
    let ms: Vec<&str> = line.iter().map(|r| r[6].as_str()).collect();
    assert_eq!(ms, ["6.66666666667", "5", "3.33333333333"]);

    let single = stdout(&hbundle(&[
        "index",
        &fixture("shapes.json"),
        "--theta-grid",
        "1:1:1",
    ]));
    let h = rows(&single)
        .into_iter()
        .find(|r| r[0] == "line" && r[1] == "h")
        .unwrap();
    assert_eq!(h[3], "5");
}

#[test]
fn h_values_decrease_along_theta() {
    let out = stdout(&hbundle(&[
        "bundle",
        &fixture("counts.csv"),
        "--theta-grid",
        "0.2:5:25",
    ]));
    let table = rows(&out);
    for id in ["author_a", "author_b", "author_c"] {
        let ms: Vec<f64> = table
            .iter()
            .filter(|r| r[0] == id && r[1] == "h")
            .map(|r| r[6].parse().unwrap())
            .collect();
        assert_eq!(ms.len(), 25);
        assert!(ms.windows(2).all(|w| w[1] < w[0]), "{id}: {ms:?}");
    }
}

#[test]
fn admissible_examples() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("avg.toml");
    std::fs::write(
        &cfg,
        "[[index]]\nname = \"h\"\noperator = \"identity\"\n\n[[index]]\nname = \"g\"\noperator = \"averaging\"\n",
    )
    .unwrap();
    let out = hbundle(&[
        "admissible",
        &fixture("shapes.json"),
        "--config",
        cfg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let table = rows(&stdout(&out));
    let find = |id: &str, idx: &str| {
        table
            .iter()
            .find(|r| r[0] == id && r[1] == idx)
            .unwrap()
            .clone()
    };
    assert_eq!(find("constant", "h")[2..6], ["0.5", "inf", "true", "true"]);
    assert_eq!(find("constant", "g")[2..6], ["0.5", "inf", "true", "true"]);
    assert_eq!(find("triangle", "h")[2..6], ["0", "inf", "false", "true"]);
}

#[test]
fn verify_json_report_parses() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = hbundle(&[
        "verify",
        "--trials",
        "4",
        "--format",
        "json",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let printed: SuiteReport = serde_json::from_slice(&out.stdout).unwrap();
    let written: SuiteReport =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(printed, written);
    assert!(!printed.any_fail());
}

#[test]
fn exit_code_contract() {
    assert_eq!(hbundle(&["verify", "--trials", "3"]).status.code(), Some(0));
    let fail = hbundle(&["verify", "--config", &fixture("reversal.toml")]);
    assert_eq!(fail.status.code(), Some(1));
    assert!(stdout(&fail).contains("FAIL     ax"));
    let bad = hbundle(&["bundle", &fixture("malformed.csv")]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("line 3"));
    assert_eq!(
        hbundle(&["index", &fixture("empty_counts.csv")])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hbundle(&["verify", "--config", &fixture("bad.toml")])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        hbundle(&["bundle", &fixture("counts.csv"), "--tol", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(hbundle(&["frobnicate"]).status.code(), Some(2));
    let vacuous = hbundle(&["verify", "--trials", "0"]);
    assert_eq!(vacuous.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&vacuous.stderr).contains("warning"));
}

#[test]
fn operator_names_parse() {
    for k in [
        OperatorKind::Identity,
        OperatorKind::Averaging,
        OperatorKind::Integral,
    ] {
        assert_eq!(OperatorKind::parse(k.name()), Some(k));
    }
}
