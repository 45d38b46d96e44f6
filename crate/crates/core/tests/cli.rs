mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::{C62, CASE_A_5_3, REPEATED_SLOTS};
use serde_json::Value;

fn wmra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wmra"))
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

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn construct_writes_printed_arrays() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let o = wmra(&["construct", "--K", "5", "--r", "3", "--out", path(&a)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&a).unwrap();
    assert!(text.starts_with("# wmra K=5 N=5 r=3 S=2\n"));
    assert!(text.ends_with(CASE_A_5_3));

    let o = wmra(&["construct", "--K", "6", "--r", "2"]);
    assert!(stdout(&o).ends_with(C62));

    let o = wmra(&["construct", "--K", "6", "--r", "3", "--method", "case-a"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("N=6"));
}

#[test]
fn construct_unsupported_points_to_conversion() {
    let o = wmra(&["construct", "--K", "5", "--r", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("convert-epda"));
    let o = wmra(&["construct", "--K", "5", "--r", "2", "--method", "case-a"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn every_emitted_array_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    for (k, r) in [(2, 1), (5, 3), (6, 2), (7, 4), (8, 2), (9, 3), (4, 4)] {
        for format in ["text", "json"] {
            let f = dir.path().join(format!("{k}-{r}.{format}"));
            let (ks, rs) = (k.to_string(), r.to_string());
            let o = wmra(&[
                "construct",
                "--K",
                &ks,
                "--r",
                &rs,
                "--format",
                format,
                "--out",
                path(&f),
            ]);
            assert_eq!(o.status.code(), Some(0));
            let v = wmra(&["verify", "--in", path(&f)]);
            assert_eq!(
                v.status.code(),
                Some(0),
                "K={k} r={r} {format}: {}",
                stdout(&v)
            );
        }
    }
}

#[test]
fn json_construct_carries_version() {
    let o = wmra(&["construct", "--K", "5", "--r", "3", "--format", "json"]);
    let v = json(&o);
    assert_eq!(v["tool_version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["S"], 2);
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("ex1.txt");
    fs::write(&good, REPEATED_SLOTS).unwrap();
    let o = wmra(&["verify", "--in", path(&good)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("passed"));

    // one extra 2 in place of a 1
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, REPEATED_SLOTS.replacen("* 1 1", "* 2 1", 1)).unwrap();
    let o = wmra(&["verify", "--in", path(&bad), "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["passed"], false);
    assert!(v["violations"]
        .as_array()
        .unwrap()
        .iter()
        .any(|x| x["condition"] == "A2"));
    assert!(v["tool_version"].is_string());

    let junk = dir.path().join("junk.txt");
    fs::write(&junk, "hello world\n").unwrap();
    assert_eq!(
        wmra(&["verify", "--in", path(&junk)]).status.code(),
        Some(2)
    );
    assert_eq!(
        wmra(&["verify", "--in", "/no/such/file"]).status.code(),
        Some(2)
    );
}

#[test]
fn simulate_reports_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    fs::write(&a, CASE_A_5_3).unwrap();
    let o = wmra(&[
        "simulate",
        "--in",
        path(&a),
        "--seed",
        "1",
        "--trials",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert!(v["max_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["ndt"]["num"], 2);
    assert_eq!(v["ndt"]["den"], 25);
    assert_eq!(v["seed"], 1);
    assert!(v["tool_version"].is_string());

    let o = wmra(&[
        "simulate",
        "--in",
        path(&a),
        "--seed",
        "1",
        "--snr-db",
        "40",
    ]);
    let v = json(&o);
    assert_eq!(v["snr_db"], 40.0);
    let res = v["max_residual"].as_f64().unwrap();
    assert!(res > 0.0 && res < 1.0, "{res}");

    let stars = dir.path().join("stars.txt");
    fs::write(&stars, "* *\n* *\n").unwrap();
    let v = json(&wmra(&["simulate", "--in", path(&stars), "--seed", "3"]));
    assert_eq!(v["ndt"]["num"], 0);
    assert_eq!(v["first_trial"]["slots"].as_array().unwrap().len(), 0);
}

#[test]
fn run_matches_centralized() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    fs::write(&a, CASE_A_5_3).unwrap();
    for job in ["keyword-count", "checksum"] {
        let o = wmra(&["run", "--in", path(&a), "--job", job, "--seed", "4"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let v = json(&o);
        assert_eq!(v["matches_centralized"], true);
        let outputs = v["outputs"].as_array().unwrap();
        assert_eq!(outputs.len(), 5);
        assert_eq!(outputs[0]["node"], 1);
        assert_eq!(outputs[0]["q"], 1);
    }

    let manifest = dir.path().join("files.json");
    let entries: Vec<_> = (1..=5)
        .map(|i| serde_json::json!({"name": format!("f{i}"), "text": "map reduce map"}))
        .collect();
    fs::write(&manifest, serde_json::to_string(&entries).unwrap()).unwrap();
    let o = wmra(&[
        "run",
        "--in",
        path(&a),
        "--job",
        "keyword-count",
        "--files",
        path(&manifest),
    ]);
    let v = json(&o);
    assert_eq!(v["matches_centralized"], true);
    assert_eq!(v["centralized"][0]["value"], 10.0);

    fs::write(&manifest, serde_json::to_string(&entries[..4]).unwrap()).unwrap();
    let o = wmra(&[
        "run",
        "--in",
        path(&a),
        "--job",
        "keyword-count",
        "--files",
        path(&manifest),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("5 rows but 4 files"));

    let o = wmra(&["run", "--in", path(&a), "--job", "grep"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("keyword-count, checksum"));
}

#[test]
fn convert_epda_emits_array() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("c.epda");
    fs::write(&e, format!("# epda K=6 r=2 N=3 Z=1 S=3 g=4\n{C62}")).unwrap();
    let out = dir.path().join("c.txt");
    let o = wmra(&["convert-epda", "--in", path(&e), "--out", path(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(fs::read_to_string(&out).unwrap().ends_with(C62));
    assert_eq!(wmra(&["verify", "--in", path(&out)]).status.code(), Some(0));

    fs::write(&e, format!("# epda K=6 r=2 N=3 Z=1 S=3 g=3\n{C62}")).unwrap();
    assert_eq!(
        wmra(&["convert-epda", "--in", path(&e)]).status.code(),
        Some(1)
    );
    fs::write(&e, C62).unwrap();
    assert_eq!(
        wmra(&["convert-epda", "--in", path(&e)]).status.code(),
        Some(2)
    );
}

#[test]
fn sweep_tables() {
    let o = wmra(&["sweep", "--K-max", "6"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("K,r,source,N,S,ndt,optimal_ndt,optimal,N_lcw")
    );
    let rows: Vec<&str> = lines.collect();
    assert!(rows.contains(&"5,3,case-a,5,2,2/25,2/25,true,10"));
    assert!(rows.contains(&"6,2,case-b,3,3,1/6,1/6,true,15"));
    assert!(rows.contains(&"4,4,case-a,4,0,0,0,true,1"));
    assert!(rows.iter().all(|r| r.contains(",true,")));
    assert!(!rows.iter().any(|r| r.starts_with("5,2,")));

    let v = json(&wmra(&[
        "sweep",
        "--K-max",
        "6",
        "--format",
        "json",
        "--include-epda",
    ]));
    assert!(v["tool_version"].is_string());
    let rows = v["rows"].as_array().unwrap();
    let epda = rows
        .iter()
        .find(|r| r["K"] == 5 && r["r"] == 2 && r["source"] == "epda")
        .unwrap();
    assert_eq!(epda["N"], 20);
}
