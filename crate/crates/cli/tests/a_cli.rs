use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_residue-lab"));
    c.env_remove("RESIDUE_LAB_JOBS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn residue-lab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json_lines(o: &Output) -> Vec<serde_json::Value> {
    stdout(o).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn word_command() {
    let o = run(&["word", "-p", "17"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "XXYXYYYXXYYYXYXX");
    assert_eq!(stdout(&run(&["word", "-p", "5"])).trim(), "XYYX");
    let bad = run(&["word", "-p", "4"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("NotOddPrime"));
}

#[test]
fn count_command() {
    assert_eq!(
        stdout(&run(&["count", "k3-M", "-p", "5"])).trim(),
        r#"{"p":5,"object":"k3-M","count":41}"#
    );
    assert_eq!(
        stdout(&run(&["count", "k3-M", "-p", "5", "--oracle"])).trim(),
        r#"{"p":5,"object":"k3-M","count":41}"#
    );
    let o = json_lines(&run(&["count", "pattern", "-p", "17", "-S", "XXX"]));
    assert_eq!(o[0]["count"], 0);
    let o = json_lines(&run(&["count", "graph", "-p", "29", "--class", "K4"]));
    assert_eq!(o[0]["count"], 7);
    let o = json_lines(&run(&["count", "k3-S", "-p", "13"]));
    assert_eq!(o[0]["count"], 184);
    let o = json_lines(&run(&["count", "pattern-charsum", "-p", "17", "-S", "xyx"]));
    assert_eq!(o[0]["count"], 2);
    assert_eq!(run(&["count", "nothing", "-p", "5"]).status.code(), Some(2));
    assert_eq!(run(&["count", "graph", "-p", "29"]).status.code(), Some(2));
    assert_eq!(run(&["count", "jacobsthal", "-p", "7"]).status.code(), Some(2));
}

#[test]
fn cm_command() {
    let o = json_lines(&run(&["cm", "-p", "13"]));
    assert_eq!(o[0]["gauss"]["a"], 3);
    assert_eq!(o[0]["jacobsthal"]["a"], -3);
    let o = json_lines(&run(&["cm", "-p", "5"]));
    assert_eq!(o[0]["gauss"]["a"], -1);
    let bad = run(&["cm", "-p", "7"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("WrongResidueClass"));
}

#[test]
fn verify_passes_and_orders_records() {
    let o = run(&["verify", "identity5", "--max-p", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = json_lines(&o);
    let ps: Vec<u64> = recs.iter().map(|r| r["p"].as_u64().unwrap()).collect();
    assert_eq!(ps, vec![3, 5, 7]);
    assert!(recs.iter().all(|r| r["pass"] == true));
    let first = stdout(&o).lines().next().unwrap().to_string();
    assert!(first.starts_with(r#"{"p":3,"claim":"identity5","expected":17,"actual":17,"pass":true"#));

    let manifest: serde_json::Value = serde_json::from_str(stderr(&o).lines().last().unwrap()).unwrap();
    assert_eq!(manifest["tally"]["records"], 3);
    assert_eq!(manifest["tally"]["passed"], 3);
}

#[test]
fn verify_respects_claim_residue_class() {
    let o = run(&["verify", "goncharova1", "--max-p", "613"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = json_lines(&o);
    assert!(recs.iter().all(|r| r["p"].as_u64().unwrap() % 4 == 1));
    assert_eq!(recs.len(), 53);
    // user filter can only narrow
    assert_eq!(
        run(&["verify", "goncharova1", "--max-p", "613", "--filter", "3mod4"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_failure_exits_one() {
    let o = run(&["verify", "tables", "--max-p", "20"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("FAIL tables p=7"));
    let o = run(&["verify", "tables", "--max-p", "200", "--filter", "1mod4"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn verify_usage_errors_exit_two() {
    assert_eq!(
        run(&["verify", "no_such_claim", "--max-p", "10"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["verify", "formula2"]).status.code(), Some(2));
    assert_eq!(
        run(&["verify", "formula2", "--min-p", "100", "--max-p", "10"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify", "formula2", "--max-p", "12", "--format", "xml"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_is_deterministic_and_jobs_env_works() {
    let a = run(&["verify", "xprime", "--max-p", "300", "--jobs", "1"]);
    let b = bin()
        .args(["verify", "xprime", "--max-p", "300"])
        .env("RESIDUE_LAB_JOBS", "3")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    let m: serde_json::Value = serde_json::from_str(stderr(&b).lines().last().unwrap()).unwrap();
    assert_eq!(m["workers"], 3);
}

#[test]
fn verify_oracle_and_csv_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("f2.csv");
    let o = run(&[
        "verify",
        "formula2",
        "--max-p",
        "100",
        "--oracle",
        "--format",
        "csv",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "p,claim,expected,actual,pass,detail");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 11);
    assert!(rows[0].starts_with("5,formula2,"));
    assert!(rows.iter().all(|r| r.contains(",true,") && r.contains("oracle=true")));
    let manifest = std::fs::read_to_string(dir.path().join("f2.csv.manifest.json")).unwrap();
    let m: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(m["tally"]["passed"], 11);
    assert_eq!(m["oracle"], true);
}

#[test]
fn timings_are_opt_in() {
    let o = run(&["verify", "identity5", "--max-p", "5"]);
    assert!(!stdout(&o).contains("elapsed_ms"));
    let o = run(&["verify", "identity5", "--max-p", "5", "--timings"]);
    assert!(stdout(&o).lines().all(|l| l.contains("\"elapsed_ms\":")));
}

#[test]
fn satotate_report_and_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("e.json");
    let o = run(&[
        "satotate",
        "e",
        "--max-p",
        "5000",
        "--out",
        out.to_str().unwrap(),
        "--jobs",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert!(report["ks_semicircle"].as_f64().unwrap() < report["ks_uniform"].as_f64().unwrap());
    let csv = std::fs::read_to_string(dir.path().join("e.json.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "bin_lo,bin_hi,count,density");
    assert_eq!(lines.count(), 40);

    let o = run(&["satotate", "weierstrass", "--filter", "1mod4", "--max-p", "2000"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(json_lines(&o)[0]["ks_uniform"].is_number());
    assert_eq!(run(&["satotate", "zzz", "--max-p", "2000"]).status.code(), Some(2));
    assert_eq!(run(&["satotate", "e", "--max-p", "50"]).status.code(), Some(2));
}

#[test]
fn quartic_tables_command() {
    let o = run(&["quartic-tables", "-p", "13"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json_lines(&o)[0];
    assert_eq!(r["p_mod_8"], 5);
    assert_eq!(r["rows"].as_array().unwrap().len(), 4);
    assert_eq!(r["pass"], true);
    assert_eq!(run(&["quartic-tables", "-p", "7"]).status.code(), Some(1));
    assert_eq!(run(&["quartic-tables", "-p", "3"]).status.code(), Some(2));
}
