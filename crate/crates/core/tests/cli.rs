use std::path::PathBuf;
use std::process::{Command, Output};

fn mollify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mollify")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mollify-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn optimize_reports_seven_sixteenths() {
    let o = mollify(&["optimize", "--kind", "derivative", "--degree", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().next().unwrap().starts_with("suite,case,quantity,value,exact"));
    assert!(out.lines().any(|l| l.contains(",7/16,") && l.ends_with(",PASS,")), "{out}");
}

#[test]
fn poly_flag_accepts_negative_coefficients() {
    let o = mollify(&["optimize", "--kind", "derivative", "--poly", "0,0,1,-1/6"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l.contains("functional_value") && l.contains(",7/16,")));
}

#[test]
fn list_names_every_suite() {
    let out = stdout(&mollify(&["list"]));
    for name in [
        "kloosterman",
        "petersson-check",
        "moment1",
        "moment2",
        "moment1-deriv",
        "moment2-deriv",
        "euler-identities",
        "optimize",
        "sieve-check",
        "count-forms",
        "central-values",
    ] {
        assert!(out.lines().any(|l| l.split_whitespace().next() == Some(name)), "{name}");
    }
}

#[test]
fn seeded_runs_are_byte_identical() {
    let args = ["kloosterman", "--field", "Q(sqrt5)", "--seed", "3", "--budget", "instances=20,modulus_norm=300"];
    let a = mollify(&args);
    let b = mollify(&[&args[..], &["--workers", "3"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_and_out_path() {
    let cfg = scratch("run.toml");
    let out = scratch("euler.csv");
    std::fs::write(&cfg, "field = \"Q(sqrt5)\"\ntol = 1e-3\n[budget]\nprime_norm = 2000\n").unwrap();
    let o = mollify(&["euler-identities", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.contains("primes<=2000"));
}

#[test]
fn malformed_fixture_is_located() {
    let bad = scratch("bad.jsonl");
    std::fs::write(&bad, "# header\n{\"field\":\"Q\",\"level\":11,\"weight\":[2],\"lable\":\"x\",\"ap\":{},\"sign\":1}\n").unwrap();
    let o = mollify(&["ingest", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains(":2:") && err.contains("lable"), "{err}");
}

#[test]
fn import_then_ingest() {
    let table = scratch("table.txt");
    let json = scratch("imported.jsonl");
    std::fs::write(&table, "11a 11 2 1 -2 -1 1 -2 1 4 -2 0 -1\n").unwrap();
    let o = mollify(&["import", table.to_str().unwrap(), "--out", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = mollify(&["ingest", json.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("11a level 11 weight [2] sign 1 (computed 1)"));
}

#[test]
fn errors_and_failures_use_distinct_codes() {
    assert_eq!(mollify(&["run", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(mollify(&["optimize", "--budget", "speed=3"]).status.code(), Some(2));
    // a tolerance far below the attainable accuracy makes rows fail
    let o = mollify(&["euler-identities", "--tol", "1e-14", "--budget", "prime_norm=200"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains(",FAIL,"));
}
