use std::io::Write;
use std::process::{Command, Output};

fn capsmooth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_capsmooth"))
        .args(args)
        .env_remove("CAPSMOOTH_SEED")
        .output()
        .expect("run capsmooth")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|c| c == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().to_owned()).collect()
}

#[test]
fn out_of_range_sigma_is_rejected() {
    let o = capsmooth(&["tail", "--sigma", "1.5", "--samples", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("sigma"));
}

#[test]
fn bad_flags_exit_2() {
    for args in [
        &["tail", "--beta", "3", "--n", "3"][..],
        &["tail", "--problem", "union:0"],
        &["tail", "--center", "coords:1,2"],
        &["tail", "--format", "xml"],
        &["expect", "--samples", "0"],
        &["tail", "--no-such-flag"],
    ] {
        assert_eq!(capsmooth(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(capsmooth(&["--help"]).status.code(), Some(0));
}

#[test]
fn tail_csv_layout() {
    let o = capsmooth(&["tail", "--samples", "4000", "--t-steps", "5", "--seed", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert_eq!(
        s.lines().next().unwrap(),
        "t,count,survival,wilson_lo,wilson_hi,bound,applicable,violation"
    );
    assert_eq!(s.lines().count(), 6);
    let surv: Vec<f64> = column(&s, "survival").iter().map(|x| x.parse().unwrap()).collect();
    assert!(surv.windows(2).all(|w| w[1] <= w[0]));
    // default grid starts at t0 = (2d+1)n/sigma = 18
    assert_eq!(column(&s, "t")[0].parse::<f64>().unwrap(), 18.0);
    assert!(String::from_utf8_lossy(&o.stderr).contains("elapsed"));
}

#[test]
fn runs_are_byte_identical_across_workers() {
    let base = ["tail", "--samples", "20000", "--beta", "1.5", "--seed", "11"];
    let a = capsmooth(&[&base[..], &["--workers", "1"]].concat());
    let b = capsmooth(&[&base[..], &["--workers", "3"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = capsmooth(&[&base[..3], &["--seed", "12"]].concat());
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn json_report() {
    let o = capsmooth(&["expect", "--samples", "2000", "--format", "json", "--n", "4", "--d", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema"], "capsmooth-report-v1");
    assert_eq!(v["kind"], "expect");
    assert_eq!(v["config"]["n"], 4);
    assert_eq!(v["config"]["d"], 2);
    let row = &v["rows"][0];
    assert!(row["mean"].as_f64().unwrap() < row["bound"].as_f64().unwrap());
}

#[test]
fn config_file_fills_unset_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, r#"{"n": 5, "sigma": 0.25, "seed": 9, "samples": 1000, "format": "json"}"#).unwrap();
    let p = path.to_str().unwrap();
    let o = capsmooth(&["expect", "--config", p, "--sigma", "0.75"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["n"], 5);
    assert_eq!(v["config"]["seed"], 9);
    // command line wins
    assert_eq!(v["config"]["sigma"], 0.75);

    std::fs::write(&path, r#"{"sigmaa": 0.2}"#).unwrap();
    assert_eq!(capsmooth(&["expect", "--config", p]).status.code(), Some(2));
}

#[test]
fn seed_from_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_capsmooth"));
        c.args(["sample", "--samples", "5"]).args(extra).env_remove("CAPSMOOTH_SEED");
        if let Some(s) = env {
            c.env("CAPSMOOTH_SEED", s);
        }
        c.output().unwrap()
    };
    let by_env = run(Some("42"), &[]);
    let by_flag = run(None, &["--seed", "42"]);
    assert_eq!(by_env.status.code(), Some(0));
    assert_eq!(by_env.stdout, by_flag.stdout);
    assert_ne!(by_env.stdout, run(None, &[]).stdout);
    // the flag overrides the variable
    assert_eq!(run(Some("1"), &["--seed", "42"]).stdout, by_flag.stdout);
    assert_eq!(run(Some("abc"), &[]).status.code(), Some(2));
}

#[test]
fn sample_rows_lie_on_the_cap() {
    let o = capsmooth(&["sample", "--samples", "50", "--n", "3", "--sigma", "0.3", "--beta", "1"]);
    let s = stdout(&o);
    assert_eq!(s.lines().next().unwrap(), "index,r,condition,x0,x1,x2,x3");
    for line in s.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        let norm: f64 = f[3..].iter().map(|x| x * x).sum();
        assert!((norm - 1.0).abs() < 1e-12);
        // pole center e_1: sin of the angle is sqrt(1 - x1^2)
        assert!((f[1] - (1.0 - f[4] * f[4]).max(0.0).sqrt()).abs() < 1e-9);
        assert!(f[1] <= 0.3 + 1e-12);
    }
}

#[test]
fn profile_file() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# r,h\nr,h\n0,2\n0.5,1\n1,0.5").unwrap();
    let p = f.path().to_str().unwrap();
    let o = capsmooth(&["expect", "--profile", p, "--samples", "2000", "--beta", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    // sup of the normalized profile
    let h = v["config"]["H"].as_f64().unwrap();
    assert!(h > 1.0 && h < 2.0, "{h}");
    assert_eq!(capsmooth(&["expect", "--profile", p, "--H", "1.2"]).status.code(), Some(2));
    let o = capsmooth(&["expect", "--profile", p, "--H", "5", "--samples", "500", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["H"], 5.0);

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "0,1\n0.5,-1").unwrap();
    let q = bad.path().to_str().unwrap();
    assert_eq!(capsmooth(&["expect", "--profile", q]).status.code(), Some(2));
}

#[test]
fn other_problems() {
    let o = capsmooth(&["expect", "--problem", "union:3", "--n", "4", "--samples", "2000", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["d"], 3);

    let o = capsmooth(&["tail", "--problem", "matrix:3", "--samples", "2000", "--center", "random", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["n"], 8);
    assert_eq!(v["config"]["d"], 3);
}

#[test]
fn analytic_subcommands() {
    let o = capsmooth(&["volumes", "--n", "6", "--sigma", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 7);

    let o = capsmooth(&["small-calc"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(column(&stdout(&o), "holds").iter().all(|h| h == "true"));

    let o = capsmooth(&["boost-check", "--n", "8", "--beta", "4", "--sigma", "0.5", "--H", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);

    let o = capsmooth(&["smoothness", "--n", "5", "--beta", "2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn out_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("v.csv");
    let o = capsmooth(&["volumes", "--n", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert!(std::fs::read_to_string(&path).unwrap().starts_with("m,sigma,"));
}

#[test]
fn quick_verify_reports_every_criterion() {
    let o = capsmooth(&["verify", "--quick", "--seed", "1"]);
    let s = stdout(&o);
    assert_eq!(s.lines().count(), 15);
    let failing: Vec<String> = s
        .lines()
        .skip(1)
        .filter(|l| l.contains(",false,"))
        .map(|l| l.split(',').next().unwrap().to_owned())
        .collect();
    // the delta lower bound does not hold at sigma = 1
    assert_eq!(failing, ["9"]);
    assert_eq!(o.status.code(), Some(1));
}
