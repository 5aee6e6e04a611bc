use std::fs;
use std::process::{Command, Output};

use ctpotts::triangulation::text::parse_text;

fn ctpotts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctpotts"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn enumerate_count_only() {
    let o = ctpotts(&["enumerate", "--N", "2", "--K", "2", "--count-only"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).trim(), "14");
}

#[test]
fn enumerate_dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.txt");
    let o = ctpotts(&["enumerate", "--N", "1", "--K", "1", "-o", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(&path).unwrap();
    let parsed = parse_text(&text).unwrap();
    assert_eq!(parsed.len(), 1);
    let again = ctpotts::triangulation::text::to_text(parsed.iter().map(|(t, _)| t), 1);
    assert_eq!(again, text);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&ctpotts(&["enumerate", "--N", "two", "--K", "2"])), 2);
    assert_eq!(code(&ctpotts(&["enumerate", "--bogus"])), 2);
    assert_eq!(code(&ctpotts(&["enumerate", "--N", "0", "--K", "0"])), 2);
    let o = ctpotts(&["phase", "--q", "1", "--beta-grid", "1:2"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8(o.stderr).unwrap();
    // both problems reported together
    assert!(err.contains("--q") && err.contains("--beta-grid"), "{err}");
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# desk run\nN = 3\nK = 2\ncount-only = true\n").unwrap();
    let o = ctpotts(&["enumerate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let from_file = stdout(&o);
    let o = ctpotts(&["enumerate", "--config", cfg.to_str().unwrap(), "--N", "2"]);
    assert_eq!(stdout(&o).trim(), "14");
    assert_ne!(from_file.trim(), "14");
    fs::write(&cfg, "N 3\n").unwrap();
    assert_eq!(code(&ctpotts(&["enumerate", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn verify_duality_and_es_pass() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    for suite in ["duality", "es", "euler"] {
        let o = ctpotts(&["verify", "--suite", suite, "-o", path.to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{suite}: {}", String::from_utf8_lossy(&o.stderr));
        let r: serde_json::Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(r["passed"], true);
        assert!(r["num_checks"].as_u64().unwrap() > 0);
    }
}

#[test]
fn verify_default_reports_bound_failures() {
    // The high-temperature upper bound fails at beta = 2 and the circuit
    // bound fails on loop-heavy graphs; the default suite reports both.
    let o = ctpotts(&["verify"]);
    assert_eq!(code(&o), 1);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let names: Vec<&str> = r["failures"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["name"].as_str().unwrap())
        .collect();
    assert!(names.contains(&"circuit_bound"));
    assert!(names.contains(&"zp_upper.high_temperature_expansion"));
    assert!(names.iter().all(|n| *n == "circuit_bound" || *n == "zp_upper.high_temperature_expansion"));
}

#[test]
fn injected_backmap_fault_is_named() {
    let o = ctpotts(&["verify", "--suite", "euler", "--inject-fault", "backmap"]);
    assert_eq!(code(&o), 1);
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(r["failures"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f["name"] == "dual.back_map_bijection"));
}

#[test]
fn budget_skips_exit_three_unless_allowed() {
    let args = ["verify", "--suite", "euler", "--N-max", "1", "--K-max", "3", "--max-edges", "6"];
    assert_eq!(code(&ctpotts(&args)), 3);
    let mut allowed = args.to_vec();
    allowed.push("--allow-skip");
    assert_eq!(code(&ctpotts(&allowed)), 0);
}

#[test]
fn phase_outputs() {
    let o = ctpotts(&["phase", "--q", "2", "--side", "dual", "--beta-grid", "0.01:20:200"]);
    assert_eq!(code(&o), 0);
    let csv = stdout(&o);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("beta,lower,upper,asymptote,small_beta_const"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 200);
    assert!(rows.iter().all(|r| r[1] <= r[2]));

    let o = ctpotts(&["phase", "--q", "4", "--point", "0.1,1.0"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["in_no_gibbs_region"], true);

    let o = ctpotts(&["phase", "--q", "2", "--check-asymptote"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v["ok"], true);
}

#[test]
fn transfer_gap_shrinks() {
    let o = ctpotts(&["transfer", "--mu", "1.0", "--K", "200", "--N", "4,8,16,32"]);
    assert_eq!(code(&o), 0);
    let gaps: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap().abs())
        .collect();
    assert_eq!(gaps.len(), 4);
    assert!(gaps[..3].windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[3] <= gaps[2]);
}

#[test]
fn mc_trace_is_deterministic_and_resumable() {
    let dir = tempfile::tempdir().unwrap();
    let p = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let base = ["mc", "--N", "2", "--Kmax", "3", "--q", "2", "--beta", "0.5", "--mu", "1.5", "--mode", "run", "--seed", "7"];
    let run = |extra: &[&str]| {
        let mut a: Vec<&str> = base.to_vec();
        a.extend_from_slice(extra);
        ctpotts(&a)
    };
    let (t1, t2) = (p("a.csv"), p("b.csv"));
    assert_eq!(code(&run(&["--sweeps", "2000", "--trace", &t1])), 0);
    assert_eq!(code(&run(&["--sweeps", "2000", "--trace", &t2])), 0);
    let a = fs::read(&t1).unwrap();
    assert_eq!(a, fs::read(&t2).unwrap());
    assert!(String::from_utf8(a.clone()).unwrap().starts_with("step,n_t,energy,k_clusters,accept_rate\n"));

    // 1000 + 1000 steps through a checkpoint reproduce the last 1000 lines
    let (half, cp, rest) = (p("h.csv"), p("cp.json"), p("r.csv"));
    assert_eq!(code(&run(&["--sweeps", "1000", "--trace", &half, "--checkpoint", &cp])), 0);
    assert_eq!(code(&run(&["--sweeps", "1000", "--trace", &rest, "--resume", &cp])), 0);
    let full = String::from_utf8(a).unwrap();
    let tail: Vec<&str> = full.lines().skip(11).collect();
    let resumed_text = fs::read_to_string(&rest).unwrap();
    let resumed: Vec<&str> = resumed_text.lines().skip(1).collect();
    assert_eq!(tail, resumed);
}

#[test]
fn mc_histogram_check_small() {
    let o = ctpotts(&["mc", "--N", "1", "--Kmax", "2", "--q", "2", "--beta", "0.5", "--mu", "1.5", "--sweeps", "1e5", "--seed", "7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(r["report"]["ok"], true);
}

#[test]
fn thread_env_is_validated() {
    let o = Command::new(env!("CARGO_BIN_EXE_ctpotts"))
        .args(["enumerate", "--N", "1", "--K", "1", "--count-only"])
        .env("CTPOTTS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_ctpotts"))
        .args(["enumerate", "--N", "1", "--K", "1", "--count-only"])
        .env("CTPOTTS_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
}
