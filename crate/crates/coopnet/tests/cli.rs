use std::process::{Command, Output};

fn coopnet(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_coopnet"));
    cmd.args(args).env_remove("COOPNET_THREADS");
    if let Some(t) = threads {
        cmd.env("COOPNET_THREADS", t);
    }
    cmd.output().expect("binary runs")
}

struct Parsed {
    t: f64,
    rho: f64,
    method: String,
    coverage: f64,
    error: f64,
}

fn parse(out: &Output) -> Vec<Parsed> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("T,rho,method,dpc,coverage,stderr_or_errbound,runtime_ms"));
    lines
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            assert_eq!(f.len(), 7, "{l}");
            Parsed {
                t: f[0].parse().unwrap(),
                rho: f[1].parse().unwrap(),
                method: f[2].to_string(),
                coverage: f[4].parse().unwrap(),
                error: f[5].parse().unwrap(),
            }
        })
        .collect()
}

#[test]
fn figure_sweep_has_one_row_per_point_and_is_reproducible() {
    let args = [
        "sweep", "--lambda", "1", "--beta", "4", "--power", "1", "--noise", "1", "--dpc", "false",
        "--thresholds", "0.1:10:log21", "--rho", "0,1,optimal", "--no-timing",
    ];
    let a = coopnet(&args, Some("1"));
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = coopnet(&args, None);
    assert_eq!(a.stdout, b.stdout);
    let rows = parse(&a);
    assert_eq!(rows.len(), 63);
    for r in &rows {
        assert!((0.0..=1.0).contains(&r.coverage) && r.error.is_finite() && r.error >= 0.0);
    }
    let methods: Vec<&str> = rows.iter().map(|r| r.method.as_str()).collect();
    assert!(methods[..42].iter().all(|&m| m == "analytic"));
    assert!(methods[42..].iter().all(|&m| m == "analytic-optimal"));
    // The optimum never loses to either fixed policy at the same threshold.
    for k in 0..21 {
        let best = rows[k].coverage.max(rows[21 + k].coverage);
        assert!(rows[42 + k].coverage >= best - 1e-6, "T={}", rows[k].t);
    }
}

#[test]
fn analytic_and_simulated_coverage_agree() {
    let a = parse(&coopnet(&["analytic", "--rho", "1", "--threshold", "1"], None));
    let s = parse(&coopnet(
        &["simulate", "--rho", "1", "--threshold", "1", "--realizations", "1000000"],
        None,
    ));
    assert_eq!(s[0].method, "montecarlo-shotnoise");
    assert!((a[0].coverage - s[0].coverage).abs() < 3.0 * s[0].error, "{} vs {} ± {}", a[0].coverage, s[0].coverage, s[0].error);
}

#[test]
fn simulation_is_independent_of_thread_count() {
    let args = [
        "simulate", "--rho", "0,0.5", "--threshold", "0.2,1,3", "--realizations", "40000", "--seed", "9",
        "--mode", "fullvoronoi", "--no-timing",
    ];
    let one = coopnet(&args[..], Some("1"));
    let many = coopnet(&args[..], Some("4"));
    assert!(one.status.success());
    assert_eq!(one.stdout, many.stdout);
    let rows = parse(&one);
    assert_eq!(rows.len(), 6);
    assert!(rows.iter().all(|r| r.method == "montecarlo-fullvoronoi"));
}

#[test]
fn optimize_pairs_the_baseline_with_the_optimum() {
    let rows = parse(&coopnet(&["optimize", "--threshold", "0.3,3", "--no-timing"], None));
    assert_eq!(rows.len(), 4);
    for pair in rows.chunks(2) {
        assert_eq!((pair[0].method.as_str(), pair[0].rho), ("analytic", 1.0));
        assert_eq!(pair[1].method, "analytic-optimal");
        assert!(pair[1].coverage >= pair[0].coverage - 1e-6);
    }
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("preset.conf");
    std::fs::write(&path, "# noiseless\nnoise = 0\nthreshold = 0.5\nrho = 0.5\n").unwrap();
    let p = path.to_str().unwrap();
    let from_file = parse(&coopnet(&["analytic", "--config", p, "--no-timing"], None));
    let explicit = parse(&coopnet(&["analytic", "--noise", "0", "--threshold", "0.5", "--rho", "0.5", "--no-timing"], None));
    assert_eq!(from_file[0].coverage, explicit[0].coverage);
    let overridden = parse(&coopnet(&["analytic", "--config", p, "--threshold", "2", "--no-timing"], None));
    assert_eq!(overridden[0].t, 2.0);
}

#[test]
fn decibel_thresholds_and_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = coopnet(&["analytic", "--threshold", "0", "--db", "--no-timing", "-o", path.to_str().unwrap()], None);
    assert!(out.status.success() && out.stdout.is_empty());
    let file = std::fs::read(&path).unwrap();
    let linear = coopnet(&["analytic", "--threshold", "1", "--no-timing"], None);
    assert_eq!(file, linear.stdout);
}

#[test]
fn reference_rows_match_rho_one() {
    let rows = parse(&coopnet(&["sweep", "--threshold", "0.5,2", "--rho", "1", "--with-reference", "--no-timing"], None));
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[2].method, "reference");
    for k in 0..2 {
        assert!((rows[k].coverage - rows[2 + k].coverage).abs() < 1e-3);
    }
}

#[test]
fn validate_passes_on_the_default_preset() {
    let out = coopnet(&["validate"], None);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert!(text.lines().count() >= 10);
    assert!(text.lines().all(|l| l.starts_with("PASS ")), "{text}");
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["bogus"][..],
        &["analytic", "--threshold", "2,1"],
        &["analytic", "--threshold", "0:1:log3"],
        &["analytic", "--rho", "1.5"],
        &["analytic", "--beta", "1.5"],
        &["analytic", "--dpc", "maybe"],
        &["analytic", "--config", "/nonexistent/preset.conf"],
        &["simulate", "--rho", "optimal"],
        &["simulate", "--realizations", "0"],
        &["analytic", "--frobnicate"],
    ] {
        let out = coopnet(args, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
    }
    let out = coopnet(&["analytic"], Some("zero"));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_one() {
    let out = coopnet(&["analytic", "--beta", "2.0001", "--rho", "0"], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("did not converge"));
}

#[test]
fn help_exits_with_zero() {
    let out = coopnet(&["--help"], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("sweep"));
}
