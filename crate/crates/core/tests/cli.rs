use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn fixlab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fixlab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn tmp() -> tempfile::TempDir {
    tempfile::tempdir().unwrap()
}

#[test]
fn certify_ex31_m2_certifies() {
    let d = tmp();
    let o = fixlab(
        &[
            "certify",
            "--map",
            "ex31",
            "--phi",
            "linear(0.25)",
            "--m",
            "2",
            "--domain",
            "0,1",
            "--metric",
            "absdiff",
            "--s",
            "1",
            "--grid",
            "2001",
            "--random-pairs",
            "100000",
            "--seed",
            "0",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("status: certified-on-samples"));
    assert!(text.contains("pairs tested: 2101000"));
    assert!(text.contains("violations found: 0"));
}

#[test]
fn certify_ex31_m1_refutes_across_the_jump() {
    let d = tmp();
    let o = fixlab(
        &[
            "certify",
            "--map",
            "ex31",
            "--phi",
            "linear(0.25)",
            "--m",
            "1",
            "--domain",
            "0,1",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 1);
    let text = stdout(&o);
    assert!(text.contains("status: refuted"));
    let first = text.lines().find(|l| l.starts_with("violation: ")).unwrap();
    assert!(
        first.starts_with("violation: x = 0.4995, y = 0.5,"),
        "{first}"
    );
    assert_eq!(
        text.lines()
            .filter(|l| l.starts_with("violation: "))
            .count(),
        32
    );
}

#[test]
fn certify_convex_refutes_ex32() {
    let d = tmp();
    let o = fixlab(
        &[
            "certify", "--convex", "--map", "ex32", "--a", "0.4", "--b", "0.5", "--domain",
            "0,0.5", "--metric", "absdiff", "--s", "1", "--grid", "2001", "--seed", "0",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("condition: convex (a = 0.4, b = 0.5)"));
}

#[test]
fn certify_usage_errors() {
    let d = tmp();
    let cases: &[&[&str]] = &[
        &["certify", "--map", "ex31"],
        &[
            "certify",
            "--map",
            "ex31",
            "--phi",
            "linear(0.25)",
            "--m",
            "0",
        ],
        &[
            "certify", "--convex", "--map", "ex32", "--a", "0.5", "--b", "0.5",
        ],
        &["certify", "--convex", "--map", "ex32", "--a", "0.5"],
        &["certify", "--map", "nope", "--phi", "linear(0.5)"],
        &["certify", "--map", "x +", "--phi", "linear(0.5)"],
        &[
            "certify",
            "--map",
            "ex31",
            "--phi",
            "linear(0.25)",
            "--grid",
            "1",
            "--random-pairs",
            "0",
        ],
        &[
            "certify",
            "--map",
            "sqrt(x - 0.5)",
            "--phi",
            "linear(0.5)",
            "--domain",
            "0,1",
        ],
        &[
            "certify",
            "--map",
            "ex31",
            "--phi",
            "linear(0.25)",
            "--domain",
            "1,0",
        ],
        &[
            "certify",
            "--map",
            "ex31",
            "--phi",
            "linear(0.25)",
            "--s",
            "0.5",
        ],
        &[
            "certify",
            "--map",
            "ex31",
            "--phi",
            "linear(0.25)",
            "--metric",
            "powdiff(0.5)",
        ],
        &[
            "certify",
            "--map",
            "ex31",
            "--phi",
            "linear(0.25)",
            "--bogus",
        ],
        &["frobnicate"],
        &[],
    ];
    for args in cases {
        let o = fixlab(args, d.path());
        assert_eq!(code(&o), 2, "{args:?}: {}", stdout(&o));
        assert!(!stderr(&o).is_empty(), "{args:?}");
    }
}

#[test]
fn runtime_errors_are_single_line() {
    let d = tmp();
    let o = fixlab(
        &[
            "certify",
            "--map",
            "sqrt(x - 0.5)",
            "--phi",
            "linear(0.5)",
            "--domain",
            "0,1",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error: "));
    let o = fixlab(
        &["certify", "--map", "nope", "--phi", "linear(0.5)"],
        d.path(),
    );
    assert!(
        stderr(&o).contains("ex31"),
        "unknown builtin lists valid names"
    );
}

#[test]
fn finite_domain_is_exhaustive() {
    let d = tmp();
    let o = fixlab(
        &[
            "certify",
            "--map",
            "if(x > 5, 1, 0)",
            "--phi",
            "linear(0.5)",
            "--points",
            "0,1,10",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(
        stdout(&o).contains("status: certified-exhaustive"),
        "{}",
        stdout(&o)
    );
    assert!(stdout(&o).contains("pairs tested: 3"));
}

#[test]
fn help_and_version_exit_zero() {
    let d = tmp();
    for args in [
        &["--help"][..],
        &["--version"],
        &["certify", "--help"],
        &["verify", "phi", "--help"],
    ] {
        let o = fixlab(args, d.path());
        assert_eq!(code(&o), 0, "{args:?}");
        assert!(!stdout(&o).is_empty());
    }
    let o = fixlab(&["certify", "--help"], d.path());
    assert!(stdout(&o).contains("2001"), "defaults are documented");
}

#[test]
fn solve_ex31_writes_trace() {
    let d = tmp();
    let o = fixlab(
        &[
            "solve",
            "--map",
            "ex31",
            "--x0",
            "1",
            "--domain",
            "0,1",
            "--metric",
            "absdiff",
            "--s",
            "1",
            "--step-tol",
            "1e-12",
            "--m",
            "2",
            "--trace",
            "t.csv",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("stop: step-converged"));
    assert!(text.contains("rate: geometric (ratio 0.25)"), "{text}");
    let est: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("estimate: "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(est < 1e-11);

    let csv = fs::read_to_string(d.path().join("t.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,x,step,residual,window_max");
    assert_eq!(lines[1], "0,1,0.8,0.8,0.8");
    assert_eq!(
        lines[2],
        "1,0.2,0.15000000000000002,0.15000000000000002,0.15000000000000002"
    );
    assert!(csv.ends_with('\n') && !csv.contains('\r'));
    let last: Vec<&str> = lines.last().unwrap().split(',').collect();
    assert_eq!(last[2], "");
    assert_eq!(last[4], "");
}

#[test]
fn solve_exact_fixed_point_trace() {
    let d = tmp();
    let o = fixlab(
        &[
            "solve", "--map", "0.3", "--x0", "0.3", "--domain", "0,1", "--trace", "e.csv",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("stop: exact-fixed-point"));
    let csv = fs::read_to_string(d.path().join("e.csv")).unwrap();
    assert_eq!(csv, "n,x,step,residual,window_max\n0,0.3,,0,\n");
}

#[test]
fn solve_ex32_is_sublinear() {
    let d = tmp();
    let o = fixlab(
        &[
            "solve",
            "--map",
            "ex32",
            "--x0",
            "0.5",
            "--domain",
            "0,0.5",
            "--metric",
            "absdiff",
            "--s",
            "1",
            "--step-tol",
            "0",
            "--max-iters",
            "10000",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("rate: sublinear"), "{text}");
    assert!(text.contains("stop: max-iters after 10000 iterations"));
}

#[test]
fn solve_domain_escape() {
    let d = tmp();
    let o = fixlab(
        &["solve", "--map", "x+1", "--x0", "0", "--domain", "0,1"],
        d.path(),
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("at step 1"), "{}", stderr(&o));
}

#[test]
fn solve_escape_bound_exits_one() {
    let d = tmp();
    let o = fixlab(
        &[
            "solve",
            "--map",
            "2 * x",
            "--x0",
            "1",
            "--domain",
            "0,1e300",
            "--escape-bound",
            "100",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 1, "{}", stderr(&o));
    assert!(stdout(&o).contains("stop: escaped"));
}

#[test]
fn solve_unwritable_trace_is_an_error() {
    let d = tmp();
    let o = fixlab(
        &[
            "solve",
            "--map",
            "ex31",
            "--x0",
            "1",
            "--trace",
            "missing/dir/t.csv",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("missing/dir/t.csv"));
}

#[test]
fn verify_metric_examples() {
    let d = tmp();
    let o = fixlab(
        &[
            "verify",
            "metric",
            "--metric",
            "powdiff(2)",
            "--s",
            "1",
            "--domain",
            "0,1",
            "--grid",
            "101",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 1);
    let first = stdout(&o)
        .lines()
        .find(|l| l.starts_with("witness: "))
        .unwrap()
        .to_string();
    assert_eq!(
        first,
        "witness: relaxed-triangle at (0, 0.5, 1), lhs = 1, rhs = 0.5"
    );

    let o = fixlab(
        &[
            "verify",
            "metric",
            "--metric",
            "powdiff(2)",
            "--s",
            "2",
            "--domain",
            "0,1",
            "--random-triples",
            "100000",
            "--seed",
            "0",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("sampled evidence, not proof"));

    let o = fixlab(
        &["verify", "metric", "--metric", "x - y", "--domain", "0,1"],
        d.path(),
    );
    assert_eq!(code(&o), 2, "negative distance is an evaluation error");
}

#[test]
fn verify_phi_examples() {
    let d = tmp();
    let o = fixlab(&["verify", "phi", "--phi", "linear(1.0)"], d.path());
    assert_eq!(code(&o), 2);
    let o = fixlab(&["verify", "phi", "--phi", "linear(0.5)"], d.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = fixlab(
        &[
            "verify",
            "phi",
            "--phi",
            "ex32phi",
            "--iters",
            "10000",
            "--decay-tol",
            "1e-3",
        ],
        d.path(),
    );
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let o = fixlab(&["verify", "phi", "--phi", "x"], d.path());
    assert_eq!(code(&o), 1);
    assert!(
        stdout(&o)
            .lines()
            .filter(|l| l.starts_with("witness: "))
            .count()
            <= 32
    );
    let o = fixlab(
        &["verify", "phi", "--phi", "x / 2", "--radii", "0,1,2"],
        d.path(),
    );
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("radii: 3"));
}

#[test]
fn reproduce_outcomes() {
    let d = tmp();
    let o = fixlab(&["reproduce", "ex99"], d.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("ex99"));

    let o = fixlab(&["reproduce", "ex31", "--out", "r31"], d.path());
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let dir = d.path().join("r31");
    for name in [
        "summary.txt",
        "certify_m1.txt",
        "certify_m2.txt",
        "solve_x0_1.csv",
        "solve_x0_0.7.csv",
        "solve_x0_0.3.csv",
    ] {
        assert!(dir.join(name).is_file(), "{name}");
    }
    assert_eq!(
        fs::read_to_string(dir.join("summary.txt")).unwrap(),
        stdout(&o)
    );
}

#[test]
fn identical_flags_identical_output() {
    let d = tmp();
    let args = [
        "certify",
        "--map",
        "ex31",
        "--phi",
        "linear(0.25)",
        "--m",
        "1",
        "--grid",
        "501",
        "--random-pairs",
        "20000",
        "--seed",
        "42",
    ];
    let a = fixlab(&args, d.path());
    let b = fixlab(&args, d.path());
    assert_eq!(a.stdout, b.stdout);

    let args = [
        "solve",
        "--map",
        "ex32",
        "--x0",
        "0.4",
        "--max-iters",
        "500",
        "--step-tol",
        "0",
        "--trace",
        "t.csv",
    ];
    let a = fixlab(&args, d.path());
    let ta = fs::read(d.path().join("t.csv")).unwrap();
    let b = fixlab(&args, d.path());
    let tb = fs::read(d.path().join("t.csv")).unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(ta, tb);
}

#[test]
fn printed_numbers_round_trip() {
    let d = tmp();
    let o = fixlab(
        &["solve", "--map", "ex31", "--x0", "0.7", "--trace", "t.csv"],
        d.path(),
    );
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(d.path().join("t.csv")).unwrap();
    let mut x_prev: Option<f64> = None;
    for line in csv.lines().skip(1) {
        let x: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        if let Some(p) = x_prev {
            let want = if p < 0.5 { p / 4.0 } else { p / 5.0 };
            assert_eq!(x.to_bits(), want.to_bits());
        }
        x_prev = Some(x);
    }
}
