//! Command-line front end.
//!
//! Exit codes: 0 success or certified, 1 refuted or a failed expectation,
//! 2 usage or evaluation error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::builtin::{resolve_map, resolve_metric, resolve_phi};
use crate::certify::{certify_convex_contraction, certify_m_step, Certificate, Condition, SelfMap};
use crate::comparison::{verify_comparison, ComparisonFunction, PhiCheck, PhiReport};
use crate::error::{Error, Result};
use crate::format::fmt_real;
use crate::sampling::PairSampler;
use crate::solve::{estimate_rate, picard_iterate, PicardTrace, RateReport, StopCriteria};
use crate::space::{min_b_constant, verify_axioms, AxiomReport, BMetricSpace, Domain, Evidence};
use crate::tol::Tolerance;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "fixlab",
    version,
    about = "Certify generalized contraction conditions on b-metric spaces and run Picard iteration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the m-step window condition (or the convex contraction inequality) on sampled pairs
    Certify(CertifyArgs),
    /// Run Picard iteration and classify the convergence rate
    Solve(SolveArgs),
    /// Check b-metric axioms or comparison-function laws
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Re-run a built-in experiment (ex31 or ex32) and check every expected outcome
    Reproduce(ReproduceArgs),
}

#[derive(Args, Debug)]
struct SpaceArgs {
    /// Interval domain as LO,HI (defaults to the builtin map's domain)
    #[arg(long, allow_hyphen_values = true)]
    domain: Option<String>,
    /// Finite domain as a comma-separated point list; overrides --domain
    #[arg(long, allow_hyphen_values = true)]
    points: Option<String>,
    /// Distance: absdiff, powdiff(p), or an expression in x and y
    #[arg(long, default_value = "absdiff")]
    metric: String,
    /// Relaxation constant s >= 1
    #[arg(long, default_value_t = 1.0)]
    s: f64,
}

#[derive(Args, Debug)]
struct TolArgs {
    #[arg(long, default_value_t = 1e-12)]
    tol_abs: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_rel: f64,
}

impl TolArgs {
    fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.tol_abs, self.tol_rel)
    }
}

#[derive(Args, Debug)]
struct CertifyArgs {
    /// Map: ex31, ex32, or an expression in x
    #[arg(long)]
    map: String,
    /// Comparison function: linear(c), ex32phi, or an expression in x
    #[arg(long)]
    phi: Option<String>,
    /// Check d(f²x, f²y) <= a·d(fx, fy) + b·d(x, y) instead
    #[arg(long)]
    convex: bool,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Window length
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[command(flatten)]
    space: SpaceArgs,
    /// Grid points per axis
    #[arg(long, default_value_t = 2001)]
    grid: usize,
    #[arg(long, default_value_t = 100_000)]
    random_pairs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    map: String,
    #[arg(long, allow_hyphen_values = true)]
    x0: f64,
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long, default_value_t = 1e-12)]
    step_tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e12)]
    escape_bound: f64,
    /// Window length for the window_max column
    #[arg(long, default_value_t = 1)]
    m: usize,
    /// Limit used for rate classification (defaults to the builtin's known
    /// fixed point, else the final iterate)
    #[arg(long, allow_hyphen_values = true)]
    alpha_hat: Option<f64>,
    /// Write the trace as CSV
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Check identity, separation, symmetry and the relaxed triangle inequality
    Metric(VerifyMetricArgs),
    /// Check monotonicity, decay of iterates and phi(r) < r
    Phi(VerifyPhiArgs),
}

#[derive(Args, Debug)]
struct VerifyMetricArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Grid points; all chain triples of the grid are checked
    #[arg(long, default_value_t = 101)]
    grid: usize,
    #[arg(long, default_value_t = 0)]
    random_triples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args, Debug)]
struct VerifyPhiArgs {
    #[arg(long)]
    phi: String,
    /// Iterations K for the decay check
    #[arg(long, default_value_t = 256)]
    iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    decay_tol: f64,
    /// Comma-separated radii (default: 0 and 61 log-spaced radii over [1e-6, 1e3])
    #[arg(long)]
    radii: Option<String>,
    #[command(flatten)]
    tol: TolArgs,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    /// ex31 or ex32
    experiment: String,
    /// Directory for certificates, traces and the summary
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Runs the CLI with `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Certify(a) => cmd_certify(&a, out),
        Command::Solve(a) => cmd_solve(&a, out),
        Command::Verify(VerifyCommand::Metric(a)) => cmd_verify_metric(&a, out),
        Command::Verify(VerifyCommand::Phi(a)) => cmd_verify_phi(&a, out),
        Command::Reproduce(a) => cmd_reproduce(&a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.to_string().replace('\n', " "));
            EXIT_ERROR
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(io_err(Path::new("<stdout>")))
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::InvalidParameter(format!("`{t}` is not a finite number")))
        })
        .collect()
}

fn parse_domain(args: &SpaceArgs) -> Result<Option<Domain>> {
    if let Some(points) = &args.points {
        return Domain::finite(parse_list(points)?).map(Some);
    }
    let Some(text) = &args.domain else {
        return Ok(None);
    };
    match parse_list(text)?.as_slice() {
        [lo, hi] => Domain::interval(*lo, *hi).map(Some),
        _ => Err(Error::InvalidParameter(format!(
            "--domain expects LO,HI, got `{text}`"
        ))),
    }
}

fn build_space(args: &SpaceArgs, map: Option<&str>) -> Result<(BMetricSpace, Option<SelfMap>)> {
    let domain = parse_domain(args)?;
    let map = map
        .map(|spec| resolve_map(spec, domain.clone()))
        .transpose()?;
    let domain = match (domain, &map) {
        (Some(d), _) => d,
        (None, Some(m)) => m.domain().clone(),
        (None, None) => {
            return Err(Error::InvalidParameter(
                "a domain is required (--domain LO,HI or --points P1,P2,...)".into(),
            ))
        }
    };
    let space = BMetricSpace::new(domain, resolve_metric(&args.metric)?, args.s)?;
    Ok((space, map))
}

pub fn describe_domain(d: &Domain) -> String {
    match d {
        Domain::Interval { lo, hi } => format!("[{}, {}]", fmt_real(*lo), fmt_real(*hi)),
        Domain::Finite(p) => {
            let pts: Vec<String> = p.iter().map(|v| fmt_real(*v)).collect();
            format!("{{{}}}", pts.join(", "))
        }
    }
}

fn describe_map(f: &SelfMap) -> String {
    match f.func().expr() {
        Some(e) if e.to_string() != f.label() => format!("{} = {}", f.label(), e),
        _ => f.label().to_string(),
    }
}

fn describe_sampler(space: &BMetricSpace, s: &PairSampler) -> String {
    if space.domain.is_finite_set() {
        "all pairs (finite domain)".into()
    } else {
        format!(
            "grid {}, random pairs {}, seed {}",
            s.grid_points, s.random_pairs, s.seed
        )
    }
}

/// Human-readable certificate with full-precision numbers.
pub fn render_certificate(
    cert: &Certificate,
    space: &BMetricSpace,
    f: &SelfMap,
    phi: Option<&ComparisonFunction>,
    sampler: &PairSampler,
) -> String {
    let mut s = String::new();
    match cert.condition {
        Condition::MStep { m } => {
            let _ = writeln!(s, "condition: m-step (m = {m})");
        }
        Condition::Convex { a, b } => {
            let _ = writeln!(
                s,
                "condition: convex (a = {}, b = {})",
                fmt_real(a),
                fmt_real(b)
            );
        }
    }
    let _ = writeln!(s, "map: {}", describe_map(f));
    if let Some(phi) = phi {
        let _ = writeln!(s, "phi: {}", phi.label());
    }
    let _ = writeln!(
        s,
        "metric: {}, s = {}",
        space.distance.label(),
        fmt_real(space.s)
    );
    let _ = writeln!(s, "domain: {}", describe_domain(&space.domain));
    let _ = writeln!(s, "sampler: {}", describe_sampler(space, sampler));
    let _ = writeln!(s, "status: {}", cert.status.id());
    let _ = writeln!(s, "pairs tested: {}", cert.pairs_tested);
    let _ = writeln!(s, "violations found: {}", cert.violations_found);
    for v in &cert.worst {
        let _ = writeln!(
            s,
            "violation: x = {}, y = {}, lhs = {}, rhs = {}, margin = {}",
            fmt_real(v.x),
            fmt_real(v.y),
            fmt_real(v.lhs),
            fmt_real(v.rhs),
            fmt_real(v.margin)
        );
    }
    s
}

fn cert_exit(cert: &Certificate) -> i32 {
    if cert.status.is_certified() {
        EXIT_OK
    } else {
        EXIT_FAIL
    }
}

fn cmd_certify(args: &CertifyArgs, out: &mut dyn Write) -> Result<i32> {
    let (space, map) = build_space(&args.space, Some(&args.map))?;
    let f = map.expect("map requested");
    let sampler = PairSampler::new(args.grid, args.random_pairs, args.seed)?;
    let tol = args.tol.tolerance();
    let (cert, phi) = if args.convex {
        let (Some(a), Some(b)) = (args.a, args.b) else {
            return Err(Error::InvalidParameter("--convex needs --a and --b".into()));
        };
        (
            certify_convex_contraction(&space, &f, a, b, &sampler, tol)?,
            None,
        )
    } else {
        let Some(spec) = &args.phi else {
            return Err(Error::InvalidParameter(
                "--phi is required unless --convex is given".into(),
            ));
        };
        let phi = resolve_phi(spec)?;
        (
            certify_m_step(&space, &f, &phi, args.m, &sampler, tol)?,
            Some(phi),
        )
    };
    emit(
        out,
        &render_certificate(&cert, &space, &f, phi.as_ref(), &sampler),
    )?;
    Ok(cert_exit(&cert))
}

/// CSV with header `n,x,step,residual,window_max`, one row per iterate.
///
/// `step` is `d(x_n, x_{n+1})` (empty on the final row), `residual` is
/// `d(x_n, f(x_n))` and `window_max` is `M_n` (empty past the last full
/// window).
pub fn render_trace_csv(trace: &PicardTrace) -> String {
    let opt = |v: Option<f64>| v.map(fmt_real).unwrap_or_default();
    let mut s = String::from("n,x,step,residual,window_max\n");
    for (n, x) in trace.iterates.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            n,
            fmt_real(*x),
            opt(trace.step_dists.get(n).copied()),
            opt(trace.residual(n)),
            opt(trace.window_maxes.get(n).copied())
        );
    }
    s
}

pub fn write_trace_csv(trace: &PicardTrace, path: &Path) -> Result<()> {
    fs::write(path, render_trace_csv(trace)).map_err(io_err(path))
}

fn describe_rate(rate: &Result<RateReport>) -> String {
    match rate {
        Ok(RateReport::Geometric { ratio }) => format!("geometric (ratio {})", fmt_real(*ratio)),
        Ok(RateReport::Sublinear { product }) => {
            format!("sublinear (n * residual {})", fmt_real(*product))
        }
        Ok(r) => r.id().to_string(),
        Err(e) => format!("n/a ({e})"),
    }
}

fn render_solve(
    f: &SelfMap,
    trace: &PicardTrace,
    alpha: Option<f64>,
    rate: &Result<RateReport>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "map: {}", describe_map(f));
    let _ = writeln!(s, "x0: {}", fmt_real(trace.iterates[0]));
    let _ = writeln!(
        s,
        "stop: {} after {} iterations",
        trace.stop_reason.id(),
        trace.step_dists.len()
    );
    let _ = writeln!(s, "estimate: {}", fmt_real(trace.estimate()));
    if let Some(r) = trace.final_residual {
        let _ = writeln!(s, "residual: {}", fmt_real(r));
    }
    let _ = writeln!(
        s,
        "alpha_hat: {}",
        alpha
            .map(fmt_real)
            .unwrap_or_else(|| "final iterate".into())
    );
    let _ = writeln!(s, "rate: {}", describe_rate(rate));
    s
}

fn cmd_solve(args: &SolveArgs, out: &mut dyn Write) -> Result<i32> {
    let (space, map) = build_space(&args.space, Some(&args.map))?;
    let f = map.expect("map requested");
    let stop = StopCriteria::new(args.step_tol, args.max_iters, args.escape_bound)?;
    let trace = picard_iterate(&space, &f, args.x0, &stop, args.m)?;
    let alpha = args.alpha_hat.or(f.known_fixed_point());
    let rate = estimate_rate(&space, &trace, alpha);
    if let Err(e @ (Error::Eval { .. } | Error::Io { .. })) = rate {
        return Err(e);
    }
    emit(out, &render_solve(&f, &trace, alpha, &rate))?;
    if let Some(path) = &args.trace {
        write_trace_csv(&trace, path)?;
    }
    Ok(if trace.stop_reason == crate::solve::StopReason::Escaped {
        EXIT_FAIL
    } else {
        EXIT_OK
    })
}

fn render_axioms(rep: &AxiomReport, space: &BMetricSpace, min_s: f64) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "metric: {}, s = {}",
        space.distance.label(),
        fmt_real(space.s)
    );
    let _ = writeln!(s, "domain: {}", describe_domain(&space.domain));
    let status = match (rep.passed, rep.evidence) {
        (false, _) => "failed",
        (true, Evidence::Sampled) => "passed (sampled evidence, not proof)",
        (true, Evidence::Exhaustive) => "passed (exhaustive)",
    };
    let _ = writeln!(s, "status: {status}");
    let _ = writeln!(s, "instances tested: {}", rep.samples_tested);
    let _ = writeln!(s, "failures: {}", rep.failures);
    let _ = writeln!(s, "estimated minimal s: {}", fmt_real(min_s));
    if let Some(g) = space.distance.suggested_s() {
        let _ = writeln!(s, "suggested s for this family: {}", fmt_real(g));
    }
    for w in &rep.witnesses {
        let pts: Vec<String> = w.points.iter().map(|v| fmt_real(*v)).collect();
        let _ = writeln!(
            s,
            "witness: {} at ({}), lhs = {}, rhs = {}",
            w.axiom.id(),
            pts.join(", "),
            fmt_real(w.lhs),
            fmt_real(w.rhs)
        );
    }
    s
}

fn cmd_verify_metric(args: &VerifyMetricArgs, out: &mut dyn Write) -> Result<i32> {
    let (space, _) = build_space(&args.space, None)?;
    let sampler = PairSampler::new(args.grid, args.random_triples, args.seed)?;
    let rep = verify_axioms(&space, &sampler, args.tol.tolerance())?;
    let min_s = min_b_constant(&space.domain, &space.distance, &sampler)?;
    emit(out, &render_axioms(&rep, &space, min_s))?;
    Ok(if rep.passed { EXIT_OK } else { EXIT_FAIL })
}

pub fn render_phi_report(phi: &ComparisonFunction, check: &PhiCheck, rep: &PhiReport) -> String {
    let flag = |ok: bool| if ok { "ok" } else { "FAILED" };
    let mut s = String::new();
    let _ = writeln!(s, "phi: {}", phi.label());
    let _ = writeln!(
        s,
        "radii: {}, iterations: {}, decay tolerance: {}",
        check.radii.len(),
        check.iters,
        fmt_real(check.decay_tol)
    );
    let _ = writeln!(s, "monotone: {}", flag(rep.monotone_ok));
    let _ = writeln!(s, "decay: {}", flag(rep.decay_ok));
    let _ = writeln!(s, "subidentity: {}", flag(rep.subidentity_ok));
    let _ = writeln!(
        s,
        "status: {}",
        if rep.passed() { "passed" } else { "failed" }
    );
    for w in rep.witnesses.iter().take(crate::space::WITNESS_CAP) {
        let ins: Vec<String> = w.inputs.iter().map(|v| fmt_real(*v)).collect();
        let vals: Vec<String> = w.values.iter().map(|v| fmt_real(*v)).collect();
        let _ = writeln!(
            s,
            "witness: {} at ({}) -> ({})",
            w.law.id(),
            ins.join(", "),
            vals.join(", ")
        );
    }
    if rep.witnesses.len() > crate::space::WITNESS_CAP {
        let _ = writeln!(
            s,
            "further witnesses: {}",
            rep.witnesses.len() - crate::space::WITNESS_CAP
        );
    }
    s
}

fn cmd_verify_phi(args: &VerifyPhiArgs, out: &mut dyn Write) -> Result<i32> {
    let phi = resolve_phi(&args.phi)?;
    let mut check = PhiCheck {
        iters: args.iters,
        decay_tol: args.decay_tol,
        tol: args.tol.tolerance(),
        ..PhiCheck::default()
    };
    if let Some(r) = &args.radii {
        check.radii = parse_list(r)?;
    }
    let rep = verify_comparison(&phi, &check)?;
    emit(out, &render_phi_report(&phi, &check, &rep))?;
    Ok(if rep.passed() { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_reproduce(args: &ReproduceArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let run = match args.experiment.as_str() {
        "ex31" => crate::reproduce::ex31()?,
        "ex32" => crate::reproduce::ex32()?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown experiment `{other}` (expected ex31 or ex32)"
            )))
        }
    };
    let summary = run.summary();
    emit(out, &summary)?;
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        for (name, body) in &run.artifacts {
            let path = dir.join(name);
            fs::write(&path, body).map_err(io_err(&path))?;
        }
        let path = dir.join("summary.txt");
        fs::write(&path, &summary).map_err(io_err(&path))?;
    }
    match run.first_failure() {
        None => Ok(EXIT_OK),
        Some(what) => {
            let _ = writeln!(err, "expectation failed: {what}");
            Ok(EXIT_FAIL)
        }
    }
}
