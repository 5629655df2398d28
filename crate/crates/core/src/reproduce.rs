//! The two built-in experiments: the discontinuous two-branch map on
//! `[0, 1]` and the map `x - x^2` on `[0, 1/2]`.

use std::fmt::Write as _;

use crate::builtin::{builtin_lookup, resolve_metric, Builtin};
use crate::certify::{
    certify_convex_contraction, certify_m_step, monotone_m_check, CertStatus, SelfMap,
};
use crate::cli::{render_certificate, render_phi_report, render_trace_csv};
use crate::comparison::{verify_comparison, ComparisonFunction, PhiCheck};
use crate::error::Result;
use crate::format::fmt_real;
use crate::sampling::PairSampler;
use crate::solve::{estimate_rate, picard_iterate, RateReport, StopCriteria, StopReason};
use crate::space::BMetricSpace;
use crate::tol::Tolerance;

#[derive(Debug, Clone)]
pub struct Expectation {
    pub what: String,
    pub ok: bool,
    pub detail: String,
}

/// Outcome of one experiment: checked expectations plus named text
/// artifacts (certificates, reports, CSV traces).
#[derive(Debug, Clone)]
pub struct Run {
    pub name: &'static str,
    pub expectations: Vec<Expectation>,
    pub artifacts: Vec<(String, String)>,
}

impl Run {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            expectations: Vec::new(),
            artifacts: Vec::new(),
        }
    }

    fn expect(&mut self, what: impl Into<String>, ok: bool, detail: impl Into<String>) {
        self.expectations.push(Expectation {
            what: what.into(),
            ok,
            detail: detail.into(),
        });
    }

    fn artifact(&mut self, name: impl Into<String>, body: String) {
        self.artifacts.push((name.into(), body));
    }

    pub fn passed(&self) -> bool {
        self.expectations.iter().all(|e| e.ok)
    }

    pub fn first_failure(&self) -> Option<&str> {
        self.expectations
            .iter()
            .find(|e| !e.ok)
            .map(|e| e.what.as_str())
    }

    pub fn summary(&self) -> String {
        let mut s = format!("experiment {}\n", self.name);
        for e in &self.expectations {
            let _ = writeln!(
                s,
                "[{}] {}: {}",
                if e.ok { "ok" } else { "FAILED" },
                e.what,
                e.detail
            );
        }
        let _ = writeln!(
            s,
            "result: {}",
            if self.passed() {
                "all expectations hold"
            } else {
                "expectation failed"
            }
        );
        s
    }
}

fn map(name: &str) -> Result<SelfMap> {
    match builtin_lookup(name)? {
        Builtin::Map(m) => Ok(m),
        _ => unreachable!("{name} is a map"),
    }
}

fn phi(name: &str) -> Result<ComparisonFunction> {
    match builtin_lookup(name)? {
        Builtin::Phi(p) => Ok(p),
        _ => unreachable!("{name} is a comparison function"),
    }
}

fn space_for(f: &SelfMap) -> Result<BMetricSpace> {
    BMetricSpace::new(f.domain().clone(), resolve_metric("absdiff")?, 1.0)
}

pub fn ex31() -> Result<Run> {
    let mut run = Run::new("ex31");
    let f = map("ex31")?;
    let space = space_for(&f)?;
    let quarter = phi("linear(0.25)")?;
    let sampler = PairSampler::standard();
    let tol = Tolerance::default();

    let check = PhiCheck {
        iters: 64,
        decay_tol: 1e-12,
        ..PhiCheck::default()
    };
    let rep = verify_comparison(&quarter, &check)?;
    run.expect(
        "linear(0.25) is a comparison function",
        rep.passed(),
        format!("{} witnesses", rep.witnesses.len()),
    );
    run.artifact(
        "phi_linear_0.25.txt",
        render_phi_report(&quarter, &check, &rep),
    );

    let c2 = certify_m_step(&space, &f, &quarter, 2, &sampler, tol)?;
    run.expect(
        "m = 2 window condition holds with phi(r) = r/4",
        c2.status == CertStatus::CertifiedOnSamples,
        format!("{}, {} pairs", c2.status.id(), c2.pairs_tested),
    );
    run.artifact(
        "certify_m2.txt",
        render_certificate(&c2, &space, &f, Some(&quarter), &sampler),
    );

    let c1 = certify_m_step(&space, &f, &quarter, 1, &sampler, tol)?;
    run.expect(
        "m = 1 contraction condition is refuted",
        c1.status == CertStatus::Refuted,
        format!(
            "{}, {} violating pairs",
            c1.status.id(),
            c1.violations_found
        ),
    );
    let straddles = c1.worst.first().is_some_and(|v| v.x < 0.5 && 0.5 <= v.y);
    run.expect(
        "worst m = 1 violation straddles the jump at 1/2",
        straddles,
        c1.worst
            .first()
            .map(|v| {
                format!(
                    "x = {}, y = {}, margin = {}",
                    fmt_real(v.x),
                    fmt_real(v.y),
                    fmt_real(v.margin)
                )
            })
            .unwrap_or_else(|| "no violation".into()),
    );
    run.artifact(
        "certify_m1.txt",
        render_certificate(&c1, &space, &f, Some(&quarter), &sampler),
    );

    let mono = monotone_m_check(&space, &f, 1.0, 0.0, 2, 20, tol)?;
    run.expect(
        "window maxima M_n(1, 0) are non-increasing and d(x_n, y_n) -> 0",
        mono.holds && mono.final_distance < 1e-10,
        format!("d(x_20, y_20) = {}", fmt_real(mono.final_distance)),
    );

    let stop = StopCriteria::new(1e-12, 10_000, 1e12)?;
    let mut estimates = Vec::new();
    for x0 in [1.0, 0.7, 0.3] {
        let trace = picard_iterate(&space, &f, x0, &stop, 2)?;
        let rate = estimate_rate(&space, &trace, f.known_fixed_point())?;
        let geometric =
            matches!(rate, RateReport::Geometric { ratio } if (ratio - 0.25).abs() <= 0.01);
        run.expect(
            format!(
                "Picard from {} converges geometrically with ratio 1/4",
                fmt_real(x0)
            ),
            trace.stop_reason == StopReason::StepConverged && trace.estimate() < 1e-11 && geometric,
            format!(
                "{} after {} steps, estimate {}, {:?}",
                trace.stop_reason.id(),
                trace.step_dists.len(),
                fmt_real(trace.estimate()),
                rate
            ),
        );
        estimates.push(trace.estimate());
        run.artifact(
            format!("solve_x0_{}.csv", fmt_real(x0)),
            render_trace_csv(&trace),
        );
    }
    let spread = estimates.iter().fold(f64::MIN, |a, b| a.max(*b))
        - estimates.iter().fold(f64::MAX, |a, b| a.min(*b));
    run.expect(
        "fixed point is unique across starts",
        spread <= 1e-10,
        format!("spread {}", fmt_real(spread)),
    );
    Ok(run)
}

pub fn ex32() -> Result<Run> {
    let mut run = Run::new("ex32");
    let f = map("ex32")?;
    let space = space_for(&f)?;
    let tol = Tolerance::default();

    let grid_only = PairSampler::new(2001, 0, 0)?;
    let mut csv =
        String::from("a,b,status,pairs_tested,violations_found,worst_x,worst_y,worst_margin\n");
    let mut all_refuted = true;
    let mut combos = 0;
    for i in 1..=8u32 {
        for j in 1..=8u32 {
            if i + j >= 10 {
                continue;
            }
            let (a, b) = (f64::from(i) / 10.0, f64::from(j) / 10.0);
            let c = certify_convex_contraction(&space, &f, a, b, &grid_only, tol)?;
            combos += 1;
            all_refuted &= c.status == CertStatus::Refuted;
            let w = c.worst.first();
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{},{},{}",
                fmt_real(a),
                fmt_real(b),
                c.status.id(),
                c.pairs_tested,
                c.violations_found,
                w.map(|v| fmt_real(v.x)).unwrap_or_default(),
                w.map(|v| fmt_real(v.y)).unwrap_or_default(),
                w.map(|v| fmt_real(v.margin)).unwrap_or_default(),
            );
        }
    }
    run.expect(
        "not a convex contraction for any (a, b) on the 0.1 grid with a + b < 1",
        all_refuted,
        format!("{combos} coefficient pairs checked"),
    );
    run.artifact("convex_grid.csv", csv);

    let ex32phi = phi("ex32phi")?;
    let check = PhiCheck {
        iters: 10_000,
        decay_tol: 1e-3,
        ..PhiCheck::default()
    };
    let rep = verify_comparison(&ex32phi, &check)?;
    run.expect(
        "ex32phi is a comparison function",
        rep.passed(),
        format!("{} witnesses", rep.witnesses.len()),
    );
    run.artifact("phi_ex32phi.txt", render_phi_report(&ex32phi, &check, &rep));

    let sampler = PairSampler::standard();
    let c2 = certify_m_step(&space, &f, &ex32phi, 2, &sampler, tol)?;
    run.expect(
        "m = 2 window condition holds with ex32phi",
        c2.status == CertStatus::CertifiedOnSamples,
        format!("{}, {} pairs", c2.status.id(), c2.pairs_tested),
    );
    run.artifact(
        "certify_m2_ex32phi.txt",
        render_certificate(&c2, &space, &f, Some(&ex32phi), &sampler),
    );

    let mono = monotone_m_check(&space, &f, 0.5, 0.1, 2, 100, tol)?;
    run.expect(
        "window maxima M_n(0.5, 0.1) are non-increasing",
        mono.holds,
        format!("d(x_100, y_100) = {}", fmt_real(mono.final_distance)),
    );

    let stop = StopCriteria::new(0.0, 10_000, 1e12)?;
    let trace = picard_iterate(&space, &f, 0.5, &stop, 2)?;
    let product = trace.step_dists.len() as f64 * trace.estimate();
    run.expect(
        "n x_n approaches 1",
        trace.stop_reason == StopReason::MaxIters && (product - 1.0).abs() < 0.01,
        format!(
            "n = {}, n x_n = {}",
            trace.step_dists.len(),
            fmt_real(product)
        ),
    );
    let rate = estimate_rate(&space, &trace, f.known_fixed_point())?;
    run.expect(
        "convergence to 0 is sublinear",
        matches!(rate, RateReport::Sublinear { .. }),
        format!("{rate:?}"),
    );
    run.artifact("solve_x0_0.5.csv", render_trace_csv(&trace));
    Ok(run)
}
