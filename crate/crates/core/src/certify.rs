//! Sampling-based checks of the m-step window contraction condition
//!
//! ```text
//! d(f^m x, f^m y) <= phi(max{d(x, y), d(f x, f y), ..., d(f^(m-1) x, f^(m-1) y)})
//! ```
//!
//! and of the two-term convex contraction inequality, plus the window-maximum
//! diagnostics along a pair of orbits.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::comparison::{check_convex_coefficients, ComparisonFunction};
use crate::error::{Error, EvalError, Result};
use crate::func::RealFn;
use crate::sampling::PairSampler;
use crate::space::{BMetricSpace, Domain};
use crate::tol::Tolerance;
use crate::topk;

/// Reported violations are capped at this many entries.
pub const VIOLATION_CAP: usize = 32;

/// A map of a domain into itself.
#[derive(Debug, Clone)]
pub struct SelfMap {
    func: RealFn,
    domain: Domain,
    known_fixed_point: Option<f64>,
}

impl SelfMap {
    pub fn new(func: RealFn, domain: Domain) -> Self {
        Self {
            func,
            domain,
            known_fixed_point: None,
        }
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_known_fixed_point(mut self, alpha: f64) -> Self {
        self.known_fixed_point = Some(alpha);
        self
    }

    pub fn label(&self) -> &str {
        self.func.label()
    }

    pub fn func(&self) -> &RealFn {
        &self.func
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn known_fixed_point(&self) -> Option<f64> {
        self.known_fixed_point
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        self.func.eval(x)
    }

    /// One application of the map, checked against the domain. `start` and
    /// `step` only label the error.
    pub(crate) fn step(&self, x: f64, start: f64, step: usize) -> Result<f64> {
        let v = self.eval(x).map_err(|e| Error::eval_at1(x, e))?;
        if !self.domain.contains(v) {
            return Err(Error::DomainEscape {
                start,
                step,
                value: v,
            });
        }
        Ok(v)
    }
}

/// `[x, f(x), ..., f^n(x)]`.
pub fn orbit(f: &SelfMap, x: f64, n: usize) -> Result<Vec<f64>> {
    if !f.domain.contains(x) {
        return Err(Error::InvalidParameter(format!(
            "start {} is outside the domain",
            crate::format::fmt_real(x)
        )));
    }
    let mut out = Vec::with_capacity(n + 1);
    out.push(x);
    for k in 1..=n {
        let next = f.step(out[k - 1], x, k - 1)?;
        out.push(next);
    }
    Ok(out)
}

/// `M_0(x, y) = max_{0 <= i < m} d(f^i x, f^i y)`.
pub fn window_max(space: &BMetricSpace, f: &SelfMap, x: f64, y: f64, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "window length m must be >= 1".into(),
        ));
    }
    let ox = orbit(f, x, m - 1)?;
    let oy = orbit(f, y, m - 1)?;
    window_of(space, &ox, &oy, 0, m)
}

fn window_of(space: &BMetricSpace, ox: &[f64], oy: &[f64], from: usize, m: usize) -> Result<f64> {
    let mut w = 0.0f64;
    for i in from..from + m {
        w = w.max(space.dist(ox[i], oy[i])?);
    }
    Ok(w)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Condition {
    MStep { m: usize },
    Convex { a: f64, b: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CertStatus {
    CertifiedOnSamples,
    CertifiedExhaustive,
    Refuted,
}

impl CertStatus {
    pub fn id(self) -> &'static str {
        match self {
            CertStatus::CertifiedOnSamples => "certified-on-samples",
            CertStatus::CertifiedExhaustive => "certified-exhaustive",
            CertStatus::Refuted => "refuted",
        }
    }

    pub fn is_certified(self) -> bool {
        self != CertStatus::Refuted
    }
}

/// A sampled pair where the inequality fails; `margin = lhs - rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub x: f64,
    pub y: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl Violation {
    fn order(a: &Self, b: &Self) -> Ordering {
        b.margin
            .total_cmp(&a.margin)
            .then_with(|| a.x.total_cmp(&b.x))
            .then_with(|| a.y.total_cmp(&b.y))
    }

    fn same(a: &Self, b: &Self) -> bool {
        a.x.to_bits() == b.x.to_bits() && a.y.to_bits() == b.y.to_bits()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub condition: Condition,
    pub status: CertStatus,
    pub pairs_tested: u64,
    /// Violating pairs seen, before capping.
    pub violations_found: u64,
    /// Worst violations: margin descending, then `(x, y)` ascending.
    pub worst: Vec<Violation>,
}

#[derive(Default)]
struct Shard {
    tested: u64,
    found: u64,
    worst: Vec<Violation>,
}

impl Shard {
    fn record(&mut self, x: f64, y: f64, lhs: f64, rhs: f64, tol: Tolerance) {
        self.tested += 1;
        if !tol.le(lhs, rhs) {
            self.found += 1;
            self.worst.push(Violation {
                x,
                y,
                lhs,
                rhs,
                margin: lhs - rhs,
            });
            if self.worst.len() >= 4 * VIOLATION_CAP {
                self.compact();
            }
        }
    }

    fn compact(&mut self) {
        topk::compact(
            &mut self.worst,
            VIOLATION_CAP,
            Violation::order,
            Violation::same,
        );
    }

    fn merge(mut self, other: Shard) -> Shard {
        self.tested += other.tested;
        self.found += other.found;
        self.worst.extend(other.worst);
        self.compact();
        self
    }
}

fn at_pair(x: f64, y: f64) -> impl Fn(Error) -> Error {
    move |e| Error::Pair {
        x,
        y,
        source: Box::new(e),
    }
}

/// Runs `judge` over the sampler's canonical pairs. `judge` receives the
/// orbits `[x, ..., f^depth x]` and `[y, ..., f^depth y]` and returns
/// `(lhs, rhs)`.
fn run_pairs<J>(
    domain: &Domain,
    f: &SelfMap,
    depth: usize,
    sampler: &PairSampler,
    tol: Tolerance,
    judge: J,
) -> Result<Shard>
where
    J: Fn(&[f64], &[f64]) -> Result<(f64, f64)> + Sync,
{
    let pts = sampler.grid(domain);
    let orbits: Vec<Vec<f64>> = pts
        .par_iter()
        .map(|&p| orbit(f, p, depth))
        .collect::<Vec<_>>()
        .into_iter()
        .collect::<Result<_>>()?;

    let rows: Vec<Result<Shard>> = (0..orbits.len())
        .into_par_iter()
        .map(|i| {
            let mut shard = Shard::default();
            let ox = &orbits[i];
            for oy in &orbits[i + 1..] {
                let (lhs, rhs) = judge(ox, oy).map_err(at_pair(ox[0], oy[0]))?;
                shard.record(ox[0], oy[0], lhs, rhs, tol);
            }
            shard.compact();
            Ok(shard)
        })
        .collect();

    let pairs = sampler.random_pairs(domain);
    let chunks: Vec<Result<Shard>> = pairs
        .par_chunks(2048)
        .map(|chunk| {
            let mut shard = Shard::default();
            for &(x, y) in chunk {
                let ox = orbit(f, x, depth).map_err(at_pair(x, y))?;
                let oy = orbit(f, y, depth).map_err(at_pair(x, y))?;
                let (lhs, rhs) = judge(&ox, &oy).map_err(at_pair(x, y))?;
                shard.record(x, y, lhs, rhs, tol);
            }
            shard.compact();
            Ok(shard)
        })
        .collect();

    let mut total = Shard::default();
    for shard in rows.into_iter().chain(chunks) {
        total = total.merge(shard?);
    }
    Ok(total)
}

fn finish(condition: Condition, domain: &Domain, shard: Shard) -> Certificate {
    let status = if !shard.worst.is_empty() {
        CertStatus::Refuted
    } else if domain.is_finite_set() {
        CertStatus::CertifiedExhaustive
    } else {
        CertStatus::CertifiedOnSamples
    };
    Certificate {
        condition,
        status,
        pairs_tested: shard.tested,
        violations_found: shard.found,
        worst: shard.worst,
    }
}

/// Checks `d(f^m x, f^m y) <= phi(M_0(x, y))` on every sampled pair.
///
/// With `m = 1` this is the plain phi-contraction condition. Pairs come from
/// the space's domain; finite domains are enumerated exhaustively. Orbits
/// are checked against the map's domain.
pub fn certify_m_step(
    space: &BMetricSpace,
    f: &SelfMap,
    phi: &ComparisonFunction,
    m: usize,
    sampler: &PairSampler,
    tol: Tolerance,
) -> Result<Certificate> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "window length m must be >= 1".into(),
        ));
    }
    let shard = run_pairs(&space.domain, f, m, sampler, tol, |ox, oy| {
        let w = window_of(space, ox, oy, 0, m)?;
        let lhs = space.dist(ox[m], oy[m])?;
        let rhs = phi.eval(w).map_err(|e| Error::eval_at1(w, e))?;
        Ok((lhs, rhs))
    })?;
    Ok(finish(Condition::MStep { m }, &space.domain, shard))
}

/// Checks `d(f^2 x, f^2 y) <= a d(f x, f y) + b d(x, y)` on every sampled
/// pair.
pub fn certify_convex_contraction(
    space: &BMetricSpace,
    f: &SelfMap,
    a: f64,
    b: f64,
    sampler: &PairSampler,
    tol: Tolerance,
) -> Result<Certificate> {
    check_convex_coefficients(a, b)?;
    let shard = run_pairs(&space.domain, f, 2, sampler, tol, |ox, oy| {
        let lhs = space.dist(ox[2], oy[2])?;
        let rhs = a * space.dist(ox[1], oy[1])? + b * space.dist(ox[0], oy[0])?;
        Ok((lhs, rhs))
    })?;
    Ok(finish(Condition::Convex { a, b }, &space.domain, shard))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneReport {
    /// `M_{n+1} <= M_n` (with slack) for every `n < N`.
    pub holds: bool,
    pub first_failure: Option<usize>,
    /// `M_0, ..., M_N`.
    pub window_maxes: Vec<f64>,
    /// `d(f^N x, f^N y)`.
    pub final_distance: f64,
}

/// Tracks `M_n(x, y)` for `n = 0..=N` along the two orbits.
pub fn monotone_m_check(
    space: &BMetricSpace,
    f: &SelfMap,
    x: f64,
    y: f64,
    m: usize,
    n_steps: usize,
    tol: Tolerance,
) -> Result<MonotoneReport> {
    if m == 0 || n_steps == 0 {
        return Err(Error::InvalidParameter("m and N must be >= 1".into()));
    }
    let len = n_steps + m - 1;
    let ox = orbit(f, x, len)?;
    let oy = orbit(f, y, len)?;
    let dists: Vec<f64> = ox
        .iter()
        .zip(&oy)
        .map(|(&a, &b)| space.dist(a, b))
        .collect::<Result<_>>()?;
    let window_maxes: Vec<f64> = (0..=n_steps)
        .map(|n| dists[n..n + m].iter().copied().fold(0.0, f64::max))
        .collect();
    let first_failure = window_maxes.windows(2).position(|w| !tol.le(w[1], w[0]));
    Ok(MonotoneReport {
        holds: first_failure.is_none(),
        first_failure,
        window_maxes,
        final_distance: dists[n_steps],
    })
}
