//! Picard iteration with window diagnostics and rate classification.

use crate::certify::SelfMap;
use crate::error::{Error, Result};
use crate::space::BMetricSpace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StopCriteria {
    /// Stop once `d(x_n, x_{n+1}) <= step_tol`.
    pub step_tol: f64,
    pub max_iters: usize,
    /// Abort when `d(x_0, x_n)` exceeds this.
    pub escape_bound: f64,
}

impl StopCriteria {
    pub fn new(step_tol: f64, max_iters: usize, escape_bound: f64) -> Result<Self> {
        if !(step_tol >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step_tol must be >= 0, got {step_tol}"
            )));
        }
        if max_iters == 0 {
            return Err(Error::InvalidParameter("max_iters must be >= 1".into()));
        }
        if !(escape_bound > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "escape_bound must be > 0, got {escape_bound}"
            )));
        }
        Ok(Self {
            step_tol,
            max_iters,
            escape_bound,
        })
    }
}

impl Default for StopCriteria {
    fn default() -> Self {
        Self {
            step_tol: 1e-12,
            max_iters: 1_000_000,
            escape_bound: 1e12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    StepConverged,
    MaxIters,
    Escaped,
    ExactFixedPoint,
}

impl StopReason {
    pub fn id(self) -> &'static str {
        match self {
            StopReason::StepConverged => "step-converged",
            StopReason::MaxIters => "max-iters",
            StopReason::Escaped => "escaped",
            StopReason::ExactFixedPoint => "exact-fixed-point",
        }
    }
}

/// The orbit `x_n = f^n(x_0)` with per-step diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct PicardTrace {
    pub iterates: Vec<f64>,
    /// `step_dists[n] = d(x_n, x_{n+1})`; one shorter than `iterates`.
    pub step_dists: Vec<f64>,
    /// `M_n(x_0, x_1)` for window length `window`, for every `n` whose
    /// window fits inside the recorded steps.
    pub window_maxes: Vec<f64>,
    pub window: usize,
    pub stop_reason: StopReason,
    /// `d(x_N, f(x_N))` at the final iterate, when `f(x_N)` is evaluable.
    pub final_residual: Option<f64>,
}

impl PicardTrace {
    /// The fixed-point estimate.
    pub fn estimate(&self) -> f64 {
        *self.iterates.last().expect("trace is never empty")
    }

    /// Fixed-point residual `d(x_n, f(x_n))`.
    pub fn residual(&self, n: usize) -> Option<f64> {
        if n + 1 < self.iterates.len() {
            Some(self.step_dists[n])
        } else if n + 1 == self.iterates.len() {
            self.final_residual
        } else {
            None
        }
    }
}

/// Iterates `f` from `x0` until a stop criterion fires.
///
/// A zero step means the current iterate is exactly fixed: iteration stops
/// with [`StopReason::ExactFixedPoint`] without appending the repeat.
pub fn picard_iterate(
    space: &BMetricSpace,
    f: &SelfMap,
    x0: f64,
    stop: &StopCriteria,
    m: usize,
) -> Result<PicardTrace> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "window length m must be >= 1".into(),
        ));
    }
    if !f.domain().contains(x0) {
        return Err(Error::InvalidParameter(format!(
            "start {} is outside the domain",
            crate::format::fmt_real(x0)
        )));
    }
    let mut iterates = vec![x0];
    let mut step_dists = Vec::new();
    let stop_reason = loop {
        let n = iterates.len() - 1;
        if n >= stop.max_iters {
            break StopReason::MaxIters;
        }
        let x = iterates[n];
        let next = f.step(x, x0, n)?;
        let step = space.dist(x, next)?;
        if step == 0.0 {
            break StopReason::ExactFixedPoint;
        }
        iterates.push(next);
        step_dists.push(step);
        if space.dist(x0, next)? > stop.escape_bound {
            break StopReason::Escaped;
        }
        if step <= stop.step_tol {
            break StopReason::StepConverged;
        }
    };

    let final_residual = if stop_reason == StopReason::ExactFixedPoint {
        Some(0.0)
    } else {
        let last = *iterates.last().unwrap();
        f.step(last, x0, iterates.len() - 1)
            .and_then(|v| space.dist(last, v))
            .ok()
    };

    let window_maxes = if step_dists.len() >= m {
        step_dists
            .windows(m)
            .map(|w| w.iter().copied().fold(0.0, f64::max))
            .collect()
    } else {
        Vec::new()
    };

    Ok(PicardTrace {
        iterates,
        step_dists,
        window_maxes,
        window: m,
        stop_reason,
        final_residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateReport {
    /// Residual ratios settle around `ratio < 1`.
    Geometric {
        ratio: f64,
    },
    /// `n * r_n` settles; `product` is its last value.
    Sublinear {
        product: f64,
    },
    ConvergedExact,
    Inconclusive,
}

impl RateReport {
    pub fn id(&self) -> &'static str {
        match self {
            RateReport::Geometric { .. } => "geometric",
            RateReport::Sublinear { .. } => "sublinear",
            RateReport::ConvergedExact => "converged-exact",
            RateReport::Inconclusive => "inconclusive",
        }
    }
}

/// Minimum trace length accepted by [`estimate_rate`].
pub const MIN_RATE_TRACE: usize = 16;
const BAND: f64 = 0.1;
const QUORUM: f64 = 0.8;

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let k = s.len() / 2;
    if s.len() % 2 == 1 {
        s[k]
    } else {
        0.5 * (s[k - 1] + s[k])
    }
}

// At least QUORUM of the values lie within BAND (relative) of the median.
fn settled(v: &[f64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    let med = median(v);
    if !(med > 0.0) {
        return None;
    }
    let inside = v.iter().filter(|x| (**x - med).abs() <= BAND * med).count();
    (inside as f64 >= QUORUM * v.len() as f64).then_some(med)
}

/// Classifies the tail of a trace from residuals `r_n = d(x_n, alpha_hat)`.
///
/// Looks at the last half of the iterates, final point excluded. The
/// sublinear test (`n * r_n` settled) runs before the geometric one
/// (`r_{n+1} / r_n` settled below 1), since a `1/n` tail also has ratios
/// settling just under 1. "Settled" means at least 80% of the values lie
/// within 10% of their median. `alpha_hat` defaults to the final iterate.
pub fn estimate_rate(
    space: &BMetricSpace,
    trace: &PicardTrace,
    alpha_hat: Option<f64>,
) -> Result<RateReport> {
    if trace.stop_reason == StopReason::ExactFixedPoint {
        return Ok(RateReport::ConvergedExact);
    }
    let len = trace.iterates.len();
    if len < MIN_RATE_TRACE {
        return Err(Error::TraceTooShort { len });
    }
    let alpha = alpha_hat.unwrap_or_else(|| trace.estimate());
    let start = len / 2;
    let idx: Vec<usize> = (start..len - 1).collect();
    let residuals: Vec<f64> = idx
        .iter()
        .map(|&n| space.dist(trace.iterates[n], alpha))
        .collect::<Result<_>>()?;
    if residuals.iter().all(|r| *r == 0.0) {
        return Ok(RateReport::ConvergedExact);
    }

    let products: Vec<f64> = idx
        .iter()
        .zip(&residuals)
        .map(|(&n, r)| n as f64 * r)
        .collect();
    if settled(&products).is_some() {
        return Ok(RateReport::Sublinear {
            product: *products.last().unwrap(),
        });
    }

    let ratios: Vec<f64> = residuals
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    match settled(&ratios) {
        Some(q) if q < 1.0 => Ok(RateReport::Geometric { ratio: q }),
        _ => Ok(RateReport::Inconclusive),
    }
}
