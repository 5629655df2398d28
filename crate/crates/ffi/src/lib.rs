//! C interface to `fixlab`.
//!
//! Objects are opaque handles created by `fx_*_new` functions and released
//! with the matching `fx_*_free`. Every fallible call returns an
//! [`FxStatus`]; on failure the message is available from
//! [`fx_last_error`] on the same thread. Output pointers are written only
//! on success.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use fixlab::builtin::{resolve_map, resolve_metric, resolve_phi};
use fixlab::cli::write_trace_csv;
use fixlab::func::RealFn;
use fixlab::{
    certify_convex_contraction, certify_m_step, convex_to_comparison, estimate_rate,
    min_b_constant, picard_iterate, verify_axioms, BMetricSpace, CertStatus, Certificate,
    ComparisonFunction, Domain, Error, EvalError, PairSampler, PicardTrace, RateReport, SelfMap,
    StopCriteria, StopReason, Tolerance,
};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FxStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Eval = 4,
    DomainEscape = 5,
    InvalidParameter = 6,
    UnknownBuiltin = 7,
    Io = 8,
    TraceTooShort = 9,
    Panic = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FxCertStatus {
    CertifiedOnSamples = 0,
    CertifiedExhaustive = 1,
    Refuted = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FxStopReason {
    StepConverged = 0,
    MaxIters = 1,
    Escaped = 2,
    ExactFixedPoint = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FxRateKind {
    Geometric = 0,
    Sublinear = 1,
    ConvergedExact = 2,
    Inconclusive = 3,
}

/// Rate classification. `value` is the ratio for `Geometric`, the settled
/// `n * residual` product for `Sublinear`, and 0 otherwise.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FxRate {
    pub kind: FxRateKind,
    pub value: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FxSampler {
    pub grid_points: usize,
    pub random_pairs: usize,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FxTolerance {
    pub abs: f64,
    pub rel: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FxViolation {
    pub x: f64,
    pub y: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// A b-metric space: domain, distance and relaxation constant.
pub struct FxSpace(BMetricSpace);
/// A self-map with its domain.
pub struct FxMap(SelfMap);
/// A comparison function.
pub struct FxPhi(ComparisonFunction);
pub struct FxCertificate(Certificate);
pub struct FxTrace(PicardTrace);

/// Map callback: write `f(x)` to `*out` and return 0, or return nonzero to
/// signal failure. The certifier calls it from several threads at once.
pub type FxMapCallback = extern "C" fn(user: *mut c_void, x: f64, out: *mut f64) -> i32;

struct Callback {
    f: FxMapCallback,
    user: *mut c_void,
}

// The caller promises the callback and its user data are thread-safe.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

impl Callback {
    fn call(&self, x: f64) -> Result<f64, EvalError> {
        let mut out = f64::NAN;
        match (self.f)(self.user, x, &mut out) {
            0 => Ok(out),
            code => Err(EvalError::Callback(format!("callback returned {code}"))),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).expect("nul bytes removed"));
}

fn status_of(err: &Error) -> FxStatus {
    match err {
        Error::Eval { .. } => FxStatus::Eval,
        Error::DomainEscape { .. } => FxStatus::DomainEscape,
        Error::Pair { source, .. } => status_of(source),
        Error::Parse(_) => FxStatus::Parse,
        Error::UnknownBuiltin { .. } => FxStatus::UnknownBuiltin,
        Error::InvalidParameter(_) => FxStatus::InvalidParameter,
        Error::TraceTooShort { .. } => FxStatus::TraceTooShort,
        Error::Io { .. } => FxStatus::Io,
    }
}

struct Fail(FxStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(body: impl FnOnce() -> Result<(), Fail>) -> FxStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error("");
            FxStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FxStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref()
        .ok_or_else(|| Fail(FxStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(FxStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Fail(FxStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(FxStatus::NullPointer, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(FxStatus::NullPointer, "output pointer is null".into()));
    }
    *out = value;
    Ok(())
}

unsafe fn free<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn sampler(s: FxSampler) -> Result<PairSampler, Fail> {
    Ok(PairSampler::new(s.grid_points, s.random_pairs, s.seed)?)
}

fn tolerance(t: FxTolerance) -> Tolerance {
    Tolerance::new(t.abs, t.rel)
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next `fx_*` call on the same thread.
#[no_mangle]
pub extern "C" fn fx_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn fx_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// 2001 grid points per axis, 100000 random pairs, seed 0.
#[no_mangle]
pub extern "C" fn fx_sampler_standard() -> FxSampler {
    let s = PairSampler::standard();
    FxSampler {
        grid_points: s.grid_points,
        random_pairs: s.random_pairs,
        seed: s.seed,
    }
}

/// `abs = 1e-12`, `rel = 1e-9`.
#[no_mangle]
pub extern "C" fn fx_tolerance_default() -> FxTolerance {
    let t = Tolerance::default();
    FxTolerance {
        abs: t.abs,
        rel: t.rel,
    }
}

/// Space on `[lo, hi]`. `metric` is `absdiff`, `powdiff(p)` or an
/// expression in `x` and `y`.
#[no_mangle]
pub unsafe extern "C" fn fx_space_new_interval(
    lo: f64,
    hi: f64,
    metric: *const c_char,
    s: f64,
    out: *mut *mut FxSpace,
) -> FxStatus {
    guard(|| {
        let d = resolve_metric(text(metric, "metric")?)?;
        put(
            out,
            FxSpace(BMetricSpace::new(Domain::interval(lo, hi)?, d, s)?),
        )
    })
}

/// Space on the finite set `points[0..len]`.
#[no_mangle]
pub unsafe extern "C" fn fx_space_new_points(
    points: *const f64,
    len: usize,
    metric: *const c_char,
    s: f64,
    out: *mut *mut FxSpace,
) -> FxStatus {
    guard(|| {
        if points.is_null() {
            return Err(Fail(FxStatus::NullPointer, "points is null".into()));
        }
        let pts = std::slice::from_raw_parts(points, len).to_vec();
        let d = resolve_metric(text(metric, "metric")?)?;
        put(out, FxSpace(BMetricSpace::new(Domain::finite(pts)?, d, s)?))
    })
}

#[no_mangle]
pub unsafe extern "C" fn fx_space_free(space: *mut FxSpace) {
    free(space)
}

#[no_mangle]
pub unsafe extern "C" fn fx_space_dist(
    space: *const FxSpace,
    x: f64,
    y: f64,
    out: *mut f64,
) -> FxStatus {
    guard(|| {
        let sp = get(space, "space")?;
        write(out, sp.0.dist(x, y)?)
    })
}

/// Map from a builtin name or an expression in `x`. The map's domain is the
/// space's domain; `space` may be null for builtins, which carry their own.
#[no_mangle]
pub unsafe extern "C" fn fx_map_new(
    spec: *const c_char,
    space: *const FxSpace,
    out: *mut *mut FxMap,
) -> FxStatus {
    guard(|| {
        let domain = space.as_ref().map(|s| s.0.domain.clone());
        put(out, FxMap(resolve_map(text(spec, "spec")?, domain)?))
    })
}

/// Map backed by a C callback on `[lo, hi]`. `user` is passed through
/// unchanged and must stay valid for the life of the map.
#[no_mangle]
pub unsafe extern "C" fn fx_map_from_callback(
    callback: Option<extern "C" fn(user: *mut c_void, x: f64, out: *mut f64) -> i32>,
    user: *mut c_void,
    lo: f64,
    hi: f64,
    label: *const c_char,
    out: *mut *mut FxMap,
) -> FxStatus {
    guard(|| {
        let f = callback.ok_or_else(|| Fail(FxStatus::NullPointer, "callback is null".into()))?;
        let label = if label.is_null() {
            "callback"
        } else {
            text(label, "label")?
        };
        let cb = Callback { f, user };
        let func = RealFn::new(label, move |x| cb.call(x));
        put(out, FxMap(SelfMap::new(func, Domain::interval(lo, hi)?)))
    })
}

#[no_mangle]
pub unsafe extern "C" fn fx_map_eval(map: *const FxMap, x: f64, out: *mut f64) -> FxStatus {
    guard(|| {
        let m = get(map, "map")?;
        let v =
            m.0.eval(x)
                .map_err(|e| Fail(FxStatus::Eval, e.to_string()))?;
        write(out, v)
    })
}

#[no_mangle]
pub unsafe extern "C" fn fx_map_free(map: *mut FxMap) {
    free(map)
}

/// Comparison function from `linear(c)`, `ex32phi`, or an expression in `x`.
#[no_mangle]
pub unsafe extern "C" fn fx_phi_new(spec: *const c_char, out: *mut *mut FxPhi) -> FxStatus {
    guard(|| put(out, FxPhi(resolve_phi(text(spec, "spec")?)?)))
}

/// `r -> (a + b) r`, for `a, b` in `(0, 1)` with `a + b < 1`.
#[no_mangle]
pub unsafe extern "C" fn fx_phi_convex(a: f64, b: f64, out: *mut *mut FxPhi) -> FxStatus {
    guard(|| put(out, FxPhi(convex_to_comparison(a, b)?)))
}

#[no_mangle]
pub unsafe extern "C" fn fx_phi_eval(phi: *const FxPhi, r: f64, out: *mut f64) -> FxStatus {
    guard(|| {
        let p = get(phi, "phi")?;
        let v =
            p.0.eval(r)
                .map_err(|e| Fail(FxStatus::Eval, e.to_string()))?;
        write(out, v)
    })
}

#[no_mangle]
pub unsafe extern "C" fn fx_phi_free(phi: *mut FxPhi) {
    free(phi)
}

#[no_mangle]
pub unsafe extern "C" fn fx_certify_m_step(
    space: *const FxSpace,
    map: *const FxMap,
    phi: *const FxPhi,
    m: usize,
    sampling: FxSampler,
    tol: FxTolerance,
    out: *mut *mut FxCertificate,
) -> FxStatus {
    guard(|| {
        let cert = certify_m_step(
            &get(space, "space")?.0,
            &get(map, "map")?.0,
            &get(phi, "phi")?.0,
            m,
            &sampler(sampling)?,
            tolerance(tol),
        )?;
        put(out, FxCertificate(cert))
    })
}

#[no_mangle]
pub unsafe extern "C" fn fx_certify_convex(
    space: *const FxSpace,
    map: *const FxMap,
    a: f64,
    b: f64,
    sampling: FxSampler,
    tol: FxTolerance,
    out: *mut *mut FxCertificate,
) -> FxStatus {
    guard(|| {
        let cert = certify_convex_contraction(
            &get(space, "space")?.0,
            &get(map, "map")?.0,
            a,
            b,
            &sampler(sampling)?,
            tolerance(tol),
        )?;
        put(out, FxCertificate(cert))
    })
}

#[no_mangle]
pub unsafe extern "C" fn fx_certificate_status(
    cert: *const FxCertificate,
    out: *mut FxCertStatus,
) -> FxStatus {
    guard(|| {
        let status = match get(cert, "certificate")?.0.status {
            CertStatus::CertifiedOnSamples => FxCertStatus::CertifiedOnSamples,
            CertStatus::CertifiedExhaustive => FxCertStatus::CertifiedExhaustive,
            CertStatus::Refuted => FxCertStatus::Refuted,
        };
        write(out, status)
    })
}

/// Returns 0 for a null certificate.
#[no_mangle]
pub unsafe extern "C" fn fx_certificate_pairs_tested(cert: *const FxCertificate) -> u64 {
    cert.as_ref().map_or(0, |c| c.0.pairs_tested)
}

/// Returns 0 for a null certificate.
#[no_mangle]
pub unsafe extern "C" fn fx_certificate_violations_found(cert: *const FxCertificate) -> u64 {
    cert.as_ref().map_or(0, |c| c.0.violations_found)
}

/// Number of retained worst violations (at most 32).
#[no_mangle]
pub unsafe extern "C" fn fx_certificate_worst_len(cert: *const FxCertificate) -> usize {
    cert.as_ref().map_or(0, |c| c.0.worst.len())
}

/// The `index`-th worst violation, largest margin first.
#[no_mangle]
pub unsafe extern "C" fn fx_certificate_worst(
    cert: *const FxCertificate,
    index: usize,
    out: *mut FxViolation,
) -> FxStatus {
    guard(|| {
        let c = get(cert, "certificate")?;
        let v = c.0.worst.get(index).ok_or_else(|| {
            Fail(
                FxStatus::InvalidParameter,
                format!(
                    "violation index {index} out of range ({} retained)",
                    c.0.worst.len()
                ),
            )
        })?;
        write(
            out,
            FxViolation {
                x: v.x,
                y: v.y,
                lhs: v.lhs,
                rhs: v.rhs,
                margin: v.margin,
            },
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn fx_certificate_free(cert: *mut FxCertificate) {
    free(cert)
}

/// Picard iteration from `x0`; `m` is the window for the recorded maxima.
#[no_mangle]
pub unsafe extern "C" fn fx_picard(
    space: *const FxSpace,
    map: *const FxMap,
    x0: f64,
    step_tol: f64,
    max_iters: usize,
    escape_bound: f64,
    m: usize,
    out: *mut *mut FxTrace,
) -> FxStatus {
    guard(|| {
        let stop = StopCriteria::new(step_tol, max_iters, escape_bound)?;
        let trace = picard_iterate(&get(space, "space")?.0, &get(map, "map")?.0, x0, &stop, m)?;
        put(out, FxTrace(trace))
    })
}

/// Number of iterates, including `x0`. Returns 0 for a null trace.
#[no_mangle]
pub unsafe extern "C" fn fx_trace_len(trace: *const FxTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.0.iterates.len())
}

#[no_mangle]
pub unsafe extern "C" fn fx_trace_iterate(
    trace: *const FxTrace,
    index: usize,
    out: *mut f64,
) -> FxStatus {
    guard(|| {
        let t = get(trace, "trace")?;
        let v = *t.0.iterates.get(index).ok_or_else(|| {
            Fail(
                FxStatus::InvalidParameter,
                format!(
                    "iterate index {index} out of range ({} iterates)",
                    t.0.iterates.len()
                ),
            )
        })?;
        write(out, v)
    })
}

/// The final iterate. Returns NaN for a null trace.
#[no_mangle]
pub unsafe extern "C" fn fx_trace_estimate(trace: *const FxTrace) -> f64 {
    trace.as_ref().map_or(f64::NAN, |t| t.0.estimate())
}

#[no_mangle]
pub unsafe extern "C" fn fx_trace_stop_reason(
    trace: *const FxTrace,
    out: *mut FxStopReason,
) -> FxStatus {
    guard(|| {
        let reason = match get(trace, "trace")?.0.stop_reason {
            StopReason::StepConverged => FxStopReason::StepConverged,
            StopReason::MaxIters => FxStopReason::MaxIters,
            StopReason::Escaped => FxStopReason::Escaped,
            StopReason::ExactFixedPoint => FxStopReason::ExactFixedPoint,
        };
        write(out, reason)
    })
}

/// Writes the trace as CSV (`n,x,step,residual,window_max`).
#[no_mangle]
pub unsafe extern "C" fn fx_trace_write_csv(
    trace: *const FxTrace,
    path: *const c_char,
) -> FxStatus {
    guard(|| {
        let t = get(trace, "trace")?;
        Ok(write_trace_csv(&t.0, Path::new(text(path, "path")?))?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn fx_trace_free(trace: *mut FxTrace) {
    free(trace)
}

/// Classifies the tail of `trace`. The limit used is `alpha_hat` when
/// `use_alpha_hat` is true, else the final iterate.
#[no_mangle]
pub unsafe extern "C" fn fx_estimate_rate(
    space: *const FxSpace,
    trace: *const FxTrace,
    alpha_hat: f64,
    use_alpha_hat: bool,
    out: *mut FxRate,
) -> FxStatus {
    guard(|| {
        let alpha = use_alpha_hat.then_some(alpha_hat);
        let rate = estimate_rate(&get(space, "space")?.0, &get(trace, "trace")?.0, alpha)?;
        let rate = match rate {
            RateReport::Geometric { ratio } => FxRate {
                kind: FxRateKind::Geometric,
                value: ratio,
            },
            RateReport::Sublinear { product } => FxRate {
                kind: FxRateKind::Sublinear,
                value: product,
            },
            RateReport::ConvergedExact => FxRate {
                kind: FxRateKind::ConvergedExact,
                value: 0.0,
            },
            RateReport::Inconclusive => FxRate {
                kind: FxRateKind::Inconclusive,
                value: 0.0,
            },
        };
        write(out, rate)
    })
}

/// Checks the b-metric axioms on the sampler's points; `*passed` receives
/// the verdict.
#[no_mangle]
pub unsafe extern "C" fn fx_verify_metric(
    space: *const FxSpace,
    sampling: FxSampler,
    tol: FxTolerance,
    passed: *mut bool,
) -> FxStatus {
    guard(|| {
        let rep = verify_axioms(&get(space, "space")?.0, &sampler(sampling)?, tolerance(tol))?;
        write(passed, rep.passed)
    })
}

/// Largest sampled `d(x, y) / (d(x, z) + d(z, y))`, at least 1. The
/// space's own `s` is ignored.
#[no_mangle]
pub unsafe extern "C" fn fx_min_b_constant(
    space: *const FxSpace,
    sampling: FxSampler,
    out: *mut f64,
) -> FxStatus {
    guard(|| {
        let sp = get(space, "space")?;
        write(
            out,
            min_b_constant(&sp.0.domain, &sp.0.distance, &sampler(sampling)?)?,
        )
    })
}
