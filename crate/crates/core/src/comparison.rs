//! Comparison functions: increasing maps of `[0, inf)` whose iterates decay
//! to zero at every radius.
//!
//! "Increasing" is read non-strictly; the Example 3.2 style function that is
//! constant above 1/2 is accepted.

use crate::error::{Error, EvalError, Result};
use crate::format::fmt_real;
use crate::func::RealFn;
use crate::tol::Tolerance;

#[derive(Debug, Clone)]
pub struct ComparisonFunction {
    func: RealFn,
}

impl ComparisonFunction {
    pub fn new(func: RealFn) -> Self {
        Self { func }
    }

    /// `r -> c * r` with `c` in `(0, 1)`.
    pub fn linear(c: f64) -> Result<Self> {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "linear(c) needs c in (0, 1), got {}",
                fmt_real(c)
            )));
        }
        let expr = crate::expr::parse(&format!("{} * x", fmt_real(c)), crate::expr::Arity::One)
            .expect("linear comparison source is well formed");
        let func =
            RealFn::new(format!("linear({})", fmt_real(c)), move |r| Ok(c * r)).with_expr(expr);
        Ok(Self { func })
    }

    pub fn label(&self) -> &str {
        self.func.label()
    }

    pub fn func(&self) -> &RealFn {
        &self.func
    }

    pub fn eval(&self, r: f64) -> Result<f64, EvalError> {
        self.func.eval(r)
    }

    fn at(&self, r: f64) -> Result<f64> {
        self.eval(r).map_err(|e| Error::eval_at1(r, e))
    }
}

/// `phi^[k](r)`, evaluated as a left fold. `k = 0` returns `r`.
pub fn iterate_phi(phi: &ComparisonFunction, r: f64, k: usize) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "comparison functions act on r >= 0, got {r}"
        )));
    }
    let mut v = r;
    for _ in 0..k {
        v = phi.at(v)?;
    }
    Ok(v)
}

/// The `r -> (a + b) r` comparison function attached to a convex contraction
/// with coefficients `a, b in (0, 1)`, `a + b < 1`.
pub fn convex_to_comparison(a: f64, b: f64) -> Result<ComparisonFunction> {
    check_convex_coefficients(a, b)?;
    let slope = a + b;
    let label = format!("convex(a={}, b={})", fmt_real(a), fmt_real(b));
    Ok(ComparisonFunction {
        func: RealFn::new(label, move |r| Ok(slope * r)),
    })
}

pub(crate) fn check_convex_coefficients(a: f64, b: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "convex contraction needs a in (0, 1), got {}",
            fmt_real(a)
        )));
    }
    if !(b > 0.0 && b < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "convex contraction needs b in (0, 1), got {}",
            fmt_real(b)
        )));
    }
    if !(a + b < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "convex contraction needs a + b < 1, got {} + {}",
            fmt_real(a),
            fmt_real(b)
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum PhiLaw {
    Monotone,
    Decay,
    Subidentity,
}

impl PhiLaw {
    pub fn id(self) -> &'static str {
        match self {
            PhiLaw::Monotone => "monotone",
            PhiLaw::Decay => "decay",
            PhiLaw::Subidentity => "subidentity",
        }
    }
}

/// A failed law instance. Monotone: inputs `(r_i, r_{i+1})`, values
/// `(phi(r_i), phi(r_{i+1}))`. Decay: input `r`, value `phi^[K](r)`.
/// Subidentity: input `r`, value `phi(r)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiWitness {
    pub law: PhiLaw,
    pub inputs: Vec<f64>,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhiReport {
    pub monotone_ok: bool,
    pub decay_ok: bool,
    pub subidentity_ok: bool,
    pub witnesses: Vec<PhiWitness>,
    /// `(r, phi^[K](r))` for every grid radius.
    pub decay_values: Vec<(f64, f64)>,
}

impl PhiReport {
    pub fn passed(&self) -> bool {
        self.monotone_ok && self.decay_ok && self.subidentity_ok
    }
}

/// Check settings for [`verify_comparison`].
#[derive(Debug, Clone, PartialEq)]
pub struct PhiCheck {
    pub radii: Vec<f64>,
    pub iters: usize,
    pub decay_tol: f64,
    pub tol: Tolerance,
}

impl Default for PhiCheck {
    fn default() -> Self {
        Self {
            radii: default_radii(),
            iters: 256,
            decay_tol: 1e-9,
            tol: Tolerance::default(),
        }
    }
}

/// `0` followed by 61 log-spaced radii over `[1e-6, 1e3]`.
pub fn default_radii() -> Vec<f64> {
    let mut radii = vec![0.0];
    radii.extend((0..61).map(|i| 10f64.powf(-6.0 + 9.0 * i as f64 / 60.0)));
    radii
}

/// Empirical check of the comparison-function laws on a radius grid.
///
/// Monotonicity is checked between adjacent radii (non-strict, with slack),
/// decay as `phi^[K](r) <= decay_tol`, and the subidentity consequence as
/// `phi(0) <= tol_abs` and strict `phi(r) < r` for `r > 0`.
pub fn verify_comparison(phi: &ComparisonFunction, check: &PhiCheck) -> Result<PhiReport> {
    let radii = &check.radii;
    if radii.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
        return Err(Error::InvalidParameter(
            "radii must be finite and >= 0".into(),
        ));
    }
    if radii.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter(
            "radii must be sorted ascending".into(),
        ));
    }
    let values: Vec<f64> = radii.iter().map(|&r| phi.at(r)).collect::<Result<_>>()?;
    let mut witnesses = Vec::new();

    let mut monotone_ok = true;
    for (w, v) in radii.windows(2).zip(values.windows(2)) {
        if !check.tol.le(v[0], v[1]) {
            monotone_ok = false;
            witnesses.push(PhiWitness {
                law: PhiLaw::Monotone,
                inputs: w.to_vec(),
                values: v.to_vec(),
            });
        }
    }

    let mut subidentity_ok = true;
    for (&r, &v) in radii.iter().zip(&values) {
        let ok = if r == 0.0 { v <= check.tol.abs } else { v < r };
        if !ok {
            subidentity_ok = false;
            witnesses.push(PhiWitness {
                law: PhiLaw::Subidentity,
                inputs: vec![r],
                values: vec![v],
            });
        }
    }

    let mut decay_ok = true;
    let mut decay_values = Vec::with_capacity(radii.len());
    for &r in radii {
        let v = iterate_phi(phi, r, check.iters)?;
        decay_values.push((r, v));
        if !(v <= check.decay_tol) {
            decay_ok = false;
            witnesses.push(PhiWitness {
                law: PhiLaw::Decay,
                inputs: vec![r],
                values: vec![v],
            });
        }
    }

    Ok(PhiReport {
        monotone_ok,
        decay_ok,
        subidentity_ok,
        witnesses,
        decay_values,
    })
}
