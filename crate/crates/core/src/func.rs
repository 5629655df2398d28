//! Callable real functions with a display label and, when text-defined,
//! the parsed expression behind them.

use std::fmt;
use std::sync::Arc;

use crate::error::EvalError;
use crate::expr::{parse, Arity, Expr};

pub type UnaryEval = dyn Fn(f64) -> Result<f64, EvalError> + Send + Sync;
pub type BinaryEval = dyn Fn(f64, f64) -> Result<f64, EvalError> + Send + Sync;

/// A function of one real variable.
#[derive(Clone)]
pub struct RealFn {
    label: String,
    expr: Option<Arc<Expr>>,
    eval: Arc<UnaryEval>,
}

impl RealFn {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> Result<f64, EvalError> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            expr: None,
            eval: Arc::new(f),
        }
    }

    /// Evaluates through the expression tree.
    pub fn from_expr(label: impl Into<String>, expr: Expr) -> Self {
        let expr = Arc::new(expr);
        let tree = Arc::clone(&expr);
        Self {
            label: label.into(),
            expr: Some(expr),
            eval: Arc::new(move |x| tree.eval(x, None)),
        }
    }

    /// Labels the function with the canonical form of `src`.
    pub fn parse(src: &str) -> Result<Self, crate::expr::ParseError> {
        let e = parse(src, Arity::One)?;
        Ok(Self::from_expr(e.to_string(), e))
    }

    /// Attaches the textual definition of a natively implemented function.
    pub(crate) fn with_expr(mut self, expr: Expr) -> Self {
        self.expr = Some(Arc::new(expr));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn expr(&self) -> Option<&Expr> {
        self.expr.as_deref()
    }

    /// Evaluates and rejects non-finite results.
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let v = (self.eval)(x)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite {
                node: self.label.clone(),
            })
        }
    }
}

impl fmt::Debug for RealFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFn")
            .field("label", &self.label)
            .finish()
    }
}

/// A function of two real variables, used for distances.
#[derive(Clone)]
pub struct RealFn2 {
    label: String,
    expr: Option<Arc<Expr>>,
    eval: Arc<BinaryEval>,
}

impl RealFn2 {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> Result<f64, EvalError> + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            expr: None,
            eval: Arc::new(f),
        }
    }

    pub fn from_expr(label: impl Into<String>, expr: Expr) -> Self {
        let expr = Arc::new(expr);
        let tree = Arc::clone(&expr);
        Self {
            label: label.into(),
            expr: Some(expr),
            eval: Arc::new(move |x, y| tree.eval(x, Some(y))),
        }
    }

    pub fn parse(src: &str) -> Result<Self, crate::expr::ParseError> {
        let e = parse(src, Arity::Two)?;
        Ok(Self::from_expr(e.to_string(), e))
    }

    pub(crate) fn with_expr(mut self, expr: Expr) -> Self {
        self.expr = Some(Arc::new(expr));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn expr(&self) -> Option<&Expr> {
        self.expr.as_deref()
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        let v = (self.eval)(x, y)?;
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite {
                node: self.label.clone(),
            })
        }
    }
}

impl fmt::Debug for RealFn2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RealFn2")
            .field("label", &self.label)
            .finish()
    }
}
