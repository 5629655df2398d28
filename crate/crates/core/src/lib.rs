//! Fixed-point laboratory for b-metric spaces.
//!
//! Certifies the m-step window contraction condition
//! `d(f^m x, f^m y) <= phi(max_{i<m} d(f^i x, f^i y))` for a comparison
//! function `phi` on sampled pairs, checks b-metric axioms and
//! comparison-function laws, and runs Picard iteration with window
//! diagnostics and rate classification.
//!
//! Maps, metrics and comparison functions are given either as builtins
//! (see [`builtin::builtin_lookup`]) or as expressions (see [`expr`]).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod builtin;
pub mod certify;
pub mod cli;
pub mod comparison;
pub mod error;
pub mod expr;
pub mod format;
pub mod func;
pub mod reproduce;
pub mod sampling;
pub mod solve;
pub mod space;
pub mod tol;
mod topk;

pub use builtin::{builtin_lookup, resolve_map, resolve_metric, resolve_phi, Builtin};
pub use certify::{
    certify_convex_contraction, certify_m_step, monotone_m_check, orbit, window_max, CertStatus,
    Certificate, Condition, MonotoneReport, SelfMap, Violation,
};
pub use comparison::{
    convex_to_comparison, iterate_phi, verify_comparison, ComparisonFunction, PhiCheck, PhiReport,
};
pub use error::{Error, EvalError, Result};
pub use expr::{parse, Arity, Expr, ParseError};
pub use sampling::{PairSampler, SplitMix64};
pub use solve::{estimate_rate, picard_iterate, PicardTrace, RateReport, StopCriteria, StopReason};
pub use space::{
    chained_bound, min_b_constant, verify_axioms, AxiomReport, BMetricSpace, Distance, Domain,
};
pub use tol::Tolerance;
