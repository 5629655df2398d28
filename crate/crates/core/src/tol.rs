/// Absolute plus relative slack for floating-point inequality checks.
///
/// A check `lhs <= rhs` holds when `lhs <= rhs + abs + rel * max(|lhs|, |rhs|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const EXACT: Tolerance = Tolerance { abs: 0.0, rel: 0.0 };

    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub fn slack(&self, lhs: f64, rhs: f64) -> f64 {
        self.abs + self.rel * lhs.abs().max(rhs.abs())
    }

    pub fn le(&self, lhs: f64, rhs: f64) -> bool {
        lhs <= rhs + self.slack(lhs, rhs)
    }

    pub fn eq(&self, lhs: f64, rhs: f64) -> bool {
        (lhs - rhs).abs() <= self.slack(lhs, rhs)
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-9,
        }
    }
}
