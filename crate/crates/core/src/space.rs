//! b-metric spaces over real intervals and finite point sets.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, EvalError, Result};
use crate::func::RealFn2;
use crate::sampling::PairSampler;
use crate::tol::Tolerance;
use crate::topk;

/// Witness lists are capped at this many entries.
pub const WITNESS_CAP: usize = 32;

/// The underlying point set.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Interval {
        lo: f64,
        hi: f64,
    },
    /// Sorted, distinct points.
    Finite(Vec<f64>),
}

impl Domain {
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidParameter(format!(
                "interval domain needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Domain::Interval { lo, hi })
    }

    pub fn finite(mut points: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidParameter("finite domain is empty".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter(
                "finite domain contains a non-finite point".into(),
            ));
        }
        points.sort_by(f64::total_cmp);
        if points.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter(
                "finite domain contains duplicate points".into(),
            ));
        }
        Ok(Domain::Finite(points))
    }

    pub fn contains(&self, x: f64) -> bool {
        match self {
            Domain::Interval { lo, hi } => *lo <= x && x <= *hi,
            Domain::Finite(pts) => pts.binary_search_by(|p| p.total_cmp(&x)).is_ok(),
        }
    }

    pub fn is_finite_set(&self) -> bool {
        matches!(self, Domain::Finite(_))
    }
}

/// A distance evaluator `d(x, y)`.
#[derive(Debug, Clone)]
pub struct Distance {
    func: RealFn2,
    suggested_s: Option<f64>,
}

impl Distance {
    pub fn new(func: RealFn2) -> Self {
        Self {
            func,
            suggested_s: None,
        }
    }

    pub(crate) fn with_suggested_s(mut self, s: f64) -> Self {
        self.suggested_s = Some(s);
        self
    }

    pub fn label(&self) -> &str {
        self.func.label()
    }

    pub fn func(&self) -> &RealFn2 {
        &self.func
    }

    /// Relaxation constant known to suffice for this family, if any.
    pub fn suggested_s(&self) -> Option<f64> {
        self.suggested_s
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        let v = self.func.eval(x, y)?;
        if v < 0.0 {
            return Err(EvalError::NegativeDistance {
                label: self.label().to_string(),
                value: v,
            });
        }
        Ok(v)
    }

    /// Evaluates with the point pair attached to any error.
    pub fn at(&self, x: f64, y: f64) -> Result<f64> {
        self.eval(x, y).map_err(|e| Error::eval_at2(x, y, e))
    }
}

#[derive(Debug, Clone)]
pub struct BMetricSpace {
    pub domain: Domain,
    pub distance: Distance,
    pub s: f64,
}

impl BMetricSpace {
    pub fn new(domain: Domain, distance: Distance, s: f64) -> Result<Self> {
        if !(s.is_finite() && s >= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "relaxation constant s must be finite and >= 1, got {s}"
            )));
        }
        Ok(Self {
            domain,
            distance,
            s,
        })
    }

    pub fn dist(&self, x: f64, y: f64) -> Result<f64> {
        self.distance.at(x, y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Axiom {
    /// `d(x, x) = 0`
    Identity,
    /// `d(x, y) > 0` for `x != y`
    Separation,
    /// `d(x, y) = d(y, x)`
    Symmetry,
    /// `d(x, y) <= s (d(x, z) + d(z, y))`
    RelaxedTriangle,
}

impl Axiom {
    pub fn id(self) -> &'static str {
        match self {
            Axiom::Identity => "identity",
            Axiom::Separation => "separation",
            Axiom::Symmetry => "symmetry",
            Axiom::RelaxedTriangle => "relaxed-triangle",
        }
    }
}

/// One failed axiom instance.
///
/// For the relaxed triangle the points are listed in chain order `(x, z, y)`,
/// `lhs = d(x, y)` and `rhs = s (d(x, z) + d(z, y))`. Separation failures
/// report `lhs = tol_abs` against `rhs = d(x, y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomWitness {
    pub axiom: Axiom,
    pub points: Vec<f64>,
    pub lhs: f64,
    pub rhs: f64,
}

impl AxiomWitness {
    pub fn magnitude(&self) -> f64 {
        match self.axiom {
            Axiom::Symmetry => (self.lhs - self.rhs).abs(),
            _ => self.lhs - self.rhs,
        }
    }

    fn order(a: &Self, b: &Self) -> Ordering {
        b.magnitude()
            .total_cmp(&a.magnitude())
            .then_with(|| topk::cmp_slices(&a.points, &b.points))
            .then_with(|| a.axiom.cmp(&b.axiom))
    }

    fn same(a: &Self, b: &Self) -> bool {
        a.axiom == b.axiom && topk::cmp_slices(&a.points, &b.points).is_eq()
    }
}

/// Whether a passing report covers every point of the space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Evidence {
    /// Sampled evidence, not proof.
    Sampled,
    Exhaustive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport {
    pub passed: bool,
    pub evidence: Evidence,
    pub samples_tested: u64,
    pub failures: u64,
    pub witnesses: Vec<AxiomWitness>,
}

#[derive(Default)]
struct Tally {
    tested: u64,
    failures: u64,
    witnesses: Vec<AxiomWitness>,
}

impl Tally {
    fn check(&mut self, ok: bool, axiom: Axiom, points: &[f64], lhs: f64, rhs: f64) {
        self.tested += 1;
        if !ok {
            self.failures += 1;
            self.witnesses.push(AxiomWitness {
                axiom,
                points: points.to_vec(),
                lhs,
                rhs,
            });
            if self.witnesses.len() >= 4 * WITNESS_CAP {
                self.compact();
            }
        }
    }

    fn compact(&mut self) {
        topk::compact(
            &mut self.witnesses,
            WITNESS_CAP,
            AxiomWitness::order,
            AxiomWitness::same,
        );
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.tested += other.tested;
        self.failures += other.failures;
        self.witnesses.extend(other.witnesses);
        self.compact();
        self
    }
}

fn distance_matrix(distance: &Distance, pts: &[f64]) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Result<Vec<f64>>> = pts
        .par_iter()
        .map(|&x| pts.iter().map(|&y| distance.at(x, y)).collect())
        .collect();
    rows.into_iter().collect()
}

/// Checks the b-metric axioms on the sampler's points.
///
/// Grid points (or every point of a finite domain) are checked as singletons,
/// all pairs and all chain triples; random triples add one instance of each
/// axiom per draw. Non-finite or negative distances abort with the pair.
pub fn verify_axioms(
    space: &BMetricSpace,
    sampler: &PairSampler,
    tol: Tolerance,
) -> Result<AxiomReport> {
    let s = space.s;
    let pts = sampler.grid(&space.domain);
    let d = distance_matrix(&space.distance, &pts)?;
    let n = pts.len();

    let mut tally = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut t = Tally::default();
            let x = pts[i];
            t.check(tol.le(d[i][i], 0.0), Axiom::Identity, &[x], d[i][i], 0.0);
            for j in i + 1..n {
                let y = pts[j];
                let dxy = d[i][j];
                t.check(dxy > tol.abs, Axiom::Separation, &[x, y], tol.abs, dxy);
                t.check(tol.eq(dxy, d[j][i]), Axiom::Symmetry, &[x, y], dxy, d[j][i]);
                for k in 0..n {
                    if k == i || k == j {
                        continue;
                    }
                    let rhs = s * (d[i][k] + d[k][j]);
                    t.check(
                        tol.le(dxy, rhs),
                        Axiom::RelaxedTriangle,
                        &[x, pts[k], y],
                        dxy,
                        rhs,
                    );
                }
            }
            t.compact();
            t
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold(Tally::default(), Tally::merge);

    let triples = sampler.random_triples(&space.domain);
    let rows: Vec<Result<Tally>> = triples
        .par_chunks(1024)
        .map(|chunk| {
            let mut t = Tally::default();
            for &[x, y, z] in chunk {
                let dxx = space.dist(x, x)?;
                let dxy = space.dist(x, y)?;
                let dyx = space.dist(y, x)?;
                let dxz = space.dist(x, z)?;
                let dzy = space.dist(z, y)?;
                t.check(tol.le(dxx, 0.0), Axiom::Identity, &[x], dxx, 0.0);
                if x != y {
                    t.check(dxy > tol.abs, Axiom::Separation, &[x, y], tol.abs, dxy);
                }
                t.check(tol.eq(dxy, dyx), Axiom::Symmetry, &[x, y], dxy, dyx);
                let rhs = s * (dxz + dzy);
                t.check(
                    tol.le(dxy, rhs),
                    Axiom::RelaxedTriangle,
                    &[x, z, y],
                    dxy,
                    rhs,
                );
            }
            t.compact();
            Ok(t)
        })
        .collect();
    for r in rows {
        tally = tally.merge(r?);
    }

    Ok(AxiomReport {
        passed: tally.witnesses.is_empty(),
        evidence: if space.domain.is_finite_set() {
            Evidence::Exhaustive
        } else {
            Evidence::Sampled
        },
        samples_tested: tally.tested,
        failures: tally.failures,
        witnesses: tally.witnesses,
    })
}

/// Largest observed `d(x, y) / (d(x, z) + d(z, y))` over the sampler's
/// triples, clamped below at 1 and rounded to 12 significant digits so
/// that rounding noise in the distances does not show up as excess over
/// the true ratio. Returns 1 when no triple has a positive denominator.
pub fn min_b_constant(domain: &Domain, distance: &Distance, sampler: &PairSampler) -> Result<f64> {
    let pts = sampler.grid(domain);
    let d = distance_matrix(distance, &pts)?;
    let n = pts.len();
    let ratio = |num: f64, den: f64| if den > 0.0 { num / den } else { 1.0 };

    let grid_max = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut best = 1.0f64;
            for j in i + 1..n {
                for k in 0..n {
                    if k != i && k != j {
                        best = best.max(ratio(d[i][j], d[i][k] + d[k][j]));
                    }
                }
            }
            best
        })
        .reduce(|| 1.0, f64::max);

    let mut best = grid_max;
    for [x, y, z] in PairSampler::random_triples(sampler, domain) {
        let num = distance.at(x, y)?;
        let den = distance.at(x, z)? + distance.at(z, y)?;
        best = best.max(ratio(num, den));
    }
    Ok(format!("{best:.11e}")
        .parse()
        .expect("formatted float re-parses"))
}

/// `sum_{i=1..p} s^i * step_dists[i-1]`: the weighted chain bound on
/// `d(x_0, x_p)` for a chain with the given consecutive distances.
pub fn chained_bound(step_dists: &[f64], s: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 1.0) {
        return Err(Error::InvalidParameter(format!("s must be >= 1, got {s}")));
    }
    if let Some(bad) = step_dists.iter().find(|d| !(**d >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "chain distances must be non-negative, got {bad}"
        )));
    }
    let mut weight = 1.0;
    let mut total = 0.0;
    for d in step_dists {
        weight *= s;
        total += weight * d;
    }
    Ok(total)
}
