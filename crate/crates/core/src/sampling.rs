//! Deterministic point and pair generation.

use crate::error::{Error, Result};
use crate::space::Domain;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 stream. The seed is the initial state.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of resolution.
    pub fn next_unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn next_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_unit()
    }
}

/// Which points and pairs (or triples) a verification looks at.
///
/// For interval domains: a uniform grid of `grid_points` (endpoints
/// included) plus `random_pairs` draws from a SplitMix64 stream seeded with
/// `seed`. Axiom verification reads `random_pairs` as a number of random
/// triples. Finite domains ignore all three fields and are enumerated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairSampler {
    pub grid_points: usize,
    pub random_pairs: usize,
    pub seed: u64,
}

impl PairSampler {
    pub fn new(grid_points: usize, random_pairs: usize, seed: u64) -> Result<Self> {
        if grid_points < 2 && random_pairs == 0 {
            return Err(Error::InvalidParameter(
                "sampler needs grid_points >= 2 or random_pairs >= 1".into(),
            ));
        }
        Ok(Self {
            grid_points,
            random_pairs,
            seed,
        })
    }

    /// Grid of 2001 points, 10^5 random pairs, seed 0.
    pub fn standard() -> Self {
        Self {
            grid_points: 2001,
            random_pairs: 100_000,
            seed: 0,
        }
    }

    /// Grid points over the domain, sorted ascending. Finite domains return
    /// their full point set.
    pub fn grid(&self, domain: &Domain) -> Vec<f64> {
        match domain {
            Domain::Finite(points) => points.clone(),
            Domain::Interval { lo, hi } => uniform_grid(*lo, *hi, self.grid_points),
        }
    }

    /// Random pairs, each canonicalized to `x <= y`. Empty for finite domains.
    pub fn random_pairs(&self, domain: &Domain) -> Vec<(f64, f64)> {
        let Domain::Interval { lo, hi } = *domain else {
            return Vec::new();
        };
        let mut rng = SplitMix64::new(self.seed);
        (0..self.random_pairs)
            .map(|_| {
                let a = rng.next_in(lo, hi);
                let b = rng.next_in(lo, hi);
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect()
    }

    /// Random triples `(x, y, z)` drawn in that order. Empty for finite domains.
    pub fn random_triples(&self, domain: &Domain) -> Vec<[f64; 3]> {
        let Domain::Interval { lo, hi } = *domain else {
            return Vec::new();
        };
        let mut rng = SplitMix64::new(self.seed);
        (0..self.random_pairs)
            .map(|_| {
                let x = rng.next_in(lo, hi);
                let y = rng.next_in(lo, hi);
                let z = rng.next_in(lo, hi);
                [x, y, z]
            })
            .collect()
    }
}

impl Default for PairSampler {
    fn default() -> Self {
        Self::standard()
    }
}

pub(crate) fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return Vec::new();
    }
    let last = (n - 1) as f64;
    let mut pts: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / last).collect();
    pts[n - 1] = hi;
    pts
}
