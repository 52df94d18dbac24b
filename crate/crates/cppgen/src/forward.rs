//! Forward construction of the conditioned sample genealogy, used as a
//! ground-truth oracle against the exact sampler.
//!
//! The extant population at time `t` is generated at the population level:
//! node depths are i.i.d. with `P(H <= u) = Nu/(1+Nu)`, drawn until the first
//! one exceeds `t`; the population size is the total number of draws.
//! Individuals are then sampled through i.i.d. geometric gaps with success
//! probability `p/N`, the whole attempt is rejected unless exactly `n`
//! sampled individuals fall inside the population, and the sample's node
//! depths are block maxima of the population depths between consecutive
//! sampled labels.

use crate::model::{ExtendedReal, Genealogy};
use crate::rng::{open01, Stream};
use crate::{Error, Result};

/// Hard cap on population draws per attempt.
const DRAW_CAP: u64 = 1_000_000_000;

/// Default rejection budget for [`sample_conditioned_genealogy`].
pub const DEFAULT_MAX_ATTEMPTS: u64 = 10_000_000;

/// Coalescent point process of a whole extant population.
#[derive(Debug, Clone)]
pub struct PopulationCpp {
    /// Sub-threshold node depths; `depths[q]` separates individuals `q + 1`
    /// and `q + 2` (1-based labels), so there are `pop_size - 1` of them.
    pub depths: Vec<f64>,
    /// Number of extant individuals: the index of the first draw above `t`.
    pub pop_size: u64,
}

/// Labels of the sampled individuals, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleIndices {
    pub indices: Vec<u64>,
}

/// Rejection telemetry for the conditioned-sampling loop.
#[derive(Debug, Clone, Copy, Default)]
pub struct AcceptanceStats {
    pub attempts: u64,
    pub accepted: u64,
}

impl AcceptanceStats {
    pub fn rate(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempts as f64
        }
    }

    pub fn merge(&mut self, other: &AcceptanceStats) {
        self.attempts += other.attempts;
        self.accepted += other.accepted;
    }
}

/// Draws the population coalescent point process at time horizon `t`:
/// repeated draws of `H = U/(N(1-U))` stopped at the first one exceeding `t`.
pub fn simulate_population_cpp(pop_rate: f64, t: f64, rng: &mut Stream) -> Result<PopulationCpp> {
    if !(pop_rate.is_finite() && pop_rate > 0.0) {
        return Err(Error::Domain(format!("population rate must be positive, got {pop_rate}")));
    }
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("time horizon must be positive, got {t}")));
    }
    let mut depths = Vec::new();
    let mut draws = 0u64;
    loop {
        draws += 1;
        if draws > DRAW_CAP {
            return Err(Error::DrawCapExceeded { cap: DRAW_CAP });
        }
        let u = open01(rng);
        let h = u / (pop_rate * (1.0 - u));
        if h > t {
            return Ok(PopulationCpp { depths, pop_size: draws });
        }
        depths.push(h);
    }
}

/// Geometric variate on `{1, 2, ...}` with success probability `q`, by
/// inversion `ceil(ln U / ln(1 - q))`.
fn geometric(q: f64, rng: &mut Stream) -> u64 {
    let u = open01(rng);
    let g = (u.ln() / (-q).ln_1p()).ceil();
    if g < 1.0 {
        1
    } else {
        g as u64
    }
}

/// Draws the first `count` sampling labels `I_1 < I_2 < ...` as cumulative
/// geometric gaps with success probability `p / pop_rate`.
pub fn draw_sample_indices(
    p: f64,
    pop_rate: f64,
    count: usize,
    rng: &mut Stream,
) -> Result<SampleIndices> {
    if !(p > 0.0 && p < pop_rate) {
        return Err(Error::Domain(format!(
            "sampling probability p/N must lie in (0, 1), got p = {p}, N = {pop_rate}"
        )));
    }
    let q = p / pop_rate;
    let mut indices = Vec::with_capacity(count);
    let mut cursor = 0u64;
    for _ in 0..count {
        cursor += geometric(q, rng);
        indices.push(cursor);
    }
    Ok(SampleIndices { indices })
}

/// Samples one genealogy of an `n`-sample conditioned on the sample size, by
/// rejection: population and labels are redrawn until
/// `I_n <= pop_size < I_{n+1}`, and the accepted attempt yields
/// `H*_j = max` of the population depths between labels `I_j` and `I_{j+1}`.
pub fn sample_conditioned_genealogy(
    pop_rate: f64,
    p: f64,
    t: f64,
    n: u64,
    rng: &mut Stream,
    max_attempts: u64,
) -> Result<(Genealogy, AcceptanceStats)> {
    if n < 2 {
        return Err(Error::Domain(format!("sample size must be at least 2, got {n}")));
    }
    let mut stats = AcceptanceStats::default();
    while stats.attempts < max_attempts {
        stats.attempts += 1;
        let population = simulate_population_cpp(pop_rate, t, rng)?;
        let labels = draw_sample_indices(p, pop_rate, n as usize + 1, rng)?;
        let i_n = labels.indices[n as usize - 1];
        let i_next = labels.indices[n as usize];
        if i_n <= population.pop_size && population.pop_size < i_next {
            stats.accepted += 1;
            let depths = block_maxima(&population.depths, &labels.indices[..n as usize]);
            let genealogy = Genealogy::new(ExtendedReal::Finite(t), depths)?;
            return Ok((genealogy, stats));
        }
    }
    Err(Error::AttemptsExhausted { attempts: stats.attempts, acceptance_rate: stats.rate() })
}

/// `H*_j = max{ depths between labels I_j and I_{j+1} }` for `j = 1..n-1`.
///
/// With 1-based labels and `depths[q]` separating individuals `q+1` and
/// `q+2`, the block for `(I_j, I_{j+1})` is `depths[I_j - 1 .. I_{j+1} - 1]`.
fn block_maxima(depths: &[f64], labels: &[u64]) -> Vec<f64> {
    labels
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0] as usize - 1, w[1] as usize - 1);
            depths[lo..hi].iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        })
        .collect()
}

/// Pairwise divergence times of `n` individuals from the `n - 1` node depths
/// between consecutive individuals: `D[i][j] = max(depths[i..j])` for
/// `i < j`, extended symmetrically with zero diagonal.
pub fn divergence_matrix(depths: &[f64]) -> Vec<Vec<f64>> {
    let n = depths.len() + 1;
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut running = 0.0f64;
        for j in (i + 1)..n {
            running = running.max(depths[j - 1]);
            d[i][j] = running;
            d[j][i] = running;
        }
    }
    d
}
