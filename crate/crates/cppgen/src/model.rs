//! Shared domain types: model parameters, origin conditions, genealogies,
//! site frequency spectra, and an extended real line for infinite moments.

use std::fmt;

use crate::{Error, Result};

/// A nonnegative real number or `+inf`.
///
/// Several expectations in this model are genuinely infinite (for example the
/// expected number of mutations of every carrier class under an infinite time
/// of origin), so infinity is a legitimate result rather than an error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinite,
}

impl ExtendedReal {
    pub fn finite(value: f64) -> Result<Self> {
        if value.is_finite() && value >= 0.0 {
            Ok(ExtendedReal::Finite(value))
        } else {
            Err(Error::Domain(format!(
                "finite extended real must be nonnegative and finite, got {value}"
            )))
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    /// The finite value, or `None` for `+inf`.
    pub fn value(&self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(*v),
            ExtendedReal::Infinite => None,
        }
    }

    /// The value as an `f64`, mapping `+inf` to `f64::INFINITY`.
    pub fn as_f64(&self) -> f64 {
        match self {
            ExtendedReal::Finite(v) => *v,
            ExtendedReal::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinite => write!(f, "inf"),
        }
    }
}

/// Condition on the time of origin of the population.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OriginCondition {
    /// The population was founded exactly `t` units of time ago.
    FixedTime(f64),
    /// The foundation time is pushed to the infinite past.
    InfiniteTime,
    /// Improper prior `x -> x^{-i}` on the foundation time; `i = 0` is the
    /// uniform prior and `i = 1` the log-uniform prior.
    PowerPrior(u64),
}

impl OriginCondition {
    /// Validates the condition against a sample size `n`.
    ///
    /// A power prior needs `i < n` for the posterior to normalize.
    pub fn validate(&self, n: u64) -> Result<()> {
        match *self {
            OriginCondition::FixedTime(t) => {
                if t.is_finite() && t > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "fixed origin time must be positive and finite, got {t}"
                    )))
                }
            }
            OriginCondition::InfiniteTime => Ok(()),
            OriginCondition::PowerPrior(i) => {
                if i < n {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "power prior exponent i = {i} must satisfy i < n = {n}"
                    )))
                }
            }
        }
    }
}

/// Model parameters shared across the samplers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Sample size.
    pub n: u64,
    /// Per-lineage sampling rate of the sample-level point process.
    pub p: f64,
    /// Per-lineage mutation rate.
    pub theta: f64,
    /// Birth-death rate of the underlying population, used by the forward
    /// oracle; only the ratio `p / pop_rate` (the per-individual sampling
    /// probability) matters there.
    pub pop_rate: f64,
    /// Constant of the large-sample regime, in which `p = n / alpha`.
    pub alpha: f64,
}

impl ModelParams {
    /// Validates and builds a parameter set.
    pub fn new(n: u64, p: f64, theta: f64, pop_rate: f64, alpha: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "sample size n must be at least 2, got {n}"
            )));
        }
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sampling rate p must be positive, got {p}"
            )));
        }
        if !(theta.is_finite() && theta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "mutation rate theta must be nonnegative, got {theta}"
            )));
        }
        if !(pop_rate.is_finite() && pop_rate > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "population rate must be positive, got {pop_rate}"
            )));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "limit-regime constant alpha must be positive, got {alpha}"
            )));
        }
        Ok(ModelParams { n, p, theta, pop_rate, alpha })
    }

    /// Parameters for the large-sample regime: `p = n / alpha`.
    pub fn limit_regime(n: u64, theta: f64, alpha: f64) -> Result<Self> {
        let p = n as f64 / alpha;
        ModelParams::new(n, p, theta, 2.0 * p, alpha)
    }

    /// Checks that the forward oracle can run: the per-individual sampling
    /// probability `p / pop_rate` must lie in `(0, 1)`.
    pub fn validate_forward(&self) -> Result<()> {
        if self.p < self.pop_rate {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "forward oracle needs p < pop_rate, got p = {}, pop_rate = {}",
                self.p, self.pop_rate
            )))
        }
    }
}

/// The coalescent point process of an `n`-sample.
///
/// `depths[k - 1]` holds the node depth `H*_k`, the divergence time between
/// the `k`-th and `(k+1)`-th sampled individual in planar order. The origin
/// plays the role of a zeroth depth `H*_0 = T_or` and is `+inf` when the
/// population has an infinite past.
#[derive(Debug, Clone, PartialEq)]
pub struct Genealogy {
    pub origin: ExtendedReal,
    pub depths: Vec<f64>,
}

impl Genealogy {
    pub fn new(origin: ExtendedReal, depths: Vec<f64>) -> Result<Self> {
        let g = Genealogy { origin, depths };
        g.validate()?;
        Ok(g)
    }

    /// Sample size `n` (one more than the number of node depths).
    pub fn n(&self) -> usize {
        self.depths.len() + 1
    }

    /// Node depth `H*_k` for `1 <= k <= n - 1`.
    pub fn node_depth(&self, k: usize) -> f64 {
        self.depths[k - 1]
    }

    /// Length of branch `j` for `0 <= j <= n - 1`; branch 0 is the origin.
    pub fn branch_length(&self, j: usize) -> ExtendedReal {
        if j == 0 {
            self.origin
        } else {
            ExtendedReal::Finite(self.depths[j - 1])
        }
    }

    /// The node depths sorted in decreasing order: `sorted()[k - 1]` is the
    /// `k`-th order statistic `T_{n,k}`, so `sorted()[0]` is the time to the
    /// most recent common ancestor.
    pub fn sorted_depths(&self) -> Vec<f64> {
        let mut sorted = self.depths.clone();
        sorted.sort_unstable_by(|a, b| b.partial_cmp(a).expect("depths are never NaN"));
        sorted
    }

    pub fn validate(&self) -> Result<()> {
        if self.depths.is_empty() {
            return Err(Error::InvalidParameter(
                "a genealogy needs at least one node depth (n >= 2)".into(),
            ));
        }
        for (i, &d) in self.depths.iter().enumerate() {
            if !(d.is_finite() && d > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "node depth H*_{} must be positive and finite, got {d}",
                    i + 1
                )));
            }
            if let ExtendedReal::Finite(t) = self.origin {
                if d >= t {
                    return Err(Error::InvalidParameter(format!(
                        "node depth H*_{} = {d} must lie below the origin {t}",
                        i + 1
                    )));
                }
            }
        }
        if let ExtendedReal::Finite(t) = self.origin {
            if !(t > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "finite origin must be positive, got {t}"
                )));
            }
        }
        Ok(())
    }
}

/// Site frequency spectrum of an `n`-sample.
///
/// `xi[k - 1]` counts the mutations carried by exactly `k` of the `n` sampled
/// individuals, for `1 <= k <= n - 1`. Mutations carried by all `n`
/// individuals are not polymorphic within the sample and are tallied
/// separately as `fixed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteFrequencySpectrum {
    pub xi: Vec<u64>,
    /// Total number of polymorphic sites, `S = sum(xi)`.
    pub s: u64,
    /// Mutations carried by every sampled individual (possible only on the
    /// origin branch).
    pub fixed: u64,
}

impl SiteFrequencySpectrum {
    pub fn empty(n: usize) -> Self {
        SiteFrequencySpectrum { xi: vec![0; n - 1], s: 0, fixed: 0 }
    }
}
