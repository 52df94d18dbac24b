//! Large-sample limit objects and the statistical machinery that checks the
//! limit theorems at desk scale.
//!
//! With the sampling rate coupled to the sample size as `p = n/alpha`, the
//! rescaled coalescent point process converges to a Poisson point measure on
//! `(0,1) x (0,inf)` with intensity `alpha dl x^{-2} dx`. Under the power
//! prior `i` the pair (origin, measure) converges to a Cox pair: the origin
//! is inverse-gamma `(i+1, alpha)` distributed and, conditionally on the
//! origin `t`, the measure is the same Poisson measure restricted to
//! `x < alpha t`. The largest atoms of the untruncated measure are sampled
//! exactly through partial sums of exponentials; only the measure body needs
//! a truncation `eps` near zero, where the intensity has infinite mass.

use rand_distr::{Distribution, Poisson};
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::model::OriginCondition;
use crate::rng::{exponential, open01, Stream};
use crate::stats::TestResult;
use crate::{Error, Result};

// the statistical tests live in `stats`; re-exported here because they are
// exercised mostly through this module
pub use crate::stats::{chi_square_independence, chi_square_poisson, ks_test, two_sample_ks};

/// A finite realization of a point measure on `(0,1) x (0,inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMeasure2D {
    /// Atom positions `(l, x)`.
    pub atoms: Vec<(f64, f64)>,
    /// Body truncation: atoms with `x <= truncation` are not represented.
    /// Exactly-sampled leading atoms are kept even in the (probability
    /// `~exp(-alpha/eps)`) event that they fall at or below it.
    pub truncation: f64,
}

impl PointMeasure2D {
    /// Number of atoms with second coordinate in `(lo, hi)`.
    pub fn count_in(&self, lo: f64, hi: f64) -> u64 {
        self.atoms.iter().filter(|&&(_, x)| x > lo && x < hi).count() as u64
    }

    /// Largest second coordinate, if any atom exists.
    pub fn largest_atom(&self) -> Option<f64> {
        self.atoms.iter().map(|&(_, x)| x).fold(None, |acc, x| match acc {
            None => Some(x),
            Some(a) => Some(a.max(x)),
        })
    }
}

/// A realization of the limit origin time `T_or^(i)`, inverse-gamma
/// `(i+1, alpha)` distributed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitOrigin {
    pub i: u64,
    pub value: f64,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("alpha must be positive, got {alpha}")))
    }
}

/// CDF of the inverse-gamma law with shape `i + 1` and scale `alpha`:
/// `P(e_i <= t) = Q(i+1, alpha/t)` (upper regularized gamma).
pub fn inv_gamma_cdf(i: u64, alpha: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    gamma_ur(i as f64 + 1.0, alpha / t)
}

/// Density of the inverse-gamma law with shape `i + 1` and scale `alpha`:
/// `h^(i)(t) = alpha^{i+1} e^{-alpha/t} / (i! t^{i+2})`.
pub fn inv_gamma_pdf(i: u64, alpha: f64, t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    ((i as f64 + 1.0) * alpha.ln() - alpha / t - ln_gamma(i as f64 + 1.0)
        - (i as f64 + 2.0) * t.ln())
    .exp()
}

/// Samples the `count` largest atoms (second coordinates) of the limit
/// measure exactly: `T_k = 1/(rho_0 + ... + rho_{k-1})` with `rho_j` i.i.d.
/// exponential of rate `alpha` (mean `1/alpha`). Strictly decreasing.
pub fn sample_top_atoms(alpha: f64, count: usize, rng: &mut Stream) -> Result<Vec<f64>> {
    check_alpha(alpha)?;
    if count == 0 {
        return Err(Error::Domain("need at least one top atom".into()));
    }
    let mut sum = 0.0;
    let mut atoms = Vec::with_capacity(count);
    for _ in 0..count {
        sum += exponential(rng, alpha);
        atoms.push(1.0 / sum);
    }
    Ok(atoms)
}

/// Samples the Poisson point measure with intensity `alpha dl x^{-2} dx` on
/// `(0,1) x (x_min, x_max)`; `x_max` may be `f64::INFINITY`.
pub fn sample_ppm(
    alpha: f64,
    x_min: f64,
    x_max: f64,
    rng: &mut Stream,
) -> Result<PointMeasure2D> {
    check_alpha(alpha)?;
    if !(x_min > 0.0) || x_max <= x_min {
        return Err(Error::Domain(format!(
            "need 0 < x_min < x_max, got x_min = {x_min}, x_max = {x_max}"
        )));
    }
    let mass = alpha * (1.0 / x_min - 1.0 / x_max);
    let count = if mass > 0.0 {
        Poisson::new(mass)
            .map_err(|e| Error::Domain(format!("invalid atom-count mean {mass}: {e}")))?
            .sample(rng) as u64
    } else {
        0
    };
    let atoms = (0..count)
        .map(|_| {
            let l = open01(rng);
            // inverse transform of the normalized x^{-2} density on (x_min, x_max)
            let x = 1.0 / (1.0 / x_min - open01(rng) * mass / alpha);
            (l, x)
        })
        .collect();
    Ok(PointMeasure2D { atoms, truncation: x_min })
}

/// Samples the limit measure with its `top` largest atoms exact: the leading
/// atoms come from [`sample_top_atoms`] (each with a uniform first
/// coordinate) and the rest of the measure is an independent Poisson body on
/// `(x_min, T_top)`, by the restriction property.
pub fn sample_ppm_with_exact_top(
    alpha: f64,
    top: usize,
    x_min: f64,
    rng: &mut Stream,
) -> Result<PointMeasure2D> {
    let leading = sample_top_atoms(alpha, top, rng)?;
    let floor = *leading.last().expect("top >= 1");
    let mut atoms: Vec<(f64, f64)> = leading.into_iter().map(|x| (open01(rng), x)).collect();
    if floor > x_min {
        atoms.extend(sample_ppm(alpha, x_min, floor, rng)?.atoms);
    }
    Ok(PointMeasure2D { atoms, truncation: x_min })
}

/// Samples the Cox pair `(T^(i), pi^(i))`: the origin is built from `i + 1`
/// exponential increments, and conditional on its value `t` the measure is
/// the Poisson measure on `(0,1) x (x_min, alpha t)`.
pub fn sample_cox(
    i: u64,
    alpha: f64,
    x_min: f64,
    rng: &mut Stream,
) -> Result<(LimitOrigin, PointMeasure2D)> {
    check_alpha(alpha)?;
    let mut sum = 0.0;
    for _ in 0..=i {
        sum += exponential(rng, alpha);
    }
    let origin = LimitOrigin { i, value: 1.0 / sum };
    let upper = alpha * origin.value;
    let measure = if upper > x_min {
        sample_ppm(alpha, x_min, upper, rng)?
    } else {
        PointMeasure2D { atoms: Vec::new(), truncation: x_min }
    };
    Ok((origin, measure))
}

/// Removes the `count` atoms with the largest second coordinate (ties broken
/// towards the larger first coordinate, an almost-surely irrelevant rule).
pub fn remove_largest_atoms(measure: &PointMeasure2D, count: usize) -> Result<PointMeasure2D> {
    if measure.atoms.len() < count {
        return Err(Error::InsufficientAtoms {
            required: count,
            actual: measure.atoms.len(),
        });
    }
    let mut order: Vec<usize> = (0..measure.atoms.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        let (la, xa) = measure.atoms[a];
        let (lb, xb) = measure.atoms[b];
        (xb, lb).partial_cmp(&(xa, la)).expect("atoms are never NaN")
    });
    let keep: Vec<(f64, f64)> = order[count..].iter().map(|&i| measure.atoms[i]).collect();
    Ok(PointMeasure2D { atoms: keep, truncation: measure.truncation })
}

/// One named statistical check inside a limit-theorem report.
#[derive(Debug, Clone)]
pub struct LimitCheck {
    pub name: String,
    pub statistic: f64,
    pub p_value: f64,
    pub pass: bool,
}

impl LimitCheck {
    fn from_test(name: impl Into<String>, r: TestResult, level: f64) -> Self {
        LimitCheck {
            name: name.into(),
            statistic: r.statistic,
            p_value: r.p_value,
            pass: r.p_value > level,
        }
    }
}

/// Report of [`empirical_limit_check`].
#[derive(Debug, Clone)]
pub struct LimitCheckReport {
    pub n: u64,
    pub alpha: f64,
    pub replicates: u64,
    pub level: f64,
    pub checks: Vec<LimitCheck>,
}

impl LimitCheckReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Simulates the finite-`n` coalescent point process with `p = n/alpha` and
/// tests it against the limit objects at level 0.01:
///
/// * under `InfiniteTime`: the atom count of the process in the box
///   `(0,1) x (1,2)` against `Poisson(alpha/2)`, and the two deepest node
///   depths against exactly-sampled top atoms;
/// * under `PowerPrior(i)`: the posterior origin against the inverse-gamma
///   CDF, and the deepest node depth against `e_{i+1}` draws.
pub fn empirical_limit_check(
    regime: &OriginCondition,
    n: u64,
    alpha: f64,
    seed: u64,
    replicates: u64,
) -> Result<LimitCheckReport> {
    check_alpha(alpha)?;
    let level = 0.01;
    let params = crate::model::ModelParams::limit_regime(n, 0.0, alpha)?;
    let mut checks = Vec::new();

    match *regime {
        OriginCondition::InfiniteTime => {
            let samples: Vec<(u64, f64, f64)> =
                crate::rng::map_replicates(seed, 0xA51, replicates, |_, rng| {
                    let g = crate::sampler::sample_genealogy(&params, regime, rng)
                        .expect("valid parameters");
                    let sorted = g.sorted_depths();
                    let count = g.depths.iter().filter(|&&x| x > 1.0 && x < 2.0).count();
                    (count as u64, sorted[0], sorted[1])
                });

            let counts: Vec<u64> = samples.iter().map(|s| s.0).collect();
            let box_mass = alpha * (1.0 - 0.5);
            checks.push(LimitCheck::from_test(
                format!("box count (0,1)x(1,2) ~ Poisson({box_mass})"),
                chi_square_poisson(&counts, box_mass)?,
                level,
            ));

            let reference: Vec<(f64, f64)> =
                crate::rng::map_replicates(seed, 0xA52, replicates, |_, rng| {
                    let tops = sample_top_atoms(alpha, 2, rng).expect("alpha checked");
                    (tops[0], tops[1])
                });
            for (rank, name) in [(0usize, "deepest"), (1, "second deepest")] {
                let observed: Vec<f64> =
                    samples.iter().map(|s| if rank == 0 { s.1 } else { s.2 }).collect();
                let limit: Vec<f64> = reference
                    .iter()
                    .map(|&(a, b)| if rank == 0 { a } else { b })
                    .collect();
                checks.push(LimitCheck::from_test(
                    format!("{name} node depth vs exact top atom"),
                    two_sample_ks(&observed, &limit)?,
                    level,
                ));
            }
        }
        OriginCondition::PowerPrior(i) => {
            let samples: Vec<(f64, f64)> =
                crate::rng::map_replicates(seed, 0xA53, replicates, |_, rng| {
                    let g = crate::sampler::sample_genealogy(&params, regime, rng)
                        .expect("valid parameters");
                    let origin = g.origin.value().expect("finite under a power prior");
                    (origin, g.sorted_depths()[0])
                });

            let origins: Vec<f64> = samples.iter().map(|s| s.0).collect();
            checks.push(LimitCheck::from_test(
                format!("posterior origin vs inverse-gamma({}, alpha)", i + 1),
                ks_test(&origins, |t| inv_gamma_cdf(i, alpha, t))?,
                level,
            ));

            let deepest: Vec<f64> = samples.iter().map(|s| s.1).collect();
            let reference: Vec<f64> =
                crate::rng::map_replicates(seed, 0xA54, replicates, |_, rng| {
                    *sample_top_atoms(alpha, i as usize + 2, rng)
                        .expect("alpha checked")
                        .last()
                        .expect("nonempty")
                });
            checks.push(LimitCheck::from_test(
                format!("deepest node depth vs e_{}", i + 1),
                two_sample_ks(&deepest, &reference)?,
                level,
            ));
        }
        OriginCondition::FixedTime(_) => {
            return Err(Error::Unsupported(
                "limit checks cover the infinite-origin and power-prior regimes".into(),
            ));
        }
    }

    Ok(LimitCheckReport { n, alpha, replicates, level, checks })
}
