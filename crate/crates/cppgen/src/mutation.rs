//! Poissonian mutation placement on the coalescent point process, site
//! frequency spectrum computation, and closed-form expected spectra.
//!
//! Mutations fall on branch `j` (branch 0 is the origin lineage) as a Poisson
//! process of rate `theta` restricted below the branch length, under the
//! infinite-site convention that every mutation is a distinct site. A
//! mutation at backwards time `l` on branch `j` is carried by individuals
//! `j, j+1, ..., j+r-1`, where the run stops at the first node depth
//! reaching `l` (or at the right edge of the sample).

use rand_distr::{Distribution, Poisson};

use crate::model::{ExtendedReal, Genealogy, OriginCondition, SiteFrequencySpectrum};
use crate::numeric::{binomial, harmonic, ln_binomial, log_series_tail_shifted};
use crate::quad;
use crate::rng::{open01, Stream};
use crate::sampler::moment_order_stat;
use crate::{Error, Result};

/// A mutation on branch `branch` at backwards time `time < H*_branch`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MutationEvent {
    pub branch: usize,
    pub time: f64,
}

/// Mutations drawn on a genealogy.
#[derive(Debug, Clone, PartialEq)]
pub struct MutationSet {
    pub events: Vec<MutationEvent>,
    /// False when the origin branch was skipped because it is infinitely
    /// long (an infinite-origin genealogy would carry infinitely many root
    /// mutations, so the root carrier classes are undefined there).
    pub root_branch_included: bool,
}

/// Places mutations on every branch of `g`: branch `j` receives a
/// `Poisson(theta * H*_j)` number of events at i.i.d. uniform heights on
/// `(0, H*_j)`. On an infinite-origin genealogy branch 0 is skipped and
/// flagged.
pub fn place_mutations(g: &Genealogy, theta: f64, rng: &mut Stream) -> Result<MutationSet> {
    place_mutations_below(g, theta, f64::INFINITY, rng)
}

/// Mutation placement truncated at a horizon: branch `j` receives events on
/// `(0, min(H*_j, horizon))`. With a finite horizon the infinite origin
/// branch is included up to the horizon; this is a diagnostic device, since
/// the untruncated spectrum has infinite expectation there.
pub fn place_mutations_below(
    g: &Genealogy,
    theta: f64,
    horizon: f64,
    rng: &mut Stream,
) -> Result<MutationSet> {
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(Error::Domain(format!("mutation rate must be nonnegative, got {theta}")));
    }
    if !(horizon > 0.0) {
        return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
    }
    let mut events = Vec::new();
    let mut root_branch_included = true;
    for branch in 0..g.n() {
        let length = match g.branch_length(branch) {
            ExtendedReal::Finite(len) => len.min(horizon),
            ExtendedReal::Infinite => {
                if horizon.is_finite() {
                    horizon
                } else {
                    root_branch_included = false;
                    continue;
                }
            }
        };
        let mean = theta * length;
        if mean == 0.0 {
            continue;
        }
        let count = Poisson::new(mean)
            .map_err(|e| Error::Domain(format!("invalid Poisson mean {mean}: {e}")))?
            .sample(rng) as u64;
        for _ in 0..count {
            events.push(MutationEvent { branch, time: length * open01(rng) });
        }
    }
    Ok(MutationSet { events, root_branch_included })
}

/// Number of individuals carrying the mutation `ev`: the length of the
/// maximal run `j, j+1, ..., j+r-1` over which every intervening node depth
/// stays below the mutation time (the right edge of the sample terminates a
/// run).
pub fn carrier_count(g: &Genealogy, ev: &MutationEvent) -> usize {
    let n = g.n();
    debug_assert!(ev.branch < n);
    debug_assert!(ev.time > 0.0);
    debug_assert!(match g.branch_length(ev.branch) {
        ExtendedReal::Finite(len) => ev.time < len,
        ExtendedReal::Infinite => true,
    });
    let mut r = 1usize;
    while ev.branch + r < n && g.depths[ev.branch + r - 1] < ev.time {
        r += 1;
    }
    r
}

/// Tallies the site frequency spectrum of a mutation set: `xi[k-1]` counts
/// events with exactly `k` carriers, and events carried by all `n`
/// individuals go to the separate `fixed` slot.
pub fn compute_sfs(g: &Genealogy, events: &[MutationEvent]) -> SiteFrequencySpectrum {
    let n = g.n();
    let mut sfs = SiteFrequencySpectrum::empty(n);
    for ev in events {
        let carriers = carrier_count(g, ev);
        if carriers == n {
            sfs.fixed += 1;
        } else {
            sfs.xi[carriers - 1] += 1;
            sfs.s += 1;
        }
    }
    sfs
}

/// The bracket `ln(1+tau) - sum_{i=1}^{k-1} y^i / i` with `y = tau/(1+tau)`,
/// which multiplies the `(1+tau)^{k-1}/tau^{k+1}` prefactor in the
/// fixed-origin expected spectrum.
///
/// For `y <= 0.9` the subtraction cancels catastrophically (the bracket is
/// the tail `sum_{i>=k} y^i/i`, of order `y^k`), so the tail series is summed
/// directly; for larger `y` the logarithm dominates the partial sum and the
/// direct form is both stable and cheap.
pub fn sfs_fixed_bracket(k: u64, tau: f64) -> f64 {
    let y = tau / (1.0 + tau);
    if y <= 0.9 {
        crate::numeric::log_series_tail(k, y)
    } else {
        sfs_fixed_bracket_direct(k, tau)
    }
}

fn sfs_fixed_bracket_direct(k: u64, tau: f64) -> f64 {
    let y = tau / (1.0 + tau);
    let mut partial = 0.0;
    let mut power = 1.0;
    for i in 1..k {
        power *= y;
        partial += power / i as f64;
    }
    tau.ln_1p() - partial
}

/// Expected number of `k`-carrier mutations under a fixed origin `t`
/// (`tau = p t`):
///
/// `E xi_k = (theta/p) { (n-3k-1)/k + (n-k-1)(k+1)/(k tau)
///           + (1+tau)^{k-1}/tau^{k+1}
///             [2 tau^2 - 2(n-2k-1) tau - (n-k-1)(k+1)] * bracket }`.
///
/// The prefactor-bracket product is folded into a single series when the
/// bracket is evaluated by its tail form, so nothing overflows even for
/// `tau^{-(k+1)}` far outside the float range.
pub fn expected_sfs_fixed(n: u64, k: u64, theta: f64, p: f64, t: f64) -> Result<f64> {
    check_sfs_args(n, k, theta, p)?;
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("origin time must be positive, got {t}")));
    }
    let tau = p * t;
    let y = tau / (1.0 + tau);
    let (nf, kf) = (n as f64, k as f64);
    let a = (nf - 3.0 * kf - 1.0) / kf;
    let b = (nf - kf - 1.0) * (kf + 1.0) / (kf * tau);
    let d = 2.0 * tau * tau - 2.0 * (nf - 2.0 * kf - 1.0) * tau - (nf - kf - 1.0) * (kf + 1.0);
    let prefactor_times_bracket = if y <= 0.9 {
        // (1+tau)^{k-1}/tau^{k+1} * sum_{i>=k} y^i/i
        //   = sum_{j>=0} y^j/(j+k) / (tau (1+tau))
        log_series_tail_shifted(k, y) / (tau * (1.0 + tau))
    } else {
        ((kf - 1.0) * tau.ln_1p() - (kf + 1.0) * tau.ln()).exp() * sfs_fixed_bracket_direct(k, tau)
    };
    Ok(theta / p * (a + b + d * prefactor_times_bracket))
}

/// Expected number of polymorphic sites `E S = sum_k E xi_k` under a fixed
/// origin.
pub fn expected_total_sites_fixed(n: u64, theta: f64, p: f64, t: f64) -> Result<f64> {
    (1..n).map(|k| expected_sfs_fixed(n, k, theta, p, t)).sum()
}

fn check_sfs_args(n: u64, k: u64, theta: f64, p: f64) -> Result<()> {
    if n < 2 || k == 0 || k > n - 1 {
        return Err(Error::Domain(format!(
            "carrier class needs 1 <= k <= n-1, got k = {k}, n = {n}"
        )));
    }
    if !(theta.is_finite() && theta >= 0.0) {
        return Err(Error::Domain(format!("mutation rate must be nonnegative, got {theta}")));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::Domain(format!("sampling rate must be positive, got {p}")));
    }
    Ok(())
}

/// Expected site frequency spectrum entry under the requested origin regime.
///
/// * `FixedTime(t)`: the closed form of [`expected_sfs_fixed`].
/// * `InfiniteTime`: `+inf` for every `k`.
/// * `PowerPrior(0)`: `n theta / (k p)`.
/// * `PowerPrior(1)`: for `k <= n-3` the harmonic-number closed form
///   `(theta/p) n(n-1)/((n-k)(n-k-2)) [ (n+k-2)/k
///    - 2(n-1)/(n-k-1) (H_{n-1} - H_k) ]`;
///   for `k in {n-2, n-1}` no closed form exists and the value falls back to
///   [`expected_sfs_quadrature`].
/// * `PowerPrior(i >= 2)`: unsupported in closed form; use the quadrature
///   path directly.
pub fn expected_sfs(
    regime: &OriginCondition,
    n: u64,
    k: u64,
    theta: f64,
    p: f64,
) -> Result<ExtendedReal> {
    check_sfs_args(n, k, theta, p)?;
    match *regime {
        OriginCondition::FixedTime(t) => {
            Ok(ExtendedReal::Finite(expected_sfs_fixed(n, k, theta, p, t)?))
        }
        OriginCondition::InfiniteTime => Ok(ExtendedReal::Infinite),
        OriginCondition::PowerPrior(0) => {
            Ok(ExtendedReal::Finite(n as f64 * theta / (k as f64 * p)))
        }
        OriginCondition::PowerPrior(1) => {
            if k + 3 <= n {
                let (nf, kf) = (n as f64, k as f64);
                let front = theta / p * nf * (nf - 1.0) / ((nf - kf) * (nf - kf - 2.0));
                let inner = (nf + kf - 2.0) / kf
                    - 2.0 * (nf - 1.0) / (nf - kf - 1.0) * (harmonic(n - 1) - harmonic(k));
                Ok(ExtendedReal::Finite(front * inner))
            } else {
                Ok(ExtendedReal::Finite(expected_sfs_quadrature(1, n, k, theta, p)?))
            }
        }
        OriginCondition::PowerPrior(i) => Err(Error::Unsupported(format!(
            "no closed-form expected spectrum for prior exponent i = {i}; \
             use expected_sfs_quadrature"
        ))),
    }
}

/// Expected spectrum under the power prior `i` by mixing the fixed-origin
/// closed form over the posterior origin density:
/// `int_0^inf E^t(xi_k) h_n^(i)(t) dt`, mapped to `(0, 1)` through
/// `y = pt/(1+pt)`, where the integrand becomes
/// `n C(n-1, i) y^{n-i-1} (1-y)^i E^{t(y)}(xi_k)`.
pub fn expected_sfs_quadrature(i: u64, n: u64, k: u64, theta: f64, p: f64) -> Result<f64> {
    check_sfs_args(n, k, theta, p)?;
    if i >= n {
        return Err(Error::Domain(format!("prior exponent needs i < n, got i = {i}, n = {n}")));
    }
    let ln_weight = (n as f64).ln() + ln_binomial(n - 1, i);
    let result = quad::integrate(
        |y| {
            let t = y / (p * (1.0 - y));
            let weight =
                (ln_weight + (n - i - 1) as f64 * y.ln() + i as f64 * (-y).ln_1p()).exp();
            weight * expected_sfs_fixed(n, k, theta, p, t).unwrap_or(f64::NAN)
        },
        0.0,
        1.0,
        1e-8,
    )?;
    if !result.value.is_finite() {
        return Err(Error::QuadratureTolerance { achieved: f64::INFINITY, requested: 1e-8 });
    }
    Ok(result.value)
}

/// Expected spectrum under the uniform prior through the branch-time
/// decomposition
///
/// `E xi_k = theta (2/k) C(n-1,k)^{-1}
///           sum_{j=2}^{n-k+1} C(j,2) C(n-j,k-1) E[delta_j]`,
///
/// where `delta_j` is the duration with exactly `j` lineages:
/// `E[delta_j] = E[T_{n,j-1}] - E[T_{n,j}]` (with `T_{n,n} := 0`), taken from
/// the closed-form order-statistic moments. Only the uniform prior has every
/// needed first moment in closed form.
pub fn expected_sfs_via_branch_times(i: u64, n: u64, k: u64, theta: f64, p: f64) -> Result<f64> {
    check_sfs_args(n, k, theta, p)?;
    if i != 0 {
        return Err(Error::Unsupported(format!(
            "branch-time route needs the uniform prior (i = 0), got i = {i}"
        )));
    }
    let regime = OriginCondition::PowerPrior(0);
    let mean_depth = |r: u64| -> Result<f64> {
        if r == n {
            Ok(0.0)
        } else {
            Ok(moment_order_stat(&regime, n, r, 1, p)?
                .value()
                .expect("first moments are finite under the uniform prior"))
        }
    };
    let mut sum = 0.0;
    for j in 2..=(n - k + 1) {
        let delta = mean_depth(j - 1)? - mean_depth(j)?;
        sum += binomial(j, 2) * binomial(n - j, k - 1) * delta;
    }
    Ok(theta * 2.0 / k as f64 / binomial(n - 1, k) * sum)
}

/// Limit of the normalized expected spectrum `E xi_k / E S` as the origin
/// time grows: `1/(n-1)`, independent of `k`.
pub fn normalized_sfs_limit(n: u64) -> f64 {
    1.0 / (n as f64 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::divergence_matrix;
    use crate::model::ModelParams;
    use crate::rng::substream;
    use crate::stats::chi_square_poisson;
    use proptest::prelude::*;

    fn genealogy(origin: f64, depths: Vec<f64>) -> Genealogy {
        Genealogy::new(ExtendedReal::Finite(origin), depths).unwrap()
    }

    #[test]
    fn carrier_rule_spot_cases() {
        let g = genealogy(3.0, vec![2.0, 1.0]);
        // 1 < 1.5 < 2: individuals 1 and 2 carry it
        assert_eq!(carrier_count(&g, &MutationEvent { branch: 1, time: 1.5 }), 2);
        // 0.5 < 1: individual 1 alone
        assert_eq!(carrier_count(&g, &MutationEvent { branch: 1, time: 0.5 }), 1);
        // high on the origin branch: everyone
        assert_eq!(carrier_count(&g, &MutationEvent { branch: 0, time: 2.5 }), 3);
    }

    #[test]
    fn sfs_counts_and_fixed_split() {
        let g = genealogy(3.0, vec![2.0, 1.0]);
        let events = vec![
            MutationEvent { branch: 1, time: 1.5 },
            MutationEvent { branch: 1, time: 1.2 },
            MutationEvent { branch: 0, time: 1.5 },
            MutationEvent { branch: 2, time: 0.3 },
            MutationEvent { branch: 0, time: 2.9 },
        ];
        let sfs = compute_sfs(&g, &events);
        // the (0, 1.5) event sits below H*_1 = 2, so it is a singleton; the
        // two events on branch 1 above H*_2 = 1 are doubletons
        assert_eq!(sfs.xi, vec![2, 2]);
        assert_eq!(sfs.s, 4);
        assert_eq!(sfs.fixed, 1);
    }

    #[test]
    fn no_events_and_pure_doubleton_scenarios() {
        let g = genealogy(4.0, vec![1.0, 3.0, 0.5]);
        let empty = compute_sfs(&g, &[]);
        assert_eq!(empty.xi, vec![0, 0, 0]);
        assert_eq!((empty.s, empty.fixed), (0, 0));

        // three mutations, each carried by exactly two individuals
        let events = vec![
            MutationEvent { branch: 0, time: 1.5 }, // individuals 0,1 (1 < 1.5 < 3)
            MutationEvent { branch: 0, time: 2.0 },
            MutationEvent { branch: 2, time: 0.8 }, // individuals 2,3 (0.5 < 0.8)
        ];
        let sfs = compute_sfs(&g, &events);
        assert_eq!(sfs.xi, vec![0, 3, 0]);
        assert_eq!(sfs.s, 3);
    }

    #[test]
    fn zero_rate_places_nothing() {
        let g = genealogy(3.0, vec![2.0, 1.0]);
        let mut rng = substream(1, 0, 0);
        let set = place_mutations(&g, 0.0, &mut rng).unwrap();
        assert!(set.events.is_empty());
        assert!(set.root_branch_included);
    }

    #[test]
    fn infinite_origin_skips_root_branch() {
        let g = Genealogy::new(ExtendedReal::Infinite, vec![2.0, 1.0]).unwrap();
        let mut rng = substream(2, 0, 0);
        let set = place_mutations(&g, 5.0, &mut rng).unwrap();
        assert!(!set.root_branch_included);
        assert!(set.events.iter().all(|ev| ev.branch >= 1));
        // truncated diagnostics include the root up to the horizon
        let set = place_mutations_below(&g, 5.0, 10.0, &mut rng).unwrap();
        assert!(set.root_branch_included);
        assert!(set.events.iter().all(|ev| ev.time < 10.0));
    }

    #[test]
    fn total_count_is_poisson_with_total_length_mean() {
        let g = genealogy(2.5, vec![1.0, 2.0, 0.5]);
        let theta = 1.3;
        let total_length = 2.5 + 1.0 + 2.0 + 0.5;
        let counts: Vec<u64> = crate::rng::map_replicates(3, 1, 100_000, |_, rng| {
            place_mutations(&g, theta, rng).unwrap().events.len() as u64
        });
        let r = chi_square_poisson(&counts, theta * total_length).unwrap();
        assert!(r.p_value > 0.01, "p = {}", r.p_value);
    }

    proptest! {
        // the run-length carrier rule equals brute-force thresholding of the
        // pairwise divergence matrix
        #[test]
        fn carrier_rule_matches_divergence_matrix(
            depths in proptest::collection::vec(0.05f64..4.9, 2..9),
            branch_frac in 0.0f64..1.0,
            time_frac in 1e-6f64..1.0,
        ) {
            let n = depths.len() + 1;
            let g = genealogy(5.0, depths.clone());
            let branch = (branch_frac * n as f64) as usize % n;
            let len = match g.branch_length(branch) {
                ExtendedReal::Finite(len) => len,
                ExtendedReal::Infinite => unreachable!(),
            };
            let ev = MutationEvent { branch, time: time_frac * len };
            let d = divergence_matrix(&depths);
            let brute: Vec<usize> =
                (0..n).filter(|&m| m >= branch && d[branch][m] < ev.time).collect();
            let run: Vec<usize> =
                (branch..branch + carrier_count(&g, &ev)).collect();
            prop_assert_eq!(brute, run);
        }

        // partition: every event lands in xi or in the fixed slot
        #[test]
        fn sfs_partitions_events(
            depths in proptest::collection::vec(0.05f64..4.9, 2..9),
            seed in 0u64..1000,
        ) {
            let g = genealogy(5.0, depths);
            let mut rng = substream(seed, 2, 0);
            let set = place_mutations(&g, 2.0, &mut rng).unwrap();
            let sfs = compute_sfs(&g, &set.events);
            prop_assert_eq!(sfs.s + sfs.fixed, set.events.len() as u64);
            prop_assert_eq!(sfs.xi.iter().sum::<u64>(), sfs.s);
        }
    }

    #[test]
    fn expected_sfs_uniform_prior_value() {
        let v = expected_sfs(&OriginCondition::PowerPrior(0), 10, 2, 1.0, 1.0).unwrap();
        assert_eq!(v, ExtendedReal::Finite(5.0));
    }

    #[test]
    fn expected_sfs_infinite_origin_is_infinite() {
        for k in 1..10 {
            let v = expected_sfs(&OriginCondition::InfiniteTime, 10, k, 1.0, 1.0).unwrap();
            assert_eq!(v, ExtendedReal::Infinite);
        }
    }

    #[test]
    fn expected_sfs_log_uniform_value() {
        // (90/63) [9 - 2.25 (H_9 - 1)] with H_9 = 7129/2520
        let v = expected_sfs(&OriginCondition::PowerPrior(1), 10, 1, 1.0, 1.0)
            .unwrap()
            .value()
            .unwrap();
        assert!((v - 6.978316326530613).abs() < 1e-12, "v = {v}");
    }

    #[test]
    fn expected_sfs_higher_priors_unsupported() {
        assert!(matches!(
            expected_sfs(&OriginCondition::PowerPrior(2), 10, 1, 1.0, 1.0),
            Err(Error::Unsupported(_))
        ));
        // the quadrature path still covers them
        let v = expected_sfs_quadrature(2, 10, 1, 1.0, 1.0).unwrap();
        assert!(v.is_finite() && v > 0.0);
    }

    #[test]
    fn fixed_origin_matches_first_principles_quadrature() {
        // independent route: E xi_k = theta [ (n-k-1) Q + 2 R ] with
        // Q = int P(H > x)^2 P(H < x)^{k-1} dx,
        // R = int P(H > x) P(H < x)^{k-1} dx
        for &(n, k, tau) in
            &[(2u64, 1u64, 1.0f64), (5, 2, 0.5), (10, 1, 1.0), (10, 4, 10.0), (10, 9, 2.0)]
        {
            let p = 1.0;
            let t = tau / p;
            let cdf = |x: f64| crate::sampler::depth_cdf_fixed(x, p, t);
            let q = quad::integrate(
                |x| (1.0 - cdf(x)).powi(2) * cdf(x).powi(k as i32 - 1),
                0.0,
                t,
                1e-12,
            )
            .unwrap()
            .value;
            let r = quad::integrate(
                |x| (1.0 - cdf(x)) * cdf(x).powi(k as i32 - 1),
                0.0,
                t,
                1e-12,
            )
            .unwrap()
            .value;
            let first_principles = (n - k - 1) as f64 * q + 2.0 * r;
            let closed = expected_sfs_fixed(n, k, 1.0, p, t).unwrap();
            assert!(
                (closed - first_principles).abs() < 1e-8 * first_principles.max(1e-8),
                "n={n} k={k} tau={tau}: closed={closed} quad={first_principles}"
            );
        }
    }

    #[test]
    fn fixed_origin_monte_carlo_consistency() {
        // reduced twin of the acceptance criterion: n = 5, tau = 1
        let (n, theta, p, t) = (5u64, 1.0, 1.0, 1.0);
        let params = ModelParams::new(n, p, theta, 5.0, 1.0).unwrap();
        let reps = 100_000u64;
        let spectra: Vec<Vec<u64>> = crate::rng::map_replicates(41, 3, reps, |_, rng| {
            let g =
                crate::sampler::sample_genealogy(&params, &OriginCondition::FixedTime(t), rng)
                    .unwrap();
            let set = place_mutations(&g, theta, rng).unwrap();
            compute_sfs(&g, &set.events).xi
        });
        for k in 1..n {
            let values: Vec<f64> =
                spectra.iter().map(|xi| xi[(k - 1) as usize] as f64).collect();
            let mean = values.iter().sum::<f64>() / reps as f64;
            let var =
                values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / reps as f64;
            let se = (var / reps as f64).sqrt();
            let closed = expected_sfs_fixed(n, k, theta, p, t).unwrap();
            assert!(
                (mean - closed).abs() < 4.0 * se,
                "k={k}: mean={mean} closed={closed} se={se}"
            );
        }
    }

    #[test]
    fn quadrature_reproduces_uniform_prior_closed_form() {
        for &k in &[1u64, 5, 9] {
            let q = expected_sfs_quadrature(0, 10, k, 1.0, 1.0).unwrap();
            let closed = 10.0 / k as f64;
            assert!((q - closed).abs() < 1e-6 * closed, "k={k}: quad={q}");
        }
    }

    #[test]
    fn quadrature_reproduces_log_uniform_closed_form() {
        for k in 1..=7u64 {
            let q = expected_sfs_quadrature(1, 10, k, 1.0, 1.0).unwrap();
            let closed = expected_sfs(&OriginCondition::PowerPrior(1), 10, k, 1.0, 1.0)
                .unwrap()
                .value()
                .unwrap();
            assert!((q - closed).abs() < 1e-6 * closed, "k={k}: quad={q} closed={closed}");
        }
    }

    #[test]
    fn theta_linearity_is_exact() {
        for k in 1..10u64 {
            let unit = expected_sfs_fixed(10, k, 1.0, 1.0, 3.0).unwrap();
            let tripled = expected_sfs_fixed(10, k, 3.0, 1.0, 3.0).unwrap();
            assert_eq!(tripled, 3.0 * unit);
        }
    }

    #[test]
    fn branch_time_route_matches_uniform_closed_form() {
        let v = expected_sfs_via_branch_times(0, 10, 3, 1.0, 1.0).unwrap();
        assert!((v - 10.0 / 3.0).abs() < 1e-10 * (10.0 / 3.0));
        // k = n-1 collapses to the single j = 2 term
        let v = expected_sfs_via_branch_times(0, 10, 9, 1.0, 1.0).unwrap();
        assert!((v - 10.0 / 9.0).abs() < 1e-10);
        assert!(expected_sfs_via_branch_times(1, 10, 3, 1.0, 1.0).is_err());
    }

    #[test]
    fn mutation_mass_identity() {
        // sum_k k E xi_k = n theta E[T_{n,1}] = n (n-1) theta / p under the
        // uniform prior; both routes must agree to 1e-10
        for &n in &[5u64, 10, 20] {
            let (theta, p) = (1.0, 2.0);
            let lhs: f64 = (1..n)
                .map(|k| k as f64 * expected_sfs_via_branch_times(0, n, k, theta, p).unwrap())
                .sum();
            let rhs = n as f64 * (n as f64 - 1.0) * theta / p;
            assert!((lhs - rhs).abs() < 1e-10 * rhs, "n={n}: lhs={lhs} rhs={rhs}");
        }
    }

    #[test]
    fn bracket_routes_agree_at_the_switch() {
        // tail-series and direct evaluation must coincide near y = 0.9
        for k in 1..50u64 {
            for &tau in &[8.0, 8.9999, 9.0001, 12.0] {
                let y = tau / (1.0 + tau);
                let series = crate::numeric::log_series_tail(k, y);
                let direct = sfs_fixed_bracket_direct(k, tau);
                assert!(
                    (series - direct).abs() <= 1e-11 * series.abs().max(1e-280),
                    "k={k} tau={tau}: series={series} direct={direct}"
                );
            }
        }
    }

    #[test]
    fn renormalized_spectrum_flattens_slowly() {
        // E xi_k / E S tends to 1/(n-1) at logarithmic speed; the deviation
        // at tau = 1e6, n = 10 is still about 0.046, carried by k = 1
        let n = 10u64;
        let total = expected_total_sites_fixed(n, 1.0, 1.0, 1e6).unwrap();
        let dev = |k: u64| {
            (expected_sfs_fixed(n, k, 1.0, 1.0, 1e6).unwrap() / total
                - normalized_sfs_limit(n))
            .abs()
        };
        let max_dev = (1..n).map(dev).fold(0.0f64, f64::max);
        assert!(max_dev > 0.03 && max_dev < 0.06, "max deviation = {max_dev}");
        assert_eq!(normalized_sfs_limit(10), 1.0 / 9.0);
        assert_eq!(normalized_sfs_limit(2), 1.0);

        // asymptotic growth: E xi_k / (2 theta ln(1+tau)) approaches 1
        for &k in &[1u64, 5, 9] {
            let ratio = |tau: f64| {
                expected_sfs_fixed(n, k, 1.0, 1.0, tau).unwrap()
                    / (2.0 * (1.0 + tau).ln())
            };
            let near = (ratio(1e12) - 1.0).abs();
            let far = (ratio(1e4) - 1.0).abs();
            assert!(near < far && near < 0.2, "k={k}: near={near} far={far}");
        }
    }
}
