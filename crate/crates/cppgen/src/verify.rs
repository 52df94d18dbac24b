//! The one-shot verification suite: every distributional statement and
//! closed-form identity the library rests on, checked end to end at desk
//! scale with a fixed seed.
//!
//! Each criterion produces one [`CriterionOutcome`] with the binding
//! statistic (worst p-value or largest deviation across its sub-checks), the
//! tolerance it was held to, and a pass flag. Statistical criteria run at
//! level 0.01 (Bonferroni-corrected within a criterion where several
//! coordinates are tested); deterministic criteria compare closed forms
//! against independent numerical routes.

use std::time::Instant;

use serde::Serialize;

use crate::asymptotics::{
    empirical_limit_check, remove_largest_atoms, sample_cox, sample_ppm_with_exact_top,
};
use crate::forward::{sample_conditioned_genealogy, AcceptanceStats, DEFAULT_MAX_ATTEMPTS};
use crate::model::{ModelParams, OriginCondition};
use crate::mutation::{
    compute_sfs, expected_sfs, expected_sfs_fixed, expected_sfs_quadrature,
    expected_sfs_via_branch_times, expected_total_sites_fixed, normalized_sfs_limit,
    place_mutations,
};
use crate::numeric::{integral_i, integral_j};
use crate::rng::map_replicates;
use crate::sampler::{moment_order_stat, sample_genealogy};
use crate::stats::two_sample_ks;
use crate::{quad, ExtendedReal};

/// Outcome of a single acceptance criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionOutcome {
    pub criterion: String,
    /// Binding statistic: the smallest p-value or the largest deviation.
    pub statistic: Option<f64>,
    /// Smallest p-value across the criterion's statistical sub-checks.
    pub p_value: Option<f64>,
    /// Threshold the statistic was held to (p-value floor, deviation cap,
    /// or z-score cap, as named in `detail`).
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionOutcome {
    /// One human-readable pass/fail line.
    pub fn format_line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        format!(
            "[{verdict}] {:<28} {:>8.2}s  {}",
            self.criterion, self.seconds, self.detail
        )
    }
}

/// Full report of a verification run.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub quick: bool,
    pub criteria: Vec<CriterionOutcome>,
    pub all_pass: bool,
}

/// Runs the suite. `quick` restricts it to the deterministic
/// (closed-form/quadrature) criteria, which finish in seconds.
pub fn run(seed: u64, quick: bool) -> VerifyReport {
    let mut criteria = Vec::new();
    if !quick {
        criteria.push(c01_sampler_law(seed));
        criteria.push(c02_acceptance_rate(seed));
        criteria.push(c03_pop_rate_invariance(seed));
        criteria.push(c04_expected_sfs_fixed_mc(seed));
    }
    criteria.push(c05_prior_mixture_quadrature());
    criteria.push(c06_branch_time_identity());
    if !quick {
        criteria.push(c07_order_stat_moments(seed));
    }
    criteria.push(c08_rational_integrals());
    if !quick {
        criteria.push(c09_limit_theorems(seed));
        criteria.push(c10_largest_atom_removal(seed));
    }
    criteria.push(c11_sfs_flattening());
    criteria.push(c12_limit_sfs());
    let all_pass = criteria.iter().all(|c| c.pass);
    VerifyReport { seed, quick, criteria, all_pass }
}

struct Clock {
    start: Instant,
    limit: Option<f64>,
}

impl Clock {
    fn new(limit: Option<f64>) -> Self {
        Clock { start: Instant::now(), limit }
    }

    /// Elapsed seconds and whether the budget was respected.
    fn stop(&self) -> (f64, bool) {
        let s = self.start.elapsed().as_secs_f64();
        (s, self.limit.map_or(true, |l| s < l))
    }
}

fn budget_note(in_budget: bool, seconds: f64, limit: Option<f64>) -> String {
    match limit {
        Some(l) if !in_budget => format!("; RUNTIME {seconds:.1}s exceeded {l:.0}s budget"),
        _ => String::new(),
    }
}

/// Criterion 1: the forward rejection sampler and the exact inverse-CDF
/// sampler produce the same depth marginals (two-sample KS per coordinate,
/// Bonferroni level 0.01/3, 2e4 accepted genealogies each side).
fn c01_sampler_law(seed: u64) -> CriterionOutcome {
    let clock = Clock::new(Some(60.0));
    let (n, pop_rate, p, t) = (4u64, 5.0, 1.0, 2.0);
    let reps = 20_000u64;
    let forward: Vec<Vec<f64>> = map_replicates(seed, 0x0101, reps, |_, rng| {
        sample_conditioned_genealogy(pop_rate, p, t, n, rng, DEFAULT_MAX_ATTEMPTS)
            .expect("acceptance rate is ~7%")
            .0
            .depths
    });
    let params = ModelParams::new(n, p, 0.0, pop_rate, 1.0).expect("valid");
    let exact: Vec<Vec<f64>> = map_replicates(seed, 0x0102, reps, |_, rng| {
        sample_genealogy(&params, &OriginCondition::FixedTime(t), rng).expect("valid").depths
    });
    let mut min_p = f64::INFINITY;
    for coord in 0..(n as usize - 1) {
        let a: Vec<f64> = forward.iter().map(|d| d[coord]).collect();
        let b: Vec<f64> = exact.iter().map(|d| d[coord]).collect();
        min_p = min_p.min(two_sample_ks(&a, &b).expect("enough samples").p_value);
    }
    let (seconds, in_budget) = clock.stop();
    let level = 0.01 / 3.0;
    let pass = min_p > level && in_budget;
    CriterionOutcome {
        criterion: "01 sampler-law".into(),
        statistic: Some(min_p),
        p_value: Some(min_p),
        tolerance: level,
        pass,
        detail: format!(
            "forward vs exact sampler, n=4 N=5 p=1 t=2, {reps} genealogies/side: min KS p = \
             {min_p:.4} (need > {level:.5}){}",
            budget_note(in_budget, seconds, Some(60.0))
        ),
        seconds,
    }
}

/// Criterion 2: the empirical acceptance rate of the rejection sampler
/// matches `((1+Nt)/(Nt)) (1/(1+pt)) (pt/(1+pt))^n` within 4 standard
/// errors.
fn c02_acceptance_rate(seed: u64) -> CriterionOutcome {
    let clock = Clock::new(None);
    let (n, pop_rate, p, t) = (4u64, 5.0, 1.0, 2.0);
    let reps = 20_000u64;
    let stats: Vec<AcceptanceStats> = map_replicates(seed, 0x0201, reps, |_, rng| {
        sample_conditioned_genealogy(pop_rate, p, t, n, rng, DEFAULT_MAX_ATTEMPTS)
            .expect("acceptance rate is ~7%")
            .1
    });
    let mut total = AcceptanceStats::default();
    for s in &stats {
        total.merge(s);
    }
    let expected = ((1.0 + pop_rate * t) / (pop_rate * t)) * (1.0 / (1.0 + p * t))
        * (p * t / (1.0 + p * t)).powi(n as i32);
    let se = (expected * (1.0 - expected) / total.attempts as f64).sqrt();
    let z = (total.rate() - expected).abs() / se;
    let (seconds, _) = clock.stop();
    CriterionOutcome {
        criterion: "02 acceptance-rate".into(),
        statistic: Some(z),
        p_value: None,
        tolerance: 4.0,
        pass: z < 4.0,
        detail: format!(
            "rate {:.5} vs closed form {expected:.5} over {} attempts: z = {z:.2} (need < 4)",
            total.rate(),
            total.attempts
        ),
        seconds,
    }
}

/// Criterion 3: the population rate `N` only rescales the population and
/// leaves the sample law untouched: deepest-coordinate samples for
/// `N in {2, 5, 20}` are pairwise KS-indistinguishable.
fn c03_pop_rate_invariance(seed: u64) -> CriterionOutcome {
    let clock = Clock::new(None);
    let (n, p, t) = (4u64, 1.0, 2.0);
    let rates = [2.0, 5.0, 20.0];
    let reps = 10_000u64;
    let samples: Vec<Vec<f64>> = rates
        .iter()
        .enumerate()
        .map(|(idx, &pop_rate)| {
            map_replicates(seed, 0x0301 + idx as u64, reps, |_, rng| {
                sample_conditioned_genealogy(pop_rate, p, t, n, rng, DEFAULT_MAX_ATTEMPTS)
                    .expect("acceptance rate is ~7%")
                    .0
                    .depths[0]
            })
        })
        .collect();
    let mut min_p = f64::INFINITY;
    for a in 0..rates.len() {
        for b in (a + 1)..rates.len() {
            min_p = min_p
                .min(two_sample_ks(&samples[a], &samples[b]).expect("enough").p_value);
        }
    }
    let (seconds, _) = clock.stop();
    CriterionOutcome {
        criterion: "03 pop-rate-invariance".into(),
        statistic: Some(min_p),
        p_value: Some(min_p),
        tolerance: 0.01,
        pass: min_p > 0.01,
        detail: format!(
            "H*_1 for N in {{2,5,20}}, {reps} genealogies each: min pairwise KS p = {min_p:.4} \
             (need > 0.01)"
        ),
        seconds,
    }
}

/// Criterion 4: Monte Carlo means of every spectrum entry agree with the
/// fixed-origin closed form within 4 standard errors (n=10, tau in {1,10},
/// 1e5 replicates each).
fn c04_expected_sfs_fixed_mc(seed: u64) -> CriterionOutcome {
    let clock = Clock::new(Some(120.0));
    let (n, theta, p) = (10u64, 1.0, 1.0);
    let reps = 100_000u64;
    let mut max_z: f64 = 0.0;
    let mut worst = String::new();
    for (idx, tau) in [1.0f64, 10.0].into_iter().enumerate() {
        let t = tau / p;
        let params = ModelParams::new(n, p, theta, 2.0 * p, 1.0).expect("valid");
        let spectra: Vec<Vec<u64>> = map_replicates(seed, 0x0401 + idx as u64, reps, |_, rng| {
            let g = sample_genealogy(&params, &OriginCondition::FixedTime(t), rng)
                .expect("valid");
            let set = place_mutations(&g, theta, rng).expect("valid");
            compute_sfs(&g, &set.events).xi
        });
        for k in 1..n {
            let closed = expected_sfs_fixed(n, k, theta, p, t).expect("valid");
            let values = spectra.iter().map(|xi| xi[(k - 1) as usize] as f64);
            let mean = values.clone().sum::<f64>() / reps as f64;
            let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / reps as f64;
            let z = (mean - closed).abs() / (var / reps as f64).sqrt();
            if z > max_z {
                max_z = z;
                worst = format!("tau={tau} k={k}: mean={mean:.4} closed={closed:.4}");
            }
        }
    }
    let (seconds, in_budget) = clock.stop();
    CriterionOutcome {
        criterion: "04 expected-sfs-fixed-mc".into(),
        statistic: Some(max_z),
        p_value: None,
        tolerance: 4.0,
        pass: max_z < 4.0 && in_budget,
        detail: format!(
            "n=10 theta=p=1, {reps} replicates per tau: max |mean-closed|/SE = {max_z:.2} \
             (need < 4; worst at {worst}){}",
            budget_note(in_budget, seconds, Some(120.0))
        ),
        seconds,
    }
}

/// Criterion 5: mixing the fixed-origin spectrum over the posterior origin
/// density reproduces the uniform-prior and log-uniform-prior closed forms
/// to relative 1e-6.
fn c05_prior_mixture_quadrature() -> CriterionOutcome {
    let clock = Clock::new(Some(5.0));
    let (n, theta, p) = (10u64, 1.0, 1.0);
    let mut max_rel: f64 = 0.0;
    for k in 1..n {
        let quadr = expected_sfs_quadrature(0, n, k, theta, p).expect("converges");
        let closed = n as f64 * theta / (k as f64 * p);
        max_rel = max_rel.max((quadr - closed).abs() / closed);
    }
    for k in 1..=(n - 3) {
        let quadr = expected_sfs_quadrature(1, n, k, theta, p).expect("converges");
        let closed = expected_sfs(&OriginCondition::PowerPrior(1), n, k, theta, p)
            .expect("closed form for k <= n-3")
            .value()
            .expect("finite");
        max_rel = max_rel.max((quadr - closed).abs() / closed);
    }
    let (seconds, in_budget) = clock.stop();
    CriterionOutcome {
        criterion: "05 prior-mixture-quadrature".into(),
        statistic: Some(max_rel),
        p_value: None,
        tolerance: 1e-6,
        pass: max_rel < 1e-6 && in_budget,
        detail: format!(
            "posterior mixture vs closed forms (priors 0 and 1, n=10, all valid k): max \
             relative error = {max_rel:.2e} (need < 1e-6){}",
            budget_note(in_budget, seconds, Some(5.0))
        ),
        seconds,
    }
}

/// Criterion 6: the branch-time decomposition of the expected spectrum
/// reproduces `n theta/(k p)` under the uniform prior to relative 1e-10.
fn c06_branch_time_identity() -> CriterionOutcome {
    let clock = Clock::new(None);
    let (theta, p) = (1.0, 1.0);
    let mut max_rel: f64 = 0.0;
    for &n in &[5u64, 10, 20] {
        for k in 1..n {
            let via_times = expected_sfs_via_branch_times(0, n, k, theta, p).expect("valid");
            let closed = n as f64 * theta / (k as f64 * p);
            max_rel = max_rel.max((via_times - closed).abs() / closed);
        }
    }
    let (seconds, _) = clock.stop();
    CriterionOutcome {
        criterion: "06 branch-time-identity".into(),
        statistic: Some(max_rel),
        p_value: None,
        tolerance: 1e-10,
        pass: max_rel < 1e-10,
        detail: format!(
            "inter-coalescence route vs n*theta/(k*p) for n in {{5,10,20}}, all k: max \
             relative error = {max_rel:.2e} (need < 1e-10)"
        ),
        seconds,
    }
}

/// Criterion 7: order-statistic moment formulas against Monte Carlo, plus
/// the finiteness boundary: the MRCA time has no mean under an infinite
/// origin, so its running average drifts far above any finite-moment scale.
fn c07_order_stat_moments(seed: u64) -> CriterionOutcome {
    let clock = Clock::new(None);
    let (n, p) = (10u64, 1.0);
    let params = ModelParams::new(n, p, 0.0, 2.0, 1.0).expect("valid");
    let reps = 100_000u64;

    // (i) infinite origin, k = 4, m = 1: C(6,1)/C(3,1) = 2
    let closed_inf = moment_order_stat(&OriginCondition::InfiniteTime, n, 4, 1, p)
        .expect("valid")
        .value()
        .expect("finite for m <= k-1");
    let draws: Vec<f64> = map_replicates(seed, 0x0701, reps, |_, rng| {
        sample_genealogy(&params, &OriginCondition::InfiniteTime, rng).expect("valid")
            .sorted_depths()[3]
    });
    let mean = draws.iter().sum::<f64>() / reps as f64;
    let var = draws.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / reps as f64;
    let z_inf = (mean - closed_inf).abs() / (var / reps as f64).sqrt();

    // (ii) uniform prior, k = 1, m = 1: C(9,1)/C(1,1) = 9
    let closed_uni = moment_order_stat(&OriginCondition::PowerPrior(0), n, 1, 1, p)
        .expect("valid")
        .value()
        .expect("finite for m <= k");
    let draws: Vec<f64> = map_replicates(seed, 0x0702, reps, |_, rng| {
        sample_genealogy(&params, &OriginCondition::PowerPrior(0), rng).expect("valid")
            .sorted_depths()[0]
    });
    let mean_uni = draws.iter().sum::<f64>() / reps as f64;
    let var = draws.iter().map(|x| (x - mean_uni) * (x - mean_uni)).sum::<f64>() / reps as f64;
    let z_uni = (mean_uni - closed_uni).abs() / (var / reps as f64).sqrt();

    // (iii) divergence of the MRCA mean under an infinite origin
    let divergent_reps = 1_000_000u64;
    let sum: f64 = map_replicates(seed, 0x0703, divergent_reps, |_, rng| {
        sample_genealogy(&params, &OriginCondition::InfiniteTime, rng).expect("valid")
            .sorted_depths()[0]
    })
    .iter()
    .sum();
    let divergent_mean = sum / divergent_reps as f64;
    let finite_scale = moment_order_stat(&OriginCondition::InfiniteTime, n, 2, 1, p)
        .expect("valid")
        .value()
        .expect("finite");
    let diverged = divergent_mean > 10.0 * finite_scale;

    let max_z = z_inf.max(z_uni);
    let (seconds, _) = clock.stop();
    CriterionOutcome {
        criterion: "07 order-stat-moments".into(),
        statistic: Some(max_z),
        p_value: None,
        tolerance: 4.0,
        pass: max_z < 4.0 && diverged,
        detail: format!(
            "infinite-origin (n=10,k=4,m=1) closed {closed_inf} z={z_inf:.2}; uniform-prior \
             (n=10,k=1,m=1) closed {closed_uni} z={z_uni:.2} (need < 4); MRCA running mean \
             {divergent_mean:.1} over 1e6 draws vs finite scale 10*{finite_scale} (must exceed)"
        ),
        seconds,
    }
}

/// Criterion 8: closed forms of the rational integrals against adaptive
/// quadrature, relative 1e-9 across the grid.
fn c08_rational_integrals() -> CriterionOutcome {
    let clock = Clock::new(Some(5.0));
    let mut max_rel: f64 = 0.0;
    for k in 2..=12i64 {
        for &x in &[0.1f64, 1.0, 10.0, 100.0] {
            for l in 0..=2i64 {
                let numeric = quad::integrate(
                    |t| t.powi((k - l) as i32) / (1.0 + t).powi(k as i32),
                    0.0,
                    x,
                    1e-13,
                )
                .expect("smooth integrand")
                .value;
                let closed = integral_i(k, l, x).expect("valid");
                max_rel = max_rel.max((closed - numeric).abs() / numeric.abs());
            }
            for l in 2..=k.min(6) {
                let numeric = quad::integrate(
                    |s| {
                        let t = x + s / (1.0 - s);
                        t.powi((k - l) as i32) / (1.0 + t).powi(k as i32) / (1.0 - s).powi(2)
                    },
                    0.0,
                    1.0,
                    1e-13,
                )
                .expect("smooth integrand")
                .value;
                let closed = match integral_j(k, l, x).expect("valid") {
                    ExtendedReal::Finite(v) => v,
                    ExtendedReal::Infinite => f64::INFINITY,
                };
                max_rel = max_rel.max((closed - numeric).abs() / numeric.abs());
            }
        }
    }
    let (seconds, in_budget) = clock.stop();
    CriterionOutcome {
        criterion: "08 rational-integrals".into(),
        statistic: Some(max_rel),
        p_value: None,
        tolerance: 1e-9,
        pass: max_rel < 1e-9 && in_budget,
        detail: format!(
            "I and J closed forms vs quadrature, k <= 12, x in {{0.1,1,10,100}}: max relative \
             error = {max_rel:.2e} (need < 1e-9){}",
            budget_note(in_budget, seconds, Some(5.0))
        ),
        seconds,
    }
}

/// Criterion 9: large-sample limit laws at n = 2000, alpha = 1, 1e4
/// replicates: posterior origin under the uniform prior vs inverse-gamma;
/// box counts of the depth measure vs Poisson(1/2); two deepest depths vs
/// exactly sampled top atoms.
fn c09_limit_theorems(seed: u64) -> CriterionOutcome {
    let clock = Clock::new(Some(300.0));
    let (n, alpha, reps) = (2000u64, 1.0, 10_000u64);
    let infinite =
        empirical_limit_check(&OriginCondition::InfiniteTime, n, alpha, seed, reps)
            .expect("valid");
    let prior = empirical_limit_check(&OriginCondition::PowerPrior(0), n, alpha, seed, reps)
        .expect("valid");
    // the named sub-checks: box count, two top depths, posterior origin
    let named: Vec<&crate::asymptotics::LimitCheck> = infinite
        .checks
        .iter()
        .chain(prior.checks.iter().take(1))
        .collect();
    let min_p = named.iter().map(|c| c.p_value).fold(f64::INFINITY, f64::min);
    let pass_named = named.iter().all(|c| c.pass);
    let extra = &prior.checks[1];
    let (seconds, in_budget) = clock.stop();
    CriterionOutcome {
        criterion: "09 limit-theorems".into(),
        statistic: Some(min_p),
        p_value: Some(min_p),
        tolerance: 0.01,
        pass: pass_named && in_budget,
        detail: format!(
            "n=2000 alpha=1, {reps} replicates: min p over {{box count, deepest, second \
             deepest, posterior origin}} = {min_p:.4} (need > 0.01); companion check '{}' p = \
             {:.4}{}",
            extra.name,
            extra.p_value,
            budget_note(in_budget, seconds, Some(300.0))
        ),
        seconds,
    }
}

/// Criterion 10: removing the i+1 largest atoms of the limit measure yields
/// the prior-i Cox law (two-sample KS on the new largest atom, 1e5
/// replicates, i in {0, 1}).
fn c10_largest_atom_removal(seed: u64) -> CriterionOutcome {
    let clock = Clock::new(None);
    let (alpha, eps, reps) = (1.0, 0.01, 100_000u64);
    let mut min_p = f64::INFINITY;
    for i in [0u64, 1] {
        let trimmed: Vec<f64> = map_replicates(seed, 0x1001 + i, reps, |_, rng| {
            let measure = sample_ppm_with_exact_top(alpha, i as usize + 2, eps, rng)
                .expect("valid");
            let remaining =
                remove_largest_atoms(&measure, i as usize + 1).expect("top atoms present");
            remaining.largest_atom().unwrap_or(0.0)
        });
        let fresh: Vec<f64> = map_replicates(seed, 0x1003 + i, reps, |_, rng| {
            let (_, measure) = sample_cox(i, alpha, eps, rng).expect("valid");
            measure.largest_atom().unwrap_or(0.0)
        });
        min_p = min_p.min(two_sample_ks(&trimmed, &fresh).expect("enough").p_value);
    }
    let (seconds, _) = clock.stop();
    CriterionOutcome {
        criterion: "10 largest-atom-removal".into(),
        statistic: Some(min_p),
        p_value: Some(min_p),
        tolerance: 0.01,
        pass: min_p > 0.01,
        detail: format!(
            "measure minus i+1 top atoms vs prior-i Cox sample, i in {{0,1}}, {reps} \
             replicates: min KS p = {min_p:.4} (need > 0.01)"
        ),
        seconds,
    }
}

/// Criterion 11: flattening of the normalized spectrum at a large fixed
/// origin: max_k |E xi_k / E S - 1/(n-1)| at n = 10, tau = 1e6, required
/// below 0.02.
///
/// The closed forms put this maximum at k = 1, where the deviation decays
/// only logarithmically in tau and still sits near 0.046 at tau = 1e6 (it
/// would need tau ~ 5e12 to drop below 0.02), so this criterion documents an
/// honest failure of the stated threshold; every k >= 2 deviation is within
/// it.
fn c11_sfs_flattening() -> CriterionOutcome {
    let clock = Clock::new(None);
    let (n, theta, p, t) = (10u64, 1.0, 1.0, 1e6);
    let total = expected_total_sites_fixed(n, theta, p, t).expect("valid");
    let limit = normalized_sfs_limit(n);
    let mut max_dev: f64 = 0.0;
    let mut max_dev_tail: f64 = 0.0; // over k >= 2
    for k in 1..n {
        let dev = (expected_sfs_fixed(n, k, theta, p, t).expect("valid") / total - limit).abs();
        max_dev = max_dev.max(dev);
        if k >= 2 {
            max_dev_tail = max_dev_tail.max(dev);
        }
    }
    let (seconds, _) = clock.stop();
    CriterionOutcome {
        criterion: "11 sfs-flattening".into(),
        statistic: Some(max_dev),
        p_value: None,
        tolerance: 0.02,
        pass: max_dev < 0.02,
        detail: format!(
            "n=10 tau=1e6: max_k |E xi_k/E S - 1/9| = {max_dev:.4} (need < 0.02; the k=1 \
             deviation shrinks only like 1/ln tau and would need tau ~ 5e12; max over k >= 2 \
             is {max_dev_tail:.4})"
        ),
        seconds,
    }
}

/// Criterion 12: in the coupled regime `p = n/alpha` with `alpha = theta = 1`
/// the uniform-prior expected spectrum equals `alpha theta / k` exactly for
/// every `n`, and the log-uniform-prior spectrum converges to it within 1%
/// by n = 1e4.
fn c12_limit_sfs() -> CriterionOutcome {
    let clock = Clock::new(None);
    let (alpha, theta) = (1.0, 1.0);
    let mut exact_holds = true;
    for &n in &[2u64, 5, 10, 100, 1000, 10_000] {
        let p = n as f64 / alpha;
        let ks: Vec<u64> = if n <= 100 {
            (1..n).collect()
        } else {
            vec![1, 2, 3, 7, n / 2, n - 1]
        };
        for k in ks {
            let value = expected_sfs(&OriginCondition::PowerPrior(0), n, k, theta, p)
                .expect("valid")
                .value()
                .expect("finite");
            if value != alpha * theta / k as f64 {
                exact_holds = false;
            }
        }
    }
    let n = 10_000u64;
    let p = n as f64 / alpha;
    let mut max_rel: f64 = 0.0;
    for k in [1u64, 2, 3] {
        let value = expected_sfs(&OriginCondition::PowerPrior(1), n, k, theta, p)
            .expect("valid")
            .value()
            .expect("finite");
        let limit = alpha * theta / k as f64;
        max_rel = max_rel.max((value - limit).abs() / limit);
    }
    let (seconds, _) = clock.stop();
    CriterionOutcome {
        criterion: "12 limit-sfs".into(),
        statistic: Some(max_rel),
        p_value: None,
        tolerance: 0.01,
        pass: exact_holds && max_rel < 0.01,
        detail: format!(
            "p=n/alpha, alpha=theta=1: uniform-prior spectrum equals 1/k exactly ({}); \
             log-uniform prior at n=1e4, k in {{1,2,3}}: max relative gap to 1/k = {max_rel:.4} \
             (need < 0.01)",
            if exact_holds { "yes" } else { "NO" }
        ),
        seconds,
    }
}
