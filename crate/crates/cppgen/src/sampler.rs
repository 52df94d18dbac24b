//! Exact sampling and density evaluation for the sample's coalescent point
//! process.
//!
//! Under a fixed origin `t` the node depths are i.i.d. with density
//! `x -> p/(1+px)^2 * (1+pt)/(pt)` on `(0, t)`; letting `t -> inf` drops the
//! truncation. Under the power prior `x -> x^{-i}` the origin acquires the
//! posterior density
//! `h_n^(i)(t) = p n C(n-1, i) (pt)^{n-i-1} / (1+pt)^{n+1}`,
//! and conditional on the origin the depths follow the fixed-`t` law. All
//! samplers are inverse-CDF transforms, so a genealogy consumes exactly
//! `n - 1` uniforms (`n` under a power prior) from its stream.

use crate::model::{ExtendedReal, Genealogy, ModelParams, OriginCondition};
use crate::numeric::{binomial, ln_binomial};
use crate::quad;
use crate::rng::{open01, Stream};
use crate::{Error, Result};

/// Closed-form moment of a depth order statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderStatMoment {
    pub regime: OriginCondition,
    /// Rank of the order statistic (1 is the deepest node, the MRCA time).
    pub k: u64,
    /// Moment order.
    pub m: u64,
    pub value: ExtendedReal,
}

fn check_rate(p: f64) -> Result<()> {
    if p.is_finite() && p > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("sampling rate p must be positive, got {p}")))
    }
}

fn check_fixed_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("origin time t must be positive, got {t}")))
    }
}

/// CDF of a node depth under a fixed origin `t`:
/// `F(x) = (px/(1+px)) (1+pt)/(pt)` for `0 <= x <= t`.
pub fn depth_cdf_fixed(x: f64, p: f64, t: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= t {
        1.0
    } else {
        (p * x / (1.0 + p * x)) * (1.0 + p * t) / (p * t)
    }
}

/// CDF of a node depth under an infinite origin: `F(x) = px/(1+px)`.
pub fn depth_cdf_infinite(x: f64, p: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        p * x / (1.0 + p * x)
    }
}

/// Quantile of the fixed-origin depth law: with `v = u * pt/(1+pt)`, returns
/// `v / (p (1 - v))`, which lies in `[0, t]`.
pub fn quantile_depth_fixed_t(u: f64, p: f64, t: f64) -> Result<f64> {
    check_rate(p)?;
    check_fixed_time(t)?;
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain(format!("quantile argument must lie in [0, 1], got {u}")));
    }
    let v = u * p * t / (1.0 + p * t);
    Ok(v / (p * (1.0 - v)))
}

/// Quantile of the infinite-origin depth law: `u / (p (1 - u))`.
///
/// The support is unbounded, so `u = 1` is outside the domain.
pub fn quantile_depth_infinite(u: f64, p: f64) -> Result<f64> {
    check_rate(p)?;
    if !(0.0..1.0).contains(&u) {
        return Err(Error::Domain(format!("quantile argument must lie in [0, 1), got {u}")));
    }
    Ok(u / (p * (1.0 - u)))
}

fn check_prior(n: u64, i: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("sample size must be positive".into()));
    }
    if i >= n {
        return Err(Error::Domain(format!("power prior needs i < n, got i = {i}, n = {n}")));
    }
    Ok(())
}

/// Posterior density of the origin time under the power prior `x -> x^{-i}`:
/// `h_n^(i)(t) = p n C(n-1, i) (pt)^{n-i-1} / (1+pt)^{n+1}`.
///
/// Evaluated in log space so large `n` does not overflow.
pub fn posterior_density(n: u64, p: f64, i: u64, t: f64) -> Result<f64> {
    check_prior(n, i)?;
    check_rate(p)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    let power = n - i - 1; // exponent of (pt)
    if t == 0.0 {
        return Ok(if power == 0 { p * n as f64 * binomial(n - 1, i) } else { 0.0 });
    }
    let ln_density = p.ln()
        + (n as f64).ln()
        + ln_binomial(n - 1, i)
        + power as f64 * (p * t).ln()
        - (n as f64 + 1.0) * (p * t).ln_1p();
    Ok(ln_density.exp())
}

/// Posterior CDF of the origin time: with `z = 1/(1+pt)`, equals the lower
/// binomial tail `P(Bin(n, z) <= i)`.
pub fn posterior_cdf(n: u64, p: f64, i: u64, t: f64) -> Result<f64> {
    check_prior(n, i)?;
    check_rate(p)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    Ok(binomial_lower_tail(n, i, 1.0 / (1.0 + p * t)))
}

/// `P(Bin(n, z) <= i)`, summed in log space (only `i + 1` terms).
fn binomial_lower_tail(n: u64, i: u64, z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z >= 1.0 {
        return 0.0;
    }
    let mut sum = 0.0;
    for m in 0..=i {
        sum += (ln_binomial(n, m) + m as f64 * z.ln() + (n - m) as f64 * (-z).ln_1p()).exp();
    }
    sum.min(1.0)
}

/// Derivative of [`binomial_lower_tail`] in `z`:
/// `-n C(n-1, i) z^i (1-z)^{n-1-i}`.
fn binomial_lower_tail_derivative(n: u64, i: u64, z: f64) -> f64 {
    -((n as f64).ln()
        + ln_binomial(n - 1, i)
        + i as f64 * z.ln()
        + (n - 1 - i) as f64 * (-z).ln_1p())
    .exp()
}

/// Solves `P(Bin(n, z) <= i) = u` for `z` in `(0, 1)` by bisection plus a
/// Newton polish on the closed-form binomial tail.
fn beta_tail_quantile(n: u64, i: u64, u: f64) -> f64 {
    debug_assert!(u > 0.0 && u < 1.0);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut z = 0.5;
    for _ in 0..70 {
        if binomial_lower_tail(n, i, z) > u {
            lo = z; // tail is decreasing in z
        } else {
            hi = z;
        }
        z = 0.5 * (lo + hi);
    }
    for _ in 0..4 {
        let f = binomial_lower_tail(n, i, z) - u;
        let step = f / binomial_lower_tail_derivative(n, i, z);
        let next = z - step;
        if next > lo && next < hi {
            z = next;
        }
    }
    z
}

/// Draws the origin time from its posterior `h_n^(i)` by the exact beta
/// transform: `y = pt/(1+pt)` is `Beta(n-i, i+1)`-distributed, so one uniform
/// inverted through the binomial tail CDF yields `t = y / (p (1-y))`.
/// Consumes exactly one uniform from the stream.
pub fn sample_origin_posterior(n: u64, p: f64, i: u64, rng: &mut Stream) -> Result<f64> {
    check_prior(n, i)?;
    check_rate(p)?;
    let u = open01(rng);
    Ok(origin_posterior_quantile(n, p, i, u))
}

/// Quantile function of the posterior origin time at level `u`.
pub fn origin_posterior_quantile(n: u64, p: f64, i: u64, u: f64) -> f64 {
    let z = beta_tail_quantile(n, i, u);
    (1.0 - z) / (p * z)
}

/// Draws a genealogy under the given origin condition.
///
/// * `FixedTime(t)`: `n - 1` i.i.d. depths through [`quantile_depth_fixed_t`].
/// * `InfiniteTime`: `n - 1` i.i.d. depths through [`quantile_depth_infinite`].
/// * `PowerPrior(i)`: one posterior origin draw, then `n - 1` depths
///   conditional on that origin.
pub fn sample_genealogy(
    params: &ModelParams,
    origin: &OriginCondition,
    rng: &mut Stream,
) -> Result<Genealogy> {
    origin.validate(params.n)?;
    let (n, p) = (params.n, params.p);
    match *origin {
        OriginCondition::FixedTime(t) => {
            let depths = (1..n)
                .map(|_| quantile_depth_fixed_t(open01(rng), p, t))
                .collect::<Result<Vec<_>>>()?;
            Genealogy::new(ExtendedReal::Finite(t), depths)
        }
        OriginCondition::InfiniteTime => {
            let depths = (1..n)
                .map(|_| quantile_depth_infinite(open01(rng), p))
                .collect::<Result<Vec<_>>>()?;
            Genealogy::new(ExtendedReal::Infinite, depths)
        }
        OriginCondition::PowerPrior(i) => {
            let t = sample_origin_posterior(n, p, i, rng)?;
            let depths = (1..n)
                .map(|_| quantile_depth_fixed_t(open01(rng), p, t))
                .collect::<Result<Vec<_>>>()?;
            Genealogy::new(ExtendedReal::Finite(t), depths)
        }
    }
}

/// Density of the `k`-th depth order statistic under a fixed origin `t`:
///
/// `f(s) = p (n-k) C(n-1, n-k) (ps)^{n-k-1} / (1+ps)^n
///         * (1+pt)^{n-k} / (pt)^{n-1} * (pt - ps)^{k-1}` for `s <= t`.
pub fn order_stat_density_fixed_t(n: u64, k: u64, p: f64, t: f64, s: f64) -> Result<f64> {
    check_order_stat_args(n, k)?;
    check_rate(p)?;
    check_fixed_time(t)?;
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::Domain(format!("depth must be nonnegative, got {s}")));
    }
    if s > t {
        return Ok(0.0);
    }
    let lead = n - k - 1; // exponent of (ps)
    let trail = k - 1; // exponent of (pt - ps)
    if (s == 0.0 && lead > 0) || (s == t && trail > 0) {
        return Ok(0.0);
    }
    let mut ln_density = p.ln() + ((n - k) as f64).ln() + ln_binomial(n - 1, n - k)
        - n as f64 * (p * s).ln_1p()
        + (n - k) as f64 * (p * t).ln_1p()
        - (n as f64 - 1.0) * (p * t).ln();
    if lead > 0 {
        ln_density += lead as f64 * (p * s).ln();
    }
    if trail > 0 {
        ln_density += trail as f64 * (p * (t - s)).ln();
    }
    Ok(ln_density.exp())
}

fn check_order_stat_args(n: u64, k: u64) -> Result<()> {
    if n < 2 || k == 0 || k > n - 1 {
        return Err(Error::Domain(format!(
            "order statistic rank needs 1 <= k <= n-1, got k = {k}, n = {n}"
        )));
    }
    Ok(())
}

/// `m`-th moment of the `k`-th depth order statistic.
///
/// Closed forms: under an infinite origin the moment is finite iff
/// `m <= k - 1` and equals `C(n-k+m-1, m) / (p^m C(k-1, m))`; under the
/// uniform prior (`PowerPrior(0)`) it is finite iff `m <= k` and equals
/// `C(n-k+m-1, m) / (p^m C(k, m))`. Under `PowerPrior(i >= 1)` the moment is
/// finite iff `m <= k + i`; no closed form exists, so the value comes from
/// adaptive quadrature of the order-statistic density against the posterior
/// origin density.
pub fn moment_order_stat(
    regime: &OriginCondition,
    n: u64,
    k: u64,
    m: u64,
    p: f64,
) -> Result<ExtendedReal> {
    check_order_stat_args(n, k)?;
    check_rate(p)?;
    if m == 0 {
        return Ok(ExtendedReal::Finite(1.0));
    }
    match *regime {
        OriginCondition::InfiniteTime => {
            if m <= k - 1 {
                Ok(ExtendedReal::Finite(
                    binomial(n - k + m - 1, m) / (p.powi(m as i32) * binomial(k - 1, m)),
                ))
            } else {
                Ok(ExtendedReal::Infinite)
            }
        }
        OriginCondition::PowerPrior(0) => {
            if m <= k {
                Ok(ExtendedReal::Finite(
                    binomial(n - k + m - 1, m) / (p.powi(m as i32) * binomial(k, m)),
                ))
            } else {
                Ok(ExtendedReal::Infinite)
            }
        }
        OriginCondition::PowerPrior(i) => {
            check_prior(n, i)?;
            if m <= k + i {
                Ok(ExtendedReal::Finite(moment_order_stat_quadrature(n, k, m, p, i)?))
            } else {
                Ok(ExtendedReal::Infinite)
            }
        }
        OriginCondition::FixedTime(_) => Err(Error::Unsupported(
            "order-statistic moments are provided for the infinite-origin and power-prior regimes"
                .into(),
        )),
    }
}

/// Convenience wrapper building an [`OrderStatMoment`] record.
pub fn order_stat_moment(
    regime: OriginCondition,
    n: u64,
    k: u64,
    m: u64,
    p: f64,
) -> Result<OrderStatMoment> {
    let value = moment_order_stat(&regime, n, k, m, p)?;
    Ok(OrderStatMoment { regime, k, m, value })
}

/// Quadrature route for power-prior moments (any `0 <= i < n`).
///
/// In the variables `y = pt/(1+pt)` and `w = y v`, the double integral of
/// `s^m` against the order-statistic density and the posterior collapses to
///
/// `E = int_0^1 n C(n-1,i) y^{n-i-1} (1-y)^i
///        [ (n-k) C(n-1,n-k) int_0^1 (y v / (p (1 - y v)))^m
///                                    v^{n-k-1} (1-v)^{k-1} dv ] dy`.
pub fn moment_order_stat_quadrature(n: u64, k: u64, m: u64, p: f64, i: u64) -> Result<f64> {
    check_order_stat_args(n, k)?;
    check_prior(n, i)?;
    let ln_outer = (n as f64).ln() + ln_binomial(n - 1, i);
    let ln_inner = ((n - k) as f64).ln() + ln_binomial(n - 1, n - k);
    let outer = quad::integrate(
        |y| {
            let inner = quad::integrate(
                |v| {
                    let s = y * v / (p * (1.0 - y * v));
                    (m as f64 * s.ln()
                        + (n - k - 1) as f64 * v.ln()
                        + (k - 1) as f64 * (-v).ln_1p()
                        + ln_inner)
                        .exp()
                },
                0.0,
                1.0,
                1e-10,
            )
            .map(|q| q.value)
            .unwrap_or(f64::NAN);
            (ln_outer + (n - i - 1) as f64 * y.ln() + i as f64 * (-y).ln_1p()).exp() * inner
        },
        0.0,
        1.0,
        1e-8,
    )?;
    if !outer.value.is_finite() {
        return Err(Error::QuadratureTolerance { achieved: f64::INFINITY, requested: 1e-8 });
    }
    Ok(outer.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use crate::stats::{chi_square_gof, ks_test};
    use proptest::prelude::*;

    #[test]
    fn quantile_fixed_endpoints_and_median() {
        assert_eq!(quantile_depth_fixed_t(0.0, 2.0, 3.0).unwrap(), 0.0);
        assert!((quantile_depth_fixed_t(1.0, 2.0, 3.0).unwrap() - 3.0).abs() < 1e-12);
        // median at p = t = 1 solves (x/(1+x)) * 2 = 1/2
        assert!((quantile_depth_fixed_t(0.5, 1.0, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(quantile_depth_fixed_t(1.5, 1.0, 1.0).is_err());
    }

    #[test]
    fn quantile_infinite_values() {
        assert_eq!(quantile_depth_infinite(0.0, 3.7).unwrap(), 0.0);
        assert!((quantile_depth_infinite(0.5, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((quantile_depth_infinite(0.9, 2.0).unwrap() - 4.5).abs() < 1e-12);
        assert!(quantile_depth_infinite(1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn quantile_inverts_cdf(u in 1e-6f64..0.999_999, p in 0.1f64..10.0, t in 0.1f64..50.0) {
            let x = quantile_depth_fixed_t(u, p, t).unwrap();
            prop_assert!((depth_cdf_fixed(x, p, t) - u).abs() < 1e-10);
            let x = quantile_depth_infinite(u, p).unwrap();
            prop_assert!((depth_cdf_infinite(x, p) - u).abs() < 1e-10);
        }
    }

    #[test]
    fn posterior_density_values() {
        // n = 2, i = 0: h(t) = 2 pt / (1+pt)^3 vanishes at 0
        assert_eq!(posterior_density(2, 1.0, 0, 0.0).unwrap(), 0.0);
        // n = 2, i = 1: h(t) = 2/(1+t)^3 starts at 2
        assert!((posterior_density(2, 1.0, 1, 0.0).unwrap() - 2.0).abs() < 1e-12);
        assert!(posterior_density(2, 1.0, 2, 1.0).is_err());
    }

    #[test]
    fn posterior_density_normalizes() {
        for &(n, i) in &[(5u64, 0u64), (5, 1), (5, 4), (10, 3)] {
            // map (0, inf) to (0, 1) by t = y/(1-y)
            let integral = quad::integrate(
                |y| {
                    let t = y / (1.0 - y);
                    posterior_density(n, 1.3, i, t).unwrap() / (1.0 - y).powi(2)
                },
                0.0,
                1.0,
                1e-10,
            )
            .unwrap()
            .value;
            assert!((integral - 1.0).abs() < 1e-8, "n={n} i={i}: {integral}");
        }
    }

    #[test]
    fn posterior_mode_matches_stationarity() {
        // mode of h_n^(i) sits at pt = (n-i-1)/(i+2)
        let (n, i, p) = (10u64, 0u64, 1.0);
        let mode = (n - i - 1) as f64 / (i + 2) as f64 / p;
        let h = |t: f64| posterior_density(n, p, i, t).unwrap();
        assert!(h(mode) > h(mode * 1.01));
        assert!(h(mode) > h(mode * 0.99));
    }

    #[test]
    fn posterior_quantile_unit_case() {
        // n = 1, i = 0: the beta variable is uniform, so u = 0.5 maps to t = 1
        assert!((origin_posterior_quantile(1, 1.0, 0, 0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn posterior_quantile_matches_numeric_cdf_inversion() {
        // independent oracle: bisection on the quadrature CDF of h_n^(i)
        for &(n, i) in &[(3u64, 0u64), (5, 2), (10, 1)] {
            let p = 1.7;
            for &u in &[0.05, 0.25, 0.5, 0.75, 0.95] {
                let exact = origin_posterior_quantile(n, p, i, u);
                let cdf = |t: f64| {
                    quad::integrate(
                        |y| {
                            let s = y / (1.0 - y);
                            posterior_density(n, p, i, s).unwrap() / (1.0 - y).powi(2)
                        },
                        0.0,
                        t / (1.0 + t),
                        1e-12,
                    )
                    .unwrap()
                    .value
                };
                let (mut lo, mut hi) = (0.0, 1e9);
                for _ in 0..120 {
                    let mid = 0.5 * (lo + hi);
                    if cdf(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                let oracle = 0.5 * (lo + hi);
                assert!(
                    (exact - oracle).abs() <= 1e-6 * oracle.max(1e-12),
                    "n={n} i={i} u={u}: exact={exact} oracle={oracle}"
                );
            }
        }
    }

    #[test]
    fn posterior_samples_pass_ks() {
        let (n, p, i) = (10u64, 1.0, 1u64);
        let mut rng = substream(101, 0, 0);
        let draws: Vec<f64> =
            (0..20_000).map(|_| sample_origin_posterior(n, p, i, &mut rng).unwrap()).collect();
        let r = ks_test(&draws, |t| posterior_cdf(n, p, i, t).unwrap()).unwrap();
        assert!(r.p_value > 0.01, "D = {}, p = {}", r.statistic, r.p_value);
    }

    #[test]
    fn genealogy_uniform_consumption_and_bounds() {
        let params = ModelParams::new(6, 1.0, 0.0, 5.0, 1.0).unwrap();
        let mut a = substream(7, 1, 0);
        let mut b = substream(7, 1, 0);
        let g = sample_genealogy(&params, &OriginCondition::FixedTime(2.0), &mut a).unwrap();
        assert_eq!(g.n(), 6);
        assert!(g.depths.iter().all(|&d| d > 0.0 && d < 2.0));
        // exactly n - 1 uniforms consumed: streams must coincide afterwards
        for _ in 0..5 {
            open01(&mut b);
        }
        assert_eq!(open01(&mut a), open01(&mut b));

        let mut a = substream(7, 2, 0);
        let mut b = substream(7, 2, 0);
        let g = sample_genealogy(&params, &OriginCondition::PowerPrior(1), &mut a).unwrap();
        let origin = g.origin.value().unwrap();
        assert!(g.depths.iter().all(|&d| d < origin));
        for _ in 0..6 {
            open01(&mut b);
        }
        assert_eq!(open01(&mut a), open01(&mut b));
    }

    #[test]
    fn fixed_depths_pass_ks_and_independence() {
        let params = ModelParams::new(4, 1.0, 0.0, 5.0, 1.0).unwrap();
        let origin = OriginCondition::FixedTime(2.0);
        let n_rep = 100_000u64;
        let samples: Vec<Genealogy> = crate::rng::map_replicates(0, 5, n_rep, |_, rng| {
            sample_genealogy(&params, &origin, rng).unwrap()
        });

        // marginal law of each coordinate
        for coord in 0..3 {
            let xs: Vec<f64> = samples.iter().map(|g| g.depths[coord]).collect();
            let r = ks_test(&xs, |x| depth_cdf_fixed(x, 1.0, 2.0)).unwrap();
            assert!(r.p_value > 0.01 / 3.0, "coord {coord}: p = {}", r.p_value);
        }

        // pairwise independence: quartile bins against the product law
        let quartiles: Vec<f64> = (1..4)
            .map(|q| quantile_depth_fixed_t(q as f64 / 4.0, 1.0, 2.0).unwrap())
            .collect();
        let bin = |x: f64| quartiles.iter().take_while(|&&q| x > q).count();
        for &(a, b) in &[(0usize, 1usize), (0, 2), (1, 2)] {
            let mut counts = vec![0u64; 16];
            for g in &samples {
                counts[bin(g.depths[a]) * 4 + bin(g.depths[b])] += 1;
            }
            let r = chi_square_gof(&counts, &vec![1.0 / 16.0; 16]).unwrap();
            assert!(r.p_value > 0.01 / 3.0, "pair ({a},{b}): p = {}", r.p_value);
        }
    }

    #[test]
    fn order_stat_density_reduces_and_normalizes() {
        // n = 2, k = 1 reduces to the single-depth density
        for &s in &[0.1, 0.5, 1.5] {
            let f = order_stat_density_fixed_t(2, 1, 1.0, 2.0, s).unwrap();
            let single = 1.0 / (1.0 + s).powi(2) * (1.0 + 2.0) / 2.0;
            assert!((f - single).abs() < 1e-12);
        }
        assert_eq!(order_stat_density_fixed_t(6, 3, 1.0, 2.0, 2.5).unwrap(), 0.0);
        let total = quad::integrate(
            |s| order_stat_density_fixed_t(6, 3, 1.0, 2.0, s).unwrap(),
            0.0,
            2.0,
            1e-10,
        )
        .unwrap()
        .value;
        assert!((total - 1.0).abs() < 1e-8, "integral = {total}");
    }

    #[test]
    fn moment_closed_forms() {
        let inf = OriginCondition::InfiniteTime;
        let uni = OriginCondition::PowerPrior(0);
        // C(8,1)/C(1,1) = 8
        assert_eq!(moment_order_stat(&inf, 10, 2, 1, 1.0).unwrap(), ExtendedReal::Finite(8.0));
        // MRCA time has no first moment under an infinite origin
        assert_eq!(moment_order_stat(&inf, 10, 1, 1, 1.0).unwrap(), ExtendedReal::Infinite);
        // C(9,1)/C(1,1) = 9
        assert_eq!(moment_order_stat(&uni, 10, 1, 1, 1.0).unwrap(), ExtendedReal::Finite(9.0));
        assert_eq!(moment_order_stat(&uni, 10, 1, 2, 1.0).unwrap(), ExtendedReal::Infinite);
    }

    #[test]
    fn uniform_prior_moments_match_shifted_infinite_forms() {
        // the uniform prior behaves like one extra depth: moments under
        // (n, k) match the infinite-origin moments under (n+1, k+1)
        for n in 3u64..12 {
            for k in 1..n {
                for m in 1..=k.min(3) {
                    let a =
                        moment_order_stat(&OriginCondition::PowerPrior(0), n, k, m, 1.3).unwrap();
                    let b =
                        moment_order_stat(&OriginCondition::InfiniteTime, n + 1, k + 1, m, 1.3)
                            .unwrap();
                    let (a, b) = (a.value().unwrap(), b.value().unwrap());
                    assert!((a - b).abs() < 1e-12 * a.max(1.0), "n={n} k={k} m={m}");
                }
            }
        }
    }

    #[test]
    fn quadrature_moments_match_closed_forms_at_i0() {
        for &(n, k, m) in &[(5u64, 2u64, 1u64), (6, 3, 2), (10, 1, 1)] {
            let closed = moment_order_stat(&OriginCondition::PowerPrior(0), n, k, m, 1.0)
                .unwrap()
                .value()
                .unwrap();
            let quadr = moment_order_stat_quadrature(n, k, m, 1.0, 0).unwrap();
            assert!(
                (quadr - closed).abs() < 1e-6 * closed,
                "n={n} k={k} m={m}: quad={quadr} closed={closed}"
            );
        }
    }

    #[test]
    fn log_uniform_prior_moment_is_finite_on_the_boundary() {
        // i = 1, k = 1: second moment finite (m <= k + i), third infinite
        let prior = OriginCondition::PowerPrior(1);
        let m2 = moment_order_stat(&prior, 6, 1, 2, 1.0).unwrap();
        assert!(m2.is_finite());
        assert!(m2.value().unwrap() > 0.0);
        assert_eq!(moment_order_stat(&prior, 6, 1, 3, 1.0).unwrap(), ExtendedReal::Infinite);
    }

    #[test]
    fn log_uniform_quadrature_moment_matches_monte_carlo() {
        let prior = OriginCondition::PowerPrior(1);
        let (n, k, p) = (6u64, 2u64, 1.0);
        let closed = moment_order_stat(&prior, n, k, 1, p).unwrap().value().unwrap();
        let params = ModelParams::new(n, p, 0.0, 5.0, 1.0).unwrap();
        let reps = 200_000u64;
        let means: Vec<f64> = crate::rng::map_replicates(19, 4, reps, |_, rng| {
            sample_genealogy(&params, &prior, rng).unwrap().sorted_depths()[(k - 1) as usize]
        });
        let mean = means.iter().sum::<f64>() / reps as f64;
        let var = means.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / reps as f64;
        let se = (var / reps as f64).sqrt();
        assert!((mean - closed).abs() < 4.0 * se, "mean = {mean}, closed = {closed}, se = {se}");
    }
}
