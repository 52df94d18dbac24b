//! Exact and numerically stable scalar kernels: harmonic numbers, binomial
//! coefficients, logarithm tail series, and the two families of rational
//! integrals `I_{k,l}` and `J_{k,l}` that the closed-form expectations reduce
//! to.

use statrs::function::gamma::ln_gamma;

use crate::model::ExtendedReal;
use crate::{Error, Result};

/// Largest `n` for which binomial coefficients are computed by exact integer
/// arithmetic; beyond this the log-gamma route takes over.
const BINOMIAL_EXACT_LIMIT: u64 = 60;

/// Relative cutoff for truncating the logarithm tail series.
const SERIES_EPS: f64 = 1e-18;

/// `k`-th harmonic number `1 + 1/2 + ... + 1/k`, summed in ascending order so
/// that `harmonic(k) == harmonic(k - 1) + 1.0 / k as f64` holds exactly as a
/// floating-point recurrence. `harmonic(0) == 0`.
pub fn harmonic(k: u64) -> f64 {
    let mut sum = 0.0;
    for j in 1..=k {
        sum += 1.0 / j as f64;
    }
    sum
}

/// Binomial coefficient as a float: exact 128-bit integer arithmetic up to
/// `n = 60`, log-gamma above. Returns 0 for `k > n`.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= BINOMIAL_EXACT_LIMIT {
        let mut acc: u128 = 1;
        for i in 1..=k as u128 {
            acc = acc * (n as u128 - k as u128 + i) / i;
        }
        acc as f64
    } else {
        ln_binomial(n, k).exp()
    }
}

/// Natural log of the binomial coefficient; requires `k <= n`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0)
}

/// Tail of the logarithm series starting at index `m`:
/// `sum_{i >= m} y^i / i` for `0 <= y < 1`, `m >= 1`.
///
/// This equals `-ln(1 - y) - sum_{i < m} y^i / i` but is free of the
/// cancellation that ruins the subtracted form when the tail is tiny.
pub fn log_series_tail(m: u64, y: f64) -> f64 {
    debug_assert!(m >= 1);
    y.powi(m as i32) * log_series_tail_shifted(m, y)
}

/// `sum_{j >= 0} y^j / (j + m)`, so that
/// `log_series_tail(m, y) == y^m * log_series_tail_shifted(m, y)`.
///
/// Truncated once a term falls below `1e-18` of the accumulated sum.
pub fn log_series_tail_shifted(m: u64, y: f64) -> f64 {
    debug_assert!(m >= 1);
    debug_assert!((0.0..1.0).contains(&y));
    let mut sum = 0.0;
    let mut power = 1.0;
    let mut j = 0u64;
    loop {
        let term = power / (j + m) as f64;
        sum += term;
        if term < SERIES_EPS * sum {
            return sum;
        }
        power *= y;
        j += 1;
    }
}

fn check_integral_domain(k: i64, l: i64) -> Result<()> {
    if k < l {
        return Err(Error::Domain(format!("integral needs k >= l, got k = {k}, l = {l}")));
    }
    Ok(())
}

/// `I_{k,l}(x) = int_0^x t^{k-l} / (1+t)^k dt` for `l` in `{0, 1, 2}`,
/// evaluated through tail series in `y = x / (1 + x)` so that no alternating
/// cancellation occurs.
pub fn integral_i(k: i64, l: i64, x: f64) -> Result<f64> {
    check_integral_i_args(k, l, x)?;
    let (k, y) = (k as u64, x / (1.0 + x));
    Ok(match l {
        0 => y.powi(k as i32 + 1) * ((1.0 + x) - k as f64 * log_series_tail_shifted(k + 1, y)),
        1 => log_series_tail(k, y),
        2 => y.powi(k as i32 - 1) / (k as f64 - 1.0),
        _ => unreachable!(),
    })
}

/// `I_{k,l}(x)` through the alternating closed forms. Exact for small `k` but
/// loses digits to cancellation as `k` grows; kept alongside the stabilized
/// route so the two can be checked against each other.
pub fn integral_i_alternating(k: i64, l: i64, x: f64) -> Result<f64> {
    check_integral_i_args(k, l, x)?;
    let k = k as u64;
    Ok(match l {
        0 => {
            let mut sum = x - k as f64 * x.ln_1p();
            for j in 1..k {
                let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
                sum += sign / j as f64
                    * binomial(k, j + 1)
                    * (1.0 - (1.0 + x).powi(-(j as i32)));
            }
            sum
        }
        1 => {
            let mut sum = x.ln_1p();
            for j in 1..k {
                let sign = if j % 2 == 1 { -1.0 } else { 1.0 };
                sum += sign / j as f64
                    * binomial(k - 1, j)
                    * (1.0 - (1.0 + x).powi(-(j as i32)));
            }
            sum
        }
        2 => (x / (1.0 + x)).powi(k as i32 - 1) / (k as f64 - 1.0),
        _ => unreachable!(),
    })
}

fn check_integral_i_args(k: i64, l: i64, x: f64) -> Result<()> {
    check_integral_domain(k, l)?;
    if !(0..=2).contains(&l) {
        return Err(Error::Domain(format!("integral_i supports l in {{0, 1, 2}}, got {l}")));
    }
    if k < 0 {
        return Err(Error::Domain(format!("integral_i needs k >= 0, got {k}")));
    }
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Domain(format!("integral_i needs x >= 0, got {x}")));
    }
    Ok(())
}

/// `J_{k,l}(x) = int_x^inf t^{k-l} / (1+t)^k dt`.
///
/// The integral is finite exactly when `l >= 2`; for `l < 2` the result is
/// `+inf`. Errors if `k < l`.
pub fn integral_j(k: i64, l: i64, x: f64) -> Result<ExtendedReal> {
    check_integral_domain(k, l)?;
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Domain(format!("integral_j needs x >= 0, got {x}")));
    }
    if l < 2 {
        return Ok(ExtendedReal::Infinite);
    }
    let (k, l) = (k as u64, l as u64);
    // term_0 = (1+x)^{1-l} (l-2)! / ((k-1)...(k-l+1)); successive terms pick
    // up a factor x/(1+x) * (j+l-1)/(j+1). The factorial ratio is built from
    // sub-unit factors m/(k-m), so it neither overflows nor loses accuracy.
    let mut term = (1.0 + x).powi(1 - l as i32) / (k - l + 1) as f64;
    for m in 1..=(l - 2) {
        term *= m as f64 / (k - m) as f64;
    }
    let ratio_base = x / (1.0 + x);
    let mut sum = 0.0;
    for j in 0..=(k - l) {
        sum += term;
        term *= ratio_base * (j + l - 1) as f64 / (j + 1) as f64;
    }
    Ok(ExtendedReal::Finite(sum))
}
