//! Closed-form and numeric evaluations of the analytic welfare bounds.
//! These are constants rather than allocation data, so they use `f64`.

use crate::error::{Error, Result};

/// Asymptotic RSD linear-welfare guarantee for parameters `alpha`, `beta`:
/// `min(1/2 + (alpha - beta)^3 / 6, 1 / (2 (1 - beta + alpha beta)))`.
///
/// The first term is `1/2` plus `∫_beta^alpha (alpha - x)(x - beta) dx`.
pub fn rsd_general_linear_bound(alpha: f64, beta: f64) -> Result<f64> {
    if !(0.0 < beta && beta < alpha && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "need 0 < beta < alpha < 1, got alpha = {alpha}, beta = {beta}"
        )));
    }
    let gain = 0.5 + (alpha - beta).powi(3) / 6.0;
    let fallback = 1.0 / (2.0 * (1.0 - beta + alpha * beta));
    Ok(gain.min(fallback))
}

/// Finite-`n` benefit rate at step `t`:
/// `(alpha - (t+2)/(n+1)) * (t/n - beta)`.
pub fn rsd_finite_benefit_integrand(alpha: f64, beta: f64, n: f64, t: f64) -> f64 {
    (alpha - (t + 2.0) / (n + 1.0)) * (t / n - beta)
}

/// `LHS - RHS` of the PS linear-welfare balance equation
/// `1/2 + (1-b) b^2 / 2 + b^3 / 6 = b (1/2 + b - b^2 / 2)`.
pub fn ps_constant_residual(beta: f64) -> f64 {
    let lhs = 0.5 + (1.0 - beta) * beta * beta / 2.0 + beta.powi(3) / 6.0;
    let rhs = beta * (0.5 + beta - beta * beta / 2.0);
    lhs - rhs
}

/// Root in `(0, 1)` of [`ps_constant_residual`], by bisection to `1e-8`.
pub fn ps_general_linear_constant() -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    debug_assert!(ps_constant_residual(lo) > 0.0 && ps_constant_residual(hi) < 0.0);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if ps_constant_residual(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Per-agent happy-fraction guarantee for bundles of size `k`:
/// `1 - k ln(1 + 1/k)`.
pub fn kdemand_lower_bound(k: u32) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("K must be at least 1".into()));
    }
    let k = f64::from(k);
    Ok(1.0 - k * (1.0 / k).ln_1p())
}

/// Finite-`n` version: `(1/n) * sum_{t=1}^{n/(K+1)} (n - (K+1) t) / (n - t)`.
pub fn kdemand_finite_bound(n: usize, k: usize) -> f64 {
    let nf = n as f64;
    let steps = n / (k + 1);
    (1..=steps)
        .map(|t| (nf - ((k + 1) * t) as f64) / (nf - t as f64))
        .sum::<f64>()
        / nf
}
