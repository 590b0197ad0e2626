//! Parameter design: threshold link probabilities for a target minimum
//! degree, and the smallest key ring that reaches them.

use serde::{Deserialize, Serialize};

use super::{ln_factorial, p_shared_exact};
use crate::error::AnalyticError;
use crate::real::Real;

/// What the design should guarantee about the minimum degree `δ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignGoal<T> {
    /// `δ >= k` asymptotically almost surely; `c > 0` is the margin in units of `ln ln n`.
    AlmostSure { c: T },
    /// `δ >= k` with probability at least `rho`, `0 < rho < 1`.
    WithProb { rho: T },
    /// `δ = k` asymptotically almost surely, `0 < c < 1`.
    ExactK { c: T },
}

/// Right-hand side of the design guideline selected by `goal`, as a bound
/// (or target, for [`DesignGoal::ExactK`]) on `p_link`.
pub fn design_threshold<T: Real>(n: usize, k: u32, goal: DesignGoal<T>) -> Result<T, AnalyticError> {
    if n < 3 {
        return Err(AnalyticError::Domain(n));
    }
    if k == 0 {
        return Err(AnalyticError::InvalidArgument("k must be at least 1".into()));
    }
    let nf = T::from_count(n);
    let ln_n = nf.ln();
    let lnln_n = ln_n.ln();
    let kf = T::from_u32(k).expect("k fits scalar");
    let ladder = |c: T| (ln_n + (kf + c - T::one()) * lnln_n) / nf;

    match goal {
        DesignGoal::AlmostSure { c } => {
            if !(c > T::zero()) || !c.is_finite() {
                return Err(AnalyticError::InvalidArgument(format!(
                    "almost-sure margin c must be positive and finite (got {c})"
                )));
            }
            Ok(ladder(c))
        }
        DesignGoal::ExactK { c } => {
            if !(c > T::zero() && c < T::one()) {
                return Err(AnalyticError::InvalidArgument(format!(
                    "exact-k margin c must lie in (0, 1) (got {c})"
                )));
            }
            Ok(ladder(c))
        }
        DesignGoal::WithProb { rho } => {
            if rho == T::one() {
                return Err(AnalyticError::NoFeasibleDesign(
                    "probability 1 needs an infinite link probability; use the almost-sure goal".into(),
                ));
            }
            if !(rho > T::zero() && rho < T::one()) {
                return Err(AnalyticError::InvalidArgument(format!(
                    "target probability rho must lie in (0, 1) (got {rho})"
                )));
            }
            let log_inv_rho = -(rho - T::one()).ln_1p();
            let correction = ln_factorial::<T>(u64::from(k) - 1) + log_inv_rho.ln();
            Ok((ln_n + (kf - T::one()) * lnln_n - correction) / nf)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSolution<T> {
    pub ring_size: usize,
    /// `p_link` actually achieved at `ring_size`.
    pub p_link: T,
}

/// Smallest `K` in `[q, P]` with `p · p_shared(K, P, q) >= threshold`.
///
/// `p_shared` is non-decreasing in `K`, so this is a binary search.
pub fn solve_min_ring_size<T: Real>(
    pool_size: usize,
    channel_prob: T,
    q: usize,
    threshold: T,
) -> Result<DesignSolution<T>, AnalyticError> {
    if !threshold.is_finite() {
        return Err(AnalyticError::InvalidArgument(format!("threshold must be finite (got {threshold})")));
    }
    if !(channel_prob >= T::zero() && channel_prob <= T::one()) {
        return Err(AnalyticError::InvalidArgument(format!(
            "channel probability must lie in [0, 1] (got {channel_prob})"
        )));
    }
    if q == 0 {
        return Err(AnalyticError::InvalidArgument("q must be at least 1".into()));
    }
    if q > pool_size {
        return Err(AnalyticError::NoFeasibleDesign(format!(
            "q = {q} exceeds the pool size {pool_size}"
        )));
    }
    let link = |ring: usize| -> Result<T, AnalyticError> { Ok(channel_prob * p_shared_exact::<T>(ring, pool_size, q)?) };

    let best = link(pool_size)?;
    if best < threshold {
        return Err(AnalyticError::NoFeasibleDesign(format!(
            "even K = P = {pool_size} gives p_link = {best}, below the required {threshold}"
        )));
    }
    let (mut lo, mut hi) = (q, pool_size);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if link(mid)? >= threshold {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(DesignSolution {
        ring_size: lo,
        p_link: link(lo)?,
    })
}
