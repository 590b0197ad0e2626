//! Closed-form link probabilities and the asymptotic minimum-degree laws.
//!
//! Everything here is a pure function of its arguments and generic over the
//! [`Real`] scalar. The probabilities that depend on the key pool go through
//! [`special::log_choose`], so `P` in the tens of thousands is routine.

mod design;
pub mod special;

pub use design::{design_threshold, solve_min_ring_size, DesignGoal, DesignSolution};
pub use special::{ln_factorial, ln_gamma, log_choose};

use serde::{Deserialize, Serialize};

use crate::error::{AnalyticError, ParamError};
use crate::real::Real;

/// Parameters of the intersection graph `G_q(n, K, P) ∩ G(n, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams<T> {
    /// Number of sensors.
    pub n: usize,
    /// Keys preloaded on each sensor (`K`).
    pub ring_size: usize,
    /// Size of the key pool (`P`).
    pub pool_size: usize,
    /// Probability that a channel is on (`p`).
    pub channel_prob: T,
    /// Keys two sensors must share to secure a link.
    pub q: usize,
}

impl<T: Real> ModelParams<T> {
    pub fn new(
        n: usize,
        ring_size: usize,
        pool_size: usize,
        channel_prob: T,
        q: usize,
    ) -> Result<Self, ParamError> {
        let params = Self {
            n,
            ring_size,
            pool_size,
            channel_prob,
            q,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        if self.n < 2 {
            return Err(ParamError::TooFewNodes(self.n));
        }
        if self.ring_size == 0 {
            return Err(ParamError::EmptyRing);
        }
        if self.ring_size > self.pool_size {
            return Err(ParamError::RingExceedsPool {
                ring: self.ring_size,
                pool: self.pool_size,
            });
        }
        if self.q == 0 {
            return Err(ParamError::ZeroThreshold);
        }
        let p = self.channel_prob;
        if !(p >= T::zero() && p <= T::one()) {
            return Err(ParamError::ChannelProbability(p.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(())
    }

    /// `K^2 / P`, the quantity the asymptotic laws assume vanishes.
    pub fn ring_pool_ratio(&self) -> T {
        let k = T::from_count(self.ring_size);
        k * k / T::from_count(self.pool_size)
    }

    pub fn with_ring_size(self, ring_size: usize) -> Self {
        Self { ring_size, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkProbabilities<T> {
    /// Probability that two rings share at least `q` keys.
    pub p_shared: T,
    /// Probability of a secure link: `p · p_shared`.
    pub p_link: T,
    /// `P < 2K`: the closed form was derived for `P >= 2K`. The value is still
    /// the exact hypergeometric tail.
    pub small_pool: bool,
}

/// True when `P < 2K`.
pub fn is_small_pool(ring_size: usize, pool_size: usize) -> bool {
    pool_size < 2 * ring_size
}

/// `P[|S_i ∩ S_j| = u]` for two independent uniform `K`-subsets of a `P`-pool,
/// for `u = 0..=K`. Impossible overlaps are exactly zero.
pub fn overlap_pmf<T: Real>(ring_size: usize, pool_size: usize) -> Vec<T> {
    let k = ring_size;
    let norm = log_choose::<T>(pool_size, k);
    (0..=k)
        .map(|u| {
            if k - u > pool_size - k {
                return T::zero();
            }
            let log_term = log_choose::<T>(k, u) + log_choose::<T>(pool_size - k, k - u) - norm;
            log_term.exp()
        })
        .collect()
}

fn ascending_sum<T: Real>(mut terms: Vec<T>) -> T {
    terms.sort_by(|a, b| a.partial_cmp(b).expect("finite hypergeometric terms"));
    terms.into_iter().fold(T::zero(), |acc, t| acc + t)
}

/// Probability that two key rings share at least `q` keys.
///
/// Whichever tail of the overlap distribution is smaller is summed directly,
/// so values near 0 and near 1 both keep full relative precision.
pub fn p_shared_exact<T: Real>(ring_size: usize, pool_size: usize, q: usize) -> Result<T, AnalyticError> {
    if ring_size > pool_size {
        return Err(ParamError::RingExceedsPool {
            ring: ring_size,
            pool: pool_size,
        }
        .into());
    }
    if q == 0 {
        return Err(ParamError::ZeroThreshold.into());
    }
    if q > ring_size {
        return Ok(T::zero());
    }
    let pmf = overlap_pmf::<T>(ring_size, pool_size);
    let upper = ascending_sum(pmf[q..].to_vec());
    let value = if upper < T::lit(0.5) {
        upper
    } else {
        T::one() - ascending_sum(pmf[..q].to_vec())
    };
    Ok(value.max(T::zero()).min(T::one()))
}

pub fn p_link<T: Real>(params: &ModelParams<T>) -> Result<LinkProbabilities<T>, AnalyticError> {
    params.validate()?;
    let p_shared = p_shared_exact::<T>(params.ring_size, params.pool_size, params.q)?;
    Ok(LinkProbabilities {
        p_shared,
        p_link: params.channel_prob * p_shared,
        small_pool: is_small_pool(params.ring_size, params.pool_size),
    })
}

/// Small-overlap approximation `(K^2 / P)^q / q!`, clamped to `[0, 1]`.
pub fn p_shared_approx<T: Real>(ring_size: usize, pool_size: usize, q: usize) -> T {
    let ratio = T::from_count(ring_size) * T::from_count(ring_size) / T::from_count(pool_size);
    let log_value = T::from_count(q) * ratio.ln() - ln_factorial::<T>(q as u64);
    log_value.exp().max(T::zero()).min(T::one())
}

/// Poisson mean `λ_{n,h} = n (n p_link)^h e^{-n p_link} / h!` of the number of
/// degree-`h` nodes, evaluated in log space.
pub fn lambda_for<T: Real>(n: usize, p_link: T, h: u32) -> T {
    let nf = T::from_count(n);
    let mean_degree = nf * p_link;
    if mean_degree <= T::zero() {
        return if h == 0 { nf } else { T::zero() };
    }
    let hf = T::from_u32(h).expect("h fits scalar");
    let log_lambda = nf.ln() + hf * mean_degree.ln() - ln_factorial::<T>(h as u64) - mean_degree;
    log_lambda.exp()
}

/// Poisson probability mass `λ^m e^{-λ} / m!`.
pub fn poisson_pmf<T: Real>(lambda: T, m: u64) -> T {
    if lambda <= T::zero() {
        return if m == 0 { T::one() } else { T::zero() };
    }
    let mf = T::from_u64(m).expect("count fits scalar");
    (mf * lambda.ln() - lambda - ln_factorial::<T>(m)).exp()
}

pub fn lambda_poisson<T: Real>(params: &ModelParams<T>, h: u32) -> Result<T, AnalyticError> {
    let probs = p_link(params)?;
    Ok(lambda_for(params.n, probs.p_link, h))
}

/// Both ways of writing `n p_link` against the `ln n + (ℓ - 1) ln ln n` ladder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticDecomposition<T> {
    pub k: u32,
    /// `n p_link - ln n - (k - 1) ln ln n`.
    pub alpha: T,
    /// Integer level closest to `n p_link` on the ladder.
    pub ell_star: i64,
    /// Residual at `ell_star`.
    pub gamma_star: T,
}

fn log_terms<T: Real>(n: usize) -> Result<(T, T), AnalyticError> {
    if n < 3 {
        return Err(AnalyticError::Domain(n));
    }
    let ln_n = T::from_count(n).ln();
    Ok((ln_n, ln_n.ln()))
}

/// Residual `α` in `p_link = (ln n + (k - 1) ln ln n + α) / n`.
///
/// An edgeless model (`p_link = 0`) yields `α = -∞`.
pub fn alpha_for<T: Real>(n: usize, p_link: T, k: u32) -> Result<T, AnalyticError> {
    let (ln_n, lnln_n) = log_terms::<T>(n)?;
    if p_link <= T::zero() {
        return Ok(T::neg_infinity());
    }
    Ok(residual(n, p_link, ln_n, lnln_n, i64::from(k)))
}

fn residual<T: Real>(n: usize, p_link: T, ln_n: T, lnln_n: T, level: i64) -> T {
    let steps = T::from_i64(level - 1).expect("level fits scalar");
    T::from_count(n) * p_link - ln_n - steps * lnln_n
}

pub fn decompose_alpha<T: Real>(params: &ModelParams<T>, k: u32) -> Result<T, AnalyticError> {
    if k == 0 {
        return Err(AnalyticError::InvalidArgument("k must be at least 1".into()));
    }
    let probs = p_link(params)?;
    alpha_for(params.n, probs.p_link, k)
}

/// `(ℓ*, γ*)`: the integer `ℓ` minimising `|p_link - (ln n + (ℓ - 1) ln ln n)/n|`
/// and the residual there. Exact ties go to the smaller `ℓ`.
pub fn ell_gamma_for<T: Real>(n: usize, p_link: T) -> Result<(i64, T), AnalyticError> {
    let (ln_n, lnln_n) = log_terms::<T>(n)?;
    let position = (T::from_count(n) * p_link - ln_n) / lnln_n;
    let below = position.floor();
    let frac = position - below;
    let tie_tol = T::epsilon().sqrt() * (T::one() + position.abs());
    let half = T::lit(0.5);
    let steps = if frac > half + tie_tol { below + T::one() } else { below };
    let ell_star = steps.to_i64().expect("ladder level fits i64") + 1;
    Ok((ell_star, residual(n, p_link, ln_n, lnln_n, ell_star)))
}

pub fn select_ell_gamma<T: Real>(params: &ModelParams<T>) -> Result<(i64, T), AnalyticError> {
    let probs = p_link(params)?;
    ell_gamma_for(params.n, probs.p_link)
}

pub fn decompose<T: Real>(params: &ModelParams<T>, k: u32) -> Result<AsymptoticDecomposition<T>, AnalyticError> {
    let alpha = decompose_alpha(params, k)?;
    let (ell_star, gamma_star) = select_ell_gamma(params)?;
    Ok(AsymptoticDecomposition {
        k,
        alpha,
        ell_star,
        gamma_star,
    })
}

/// Limiting `P[δ >= k] = exp(-e^{-α} / (k - 1)!)`.
///
/// `α = +∞` gives 1 and `α = -∞` gives 0. `k = 0` is trivially 1.
pub fn prob_min_degree_at_least<T: Real>(k: u32, alpha: T) -> T {
    if k == 0 {
        return T::one();
    }
    let exponent = (-alpha - ln_factorial::<T>(u64::from(k) - 1)).exp();
    (-exponent).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmfRegime {
    DegenerateZero,
    TwoPoint,
}

/// Limiting distribution of the minimum degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinDegreePmf<T> {
    /// `(degree, probability)`, ascending by degree.
    pub support: Vec<(u64, T)>,
    pub regime: PmfRegime,
}

impl<T: Real> MinDegreePmf<T> {
    /// Builds the law from a ladder level and residual.
    pub fn from_level(ell_star: i64, gamma_star: T) -> Self {
        if ell_star <= 0 {
            return Self {
                support: vec![(0, T::one())],
                regime: PmfRegime::DegenerateZero,
            };
        }
        let top = ell_star as u64;
        let upper = prob_min_degree_at_least(top as u32, gamma_star);
        Self {
            support: vec![(top - 1, T::one() - upper), (top, upper)],
            regime: PmfRegime::TwoPoint,
        }
    }

    pub fn prob(&self, degree: u64) -> T {
        self.support
            .iter()
            .find(|(d, _)| *d == degree)
            .map_or(T::zero(), |(_, p)| *p)
    }
}

pub fn min_degree_pmf_asymptotic<T: Real>(params: &ModelParams<T>) -> Result<MinDegreePmf<T>, AnalyticError> {
    let (ell_star, gamma_star) = select_ell_gamma(params)?;
    Ok(MinDegreePmf::from_level(ell_star, gamma_star))
}
