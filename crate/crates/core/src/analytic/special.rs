//! Log-space combinatorics.
//!
//! Key pools in practice run to `P = 10^4` and beyond, where `C(P, K)` is far
//! outside any fixed-width integer or float. Everything here returns natural
//! logarithms so the hypergeometric terms can be formed as differences and
//! exponentiated only at the end.

use crate::real::Real;

/// Below this argument the recurrence `ln Γ(x) = ln Γ(x + 1) - ln x` is used to
/// shift into the region where the asymptotic series is accurate to round-off.
const STIRLING_MIN: f64 = 15.0;

/// Largest `min(b, a - b)` for which `ln C(a, b)` is summed term by term.
const DIRECT_SUM_MAX: usize = 64;

/// Bernoulli-number coefficients `B_{2j} / (2j (2j - 1))` of the Stirling series.
const STIRLING_SERIES: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
];

/// Natural log of the gamma function for `x > 0`.
///
/// Returns NaN for `x <= 0`; callers in this crate only ask for `Γ(m + 1)`.
pub fn ln_gamma<T: Real>(x: T) -> T {
    if !(x > T::zero()) {
        return T::nan();
    }
    if x.is_infinite() {
        return x;
    }
    let floor = T::lit(STIRLING_MIN);
    let mut z = x;
    let mut shift = T::zero();
    while z < floor {
        shift = shift + z.ln();
        z = z + T::one();
    }

    let half = T::lit(0.5);
    (z - half) * z.ln() - z + half * (T::PI() + T::PI()).ln() + stirling_tail(z) - shift
}

/// `ln Γ(z) - [(z - 1/2) ln z - z + ln(2π)/2]` for `z >= STIRLING_MIN`.
fn stirling_tail<T: Real>(z: T) -> T {
    let z2 = z * z;
    let mut power = z;
    let mut acc = T::zero();
    for c in STIRLING_SERIES {
        acc = acc + T::lit(c) / power;
        power = power * z2;
    }
    acc
}

/// `ln(m!)`.
pub fn ln_factorial<T: Real>(m: u64) -> T {
    if m < 2 {
        return T::zero();
    }
    if m <= 20 {
        // 20! < 2^63, exact in u64 and rounded once on conversion.
        let exact: u64 = (2..=m).product();
        return T::from_u64(exact).expect("factorial fits scalar").ln();
    }
    ln_gamma(T::from_u64(m).expect("count fits scalar") + T::one())
}

/// `ln C(a, b)`; negative infinity when `b > a` (the coefficient is zero).
pub fn log_choose<T: Real>(a: usize, b: usize) -> T {
    if b > a {
        return T::neg_infinity();
    }
    let m = b.min(a - b);
    if m == 0 {
        return T::zero();
    }
    if m <= DIRECT_SUM_MAX {
        // C(a, m) = prod_{i=1}^{m} (a - m + i) / i, accumulated smallest ratio first.
        let base = a - m;
        let mut acc = T::zero();
        for i in (1..=m).rev() {
            let ratio = T::from_count(base + i) / T::from_count(i);
            acc = acc + ratio.ln();
        }
        return acc;
    }
    // ln Γ(x) - ln Γ(z) with x = a + 1, z = a - m + 1 >= a / 2, written so the
    // O(a ln a) parts cancel analytically instead of in floating point.
    let mf = T::from_count(m);
    let x = T::from_count(a) + T::one();
    let z = T::from_count(a - m) + T::one();
    let half = T::lit(0.5);
    let ratio_gamma = (z - half) * (mf / z).ln_1p() + mf * (x.ln() - T::one()) + stirling_tail(x) - stirling_tail(z);
    ratio_gamma - ln_gamma(mf + T::one())
}
