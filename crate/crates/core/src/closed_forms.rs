//! Exact constants, closed-form moment functions, reference distributions,
//! Hermite/Edgeworth machinery, and enumeration/quadrature oracles.
//!
//! The threshold time `N_t` (first step at which every gap is `<= t`) has
//! exact mean `mu(t) = 2/t - 1` and variance `v(t)`, piecewise in `t` with
//! the constant `s0 = 8 ln 2 - 5` governing the small-`t` branch. The
//! variance defect `w(t) = v(t) - s0/t` on (1/2, 1) drives the conditional
//! variance statistics. The limit variance for the max-gap CLT is
//! `sigma2 = 16 ln 2 - 10 = 2 s0`, and `gamma = 17/6 - 4 ln 2` is the mean
//! variance-defect per captured gap, tied to `s0` by `s0 = 2/3 - 2 gamma`.

use crate::error::{Error, Result};
use crate::quad;
use crate::special;

/// Limit variance of the max-gap CLT: `16 ln 2 - 10`.
pub const SIGMA2: f64 = 16.0 * std::f64::consts::LN_2 - 10.0;

/// Small-threshold variance constant: `s0 = 8 ln 2 - 5`, so `v(t) = s0/t`
/// for `0 < t <= 1/2`.
pub const S0: f64 = 8.0 * std::f64::consts::LN_2 - 5.0;

/// Mean variance defect per captured gap: `gamma = 17/6 - 4 ln 2`.
pub const GAMMA: f64 = 17.0 / 6.0 - 4.0 * std::f64::consts::LN_2;

/// Decimal reference for [`SIGMA2`], good to 1e-15: 1.0903548889591250.
pub const SIGMA2_DECIMAL: f64 = 1.090354888959125;
/// Decimal reference for [`S0`], good to 1e-15: 0.5451774444795625.
pub const S0_DECIMAL: f64 = 0.5451774444795625;
/// Decimal reference for [`GAMMA`], good to 1e-15: 0.0607446110935521.
pub const GAMMA_DECIMAL: f64 = 0.0607446110935521;

/// The exact constants bundled as a value, for callers that want to carry
/// them around (result metadata, printed tables).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormTable {
    pub sigma2: f64,
    pub s0: f64,
    pub gamma: f64,
}

impl ClosedFormTable {
    pub fn new() -> Self {
        Self { sigma2: SIGMA2, s0: S0, gamma: GAMMA }
    }
}

impl Default for ClosedFormTable {
    fn default() -> Self {
        Self::new()
    }
}

/// Mean of the threshold time: `mu(t) = (2/t - 1)` on (0, 1), zero for t >= 1.
pub fn mu(t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain("mu(t) requires t > 0"));
    }
    Ok(if t < 1.0 { 2.0 / t - 1.0 } else { 0.0 })
}

/// Variance of the threshold time.
///
/// `v(t) = s0/t` on (0, 1/2], `2 + (2 - 8 ln t)/t - 4/t^2` on (1/2, 1),
/// zero for t >= 1.
pub fn v(t: f64) -> Result<f64> {
    if t <= 0.0 {
        return Err(Error::Domain("v(t) requires t > 0"));
    }
    Ok(v_pos(t))
}

/// `v(t)` assuming `t > 0`; the hot path for conditional-variance sums.
#[inline]
pub(crate) fn v_pos(t: f64) -> f64 {
    if t <= 0.5 {
        S0 / t
    } else if t < 1.0 {
        2.0 + (2.0 - 8.0 * t.ln()) / t - 4.0 / (t * t)
    } else {
        0.0
    }
}

/// Variance defect `w(t) = v(t) - (s0/t) 1{0 < t < 1}`.
///
/// Supported on (1/2, 1), where it equals
/// `2 + (7 - 8 ln 2)/t - 8 ln(t)/t - 4/t^2`; zero elsewhere. Satisfies
/// `sup |w| = s0`, attained as t -> 1-.
#[inline]
pub fn w(t: f64) -> f64 {
    if t > 0.5 && t < 1.0 {
        2.0 + (7.0 - 8.0 * std::f64::consts::LN_2 - 8.0 * t.ln()) / t - 4.0 / (t * t)
    } else {
        0.0
    }
}

/// Standard normal CDF (see [`crate::special`] for the implementation).
pub fn std_normal_cdf(x: f64) -> f64 {
    special::std_normal_cdf(x)
}

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    special::std_normal_pdf(x)
}

/// Unit-mean exponential survival function, clamped to 1 for x < 0.
pub fn exp_survival(x: f64) -> f64 {
    if x < 0.0 {
        1.0
    } else {
        (-x).exp()
    }
}

/// Gumbel CDF `exp(-e^{-x})`.
pub fn gumbel_cdf(x: f64) -> f64 {
    (-(-x).exp()).exp()
}

/// Exact survival of the minimal spacing in the Dirichlet (length-biased)
/// comparator after n divisions: `(1 - (n+1)x)^n` on [0, 1/(n+1)].
pub fn dirichlet_min_survival(n: u64, x: f64) -> f64 {
    if x < 0.0 {
        return 1.0;
    }
    let base = 1.0 - (n as f64 + 1.0) * x;
    if base <= 0.0 {
        0.0
    } else {
        base.powi(n as i32)
    }
}

/// Probabilists' Hermite polynomial `H_k(x)`, via the recurrence
/// `H_{k+1} = x H_k - k H_{k-1}`, consistent with
/// `d^k/dx^k phi(x) = (-1)^k H_k(x) phi(x)`.
pub fn hermite(k: u32, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let (mut prev, mut cur) = (1.0, x);
    for j in 1..k {
        let next = x * cur - j as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// The Cramer-type envelope `2^{k/2} Gamma((k+1)/2)` dominating
/// `sup_x |phi(x) H_k(x)|`.
pub fn cramer_bound(k: u32) -> f64 {
    (2.0f64).powf(k as f64 / 2.0) * special::gamma((k as f64 + 1.0) / 2.0)
}

/// Dense-grid maximum of `|phi(x) H_k(x)|` over `|x| <= k + 10`, paired with
/// the envelope it must stay below. 2e5 grid points; the product decays
/// super-polynomially outside the grid.
pub fn cramer_bound_check(k: u32) -> (f64, f64) {
    let half_range = k as f64 + 10.0;
    let points = 200_000usize;
    let mut sup = 0.0f64;
    for i in 0..=points {
        let x = -half_range + 2.0 * half_range * i as f64 / points as f64;
        let val = (special::std_normal_pdf(x) * hermite(k, x)).abs();
        if val > sup {
            sup = val;
        }
    }
    (sup, cramer_bound(k))
}

fn factorial(n: u32) -> f64 {
    (1..=n as u64).map(|i| i as f64).product()
}

/// Edgeworth coefficient random variable, evaluated from `(v(t), R, S)`:
///
/// `E^l = v^{-(l+1)/2} sum_{k=0}^{floor((l+1)/2)} (-1)^{k+1}
///        R^{l-2k+1} S^k / (2^k k! (l-2k+1)!)`.
pub fn edgeworth_term(l: u32, vt: f64, r: f64, s: f64) -> f64 {
    let mut acc = 0.0;
    for k in 0..=(l + 1) / 2 {
        let power = l + 1 - 2 * k;
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        let coeff = sign / ((2.0f64).powi(k as i32) * factorial(k) * factorial(power));
        acc += coeff * r.powi(power as i32) * s.powi(k as i32);
    }
    vt.powf(-(l as f64 + 1.0) / 2.0) * acc
}

/// The same coefficient in centered/scaled variables `z = -R/sqrt(v)`,
/// `alpha = S/v`:
///
/// `E^l = sum_k (-1)^{l-k} z^{l-2k+1} alpha^k / (2^k k! (l-2k+1)!)`.
///
/// Algebraically identical to [`edgeworth_term`]; kept as a dual evaluation
/// route for the identity test.
pub fn edgeworth_term_za(l: u32, z: f64, alpha: f64) -> f64 {
    let mut acc = 0.0;
    for k in 0..=(l + 1) / 2 {
        let power = l + 1 - 2 * k;
        let sign = if (l - k) % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = sign / ((2.0f64).powi(k as i32) * factorial(k) * factorial(power));
        acc += coeff * z.powi(power as i32) * alpha.powi(k as i32);
    }
    acc
}

fn binomial_f64(n: u32, k: u32) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// Truncated Hermite expansion of `Phi((x+z)/sqrt(1-alpha))` to `m` orders:
///
/// `Phi(x) + phi(x) sum_{j=1}^{m} ((-1)^{j+1}/j!)
///      sum_{k=0}^{j} C(j,k) z^{j-k} (alpha/2)^k H_{j+k-1}(x)`.
pub fn edgeworth_expansion(m: u32, z: f64, alpha: f64, x: f64) -> f64 {
    let mut acc = 0.0;
    for j in 1..=m {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        let mut inner = 0.0;
        for k in 0..=j {
            inner += binomial_f64(j, k)
                * z.powi((j - k) as i32)
                * (alpha / 2.0).powi(k as i32)
                * hermite(j + k - 1, x);
        }
        acc += sign / factorial(j) * inner;
    }
    special::std_normal_cdf(x) + special::std_normal_pdf(x) * acc
}

/// Evaluate the expansion discrepancy `|Phi((x+z)/sqrt(1-alpha)) - expansion|`
/// over `x_grid`, returning the sup and the analytic bound
/// `2^{2m} (|alpha|^{m+1} + Gamma((m+1)/2)/(m+1)! * |z|^{m+1})`.
pub fn edgeworth_expansion_check(
    m: u32,
    z: f64,
    alpha: f64,
    x_grid: &[f64],
) -> Result<(f64, f64)> {
    if alpha > 0.5 {
        return Err(Error::Domain("edgeworth expansion requires alpha <= 1/2"));
    }
    if m == 0 {
        return Err(Error::Domain("edgeworth expansion requires m >= 1"));
    }
    let mut sup = 0.0f64;
    let scale = (1.0 - alpha).sqrt();
    for &x in x_grid {
        let exact = special::std_normal_cdf((x + z) / scale);
        let diff = (exact - edgeworth_expansion(m, z, alpha, x)).abs();
        if diff > sup {
            sup = diff;
        }
    }
    let bound = (2.0f64).powi(2 * m as i32)
        * (alpha.abs().powi(m as i32 + 1)
            + special::gamma((m as f64 + 1.0) / 2.0) / factorial(m + 1)
                * z.abs().powi(m as i32 + 1));
    Ok((sup, bound))
}

// Pascal's triangle row in u128; n <= 40 keeps every entry exact.
fn binomial_row_u128(n: u32) -> Vec<u128> {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![1u128];
        for i in 1..row.len() {
            next.push(row[i - 1] + row[i]);
        }
        next.push(1);
        row = next;
    }
    row
}

/// Exact `E[X^alpha (n - X)^beta]` for `X ~ Bin(n, 1/2)` by summation over
/// the pmf in integer arithmetic (single rounding at the end).
///
/// Budget: `n <= 40`, `alpha + beta <= 12`.
pub fn binom_product_moment(n: u32, alpha: u32, beta: u32) -> Result<f64> {
    if n > 40 {
        return Err(Error::BudgetExceeded("binom_product_moment supports n <= 40"));
    }
    if alpha + beta > 12 {
        return Err(Error::BudgetExceeded("binom_product_moment supports alpha + beta <= 12"));
    }
    let row = binomial_row_u128(n);
    let mut sum = 0u128;
    for (k, &c) in row.iter().enumerate() {
        let k = k as u128;
        let nk = n as u128 - k;
        sum += c * k.pow(alpha) * nk.pow(beta);
    }
    Ok(sum as f64 / (2.0f64).powi(n as i32))
}

/// The i.i.d. summand families of the partial-sum moment oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Summand {
    /// `xi ~ Uniform(-1, 1)`: the per-gap contribution to `R`.
    UniformSymmetric,
    /// `xi = -w(1/V)`, `V ~ Uniform(1, 2)`: the per-gap contribution to `W`.
    VarianceDefect,
}

/// Raw moment `E[xi^r]` of a single summand.
///
/// Uniform moments are in closed form; variance-defect moments come from
/// adaptive quadrature at 1e-12. In particular `E[xi] = gamma` for the
/// variance-defect summand.
pub fn summand_moment(dist: Summand, r: u32) -> f64 {
    match dist {
        Summand::UniformSymmetric => {
            if r % 2 == 0 {
                1.0 / (r as f64 + 1.0)
            } else {
                0.0
            }
        }
        Summand::VarianceDefect => {
            if r == 0 {
                1.0
            } else {
                quad::integrate(|u| (-w(1.0 / u)).powi(r as i32), 1.0, 2.0, 1e-13)
            }
        }
    }
}

/// Exact k-th moment `mu_k(n) = E[(xi_1 + ... + xi_n)^k]` of an i.i.d. sum,
/// by the convolution recurrence
/// `mu_k(j) = sum_i C(k,i) mu_i(j-1) m_{k-i}` from the single-summand
/// moments.
pub fn partial_sum_moment(dist: Summand, n: u64, k: u32) -> f64 {
    let singles: Vec<f64> = (0..=k).map(|r| summand_moment(dist, r)).collect();
    let mut mu = vec![0.0f64; k as usize + 1];
    mu[0] = 1.0;
    for _ in 0..n {
        let mut next = vec![0.0f64; k as usize + 1];
        for order in 0..=k as usize {
            let mut acc = 0.0;
            for i in 0..=order {
                acc += binomial_f64(order as u32, i as u32) * mu[i] * singles[order - i];
            }
            next[order] = acc;
        }
        mu = next;
    }
    mu[k as usize]
}

/// `gamma` recovered by quadrature: `-int_1^2 w(1/v) dv`.
pub fn gamma_constant_quadrature() -> f64 {
    -quad::integrate(|u| w(1.0 / u), 1.0, 2.0, 1e-13)
}

/// The variance-defect integral `(1/2) int_{1/2}^1 t^{-2} w(t) dt`, whose
/// exact value is `2 ln 2 - 17/12`.
pub fn variance_defect_integral() -> f64 {
    0.5 * quad::integrate(|t| w(t) / (t * t), 0.5, 1.0, 1e-13)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_identities() {
        assert_eq!(SIGMA2, 2.0 * S0, "sigma2 = 2 s0 holds exactly in f64");
        assert!((S0 - (2.0 / 3.0 - 2.0 * GAMMA)).abs() < 1e-15);
        assert!((SIGMA2 - SIGMA2_DECIMAL).abs() < 1e-15);
        assert!((S0 - S0_DECIMAL).abs() < 1e-15);
        assert!((GAMMA - GAMMA_DECIMAL).abs() < 1e-15);
    }

    #[test]
    fn mu_values() {
        assert_eq!(mu(2.0).unwrap(), 0.0);
        assert_eq!(mu(0.5).unwrap(), 3.0);
        assert_eq!(mu(0.05).unwrap(), 39.0);
        assert!(mu(0.0).is_err());
        assert!(mu(-1.0).is_err());
    }

    #[test]
    fn v_values() {
        assert!((v(0.5).unwrap() - SIGMA2).abs() < 1e-15);
        // second branch approaches 0 at t -> 1-
        assert!(v(1.0 - 1e-9).unwrap().abs() < 1e-7);
        assert_eq!(v(1.0).unwrap(), 0.0);
        assert_eq!(v(2.0).unwrap(), 0.0);
        assert!((v(0.75).unwrap() - 0.624164328374552).abs() < 1e-12);
        assert!(v(0.0).is_err());
    }

    #[test]
    fn v_branches_agree_at_seam() {
        let eps = 1e-10;
        let left = v(0.5).unwrap();
        let right = v(0.5 + eps).unwrap();
        assert!((left - right).abs() < 1e-9);
    }

    #[test]
    fn w_values() {
        assert_eq!(w(0.4), 0.0);
        assert_eq!(w(1.0), 0.0);
        assert!((w(0.75) + 0.102738930931531).abs() < 1e-12);
        // cross-check against v - s0/t
        for &t in &[0.55, 0.6, 0.75, 0.9, 0.99] {
            assert!((w(t) - (v(t).unwrap() - S0 / t)).abs() < 1e-12);
        }
        // sup |w| = s0, attained at t -> 1-
        assert!((w(1.0 - 1e-9).abs() - S0).abs() < 1e-7);
    }

    #[test]
    fn variance_defect_integral_value() {
        let exact = 2.0 * std::f64::consts::LN_2 - 17.0 / 12.0;
        assert!((exact + 0.0303723).abs() < 1e-6);
        assert!((variance_defect_integral() - exact).abs() < 1e-10);
    }

    #[test]
    fn gamma_by_quadrature() {
        assert!((gamma_constant_quadrature() - GAMMA).abs() < 1e-10);
    }

    #[test]
    fn reference_distributions() {
        assert_eq!(exp_survival(-0.5), 1.0);
        assert!((exp_survival(1.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((gumbel_cdf(0.0) - (-1.0f64).exp()).abs() < 1e-15);
        assert!((std_normal_cdf(1.959964) - 0.975).abs() < 1e-6);
    }

    #[test]
    fn dirichlet_min_survival_values() {
        assert_eq!(dirichlet_min_survival(5, 0.0), 1.0);
        assert_eq!(dirichlet_min_survival(5, -0.1), 1.0);
        assert!((dirichlet_min_survival(1, 0.25) - 0.5).abs() < 1e-15);
        assert!((dirichlet_min_survival(10, 1.0 / 22.0) - 0.5f64.powi(10)).abs() < 1e-15);
        assert_eq!(dirichlet_min_survival(10, 0.2), 0.0);
    }

    #[test]
    fn hermite_low_orders() {
        for &x in &[-2.5, -1.0, 0.0, 0.3, 2.0] {
            assert_eq!(hermite(0, x), 1.0);
            assert_eq!(hermite(1, x), x);
            assert!((hermite(2, x) - (x * x - 1.0)).abs() < 1e-12);
            assert!((hermite(3, x) - (x * x * x - 3.0 * x)).abs() < 1e-12);
            assert!((hermite(4, x) - (x.powi(4) - 6.0 * x * x + 3.0)).abs() < 1e-11);
        }
        assert_eq!(hermite(3, 2.0), 2.0);
    }

    #[test]
    fn cramer_examples() {
        let (sup1, bound1) = cramer_bound_check(1);
        // sup |x phi(x)| = phi(1), attained at x = 1
        assert!((sup1 - std_normal_pdf(1.0)).abs() < 1e-6);
        assert!((bound1 - 2.0f64.sqrt()).abs() < 1e-10);
        let (sup2, bound2) = cramer_bound_check(2);
        assert!(sup2 >= std_normal_pdf(0.0) - 1e-9);
        assert!((bound2 - 2.0 * special::gamma(1.5)).abs() < 1e-10);
        let (sup20, bound20) = cramer_bound_check(20);
        assert!(sup20 <= bound20);
    }

    #[test]
    fn edgeworth_term_order_zero() {
        let (vt, r, s) = (1.7, 0.4, -0.2);
        assert!((edgeworth_term(0, vt, r, s) + r / vt.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn edgeworth_expansion_exact_when_unperturbed() {
        for &x in &[-3.0, -1.0, 0.0, 0.5, 2.0] {
            let e = edgeworth_expansion(2, 0.0, 0.0, x);
            assert!((e - std_normal_cdf(x)).abs() < 1e-15);
        }
    }

    #[test]
    fn edgeworth_expansion_bound_examples() {
        let grid: Vec<f64> = (-800..=800).map(|i| i as f64 / 100.0).collect();
        let (err, bound) = edgeworth_expansion_check(1, 0.1, 0.1, &grid).unwrap();
        let expected_bound = 4.0 * (0.01 + 0.5 * 0.01);
        assert!((bound - expected_bound).abs() < 1e-12);
        assert!(err <= bound, "m=1: {} > {}", err, bound);
        let (err, bound) = edgeworth_expansion_check(3, 0.3, -0.3, &grid).unwrap();
        assert!(err <= bound, "m=3: {} > {}", err, bound);
        assert!(edgeworth_expansion_check(1, 0.1, 0.7, &grid).is_err());
    }

    #[test]
    fn binom_product_examples() {
        assert_eq!(binom_product_moment(7, 0, 0).unwrap(), 1.0);
        assert!((binom_product_moment(2, 1, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((binom_product_moment(2, 1, 0).unwrap() - 1.0).abs() < 1e-15);
        assert!(binom_product_moment(41, 1, 1).is_err());
        assert!(binom_product_moment(10, 7, 6).is_err());
    }

    #[test]
    fn partial_sum_uniform_moments() {
        // variance of a sum of n Uniform(-1,1)
        for &n in &[1u64, 2, 10, 100] {
            assert!((partial_sum_moment(Summand::UniformSymmetric, n, 2) - n as f64 / 3.0).abs()
                < 1e-10 * n as f64);
        }
        // E (xi1 + xi2)^4 = 2 m4 + 6 m2^2 = 16/15
        assert!((partial_sum_moment(Summand::UniformSymmetric, 2, 4) - 16.0 / 15.0).abs() < 1e-12);
        // odd moments vanish
        assert!(partial_sum_moment(Summand::UniformSymmetric, 9, 3).abs() < 1e-12);
    }

    #[test]
    fn partial_sum_variance_defect_mean() {
        for &n in &[1u64, 5, 50] {
            assert!(
                (partial_sum_moment(Summand::VarianceDefect, n, 1) - n as f64 * GAMMA).abs()
                    < 1e-9 * n as f64
            );
        }
    }

    #[test]
    fn normal_cdf_vs_quadrature() {
        // independent oracle: Phi(x) = 1/2 + int_0^x phi
        for i in 0..=40 {
            let x = -5.0 + 0.25 * i as f64;
            let by_quad = 0.5 + quad::integrate(std_normal_pdf, 0.0, x, 1e-14);
            assert!(
                (std_normal_cdf(x) - by_quad).abs() < 1e-12,
                "Phi({}) = {} vs quadrature {}",
                x,
                std_normal_cdf(x),
                by_quad
            );
        }
    }
}
