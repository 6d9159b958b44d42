//! Small-gap statistics and conditional mean/variance statistics.
//!
//! In the regime `2nt <= 1`, gaps of length `<= t` are strictly below the
//! running maximum, so each split creates zero or one captured gap and the
//! weighted counts grow by inspecting only the two children. Given the past
//! of the process, the capture at step i is a Bernoulli event with success
//! `2(t-s)/M_i`, and the captured length fraction is uniform on (s/t, 1];
//! [`theta_oracle_k`] resamples counts as if those indicators were fully
//! independent given the max-gap trajectory. That resampling reproduces the
//! first moment exactly and higher moments to leading order, but not the
//! exact law: the trajectory itself carries capture information (a capture
//! leaves the near-full-size sibling as the next maximum), which makes the
//! true indicators negatively correlated given the whole trajectory.
//!
//! The conditional statistics at threshold `t` after `n` steps are
//!
//! - `R`: the weighted count with `g(u) = 1 - 2u` on (0, t] (the centered
//!   conditional mean of `N_t`),
//! - `S`: `(s0/t) sum L_i 1{L_i <= t} - sum_i w(t/L_i)` (the variance
//!   defect of `N_t` given the first n steps),
//! - `W`: `-sum w(t/L_j)` over gaps in (t, 2t].
//!
//! These satisfy, pathwise and exactly,
//! `S = (s0/2) K_t - (s0/2) R + W`,
//! together with the bounds `|R| <= K_t` and `|S| <= s0 K_2t`.

use crate::closed_forms::{self, S0};
use crate::error::{Error, Result};
use crate::process::{GapPartition, GapWeight, GapWindow, PathObservables, WatchConfig};
use crate::special;
use crate::stream::RandomStream;

/// Conditional statistics at one (n, t) design point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalStats {
    pub n: u64,
    pub t: f64,
    /// Centered conditional mean of the remaining threshold time.
    pub r: f64,
    /// Variance defect `v(t) - Var(N_t | first n steps)`.
    pub s: f64,
    /// Variance-defect sum over the (t, 2t] window, negated.
    pub w: f64,
    /// Gap count in (0, t].
    pub k_t: u64,
    /// Gap count in (0, 2t].
    pub k_2t: u64,
    /// True iff `t < 1/(4(n+1))`, the regime in which the S bounds hold.
    pub valid: bool,
}

impl ConditionalStats {
    /// Conditional variance `Var(N_t | F_n) = v(t) - S`.
    pub fn conditional_variance(&self) -> f64 {
        closed_forms::v_pos(self.t) - self.s
    }

    /// Defect of the exact pathwise identity
    /// `S = (s0/2) K_t - (s0/2) R + W`; zero up to accumulated rounding.
    pub fn identity_defect(&self) -> f64 {
        self.s - (S0 / 2.0 * self.k_t as f64 - S0 / 2.0 * self.r + self.w)
    }
}

/// Watch configuration whose registrations support [`conditional_stats`]
/// at threshold `t`: the (0, t] window with the R-weight and the
/// length-fraction weight, and the (t, 2t] window with the variance-defect
/// weight.
pub fn conditional_watch(t: f64) -> WatchConfig {
    WatchConfig {
        registrations: vec![
            (GapWindow::new(0.0, t), GapWeight::RWeight),
            (GapWindow::new(0.0, t), GapWeight::Identity),
            (GapWindow::new(t, 2.0 * t), GapWeight::VarianceDefectHalf),
        ],
        ..WatchConfig::default()
    }
}

/// Read a registered small-gap statistic `K^g(s, t]` off a finished path.
///
/// The registration must have been active from step 0; asking for one that
/// was not registered is the invalid-registration error.
pub fn small_gap_statistic(
    path: &PathObservables,
    weight: GapWeight,
    lo: f64,
    hi: f64,
) -> Result<f64> {
    path.registered
        .iter()
        .find(|r| r.weight == weight && r.window.lo == lo && r.window.hi == hi)
        .map(|r| r.weighted_sum)
        .ok_or(Error::InvalidRegistration(lo, hi, path.n_final))
}

/// Extract the conditional statistics from a path evolved with
/// [`conditional_watch`]`(t)`.
pub fn conditional_stats(path: &PathObservables, t: f64) -> Result<ConditionalStats> {
    let find = |weight: GapWeight, lo: f64, hi: f64| {
        path.registered
            .iter()
            .find(|r| r.weight == weight && r.window.lo == lo && r.window.hi == hi)
            .ok_or(Error::InvalidRegistration(lo, hi, path.n_final))
    };
    let r_reg = find(GapWeight::RWeight, 0.0, t)?;
    let frac_reg = find(GapWeight::Identity, 0.0, t)?;
    let defect_reg = find(GapWeight::VarianceDefectHalf, t, 2.0 * t)?;
    let n = path.n_final;
    let w = -defect_reg.weighted_sum;
    let s = S0 * frac_reg.weighted_sum + w;
    Ok(ConditionalStats {
        n,
        t,
        r: r_reg.weighted_sum,
        s,
        w,
        k_t: r_reg.count,
        k_2t: r_reg.count + defect_reg.count,
        valid: t < 1.0 / (4.0 * (n as f64 + 1.0)),
    })
}

/// Sample `K_n(s, t]` given a max-gap trajectory `M_0..M_{n-1}`, as the sum
/// of independent Bernoulli(2(t-s)/M_i) indicators (exact in the mean,
/// leading-order in law; see the module docs).
pub fn theta_oracle_k(
    max_trajectory: &[f64],
    s: f64,
    t: f64,
    stream: &mut RandomStream,
) -> Result<u64> {
    let n = max_trajectory.len() as u64;
    check_oracle_regime(n, s, t)?;
    let width = 2.0 * (t - s);
    let mut k = 0u64;
    for &m in max_trajectory {
        if stream.next_bernoulli(width / m) {
            k += 1;
        }
    }
    Ok(k)
}

/// Sample `(K_n(s, t], K^g_n(s, t])` given a trajectory, attaching the
/// i.i.d. Uniform(s/t, 1) marks to the captured indicators.
pub fn theta_oracle_weighted(
    max_trajectory: &[f64],
    s: f64,
    t: f64,
    weight: GapWeight,
    stream: &mut RandomStream,
) -> Result<(u64, f64)> {
    let n = max_trajectory.len() as u64;
    check_oracle_regime(n, s, t)?;
    let width = 2.0 * (t - s);
    let lo = s / t;
    let mut k = 0u64;
    let mut sum = 0.0;
    for &m in max_trajectory {
        if stream.next_bernoulli(width / m) {
            k += 1;
            let mark = lo + (1.0 - lo) * stream.next_open01();
            sum += weight.eval(mark);
        }
    }
    Ok((k, sum))
}

fn check_oracle_regime(n: u64, s: f64, t: f64) -> Result<()> {
    if !(s >= 0.0 && s < t) {
        return Err(Error::Domain("window requires 0 <= s < t"));
    }
    if 2.0 * n as f64 * t > 1.0 {
        return Err(Error::RegimeViolation { n, t });
    }
    Ok(())
}

/// Normalized k-th power of the reciprocal max-gap sum along one path:
/// `(4^k / n^{2k}) (sum_{j<n} 1/M_j)^k`, which concentrates at 1.
pub fn reciprocal_sum_moment(path: &PathObservables, n: u64, k: u32) -> Result<f64> {
    if path.n_final < n || (path.max_trajectory.len() as u64) < n {
        return Err(Error::UnsupportedObservable(
            "path shorter than the requested n",
        ));
    }
    if n == 0 || k == 0 {
        return Err(Error::Domain("reciprocal_sum_moment requires n >= 1, k >= 1"));
    }
    let w: f64 = path.max_trajectory[..n as usize].iter().map(|m| 1.0 / m).sum();
    Ok((4.0 * w / (n as f64 * n as f64)).powi(k as i32))
}

/// Estimated total variation distance between the sampled law of `K_{n,t}`
/// at `t = 2 theta / n^2` and the Poisson(theta) reference, plus the
/// `n^{3/2} t` scale of the approximation rate for comparison.
pub fn poisson_tv_check(
    n: u64,
    theta: f64,
    samples: u64,
    stream: &mut RandomStream,
) -> Result<(f64, f64)> {
    if theta <= 0.0 {
        return Err(Error::Domain("poisson_tv_check requires theta > 0"));
    }
    let t = 2.0 * theta / (n as f64 * n as f64);
    if 2.0 * n as f64 * t > 1.0 {
        return Err(Error::RegimeViolation { n, t });
    }
    let lambda = n as f64 * n as f64 * t / 2.0;
    // truncation at mean + 12 sqrt(mean) leaves < 1e-10 Poisson mass outside
    let k_max = (lambda + 12.0 * lambda.sqrt()).ceil() as usize + 1;
    let mut histogram = vec![0u64; k_max + 1];
    let mut overflow = 0u64;
    let watch = WatchConfig {
        registrations: vec![(GapWindow::new(0.0, t), GapWeight::One)],
        ..WatchConfig::default()
    };
    for _ in 0..samples {
        let obs = crate::process::run(n, stream, &watch)?;
        let k = obs.registered[0].count as usize;
        if k <= k_max {
            histogram[k] += 1;
        } else {
            overflow += 1;
        }
    }
    let mut tv = 0.0;
    let mut poisson_tail = 1.0;
    for (k, &count) in histogram.iter().enumerate() {
        let pmf =
            (-lambda + k as f64 * lambda.ln() - special::ln_gamma(k as f64 + 1.0)).exp();
        poisson_tail -= pmf;
        tv += (count as f64 / samples as f64 - pmf).abs();
    }
    tv += (overflow as f64 / samples as f64 - poisson_tail.max(0.0)).abs();
    Ok((tv / 2.0, n as f64 * (n as f64).sqrt() * t))
}

/// Empirical survival of `n^2 m_n / 2` over `samples` paths on `x_grid`.
pub fn min_gap_survival(
    n: u64,
    x_grid: &[f64],
    samples: u64,
    stream: &mut RandomStream,
) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(samples as usize);
    let scale = n as f64 * n as f64 / 2.0;
    for _ in 0..samples {
        let mut p = GapPartition::new();
        for _ in 0..n {
            p.split_max(stream.next_open01())?;
        }
        values.push(scale * p.current_min());
    }
    values.sort_by(f64::total_cmp);
    Ok(x_grid
        .iter()
        .map(|&x| {
            let above = values.len() - values.partition_point(|&v| v <= x);
            above as f64 / values.len() as f64
        })
        .collect())
}
