//! Property-check suites behind the `verify` CLI command.
//!
//! Each group runs a family of checks (closed-form identities, pathwise
//! inversion, oracle equivalences, analytic-inequality sweeps, moment laws)
//! and reports one [`CheckResult`] per assertion. All randomness flows from
//! the configured seed; budgets follow the stated designs, with a `quick`
//! mode at roughly one tenth of the samples for fast runs.

use rayon::prelude::*;

use crate::closed_forms::{self, Summand, GAMMA, S0, SIGMA2};
use crate::embeddings;
use crate::gap_stats::{self, ConditionalStats};
use crate::harness::{self, EmpiricalSample};
use crate::process::{self, GapPartition, WatchConfig};
use crate::quad;
use crate::special;
use crate::stream::RandomStream;

/// One named assertion outcome.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub group: &'static str,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(group: &'static str, name: &str, passed: bool, detail: String) -> Self {
        Self { group, name: name.to_string(), passed, detail }
    }
}

/// Configuration for the suites.
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub seed: u64,
    /// 0 = default pool size.
    pub threads: usize,
    /// Cut the Monte Carlo budgets roughly tenfold.
    pub quick: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self { seed: harness::DEFAULT_SEED, threads: 0, quick: false }
    }
}

impl VerifyConfig {
    fn budget(&self, full: u64) -> u64 {
        if self.quick {
            (full / 10).max(1_000)
        } else {
            full
        }
    }
}

/// Run every path `i` in `0..n_paths` on its own stream, in index order.
fn par_paths<T, F>(cfg: &VerifyConfig, stream_base: u64, n_paths: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RandomStream) -> T + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .expect("thread pool");
    pool.install(|| {
        (0..n_paths)
            .into_par_iter()
            .map(|i| f(&mut RandomStream::new(cfg.seed, stream_base + i)))
            .collect()
    })
}

/// Disjoint stream-index regions, one per sampling batch, so no two checks
/// ever share uniforms under the common seed.
const fn region(id: u64) -> u64 {
    id << 24
}

fn mean_and_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (n - 1.0)).sqrt())
}

fn intervals_overlap(m1: f64, se1: f64, m2: f64, se2: f64) -> bool {
    (m1 - m2).abs() <= 1.96 * (se1 + se2)
}

// ---------------------------------------------------------------------------
// constants & closed forms
// ---------------------------------------------------------------------------

pub fn constants_group() -> Vec<CheckResult> {
    const G: &str = "constants";
    let mut out = Vec::new();
    let d = (SIGMA2 - 2.0 * S0).abs();
    out.push(CheckResult::new(G, "sigma2 = 2*s0", d <= 1e-15, format!("|diff| = {:.2e}", d)));
    let d = (S0 - (2.0 / 3.0 - 2.0 * GAMMA)).abs();
    out.push(CheckResult::new(G, "s0 = 2/3 - 2*gamma", d <= 1e-15, format!("|diff| = {:.2e}", d)));
    for (name, value, reference) in [
        ("sigma2 decimal", SIGMA2, closed_forms::SIGMA2_DECIMAL),
        ("s0 decimal", S0, closed_forms::S0_DECIMAL),
        ("gamma decimal", GAMMA, closed_forms::GAMMA_DECIMAL),
    ] {
        let d = (value - reference).abs();
        out.push(CheckResult::new(G, name, d <= 1e-15, format!("|diff| = {:.2e}", d)));
    }
    out
}

pub fn closed_form_group() -> Vec<CheckResult> {
    const G: &str = "closed-forms";
    let mut out = Vec::new();

    let seam = (closed_forms::v(0.5).unwrap() - closed_forms::v(0.5 + 1e-12).unwrap()).abs();
    out.push(CheckResult::new(G, "v continuous at t = 1/2", seam <= 1e-9, format!("seam gap = {:.2e}", seam)));

    // sup |w| = s0, attained only in the t -> 1- limit: uniform grid plus a
    // geometric refinement toward the endpoint
    let mut sup = 0.0f64;
    for i in 0..=200_000 {
        let t = 0.5 + 0.5 * i as f64 / 200_000.0;
        sup = sup.max(closed_forms::w(t).abs());
    }
    for j in 1..=12 {
        let t = 1.0 - (10.0f64).powi(-j);
        sup = sup.max(closed_forms::w(t).abs());
    }
    let d = (sup - S0).abs();
    out.push(CheckResult::new(G, "sup |w| = s0", d <= 1e-6, format!("sup = {:.9}, |diff| = {:.2e}", sup, d)));

    let gq = closed_forms::gamma_constant_quadrature();
    let d = (gq - GAMMA).abs();
    out.push(CheckResult::new(G, "quadrature gamma", d <= 1e-8, format!("|diff| = {:.2e}", d)));

    let exact = 2.0 * std::f64::consts::LN_2 - 17.0 / 12.0;
    let d = (closed_forms::variance_defect_integral() - exact).abs();
    out.push(CheckResult::new(G, "variance-defect integral = 2 ln 2 - 17/12", d <= 1e-8, format!("|diff| = {:.2e}", d)));

    let checks: [(&str, f64, f64); 5] = [
        ("mu(0.5) = 3", (closed_forms::mu(0.5).unwrap() - 3.0).abs(), 1e-14),
        ("mu(2) = 0", closed_forms::mu(2.0).unwrap().abs(), 1e-15),
        ("v(0.5) = sigma2", (closed_forms::v(0.5).unwrap() - SIGMA2).abs(), 1e-15),
        ("v(0.75)", (closed_forms::v(0.75).unwrap() - 0.624164328374552).abs(), 1e-9),
        ("w(0.75)", (closed_forms::w(0.75) + 0.102738930931531).abs(), 1e-9),
    ];
    for (name, diff, tol) in checks {
        out.push(CheckResult::new(G, name, diff <= tol, format!("|diff| = {:.2e}", diff)));
    }

    // normal CDF against independent quadrature at 1e3 points
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let x = -6.0 + 12.0 * i as f64 / 999.0;
        let by_quad = 0.5 + quad::integrate(special::std_normal_pdf, 0.0, x, 1e-14);
        worst = worst.max((closed_forms::std_normal_cdf(x) - by_quad).abs());
    }
    out.push(CheckResult::new(G, "Phi vs quadrature (1e3 points)", worst <= 1e-12, format!("max |diff| = {:.2e}", worst)));

    let mut worst = 0.0f64;
    for two_x in 1..=80 {
        let rel = (special::gamma(two_x as f64 / 2.0) / special::gamma_half_integer(two_x) - 1.0).abs();
        worst = worst.max(rel);
    }
    out.push(CheckResult::new(G, "Gamma Lanczos vs half-integer recursion", worst <= 1e-12, format!("max rel = {:.2e}", worst)));

    out
}

// ---------------------------------------------------------------------------
// hermite / edgeworth / appendix sweeps
// ---------------------------------------------------------------------------

fn binomial_f64(n: u32, k: u32) -> f64 {
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c
}

/// k-th derivative by central differences with Neville extrapolation in h^2
/// over steps h0 * ratio^i. Steps shrink by sqrt(2) so the smallest stencil
/// stays wide enough that the 2^k cancellation noise never dominates.
fn fd_kth_derivative<F: Fn(f64) -> f64>(f: &F, k: u32, x: f64, h0: f64, levels: usize) -> f64 {
    let ratio = std::f64::consts::FRAC_1_SQRT_2;
    let diff = |h: f64| -> f64 {
        let mut acc = 0.0;
        for j in 0..=k {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            let offset = k as f64 / 2.0 - j as f64;
            acc += sign * binomial_f64(k, j) * f(x + offset * h);
        }
        acc / h.powi(k as i32)
    };
    let hs: Vec<f64> = (0..levels).map(|i| h0 * ratio.powi(i as i32)).collect();
    let xs: Vec<f64> = hs.iter().map(|h| h * h).collect();
    let mut table: Vec<f64> = hs.iter().map(|&h| diff(h)).collect();
    for col in 1..levels {
        for row in (col..levels).rev() {
            let (x_far, x_near) = (xs[row - col], xs[row]);
            table[row] = (x_far * table[row] - x_near * table[row - 1]) / (x_far - x_near);
        }
    }
    table[levels - 1]
}

pub fn hermite_group() -> Vec<CheckResult> {
    const G: &str = "hermite-cramer";
    let mut out = Vec::new();

    // derivative definition vs recurrence: sup-norm relative error of the
    // finite-difference k-th derivative of phi against (-1)^k H_k phi
    for k in 1..=10u32 {
        let mut sup_diff = 0.0f64;
        let mut sup_exact = 0.0f64;
        for i in 0..=240 {
            let x = -6.0 + 0.05 * i as f64;
            let exact = if k % 2 == 0 { 1.0 } else { -1.0 }
                * closed_forms::hermite(k, x)
                * special::std_normal_pdf(x);
            let fd = fd_kth_derivative(&special::std_normal_pdf, k, x, 0.8, 6);
            sup_diff = sup_diff.max((fd - exact).abs());
            sup_exact = sup_exact.max(exact.abs());
        }
        let rel = sup_diff / sup_exact;
        out.push(CheckResult::new(
            G,
            &format!("finite-difference derivative order {}", k),
            rel < 1e-4,
            format!("sup rel err = {:.2e}", rel),
        ));
    }

    // Cramer-type envelope sweep
    let mut worst_margin = f64::INFINITY;
    let mut ok = true;
    for k in 1..=30 {
        let (sup, bound) = closed_forms::cramer_bound_check(k);
        ok &= sup <= bound;
        worst_margin = worst_margin.min(bound - sup);
    }
    out.push(CheckResult::new(G, "phi*H_k envelope, k <= 30", ok, format!("min margin = {:.3e}", worst_margin)));
    out
}

pub fn edgeworth_group(cfg: &VerifyConfig) -> Vec<CheckResult> {
    const G: &str = "edgeworth";
    let mut out = Vec::new();

    // dual-form identity on random tuples
    let mut s = RandomStream::new(cfg.seed, region(1));
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let r = 8.0 * (s.next_open01() - 0.5);
        let sv = 4.0 * (s.next_open01() - 0.5);
        let vt = 0.5 + 30.0 * s.next_open01();
        for l in 0..8 {
            let direct = closed_forms::edgeworth_term(l, vt, r, sv);
            let za = closed_forms::edgeworth_term_za(l, -r / vt.sqrt(), sv / vt);
            worst = worst.max((direct - za).abs() / (1.0 + direct.abs()));
        }
    }
    out.push(CheckResult::new(G, "E^l dual forms agree", worst <= 1e-12, format!("max rel = {:.2e}", worst)));

    // expansion bound sweep: m <= 3, |z| <= 0.3, |alpha| <= 0.3
    let grid: Vec<f64> = (-800..=800).map(|i| i as f64 / 100.0).collect();
    let mut ok = true;
    let mut worst_ratio = 0.0f64;
    for m in 1..=3u32 {
        for iz in -3..=3i32 {
            for ia in -3..=3i32 {
                let z = 0.1 * iz as f64;
                let alpha = 0.1 * ia as f64;
                let (err, bound) =
                    closed_forms::edgeworth_expansion_check(m, z, alpha, &grid).unwrap();
                if z == 0.0 && alpha == 0.0 {
                    ok &= err <= 1e-13;
                    continue;
                }
                ok &= err <= bound;
                worst_ratio = worst_ratio.max(err / bound);
            }
        }
    }
    out.push(CheckResult::new(G, "Hermite expansion bound, m <= 3", ok, format!("max err/bound = {:.3}", worst_ratio)));
    out
}

pub fn appendix_group() -> Vec<CheckResult> {
    const G: &str = "appendix";
    let mut out = Vec::new();

    // binomial product bound: n <= 30, alpha + beta <= 6
    let mut ok = true;
    let mut worst = 0.0f64;
    for n in 1..=30u32 {
        for a in 0..=6u32 {
            for b in 0..=(6 - a) {
                if a.max(b) < 1 {
                    continue;
                }
                let m = closed_forms::binom_product_moment(n, a, b).unwrap();
                let center = (n as f64 / 2.0).powi((a + b) as i32);
                let bound = a.max(b) as f64 * (n as f64).powf(a as f64 + b as f64 - 0.5);
                ok &= (m - center).abs() <= bound;
                worst = worst.max((m - center).abs() / bound);
            }
        }
    }
    out.push(CheckResult::new(G, "binomial product bound", ok, format!("max used fraction = {:.3}", worst)));

    // partial-sum moment bounds, uniform summands (even moments 2k, k <= 4)
    let ns = [1u64, 2, 5, 10, 50, 200, 1000];
    let mut ok = true;
    let mut worst = 0.0f64;
    for &n in &ns {
        for k in 1..=4u32 {
            let mu = closed_forms::partial_sum_moment(Summand::UniformSymmetric, n, 2 * k);
            let coeff = factorial_f64(2 * k) / ((2.0f64).powi(k as i32) * factorial_f64(k));
            let lead = (1.0f64 / 3.0).powi(k as i32) * coeff * (n as f64).powi(k as i32);
            let a_k = ((1.0f64 / 3.0).powi(k as i32) + 1.0 / (2.0 * k as f64 - 1.0))
                * (k as f64) * (k as f64);
            let bound = a_k * coeff * (n as f64).powi(k as i32 - 1);
            ok &= (mu - lead).abs() <= bound * (1.0 + 1e-12);
            if bound > 0.0 {
                worst = worst.max((mu - lead).abs() / bound);
            }
        }
    }
    out.push(CheckResult::new(G, "partial-sum bound, uniform summands", ok, format!("max used fraction = {:.3}", worst)));

    // partial-sum moment bounds, variance-defect summands (mean gamma > 0)
    let mut ok = true;
    let mut worst = 0.0f64;
    for &n in &ns {
        for k in 1..=4u32 {
            let mu = closed_forms::partial_sum_moment(Summand::VarianceDefect, n, k);
            let lead = GAMMA.powi(k as i32) * (n as f64).powi(k as i32);
            let abs_moment = closed_forms::summand_moment(Summand::VarianceDefect, k - 1);
            let a_k = (GAMMA.powi(k as i32) + abs_moment) * (k as f64) * (k as f64);
            let bound = a_k * (n as f64).powi(k as i32 - 1);
            ok &= (mu - lead).abs() <= bound * (1.0 + 1e-12);
            if bound > 0.0 {
                worst = worst.max((mu - lead).abs() / bound);
            }
        }
    }
    out.push(CheckResult::new(G, "partial-sum bound, variance-defect summands", ok, format!("max used fraction = {:.3}", worst)));

    out
}

fn factorial_f64(n: u32) -> f64 {
    (1..=n as u64).map(|i| i as f64).product()
}

// ---------------------------------------------------------------------------
// process-level laws
// ---------------------------------------------------------------------------

pub fn process_group(cfg: &VerifyConfig) -> Vec<CheckResult> {
    const G: &str = "process";
    let mut out = Vec::new();

    // strong law: median of n M_n at n = 1e5 over paths
    let n = 100_000u64;
    let paths = cfg.budget(1_000);
    let mut products = par_paths(cfg, region(2), paths, |s| {
        let mut p = GapPartition::new();
        for _ in 0..n {
            p.split_max(s.next_open01()).unwrap();
        }
        n as f64 * p.current_max()
    });
    products.sort_by(f64::total_cmp);
    let median = products[products.len() / 2];
    out.push(CheckResult::new(
        G,
        "strong law: median n*M_n in [1.9, 2.1] at n = 1e5",
        (1.9..=2.1).contains(&median),
        format!("median = {:.4}", median),
    ));

    // conservation after many splits
    let mut s = RandomStream::new(cfg.seed, region(2) + 2_000_000);
    let mut p = GapPartition::new();
    for _ in 0..100_000 {
        p.split_max(s.next_open01()).unwrap();
    }
    let drift = (p.total_length() - 1.0).abs();
    out.push(CheckResult::new(G, "length conservation at n = 1e5", drift <= 1e-12, format!("|sum - 1| = {:.2e}", drift)));

    // normalized-gap law: sup_y |G_n(y) - y/2| < 0.02 at n = 1e5
    let sorted = p.sorted_gaps();
    let scale = (p.step_count() + 1) as f64;
    let normalized: Vec<f64> = sorted.iter().map(|g| scale * g).collect();
    let sup = EmpiricalSample::new(normalized).ks_distance(|y| (y / 2.0).clamp(0.0, 1.0));
    out.push(CheckResult::new(G, "gap-length equidistribution sup < 0.02", sup < 0.02, format!("sup = {:.4}", sup)));

    // endpoint equidistribution: sup_x |E_n(x) - x| < 0.02 at n = 1e5
    let mut s = RandomStream::new(cfg.seed, region(2) + 2_000_001);
    let obs = process::run_positional(100_000, &mut s).unwrap();
    let endpoints = obs.endpoints.clone().unwrap();
    let sup = EmpiricalSample::new(endpoints).ks_distance(|x| x.clamp(0.0, 1.0));
    out.push(CheckResult::new(G, "endpoint equidistribution sup < 0.02", sup < 0.02, format!("sup = {:.4}", sup)));

    out
}

// ---------------------------------------------------------------------------
// inversion & embeddings
// ---------------------------------------------------------------------------

pub fn inversion_group(cfg: &VerifyConfig) -> Vec<CheckResult> {
    const G: &str = "inversion";
    let paths = cfg.budget(10_000);
    let ts = [0.9, 0.5, 0.1, 0.01];
    let violations: u64 = par_paths(cfg, region(3), paths, |s| {
        let flags = embeddings::coupled_inversion_check(100, &ts, s).unwrap();
        flags.iter().filter(|f| !f.equal).count() as u64
    })
    .into_iter()
    .sum();
    vec![CheckResult::new(
        G,
        &format!("{{M_n <= t}} = {{N_t <= n}} on {} paths x 100 x 4 grid", paths),
        violations == 0,
        format!("violations = {}", violations),
    )]
}

pub fn embedding_group(cfg: &VerifyConfig) -> Vec<CheckResult> {
    const G: &str = "embeddings";
    let mut out = Vec::new();

    // N_t = 0 for t >= 1
    let mut s = RandomStream::new(cfg.seed, region(4));
    let r = embeddings::threshold_times(&[1.0, 1.5, 7.0], &mut s).unwrap();
    out.push(CheckResult::new(G, "N_t = 0 for t >= 1", r.times.iter().all(|&n| n == 0), format!("{:?}", r.times)));

    // pathwise: T_tau = N_(e^-tau) and P_0,x = N_(1/x) on coupled streams
    let mut ok = true;
    for i in 0..200u64 {
        let x = 1.5 + 0.12 * i as f64;
        let n1 = embeddings::threshold_times(&[1.0 / x], &mut RandomStream::new(cfg.seed, region(4) + 100 + i))
            .unwrap()
            .times[0];
        let n2 = embeddings::parking_count(x, &mut RandomStream::new(cfg.seed, region(4) + 100 + i)).unwrap();
        let n3 = embeddings::cmj_population(x.ln(), &mut RandomStream::new(cfg.seed, region(4) + 100 + i)).unwrap();
        ok &= n1 == n2 && n1 == n3;
    }
    out.push(CheckResult::new(G, "parking and population counts match threshold times", ok, String::new()));

    // BRW identities to 1e-12 against an independently-run coupled path
    let mut ok = true;
    let mut worst = 0.0f64;
    for i in 0..200u64 {
        let n = 50 + (i % 300);
        let (l, r) = embeddings::brw_extremes(n, &mut RandomStream::new(cfg.seed, region(4) + 1_000 + i)).unwrap();
        let mut p = GapPartition::new();
        let mut s = RandomStream::new(cfg.seed, region(4) + 1_000 + i);
        for _ in 0..n {
            p.split_max(s.next_open01()).unwrap();
        }
        worst = worst.max((l - (1.0 / p.current_max()).ln()).abs());
        worst = worst.max((r - (1.0 / p.current_min()).ln()).abs());
        ok &= l <= r;
    }
    out.push(CheckResult::new(G, "BRW extremes equal log-reciprocal gaps (1e-12)", ok && worst <= 1e-12, format!("max |diff| = {:.2e}", worst)));

    // threshold variance law: both branches of v. threshold_times reports
    // ascending in t, so keep the designs ascending too.
    let samples = cfg.budget(1_000_000);
    let designs = [(0.1, 0.05), (0.25, 0.05), (0.5, 0.05), (0.75, 0.05)];
    let ts: Vec<f64> = designs.iter().map(|d| d.0).collect();
    let rows = par_paths(cfg, region(5), samples, |s| {
        let r = embeddings::threshold_times(&ts, s).unwrap();
        r.times
    });
    for (j, &(t, tol)) in designs.iter().enumerate() {
        let values: Vec<f64> = rows.iter().map(|row| row[j] as f64).collect();
        let (mean, sd) = mean_and_sd(&values);
        let mu = closed_forms::mu(t).unwrap();
        let vt = closed_forms::v(t).unwrap();
        let se = sd / (values.len() as f64).sqrt();
        let mean_ok = (mean - mu).abs() <= 4.0 * se;
        let var = sd * sd;
        let var_ok = (var / vt - 1.0).abs() <= tol;
        out.push(CheckResult::new(
            G,
            &format!("N_t moments at t = {}", t),
            mean_ok && var_ok,
            format!("mean {:.4} vs {:.4} (4se = {:.4}); var {:.4} vs {:.4}", mean, mu, 4.0 * se, var, vt),
        ));
    }

    // self-similar recursion samples the same law as threshold times
    let each = cfg.budget(100_000);
    let t = 0.2;
    let direct: Vec<f64> = par_paths(cfg, region(6), each, |s| {
        embeddings::threshold_times(&[t], s).unwrap().times[0] as f64
    });
    let recursive: Vec<f64> = par_paths(cfg, region(7), each, |s| {
        embeddings::selfsimilar_sample(t, s).unwrap() as f64
    });
    let (d, p) = harness::ks_two_sample(
        &EmpiricalSample::new(direct),
        &EmpiricalSample::new(recursive),
    );
    out.push(CheckResult::new(
        G,
        "self-similar recursion vs direct threshold times (two-sample KS)",
        p > 0.001,
        format!("D = {:.4}, p = {:.4}", d, p),
    ));

    out
}

// ---------------------------------------------------------------------------
// conditional statistics
// ---------------------------------------------------------------------------

fn conditional_batch(cfg: &VerifyConfig, base: u64, n: u64, t: f64, paths: u64) -> Vec<ConditionalStats> {
    let watch = gap_stats::conditional_watch(t);
    par_paths(cfg, base, paths, |s| {
        let obs = process::run(n, s, &watch).unwrap();
        gap_stats::conditional_stats(&obs, t).unwrap()
    })
}

pub fn algebra_group(cfg: &VerifyConfig) -> Vec<CheckResult> {
    const G: &str = "algebra";
    let mut out = Vec::new();
    let (n, t) = (1_000u64, 1e-4);
    let paths = cfg.budget(100_000);
    let stats = conditional_batch(cfg, region(8), n, t, paths);

    let mut max_defect = 0.0f64;
    let mut bound_violations = 0u64;
    for cs in &stats {
        max_defect = max_defect.max(cs.identity_defect().abs());
        if cs.r.abs() > cs.k_t as f64 + 1e-12
            || cs.s.abs() > S0 * cs.k_2t as f64 + 1e-12
            || cs.s > S0 / (2.0 * t) + 1e-9
        {
            bound_violations += 1;
        }
    }
    out.push(CheckResult::new(
        G,
        "pathwise identity S = (s0/2)K - (s0/2)R + W (1e-10)",
        max_defect <= 1e-10,
        format!("max |defect| = {:.2e} over {} paths", max_defect, paths),
    ));
    out.push(CheckResult::new(
        G,
        "pathwise bounds |R| <= K_t, |S| <= s0 K_2t, S <= s0/(2t)",
        bound_violations == 0,
        format!("violations = {}", bound_violations),
    ));

    // E R = 0 and E E^0 = 0
    let rs: Vec<f64> = stats.iter().map(|c| c.r).collect();
    let (mean_r, sd_r) = mean_and_sd(&rs);
    let se_r = sd_r / (rs.len() as f64).sqrt();
    out.push(CheckResult::new(G, "E R = 0", mean_r.abs() <= 4.0 * se_r, format!("mean = {:.4} (4se = {:.4})", mean_r, 4.0 * se_r)));

    let vt = closed_forms::v(t).unwrap();
    let e0: Vec<f64> = stats.iter().map(|c| closed_forms::edgeworth_term(0, vt, c.r, c.s)).collect();
    let (mean_e0, sd_e0) = mean_and_sd(&e0);
    let se_e0 = sd_e0 / (e0.len() as f64).sqrt();
    out.push(CheckResult::new(G, "E E^0 = 0", mean_e0.abs() <= 4.0 * se_e0, format!("mean = {:.2e} (4se = {:.2e})", mean_e0, 4.0 * se_e0)));

    // E S = E K / 3 and Var R = E K / 3 with overlapping 95% CIs
    let ss: Vec<f64> = stats.iter().map(|c| c.s).collect();
    let ks: Vec<f64> = stats.iter().map(|c| c.k_t as f64 / 3.0).collect();
    let (mean_s, sd_s) = mean_and_sd(&ss);
    let (mean_k3, sd_k3) = mean_and_sd(&ks);
    let n_paths = ss.len() as f64;
    let ok = intervals_overlap(mean_s, sd_s / n_paths.sqrt(), mean_k3, sd_k3 / n_paths.sqrt());
    out.push(CheckResult::new(G, "E S = E K/3 (95% CIs overlap)", ok, format!("E S = {:.4}, E K/3 = {:.4}", mean_s, mean_k3)));

    let r2: Vec<f64> = stats.iter().map(|c| c.r * c.r).collect();
    let (var_r, sd_r2) = mean_and_sd(&r2);
    let ok = intervals_overlap(var_r - mean_r * mean_r, sd_r2 / n_paths.sqrt(), mean_k3, sd_k3 / n_paths.sqrt());
    out.push(CheckResult::new(G, "Var R = E K/3 (95% CIs overlap)", ok, format!("Var R = {:.4}, E K/3 = {:.4}", var_r - mean_r * mean_r, mean_k3)));

    out
}

pub fn moment_group(cfg: &VerifyConfig) -> Vec<CheckResult> {
    const G: &str = "moments";
    let mut out = Vec::new();

    // reciprocal-sum decay: sqrt(n) E|4 W_n / n^2 - 1| <= 5
    let watch = WatchConfig::trajectory();
    for (i, &n) in [100u64, 1_000, 10_000].iter().enumerate() {
        let paths = cfg.budget(10_000);
        let devs = par_paths(cfg, region(9 + i as u64), paths, |s| {
            let obs = process::run(n, s, &watch).unwrap();
            (gap_stats::reciprocal_sum_moment(&obs, n, 1).unwrap() - 1.0).abs()
        });
        let value = (n as f64).sqrt() * devs.iter().sum::<f64>() / devs.len() as f64;
        out.push(CheckResult::new(
            G,
            &format!("sqrt(n) E|4W/n^2 - 1| <= 5 at n = {}", n),
            value <= 5.0,
            format!("value = {:.3}", value),
        ));
    }

    // mixed-moment leading terms at (n, t) = (2000, 5e-5)
    let (n, t) = (2_000u64, 5e-5);
    let paths = cfg.budget(1_000_000);
    let stats = conditional_batch(cfg, region(12), n, t, paths);
    let scale = n as f64 * n as f64 * t / 6.0;
    let np = stats.len() as f64;
    let e_r2 = stats.iter().map(|c| c.r * c.r).sum::<f64>() / np;
    let e_r2s = stats.iter().map(|c| c.r * c.r * c.s).sum::<f64>() / np;
    let e_rs = stats.iter().map(|c| c.r * c.s).sum::<f64>() / np;
    let e_r4 = stats.iter().map(|c| c.r.powi(4)).sum::<f64>() / np;

    let cases = [
        ("E R^2 / (n^2 t/6)", e_r2 / scale, 0.85, 1.15),
        ("E R^2 S / (n^2 t/6)^2", e_r2s / (scale * scale), 0.7, 1.3),
        // leading term corrected to -(s0/2)(n^2 t/6); the printed +1/2
        // coefficient is inconsistent with the definitions of R, S, W
        ("E R S / (-(s0/2)(n^2 t/6))", e_rs / (-S0 / 2.0 * scale), 0.7, 1.3),
        ("E R^4 / (3 (n^2 t/6)^2)", e_r4 / (3.0 * scale * scale), 0.7, 1.3),
    ];
    for (name, ratio, lo, hi) in cases {
        out.push(CheckResult::new(G, name, ratio >= lo && ratio <= hi, format!("ratio = {:.4}", ratio)));
    }
    out
}

// ---------------------------------------------------------------------------
// small-gap oracles
// ---------------------------------------------------------------------------

pub fn oracle_group(cfg: &VerifyConfig) -> Vec<CheckResult> {
    const G: &str = "small-gap-oracles";
    let mut out = Vec::new();

    // theta-oracle comparison at (n, t) = (200, 1/1000), 1e5 draws each
    // (fixed budget: the outcome is a law-level statement, not a spot check).
    // The resampled law matches the true one in its first moment, but not
    // exactly: conditioning on the whole max-gap trajectory reveals capture
    // events through the subsequent maxima (a capture leaves the large child
    // in place, a miss does not), so the real capture indicators are
    // negatively correlated where the oracle draws them independently. The
    // strict equality-in-law check is therefore expected to fail; at n = 2
    // one can compute Pr(K = 2) exactly as 4t ln(1/(1-t)) against the
    // oracle's 4t^2 * 2 ln 2.
    let (n, t) = (200u64, 1e-3);
    let each = 100_000u64;
    let watch = WatchConfig {
        registrations: vec![(process::GapWindow::new(0.0, t), process::GapWeight::One)],
        ..WatchConfig::default()
    };
    let direct: Vec<f64> = par_paths(cfg, region(13), each, |s| {
        process::run(n, s, &watch).unwrap().registered[0].count as f64
    });
    let trajectory_watch = WatchConfig::trajectory();
    let oracle: Vec<f64> = par_paths(cfg, region(14), each, |s| {
        let obs = process::run(n, s, &trajectory_watch).unwrap();
        gap_stats::theta_oracle_k(&obs.max_trajectory[..n as usize], 0.0, t, s).unwrap() as f64
    });
    let (mean_d, sd_d) = mean_and_sd(&direct);
    let (mean_o, sd_o) = mean_and_sd(&oracle);
    let nf = each as f64;
    out.push(CheckResult::new(
        G,
        "theta-oracle first moment matches direct K (95% CIs overlap)",
        intervals_overlap(mean_d, sd_d / nf.sqrt(), mean_o, sd_o / nf.sqrt()),
        format!("direct mean {:.4}, oracle mean {:.4}", mean_d, mean_o),
    ));
    let (d, p) =
        harness::ks_two_sample(&EmpiricalSample::new(direct), &EmpiricalSample::new(oracle));
    out.push(CheckResult::new(
        G,
        "theta-oracle K vs direct K (two-sample KS; strict law equality)",
        p > 0.001,
        format!(
            "D = {:.4}, p = {:.1e}; var direct {:.2} vs oracle {:.2} (expected failure: \
             the resampling is exact only to leading order, see README)",
            d,
            p,
            sd_d * sd_d,
            sd_o * sd_o
        ),
    ));

    // Poisson approximation of K at n = 400, theta = 1
    let samples = cfg.budget(100_000);
    let mut s = RandomStream::new(cfg.seed, region(15));
    let (tv, rate) = gap_stats::poisson_tv_check(400, 1.0, samples, &mut s).unwrap();
    out.push(CheckResult::new(
        G,
        "TV(K, Poisson) <= 0.05 at n = 400, theta = 1",
        tv <= 0.05,
        format!("tv = {:.4}, rate scale n^1.5 t = {:.4}", tv, rate),
    ));

    // exponential law of the smallest gap at n = 400
    let n = 400u64;
    let samples = cfg.budget(100_000);
    let values = par_paths(cfg, region(16), samples, |s| {
        let mut p = GapPartition::new();
        for _ in 0..n {
            p.split_max(s.next_open01()).unwrap();
        }
        n as f64 * n as f64 * p.current_min() / 2.0
    });
    let sample = EmpiricalSample::new(values);
    let mut sup = 0.0f64;
    for i in 0..=1000 {
        let x = 5.0 * i as f64 / 1000.0;
        sup = sup.max((sample.survival(x) - closed_forms::exp_survival(x)).abs());
    }
    out.push(CheckResult::new(
        G,
        "sup_x |Pr(n^2 m_n/2 > x) - e^-x| <= 0.05 on [0, 5] at n = 400",
        sup <= 0.05,
        format!("sup = {:.4}", sup),
    ));

    // Gumbel law for the rightmost BRW particle at n = 400
    let gumbel_stats: Vec<f64> = sample.values().iter().map(|v| -v.ln()).collect();
    let sup = EmpiricalSample::new(gumbel_stats).ks_distance(closed_forms::gumbel_cdf);
    out.push(CheckResult::new(
        G,
        "BRW rightmost particle Gumbel fit sup < 0.05 at n = 400",
        sup < 0.05,
        format!("sup = {:.4}", sup),
    ));

    // Dirichlet comparator: exact minimal-spacing law within the 99% DKW band
    let n = 50u64;
    let samples = cfg.budget(100_000);
    let values = par_paths(cfg, region(17), samples, |s| {
        process::dirichlet_run(n, s, false).unwrap().min_final
    });
    let ks = EmpiricalSample::new(values)
        .ks_distance(|x| 1.0 - closed_forms::dirichlet_min_survival(n, x));
    let band = ((2.0f64 / 0.01).ln() / (2.0 * samples as f64)).sqrt();
    out.push(CheckResult::new(
        G,
        "Dirichlet minimal spacing within 99% DKW band at n = 50",
        ks < band,
        format!("ks = {:.5}, band = {:.5}", ks, band),
    ));

    out
}

/// Run every group.
pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    out.extend(constants_group());
    out.extend(closed_form_group());
    out.extend(hermite_group());
    out.extend(edgeworth_group(cfg));
    out.extend(appendix_group());
    out.extend(process_group(cfg));
    out.extend(inversion_group(cfg));
    out.extend(embedding_group(cfg));
    out.extend(algebra_group(cfg));
    out.extend(moment_group(cfg));
    out.extend(oracle_group(cfg));
    out
}
