//! Threshold times, the max-gap inversion, and model translations.
//!
//! `N_t` is the first step at which every gap is `<= t`; it is the pathwise
//! inverse of the max-gap trajectory through `{M_n <= t} = {N_t <= n}`.
//! Mapping lengths through `x -> log(1/x)` turns the process into a binary
//! branching population (total count before a horizon), an extremum-driven
//! branching random walk (leftmost/rightmost particles), and, by rescaling
//! the kerb, a zero-length-slack parking count.

use crate::error::{Error, Result};
use crate::process::{self, GapPartition, WatchConfig};
use crate::stream::RandomStream;

/// Threshold crossing times along a single path.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdResult {
    /// Sorted ascending.
    pub thresholds: Vec<f64>,
    /// N_t for each threshold, same order (antitone: larger t, smaller N).
    pub times: Vec<u64>,
}

impl ThresholdResult {
    /// Look up N_t for one of the requested thresholds.
    pub fn time_for(&self, t: f64) -> Option<u64> {
        self.thresholds.iter().position(|&tt| tt == t).map(|i| self.times[i])
    }
}

/// Run one path until every threshold has crossed; single pass for all of
/// them. Thresholds `t >= 1` report `N_t = 0`.
pub fn threshold_times(ts: &[f64], stream: &mut RandomStream) -> Result<ThresholdResult> {
    if ts.is_empty() {
        return Ok(ThresholdResult { thresholds: Vec::new(), times: Vec::new() });
    }
    if let Some(&bad) = ts.iter().find(|&&t| t <= 0.0) {
        return Err(Error::InvalidThreshold(bad));
    }
    let mut p = GapPartition::new();
    p.track_thresholds(ts)?;
    while p.pending_thresholds() > 0 {
        p.split_max(stream.next_open01())?;
    }
    let pairs = p.threshold_times();
    Ok(ThresholdResult {
        thresholds: pairs.iter().map(|(t, _)| *t).collect(),
        times: pairs.iter().map(|(_, n)| n.expect("all crossed")).collect(),
    })
}

/// Outcome of the pathwise inversion check for one (n, t) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InversionFlag {
    pub n: u64,
    pub t: f64,
    /// Whether {M_n <= t} and {N_t <= n} agreed on this path.
    pub equal: bool,
}

/// Verify the pathwise equivalence {M_n <= t} = {N_t <= n} on a single
/// path, for every n in 1..=n_max crossed with every threshold.
pub fn coupled_inversion_check(
    n_max: u64,
    ts: &[f64],
    stream: &mut RandomStream,
) -> Result<Vec<InversionFlag>> {
    let watch = WatchConfig {
        record_max_trajectory: true,
        thresholds: ts.to_vec(),
        ..WatchConfig::default()
    };
    let obs = process::run_until_crossed(n_max, stream, &watch)?;
    let mut flags = Vec::with_capacity(n_max as usize * ts.len());
    for n in 1..=n_max {
        let m_n = obs.max_trajectory[n as usize];
        for &(t, nt) in &obs.threshold_times {
            let nt = nt.expect("run_until_crossed leaves no pending thresholds");
            let lhs = m_n <= t;
            let rhs = nt <= n;
            flags.push(InversionFlag { n, t, equal: lhs == rhs });
        }
    }
    Ok(flags)
}

/// Total population before horizon `tau` in the binary branching embedding,
/// computed as `N_{exp(-tau)}` on a fresh path.
pub fn cmj_population(tau: f64, stream: &mut RandomStream) -> Result<u64> {
    if tau < 0.0 {
        return Err(Error::Domain("cmj_population requires tau >= 0"));
    }
    let t = (-tau).exp();
    if t >= 1.0 {
        return Ok(0);
    }
    if t <= 0.0 {
        return Err(Error::Domain("horizon too large: exp(-tau) underflows"));
    }
    Ok(threshold_times(&[t], stream)?.times[0])
}

/// Leftmost and rightmost particle positions after `n` branching events in
/// the extremum-driven branching random walk: `(log(1/M_n), log(1/m_n))`.
pub fn brw_extremes(n: u64, stream: &mut RandomStream) -> Result<(f64, f64)> {
    if n < 1 {
        return Err(Error::Domain("brw_extremes requires n >= 1"));
    }
    let mut p = GapPartition::new();
    for _ in 0..n {
        p.split_max(stream.next_open01())?;
    }
    Ok((-p.current_max().ln(), -p.current_min().ln()))
}

/// Number of zero-length cars parked at jamming on the kerb [0, x]:
/// `P_{0,x} = N_{1/x}`.
pub fn parking_count(x: f64, stream: &mut RandomStream) -> Result<u64> {
    if x <= 0.0 {
        return Err(Error::Domain("parking_count requires x > 0"));
    }
    if x <= 1.0 {
        return Ok(0);
    }
    Ok(threshold_times(&[1.0 / x], stream)?.times[0])
}

/// Node budget for [`selfsimilar_sample`]; far above the a.s.-finite size,
/// so hitting it signals a bug rather than censored data.
pub const SELFSIMILAR_NODE_CAP: u64 = 1_000_000;

/// Sample the law of `N_t` by the self-similar recursion
/// `N_t = N^(1)_{t/U} + N^(2)_{t/(1-U)} + 1`, with leaves returning 0 once
/// the argument reaches 1. Never builds a partition, so it is an independent
/// oracle for the threshold-time law.
pub fn selfsimilar_sample(t: f64, stream: &mut RandomStream) -> Result<u64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain("selfsimilar_sample requires 0 < t < 1"));
    }
    let mut count = 0u64;
    let mut pending = vec![t];
    while let Some(s) = pending.pop() {
        if s >= 1.0 {
            continue;
        }
        count += 1;
        if count > SELFSIMILAR_NODE_CAP {
            return Err(Error::RecursionCapExceeded(SELFSIMILAR_NODE_CAP));
        }
        let u = stream.next_open01();
        pending.push(s / u);
        pending.push(s / (1.0 - u));
    }
    Ok(count)
}
