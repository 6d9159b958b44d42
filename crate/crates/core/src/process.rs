//! The splitting engine.
//!
//! A [`GapPartition`] holds the live state of the interval-splitting process
//! as a max-heap of gap lengths plus monotone trackers: the current maximal
//! and minimal gap, first-crossing steps for registered thresholds, and
//! incremental small-gap counters. Gap positions are not stored; the
//! [`PositionalPartition`] variant retains (left endpoint, length) pairs for
//! endpoint statistics at O(n) memory. [`DirichletPartition`] is the
//! length-biased comparator in which the split gap is chosen with probability
//! proportional to its length rather than always being the largest.

use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::stream::RandomStream;

/// Smallest representable gap before a path is declared degenerate.
const MIN_GAP: f64 = 1e-300;

/// Gap length with a total order; ties are broken by heap extraction order
/// (they occur with probability zero under continuous draws).
#[derive(Debug, Clone, Copy, PartialEq)]
struct GapLen(f64);

impl Eq for GapLen {}

impl PartialOrd for GapLen {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GapLen {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Named pure weight functions on [0, 1] for small-gap statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GapWeight {
    /// g(u) = 1: plain counting.
    One,
    /// g(u) = u: length-fraction sums.
    Identity,
    /// g(u) = 1 - 2u: the conditional-mean weight behind `R`.
    RWeight,
    /// g(u) = 1{u <= 1/2}.
    LowerHalfIndicator,
    /// g(u) = w(1/(2u)): on a window (t, 2t] this accumulates the
    /// variance-defect sum `sum_j w(t / L_j)` behind `W`.
    VarianceDefectHalf,
}

impl GapWeight {
    #[inline]
    pub fn eval(&self, u: f64) -> f64 {
        match self {
            GapWeight::One => 1.0,
            GapWeight::Identity => u,
            GapWeight::RWeight => 1.0 - 2.0 * u,
            GapWeight::LowerHalfIndicator => {
                if u <= 0.5 {
                    1.0
                } else {
                    0.0
                }
            }
            GapWeight::VarianceDefectHalf => crate::closed_forms::w(1.0 / (2.0 * u)),
        }
    }
}

/// Half-open capture window (lo, hi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapWindow {
    pub lo: f64,
    pub hi: f64,
}

impl GapWindow {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    #[inline]
    fn captures(&self, len: f64) -> bool {
        len > self.lo && len <= self.hi
    }
}

/// A small-gap registration with its running statistics.
///
/// The incremental update is exact while the regime `2 n hi <= 1` holds: in
/// that regime every gap of length `<= hi` is strictly smaller than the
/// current maximum, so captured gaps are never split again and the counters
/// only grow. Past the regime boundary the counters keep accumulating but
/// `regime_valid` turns false; use [`GapPartition::scan_statistic`] for the
/// exact value there.
#[derive(Debug, Clone, PartialEq)]
pub struct RegisteredStat {
    pub window: GapWindow,
    pub weight: GapWeight,
    /// K_n(lo, hi]: number of captured gaps.
    pub count: u64,
    /// Sum of `weight(len / hi)` over captured gaps.
    pub weighted_sum: f64,
    /// True while `2 n hi <= 1` held at every step so far.
    pub regime_valid: bool,
}

impl RegisteredStat {
    fn new(window: GapWindow, weight: GapWeight) -> Self {
        Self { window, weight, count: 0, weighted_sum: 0.0, regime_valid: true }
    }

    #[inline]
    fn offer(&mut self, len: f64) {
        if self.window.captures(len) {
            self.count += 1;
            self.weighted_sum += self.weight.eval(len / self.window.hi);
        }
    }
}

#[derive(Debug, Clone)]
struct ThresholdTracker {
    /// Sorted descending.
    thresholds: Vec<f64>,
    /// Crossing steps, aligned with `thresholds`.
    times: Vec<Option<u64>>,
    /// Index of the first still-pending threshold.
    next: usize,
}

impl ThresholdTracker {
    #[inline]
    fn on_new_max(&mut self, max: f64, step: u64) {
        while self.next < self.thresholds.len() && max <= self.thresholds[self.next] {
            self.times[self.next] = Some(step);
            self.next += 1;
        }
    }

    fn pending(&self) -> usize {
        self.thresholds.len() - self.next
    }
}

/// Live state of the splitting process.
#[derive(Debug, Clone)]
pub struct GapPartition {
    heap: BinaryHeap<GapLen>,
    step: u64,
    min: f64,
    thresholds: Option<ThresholdTracker>,
    registrations: Vec<RegisteredStat>,
}

impl GapPartition {
    /// The initial state: a single gap of length 1.
    pub fn new() -> Self {
        let mut heap = BinaryHeap::with_capacity(64);
        heap.push(GapLen(1.0));
        Self { heap, step: 0, min: 1.0, thresholds: None, registrations: Vec::new() }
    }

    /// Step count n.
    #[inline]
    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Current maximal gap M_n.
    #[inline]
    pub fn current_max(&self) -> f64 {
        self.heap.peek().expect("partition is never empty").0
    }

    /// Current minimal gap m_n.
    #[inline]
    pub fn current_min(&self) -> f64 {
        self.min
    }

    /// Number of gaps (always step_count + 1).
    pub fn gap_count(&self) -> usize {
        self.heap.len()
    }

    /// Iterate the gap lengths in unspecified order.
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.heap.iter().map(|g| g.0)
    }

    /// Sum of all gap lengths (on-demand conservation check; 1 within 1e-12).
    pub fn total_length(&self) -> f64 {
        self.gaps().sum()
    }

    /// Register thresholds whose first-crossing steps N_t should be tracked.
    ///
    /// Must be called before the first split. Thresholds `t >= 1` cross
    /// immediately (M_0 = 1), so N_t = 0 for them.
    pub fn track_thresholds(&mut self, ts: &[f64]) -> Result<()> {
        if self.step > 0 {
            return Err(Error::InvalidRegistration(0.0, f64::NAN, self.step));
        }
        if let Some(&bad) = ts.iter().find(|&&t| t <= 0.0) {
            return Err(Error::InvalidThreshold(bad));
        }
        let mut sorted = ts.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let times = vec![None; sorted.len()];
        let mut tracker = ThresholdTracker { thresholds: sorted, times, next: 0 };
        tracker.on_new_max(1.0, 0);
        self.thresholds = Some(tracker);
        Ok(())
    }

    /// Register a small-gap window/weight; must be in place from step 0.
    pub fn register(&mut self, window: GapWindow, weight: GapWeight) -> Result<()> {
        if self.step > 0 {
            return Err(Error::InvalidRegistration(window.lo, window.hi, self.step));
        }
        self.registrations.push(RegisteredStat::new(window, weight));
        Ok(())
    }

    /// Split the maximal gap at fraction `u` of its length.
    pub fn split_max(&mut self, u: f64) -> Result<()> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidDraw(u));
        }
        let GapLen(m) = self.heap.pop().expect("partition is never empty");
        let a = u * m;
        let b = m - a;
        let small = a.min(b);
        if small < MIN_GAP {
            return Err(Error::DegeneratePath(small, self.step + 1));
        }
        self.heap.push(GapLen(a));
        self.heap.push(GapLen(b));
        self.step += 1;
        if small < self.min {
            self.min = small;
        }
        if !self.registrations.is_empty() {
            let in_regime = 2.0 * self.step as f64;
            for reg in &mut self.registrations {
                reg.offer(a);
                reg.offer(b);
                if in_regime * reg.window.hi > 1.0 {
                    reg.regime_valid = false;
                }
            }
        }
        if let Some(tracker) = &mut self.thresholds {
            let max = self.heap.peek().expect("non-empty").0;
            tracker.on_new_max(max, self.step);
        }
        Ok(())
    }

    /// Number of tracked thresholds not yet crossed.
    pub fn pending_thresholds(&self) -> usize {
        self.thresholds.as_ref().map_or(0, |t| t.pending())
    }

    /// Crossing steps for the tracked thresholds, sorted ascending in t.
    pub fn threshold_times(&self) -> Vec<(f64, Option<u64>)> {
        match &self.thresholds {
            None => Vec::new(),
            Some(tr) => {
                let mut out: Vec<(f64, Option<u64>)> =
                    tr.thresholds.iter().copied().zip(tr.times.iter().copied()).collect();
                out.reverse();
                out
            }
        }
    }

    /// Registered statistics snapshot.
    pub fn registered(&self) -> &[RegisteredStat] {
        &self.registrations
    }

    /// Empirical distribution function of normalized gaps:
    /// G_n(y) = (n+1)^{-1} sum_i 1{(n+1) L_i <= y}.
    pub fn edf_gaps(&self, y: f64) -> f64 {
        let scale = (self.step + 1) as f64;
        let hits = self.gaps().filter(|&l| scale * l <= y).count();
        hits as f64 / scale
    }

    /// Full-scan evaluation of a small-gap statistic on the current state:
    /// `sum_i weight(L_i / hi) 1{lo < L_i <= hi}`.
    ///
    /// Valid in every regime; the slow cross-check oracle for the
    /// incremental counters.
    pub fn scan_statistic(&self, weight: GapWeight, lo: f64, hi: f64) -> (u64, f64) {
        let mut count = 0u64;
        let mut sum = 0.0;
        for l in self.gaps() {
            if l > lo && l <= hi {
                count += 1;
                sum += weight.eval(l / hi);
            }
        }
        (count, sum)
    }

    /// Sorted gap lengths, ascending.
    pub fn sorted_gaps(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.gaps().collect();
        v.sort_by(f64::total_cmp);
        v
    }
}

impl Default for GapPartition {
    fn default() -> Self {
        Self::new()
    }
}

/// Observer configuration for [`run`].
#[derive(Debug, Clone, Default)]
pub struct WatchConfig {
    /// Record M_0..M_n.
    pub record_max_trajectory: bool,
    /// Keep the sorted final gap lengths.
    pub keep_final_gaps: bool,
    /// Thresholds whose crossing steps are tracked.
    pub thresholds: Vec<f64>,
    /// Small-gap registrations active from step 0.
    pub registrations: Vec<(GapWindow, GapWeight)>,
}

impl WatchConfig {
    pub fn trajectory() -> Self {
        Self { record_max_trajectory: true, ..Self::default() }
    }
}

/// Per-path trajectory record.
#[derive(Debug, Clone, PartialEq)]
pub struct PathObservables {
    pub n_final: u64,
    /// M_0..M_n when recorded, empty otherwise.
    pub max_trajectory: Vec<f64>,
    pub max_final: f64,
    pub min_final: f64,
    /// Sorted ascending, when kept.
    pub final_gaps: Option<Vec<f64>>,
    /// Interior endpoints sorted ascending, when produced by the positional engine.
    pub endpoints: Option<Vec<f64>>,
    /// (t, N_t) sorted ascending in t; None = not yet crossed.
    pub threshold_times: Vec<(f64, Option<u64>)>,
    /// Small-gap registration snapshots.
    pub registered: Vec<RegisteredStat>,
}

impl PathObservables {
    /// Look up N_t for a tracked threshold.
    pub fn threshold_time(&self, t: f64) -> Option<Option<u64>> {
        self.threshold_times.iter().find(|(tt, _)| *tt == t).map(|(_, n)| *n)
    }
}

/// Run `n` splits driven by consecutive uniforms from `stream`.
pub fn run(n: u64, stream: &mut RandomStream, watch: &WatchConfig) -> Result<PathObservables> {
    let mut p = GapPartition::new();
    if !watch.thresholds.is_empty() {
        p.track_thresholds(&watch.thresholds)?;
    }
    for (window, weight) in &watch.registrations {
        p.register(*window, *weight)?;
    }
    let mut trajectory = if watch.record_max_trajectory {
        let mut v = Vec::with_capacity(n as usize + 1);
        v.push(1.0);
        v
    } else {
        Vec::new()
    };
    for _ in 0..n {
        p.split_max(stream.next_open01())?;
        if watch.record_max_trajectory {
            trajectory.push(p.current_max());
        }
    }
    Ok(PathObservables {
        n_final: n,
        max_trajectory: trajectory,
        max_final: p.current_max(),
        min_final: p.current_min(),
        final_gaps: watch.keep_final_gaps.then(|| p.sorted_gaps()),
        endpoints: None,
        threshold_times: p.threshold_times(),
        registered: p.registrations.clone(),
    })
}

/// Run until every tracked threshold in `watch.thresholds` has crossed,
/// then keep going until at least `min_steps`.
pub fn run_until_crossed(
    min_steps: u64,
    stream: &mut RandomStream,
    watch: &WatchConfig,
) -> Result<PathObservables> {
    let mut p = GapPartition::new();
    p.track_thresholds(&watch.thresholds)?;
    for (window, weight) in &watch.registrations {
        p.register(*window, *weight)?;
    }
    let mut trajectory = if watch.record_max_trajectory { vec![1.0] } else { Vec::new() };
    while p.pending_thresholds() > 0 || p.step_count() < min_steps {
        p.split_max(stream.next_open01())?;
        if watch.record_max_trajectory {
            trajectory.push(p.current_max());
        }
    }
    Ok(PathObservables {
        n_final: p.step_count(),
        max_trajectory: trajectory,
        max_final: p.current_max(),
        min_final: p.current_min(),
        final_gaps: watch.keep_final_gaps.then(|| p.sorted_gaps()),
        endpoints: None,
        threshold_times: p.threshold_times(),
        registered: p.registrations.clone(),
    })
}

/// Empirical endpoint distribution from a positional-engine path:
/// `E_n(x) = n^{-1} sum_i 1{X_i <= x}` over the n interior endpoints.
pub fn edf_endpoints(path: &PathObservables, x: f64) -> Result<f64> {
    let endpoints = path
        .endpoints
        .as_ref()
        .ok_or(Error::UnsupportedObservable("endpoint positions were not retained"))?;
    if endpoints.is_empty() {
        return Err(Error::UnsupportedObservable("no interior endpoints at n = 0"));
    }
    let hits = endpoints.partition_point(|&e| e <= x);
    Ok(hits as f64 / endpoints.len() as f64)
}

/// Positional gap: length plus left endpoint. Ordered by length.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PosGap {
    len: f64,
    left: f64,
}

impl Eq for PosGap {}

impl PartialOrd for PosGap {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PosGap {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len.total_cmp(&other.len).then(self.left.total_cmp(&other.left))
    }
}

/// Opt-in engine variant that retains gap positions; O(n) memory.
#[derive(Debug, Clone)]
pub struct PositionalPartition {
    heap: BinaryHeap<PosGap>,
    step: u64,
    min: f64,
}

impl PositionalPartition {
    pub fn new() -> Self {
        let mut heap = BinaryHeap::with_capacity(64);
        heap.push(PosGap { len: 1.0, left: 0.0 });
        Self { heap, step: 0, min: 1.0 }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn current_max(&self) -> f64 {
        self.heap.peek().expect("non-empty").len
    }

    pub fn current_min(&self) -> f64 {
        self.min
    }

    pub fn split_max(&mut self, u: f64) -> Result<()> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidDraw(u));
        }
        let PosGap { len, left } = self.heap.pop().expect("non-empty");
        let a = u * len;
        let b = len - a;
        if a.min(b) < MIN_GAP {
            return Err(Error::DegeneratePath(a.min(b), self.step + 1));
        }
        self.heap.push(PosGap { len: a, left });
        self.heap.push(PosGap { len: b, left: left + a });
        self.step += 1;
        if a.min(b) < self.min {
            self.min = a.min(b);
        }
        Ok(())
    }

    /// Interior endpoints X_1 < ... < X_n.
    pub fn endpoints_sorted(&self) -> Vec<f64> {
        let mut v: Vec<f64> =
            self.heap.iter().map(|g| g.left).filter(|&l| l > 0.0).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn sorted_gaps(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.heap.iter().map(|g| g.len).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    pub fn edf_gaps(&self, y: f64) -> f64 {
        let scale = (self.step + 1) as f64;
        let hits = self.heap.iter().filter(|g| scale * g.len <= y).count();
        hits as f64 / scale
    }
}

impl Default for PositionalPartition {
    fn default() -> Self {
        Self::new()
    }
}

/// Run the positional engine for `n` splits, retaining endpoints and gaps.
pub fn run_positional(n: u64, stream: &mut RandomStream) -> Result<PathObservables> {
    let mut p = PositionalPartition::new();
    for _ in 0..n {
        p.split_max(stream.next_open01())?;
    }
    Ok(PathObservables {
        n_final: n,
        max_trajectory: Vec::new(),
        max_final: p.current_max(),
        min_final: p.current_min(),
        final_gaps: Some(p.sorted_gaps()),
        endpoints: Some(p.endpoints_sorted()),
        threshold_times: Vec::new(),
        registered: Vec::new(),
    })
}

/// The Dirichlet (length-biased) comparator: each step drops a uniform point
/// into [0, 1], splitting the gap that contains it.
#[derive(Debug, Clone)]
pub struct DirichletPartition {
    gaps: Vec<f64>,
    step: u64,
    max: f64,
    min: f64,
}

impl DirichletPartition {
    pub fn new() -> Self {
        Self { gaps: vec![1.0], step: 0, max: 1.0, min: 1.0 }
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn current_max(&self) -> f64 {
        self.max
    }

    pub fn current_min(&self) -> f64 {
        self.min
    }

    /// Drop the point at position `u` in [0, 1]. The containing gap is found
    /// by a cumulative walk; the residual offset within it is uniform, so a
    /// single draw drives both the gap choice and the split fraction.
    pub fn drop_point(&mut self, u: f64) -> Result<()> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidDraw(u));
        }
        let mut acc = 0.0;
        let mut idx = self.gaps.len() - 1;
        for (i, &g) in self.gaps.iter().enumerate() {
            if u <= acc + g {
                idx = i;
                break;
            }
            acc += g;
        }
        let len = self.gaps[idx];
        let a = u - acc;
        let b = len - a;
        let small = a.min(b);
        if small < MIN_GAP {
            return Err(Error::DegeneratePath(small, self.step + 1));
        }
        self.gaps[idx] = a;
        self.gaps.push(b);
        self.step += 1;
        if small < self.min {
            self.min = small;
        }
        if len == self.max {
            self.max = self.gaps.iter().copied().fold(0.0, f64::max);
        }
        Ok(())
    }
}

impl Default for DirichletPartition {
    fn default() -> Self {
        Self::new()
    }
}

/// Run the Dirichlet comparator for `n` steps.
pub fn dirichlet_run(
    n: u64,
    stream: &mut RandomStream,
    record_max_trajectory: bool,
) -> Result<PathObservables> {
    let mut p = DirichletPartition::new();
    let mut trajectory = if record_max_trajectory { vec![1.0] } else { Vec::new() };
    for _ in 0..n {
        p.drop_point(stream.next_open01())?;
        if record_max_trajectory {
            trajectory.push(p.current_max());
        }
    }
    let mut final_gaps = p.gaps.clone();
    final_gaps.sort_by(f64::total_cmp);
    Ok(PathObservables {
        n_final: n,
        max_trajectory: trajectory,
        max_final: p.current_max(),
        min_final: p.current_min(),
        final_gaps: Some(final_gaps),
        endpoints: None,
        threshold_times: Vec::new(),
        registered: Vec::new(),
    })
}
