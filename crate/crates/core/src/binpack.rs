//! Exact minimum fleet size as a one-dimensional bin packing problem.
//!
//! [`k_min`] first compares the classical lower bounds against the better of
//! first-fit decreasing and a subset-sum fill. When they disagree it looks
//! for a packing into lower-bound many bins with an overload-repair local
//! search, then tries to raise the bound with the pattern relaxation, and
//! only then falls back to a depth-first branch and bound. The branch and
//! bound is iterative, so its depth is not limited by the thread stack.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use microlp::{ComparisonOp, OptimizationDirection, Problem, Variable};
use serde::{Deserialize, Serialize};

use crate::rng::Xoshiro256StarStar;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BinPackError {
    #[error("bin capacity must be positive")]
    ZeroCapacity,
    #[error("item {index} has size 0")]
    ZeroItem { index: usize },
    #[error("item {index} of size {size} exceeds capacity {capacity}")]
    ItemTooLarge {
        index: usize,
        size: u64,
        capacity: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinPackProblem {
    items: Vec<u64>,
    capacity: u64,
}

impl BinPackProblem {
    pub fn new(items: Vec<u64>, capacity: u64) -> Result<Self, BinPackError> {
        if capacity == 0 {
            return Err(BinPackError::ZeroCapacity);
        }
        for (index, &size) in items.iter().enumerate() {
            if size == 0 {
                return Err(BinPackError::ZeroItem { index });
            }
            if size > capacity {
                return Err(BinPackError::ItemTooLarge {
                    index,
                    size,
                    capacity,
                });
            }
        }
        Ok(Self { items, capacity })
    }

    pub fn items(&self) -> &[u64] {
        &self.items
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    /// A heuristic packing met the continuous bound.
    L1Match,
    /// A heuristic packing met the Martello-Toth bound.
    L2Match,
    /// A heuristic packing met the pattern relaxation bound.
    PatternMatch,
    /// The search closed the gap.
    BranchAndBound,
    /// Budget ran out; `bins` is the best packing found.
    TimedOut,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinPackResult {
    pub bins: u64,
    pub proven_optimal: bool,
    pub lower_bound: u64,
    pub method: Method,
    /// Branch-and-bound nodes expanded (0 when a bound matched a heuristic packing).
    pub nodes: u64,
}

/// Continuous bound `ceil(sum / capacity)`.
pub fn lb_l1(p: &BinPackProblem) -> u64 {
    p.items.iter().sum::<u64>().div_ceil(p.capacity)
}

/// Martello-Toth L2, maximized over every threshold `k <= capacity / 2`.
pub fn lb_l2(p: &BinPackProblem) -> u64 {
    let mut hist = BTreeMap::new();
    for &w in &p.items {
        *hist.entry(w).or_insert(0u64) += 1;
    }
    let hist: Vec<(u64, u64)> = hist.into_iter().collect();
    l2_sorted(&hist, p.capacity)
}

/// L2 over an ascending `(size, count)` histogram.
///
/// Only thresholds equal to 0 or to an item size can change the bound, so
/// those are the only ones evaluated.
fn l2_sorted(hist: &[(u64, u64)], cap: u64) -> u64 {
    if hist.is_empty() {
        return 0;
    }
    let mut cnt_prefix = Vec::with_capacity(hist.len() + 1);
    let mut sum_prefix = Vec::with_capacity(hist.len() + 1);
    cnt_prefix.push(0u64);
    sum_prefix.push(0u64);
    for &(w, c) in hist {
        cnt_prefix.push(cnt_prefix.last().unwrap() + c);
        sum_prefix.push(sum_prefix.last().unwrap() + w * c);
    }
    let n = hist.len();
    // first index with 2w > cap
    let half = hist.partition_point(|&(w, _)| 2 * w <= cap);

    let mut best = 0;
    let thresholds = std::iter::once(0).chain(hist[..half].iter().map(|&(w, _)| w));
    for k in thresholds {
        // J1: w > cap - k; J2: cap/2 < w <= cap - k; J3: k <= w <= cap/2
        let j1_start = hist.partition_point(|&(w, _)| w <= cap - k).max(half);
        let j3_start = hist.partition_point(|&(w, _)| w < k);
        let n1 = cnt_prefix[n] - cnt_prefix[j1_start];
        let n2 = cnt_prefix[j1_start] - cnt_prefix[half];
        let s2 = sum_prefix[j1_start] - sum_prefix[half];
        let s3 = sum_prefix[half] - sum_prefix[j3_start.min(half)];
        let free_in_j2 = n2 * cap - s2;
        let extra = s3.saturating_sub(free_in_j2).div_ceil(cap);
        best = best.max(n1 + n2 + extra);
    }
    best
}

fn sorted_desc(items: &[u64]) -> Vec<u64> {
    let mut v = items.to_vec();
    v.sort_unstable_by(|a, b| b.cmp(a));
    v
}

/// First-fit decreasing; returns the bin loads.
fn ffd_loads(items_desc: &[u64], cap: u64) -> Vec<u64> {
    let mut loads: Vec<u64> = Vec::new();
    for &w in items_desc {
        match loads.iter_mut().find(|l| **l + w <= cap) {
            Some(l) => *l += w,
            None => loads.push(w),
        }
    }
    loads
}

/// Number of bins used by first-fit decreasing.
pub fn ffd(p: &BinPackProblem) -> u64 {
    ffd_loads(&sorted_desc(&p.items), p.capacity).len() as u64
}

/// Order in which [`fill_once`] offers sizes to the subset-sum program;
/// earlier sizes are preferred when several subsets fill a bin equally.
#[derive(Clone, Copy)]
enum FillOrder {
    Plentiful,
    Largest,
    Smallest,
}

/// Bins used by a slack-minimizing fill: each bin takes the largest
/// remaining item and is then topped up with the subset of remaining items
/// that leaves the least free space (bounded subset-sum over item sizes).
/// The best of a few size preferences is returned.
///
/// Returns `None` when the dynamic program would be too large to be worth
/// running.
pub fn subset_fill(p: &BinPackProblem) -> Option<u64> {
    let mut hist = BTreeMap::new();
    for &w in &p.items {
        *hist.entry(w).or_insert(0u64) += 1;
    }
    let work = (hist.len() as u128) * u128::from(p.capacity) * u128::from(ffd(p));
    if work > 200_000_000 {
        return None;
    }
    let sizes: Vec<u64> = hist.keys().copied().collect();
    let counts: Vec<u64> = hist.values().copied().collect();
    [
        FillOrder::Plentiful,
        FillOrder::Largest,
        FillOrder::Smallest,
    ]
    .into_iter()
    .map(|order| fill_once(&sizes, counts.clone(), p.capacity as usize, order))
    .min()
}

fn fill_once(sizes: &[u64], mut counts: Vec<u64>, cap: usize, pref: FillOrder) -> u64 {
    let mut reach = vec![false; cap + 1];
    let mut used = vec![0u64; cap + 1];
    let mut from = vec![0usize; cap + 1];
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    let mut bins = 0;
    while let Some(top) = counts.iter().rposition(|&c| c > 0) {
        counts[top] -= 1;
        bins += 1;
        let target = cap - sizes[top] as usize;
        reach[..=target].fill(false);
        reach[0] = true;
        match pref {
            FillOrder::Plentiful => order.sort_by_key(|&i| (Reverse(counts[i]), Reverse(sizes[i]))),
            FillOrder::Largest => order.sort_by_key(|&i| Reverse(sizes[i])),
            FillOrder::Smallest => order.sort_by_key(|&i| sizes[i]),
        }
        'sizes: for &i in &order {
            let w = sizes[i] as usize;
            if counts[i] == 0 || w > target {
                continue;
            }
            used[..=target].fill(0);
            for s in w..=target {
                if !reach[s] && reach[s - w] && used[s - w] < counts[i] {
                    reach[s] = true;
                    used[s] = used[s - w] + 1;
                    from[s] = i;
                    if s == target {
                        break 'sizes;
                    }
                }
            }
        }
        let mut s = (0..=target).rev().find(|&s| reach[s]).unwrap_or(0);
        while s > 0 {
            let i = from[s];
            counts[i] -= 1;
            s -= sizes[i] as usize;
        }
    }
    bins
}

/// Tries to pack every item into `bins` bins. Starts from best-fit
/// decreasing with overloads allowed, then repeatedly applies the exchange
/// of at most two items each way between an overloaded bin and another bin
/// that most reduces the total overload, with a short tabu tenure on moved
/// items. Deterministic for a given problem; gives up after `max_moves`
/// moves or at `deadline`.
pub fn fits_in(p: &BinPackProblem, bins: u64, max_moves: u64, deadline: Instant) -> bool {
    let w: Vec<i64> = sorted_desc(&p.items)
        .into_iter()
        .map(|x| x as i64)
        .collect();
    if w.is_empty() {
        return true;
    }
    if bins == 0 {
        return false;
    }
    let cap = p.capacity as i64;
    let k = bins as usize;
    let over = |l: i64| (l - cap).max(0);
    let mut loads = vec![0i64; k];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (i, &wi) in w.iter().enumerate() {
        let b = (0..k)
            .filter(|&b| loads[b] + wi <= cap)
            .max_by_key(|&b| (loads[b], Reverse(b)))
            .unwrap_or_else(|| (0..k).min_by_key(|&b| (loads[b], b)).unwrap());
        loads[b] += wi;
        members[b].push(i);
    }

    // Non-tabu groups of up to two items of one bin, as (weight, items).
    let groups =
        |bin: &[usize], tabu: &[u64], iter: u64, out: &mut Vec<(i64, [Option<usize>; 2])>| {
            out.clear();
            out.push((0, [None, None]));
            let free: Vec<usize> = bin.iter().copied().filter(|&i| tabu[i] <= iter).collect();
            for (x, &i) in free.iter().enumerate() {
                out.push((w[i], [Some(i), None]));
                for &j in &free[x + 1..] {
                    out.push((w[i] + w[j], [Some(i), Some(j)]));
                }
            }
        };

    let mut rng = Xoshiro256StarStar::from_splitmix(w.len() as u64 ^ p.capacity.rotate_left(32));
    let mut tabu = vec![0u64; w.len()];
    let mut candidates = Vec::with_capacity(k.min(FIT_SAMPLE));
    let (mut out_groups, mut in_groups) = (Vec::new(), Vec::new());
    for iter in 1..=max_moves {
        let overloaded: Vec<usize> = (0..k).filter(|&b| loads[b] > cap).collect();
        if overloaded.is_empty() {
            return true;
        }
        if iter % 256 == 1 && Instant::now() >= deadline {
            return false;
        }
        let o = overloaded[rng.below(overloaded.len())];
        // Large packings only look at a random sample of destinations.
        candidates.clear();
        if k <= FIT_SAMPLE {
            candidates.extend(0..k);
        } else {
            candidates.extend((0..FIT_SAMPLE).map(|_| rng.below(k)));
        }
        groups(&members[o], &tabu, iter, &mut out_groups);
        // (delta, destination, group leaving `o`, group coming back)
        let mut best: Option<(i64, usize, usize, usize)> = None;
        let mut ties = 0usize;
        let mut best_items = None;
        let lo = loads[o];
        for &b in candidates.iter().filter(|&&b| b != o) {
            let lb = loads[b];
            let base = over(lo) + over(lb);
            groups(&members[b], &tabu, iter, &mut in_groups);
            for (x, &(a, _)) in out_groups.iter().enumerate().skip(1) {
                for (y, &(c, _)) in in_groups.iter().enumerate() {
                    if c >= a {
                        continue;
                    }
                    let delta = over(lo - a + c) + over(lb + a - c) - base;
                    match best {
                        Some((d, ..)) if delta > d => {}
                        Some((d, ..)) if delta == d => {
                            ties += 1;
                            if rng.below(ties + 1) == 0 {
                                best = Some((delta, b, x, y));
                            }
                        }
                        _ => {
                            ties = 0;
                            best = Some((delta, b, x, y));
                        }
                    }
                }
            }
            if let Some((_, bb, x, y)) = best.filter(|&(_, bb, ..)| bb == b) {
                // Remember the chosen groups before `in_groups` is rebuilt.
                let leaving = out_groups[x].1;
                let returning = in_groups[y].1;
                best_items = Some((bb, leaving, returning));
            }
        }
        let Some((b, leaving, returning)) = best_items.take() else {
            continue;
        };
        let tenure = 3 + rng.below(8) as u64;
        for i in leaving.into_iter().flatten() {
            members[o].retain(|&x| x != i);
            members[b].push(i);
            loads[o] -= w[i];
            loads[b] += w[i];
            tabu[i] = iter + tenure;
        }
        for j in returning.into_iter().flatten() {
            members[b].retain(|&x| x != j);
            members[o].push(j);
            loads[b] -= w[j];
            loads[o] += w[j];
            tabu[j] = iter + tenure;
        }
    }
    loads.iter().all(|&l| l <= cap)
}

/// Move limit of the overload search run before branch and bound.
const FIT_MOVES: u64 = 50_000;
const FIT_SAMPLE: usize = 128;

/// Default per-instance search budget.
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(60);

/// Minimum number of bins, with an optimality flag.
pub fn k_min(p: &BinPackProblem, budget: Duration) -> BinPackResult {
    let deadline = Instant::now() + budget;
    let l1 = lb_l1(p);
    let l2 = lb_l2(p);
    let root_lb = l1.max(l2);
    let greedy = ffd(p);
    let mut upper = subset_fill(p).map_or(greedy, |f| f.min(greedy));
    let proven = |bins: u64, method: Method| BinPackResult {
        bins,
        proven_optimal: true,
        lower_bound: bins,
        method,
        nodes: 0,
    };
    let root_method = if root_lb == l1 {
        Method::L1Match
    } else {
        Method::L2Match
    };
    let slice =
        |share: u32| Instant::now() + deadline.saturating_duration_since(Instant::now()) / share;
    if upper == root_lb || fits_in(p, root_lb, FIT_MOVES, slice(4)) {
        return proven(root_lb, root_method);
    }
    let lower = lb_patterns(p, root_lb, upper, slice(3));
    if lower > root_lb && (lower == upper || fits_in(p, lower, FIT_MOVES, slice(3))) {
        return proven(lower, Method::PatternMatch);
    }
    // A packing one bin short of the heuristics is a better incumbent.
    if upper > lower + 1 && fits_in(p, upper - 1, FIT_MOVES, slice(3)) {
        upper -= 1;
    }
    Search::new(
        p,
        upper,
        lower,
        deadline.saturating_duration_since(Instant::now()),
    )
    .run()
}

/// Fixed-point scale of the dual weights used for the pattern bound.
const DUAL_SCALE: f64 = (1u64 << 24) as f64;
const PATTERN_ROUNDS: usize = 400;

/// Lower bound from the pattern relaxation, where a bin is any multiset of
/// item sizes that fits. Its dual asks for size weights `y >= 0` with every
/// pattern weighing at most 1, and for any such weights `sum(count · y)` is
/// a bound. The dual is solved by cutting planes: each round solves the LP
/// over the patterns found so far and separates with a bounded knapsack.
///
/// Every candidate bound is certified exactly: weights are rounded down to
/// integers and divided by their exact heaviest pattern, so floating-point
/// error can only weaken it. Returns at least `floor`; stops early once
/// `ceiling` is reached or the LP cannot beat the best bound so far.
pub fn lb_patterns(p: &BinPackProblem, floor: u64, ceiling: u64, deadline: Instant) -> u64 {
    let mut hist = BTreeMap::new();
    for &w in &p.items {
        *hist.entry(w).or_insert(0u64) += 1;
    }
    let sizes: Vec<u64> = hist.keys().copied().collect();
    let counts: Vec<u64> = hist.values().copied().collect();
    let cap = p.capacity;
    let limits: Vec<u64> = sizes
        .iter()
        .zip(&counts)
        .map(|(&w, &c)| c.min(cap / w))
        .collect();
    let pieces: u64 = limits
        .iter()
        .map(|&u| u64::from(u64::BITS - u.leading_zeros()))
        .sum();
    if sizes.is_empty() || cap > 1_000_000 || pieces.saturating_mul(cap) > 50_000_000 {
        return floor;
    }

    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let vars: Vec<Variable> = counts
        .iter()
        .map(|&c| lp.add_var(c as f64, (0.0, 1.0)))
        .collect();
    for (i, &u) in limits.iter().enumerate() {
        lp.add_constraint([(vars[i], u as f64)], ComparisonOp::Le, 1.0);
    }
    let mut best = floor;
    for _ in 0..PATTERN_ROUNDS {
        if best >= ceiling || Instant::now() >= deadline {
            break;
        }
        let Ok(outcome) = lp.solve() else { break };
        let Some(sol) = outcome.solution() else { break };
        if ((sol.objective() - 1e-6).ceil() as u64) <= best {
            break;
        }
        let y: Vec<f64> = vars.iter().map(|&v| sol.var_value(v).max(0.0)).collect();
        let scaled: Vec<u64> = y.iter().map(|&v| (v * DUAL_SCALE).floor() as u64).collect();
        let (heaviest, pattern) = heaviest_pattern(&sizes, &limits, cap, &scaled);
        if heaviest > 0 {
            let total: u128 = counts
                .iter()
                .zip(&scaled)
                .map(|(&c, &v)| u128::from(c) * u128::from(v))
                .sum();
            best = best.max(total.div_ceil(u128::from(heaviest)) as u64);
        }
        let weight: f64 = pattern.iter().map(|&(i, a)| a as f64 * y[i]).sum();
        if weight <= 1.0 + 1e-9 {
            break;
        }
        lp.add_constraint(
            pattern
                .iter()
                .map(|&(i, a)| (vars[i], a as f64))
                .collect::<Vec<_>>(),
            ComparisonOp::Le,
            1.0,
        );
    }
    best.min(ceiling)
}

/// Heaviest multiset of sizes (size `i` at most `limits[i]` times) that
/// fits in `cap`, by 0/1 knapsack over binary-split copies. Returns its
/// weight and (size index, multiplicity) pairs.
fn heaviest_pattern(
    sizes: &[u64],
    limits: &[u64],
    cap: u64,
    values: &[u64],
) -> (u64, Vec<(usize, u64)>) {
    let cap = cap as usize;
    // (size index, copies) for each binary piece.
    let mut pieces = Vec::new();
    for (i, &u) in limits.iter().enumerate() {
        let (mut left, mut step) = (u, 1);
        while left > 0 {
            let take = step.min(left);
            pieces.push((i, take));
            left -= take;
            step *= 2;
        }
    }
    let mut best = vec![0u64; cap + 1];
    let mut took = vec![false; pieces.len() * (cap + 1)];
    for (k, &(i, m)) in pieces.iter().enumerate() {
        let w = (sizes[i] * m) as usize;
        let v = values[i] * m;
        if v == 0 {
            continue;
        }
        for c in (w..=cap).rev() {
            if best[c - w] + v > best[c] {
                best[c] = best[c - w] + v;
                took[k * (cap + 1) + c] = true;
            }
        }
    }
    let mut pattern: BTreeMap<usize, u64> = BTreeMap::new();
    let mut c = cap;
    for (k, &(i, m)) in pieces.iter().enumerate().rev() {
        if took[k * (cap + 1) + c] {
            *pattern.entry(i).or_insert(0) += m;
            c -= (sizes[i] * m) as usize;
        }
    }
    (best[cap], pattern.into_iter().collect())
}

struct Frame {
    item: usize,
    /// Bin index to place into, or `None` for a fresh bin.
    options: Vec<Option<usize>>,
    next: usize,
    applied: Option<Option<usize>>,
}

struct Search {
    items: Vec<u64>,
    cap: u64,
    best: u64,
    root_lb: u64,
    deadline: Instant,
    loads: Vec<u64>,
    load_hist: BTreeMap<u64, u64>,
    /// Remaining (unplaced) items as (size, count), ascending by size.
    remaining: Vec<(u64, u64)>,
    size_slot: BTreeMap<u64, usize>,
    nodes: u64,
}

impl Search {
    fn new(p: &BinPackProblem, upper: u64, root_lb: u64, budget: Duration) -> Self {
        let items = sorted_desc(&p.items);
        let mut hist = BTreeMap::new();
        for &w in &items {
            *hist.entry(w).or_insert(0u64) += 1;
        }
        let remaining: Vec<(u64, u64)> = hist.into_iter().collect();
        let size_slot = remaining
            .iter()
            .enumerate()
            .map(|(i, &(w, _))| (w, i))
            .collect();
        Self {
            items,
            cap: p.capacity,
            best: upper,
            root_lb,
            deadline: Instant::now() + budget,
            loads: Vec::new(),
            load_hist: BTreeMap::new(),
            remaining,
            size_slot,
            nodes: 0,
        }
    }

    fn adjust_load_hist(&mut self, load: u64, add: bool) {
        if add {
            *self.load_hist.entry(load).or_insert(0) += 1;
        } else {
            let c = self.load_hist.get_mut(&load).expect("load present");
            *c -= 1;
            if *c == 0 {
                self.load_hist.remove(&load);
            }
        }
    }

    fn place(&mut self, item: usize, target: Option<usize>) {
        let w = self.items[item];
        self.remaining[self.size_slot[&w]].1 -= 1;
        match target {
            Some(b) => {
                let old = self.loads[b];
                self.adjust_load_hist(old, false);
                self.loads[b] = old + w;
                self.adjust_load_hist(old + w, true);
            }
            None => {
                self.loads.push(w);
                self.adjust_load_hist(w, true);
            }
        }
    }

    fn unplace(&mut self, item: usize, target: Option<usize>) {
        let w = self.items[item];
        self.remaining[self.size_slot[&w]].1 += 1;
        match target {
            Some(b) => {
                let old = self.loads[b];
                self.adjust_load_hist(old, false);
                self.loads[b] = old - w;
                self.adjust_load_hist(old - w, true);
            }
            None => {
                self.loads.pop();
                self.adjust_load_hist(w, false);
            }
        }
    }

    /// Lower bound on the total bins of any completion of the current
    /// partial packing, with `next_item` the first unplaced item.
    fn bound(&self, next_item: usize) -> u64 {
        let open = self.loads.len() as u64;
        if next_item >= self.items.len() {
            return open;
        }
        // Open bins whose residual is below every remaining item are dead
        // space.
        let smallest = *self.items.last().unwrap();
        let total: u64 = self.items.iter().sum();
        let waste: u64 = self
            .loads
            .iter()
            .map(|&l| self.cap - l)
            .filter(|&r| r < smallest)
            .sum();
        let waste_bound = (total + waste).div_ceil(self.cap);

        // Any completion packs the open-bin loads (as items) together with
        // the remaining items.
        let mut merged: BTreeMap<u64, u64> = self.load_hist.clone();
        for &(w, c) in &self.remaining {
            if c > 0 {
                *merged.entry(w).or_insert(0) += c;
            }
        }
        let hist: Vec<(u64, u64)> = merged.into_iter().collect();
        let l2 = l2_sorted(&hist, self.cap);
        open.max(waste_bound).max(l2)
    }

    fn frame(&self, item: usize) -> Frame {
        let w = self.items[item];
        let mut by_residual: BTreeMap<u64, usize> = BTreeMap::new();
        for (b, &l) in self.loads.iter().enumerate() {
            let r = self.cap - l;
            if r >= w {
                by_residual.entry(r).or_insert(b);
            }
        }
        let options = if let Some(&b) = by_residual.get(&w) {
            // An exact fit dominates every other placement.
            vec![Some(b)]
        } else {
            let mut opts: Vec<Option<usize>> = by_residual.values().map(|&b| Some(b)).collect();
            if (self.loads.len() as u64) + 1 < self.best {
                opts.push(None);
            }
            opts
        };
        Frame {
            item,
            options,
            next: 0,
            applied: None,
        }
    }

    fn run(mut self) -> BinPackResult {
        let n = self.items.len();
        let mut stack = vec![self.frame(0)];
        let mut timed_out = false;
        while let Some(top) = stack.last_mut() {
            if let Some(prev) = top.applied.take() {
                let item = top.item;
                self.unplace(item, prev);
            }
            let top = stack.last_mut().unwrap();
            if top.next >= top.options.len() {
                stack.pop();
                continue;
            }
            let item = top.item;
            let choice = top.options[top.next];
            top.next += 1;
            top.applied = Some(choice);
            self.place(item, choice);

            self.nodes += 1;
            if self.nodes.is_multiple_of(1024) && Instant::now() >= self.deadline {
                timed_out = true;
                break;
            }

            if item + 1 == n {
                let used = self.loads.len() as u64;
                if used < self.best {
                    self.best = used;
                    if self.best == self.root_lb {
                        break;
                    }
                }
                continue;
            }
            if self.bound(item + 1) >= self.best {
                continue;
            }
            let next = self.frame(item + 1);
            stack.push(next);
        }

        let proven = !timed_out;
        BinPackResult {
            bins: self.best,
            proven_optimal: proven,
            lower_bound: if proven { self.best } else { self.root_lb },
            method: if proven {
                Method::BranchAndBound
            } else {
                Method::TimedOut
            },
            nodes: self.nodes,
        }
    }
}
