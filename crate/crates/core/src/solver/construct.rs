//! Parallel Clarke-Wright savings over a granular candidate list.

use std::collections::VecDeque;

use crate::model::Instance;

/// For each node `0..=n`, the `k` nearest customers (never itself, never
/// the depot), nearest first with ties broken by index. Entry 0 is empty.
pub fn nearest_neighbors(inst: &Instance, k: usize) -> Vec<Vec<usize>> {
    let n = inst.n_customers();
    let k = k.min(n.saturating_sub(1));
    let mut out = vec![Vec::new(); n + 1];
    let mut scratch: Vec<(i64, usize)> = Vec::with_capacity(n);
    for (u, slot) in out.iter_mut().enumerate().skip(1) {
        let pu = inst.node(u);
        scratch.clear();
        scratch.extend(
            (1..=n)
                .filter(|&v| v != u)
                .map(|v| (pu.squared_distance(inst.node(v)), v)),
        );
        if k < scratch.len() && k > 0 {
            scratch.select_nth_unstable(k - 1);
            scratch.truncate(k);
        }
        scratch.sort_unstable();
        slot.extend(scratch.iter().take(k).map(|&(_, v)| v));
    }
    out
}

/// Savings construction restricted to neighbor pairs. Only strictly
/// positive savings merge; ties are taken in `(i, j)` order.
pub(crate) fn savings_routes(inst: &Instance, neighbors: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = inst.n_customers();
    let mut pairs: Vec<(i64, usize, usize)> = Vec::with_capacity(n * 4);
    for (i, list) in neighbors.iter().enumerate().skip(1) {
        for &j in list {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            let s = inst.cost(0, a) as i64 + inst.cost(0, b) as i64 - inst.cost(a, b) as i64;
            if s > 0 {
                pairs.push((s, a, b));
            }
        }
    }
    pairs.sort_unstable_by(|x, y| y.0.cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    pairs.dedup();

    let cap = u64::from(inst.capacity);
    let mut route_of: Vec<usize> = (0..=n).collect();
    let mut routes: Vec<VecDeque<usize>> = (0..=n).map(|c| VecDeque::from([c])).collect();
    routes[0].clear();
    let mut loads: Vec<u64> = (0..=n)
        .map(|c| if c == 0 { 0 } else { u64::from(inst.demand(c)) })
        .collect();

    for &(_, i, j) in &pairs {
        let (ri, rj) = (route_of[i], route_of[j]);
        if ri == rj || loads[ri] + loads[rj] > cap {
            continue;
        }
        let is_end = |r: &VecDeque<usize>, c: usize| r.front() == Some(&c) || r.back() == Some(&c);
        if !is_end(&routes[ri], i) || !is_end(&routes[rj], j) {
            continue;
        }
        // Fold the shorter route into the longer one so `i` and `j` meet.
        let (big, small, a, b) = if routes[ri].len() >= routes[rj].len() {
            (ri, rj, i, j)
        } else {
            (rj, ri, j, i)
        };
        let mut moved = std::mem::take(&mut routes[small]);
        if routes[big].back() == Some(&a) {
            if moved.front() != Some(&b) {
                moved.make_contiguous().reverse();
            }
            for &c in &moved {
                route_of[c] = big;
            }
            routes[big].extend(moved);
        } else {
            if moved.back() != Some(&b) {
                moved.make_contiguous().reverse();
            }
            for &c in moved.iter().rev() {
                route_of[c] = big;
                routes[big].push_front(c);
            }
        }
        loads[big] += loads[small];
        loads[small] = 0;
    }

    routes
        .into_iter()
        .filter(|r| !r.is_empty())
        .map(Vec::from)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{instance_name, Point};

    fn inst(points: &[(i64, i64)], demands: &[u32], cap: u32) -> Instance {
        let total: u32 = demands.iter().sum();
        let k = total.div_ceil(cap);
        Instance::new(
            instance_name(points.len() + 1, k),
            "",
            Point { x: 0, y: 0 },
            points.iter().map(|&(x, y)| Point { x, y }).collect(),
            demands.to_vec(),
            cap,
            k,
            true,
        )
        .unwrap()
    }

    #[test]
    fn neighbors_sorted_by_distance() {
        let i = inst(&[(10, 0), (20, 0), (11, 0), (50, 0)], &[1; 4], 10);
        let nb = nearest_neighbors(&i, 2);
        assert_eq!(nb[1], vec![3, 2]);
        assert_eq!(nb[4], vec![2, 3]);
        assert!(nb[0].is_empty());
    }

    #[test]
    fn collinear_pair_merges() {
        let i = inst(&[(10, 0), (20, 0)], &[1, 1], 10);
        let nb = nearest_neighbors(&i, 20);
        assert_eq!(savings_routes(&i, &nb).len(), 1);
    }

    #[test]
    fn capacity_blocks_merge() {
        let i = inst(&[(10, 0), (20, 0)], &[6, 6], 10);
        let nb = nearest_neighbors(&i, 20);
        assert_eq!(savings_routes(&i, &nb).len(), 2);
    }

    #[test]
    fn merges_keep_routes_as_paths() {
        let pts: Vec<(i64, i64)> = (1..=9).map(|k| (100 * k, 50 * (k % 3))).collect();
        let i = inst(&pts, &[1; 9], 4);
        let nb = nearest_neighbors(&i, 8);
        let routes = savings_routes(&i, &nb);
        let mut all: Vec<usize> = routes.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (1..=9).collect::<Vec<_>>());
        assert!(routes.iter().all(|r| r.len() <= 4));
    }
}
