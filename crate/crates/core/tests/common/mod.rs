//! Independent reference implementations used by the integration tests.
//! Nothing here calls into the library's cost, packing or search code.

#![allow(dead_code)]

use xl_core::analytics::{BksEntry, BksTable, RunRecord};
use xl_core::model::{instance_name, Instance, Point};
use xl_core::rng::Xoshiro256StarStar;

/// Rounded Euclidean distance, computed without the library.
pub fn nint(a: Point, b: Point) -> u64 {
    let (dx, dy) = ((a.x - b.x) as f64, (a.y - b.y) as f64);
    (dx * dx + dy * dy).sqrt().round() as u64
}

/// Minimum bins by dynamic programming over item subsets: for every subset
/// keep the lexicographically smallest (bins used, load of the last bin).
pub fn brute_bins(items: &[u64], cap: u64) -> u64 {
    let n = items.len();
    if n == 0 {
        return 0;
    }
    let full = 1usize << n;
    let mut best = vec![(u64::MAX, u64::MAX); full];
    best[0] = (1, 0);
    for mask in 0..full {
        let (bins, load) = best[mask];
        if bins == u64::MAX {
            continue;
        }
        for (i, &w) in items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                continue;
            }
            let next = if load + w <= cap {
                (bins, load + w)
            } else {
                (bins + 1, w)
            };
            let slot = &mut best[mask | (1 << i)];
            if next < *slot {
                *slot = next;
            }
        }
    }
    best[full - 1].0
}

fn permutations(items: &mut Vec<usize>, k: usize, visit: &mut impl FnMut(&[usize])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Optimal CVRP by exhaustive search: every customer subset gets its best
/// visiting order by trying all permutations, then subsets are combined
/// into partitions. Returns the cost and one optimal set of routes
/// (1-based customer indices). Practical up to about 8 customers.
pub fn brute_cvrp(inst: &Instance) -> (u64, Vec<Vec<usize>>) {
    let n = inst.customers.len();
    assert!(n <= 10, "brute force is exponential");
    let node = |i: usize| {
        if i == 0 {
            inst.depot
        } else {
            inst.customers[i - 1]
        }
    };
    let full = 1usize << n;
    let mut tour = vec![(u64::MAX, Vec::new()); full];
    for (mask, slot) in tour.iter_mut().enumerate().skip(1) {
        let load: u64 = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| u64::from(inst.demands[i]))
            .sum();
        if load > u64::from(inst.capacity) {
            continue;
        }
        let mut members: Vec<usize> = (0..n)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| i + 1)
            .collect();
        let mut best = (u64::MAX, Vec::new());
        permutations(&mut members, 0, &mut |perm| {
            let mut cost = nint(node(0), node(perm[0]));
            for w in perm.windows(2) {
                cost += nint(node(w[0]), node(w[1]));
            }
            cost += nint(node(*perm.last().unwrap()), node(0));
            if cost < best.0 {
                best = (cost, perm.to_vec());
            }
        });
        *slot = best;
    }
    let mut part = vec![(u64::MAX, 0usize); full];
    part[0] = (0, 0);
    for mask in 1..full {
        let low = mask & mask.wrapping_neg();
        let mut sub = mask;
        while sub > 0 {
            if sub & low != 0 && tour[sub].0 != u64::MAX && part[mask ^ sub].0 != u64::MAX {
                let c = tour[sub].0 + part[mask ^ sub].0;
                if c < part[mask].0 {
                    part[mask] = (c, sub);
                }
            }
            sub = (sub - 1) & mask;
        }
    }
    let mut routes = Vec::new();
    let mut mask = full - 1;
    while mask > 0 {
        let sub = part[mask].1;
        routes.push(tour[sub].1.clone());
        mask ^= sub;
    }
    (part[full - 1].0, routes)
}

/// A random instance with distinct points on a `side x side` grid. The fleet
/// size is the L1 bound, flagged unproven the way instance files record it.
pub fn random_instance(
    rng: &mut Xoshiro256StarStar,
    n: usize,
    side: i64,
    max_demand: u32,
    capacity: u32,
) -> Instance {
    let depot = Point {
        x: rng.uniform_int(0, side),
        y: rng.uniform_int(0, side),
    };
    let mut customers: Vec<Point> = Vec::with_capacity(n);
    while customers.len() < n {
        let p = Point {
            x: rng.uniform_int(0, side),
            y: rng.uniform_int(0, side),
        };
        if p != depot && !customers.contains(&p) {
            customers.push(p);
        }
    }
    let demands: Vec<u32> = (0..n)
        .map(|_| rng.uniform_int(1, i64::from(max_demand.min(capacity))) as u32)
        .collect();
    let total: u32 = demands.iter().sum();
    let k = total.div_ceil(capacity);
    Instance::new(
        instance_name(n + 1, k),
        "kmin=unproven",
        depot,
        customers,
        demands,
        capacity,
        k,
        false,
    )
    .unwrap()
}

/// Run records over `XL-n{..}` style names, some of them failed runs, with
/// a BKS table covering every instance.
pub fn fuzz_records(rng: &mut Xoshiro256StarStar, n: usize) -> (Vec<RunRecord>, BksTable) {
    let names: Vec<String> = (0..8)
        .map(|i| format!("XL-n{}-k{}", 100 + 700 * i, 3 + i))
        .collect();
    let methods = ["alpha", "beta", "gamma"];
    let mut bks = BksTable::default();
    for name in &names {
        let cost = rng.uniform_int(1_000, 100_000) as u64;
        bks.entries
            .insert(name.clone(), BksEntry { cost, method: None });
    }
    let records = (0..n)
        .map(|i| {
            let instance = names[rng.below(names.len())].clone();
            let b = bks.entries[&instance].cost as i64;
            let cost = (rng.unit() >= 0.1).then(|| rng.uniform_int(b, b + b / 10) as u64);
            RunRecord {
                instance,
                method: methods[rng.below(methods.len())].to_string(),
                seed: i as u64,
                elapsed_s: rng.uniform_real(0.0, 100.0),
                cost,
            }
        })
        .collect();
    (records, bks)
}

/// Percentage gap, computed directly.
pub fn gap(cost: f64, bks: u64) -> f64 {
    100.0 * (cost - bks as f64) / bks as f64
}
