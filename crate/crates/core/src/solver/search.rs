//! Mutable route representation with O(1) move evaluation.
//!
//! Moves are generated from a customer `u` and one of its granular
//! neighbors `v`, and every move creates an edge adjacent to `u` and `v`.

use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Point};
use crate::rng::Xoshiro256StarStar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MoveKind {
    Relocate,
    Swap,
    TwoOptIntra,
    TwoOptStar,
}

impl MoveKind {
    pub const ALL: [MoveKind; 4] = [
        MoveKind::Relocate,
        MoveKind::Swap,
        MoveKind::TwoOptIntra,
        MoveKind::TwoOptStar,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Move {
    /// Move `u` next to `v`: directly after it, or directly before it.
    Relocate {
        u: usize,
        v: usize,
        after: bool,
    },
    Swap {
        u: usize,
        v: usize,
    },
    /// Reverse the in-route segment that makes `u` and `v` adjacent.
    TwoOptIntra {
        u: usize,
        v: usize,
    },
    /// Exchange route tails between the routes of `u` and `v`, joining
    /// `u` to `v`; `reversed` joins head to head instead of head to tail.
    TwoOptStar {
        u: usize,
        v: usize,
        reversed: bool,
    },
}

impl Move {
    pub fn endpoints(self) -> (usize, usize) {
        match self {
            Move::Relocate { u, v, .. }
            | Move::Swap { u, v }
            | Move::TwoOptIntra { u, v }
            | Move::TwoOptStar { u, v, .. } => (u, v),
        }
    }
}

/// Routes saved by [`RouteSet::apply`] so the move can be undone.
#[derive(Debug, Clone)]
pub struct Snapshot {
    routes: Vec<(usize, Vec<usize>)>,
    cost: i64,
}

#[derive(Debug, Clone)]
pub struct RouteSet {
    pts: Vec<Point>,
    demand: Vec<u64>,
    cap: u64,
    routes: Vec<Vec<usize>>,
    loads: Vec<u64>,
    route_of: Vec<usize>,
    pos_of: Vec<usize>,
    /// Load from the route start through this node, inclusive.
    prefix: Vec<u64>,
    cost: i64,
}

impl RouteSet {
    pub fn new(inst: &Instance, routes: Vec<Vec<usize>>) -> Self {
        let n = inst.n_customers();
        let pts = (0..=n).map(|i| inst.node(i)).collect();
        let demand = (0..=n)
            .map(|i| if i == 0 { 0 } else { u64::from(inst.demand(i)) })
            .collect();
        let mut set = Self {
            pts,
            demand,
            cap: u64::from(inst.capacity),
            loads: vec![0; routes.len()],
            routes,
            route_of: vec![usize::MAX; n + 1],
            pos_of: vec![0; n + 1],
            prefix: vec![0; n + 1],
            cost: 0,
        };
        for r in 0..set.routes.len() {
            set.rebuild(r);
        }
        set.cost = set.full_cost();
        set
    }

    #[inline]
    pub fn d(&self, a: usize, b: usize) -> i64 {
        let d2 = self.pts[a].squared_distance(self.pts[b]) as f64;
        (d2.sqrt() + 0.5).floor() as i64
    }

    pub fn cost(&self) -> i64 {
        self.cost
    }

    pub fn n_customers(&self) -> usize {
        self.pts.len() - 1
    }

    pub fn routes(&self) -> impl Iterator<Item = &Vec<usize>> {
        self.routes.iter().filter(|r| !r.is_empty())
    }

    pub fn into_routes(self) -> Vec<Vec<usize>> {
        self.routes.into_iter().filter(|r| !r.is_empty()).collect()
    }

    pub fn is_routed(&self, u: usize) -> bool {
        self.route_of[u] != usize::MAX
    }

    pub fn full_cost(&self) -> i64 {
        self.routes
            .iter()
            .filter(|r| !r.is_empty())
            .map(|r| {
                let mut prev = 0;
                let mut c = 0;
                for &x in r {
                    c += self.d(prev, x);
                    prev = x;
                }
                c + self.d(prev, 0)
            })
            .sum()
    }

    pub fn loads_ok(&self) -> bool {
        self.loads.iter().all(|&l| l <= self.cap)
    }

    fn rebuild(&mut self, r: usize) {
        let mut load = 0;
        for (p, &c) in self.routes[r].iter().enumerate() {
            load += self.demand[c];
            self.route_of[c] = r;
            self.pos_of[c] = p;
            self.prefix[c] = load;
        }
        self.loads[r] = load;
    }

    #[inline]
    fn prev(&self, u: usize) -> usize {
        let p = self.pos_of[u];
        if p == 0 {
            0
        } else {
            self.routes[self.route_of[u]][p - 1]
        }
    }

    #[inline]
    fn next(&self, u: usize) -> usize {
        let r = &self.routes[self.route_of[u]];
        r.get(self.pos_of[u] + 1).copied().unwrap_or(0)
    }

    /// Cost change of `mv`, or `None` when it is a no-op or would overload
    /// a route.
    pub fn evaluate(&self, mv: Move) -> Option<i64> {
        match mv {
            Move::Relocate { u, v, after } => {
                if u == v {
                    return None;
                }
                let (ru, rv) = (self.route_of[u], self.route_of[v]);
                if ru != rv && self.loads[rv] + self.demand[u] > self.cap {
                    return None;
                }
                let (pu, nu) = (self.prev(u), self.next(u));
                let (a, b) = if after {
                    if v == pu {
                        return None;
                    }
                    (v, self.next(v))
                } else {
                    if v == nu {
                        return None;
                    }
                    (self.prev(v), v)
                };
                let removal = self.d(pu, nu) - self.d(pu, u) - self.d(u, nu);
                let insertion = self.d(a, u) + self.d(u, b) - self.d(a, b);
                Some(removal + insertion)
            }
            Move::Swap { u, v } => {
                if u == v {
                    return None;
                }
                let (ru, rv) = (self.route_of[u], self.route_of[v]);
                if ru != rv {
                    let (qu, qv) = (self.demand[u], self.demand[v]);
                    if self.loads[ru] - qu + qv > self.cap || self.loads[rv] - qv + qu > self.cap {
                        return None;
                    }
                }
                let (pu, nu, pv, nv) = (self.prev(u), self.next(u), self.prev(v), self.next(v));
                let delta = if ru == rv && nu == v {
                    self.d(pu, v) + self.d(u, nv) - self.d(pu, u) - self.d(v, nv)
                } else if ru == rv && nv == u {
                    self.d(pv, u) + self.d(v, nu) - self.d(pv, v) - self.d(u, nu)
                } else {
                    self.d(pu, v) + self.d(v, nu) - self.d(pu, u) - self.d(u, nu)
                        + self.d(pv, u)
                        + self.d(u, nv)
                        - self.d(pv, v)
                        - self.d(v, nv)
                };
                Some(delta)
            }
            Move::TwoOptIntra { u, v } => {
                if u == v || self.route_of[u] != self.route_of[v] {
                    return None;
                }
                if self.pos_of[u] < self.pos_of[v] {
                    let (nu, nv) = (self.next(u), self.next(v));
                    if nu == v {
                        return None;
                    }
                    Some(self.d(u, v) + self.d(nu, nv) - self.d(u, nu) - self.d(v, nv))
                } else {
                    let (pu, pv) = (self.prev(u), self.prev(v));
                    if pu == v {
                        return None;
                    }
                    Some(self.d(pv, pu) + self.d(v, u) - self.d(pv, v) - self.d(pu, u))
                }
            }
            Move::TwoOptStar { u, v, reversed } => {
                let (ru, rv) = (self.route_of[u], self.route_of[v]);
                if ru == rv {
                    return None;
                }
                let (head_u, head_v) = (self.prefix[u], self.prefix[v]);
                let (load_u, load_v) = (self.loads[ru], self.loads[rv]);
                if reversed {
                    let (nu, nv) = (self.next(u), self.next(v));
                    if head_u + head_v > self.cap
                        || (load_u - head_u) + (load_v - head_v) > self.cap
                    {
                        return None;
                    }
                    Some(self.d(u, v) + self.d(nu, nv) - self.d(u, nu) - self.d(v, nv))
                } else {
                    let (nu, pv) = (self.next(u), self.prev(v));
                    let before_v = head_v - self.demand[v];
                    if head_u + (load_v - before_v) > self.cap
                        || before_v + (load_u - head_u) > self.cap
                    {
                        return None;
                    }
                    Some(self.d(u, v) + self.d(pv, nu) - self.d(u, nu) - self.d(pv, v))
                }
            }
        }
    }

    /// Applies a move previously accepted by [`evaluate`](Self::evaluate).
    pub fn apply(&mut self, mv: Move) -> Snapshot {
        let delta = self.evaluate(mv).expect("applying an invalid move");
        let (u, v) = mv.endpoints();
        let (ru, rv) = (self.route_of[u], self.route_of[v]);
        let mut saved = vec![(ru, self.routes[ru].clone())];
        if rv != ru {
            saved.push((rv, self.routes[rv].clone()));
        }
        let snapshot = Snapshot {
            routes: saved,
            cost: self.cost,
        };

        match mv {
            Move::Relocate { after, .. } => {
                let pu = self.pos_of[u];
                self.routes[ru].remove(pu);
                let pv = self.routes[rv]
                    .iter()
                    .position(|&c| c == v)
                    .expect("v is routed");
                let at = if after { pv + 1 } else { pv };
                self.routes[rv].insert(at, u);
            }
            Move::Swap { .. } => {
                let (pu, pv) = (self.pos_of[u], self.pos_of[v]);
                self.routes[ru][pu] = v;
                self.routes[rv][pv] = u;
            }
            Move::TwoOptIntra { .. } => {
                let (pu, pv) = (self.pos_of[u], self.pos_of[v]);
                if pu < pv {
                    self.routes[ru][pu + 1..=pv].reverse();
                } else {
                    self.routes[ru][pv..pu].reverse();
                }
            }
            Move::TwoOptStar { reversed, .. } => {
                let (pu, pv) = (self.pos_of[u], self.pos_of[v]);
                let a = std::mem::take(&mut self.routes[ru]);
                let b = std::mem::take(&mut self.routes[rv]);
                let (a_head, a_tail) = a.split_at(pu + 1);
                if reversed {
                    let (b_head, b_tail) = b.split_at(pv + 1);
                    let mut new_a = a_head.to_vec();
                    new_a.extend(b_head.iter().rev());
                    let mut new_b: Vec<usize> = a_tail.iter().rev().copied().collect();
                    new_b.extend_from_slice(b_tail);
                    self.routes[ru] = new_a;
                    self.routes[rv] = new_b;
                } else {
                    let (b_head, b_tail) = b.split_at(pv);
                    let mut new_a = a_head.to_vec();
                    new_a.extend_from_slice(b_tail);
                    let mut new_b = b_head.to_vec();
                    new_b.extend_from_slice(a_tail);
                    self.routes[ru] = new_a;
                    self.routes[rv] = new_b;
                }
            }
        }
        self.rebuild(ru);
        if rv != ru {
            self.rebuild(rv);
        }
        self.cost += delta;
        snapshot
    }

    pub fn undo(&mut self, snapshot: Snapshot) {
        for (r, route) in snapshot.routes {
            self.routes[r] = route;
            self.rebuild(r);
        }
        self.cost = snapshot.cost;
    }

    /// Unroutes the given customers.
    pub fn remove(&mut self, customers: &[usize]) {
        let mut touched = Vec::new();
        for &c in customers {
            let r = self.route_of[c];
            if r == usize::MAX {
                continue;
            }
            self.route_of[c] = usize::MAX;
            touched.push(r);
        }
        touched.sort_unstable();
        touched.dedup();
        for r in touched {
            let route_of = &self.route_of;
            self.routes[r].retain(|&c| route_of[c] != usize::MAX);
            self.rebuild(r);
        }
        self.cost = self.full_cost();
    }

    /// Cheapest feasible insertion of `c` next to one of `anchors`, or on a
    /// fresh route when that is cheaper or nothing fits.
    pub fn insert_best(&mut self, c: usize, anchors: &[usize]) {
        let q = self.demand[c];
        let mut best = (2 * self.d(0, c), None::<(usize, usize)>);
        for &w in anchors {
            if w == c || !self.is_routed(w) {
                continue;
            }
            let r = self.route_of[w];
            if self.loads[r] + q > self.cap {
                continue;
            }
            let p = self.pos_of[w];
            let (pw, nw) = (self.prev(w), self.next(w));
            let before = self.d(pw, c) + self.d(c, w) - self.d(pw, w);
            let after = self.d(w, c) + self.d(c, nw) - self.d(w, nw);
            if before < best.0 {
                best = (before, Some((r, p)));
            }
            if after < best.0 {
                best = (after, Some((r, p + 1)));
            }
        }
        match best.1 {
            Some((r, at)) => {
                self.routes[r].insert(at, c);
                self.rebuild(r);
            }
            None => {
                let slot = self.routes.iter().position(|r| r.is_empty());
                let r = match slot {
                    Some(r) => {
                        self.routes[r].push(c);
                        r
                    }
                    None => {
                        self.routes.push(vec![c]);
                        self.loads.push(0);
                        self.routes.len() - 1
                    }
                };
                self.rebuild(r);
            }
        }
        self.cost += best.0;
    }
}

/// Stops a search at a wall-clock deadline; `None` never stops.
#[derive(Debug, Clone, Copy)]
pub struct Deadline(pub Option<Instant>);

impl Deadline {
    pub fn passed(&self) -> bool {
        self.0.is_some_and(|d| Instant::now() >= d)
    }
}

fn first_improving(
    set: &RouteSet,
    neighbors: &[Vec<usize>],
    kinds: &[MoveKind],
    u: usize,
) -> Option<Move> {
    for &v in &neighbors[u] {
        for kind in kinds {
            let candidates: &[Move] = match kind {
                MoveKind::Relocate => &[
                    Move::Relocate { u, v, after: true },
                    Move::Relocate { u, v, after: false },
                ],
                MoveKind::Swap => &[Move::Swap { u, v }],
                MoveKind::TwoOptIntra => &[Move::TwoOptIntra { u, v }],
                MoveKind::TwoOptStar => &[
                    Move::TwoOptStar {
                        u,
                        v,
                        reversed: false,
                    },
                    Move::TwoOptStar {
                        u,
                        v,
                        reversed: true,
                    },
                ],
            };
            for &mv in candidates {
                if set.evaluate(mv).is_some_and(|d| d < 0) {
                    return Some(mv);
                }
            }
        }
    }
    None
}

struct WorkQueue {
    queued: Vec<bool>,
    queue: VecDeque<usize>,
}

impl WorkQueue {
    fn push(&mut self, c: usize) {
        if c != 0 && !self.queued[c] {
            self.queued[c] = true;
            self.queue.push_back(c);
        }
    }

    fn pop(&mut self) -> Option<usize> {
        let c = self.queue.pop_front()?;
        self.queued[c] = false;
        Some(c)
    }
}

fn apply_and_requeue(set: &mut RouteSet, mv: Move, work: &mut WorkQueue) {
    let (u, v) = mv.endpoints();
    let around = |set: &RouteSet| [u, v, set.prev(u), set.next(u), set.prev(v), set.next(v)];
    let before = around(set);
    set.apply(mv);
    for c in before.into_iter().chain(around(set)) {
        work.push(c);
    }
}

/// First-improvement descent over the granular neighborhood.
///
/// Customers in `start` are examined first and the endpoints of every
/// applied move are queued again. With `converge`, full sweeps follow
/// until one finds nothing, so the result is a true local optimum; without
/// it the descent only explores around `start`. Returns `false` if the
/// deadline interrupted it.
pub fn descend(
    set: &mut RouteSet,
    neighbors: &[Vec<usize>],
    moves: &[MoveKind],
    rng: &mut Xoshiro256StarStar,
    deadline: Deadline,
    start: &[usize],
    converge: bool,
) -> bool {
    let n = set.n_customers();
    let mut kinds = moves.to_vec();
    rng.shuffle(&mut kinds);
    let mut work = WorkQueue {
        queued: vec![false; n + 1],
        queue: VecDeque::new(),
    };
    let mut first = start.to_vec();
    rng.shuffle(&mut first);
    for c in first {
        work.push(c);
    }
    let mut polls: u32 = 0;
    let mut interrupted = || {
        polls = polls.wrapping_add(1);
        polls.is_multiple_of(64) && deadline.passed()
    };
    loop {
        while let Some(u) = work.pop() {
            if interrupted() {
                return false;
            }
            if let Some(mv) = first_improving(set, neighbors, &kinds, u) {
                apply_and_requeue(set, mv, &mut work);
            }
        }
        if !converge {
            return true;
        }
        let mut order: Vec<usize> = (1..=n).collect();
        rng.shuffle(&mut order);
        let mut found = false;
        for u in order {
            if interrupted() {
                return false;
            }
            if let Some(mv) = first_improving(set, neighbors, &kinds, u) {
                apply_and_requeue(set, mv, &mut work);
                found = true;
            }
        }
        if !found {
            return true;
        }
    }
}
