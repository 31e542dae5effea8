//! Deterministic XL-style instance generation.
//!
//! Every random draw comes from a stream derived from the spec's master seed
//! and a purpose tag, so each attribute is reproducible on its own: changing
//! the demand distribution does not move a single customer.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::binpack::{self, BinPackProblem, BinPackResult};
use crate::model::{instance_name, Instance, ModelError, Point, GRID_MAX};
use crate::rng::{stream, StreamTag, Xoshiro256StarStar};

/// Smallest supported instance: the depot plus ten customers.
pub const MIN_TOTAL_POINTS: usize = 11;

/// Reference point for the quadrant-dependent demand distribution.
pub const GRID_CENTER: Point = Point { x: 500, y: 500 };

#[derive(Debug, Error)]
pub enum GenError {
    #[error("n_total must be at least {MIN_TOTAL_POINTS}, got {0}")]
    TooFewPoints(usize),
    #[error("unknown {kind} level {value:?}")]
    UnknownLevel { kind: &'static str, value: String },
    #[error("cluster placement for [{spec}] drew {candidates} candidates for one customer")]
    RejectionLimit { spec: String, candidates: u64 },
    #[error("grid too full to place {0} distinct points")]
    GridExhausted(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    BinPack(#[from] binpack::BinPackError),
}

macro_rules! coded_enum {
    ($(#[$meta:meta])* $name:ident, $kind:literal, { $($variant:ident => [$code:literal $(, $alias:literal)*]),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            /// Short code used in manifests, comments and reports.
            pub fn code(self) -> &'static str {
                match self {
                    $($name::$variant => $code),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.code())
            }
        }

        impl FromStr for $name {
            type Err = GenError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let s = s.trim();
                $(
                    if s.eq_ignore_ascii_case($code)
                        || s.eq_ignore_ascii_case(stringify!($variant))
                        $(|| s.eq_ignore_ascii_case($alias))*
                    {
                        return Ok($name::$variant);
                    }
                )+
                Err(GenError::UnknownLevel { kind: $kind, value: s.to_string() })
            }
        }
    };
}

coded_enum!(
    /// Depot placement.
    DepotPos, "depot", {
        Random => ["R"],
        Central => ["C"],
        Eccentric => ["E"],
    }
);

coded_enum!(
    /// Customer placement.
    CustomerPos, "customer positioning", {
        Random => ["R"],
        Clustered => ["C"],
        RandomClustered => ["RC"],
    }
);

coded_enum!(
    /// Demand distribution.
    DemandDist, "demand distribution", {
        Unitary => ["U"],
        D1To10 => ["1-10", "D1_10", "1--10"],
        D5To10 => ["5-10", "D5_10", "5--10"],
        D1To100 => ["1-100", "D1_100", "1--100"],
        D50To100 => ["50-100", "D50_100", "50--100"],
        Quadrant => ["Q"],
        SmallLarge => ["SL"],
    }
);

coded_enum!(
    /// Target average route size class.
    RouteClass, "route size class", {
        UltraShort => ["US"],
        VeryShort => ["VS"],
        Short => ["S"],
        Medium => ["M"],
        Long => ["L"],
        VeryLong => ["VL"],
        UltraLong => ["UL"],
    }
);

impl RouteClass {
    /// Interval the average route size `r` is drawn from.
    pub fn interval(self) -> (f64, f64) {
        match self {
            RouteClass::UltraShort => (3.0, 5.0),
            RouteClass::VeryShort => (5.0, 8.0),
            RouteClass::Short => (8.0, 12.0),
            RouteClass::Medium => (12.0, 16.0),
            RouteClass::Long => (16.0, 25.0),
            RouteClass::VeryLong => (25.0, 50.0),
            RouteClass::UltraLong => (50.0, 200.0),
        }
    }

    pub fn full_name(self) -> &'static str {
        match self {
            RouteClass::UltraShort => "UltraShort",
            RouteClass::VeryShort => "VeryShort",
            RouteClass::Short => "Short",
            RouteClass::Medium => "Medium",
            RouteClass::Long => "Long",
            RouteClass::VeryLong => "VeryLong",
            RouteClass::UltraLong => "UltraLong",
        }
    }
}

impl DemandDist {
    /// Inclusive bounds every demand of this distribution lies in.
    pub fn range(self) -> (u32, u32) {
        match self {
            DemandDist::Unitary => (1, 1),
            DemandDist::D1To10 => (1, 10),
            DemandDist::D5To10 => (5, 10),
            DemandDist::D1To100 => (1, 100),
            DemandDist::D50To100 => (50, 100),
            DemandDist::Quadrant => (1, 100),
            DemandDist::SmallLarge => (1, 100),
        }
    }
}

/// The attribute tuple and seed that fully determine one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSpec {
    pub n_total: usize,
    pub depot: DepotPos,
    pub customers: CustomerPos,
    pub demand: DemandDist,
    pub route_class: RouteClass,
    pub seed: u64,
}

impl GenSpec {
    pub fn n_customers(&self) -> usize {
        self.n_total - 1
    }
}

impl fmt::Display for GenSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} depot={} cust={} demand={} route={} seed={}",
            self.n_total,
            self.depot,
            self.customers,
            self.demand,
            self.route_class.full_name(),
            self.seed
        )
    }
}

/// Tunables that are not part of the attribute tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    /// Exponential decay scale of cluster attraction, in grid units.
    pub decay_lambda: f64,
    /// Range of the per-instance probability that an SL customer is small.
    pub small_fraction: (f64, f64),
    pub binpack_budget: Duration,
    pub max_candidates_per_point: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            decay_lambda: 40.0,
            small_fraction: (0.70, 0.95),
            binpack_budget: binpack::DEFAULT_BUDGET,
            max_candidates_per_point: 1_000_000,
        }
    }
}

/// Audit record of the draws behind one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenTrace {
    pub spec: GenSpec,
    pub drawn_r: f64,
    pub n_cluster_seeds: Option<usize>,
    /// Customers placed by the cluster rule (seeds included).
    pub n_clustered: usize,
    pub small_fraction: Option<f64>,
    pub sum_demand: u64,
    pub n_customers: usize,
    pub capacity: u32,
    pub k_min: BinPackResult,
}

/// Customer placement outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Placement {
    pub points: Vec<Point>,
    pub n_cluster_seeds: Option<usize>,
    pub n_clustered: usize,
}

pub fn gen_depot(spec: &GenSpec, rng: &mut Xoshiro256StarStar) -> Point {
    match spec.depot {
        DepotPos::Central => GRID_CENTER,
        DepotPos::Eccentric => Point { x: 0, y: 0 },
        DepotPos::Random => uniform_point(rng),
    }
}

fn uniform_point(rng: &mut Xoshiro256StarStar) -> Point {
    let x = rng.uniform_int(0, GRID_MAX);
    let y = rng.uniform_int(0, GRID_MAX);
    Point { x, y }
}

fn fresh_uniform(rng: &mut Xoshiro256StarStar, taken: &mut HashSet<Point>) -> Point {
    loop {
        let p = uniform_point(rng);
        if taken.insert(p) {
            return p;
        }
    }
}

/// Sum of exponentially decaying attractions toward each cluster seed.
#[derive(Debug, Clone)]
pub struct ClusterField {
    seeds: Vec<(f64, f64)>,
    lambda: f64,
}

impl ClusterField {
    pub fn new(seeds: &[Point], lambda: f64) -> Self {
        Self {
            seeds: seeds.iter().map(|p| (p.x as f64, p.y as f64)).collect(),
            lambda,
        }
    }

    pub fn weight(&self, x: f64, y: f64) -> f64 {
        self.seeds
            .iter()
            .map(|&(sx, sy)| (-((x - sx).hypot(y - sy)) / self.lambda).exp())
            .sum()
    }

    /// Upper bound of the weight over the integer box `[x0,x1]×[y0,y1]`.
    fn box_bound(&self, x0: i64, x1: i64, y0: i64, y1: i64) -> f64 {
        self.seeds
            .iter()
            .map(|&(sx, sy)| {
                let dx = (x0 as f64 - sx).max(0.0).max(sx - x1 as f64);
                let dy = (y0 as f64 - sy).max(0.0).max(sy - y1 as f64);
                (-(dx.hypot(dy)) / self.lambda).exp()
            })
            .sum()
    }

    /// Exact maximum of the weight over the integer grid points.
    ///
    /// Quadtree branch and bound over the seeds' bounding box: the maximum of
    /// a sum of radially decreasing kernels lies in the seeds' convex hull.
    pub fn grid_max(&self) -> f64 {
        let (mut x0, mut x1, mut y0, mut y1) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
        for &(sx, sy) in &self.seeds {
            x0 = x0.min(sx as i64);
            x1 = x1.max(sx as i64);
            y0 = y0.min(sy as i64);
            y1 = y1.max(sy as i64);
        }
        let mut best = self
            .seeds
            .iter()
            .map(|&(x, y)| self.weight(x, y))
            .fold(0.0, f64::max);
        let mut stack = vec![(x0, x1, y0, y1)];
        while let Some((ax, bx, ay, by)) = stack.pop() {
            if self.box_bound(ax, bx, ay, by) <= best {
                continue;
            }
            if (bx - ax + 1) * (by - ay + 1) <= 16 {
                for x in ax..=bx {
                    for y in ay..=by {
                        best = best.max(self.weight(x as f64, y as f64));
                    }
                }
                continue;
            }
            let mx = (ax + bx) / 2;
            let my = (ay + by) / 2;
            stack.push((ax, mx, ay, my));
            if mx < bx {
                stack.push((mx + 1, bx, ay, my));
            }
            if my < by {
                stack.push((ax, mx, my + 1, by));
                if mx < bx {
                    stack.push((mx + 1, bx, my + 1, by));
                }
            }
        }
        best
    }
}

/// Places `n_total - 1` distinct customers, none on the depot.
///
/// Cluster seeds and the seed count come from `clusters`; every other
/// location (including acceptance-rejection candidates) from `positions`.
pub fn gen_customers(
    spec: &GenSpec,
    depot: Point,
    cfg: &GenConfig,
    positions: &mut Xoshiro256StarStar,
    clusters: &mut Xoshiro256StarStar,
) -> Result<Placement, GenError> {
    let n = spec.n_customers();
    let grid_points = ((GRID_MAX + 1) * (GRID_MAX + 1)) as usize;
    if n + 1 > grid_points {
        return Err(GenError::GridExhausted(n + 1));
    }
    let mut taken = HashSet::with_capacity(n + 1);
    taken.insert(depot);
    let mut points = Vec::with_capacity(n);

    let n_clustered = match spec.customers {
        CustomerPos::Random => 0,
        CustomerPos::Clustered => n,
        CustomerPos::RandomClustered => n.div_ceil(2),
    };

    let mut n_cluster_seeds = None;
    if n_clustered > 0 {
        let s = (clusters.uniform_int(2, 6) as usize).min(n_clustered);
        n_cluster_seeds = Some(s);
        for _ in 0..s {
            points.push(fresh_uniform(clusters, &mut taken));
        }
        let field = ClusterField::new(&points, cfg.decay_lambda);
        let w_max = field.grid_max();
        while points.len() < n_clustered {
            let mut candidates = 0u64;
            loop {
                candidates += 1;
                if candidates > cfg.max_candidates_per_point {
                    return Err(GenError::RejectionLimit {
                        spec: spec.to_string(),
                        candidates: candidates - 1,
                    });
                }
                let p = uniform_point(positions);
                let u = positions.unit();
                if taken.contains(&p) {
                    continue;
                }
                if u * w_max < field.weight(p.x as f64, p.y as f64) {
                    taken.insert(p);
                    points.push(p);
                    break;
                }
            }
        }
    }
    while points.len() < n {
        points.push(fresh_uniform(positions, &mut taken));
    }

    Ok(Placement {
        points,
        n_cluster_seeds,
        n_clustered,
    })
}

/// Quadrant of `p` relative to the grid center, numbered counterclockwise
/// from NE = 1. Points on an axis count as lying on its positive side.
pub fn quadrant(p: Point) -> u8 {
    let east = p.x >= GRID_CENTER.x;
    let north = p.y >= GRID_CENTER.y;
    match (east, north) {
        (true, true) => 1,
        (false, true) => 2,
        (false, false) => 3,
        (true, false) => 4,
    }
}

/// Demands for the placed customers, plus the drawn small-customer
/// probability for SL.
pub fn gen_demands(
    spec: &GenSpec,
    customers: &[Point],
    cfg: &GenConfig,
    rng: &mut Xoshiro256StarStar,
) -> (Vec<u32>, Option<f64>) {
    let mut ud = |lo: i64, hi: i64| rng.uniform_int(lo, hi) as u32;
    match spec.demand {
        DemandDist::Unitary => (vec![1; customers.len()], None),
        DemandDist::D1To10 => (customers.iter().map(|_| ud(1, 10)).collect(), None),
        DemandDist::D5To10 => (customers.iter().map(|_| ud(5, 10)).collect(), None),
        DemandDist::D1To100 => (customers.iter().map(|_| ud(1, 100)).collect(), None),
        DemandDist::D50To100 => (customers.iter().map(|_| ud(50, 100)).collect(), None),
        DemandDist::Quadrant => (
            customers
                .iter()
                .map(|&p| {
                    if quadrant(p).is_multiple_of(2) {
                        ud(1, 50)
                    } else {
                        ud(51, 100)
                    }
                })
                .collect(),
            None,
        ),
        DemandDist::SmallLarge => {
            let (lo, hi) = cfg.small_fraction;
            let p_small = rng.uniform_real(lo, hi);
            let demands = customers
                .iter()
                .map(|_| {
                    if rng.unit() < p_small {
                        rng.uniform_int(1, 10) as u32
                    } else {
                        rng.uniform_int(50, 100) as u32
                    }
                })
                .collect();
            (demands, Some(p_small))
        }
    }
}

/// `Q = max(floor(r · Σq / n), max q)`.
pub fn compute_capacity(drawn_r: f64, demands: &[u32]) -> u32 {
    assert!(!demands.is_empty(), "capacity of an empty demand list");
    let sum: u64 = demands.iter().map(|&q| u64::from(q)).sum();
    let target = (drawn_r * sum as f64 / demands.len() as f64).floor() as u32;
    let max_q = *demands.iter().max().unwrap();
    target.max(max_q)
}

/// Draws `r` for the spec's route class.
pub fn draw_route_size(spec: &GenSpec) -> f64 {
    let (lo, hi) = spec.route_class.interval();
    stream(spec.seed, StreamTag::RouteSize).uniform_real(lo, hi)
}

/// Generates one instance. An unproven bin-packing bound is not an error:
/// the instance carries `k_min_proven = false` and is named after the best
/// packing found.
pub fn generate_instance(
    spec: &GenSpec,
    cfg: &GenConfig,
) -> Result<(Instance, GenTrace), GenError> {
    if spec.n_total < MIN_TOTAL_POINTS {
        return Err(GenError::TooFewPoints(spec.n_total));
    }
    let depot = gen_depot(spec, &mut stream(spec.seed, StreamTag::Depot));
    let placement = gen_customers(
        spec,
        depot,
        cfg,
        &mut stream(spec.seed, StreamTag::Positions),
        &mut stream(spec.seed, StreamTag::Clusters),
    )?;
    let drawn_r = draw_route_size(spec);
    let (demands, small_fraction) = gen_demands(
        spec,
        &placement.points,
        cfg,
        &mut stream(spec.seed, StreamTag::Demands),
    );
    let capacity = compute_capacity(drawn_r, &demands);
    let problem = BinPackProblem::new(
        demands.iter().map(|&q| u64::from(q)).collect(),
        u64::from(capacity),
    )?;
    let packing = binpack::k_min(&problem, cfg.binpack_budget);
    let k = packing.bins as u32;

    let trace = GenTrace {
        spec: *spec,
        drawn_r,
        n_cluster_seeds: placement.n_cluster_seeds,
        n_clustered: placement.n_clustered,
        small_fraction,
        sum_demand: problem.items().iter().sum(),
        n_customers: demands.len(),
        capacity,
        k_min: packing,
    };
    let instance = Instance::new(
        instance_name(spec.n_total, k),
        trace_comment(&trace),
        depot,
        placement.points,
        demands,
        capacity,
        k,
        trace.k_min.proven_optimal,
    )?;
    Ok((instance, trace))
}

/// One-line `key=value` summary written to the instance COMMENT.
pub fn trace_comment(trace: &GenTrace) -> String {
    let spec = &trace.spec;
    let mut out = format!(
        "seed={} depot={} cust={} demand={} route={} r={}",
        spec.seed,
        spec.depot,
        spec.customers,
        spec.demand,
        spec.route_class.full_name(),
        trace.drawn_r
    );
    if let Some(s) = trace.n_cluster_seeds {
        out.push_str(&format!(" seeds={s}"));
    }
    if let Some(p) = trace.small_fraction {
        out.push_str(&format!(" p_small={p}"));
    }
    out.push_str(if trace.k_min.proven_optimal {
        " kmin=proven"
    } else {
        " kmin=unproven"
    });
    out
}
