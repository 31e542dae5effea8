//! Instance and solution data model, rounded-Euclidean costs and the
//! feasibility validator.
//!
//! Node numbering: index 0 is the depot, customers are `1..=n_cust`. A
//! [`Route`] lists customer indices only; the depot is implicit at both ends.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Inclusive upper bound of both grid axes.
pub const GRID_MAX: i64 = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("point ({x}, {y}) lies outside the [0, {GRID_MAX}] grid")]
    OutOfGrid { x: i64, y: i64 },
    #[error("capacity must be positive")]
    ZeroCapacity,
    #[error("{customers} customers but {demands} demands")]
    LengthMismatch { customers: usize, demands: usize },
    #[error("customer {index} has demand {demand}, outside [1, {capacity}]")]
    DemandOutOfRange {
        index: usize,
        demand: u32,
        capacity: u32,
    },
    #[error("k_min {k_min} is below the continuous bound {bound}")]
    KMinBelowBound { k_min: u32, bound: u32 },
    #[error("empty route")]
    EmptyRoute,
    #[error("customer {0} repeats within a route")]
    RepeatedInRoute(usize),
    #[error("customer index {index} is unknown (instance has {n_customers} customers)")]
    UnknownCustomer { index: usize, n_customers: usize },
}

/// Integer grid location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Point {
    pub x: i64,
    pub y: i64,
}

impl Point {
    pub fn new(x: i64, y: i64) -> Result<Self, ModelError> {
        if !(0..=GRID_MAX).contains(&x) || !(0..=GRID_MAX).contains(&y) {
            return Err(ModelError::OutOfGrid { x, y });
        }
        Ok(Self { x, y })
    }

    pub fn squared_distance(self, other: Point) -> i64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// TSPLIB `EUC_2D` edge weight: the Euclidean distance rounded with
/// `floor(d + 0.5)`.
///
/// The squared distance is at most 2·10⁶, so the f64 square root is exact
/// enough that no value can land on the wrong side of a `.5` boundary.
pub fn euclid_cost(a: Point, b: Point) -> u64 {
    let d2 = a.squared_distance(b) as f64;
    (d2.sqrt() + 0.5).floor() as u64
}

/// A CVRP instance. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub name: String,
    pub comment: String,
    pub depot: Point,
    pub customers: Vec<Point>,
    pub demands: Vec<u32>,
    pub capacity: u32,
    pub k_min: u32,
    pub k_min_proven: bool,
}

impl Instance {
    /// Checks the structural invariants shared by every instance: matching
    /// lengths, demands in `[1, Q]`, and `k_min` at least the continuous
    /// bound. Grid bounds are enforced by [`Point::new`].
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        comment: impl Into<String>,
        depot: Point,
        customers: Vec<Point>,
        demands: Vec<u32>,
        capacity: u32,
        k_min: u32,
        k_min_proven: bool,
    ) -> Result<Self, ModelError> {
        if capacity == 0 {
            return Err(ModelError::ZeroCapacity);
        }
        if customers.len() != demands.len() {
            return Err(ModelError::LengthMismatch {
                customers: customers.len(),
                demands: demands.len(),
            });
        }
        for (i, &q) in demands.iter().enumerate() {
            if q == 0 || q > capacity {
                return Err(ModelError::DemandOutOfRange {
                    index: i + 1,
                    demand: q,
                    capacity,
                });
            }
        }
        let total: u64 = demands.iter().map(|&q| u64::from(q)).sum();
        let bound = total.div_ceil(u64::from(capacity)) as u32;
        if k_min < bound {
            return Err(ModelError::KMinBelowBound { k_min, bound });
        }
        Ok(Self {
            name: name.into(),
            comment: comment.into(),
            depot,
            customers,
            demands,
            capacity,
            k_min,
            k_min_proven,
        })
    }

    pub fn n_customers(&self) -> usize {
        self.customers.len()
    }

    /// Total number of points including the depot (`A` in `XL-nA-kB`).
    pub fn dimension(&self) -> usize {
        self.customers.len() + 1
    }

    pub fn total_demand(&self) -> u64 {
        self.demands.iter().map(|&q| u64::from(q)).sum()
    }

    /// Location of node `i` (0 = depot).
    pub fn node(&self, i: usize) -> Point {
        if i == 0 {
            self.depot
        } else {
            self.customers[i - 1]
        }
    }

    /// Demand of customer `i` (1-based).
    pub fn demand(&self, i: usize) -> u32 {
        self.demands[i - 1]
    }

    pub fn cost(&self, i: usize, j: usize) -> u64 {
        euclid_cost(self.node(i), self.node(j))
    }

    /// True when no two customers share a location and none sits on the
    /// depot.
    pub fn has_distinct_points(&self) -> bool {
        let mut seen = BTreeSet::new();
        seen.insert(self.depot);
        self.customers.iter().all(|p| seen.insert(*p))
    }
}

/// `XL-n{dimension}-k{k_min}`.
pub fn instance_name(dimension: usize, k_min: u32) -> String {
    format!("XL-n{dimension}-k{k_min}")
}

/// One vehicle route: an ordered list of 1-based customer indices.
///
/// Routes are undirected for cost purposes; construction stores the
/// orientation whose first index is not greater than its last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Route(Vec<usize>);

impl Route {
    pub fn new(mut customers: Vec<usize>) -> Result<Self, ModelError> {
        if customers.is_empty() {
            return Err(ModelError::EmptyRoute);
        }
        let mut seen = BTreeSet::new();
        for &c in &customers {
            if !seen.insert(c) {
                return Err(ModelError::RepeatedInRoute(c));
            }
        }
        if customers[0] > customers[customers.len() - 1] {
            customers.reverse();
        }
        Ok(Self(customers))
    }

    pub fn customers(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// An ordered set of routes. The cost is always recomputed from the
/// instance, never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Solution {
    pub routes: Vec<Route>,
}

impl Solution {
    pub fn new(routes: Vec<Route>) -> Self {
        Self { routes }
    }

    /// Builds a solution from raw index lists, skipping empty ones.
    pub fn from_index_lists<I>(lists: I) -> Result<Self, ModelError>
    where
        I: IntoIterator<Item = Vec<usize>>,
    {
        let routes = lists
            .into_iter()
            .filter(|r| !r.is_empty())
            .map(Route::new)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { routes })
    }

    pub fn n_routes(&self) -> usize {
        self.routes.len()
    }
}

/// Cost of one route including both depot legs.
pub fn route_cost(inst: &Instance, route: &[usize]) -> u64 {
    let mut cost = 0;
    let mut prev = 0;
    for &c in route {
        cost += inst.cost(prev, c);
        prev = c;
    }
    cost + inst.cost(prev, 0)
}

/// Total rounded-Euclidean cost. Rejects the first unknown customer index.
pub fn solution_cost(inst: &Instance, sol: &Solution) -> Result<u64, ModelError> {
    let n = inst.n_customers();
    for route in &sol.routes {
        if let Some(&index) = route.customers().iter().find(|&&c| c == 0 || c > n) {
            return Err(ModelError::UnknownCustomer {
                index,
                n_customers: n,
            });
        }
    }
    Ok(sol
        .routes
        .iter()
        .map(|r| route_cost(inst, r.customers()))
        .sum())
}

/// A single feasibility problem found by [`validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    MissingCustomer {
        customer: usize,
    },
    DuplicatedCustomer {
        customer: usize,
        occurrences: usize,
    },
    CapacityExceeded {
        route: usize,
        load: u64,
        excess: u64,
    },
    UnknownIndex {
        route: usize,
        index: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingCustomer { customer } => write!(f, "missing customer {customer}"),
            Violation::DuplicatedCustomer {
                customer,
                occurrences,
            } => write!(f, "customer {customer} visited {occurrences} times"),
            Violation::CapacityExceeded {
                route,
                load,
                excess,
            } => write!(f, "route #{route} load {load} exceeds capacity by {excess}"),
            Violation::UnknownIndex { route, index } => {
                write!(f, "route #{route} references unknown customer {index}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
    /// `None` only when some index is unknown.
    pub recomputed_cost: Option<u64>,
}

/// Checks coverage and capacity, reporting every violation. Route numbers
/// in findings are 1-based, matching solution files. Extra routes beyond
/// `k_min` are allowed.
pub fn validate(inst: &Instance, sol: &Solution) -> ValidationReport {
    let n = inst.n_customers();
    let mut visits = vec![0usize; n + 1];
    let mut violations = Vec::new();
    let mut all_known = true;

    for (r, route) in sol.routes.iter().enumerate() {
        let mut load = 0u64;
        for &c in route.customers() {
            if c == 0 || c > n {
                violations.push(Violation::UnknownIndex {
                    route: r + 1,
                    index: c,
                });
                all_known = false;
                continue;
            }
            visits[c] += 1;
            load += u64::from(inst.demand(c));
        }
        let cap = u64::from(inst.capacity);
        if load > cap {
            violations.push(Violation::CapacityExceeded {
                route: r + 1,
                load,
                excess: load - cap,
            });
        }
    }

    for (c, &count) in visits.iter().enumerate().skip(1) {
        match count {
            0 => violations.push(Violation::MissingCustomer { customer: c }),
            1 => {}
            k => violations.push(Violation::DuplicatedCustomer {
                customer: c,
                occurrences: k,
            }),
        }
    }

    let recomputed_cost = all_known.then(|| {
        sol.routes
            .iter()
            .map(|r| route_cost(inst, r.customers()))
            .sum()
    });

    ValidationReport {
        feasible: violations.is_empty(),
        violations,
        recomputed_cost,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i64, y: i64) -> Point {
        Point::new(x, y).unwrap()
    }

    fn toy(depot: Point, customers: Vec<Point>, demands: Vec<u32>, capacity: u32) -> Instance {
        let n = customers.len();
        let total: u32 = demands.iter().sum();
        let k = total.div_ceil(capacity);
        Instance::new(
            instance_name(n + 1, k),
            "",
            depot,
            customers,
            demands,
            capacity,
            k,
            true,
        )
        .unwrap()
    }

    #[test]
    fn euclid_cost_examples() {
        assert_eq!(euclid_cost(p(0, 0), p(3, 4)), 5);
        assert_eq!(euclid_cost(p(7, 7), p(7, 7)), 0);
        assert_eq!(euclid_cost(p(0, 0), p(1, 1)), 1);
        assert_eq!(euclid_cost(p(0, 0), p(1, 2)), 2);
    }

    #[test]
    fn point_rejects_off_grid() {
        assert!(Point::new(-1, 0).is_err());
        assert!(Point::new(0, 1001).is_err());
        assert!(Point::new(1000, 1000).is_ok());
    }

    #[test]
    fn out_and_back_doubles_the_leg() {
        let inst = toy(p(0, 0), vec![p(3, 4)], vec![1], 10);
        let sol = Solution::from_index_lists([vec![1]]).unwrap();
        assert_eq!(solution_cost(&inst, &sol).unwrap(), 10);
    }

    #[test]
    fn cost_is_additive_over_routes() {
        let inst = toy(p(0, 0), vec![p(3, 4), p(0, 5)], vec![1, 1], 10);
        let sol = Solution::from_index_lists([vec![1], vec![2]]).unwrap();
        assert_eq!(solution_cost(&inst, &sol).unwrap(), 20);
    }

    #[test]
    fn two_customer_route_cost() {
        let inst = toy(p(500, 500), vec![p(503, 504), p(500, 505)], vec![1, 1], 10);
        let sol = Solution::from_index_lists([vec![1, 2]]).unwrap();
        assert_eq!(solution_cost(&inst, &sol).unwrap(), 13);
    }

    #[test]
    fn unknown_index_is_rejected() {
        let inst = toy(p(0, 0), vec![p(3, 4)], vec![1], 10);
        let sol = Solution::from_index_lists([vec![1, 2]]).unwrap();
        assert_eq!(
            solution_cost(&inst, &sol),
            Err(ModelError::UnknownCustomer {
                index: 2,
                n_customers: 1
            })
        );
    }

    #[test]
    fn route_is_canonically_oriented() {
        let r = Route::new(vec![5, 2, 3]).unwrap();
        assert_eq!(r.customers(), &[3, 2, 5]);
        assert_eq!(Route::new(vec![]), Err(ModelError::EmptyRoute));
        assert_eq!(
            Route::new(vec![1, 2, 1]),
            Err(ModelError::RepeatedInRoute(1))
        );
    }

    #[test]
    fn validate_feasible_and_missing() {
        let inst = toy(p(0, 0), vec![p(1, 0), p(2, 0)], vec![1, 1], 100);
        let ok = Solution::from_index_lists([vec![1, 2]]).unwrap();
        let rep = validate(&inst, &ok);
        assert!(rep.feasible);
        assert_eq!(rep.recomputed_cost, Some(4));

        let missing = Solution::from_index_lists([vec![1]]).unwrap();
        let rep = validate(&inst, &missing);
        assert!(!rep.feasible);
        assert_eq!(
            rep.violations,
            vec![Violation::MissingCustomer { customer: 2 }]
        );
    }

    #[test]
    fn validate_reports_capacity_excess() {
        let inst = toy(p(0, 0), vec![p(1, 0), p(2, 0)], vec![6, 6], 10);
        let sol = Solution::from_index_lists([vec![1, 2]]).unwrap();
        let rep = validate(&inst, &sol);
        assert!(!rep.feasible);
        assert_eq!(
            rep.violations,
            vec![Violation::CapacityExceeded {
                route: 1,
                load: 12,
                excess: 2
            }]
        );
    }

    #[test]
    fn validate_accepts_extra_routes() {
        let inst = toy(p(0, 0), vec![p(1, 0), p(2, 0)], vec![1, 1], 100);
        assert_eq!(inst.k_min, 1);
        let sol = Solution::from_index_lists([vec![1], vec![2]]).unwrap();
        assert!(validate(&inst, &sol).feasible);
    }

    #[test]
    fn validate_lists_every_violation() {
        let inst = toy(p(0, 0), vec![p(1, 0), p(2, 0), p(3, 0)], vec![5, 5, 5], 10);
        let sol = Solution::from_index_lists([vec![1, 2, 9], vec![1]]).unwrap();
        let rep = validate(&inst, &sol);
        assert_eq!(rep.recomputed_cost, None);
        assert!(rep
            .violations
            .contains(&Violation::UnknownIndex { route: 1, index: 9 }));
        assert!(rep
            .violations
            .contains(&Violation::MissingCustomer { customer: 3 }));
        assert!(rep.violations.contains(&Violation::DuplicatedCustomer {
            customer: 1,
            occurrences: 2
        }));
    }

    #[test]
    fn instance_rejects_bad_demands() {
        let err = Instance::new("x", "", p(0, 0), vec![p(1, 1)], vec![11], 10, 2, true);
        assert!(matches!(err, Err(ModelError::DemandOutOfRange { .. })));
        let err = Instance::new("x", "", p(0, 0), vec![p(1, 1)], vec![0], 10, 1, true);
        assert!(matches!(err, Err(ModelError::DemandOutOfRange { .. })));
        let err = Instance::new(
            "x",
            "",
            p(0, 0),
            vec![p(1, 1), p(2, 2)],
            vec![6, 6],
            10,
            1,
            true,
        );
        assert!(matches!(err, Err(ModelError::KMinBelowBound { .. })));
    }
}
