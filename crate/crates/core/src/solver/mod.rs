//! Baseline heuristic: savings construction, granular local search and
//! ruin-and-recreate restarts.
//!
//! With an iteration budget and no time limit every run is a pure function
//! of the instance and the seed.

mod construct;
mod search;

use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::model::{validate, Instance, ModelError, Solution, ValidationReport};
use crate::rng::Xoshiro256StarStar;

pub use construct::nearest_neighbors;
use search::{descend, Deadline};
pub use search::{Move, MoveKind, RouteSet, Snapshot};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    #[error("input solution is not feasible ({} violations)", .0.violations.len())]
    InfeasibleInput(ValidationReport),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub time_limit: Option<Duration>,
    /// Number of ruin-and-recreate rounds after the first descent.
    pub max_iterations: Option<u64>,
    pub seed: u64,
    pub neighbor_k: usize,
    pub moves: Vec<MoveKind>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            time_limit: Some(Duration::from_secs(60)),
            max_iterations: None,
            seed: 1,
            neighbor_k: 20,
            moves: MoveKind::ALL.to_vec(),
        }
    }
}

impl SolverConfig {
    /// A clock-free configuration; results depend only on the seed.
    pub fn iterations(max_iterations: u64, seed: u64) -> Self {
        Self {
            time_limit: None,
            max_iterations: Some(max_iterations),
            seed,
            ..Self::default()
        }
    }

    fn check(&self) -> Result<(), SolverError> {
        if self.time_limit.is_some_and(|t| t.is_zero()) {
            return Err(SolverError::InvalidConfig(
                "time limit must be positive".into(),
            ));
        }
        if self.time_limit.is_none() && self.max_iterations.is_none() {
            return Err(SolverError::InvalidConfig(
                "either a time limit or an iteration budget is required".into(),
            ));
        }
        if self.neighbor_k == 0 {
            return Err(SolverError::InvalidConfig(
                "neighbor_k must be at least 1".into(),
            ));
        }
        if self.moves.is_empty() {
            return Err(SolverError::InvalidConfig("no moves enabled".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TracePoint {
    pub iteration: u64,
    pub elapsed_s: f64,
    pub cost: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMeta {
    pub seed: u64,
    pub elapsed_s: f64,
    pub iterations: u64,
    /// Every improvement of the incumbent, starting with the first descent.
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub solution: Solution,
    pub cost: u64,
    pub meta: RunMeta,
}

fn to_solution(set: RouteSet) -> Solution {
    Solution::from_index_lists(set.into_routes()).expect("search keeps routes well formed")
}

/// Clarke-Wright savings over the `neighbor_k` nearest pairs.
pub fn savings_construct(inst: &Instance, cfg: &SolverConfig) -> Result<Solution, SolverError> {
    cfg.check()?;
    let neighbors = nearest_neighbors(inst, cfg.neighbor_k);
    let routes = construct::savings_routes(inst, &neighbors);
    Ok(Solution::from_index_lists(routes)?)
}

/// Descends from a feasible solution until no enabled move improves it or
/// the time limit passes.
pub fn local_search(
    inst: &Instance,
    sol: &Solution,
    cfg: &SolverConfig,
) -> Result<Solution, SolverError> {
    cfg.check()?;
    let report = validate(inst, sol);
    if !report.feasible {
        return Err(SolverError::InfeasibleInput(report));
    }
    let deadline = Deadline(cfg.time_limit.map(|t| Instant::now() + t));
    let neighbors = nearest_neighbors(inst, cfg.neighbor_k);
    let routes = sol.routes.iter().map(|r| r.customers().to_vec()).collect();
    let mut set = RouteSet::new(inst, routes);
    let mut rng = Xoshiro256StarStar::from_splitmix(cfg.seed);
    let all: Vec<usize> = (1..=inst.n_customers()).collect();
    descend(
        &mut set, &neighbors, &cfg.moves, &mut rng, deadline, &all, true,
    );
    Ok(to_solution(set))
}

/// Removes a random customer and its nearest neighbors, then reinserts them
/// one at a time at their cheapest feasible position. Returns the removed
/// customers.
fn ruin_and_recreate(
    set: &mut RouteSet,
    neighbors: &[Vec<usize>],
    rng: &mut Xoshiro256StarStar,
) -> Vec<usize> {
    let n = set.n_customers();
    let max_removed = (n / 5).clamp(2, 30).min(n);
    let size = rng.uniform_int(1, max_removed as i64) as usize;
    let center = rng.uniform_int(1, n as i64) as usize;
    let mut removed = vec![center];
    removed.extend(neighbors[center].iter().take(size - 1));
    set.remove(&removed);
    rng.shuffle(&mut removed);
    for &c in &removed {
        set.insert_best(c, &neighbors[c]);
    }
    removed
}

pub fn solve(inst: &Instance, cfg: &SolverConfig) -> Result<SolveOutcome, SolverError> {
    cfg.check()?;
    let start = Instant::now();
    let deadline = Deadline(cfg.time_limit.map(|t| start + t));
    let neighbors = nearest_neighbors(inst, cfg.neighbor_k);
    let mut rng = Xoshiro256StarStar::from_splitmix(cfg.seed);

    let mut current = RouteSet::new(inst, construct::savings_routes(inst, &neighbors));
    let all: Vec<usize> = (1..=inst.n_customers()).collect();
    descend(
        &mut current,
        &neighbors,
        &cfg.moves,
        &mut rng,
        deadline,
        &all,
        true,
    );
    let mut best = current.clone();
    let mut trace = vec![TracePoint {
        iteration: 0,
        elapsed_s: start.elapsed().as_secs_f64(),
        cost: best.cost() as u64,
    }];

    let mut iterations = 0;
    while !deadline.passed() && cfg.max_iterations.is_none_or(|m| iterations < m) {
        if inst.n_customers() < 2 {
            break;
        }
        iterations += 1;
        let mut candidate = current.clone();
        let removed = ruin_and_recreate(&mut candidate, &neighbors, &mut rng);
        let mut touched = removed.clone();
        for &c in &removed {
            touched.extend(neighbors[c].iter().take(5));
        }
        // An interrupted descent still leaves a feasible solution.
        let finished = descend(
            &mut candidate,
            &neighbors,
            &cfg.moves,
            &mut rng,
            deadline,
            &touched,
            false,
        );
        if candidate.cost() < best.cost() {
            best = candidate.clone();
            trace.push(TracePoint {
                iteration: iterations,
                elapsed_s: start.elapsed().as_secs_f64(),
                cost: best.cost() as u64,
            });
        }
        if !finished {
            break;
        }
        if candidate.cost() <= current.cost() {
            current = candidate;
        }
    }

    let cost = best.cost() as u64;
    Ok(SolveOutcome {
        solution: to_solution(best),
        cost,
        meta: RunMeta {
            seed: cfg.seed,
            elapsed_s: start.elapsed().as_secs_f64(),
            iterations,
            trace,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{
        generate_instance, CustomerPos, DemandDist, DepotPos, GenConfig, GenSpec, RouteClass,
    };
    use crate::model::{solution_cost, Point};

    fn small(seed: u64) -> Instance {
        let spec = GenSpec {
            n_total: 60,
            depot: DepotPos::Random,
            customers: CustomerPos::RandomClustered,
            demand: DemandDist::D1To100,
            route_class: RouteClass::Short,
            seed,
        };
        generate_instance(&spec, &GenConfig::default()).unwrap().0
    }

    #[test]
    fn config_is_checked() {
        let inst = small(1);
        let mut cfg = SolverConfig {
            time_limit: Some(Duration::ZERO),
            ..SolverConfig::default()
        };
        assert!(matches!(
            solve(&inst, &cfg),
            Err(SolverError::InvalidConfig(_))
        ));
        cfg.time_limit = None;
        assert!(matches!(
            solve(&inst, &cfg),
            Err(SolverError::InvalidConfig(_))
        ));
        let cfg = SolverConfig {
            neighbor_k: 0,
            ..SolverConfig::iterations(1, 1)
        };
        assert!(savings_construct(&inst, &cfg).is_err());
    }

    #[test]
    fn savings_is_feasible() {
        let inst = small(2);
        let sol = savings_construct(&inst, &SolverConfig::iterations(0, 1)).unwrap();
        assert!(validate(&inst, &sol).feasible);
    }

    #[test]
    fn local_search_never_worsens() {
        let inst = small(3);
        let cfg = SolverConfig::iterations(0, 4);
        let start = savings_construct(&inst, &cfg).unwrap();
        let improved = local_search(&inst, &start, &cfg).unwrap();
        assert!(validate(&inst, &improved).feasible);
        assert!(solution_cost(&inst, &improved).unwrap() <= solution_cost(&inst, &start).unwrap());
    }

    #[test]
    fn local_search_rejects_overloaded_input() {
        let inst = small(4);
        let everything = Solution::from_index_lists(vec![(1..=59).collect()]).unwrap();
        assert!(matches!(
            local_search(&inst, &everything, &SolverConfig::iterations(0, 1)),
            Err(SolverError::InfeasibleInput(_))
        ));
    }

    #[test]
    fn iteration_budget_is_deterministic() {
        let inst = small(5);
        let cfg = SolverConfig::iterations(200, 9);
        let a = solve(&inst, &cfg).unwrap();
        let b = solve(&inst, &cfg).unwrap();
        assert_eq!(a.solution, b.solution);
        assert_eq!(a.meta.iterations, 200);
        assert_eq!(a.cost, solution_cost(&inst, &a.solution).unwrap());
        assert!(validate(&inst, &a.solution).feasible);
        let trace: Vec<u64> = a.meta.trace.iter().map(|t| t.cost).collect();
        assert!(trace.windows(2).all(|w| w[1] < w[0]));
        assert_eq!(*trace.last().unwrap(), a.cost);
    }

    #[test]
    fn single_customer() {
        let inst = Instance::new(
            "XL-n2-k1",
            "",
            Point { x: 0, y: 0 },
            vec![Point { x: 3, y: 4 }],
            vec![1],
            1,
            1,
            true,
        )
        .unwrap();
        let out = solve(&inst, &SolverConfig::iterations(10, 1)).unwrap();
        assert_eq!(out.cost, 10);
    }
}
