//! Large-scale CVRP benchmark toolkit: XL-style instance generation, exact
//! minimum fleet size by bin packing, CVRPLib file formats, solution
//! validation, lead-time challenge scoring, a baseline solver and result
//! analytics.

pub mod analytics;
pub mod binpack;
pub mod challenge;
pub mod formats;
pub mod generator;
pub mod manifest;
pub mod model;
pub mod rng;
pub mod solver;

pub use model::{
    euclid_cost, solution_cost, validate, Instance, Point, Route, Solution, ValidationReport,
    Violation,
};
