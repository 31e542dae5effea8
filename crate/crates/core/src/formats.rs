//! CVRPLib-style instance (`.vrp`) and solution (`.sol`) files.
//!
//! The writers produce one canonical byte layout; the instance parser
//! accepts any header order and any amount of whitespace but is strict about
//! section contents. The depot is node 1 in files and index 0 in memory.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{solution_cost, Instance, ModelError, Point, Route, Solution, GRID_MAX};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatErrorKind {
    #[error("missing {0}")]
    Missing(&'static str),
    #[error("{section} has {found} entries, DIMENSION is {expected}")]
    DimensionMismatch {
        section: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("token {0:?} is not an integer")]
    NonInteger(String),
    #[error("expected {expected} fields, found {found}")]
    FieldCount { expected: usize, found: usize },
    #[error("expected node {expected}, found {found}")]
    NodeOrder { expected: i64, found: i64 },
    #[error("depot demand must be 0, found {0}")]
    DepotDemand(i64),
    #[error("demand {demand} of node {node} is outside [1, {capacity}]")]
    DemandRange {
        node: i64,
        demand: i64,
        capacity: i64,
    },
    #[error("coordinate ({x}, {y}) of node {node} is outside the [0, {GRID_MAX}] grid")]
    CoordinateRange { node: i64, x: i64, y: i64 },
    #[error("unsupported {key} {value:?}")]
    Unsupported { key: &'static str, value: String },
    #[error("depot section must list node 1 then -1")]
    DepotSection,
    #[error("duplicate {0}")]
    Duplicate(&'static str),
    #[error("unexpected line {0:?}")]
    Unexpected(String),
    #[error("malformed route header {0:?}")]
    RouteHeader(String),
    #[error("route #{0} is empty")]
    EmptyRoute(usize),
    #[error("route numbers must run 1, 2, ...; found #{found} where #{expected} was expected")]
    RouteNumber { expected: usize, found: usize },
    #[error("customer {0} appears more than once")]
    RepeatedCustomer(usize),
    #[error("invalid instance: {0}")]
    Model(ModelError),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("line {line}: {kind}")]
pub struct FormatError {
    pub line: usize,
    pub kind: FormatErrorKind,
}

fn ferr(line: usize, kind: FormatErrorKind) -> FormatError {
    FormatError { line, kind }
}

fn int(tok: &str, line: usize) -> Result<i64, FormatError> {
    tok.parse::<i64>()
        .map_err(|_| ferr(line, FormatErrorKind::NonInteger(tok.to_string())))
}

/// Canonical instance serialization.
pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::new();
    let comment = inst.comment.replace(['\n', '\r'], " ");
    writeln!(out, "NAME : {}", inst.name).unwrap();
    if comment.is_empty() {
        writeln!(out, "COMMENT :").unwrap();
    } else {
        writeln!(out, "COMMENT : {comment}").unwrap();
    }
    writeln!(out, "TYPE : CVRP").unwrap();
    writeln!(out, "DIMENSION : {}", inst.dimension()).unwrap();
    writeln!(out, "EDGE_WEIGHT_TYPE : EUC_2D").unwrap();
    writeln!(out, "CAPACITY : {}", inst.capacity).unwrap();
    writeln!(out, "NODE_COORD_SECTION").unwrap();
    writeln!(out, "1 {} {}", inst.depot.x, inst.depot.y).unwrap();
    for (i, p) in inst.customers.iter().enumerate() {
        writeln!(out, "{} {} {}", i + 2, p.x, p.y).unwrap();
    }
    writeln!(out, "DEMAND_SECTION").unwrap();
    writeln!(out, "1 0").unwrap();
    for (i, q) in inst.demands.iter().enumerate() {
        writeln!(out, "{} {}", i + 2, q).unwrap();
    }
    writeln!(out, "DEPOT_SECTION").unwrap();
    writeln!(out, "1").unwrap();
    writeln!(out, "-1").unwrap();
    writeln!(out, "EOF").unwrap();
    out
}

const SECTIONS: [&str; 3] = ["NODE_COORD_SECTION", "DEMAND_SECTION", "DEPOT_SECTION"];

fn is_keyword_line(tokens: &[&str]) -> bool {
    tokens.first().is_some_and(|t| {
        let key = t.trim_end_matches(':');
        !key.is_empty()
            && key
                .chars()
                .all(|c| c.is_ascii_uppercase() || c == '_' || c.is_ascii_digit())
            && key.chars().next().unwrap().is_ascii_alphabetic()
    })
}

/// `k<digits>` suffix of a CVRPLib name, e.g. `XL-n1094-k157` → 157.
fn k_from_name(name: &str) -> Option<u32> {
    name.rsplit('-')
        .next()
        .and_then(|t| t.strip_prefix('k'))
        .and_then(|d| d.parse().ok())
}

/// Parses an instance file. Unknown header keys are ignored.
pub fn parse_instance(text: &str) -> Result<Instance, FormatError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();

    let mut name: Option<(usize, String)> = None;
    let mut comment = String::new();
    let mut dimension: Option<(usize, usize)> = None;
    let mut capacity: Option<(usize, i64)> = None;
    let mut coords: Option<Vec<(usize, i64, i64)>> = None;
    let mut demands: Option<Vec<(usize, i64)>> = None;
    let mut depot_seen = false;
    let last_line = text.lines().count().max(1);

    let mut i = 0;
    while i < lines.len() {
        let (ln, line) = lines[i];
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let head = tokens[0].trim_end_matches(':');
        if head == "EOF" {
            break;
        }
        if let Some(&section) = SECTIONS.iter().find(|s| **s == head) {
            let start = i + 1;
            let mut end = start;
            while end < lines.len() {
                let toks: Vec<&str> = lines[end].1.split_whitespace().collect();
                if is_keyword_line(&toks) {
                    break;
                }
                end += 1;
            }
            let body = &lines[start..end];
            match section {
                "NODE_COORD_SECTION" => {
                    if coords.is_some() {
                        return Err(ferr(ln, FormatErrorKind::Duplicate(section)));
                    }
                    let dim = dimension
                        .ok_or(ferr(ln, FormatErrorKind::Missing("DIMENSION")))?
                        .1;
                    if body.len() != dim {
                        return Err(ferr(
                            ln,
                            FormatErrorKind::DimensionMismatch {
                                section,
                                expected: dim,
                                found: body.len(),
                            },
                        ));
                    }
                    let mut v = Vec::with_capacity(dim);
                    for (k, &(bl, b)) in body.iter().enumerate() {
                        let t: Vec<&str> = b.split_whitespace().collect();
                        if t.len() != 3 {
                            return Err(ferr(
                                bl,
                                FormatErrorKind::FieldCount {
                                    expected: 3,
                                    found: t.len(),
                                },
                            ));
                        }
                        let idx = int(t[0], bl)?;
                        if idx != k as i64 + 1 {
                            return Err(ferr(
                                bl,
                                FormatErrorKind::NodeOrder {
                                    expected: k as i64 + 1,
                                    found: idx,
                                },
                            ));
                        }
                        let (x, y) = (int(t[1], bl)?, int(t[2], bl)?);
                        if Point::new(x, y).is_err() {
                            return Err(ferr(
                                bl,
                                FormatErrorKind::CoordinateRange { node: idx, x, y },
                            ));
                        }
                        v.push((bl, x, y));
                    }
                    coords = Some(v);
                }
                "DEMAND_SECTION" => {
                    if demands.is_some() {
                        return Err(ferr(ln, FormatErrorKind::Duplicate(section)));
                    }
                    let dim = dimension
                        .ok_or(ferr(ln, FormatErrorKind::Missing("DIMENSION")))?
                        .1;
                    let cap = capacity
                        .ok_or(ferr(ln, FormatErrorKind::Missing("CAPACITY")))?
                        .1;
                    if body.len() != dim {
                        return Err(ferr(
                            ln,
                            FormatErrorKind::DimensionMismatch {
                                section,
                                expected: dim,
                                found: body.len(),
                            },
                        ));
                    }
                    let mut v = Vec::with_capacity(dim);
                    for (k, &(bl, b)) in body.iter().enumerate() {
                        let t: Vec<&str> = b.split_whitespace().collect();
                        if t.len() != 2 {
                            return Err(ferr(
                                bl,
                                FormatErrorKind::FieldCount {
                                    expected: 2,
                                    found: t.len(),
                                },
                            ));
                        }
                        let idx = int(t[0], bl)?;
                        if idx != k as i64 + 1 {
                            return Err(ferr(
                                bl,
                                FormatErrorKind::NodeOrder {
                                    expected: k as i64 + 1,
                                    found: idx,
                                },
                            ));
                        }
                        let q = int(t[1], bl)?;
                        if k == 0 {
                            if q != 0 {
                                return Err(ferr(bl, FormatErrorKind::DepotDemand(q)));
                            }
                        } else if q < 1 || q > cap {
                            return Err(ferr(
                                bl,
                                FormatErrorKind::DemandRange {
                                    node: idx,
                                    demand: q,
                                    capacity: cap,
                                },
                            ));
                        }
                        v.push((bl, q));
                    }
                    demands = Some(v);
                }
                _ => {
                    let vals: Vec<&str> = body
                        .iter()
                        .flat_map(|(_, b)| b.split_whitespace())
                        .collect();
                    let ok = vals.len() == 2 && vals[0] == "1" && vals[1] == "-1";
                    if !ok {
                        return Err(ferr(ln, FormatErrorKind::DepotSection));
                    }
                    depot_seen = true;
                }
            }
            i = end;
            continue;
        }

        // header line: `KEY : value`, `KEY: value` or `KEY value`
        let (key, value) = match line.split_once(':') {
            Some((k, v)) => (k.trim(), v.trim()),
            None => match line.split_once(char::is_whitespace) {
                Some((k, v)) => (k.trim(), v.trim()),
                None => (line, ""),
            },
        };
        match key {
            "NAME" => name = Some((ln, value.to_string())),
            "COMMENT" => comment = value.to_string(),
            "TYPE" => {
                if value != "CVRP" {
                    return Err(ferr(
                        ln,
                        FormatErrorKind::Unsupported {
                            key: "TYPE",
                            value: value.into(),
                        },
                    ));
                }
            }
            "EDGE_WEIGHT_TYPE" => {
                if value != "EUC_2D" {
                    return Err(ferr(
                        ln,
                        FormatErrorKind::Unsupported {
                            key: "EDGE_WEIGHT_TYPE",
                            value: value.into(),
                        },
                    ));
                }
            }
            "DIMENSION" => {
                let d = int(value, ln)?;
                if d < 2 {
                    return Err(ferr(
                        ln,
                        FormatErrorKind::Unsupported {
                            key: "DIMENSION",
                            value: value.into(),
                        },
                    ));
                }
                dimension = Some((ln, d as usize));
            }
            "CAPACITY" => {
                let c = int(value, ln)?;
                if c < 1 || c > i64::from(u32::MAX) {
                    return Err(ferr(
                        ln,
                        FormatErrorKind::Unsupported {
                            key: "CAPACITY",
                            value: value.into(),
                        },
                    ));
                }
                capacity = Some((ln, c));
            }
            _ if is_keyword_line(&tokens) => {}
            _ => return Err(ferr(ln, FormatErrorKind::Unexpected(line.to_string()))),
        }
        i += 1;
    }

    let (name_line, name) = name.ok_or(ferr(last_line, FormatErrorKind::Missing("NAME")))?;
    let (_, capacity) = capacity.ok_or(ferr(last_line, FormatErrorKind::Missing("CAPACITY")))?;
    let coords = coords.ok_or(ferr(
        last_line,
        FormatErrorKind::Missing("NODE_COORD_SECTION"),
    ))?;
    let demands = demands.ok_or(ferr(last_line, FormatErrorKind::Missing("DEMAND_SECTION")))?;
    if !depot_seen {
        return Err(ferr(last_line, FormatErrorKind::Missing("DEPOT_SECTION")));
    }

    let depot = Point {
        x: coords[0].1,
        y: coords[0].2,
    };
    let customers: Vec<Point> = coords[1..]
        .iter()
        .map(|&(_, x, y)| Point { x, y })
        .collect();
    let demand_values: Vec<u32> = demands[1..].iter().map(|&(_, q)| q as u32).collect();
    let capacity = capacity as u32;
    let total: u64 = demand_values.iter().map(|&q| u64::from(q)).sum();
    let continuous = total.div_ceil(u64::from(capacity)) as u32;
    let (k_min, proven) = match k_from_name(&name) {
        Some(k) => (k, !comment.split_whitespace().any(|t| t == "kmin=unproven")),
        None => (continuous, false),
    };
    Instance::new(
        name,
        comment,
        depot,
        customers,
        demand_values,
        capacity,
        k_min,
        proven,
    )
    .map_err(|e| ferr(name_line, FormatErrorKind::Model(e)))
}

/// A parsed solution file together with the cost it declared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedSolution {
    pub solution: Solution,
    pub declared_cost: u64,
    pub cost_line: usize,
}

/// Declared and recomputed costs disagree. Non-fatal: the recomputed value
/// is authoritative.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostMismatch {
    pub line: usize,
    pub declared: u64,
    pub recomputed: u64,
}

impl ParsedSolution {
    pub fn cost_mismatch(&self, inst: &Instance) -> Result<Option<CostMismatch>, ModelError> {
        let recomputed = solution_cost(inst, &self.solution)?;
        Ok((recomputed != self.declared_cost).then_some(CostMismatch {
            line: self.cost_line,
            declared: self.declared_cost,
            recomputed,
        }))
    }
}

/// `Route #i: c1 c2 ...` lines then `Cost <recomputed>`.
pub fn write_solution(inst: &Instance, sol: &Solution) -> Result<String, ModelError> {
    let cost = solution_cost(inst, sol)?;
    let mut out = String::new();
    for (i, r) in sol.routes.iter().enumerate() {
        write!(out, "Route #{}:", i + 1).unwrap();
        for c in r.customers() {
            write!(out, " {c}").unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "Cost {cost}").unwrap();
    Ok(out)
}

pub fn parse_solution(text: &str) -> Result<ParsedSolution, FormatError> {
    let mut routes = Vec::new();
    let mut seen = BTreeSet::new();
    let mut cost: Option<(usize, u64)> = None;
    let last_line = text.lines().count().max(1);

    for (i, raw) in text.lines().enumerate() {
        let ln = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("Route") {
            let (header, body) = rest
                .split_once(':')
                .ok_or_else(|| ferr(ln, FormatErrorKind::RouteHeader(line.to_string())))?;
            let number: usize = header
                .trim()
                .strip_prefix('#')
                .and_then(|d| d.trim().parse().ok())
                .ok_or_else(|| ferr(ln, FormatErrorKind::RouteHeader(line.to_string())))?;
            let expected = routes.len() + 1;
            if number != expected {
                return Err(ferr(
                    ln,
                    FormatErrorKind::RouteNumber {
                        expected,
                        found: number,
                    },
                ));
            }
            let mut customers = Vec::new();
            for tok in body.split_whitespace() {
                let c = int(tok, ln)?;
                if c < 1 {
                    return Err(ferr(
                        ln,
                        FormatErrorKind::Model(ModelError::UnknownCustomer {
                            index: c.max(0) as usize,
                            n_customers: 0,
                        }),
                    ));
                }
                let c = c as usize;
                if !seen.insert(c) {
                    return Err(ferr(ln, FormatErrorKind::RepeatedCustomer(c)));
                }
                customers.push(c);
            }
            if customers.is_empty() {
                return Err(ferr(ln, FormatErrorKind::EmptyRoute(number)));
            }
            routes.push(Route::new(customers).map_err(|e| ferr(ln, FormatErrorKind::Model(e)))?);
        } else if let Some(rest) = line.strip_prefix("Cost") {
            if cost.is_some() {
                return Err(ferr(ln, FormatErrorKind::Duplicate("Cost line")));
            }
            let tok = rest.trim();
            let v = tok
                .parse::<u64>()
                .map_err(|_| ferr(ln, FormatErrorKind::NonInteger(tok.to_string())))?;
            cost = Some((ln, v));
        } else {
            return Err(ferr(ln, FormatErrorKind::Unexpected(line.to_string())));
        }
    }
    let (cost_line, declared_cost) =
        cost.ok_or(ferr(last_line, FormatErrorKind::Missing("Cost line")))?;
    Ok(ParsedSolution {
        solution: Solution::new(routes),
        declared_cost,
        cost_line,
    })
}
