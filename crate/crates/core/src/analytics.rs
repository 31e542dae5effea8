//! Aggregation of multi-run results: best and mean per instance, gaps to a
//! BKS table, and averages per size group or per generation attribute.
//!
//! A run without a feasible solution has no cost. It is counted in the
//! `missing` columns and left out of every best, mean and average.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generator::{CustomerPos, DemandDist, DepotPos, RouteClass};
use crate::manifest::ManifestEntry;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("BKS must be positive, got {0}")]
    NonPositiveBks(i64),
    #[error("no BKS entry for instance {0:?}")]
    MissingBks(String),
    #[error("instance {0:?} is not in the manifest")]
    NotInManifest(String),
    #[error("cannot read the customer count from instance name {0:?}")]
    UnsizedName(String),
    #[error("{what} line {line}: {message}")]
    Parse {
        what: &'static str,
        line: u64,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance: String,
    pub method: String,
    pub seed: u64,
    pub elapsed_s: f64,
    /// `None` when the run found no feasible solution.
    pub cost: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BksEntry {
    pub cost: u64,
    pub method: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BksTable {
    pub entries: BTreeMap<String, BksEntry>,
}

impl BksTable {
    pub fn cost(&self, instance: &str) -> Result<u64, AnalyticsError> {
        self.entries
            .get(instance)
            .map(|e| e.cost)
            .ok_or_else(|| AnalyticsError::MissingBks(instance.to_string()))
    }

    pub fn costs(&self) -> BTreeMap<String, u64> {
        self.entries
            .iter()
            .map(|(k, v)| (k.clone(), v.cost))
            .collect()
    }
}

fn parse_err(what: &'static str, e: &csv::Error) -> AnalyticsError {
    AnalyticsError::Parse {
        what,
        line: e.position().map_or(0, |p| p.line()),
        message: e.to_string(),
    }
}

/// Reads `instance,cost[,method]` with a header row.
pub fn parse_bks(text: &str) -> Result<BksTable, AnalyticsError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut entries = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| parse_err("BKS", &e))?;
        let line = rec.position().map_or(0, |p| p.line());
        let err = |message: String| AnalyticsError::Parse {
            what: "BKS",
            line,
            message,
        };
        if !(2..=3).contains(&rec.len()) {
            return Err(err(format!("expected 2 or 3 fields, found {}", rec.len())));
        }
        let cost: i64 = rec[1]
            .parse()
            .map_err(|_| err(format!("cost {:?} is not an integer", &rec[1])))?;
        if cost <= 0 {
            return Err(err(format!("cost {cost} is not positive")));
        }
        let method = rec.get(2).filter(|m| !m.is_empty()).map(str::to_string);
        let entry = BksEntry {
            cost: cost as u64,
            method,
        };
        if entries.insert(rec[0].to_string(), entry).is_some() {
            return Err(err(format!("duplicate instance {:?}", &rec[0])));
        }
    }
    Ok(BksTable { entries })
}

/// Reads `instance,method,seed,elapsed_s,cost`; an empty cost is a failed run.
pub fn parse_runs(text: &str) -> Result<Vec<RunRecord>, AnalyticsError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    reader
        .deserialize()
        .map(|r| r.map_err(|e| parse_err("runs", &e)))
        .collect()
}

pub fn write_runs(records: &[RunRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(r).expect("in-memory CSV write");
    }
    if records.is_empty() {
        return "instance,method,seed,elapsed_s,cost\n".to_string();
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("UTF-8 CSV")
}

pub fn gap_percent(cost: f64, bks: i64) -> Result<f64, AnalyticsError> {
    if bks <= 0 {
        return Err(AnalyticsError::NonPositiveBks(bks));
    }
    Ok(100.0 * (cost - bks as f64) / bks as f64)
}

/// Rounds to three decimals, halves upward.
pub fn round3(x: f64) -> f64 {
    let scaled = x * 1000.0;
    // Absorb representation error so 0.0125 rounds like the decimal it spells.
    let nudge = scaled.abs().max(1.0) * 1e-12;
    (scaled + 0.5 + nudge).floor() / 1000.0
}

/// Customer count encoded in names like `XL-n1048-k237` (the `n` part counts
/// the depot).
pub fn customers_from_name(name: &str) -> Option<usize> {
    let start = name.find("-n")? + 2;
    let digits: String = name[start..]
        .chars()
        .take_while(char::is_ascii_digit)
        .collect();
    digits.parse::<usize>().ok()?.checked_sub(1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceSummary {
    pub instance: String,
    pub method: String,
    pub runs: usize,
    pub missing: usize,
    pub bks: u64,
    pub best: Option<u64>,
    pub mean: Option<f64>,
    pub gap_best: Option<f64>,
    pub gap_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupAverage {
    pub group: String,
    pub method: String,
    /// Instances with at least one feasible run.
    pub instances: usize,
    /// Instances where every run failed.
    pub missing: usize,
    pub avg_gap_best: Option<f64>,
    pub avg_gap_mean: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub instances: Vec<InstanceSummary>,
    pub groups: Vec<GroupAverage>,
}

fn per_instance(
    records: &[RunRecord],
    bks: &BksTable,
) -> Result<Vec<InstanceSummary>, AnalyticsError> {
    let mut cells: BTreeMap<(&str, &str), (usize, Vec<u64>)> = BTreeMap::new();
    for r in records {
        let cell = cells.entry((&r.instance, &r.method)).or_default();
        cell.0 += 1;
        cell.1.extend(r.cost);
    }
    cells
        .into_iter()
        .map(|((instance, method), (runs, costs))| {
            let b = bks.cost(instance)?;
            let best = costs.iter().copied().min();
            let mean = (!costs.is_empty()).then(|| {
                costs.iter().map(|&c| u128::from(c)).sum::<u128>() as f64 / costs.len() as f64
            });
            Ok(InstanceSummary {
                instance: instance.to_string(),
                method: method.to_string(),
                runs,
                missing: runs - costs.len(),
                bks: b,
                best,
                mean,
                gap_best: best.map(|c| gap_percent(c as f64, b as i64)).transpose()?,
                gap_mean: mean.map(|m| gap_percent(m, b as i64)).transpose()?,
            })
        })
        .collect()
}

fn average<'a>(
    group: &str,
    method: &str,
    members: impl Iterator<Item = &'a InstanceSummary>,
) -> GroupAverage {
    let (mut n, mut missing, mut sb, mut sm) = (0, 0, 0.0, 0.0);
    for s in members {
        match (s.gap_best, s.gap_mean) {
            (Some(b), Some(m)) => {
                n += 1;
                sb += b;
                sm += m;
            }
            _ => missing += 1,
        }
    }
    GroupAverage {
        group: group.to_string(),
        method: method.to_string(),
        instances: n,
        missing,
        avg_gap_best: (n > 0).then(|| sb / n as f64),
        avg_gap_mean: (n > 0).then(|| sm / n as f64),
    }
}

fn methods(rows: &[InstanceSummary]) -> BTreeSet<&str> {
    rows.iter().map(|s| s.method.as_str()).collect()
}

/// Per-instance best and mean, and per-method averages over all instances.
/// With `split = Some(t)` two more groups separate instances with fewer
/// than `t` customers from the rest.
pub fn summarize(
    records: &[RunRecord],
    bks: &BksTable,
    split: Option<usize>,
) -> Result<Summary, AnalyticsError> {
    let instances = per_instance(records, bks)?;
    let mut groups = Vec::new();
    for method in methods(&instances) {
        let mine = || instances.iter().filter(move |s| s.method == method);
        groups.push(average("all", method, mine()));
        if let Some(t) = split {
            let mut small = Vec::new();
            let mut large = Vec::new();
            for s in mine() {
                let n = customers_from_name(&s.instance)
                    .ok_or_else(|| AnalyticsError::UnsizedName(s.instance.clone()))?;
                if n < t {
                    small.push(s)
                } else {
                    large.push(s)
                }
            }
            groups.push(average(&format!("n<{t}"), method, small.into_iter()));
            groups.push(average(&format!("n>={t}"), method, large.into_iter()));
        }
    }
    Ok(Summary { instances, groups })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttributeCell {
    pub attribute: &'static str,
    pub level: String,
    pub method: String,
    pub instances: usize,
    pub missing: usize,
    pub avg_gap_best: Option<f64>,
    pub avg_gap_mean: Option<f64>,
}

/// Average gaps per level of each generation attribute, in level order,
/// followed by an `overall` row per method. Every level appears, empty
/// ones with no averages.
pub fn group_by_attribute(
    records: &[RunRecord],
    bks: &BksTable,
    manifest: &[ManifestEntry],
) -> Result<Vec<AttributeCell>, AnalyticsError> {
    let specs: BTreeMap<&str, _> = manifest
        .iter()
        .filter_map(|e| e.name.as_deref().map(|n| (n, &e.spec)))
        .collect();
    let rows = per_instance(records, bks)?;
    for s in &rows {
        if !specs.contains_key(s.instance.as_str()) {
            return Err(AnalyticsError::NotInManifest(s.instance.clone()));
        }
    }
    type Labeler = fn(&crate::generator::GenSpec) -> String;
    let attributes: [(&'static str, Vec<String>, Labeler); 4] = [
        (
            "depot",
            DepotPos::ALL.iter().map(|l| l.code().to_string()).collect(),
            |s| s.depot.code().to_string(),
        ),
        (
            "customers",
            CustomerPos::ALL
                .iter()
                .map(|l| l.code().to_string())
                .collect(),
            |s| s.customers.code().to_string(),
        ),
        (
            "demand",
            DemandDist::ALL
                .iter()
                .map(|l| l.code().to_string())
                .collect(),
            |s| s.demand.code().to_string(),
        ),
        (
            "route",
            RouteClass::ALL
                .iter()
                .map(|l| l.full_name().to_string())
                .collect(),
            |s| s.route_class.full_name().to_string(),
        ),
    ];
    let mut out = Vec::new();
    for method in methods(&rows) {
        for (attribute, levels, label) in &attributes {
            for level in levels {
                let members = rows
                    .iter()
                    .filter(|s| s.method == method && label(specs[s.instance.as_str()]) == *level);
                let avg = average(level, method, members);
                out.push(AttributeCell {
                    attribute,
                    level: level.clone(),
                    method: method.to_string(),
                    instances: avg.instances,
                    missing: avg.missing,
                    avg_gap_best: avg.avg_gap_best,
                    avg_gap_mean: avg.avg_gap_mean,
                });
            }
        }
        let avg = average("all", method, rows.iter().filter(|s| s.method == method));
        out.push(AttributeCell {
            attribute: "overall",
            level: "all".to_string(),
            method: method.to_string(),
            instances: avg.instances,
            missing: avg.missing,
            avg_gap_best: avg.avg_gap_best,
            avg_gap_mean: avg.avg_gap_mean,
        });
    }
    Ok(out)
}

fn gap_cell(g: Option<f64>) -> String {
    g.map_or_else(String::new, |g| format!("{:.3}", round3(g)))
}

fn mean_cell(m: Option<f64>) -> String {
    m.map_or_else(String::new, |m| format!("{:.3}", round3(m)))
}

pub fn instance_rows(summary: &Summary) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let header = vec![
        "instance", "method", "runs", "missing", "bks", "best", "mean", "gap_best", "gap_mean",
    ];
    let rows = summary
        .instances
        .iter()
        .map(|s| {
            vec![
                s.instance.clone(),
                s.method.clone(),
                s.runs.to_string(),
                s.missing.to_string(),
                s.bks.to_string(),
                s.best.map_or_else(String::new, |b| b.to_string()),
                mean_cell(s.mean),
                gap_cell(s.gap_best),
                gap_cell(s.gap_mean),
            ]
        })
        .collect();
    (header, rows)
}

pub fn group_rows(summary: &Summary) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let header = vec![
        "group",
        "method",
        "instances",
        "missing",
        "avg_gap_best",
        "avg_gap_mean",
    ];
    let rows = summary
        .groups
        .iter()
        .map(|g| {
            vec![
                g.group.clone(),
                g.method.clone(),
                g.instances.to_string(),
                g.missing.to_string(),
                gap_cell(g.avg_gap_best),
                gap_cell(g.avg_gap_mean),
            ]
        })
        .collect();
    (header, rows)
}

pub fn attribute_rows(cells: &[AttributeCell]) -> (Vec<&'static str>, Vec<Vec<String>>) {
    let header = vec![
        "attribute",
        "level",
        "method",
        "instances",
        "missing",
        "avg_gap_best",
        "avg_gap_mean",
    ];
    let rows = cells
        .iter()
        .map(|c| {
            vec![
                c.attribute.to_string(),
                c.level.clone(),
                c.method.clone(),
                c.instances.to_string(),
                c.missing.to_string(),
                gap_cell(c.avg_gap_best),
                gap_cell(c.avg_gap_mean),
            ]
        })
        .collect();
    (header, rows)
}

pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory CSV write");
    for r in rows {
        w.write_record(r).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("UTF-8 CSV")
}

/// Plain-text table; numeric-looking columns are right-aligned.
pub fn to_text(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in widths.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let numeric: Vec<bool> = (0..header.len())
        .map(|i| {
            rows.iter()
                .all(|r| r[i].is_empty() || r[i].parse::<f64>().is_ok())
                && !rows.is_empty()
        })
        .collect();
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let parts: Vec<String> = cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if numeric[i] {
                    format!("{c:>w$}", w = widths[i])
                } else {
                    format!("{c:<w$}", w = widths[i])
                }
            })
            .collect();
        writeln!(out, "{}", parts.join("  ").trim_end()).unwrap();
    };
    line(header.to_vec());
    for r in rows {
        line(r.iter().map(String::as_str).collect());
    }
    out
}
