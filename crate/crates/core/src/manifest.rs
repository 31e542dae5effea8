//! Generation manifests: one spec per line,
//! `n_total,depot,cust,demand,route_class,seed[,name]`.
//!
//! Blank lines and lines starting with `#` are ignored. The optional name
//! column ties a row to a published instance name so run results can be
//! grouped by attribute.

use std::fmt::Write as _;

use thiserror::Error;

use crate::generator::{GenSpec, MIN_TOTAL_POINTS};

/// Attribute levels of the 100 published XL instances.
pub const XL_SET_MANIFEST: &str = include_str!("../data/xl_manifest.csv");

/// Initial best known solutions of the XL set (`instance,cost,method`).
pub const XL_SET_INITIAL_BKS: &str = include_str!("../data/xl_initial_bks.csv");

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("manifest line {line}: {message}")]
pub struct ManifestError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub spec: GenSpec,
    pub name: Option<String>,
    /// 1-based source line.
    pub line: usize,
}

pub fn parse_manifest(text: &str) -> Result<Vec<ManifestEntry>, ManifestError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| ManifestError { line, message };
        let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if !(6..=7).contains(&fields.len()) {
            return Err(err(format!(
                "expected 6 or 7 fields, found {}",
                fields.len()
            )));
        }
        let n_total: usize = fields[0]
            .parse()
            .map_err(|_| err(format!("n_total {:?} is not an integer", fields[0])))?;
        if n_total < MIN_TOTAL_POINTS {
            return Err(err(format!(
                "n_total {n_total} is below {MIN_TOTAL_POINTS}"
            )));
        }
        let seed: u64 = fields[5]
            .parse()
            .map_err(|_| err(format!("seed {:?} is not an unsigned integer", fields[5])))?;
        let spec = GenSpec {
            n_total,
            depot: fields[1].parse().map_err(|e| err(format!("{e}")))?,
            customers: fields[2].parse().map_err(|e| err(format!("{e}")))?,
            demand: fields[3].parse().map_err(|e| err(format!("{e}")))?,
            route_class: fields[4].parse().map_err(|e| err(format!("{e}")))?,
            seed,
        };
        let name = fields
            .get(6)
            .filter(|s| !s.is_empty())
            .map(|s| s.to_string());
        out.push(ManifestEntry { spec, name, line });
    }
    Ok(out)
}

pub fn write_manifest(entries: &[ManifestEntry]) -> String {
    let mut out = String::new();
    for e in entries {
        let s = &e.spec;
        write!(
            out,
            "{},{},{},{},{},{}",
            s.n_total,
            s.depot,
            s.customers,
            s.demand,
            s.route_class.full_name(),
            s.seed
        )
        .unwrap();
        if let Some(name) = &e.name {
            write!(out, ",{name}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// The published XL set as manifest entries.
pub fn xl_set() -> Vec<ManifestEntry> {
    parse_manifest(XL_SET_MANIFEST).expect("bundled manifest parses")
}
