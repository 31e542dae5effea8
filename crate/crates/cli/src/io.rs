use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use xl_core::analytics::{parse_bks, BksTable};
use xl_core::formats::parse_instance;
use xl_core::manifest::XL_SET_INITIAL_BKS;
use xl_core::Instance;

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

pub fn create_dir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).with_context(|| format!("creating {}", path.display()))
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_bks(path: Option<&Path>) -> Result<BksTable> {
    match path {
        Some(p) => parse_bks(&read(p)?).with_context(|| format!("parsing {}", p.display())),
        None => Ok(parse_bks(XL_SET_INITIAL_BKS)?),
    }
}
