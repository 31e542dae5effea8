use anyhow::Context;
use xl_core::analytics::{
    attribute_rows, group_by_attribute, group_rows, instance_rows, parse_runs, summarize, to_csv,
    to_text,
};
use xl_core::manifest::parse_manifest;

use crate::{io, Outcome, StatsArgs};

pub fn run(a: StatsArgs) -> Outcome {
    let records = parse_runs(&io::read(&a.runs)?).with_context(|| a.runs.display().to_string())?;
    let bks = io::read_bks(a.bks.as_deref())?;
    let summary = summarize(&records, &bks, a.split)?;
    let mut tables = vec![instance_rows(&summary), group_rows(&summary)];
    if let Some(path) = &a.manifest {
        let manifest =
            parse_manifest(&io::read(path)?).with_context(|| path.display().to_string())?;
        tables.push(attribute_rows(&group_by_attribute(
            &records, &bks, &manifest,
        )?));
    }
    let rendered: Vec<String> = tables
        .iter()
        .map(|(header, rows)| {
            if a.csv {
                to_csv(header, rows)
            } else {
                to_text(header, rows)
            }
        })
        .collect();
    print!("{}", rendered.join("\n"));
    Ok(())
}
