use anyhow::Context;
use xl_core::formats::parse_solution;
use xl_core::validate;

use crate::{io, Failure, Outcome, ValidateArgs};

pub fn run(a: ValidateArgs) -> Outcome {
    let inst = io::read_instance(&a.instance)?;
    let parsed = parse_solution(&io::read(&a.solution)?)
        .with_context(|| format!("parsing {}", a.solution.display()))?;
    let report = validate(&inst, &parsed.solution);
    if let Ok(Some(m)) = parsed.cost_mismatch(&inst) {
        eprintln!(
            "warning: line {}: declared cost {} differs from recomputed cost {}",
            m.line, m.declared, m.recomputed
        );
    }
    if report.feasible {
        println!("FEASIBLE cost={}", report.recomputed_cost.unwrap_or(0));
        return Ok(());
    }
    println!("INFEASIBLE");
    for v in &report.violations {
        println!("  {v}");
    }
    Err(Failure::Domain(format!(
        "{} violation(s) in {}",
        report.violations.len(),
        a.solution.display()
    )))
}
