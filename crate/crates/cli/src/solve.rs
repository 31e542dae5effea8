use std::path::Path;
use std::thread;
use std::time::Duration;

use anyhow::{anyhow, Context};
use xl_core::analytics::{write_runs, RunRecord};
use xl_core::formats::write_solution;
use xl_core::solver::{solve, SolveOutcome, SolverConfig};

use crate::{io, Failure, Outcome, SolveArgs};

pub fn run(a: SolveArgs) -> Outcome {
    let time_limit = match a.time {
        Some(t) if !(t.is_finite() && t > 0.0) => {
            return Err(Failure::Usage(anyhow!(
                "--time must be a positive number of seconds"
            )))
        }
        Some(t) => Some(Duration::from_secs_f64(t)),
        None if a.iterations.is_some() => None,
        None => Some(Duration::from_secs(60)),
    };
    if a.runs == 0 {
        return Err(Failure::Usage(anyhow!("--runs must be at least 1")));
    }
    let inst = io::read_instance(&a.instance)?;
    let stem = a
        .instance
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or(&inst.name)
        .to_string();
    io::create_dir(&a.out)?;

    let seeds: Vec<u64> = (0..u64::from(a.runs))
        .map(|i| a.seed.wrapping_add(i))
        .collect();
    let outcomes: Vec<SolveOutcome> = thread::scope(|scope| {
        let handles: Vec<_> = seeds
            .iter()
            .map(|&seed| {
                let cfg = SolverConfig {
                    time_limit,
                    max_iterations: a.iterations,
                    seed,
                    ..SolverConfig::default()
                };
                let inst = &inst;
                scope.spawn(move || solve(inst, &cfg))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect::<Result<_, _>>()
    })?;

    let mut records = Vec::new();
    for out in &outcomes {
        let seed = out.meta.seed;
        let base = format!("{stem}_seed{seed}");
        write_run(&a.out, &base, &inst, out)?;
        println!(
            "{base}.sol cost={} routes={}",
            out.cost,
            out.solution.n_routes()
        );
        records.push(RunRecord {
            instance: inst.name.clone(),
            method: a.method.clone(),
            seed,
            elapsed_s: out.meta.elapsed_s,
            cost: Some(out.cost),
        });
    }
    io::write(&a.out.join("runs.csv"), &write_runs(&records))?;
    Ok(())
}

fn write_run(
    dir: &Path,
    base: &str,
    inst: &xl_core::Instance,
    out: &SolveOutcome,
) -> anyhow::Result<()> {
    let text =
        write_solution(inst, &out.solution).context("solver returned an invalid solution")?;
    io::write(&dir.join(format!("{base}.sol")), &text)?;
    let meta = serde_json::to_string_pretty(&out.meta)?;
    io::write(&dir.join(format!("{base}.json")), &(meta + "\n"))
}
