use std::time::Duration;

use anyhow::{anyhow, Context};
use xl_core::formats::write_instance;
use xl_core::generator::{generate_instance, GenConfig, GenSpec};
use xl_core::manifest::{parse_manifest, xl_set, ManifestEntry};

use crate::{io, Failure, GenerateArgs, Outcome};

fn inline_spec(a: &GenerateArgs) -> anyhow::Result<GenSpec> {
    let need = |v: &Option<String>, flag: &str| {
        v.clone()
            .ok_or_else(|| anyhow!("--{flag} is required without --manifest"))
    };
    Ok(GenSpec {
        n_total: a
            .n_total
            .ok_or_else(|| anyhow!("--n-total is required without --manifest"))?,
        depot: need(&a.depot, "depot")?.parse()?,
        customers: need(&a.customers, "customers")?.parse()?,
        demand: need(&a.demand, "demand")?.parse()?,
        route_class: need(&a.route, "route")?.parse()?,
        seed: a.seed.unwrap_or(1),
    })
}

pub fn run(a: GenerateArgs) -> Outcome {
    let specs: Vec<GenSpec> = if a.manifest.is_some() || a.xl_set {
        let entries: Vec<ManifestEntry> = match &a.manifest {
            Some(path) => {
                parse_manifest(&io::read(path)?).with_context(|| path.display().to_string())?
            }
            None => xl_set(),
        };
        let offset = a.seed.unwrap_or(0);
        entries
            .into_iter()
            .map(|e| GenSpec {
                seed: e.spec.seed.wrapping_add(offset),
                ..e.spec
            })
            .collect()
    } else {
        vec![inline_spec(&a)?]
    };
    if !(a.kmin_budget.is_finite() && a.kmin_budget >= 0.0) {
        return Err(Failure::Usage(anyhow!(
            "--kmin-budget must be a non-negative number of seconds"
        )));
    }
    let cfg = GenConfig {
        binpack_budget: Duration::from_secs_f64(a.kmin_budget),
        ..GenConfig::default()
    };

    io::create_dir(&a.out)?;
    let mut unproven = Vec::new();
    for spec in &specs {
        let (inst, trace) = generate_instance(spec, &cfg).with_context(|| spec.to_string())?;
        let stem = format!("{}_{}", inst.name, spec.seed);
        io::write(&a.out.join(format!("{stem}.vrp")), &write_instance(&inst))?;
        let sidecar = serde_json::to_string_pretty(&trace)?;
        io::write(&a.out.join(format!("{stem}.trace.json")), &(sidecar + "\n"))?;
        println!(
            "{stem}.vrp k_min={} proven={}",
            inst.k_min, inst.k_min_proven
        );
        if !inst.k_min_proven {
            unproven.push(stem);
        }
    }
    if unproven.is_empty() {
        Ok(())
    } else {
        Err(Failure::Domain(format!(
            "minimum fleet size not proven for: {}",
            unproven.join(", ")
        )))
    }
}
