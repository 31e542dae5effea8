use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, Context};
use xl_core::challenge::{
    parse_event_log, run_challenge, write_instance_scores_csv, write_totals_csv, ChallengeConfig,
    LoggedPayload, Payload, SubmissionEvent,
};
use xl_core::formats::parse_solution;
use xl_core::Instance;

use crate::{io, Failure, Outcome, ScoreArgs};

pub fn run(a: ScoreArgs) -> Outcome {
    let bks = io::read_bks(a.bks.as_deref())?;
    let log =
        parse_event_log(&io::read(&a.events)?).with_context(|| a.events.display().to_string())?;
    let log_dir = a.events.parent().unwrap_or(Path::new("."));

    let mut instances: BTreeMap<String, Instance> = BTreeMap::new();
    let mut events = Vec::with_capacity(log.len());
    for ev in log {
        let payload = match &ev.payload {
            LoggedPayload::Cost(c) => Payload::Cost(*c),
            LoggedPayload::Path(p) => {
                if !instances.contains_key(&ev.instance) && bks.entries.contains_key(&ev.instance) {
                    let Some(dir) = &a.instances else {
                        return Err(Failure::Usage(anyhow!(
                            "line {}: solution payloads need --instances",
                            ev.line
                        )));
                    };
                    let inst = io::read_instance(&dir.join(format!("{}.vrp", ev.instance)))?;
                    instances.insert(ev.instance.clone(), inst);
                }
                let path = log_dir.join(p);
                let parsed = parse_solution(&io::read(&path)?)
                    .with_context(|| format!("line {}: parsing {}", ev.line, path.display()))?;
                Payload::Solution(parsed.solution)
            }
        };
        events.push(SubmissionEvent {
            team: ev.team,
            instance: ev.instance,
            time: ev.time,
            payload,
        });
    }

    let cfg = ChallengeConfig {
        horizon: a.horizon,
        bonus: a.bonus,
        initial_bks: bks.costs(),
    };
    let (replay, report) = run_challenge(&events, &cfg, &instances)?;
    for r in &replay.rejected {
        eprintln!(
            "rejected event {} ({} on {}): {}",
            r.index + 1,
            r.team,
            r.instance,
            r.verdict
        );
    }
    let totals = write_totals_csv(&report);
    print!("{totals}");
    if let Some(out) = &a.out {
        io::create_dir(out)?;
        io::write(&out.join("scores.csv"), &write_instance_scores_csv(&report))?;
        io::write(&out.join("totals.csv"), &totals)?;
    }
    Ok(())
}
