//! Lead-time scoring of a best-known-solution challenge.
//!
//! Each instance starts with an initial BKS held by [`ORGANIZERS`] at day 0.
//! A team that improves the BKS earns one day per day its solution stays
//! unbeaten, and whoever holds the final BKS earns an extra bonus.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

use crate::model::{validate, Instance, Solution, ValidationReport};

pub const ORGANIZERS: &str = "ORGANIZERS";

/// Event indices are 0-based positions in the input; messages count from 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChallengeError {
    #[error("horizon must be positive, got {0}")]
    BadHorizon(f64),
    #[error("bonus must be non-negative, got {0}")]
    BadBonus(f64),
    #[error("event {}: unknown instance {instance:?}", .index + 1)]
    UnknownInstance { index: usize, instance: String },
    #[error("event {}: time {time} outside [0, {horizon}]", .index + 1)]
    TimeOutOfRange {
        index: usize,
        time: f64,
        horizon: f64,
    },
    #[error("event {}: no instance data loaded for {instance:?}", .index + 1)]
    MissingInstance { index: usize, instance: String },
    #[error("event log line {line}: {message}")]
    Log { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Payload {
    Solution(Solution),
    /// A cost verified elsewhere; accepted on the strength of its value.
    Cost(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubmissionEvent {
    pub team: String,
    pub instance: String,
    /// Days since the start of the challenge.
    pub time: f64,
    pub payload: Payload,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChallengeConfig {
    pub horizon: f64,
    pub bonus: f64,
    pub initial_bks: BTreeMap<String, u64>,
}

impl ChallengeConfig {
    pub fn new(initial_bks: BTreeMap<String, u64>) -> Self {
        Self {
            horizon: 30.0,
            bonus: 5.0,
            initial_bks,
        }
    }

    fn check(&self) -> Result<(), ChallengeError> {
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(ChallengeError::BadHorizon(self.horizon));
        }
        if !(self.bonus >= 0.0 && self.bonus.is_finite()) {
            return Err(ChallengeError::BadBonus(self.bonus));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Accepted { cost: u64 },
    Infeasible(ValidationReport),
    NotImproving { cost: u64, best: u64 },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted { cost } => write!(f, "accepted at cost {cost}"),
            Verdict::Infeasible(report) => {
                write!(f, "infeasible, {} violation(s)", report.violations.len())?;
                if let Some(v) = report.violations.first() {
                    write!(f, ", first: {v}")?;
                }
                Ok(())
            }
            Verdict::NotImproving { cost, best } => {
                write!(f, "not improving: cost {cost}, current best {best}")
            }
        }
    }
}

/// Accepts a submission only if it is feasible and strictly cheaper than
/// `current_best`.
pub fn verify_submission(
    inst: Option<&Instance>,
    payload: &Payload,
    current_best: u64,
) -> Option<Verdict> {
    let cost = match payload {
        Payload::Cost(c) => *c,
        Payload::Solution(sol) => {
            let report = validate(inst?, sol);
            if !report.feasible {
                return Some(Verdict::Infeasible(report));
            }
            report
                .recomputed_cost
                .expect("feasible solutions have a cost")
        }
    };
    Some(if cost < current_best {
        Verdict::Accepted { cost }
    } else {
        Verdict::NotImproving {
            cost,
            best: current_best,
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimelineEntry {
    pub time: f64,
    pub team: String,
    pub cost: u64,
}

/// BKS history of one instance; the first entry is the initial BKS.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timeline {
    pub entries: Vec<TimelineEntry>,
}

impl Timeline {
    fn initial(cost: u64) -> Self {
        Self {
            entries: vec![TimelineEntry {
                time: 0.0,
                team: ORGANIZERS.to_string(),
                cost,
            }],
        }
    }

    pub fn best(&self) -> &TimelineEntry {
        self.entries.last().expect("timelines are never empty")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Rejection {
    /// Position of the event in the input log.
    pub index: usize,
    pub team: String,
    pub instance: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub timelines: BTreeMap<String, Timeline>,
    pub rejected: Vec<Rejection>,
}

/// Replays events in time order; events with equal times keep their input
/// order. Solution payloads are checked against `instances`.
pub fn replay(
    events: &[SubmissionEvent],
    cfg: &ChallengeConfig,
    instances: &BTreeMap<String, Instance>,
) -> Result<Replay, ChallengeError> {
    cfg.check()?;
    for (index, ev) in events.iter().enumerate() {
        if !cfg.initial_bks.contains_key(&ev.instance) {
            return Err(ChallengeError::UnknownInstance {
                index,
                instance: ev.instance.clone(),
            });
        }
        if !(0.0..=cfg.horizon).contains(&ev.time) {
            return Err(ChallengeError::TimeOutOfRange {
                index,
                time: ev.time,
                horizon: cfg.horizon,
            });
        }
    }
    let mut order: Vec<usize> = (0..events.len()).collect();
    order.sort_by(|&a, &b| events[a].time.total_cmp(&events[b].time));

    let mut timelines: BTreeMap<String, Timeline> = cfg
        .initial_bks
        .iter()
        .map(|(name, &cost)| (name.clone(), Timeline::initial(cost)))
        .collect();
    let mut rejected = Vec::new();
    for index in order {
        let ev = &events[index];
        let timeline = timelines.get_mut(&ev.instance).expect("checked above");
        let verdict = verify_submission(
            instances.get(&ev.instance),
            &ev.payload,
            timeline.best().cost,
        )
        .ok_or_else(|| ChallengeError::MissingInstance {
            index,
            instance: ev.instance.clone(),
        })?;
        match verdict {
            Verdict::Accepted { cost } => timeline.entries.push(TimelineEntry {
                time: ev.time,
                team: ev.team.clone(),
                cost,
            }),
            verdict => rejected.push(Rejection {
                index,
                team: ev.team.clone(),
                instance: ev.instance.clone(),
                verdict,
            }),
        }
    }
    Ok(Replay {
        timelines,
        rejected,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InstanceScore {
    pub team: String,
    pub instance: String,
    pub lead_days: f64,
    pub bonus: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeamTotal {
    pub team: String,
    pub lead_days: f64,
    pub bonus: f64,
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreReport {
    /// One row per (team, instance) with an accepted improvement, ordered
    /// by instance then team.
    pub per_instance: Vec<InstanceScore>,
    /// Highest total first, ties by team name.
    pub totals: Vec<TeamTotal>,
    /// Final BKS holder per instance, `ORGANIZERS` if never improved.
    pub holders: BTreeMap<String, TimelineEntry>,
}

impl ScoreReport {
    pub fn total_of(&self, team: &str) -> f64 {
        self.totals
            .iter()
            .find(|t| t.team == team)
            .map_or(0.0, |t| t.total)
    }
}

pub fn score(timelines: &BTreeMap<String, Timeline>, cfg: &ChallengeConfig) -> ScoreReport {
    let mut cells: BTreeMap<(String, String), (f64, f64)> = BTreeMap::new();
    let mut holders = BTreeMap::new();
    for (instance, tl) in timelines {
        holders.insert(instance.clone(), tl.best().clone());
        for (i, e) in tl.entries.iter().enumerate().skip(1) {
            let (lead, bonus) = match tl.entries.get(i + 1) {
                Some(next) => (next.time - e.time, 0.0),
                None => (cfg.horizon - e.time, cfg.bonus),
            };
            let cell = cells.entry((instance.clone(), e.team.clone())).or_default();
            cell.0 += lead;
            cell.1 += bonus;
        }
    }

    let mut totals: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    let per_instance = cells
        .into_iter()
        .map(|((instance, team), (lead_days, bonus))| {
            let t = totals.entry(team.clone()).or_default();
            t.0 += lead_days;
            t.1 += bonus;
            InstanceScore {
                team,
                instance,
                lead_days,
                bonus,
            }
        })
        .collect();
    let mut totals: Vec<TeamTotal> = totals
        .into_iter()
        .map(|(team, (lead_days, bonus))| TeamTotal {
            team,
            lead_days,
            bonus,
            total: lead_days + bonus,
        })
        .collect();
    totals.sort_by(|a, b| {
        b.total
            .total_cmp(&a.total)
            .then_with(|| a.team.cmp(&b.team))
    });
    ScoreReport {
        per_instance,
        totals,
        holders,
    }
}

/// Replays and scores in one step.
pub fn run_challenge(
    events: &[SubmissionEvent],
    cfg: &ChallengeConfig,
    instances: &BTreeMap<String, Instance>,
) -> Result<(Replay, ScoreReport), ChallengeError> {
    let replay = replay(events, cfg, instances)?;
    let report = score(&replay.timelines, cfg);
    Ok((replay, report))
}

/// Second field of an event log line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LoggedPayload {
    Cost(u64),
    /// Solution file, relative paths being relative to the log.
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoggedEvent {
    pub line: usize,
    pub time: f64,
    pub team: String,
    pub instance: String,
    pub payload: LoggedPayload,
}

/// Parses a day offset: a plain number of days (`13`, `2.5`) or an ISO 8601
/// duration built from W, D, H, M and S units (`P13D`, `P1DT12H`, `PT36H`).
pub fn parse_day_offset(text: &str) -> Option<f64> {
    let t = text.trim();
    if let Ok(days) = t.parse::<f64>() {
        return days.is_finite().then_some(days);
    }
    let rest = t.strip_prefix('P').or_else(|| t.strip_prefix('p'))?;
    let (date, time) = match rest.split_once(['T', 't']) {
        Some((d, t)) if !t.is_empty() => (d, Some(t)),
        Some(_) => return None,
        None => (rest, None),
    };
    let mut days = 0.0;
    let mut any = false;
    let mut scan = |part: &str, units: &[(char, f64)]| -> Option<()> {
        let mut num = String::new();
        let mut next_unit = 0;
        for ch in part.chars() {
            if ch.is_ascii_digit() || ch == '.' {
                num.push(ch);
                continue;
            }
            let ch = ch.to_ascii_uppercase();
            let k = units[next_unit..].iter().position(|&(u, _)| u == ch)? + next_unit;
            days += num.parse::<f64>().ok()? * units[k].1;
            num.clear();
            next_unit = k + 1;
            any = true;
        }
        num.is_empty().then_some(())
    };
    scan(date, &[('W', 7.0), ('D', 1.0)])?;
    if let Some(time) = time {
        scan(
            time,
            &[('H', 1.0 / 24.0), ('M', 1.0 / 1440.0), ('S', 1.0 / 86400.0)],
        )?;
    }
    any.then_some(days)
}

/// Reads an event log: CSV lines `day_offset,team,instance,payload` where
/// the payload is an integer cost or a solution file path. Lines starting
/// with `#` and blank lines are skipped.
pub fn parse_event_log(text: &str) -> Result<Vec<LoggedEvent>, ChallengeError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| ChallengeError::Log { line, message };
        let rec = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(trimmed.as_bytes())
            .records()
            .next()
            .expect("non-empty line yields a record")
            .map_err(|e| err(e.to_string()))?;
        if rec.len() != 4 {
            return Err(err(format!("expected 4 fields, found {}", rec.len())));
        }
        let time = parse_day_offset(&rec[0])
            .ok_or_else(|| err(format!("bad day offset {:?}", &rec[0])))?;
        if rec[1].is_empty() || rec[2].is_empty() || rec[3].is_empty() {
            return Err(err("empty field".into()));
        }
        let payload = match rec[3].parse::<u64>() {
            Ok(cost) => LoggedPayload::Cost(cost),
            Err(_) => LoggedPayload::Path(PathBuf::from(&rec[3])),
        };
        out.push(LoggedEvent {
            line,
            time,
            team: rec[1].to_string(),
            instance: rec[2].to_string(),
            payload,
        });
    }
    Ok(out)
}

/// `team,instance,lead_days,bonus`
pub fn write_instance_scores_csv(report: &ScoreReport) -> String {
    let mut out = String::from("team,instance,lead_days,bonus\n");
    for s in &report.per_instance {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.team, s.instance, s.lead_days, s.bonus
        ));
    }
    out
}

/// `team,lead_days,bonus,total`
pub fn write_totals_csv(report: &ScoreReport) -> String {
    let mut out = String::from("team,lead_days,bonus,total\n");
    for t in &report.totals {
        out.push_str(&format!(
            "{},{},{},{}\n",
            t.team, t.lead_days, t.bonus, t.total
        ));
    }
    out
}
