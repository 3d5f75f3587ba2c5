//! Closed-loop runs of a scheduler against a motion trace.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mobility::{generate_trace, MobilityParams, MotionTrace};
use crate::strategy::{FixDecision, Method, MethodPolicy, Scheduler, StrategyConfig};

/// Piecewise-constant accuracy requirement, left-closed at each start time.
///
/// Text form: `start:req` pairs joined by `,`.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracySchedule {
    steps: Vec<(f64, f64)>,
}

impl AccuracySchedule {
    pub fn new(steps: Vec<(f64, f64)>) -> Result<Self> {
        match steps.first() {
            None => return Err(Error::config("schedule", "schedule must not be empty")),
            Some(&(t0, _)) if t0 != 0.0 => {
                return Err(Error::config("schedule", "first start time must be 0"))
            }
            _ => {}
        }
        if steps.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::config(
                "schedule",
                "start times must be strictly increasing",
            ));
        }
        if steps.iter().any(|&(_, r)| !(r.is_finite() && r > 0.0)) {
            return Err(Error::config("schedule", "requirements must be positive"));
        }
        Ok(AccuracySchedule { steps })
    }

    pub fn constant(requirement_m: f64) -> Result<Self> {
        Self::new(vec![(0.0, requirement_m)])
    }

    pub fn steps(&self) -> &[(f64, f64)] {
        &self.steps
    }

    pub fn requirement_at(&self, t: f64) -> f64 {
        let idx = self.steps.partition_point(|&(start, _)| start <= t);
        self.steps[idx.saturating_sub(1)].1
    }

    /// First start time strictly after `t`.
    pub fn next_change_after(&self, t: f64) -> Option<f64> {
        let idx = self.steps.partition_point(|&(start, _)| start <= t);
        self.steps.get(idx).map(|&(start, _)| start)
    }
}

impl Default for AccuracySchedule {
    fn default() -> Self {
        "0:500,600:300,1200:150,1800:120,2400:80,3000:50"
            .parse()
            .expect("default schedule parses")
    }
}

impl FromStr for AccuracySchedule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut steps = Vec::new();
        for item in s.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (start, req) = item.split_once(':').ok_or_else(|| {
                Error::config(
                    "schedule",
                    format!("expected start:requirement, got {item:?}"),
                )
            })?;
            let num = |v: &str| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::config("schedule", format!("{v:?} is not a number")))
            };
            steps.push((num(start)?, num(req)?));
        }
        AccuracySchedule::new(steps)
    }
}

impl fmt::Display for AccuracySchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (start, req)) in self.steps.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{start}:{req}")?;
        }
        Ok(())
    }
}

/// Which method policy a run uses. Text form: `adaptive` or `fixed:<name>`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    #[default]
    Adaptive,
    Fixed(String),
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyKind::Adaptive => f.write_str("adaptive"),
            StrategyKind::Fixed(name) => write!(f, "fixed:{name}"),
        }
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "adaptive" => Ok(StrategyKind::Adaptive),
            other => match other.strip_prefix("fixed:") {
                Some(name) if !name.is_empty() => Ok(StrategyKind::Fixed(name.to_string())),
                _ => Err(Error::config(
                    "strategy",
                    format!("expected `adaptive` or `fixed:<method>`, got {other:?}"),
                )),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimulationConfig {
    pub mobility: MobilityParams,
    pub strategy: StrategyConfig,
    pub schedule: AccuracySchedule,
    pub kind: StrategyKind,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        self.mobility.validate()?;
        self.strategy.validate()?;
        self.policy().map(|_| ())
    }

    fn policy(&self) -> Result<MethodPolicy> {
        match &self.kind {
            StrategyKind::Adaptive => Ok(MethodPolicy::Adaptive),
            StrategyKind::Fixed(name) => self
                .strategy
                .methods
                .get(name)
                .map(|m| MethodPolicy::Fixed(m.clone()))
                .ok_or_else(|| Error::config("strategy", format!("unknown method {name:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    ScheduleChange,
    Fix,
    VelocitySample,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::ScheduleChange => "schedule_change",
            EventKind::Fix => "fix",
            EventKind::VelocitySample => "sample",
        }
    }
}

impl FromStr for EventKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "schedule_change" => Ok(EventKind::ScheduleChange),
            "fix" => Ok(EventKind::Fix),
            "sample" => Ok(EventKind::VelocitySample),
            _ => Err(Error::parse(0, format!("unknown event kind {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time_s: f64,
    pub kind: EventKind,
    /// Set for fixes only.
    pub method: Option<Method>,
    pub position_m: f64,
    pub velocity_mps: f64,
    /// Speed estimate after the event.
    pub v_e_mps: f64,
}

impl Event {
    pub fn energy_mj(&self) -> Option<f64> {
        self.method.as_ref().map(|m| m.energy_mj)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub total_energy_mj: f64,
    pub satisfaction: f64,
    pub fix_count: usize,
    pub sample_count: usize,
    pub events: Vec<Event>,
}

/// Generates the trace from `config.mobility` and runs on it.
pub fn run(config: &SimulationConfig) -> Result<RunResult> {
    config.validate()?;
    let trace = generate_trace(&config.mobility)?;
    run_on_trace(config, &trace)
}

/// Runs on a given trace; `config.mobility` is ignored and the horizon is
/// the trace's duration.
pub fn run_on_trace(config: &SimulationConfig, trace: &MotionTrace) -> Result<RunResult> {
    config.strategy.validate()?;
    let mut scheduler = Scheduler::new(config.strategy.clone(), config.policy()?)?;
    let schedule = &config.schedule;
    let horizon = f64::from(trace.duration_s());
    let mut events = Vec::new();

    let fix = |scheduler: &mut Scheduler, events: &mut Vec<Event>, t: f64| -> Result<FixDecision> {
        let v = trace.velocity_at(t)?;
        let start = scheduler.begin_epoch(t, schedule.requirement_at(t), v)?;
        events.push(Event {
            time_s: t,
            kind: EventKind::Fix,
            method: Some(start.method),
            position_m: trace.position_at(t)?,
            velocity_mps: v,
            v_e_mps: scheduler.v_e().unwrap_or(v),
        });
        Ok(start.next)
    };

    let mut next = fix(&mut scheduler, &mut events, 0.0)?;
    let mut now = 0.0;
    loop {
        let due = next.time();
        if let Some(tc) = schedule.next_change_after(now).filter(|&tc| tc <= due) {
            if tc >= horizon {
                break;
            }
            let v_e = scheduler.v_e().expect("scheduler initialized by first fix");
            events.push(Event {
                time_s: tc,
                kind: EventKind::ScheduleChange,
                method: None,
                position_m: trace.position_at(tc)?,
                velocity_mps: trace.velocity_at(tc)?,
                v_e_mps: v_e,
            });
            scheduler.on_requirement_change(tc, schedule.requirement_at(tc))?;
            next = fix(&mut scheduler, &mut events, tc)?;
            now = tc;
            continue;
        }
        if due >= horizon {
            break;
        }
        next = match next {
            FixDecision::SampleAgainAt(t) => {
                let v = trace.velocity_at(t)?;
                let decision = scheduler.on_velocity_sample(t, v)?;
                events.push(Event {
                    time_s: t,
                    kind: EventKind::VelocitySample,
                    method: None,
                    position_m: trace.position_at(t)?,
                    velocity_mps: v,
                    v_e_mps: scheduler.v_e().unwrap_or(v),
                });
                match decision {
                    FixDecision::FixNowAt(tf, _) => fix(&mut scheduler, &mut events, tf)?,
                    sample => sample,
                }
            }
            FixDecision::FixNowAt(t, _) => fix(&mut scheduler, &mut events, t)?,
        };
        now = due;
    }

    // Canonical order at shared timestamps: change, fix, sample.
    events.sort_by(|a, b| a.time_s.total_cmp(&b.time_s).then(a.kind.cmp(&b.kind)));

    let satisfaction = satisfaction_degree(&events, trace, schedule)?;
    Ok(RunResult {
        total_energy_mj: total_energy(&events),
        satisfaction,
        fix_count: events.iter().filter(|e| e.kind == EventKind::Fix).count(),
        sample_count: events
            .iter()
            .filter(|e| e.kind == EventKind::VelocitySample)
            .count(),
        events,
    })
}

pub fn total_energy(events: &[Event]) -> f64 {
    events.iter().filter_map(Event::energy_mj).sum()
}

/// Fraction of `[0, duration]` during which the last fix, charged with its
/// method's accuracy, still meets the requirement:
/// `moved since fix + accuracy <= requirement`.
///
/// Integrated exactly: between consecutive breakpoints (fixes, schedule
/// changes, whole seconds) the moved distance is linear, so each piece's
/// satisfied prefix is found in closed form.
pub fn satisfaction_degree(
    events: &[Event],
    trace: &MotionTrace,
    schedule: &AccuracySchedule,
) -> Result<f64> {
    let horizon = f64::from(trace.duration_s());
    let fixes: Vec<&Event> = events.iter().filter(|e| e.kind == EventKind::Fix).collect();
    match fixes.first() {
        Some(f) if f.time_s == 0.0 => {}
        _ => return Err(Error::InvalidState("no fix at t=0".into())),
    }
    if horizon == 0.0 {
        return Ok(1.0);
    }

    let mut satisfied = 0.0;
    for (i, f) in fixes.iter().enumerate() {
        let start = f.time_s;
        let end = fixes.get(i + 1).map_or(horizon, |n| n.time_s).min(horizon);
        if end <= start {
            continue;
        }
        let accuracy = f.method.as_ref().map_or(0.0, |m| m.accuracy_m);
        let origin = trace.position_at(start)?;
        let mut a = start;
        while a < end {
            let mut b = (a.floor() + 1.0).min(end);
            if let Some(tc) = schedule.next_change_after(a) {
                b = b.min(tc);
            }
            let slack = schedule.requirement_at(a) - accuracy;
            let moved = trace.position_at(a)? - origin;
            if moved <= slack {
                let v = trace.velocity_at(a)?;
                let reach = if v > 0.0 {
                    (slack - moved) / v
                } else {
                    f64::INFINITY
                };
                satisfied += reach.min(b - a);
            }
            a = b;
        }
    }
    Ok((satisfied / horizon).clamp(0.0, 1.0))
}
