//! Fix scheduling and localization method selection.
//!
//! A [`Scheduler`] is driven by two kinds of input: fixes (which open an
//! epoch) and velocity samples (which advance the distance estimate within
//! an epoch). Each call returns the next thing the caller should do as a
//! [`FixDecision`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Relative slack used when comparing the accumulated distance estimate to
/// the epoch budget. Absorbs rounding in `k * (budget * beta)` sums so that
/// a constant-speed epoch always closes after exactly `ceil(1 / beta)`
/// samples.
pub const BUDGET_REL_EPS: f64 = 1e-9;

/// A positioning technique: worst-case error and energy per fix.
#[derive(Debug, Clone, PartialEq)]
pub struct Method {
    pub name: String,
    pub accuracy_m: f64,
    pub energy_mj: f64,
}

impl Method {
    pub fn new(name: impl Into<String>, accuracy_m: f64, energy_mj: f64) -> Result<Self> {
        let name = name.into();
        if name.is_empty() || name.contains([':', ';', ',']) {
            return Err(Error::config(
                "methods",
                format!("bad method name {name:?}"),
            ));
        }
        if !(accuracy_m.is_finite() && accuracy_m > 0.0) {
            return Err(Error::config(
                "methods",
                format!("{name}: accuracy must be positive"),
            ));
        }
        if !(energy_mj.is_finite() && energy_mj > 0.0) {
            return Err(Error::config(
                "methods",
                format!("{name}: energy must be positive"),
            ));
        }
        Ok(Method {
            name,
            accuracy_m,
            energy_mj,
        })
    }
}

/// A non-empty set of methods with unique names.
///
/// Text form: `name:accuracy_m:energy_mJ` triples joined by `;`.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSet(Vec<Method>);

impl MethodSet {
    pub fn new(methods: Vec<Method>) -> Result<Self> {
        if methods.is_empty() {
            return Err(Error::config("methods", "method set must not be empty"));
        }
        for (i, m) in methods.iter().enumerate() {
            if methods[..i].iter().any(|o| o.name == m.name) {
                return Err(Error::config(
                    "methods",
                    format!("duplicate method name {:?}", m.name),
                ));
            }
        }
        Ok(MethodSet(methods))
    }

    pub fn get(&self, name: &str) -> Option<&Method> {
        self.0.iter().find(|m| m.name == name)
    }

    /// Smallest accuracy; ties go to the lexicographically smaller name.
    pub fn most_accurate(&self) -> &Method {
        self.0
            .iter()
            .min_by(|a, b| {
                a.accuracy_m
                    .total_cmp(&b.accuracy_m)
                    .then_with(|| a.name.cmp(&b.name))
            })
            .expect("method set is non-empty")
    }

    pub fn as_slice(&self) -> &[Method] {
        &self.0
    }
}

impl Default for MethodSet {
    fn default() -> Self {
        "gps:10:1425;wifi:50:545;gsm:150:20"
            .parse()
            .expect("default method set parses")
    }
}

impl FromStr for MethodSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut methods = Vec::new();
        for item in s.split(';').map(str::trim).filter(|i| !i.is_empty()) {
            let parts: Vec<&str> = item.split(':').map(str::trim).collect();
            let [name, acc, energy] = parts[..] else {
                return Err(Error::config(
                    "methods",
                    format!("expected name:accuracy_m:energy_mJ, got {item:?}"),
                ));
            };
            let num = |field: &str, what: &str| {
                field.parse::<f64>().map_err(|_| {
                    Error::config(
                        "methods",
                        format!("{name}: {what} {field:?} is not a number"),
                    )
                })
            };
            methods.push(Method::new(
                name,
                num(acc, "accuracy")?,
                num(energy, "energy")?,
            )?);
        }
        MethodSet::new(methods)
    }
}

impl fmt::Display for MethodSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{}:{}:{}", m.name, m.accuracy_m, m.energy_mj)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyConfig {
    /// EWMA weight on the newest velocity sample.
    pub alpha: f64,
    /// Fraction of the coarse interval between velocity samples.
    pub beta: f64,
    pub methods: MethodSet,
    /// Re-fix period when no method can meet the requirement.
    pub t_min_refix_s: f64,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            alpha: 0.5,
            beta: 1.0,
            methods: MethodSet::default(),
            t_min_refix_s: 1.0,
        }
    }
}

impl StrategyConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return Err(Error::config("beta", "beta must satisfy 0 < beta ≤ 1"));
        }
        if !(self.t_min_refix_s.is_finite() && self.t_min_refix_s > 0.0) {
            return Err(Error::config(
                "t_min_refix_s",
                "t_min_refix_s must be positive",
            ));
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::config("alpha", "alpha must satisfy 0 < alpha ≤ 1"))
    }
}

/// `alpha * v_new + (1 - alpha) * v_e_prev`
pub fn ewma_update(v_e_prev: f64, v_new: f64, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    Ok(alpha * v_new + (1.0 - alpha) * v_e_prev)
}

/// Energy per second of keeping the requirement with `method`: its fix cost
/// divided by the time the estimated speed needs to use up the slack
/// `a_t - accuracy`. `None` if the method cannot meet `a_t` at all.
pub fn cost_rate(method: &Method, a_t: f64, v_e: f64) -> Option<f64> {
    if method.accuracy_m < a_t {
        Some(method.energy_mj / ((a_t - method.accuracy_m) / v_e))
    } else {
        None
    }
}

/// The eligible method with the lowest [`cost_rate`]. Ties go to the more
/// accurate method, then to the smaller name. `Ok(None)` when no method is
/// eligible.
pub fn select_method(methods: &[Method], a_t: f64, v_e: f64) -> Result<Option<&Method>> {
    if methods.is_empty() {
        return Err(Error::config("methods", "method set must not be empty"));
    }
    let best = methods
        .iter()
        .filter_map(|m| cost_rate(m, a_t, v_e).map(|rate| (rate, m)))
        .min_by(|(ra, a), (rb, b)| {
            ra.total_cmp(rb)
                .then_with(|| a.accuracy_m.total_cmp(&b.accuracy_m))
                .then_with(|| a.name.cmp(&b.name))
        })
        .map(|(_, m)| m);
    Ok(best)
}

/// How the method for each fix is chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodPolicy {
    /// Minimum cost rate over the configured set.
    Adaptive,
    /// Always the given method; the scheduling loop is unchanged.
    Fixed(Method),
}

#[derive(Debug, Clone, PartialEq)]
pub enum FixDecision {
    SampleAgainAt(f64),
    FixNowAt(f64, Method),
}

impl FixDecision {
    pub fn time(&self) -> f64 {
        match self {
            FixDecision::SampleAgainAt(t) | FixDecision::FixNowAt(t, _) => *t,
        }
    }
}

/// Live state of the current epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct SchedulerState {
    pub v_e: f64,
    /// Estimated distance moved since the epoch's fix.
    pub r_i: f64,
    /// `epoch_requirement_m - current_method.accuracy_m`; non-positive only
    /// in the fallback regime.
    pub budget_m: f64,
    /// Coarse interval, frozen at the fix.
    pub t_s: f64,
    pub last_fix_time: f64,
    pub current_method: Method,
    pub epoch_requirement_m: f64,
    /// Velocity samples taken in this epoch.
    pub samples: u32,
    pub last_sample_time: Option<f64>,
    /// No method met the requirement; re-fixing on a fixed period.
    pub fallback: bool,
}

impl SchedulerState {
    fn sample_interval(&self, beta: f64) -> f64 {
        self.t_s * beta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochStart {
    /// Method used for the fix that opens the epoch.
    pub method: Method,
    pub next: FixDecision,
}

#[derive(Debug, Clone)]
pub struct Scheduler {
    cfg: StrategyConfig,
    policy: MethodPolicy,
    state: Option<SchedulerState>,
}

impl Scheduler {
    pub fn new(cfg: StrategyConfig, policy: MethodPolicy) -> Result<Self> {
        cfg.validate()?;
        Ok(Scheduler {
            cfg,
            policy,
            state: None,
        })
    }

    pub fn config(&self) -> &StrategyConfig {
        &self.cfg
    }

    pub fn state(&self) -> Option<&SchedulerState> {
        self.state.as_ref()
    }

    pub fn v_e(&self) -> Option<f64> {
        self.state.as_ref().map(|s| s.v_e)
    }

    fn choose(&self, a_t: f64, v_e: f64) -> Result<Option<Method>> {
        Ok(match &self.policy {
            MethodPolicy::Adaptive => {
                select_method(self.cfg.methods.as_slice(), a_t, v_e)?.cloned()
            }
            MethodPolicy::Fixed(m) => (m.accuracy_m < a_t).then(|| m.clone()),
        })
    }

    fn fallback_method(&self) -> Method {
        match &self.policy {
            MethodPolicy::Adaptive => self.cfg.methods.most_accurate().clone(),
            MethodPolicy::Fixed(m) => m.clone(),
        }
    }

    /// Opens an epoch with a fix at `t_fix` under requirement `a_t`.
    ///
    /// The speed read at the fix is folded into the estimate unless the same
    /// instant's sample was already folded by [`Self::on_velocity_sample`]
    /// (a sample-triggered fix reuses that sample).
    pub fn begin_epoch(&mut self, t_fix: f64, a_t: f64, v_sample: f64) -> Result<EpochStart> {
        if !(a_t.is_finite() && a_t > 0.0) {
            return Err(Error::config("schedule", "requirement must be positive"));
        }
        if !(v_sample.is_finite() && v_sample > 0.0) {
            return Err(Error::InvalidState(format!(
                "velocity sample {v_sample} at t={t_fix} must be positive"
            )));
        }
        let v_e = match &self.state {
            None => v_sample,
            Some(s) if s.last_sample_time == Some(t_fix) => s.v_e,
            Some(s) => ewma_update(s.v_e, v_sample, self.cfg.alpha)?,
        };

        let (method, fallback) = match self.choose(a_t, v_e)? {
            Some(m) => (m, false),
            None => (self.fallback_method(), true),
        };
        let budget_m = a_t - method.accuracy_m;
        let t_s = if fallback {
            self.cfg.t_min_refix_s
        } else {
            budget_m / v_e
        };
        let state = SchedulerState {
            v_e,
            r_i: 0.0,
            budget_m,
            t_s,
            last_fix_time: t_fix,
            current_method: method.clone(),
            epoch_requirement_m: a_t,
            samples: 0,
            last_sample_time: None,
            fallback,
        };
        let next = if fallback {
            FixDecision::FixNowAt(t_fix + self.cfg.t_min_refix_s, method.clone())
        } else {
            FixDecision::SampleAgainAt(t_fix + state.sample_interval(self.cfg.beta))
        };
        self.state = Some(state);
        Ok(EpochStart { method, next })
    }

    /// Folds the speed sampled at `t` into the estimate and advances the
    /// distance estimate by one sampling interval.
    pub fn on_velocity_sample(&mut self, t: f64, v_sample: f64) -> Result<FixDecision> {
        let beta = self.cfg.beta;
        let alpha = self.cfg.alpha;
        let state = self
            .state
            .as_mut()
            .ok_or_else(|| Error::InvalidState("velocity sample before the first fix".into()))?;
        if state.fallback {
            return Err(Error::InvalidState(
                "no velocity sampling in the fallback regime".into(),
            ));
        }
        if !(v_sample.is_finite() && v_sample > 0.0) {
            return Err(Error::InvalidState(format!(
                "velocity sample {v_sample} at t={t} must be positive"
            )));
        }
        let interval = state.sample_interval(beta);
        let expected = state.last_fix_time + f64::from(state.samples + 1) * interval;
        if (t - expected).abs() > 1e-9 * expected.abs().max(1.0) {
            return Err(Error::InvalidState(format!(
                "sample at t={t}, expected t={expected}"
            )));
        }

        state.v_e = ewma_update(state.v_e, v_sample, alpha)?;
        state.r_i += state.v_e * interval;
        state.samples += 1;
        state.last_sample_time = Some(t);

        if state.r_i < state.budget_m * (1.0 - BUDGET_REL_EPS) {
            let next = state.last_fix_time + f64::from(state.samples + 1) * interval;
            Ok(FixDecision::SampleAgainAt(next))
        } else {
            Ok(FixDecision::FixNowAt(t, state.current_method.clone()))
        }
    }

    /// The requirement changed to `a_t` at `t`: pending samples are dropped
    /// and a fix is due immediately. The caller opens the new epoch with
    /// [`Self::begin_epoch`] at the same instant.
    pub fn on_requirement_change(&self, t: f64, a_t: f64) -> Result<FixDecision> {
        let state = self
            .state
            .as_ref()
            .ok_or_else(|| Error::InvalidState("requirement change before the first fix".into()))?;
        let method = match self.choose(a_t, state.v_e)? {
            Some(m) => m,
            None => self.fallback_method(),
        };
        Ok(FixDecision::FixNowAt(t, method))
    }
}
