//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Omitted keys keep
//! the library defaults (the reference experiment setup).

use std::fmt::Write as _;

use locsched::{Error, Result, SimulationConfig};

pub const KEYS: [&str; 12] = [
    "duration_s",
    "t1_s",
    "v_min",
    "v_max",
    "v0",
    "seed",
    "alpha",
    "beta",
    "t_min_refix_s",
    "strategy",
    "methods",
    "schedule",
];

fn number<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("{value:?} is not a valid number")))
}

/// Sets one key on `cfg`. Range checks are left to `SimulationConfig::validate`.
pub fn apply(cfg: &mut SimulationConfig, key: &str, value: &str) -> Result<()> {
    let value = value.trim();
    match key {
        "duration_s" => cfg.mobility.duration_s = number(key, value)?,
        "t1_s" => cfg.mobility.t1_s = number(key, value)?,
        "v_min" => cfg.mobility.v_min = number(key, value)?,
        "v_max" => cfg.mobility.v_max = number(key, value)?,
        "v0" => cfg.mobility.v0 = number(key, value)?,
        "seed" => cfg.mobility.seed = number(key, value)?,
        "alpha" => cfg.strategy.alpha = number(key, value)?,
        "beta" => cfg.strategy.beta = number(key, value)?,
        "t_min_refix_s" => cfg.strategy.t_min_refix_s = number(key, value)?,
        "strategy" => cfg.kind = value.parse()?,
        "methods" => cfg.strategy.methods = value.parse()?,
        "schedule" => cfg.schedule = value.parse()?,
        _ => {
            return Err(Error::config(
                key,
                format!(
                    "unknown configuration key (expected one of {})",
                    KEYS.join(", ")
                ),
            ))
        }
    }
    Ok(())
}

pub fn parse(text: &str) -> Result<SimulationConfig> {
    let mut cfg = SimulationConfig::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(i + 1, format!("expected `key = value`, got {line:?}")))?;
        apply(&mut cfg, key.trim(), value)?;
    }
    Ok(cfg)
}

/// Renders `cfg` in the same format `parse` reads.
pub fn render(cfg: &SimulationConfig) -> String {
    let m = &cfg.mobility;
    let s = &cfg.strategy;
    let mut out = String::new();
    let _ = writeln!(out, "duration_s = {}", m.duration_s);
    let _ = writeln!(out, "t1_s = {}", m.t1_s);
    let _ = writeln!(out, "v_min = {}", m.v_min);
    let _ = writeln!(out, "v_max = {}", m.v_max);
    let _ = writeln!(out, "v0 = {}", m.v0);
    let _ = writeln!(out, "seed = {}", m.seed);
    let _ = writeln!(out, "alpha = {}", s.alpha);
    let _ = writeln!(out, "beta = {}", s.beta);
    let _ = writeln!(out, "t_min_refix_s = {}", s.t_min_refix_s);
    let _ = writeln!(out, "strategy = {}", cfg.kind);
    let _ = writeln!(out, "methods = {}", s.methods);
    let _ = writeln!(out, "schedule = {}", cfg.schedule);
    out
}
