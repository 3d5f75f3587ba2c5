//! Synthetic one-dimensional mobility traces.
//!
//! Speed changes by a random acceleration in {-1, 0, +1} m/s² every `t1_s`
//! seconds and is held constant in between. The band `[v_min, v_max]` is
//! reflecting: an acceleration is only admissible if it keeps the speed
//! inside the band.
//!
//! # Randomness
//!
//! Traces are driven by [`ChaCha8Rng`] seeded through
//! `SeedableRng::seed_from_u64(seed)`. Every acceleration event consumes
//! exactly one `next_u64()` draw, and the admissible acceleration is picked
//! as `draw % n` over the admissible set listed in ascending order
//! (`-1, 0, +1` with the inadmissible entries removed). Seconds without an
//! acceleration event consume nothing. The bias of the modulo reduction for
//! `n <= 3` is below 2^-62 and is accepted in exchange for the fixed draw
//! count.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityParams {
    pub duration_s: u32,
    /// Acceleration change period.
    pub t1_s: u32,
    pub v_min: f64,
    pub v_max: f64,
    pub v0: f64,
    pub seed: u64,
}

impl Default for MobilityParams {
    fn default() -> Self {
        MobilityParams {
            duration_s: 3600,
            t1_s: 3,
            v_min: 1.0,
            v_max: 10.0,
            v0: 1.0,
            seed: 1,
        }
    }
}

impl MobilityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.v_min.is_finite() && self.v_min >= 1.0) {
            return Err(Error::config("v_min", "v_min must be at least 1 m/s"));
        }
        if !(self.v_max.is_finite() && self.v_max >= self.v_min) {
            return Err(Error::config("v_max", "v_max must be at least v_min"));
        }
        if !(self.v0 >= self.v_min && self.v0 <= self.v_max) {
            return Err(Error::config("v0", "v0 must lie within [v_min, v_max]"));
        }
        if self.t1_s == 0 {
            return Err(Error::config("t1_s", "t1_s must be at least 1"));
        }
        Ok(())
    }
}

/// Draws the acceleration applied at an acceleration-change instant.
pub fn next_acceleration<R: RngCore>(
    v_prev: f64,
    params: &MobilityParams,
    rng: &mut R,
) -> Result<i8> {
    if !(v_prev >= params.v_min && v_prev <= params.v_max) {
        return Err(Error::InvalidState(format!(
            "velocity {v_prev} outside [{}, {}]",
            params.v_min, params.v_max
        )));
    }
    let mut admissible = [0i8; 3];
    let mut n = 0;
    for a in [-1i8, 0, 1] {
        let v = v_prev + f64::from(a);
        if v >= params.v_min && v <= params.v_max {
            admissible[n] = a;
            n += 1;
        }
    }
    let draw = rng.next_u64();
    Ok(admissible[(draw % n as u64) as usize])
}

/// A per-second piecewise-constant speed profile.
///
/// `velocities[t]` holds on `[t, t + 1)`. A zero-length trace still carries
/// the initial speed so that queries at `t = 0` are defined.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionTrace {
    duration_s: u32,
    velocities: Vec<f64>,
    // cumulative[k] = distance covered over [0, k]
    cumulative: Vec<f64>,
}

impl MotionTrace {
    /// Builds a trace from explicit per-second speeds. The horizon is the
    /// number of entries.
    pub fn from_velocities(velocities: Vec<f64>) -> Result<Self> {
        if velocities.is_empty() {
            return Err(Error::config("velocities", "trace must not be empty"));
        }
        if let Some(v) = velocities.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::config(
                "velocities",
                format!("velocity {v} must be finite and positive"),
            ));
        }
        let duration_s = velocities.len() as u32;
        Ok(Self::with_duration(duration_s, velocities))
    }

    pub fn constant(velocity: f64, duration_s: u32) -> Result<Self> {
        let mut trace = Self::from_velocities(vec![velocity; duration_s.max(1) as usize])?;
        trace.duration_s = duration_s;
        Ok(trace)
    }

    fn with_duration(duration_s: u32, velocities: Vec<f64>) -> Self {
        let mut cumulative = Vec::with_capacity(velocities.len() + 1);
        let mut acc = 0.0;
        cumulative.push(acc);
        for v in &velocities {
            acc += v;
            cumulative.push(acc);
        }
        MotionTrace {
            duration_s,
            velocities,
            cumulative,
        }
    }

    pub fn duration_s(&self) -> u32 {
        self.duration_s
    }

    pub fn velocities(&self) -> &[f64] {
        &self.velocities
    }

    fn check_time(&self, t: f64) -> Result<()> {
        let hi = f64::from(self.duration_s);
        if t >= 0.0 && t <= hi {
            Ok(())
        } else {
            Err(Error::Domain {
                what: "t",
                value: t,
                lo: 0.0,
                hi,
            })
        }
    }

    /// Speed at time `t`; integer instants belong to the second they open.
    pub fn velocity_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let k = (t.floor() as usize).min(self.velocities.len() - 1);
        Ok(self.velocities[k])
    }

    /// Exact distance covered over `[0, t]`.
    pub fn position_at(&self, t: f64) -> Result<f64> {
        self.check_time(t)?;
        let k = t.floor() as usize;
        if k >= self.velocities.len() {
            return Ok(self.cumulative[self.velocities.len()]);
        }
        Ok(self.cumulative[k] + self.velocities[k] * (t - k as f64))
    }

    /// Distance covered over `[t0, t1]`, `t0 <= t1`.
    pub fn distance(&self, t0: f64, t1: f64) -> Result<f64> {
        Ok(self.position_at(t1)? - self.position_at(t0)?)
    }
}

pub fn generate_trace(params: &MobilityParams) -> Result<MotionTrace> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let len = params.duration_s.max(1) as usize;
    let mut velocities = Vec::with_capacity(len);
    velocities.push(params.v0);
    for t in 1..len {
        let prev = velocities[t - 1];
        let v = if (t as u32).is_multiple_of(params.t1_s) {
            prev + f64::from(next_acceleration(prev, params, &mut rng)?)
        } else {
            prev
        };
        velocities.push(v);
    }
    Ok(MotionTrace::with_duration(params.duration_s, velocities))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(duration_s: u32, t1_s: u32, v0: f64, seed: u64) -> MobilityParams {
        MobilityParams {
            duration_s,
            t1_s,
            v0,
            seed,
            ..MobilityParams::default()
        }
    }

    #[test]
    fn acceleration_respects_band_edges() {
        let p = MobilityParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..1000 {
            assert!(matches!(
                next_acceleration(1.0, &p, &mut rng).unwrap(),
                0 | 1
            ));
            assert!(matches!(
                next_acceleration(10.0, &p, &mut rng).unwrap(),
                -1..=0
            ));
            assert!(matches!(
                next_acceleration(5.0, &p, &mut rng).unwrap(),
                -1..=1
            ));
        }
    }

    #[test]
    fn acceleration_outside_band_is_rejected() {
        let p = MobilityParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            next_acceleration(0.5, &p, &mut rng),
            Err(Error::InvalidState(_))
        ));
        assert!(next_acceleration(10.5, &p, &mut rng).is_err());
    }

    #[test]
    fn acceleration_consumes_one_draw() {
        let p = MobilityParams::default();
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        next_acceleration(5.0, &p, &mut a).unwrap();
        b.next_u64();
        assert_eq!(a.next_u64(), b.next_u64());
    }

    #[test]
    fn all_three_accelerations_occur_mid_band() {
        let p = MobilityParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = [0usize; 3];
        for _ in 0..3000 {
            let a = next_acceleration(5.0, &p, &mut rng).unwrap();
            seen[(a + 1) as usize] += 1;
        }
        assert!(seen.iter().all(|&c| c > 800), "{seen:?}");
    }

    #[test]
    fn long_period_gives_constant_trace() {
        let trace = generate_trace(&params(100, 500, 5.0, 1)).unwrap();
        assert!(trace.velocities().iter().all(|&v| v == 5.0));
    }

    #[test]
    fn collapsed_band_gives_constant_trace() {
        let p = MobilityParams {
            v_min: 1.0,
            v_max: 1.0,
            v0: 1.0,
            ..params(300, 3, 1.0, 11)
        };
        let trace = generate_trace(&p).unwrap();
        assert!(trace.velocities().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn short_trace_replays_draw_sequence() {
        // Replay the documented draw rule by hand for seed 42.
        let seed = 42;
        let trace = generate_trace(&params(12, 3, 1.0, seed)).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut expected = vec![1.0f64; 12];
        for t in 1..12 {
            expected[t] = expected[t - 1];
            if t % 3 == 0 {
                let v = expected[t - 1];
                let set: Vec<f64> = [-1.0, 0.0, 1.0]
                    .into_iter()
                    .filter(|a| (1.0..=10.0).contains(&(v + a)))
                    .collect();
                expected[t] += set[(rng.next_u64() % set.len() as u64) as usize];
            }
        }
        assert_eq!(trace.velocities(), expected.as_slice());
        for t in 1..12 {
            if t % 3 != 0 {
                assert_eq!(trace.velocities()[t], trace.velocities()[t - 1]);
            }
        }
        // At 1 m/s the step can only be 0 or +1.
        assert!(trace.velocities()[3] == 1.0 || trace.velocities()[3] == 2.0);
    }

    #[test]
    fn generation_is_deterministic() {
        let p = params(5000, 3, 4.0, 1234);
        assert_eq!(generate_trace(&p).unwrap(), generate_trace(&p).unwrap());
        let other = generate_trace(&MobilityParams { seed: 1235, ..p }).unwrap();
        assert_ne!(generate_trace(&p).unwrap(), other);
    }

    #[test]
    fn invalid_params_name_the_key() {
        let bad = MobilityParams {
            v0: 11.0,
            ..MobilityParams::default()
        };
        match generate_trace(&bad) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "v0"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = MobilityParams {
            t1_s: 0,
            ..MobilityParams::default()
        };
        assert!(bad.validate().is_err());
        let bad = MobilityParams {
            v_min: 0.5,
            v0: 1.0,
            ..MobilityParams::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn velocity_uses_half_open_seconds() {
        let trace = MotionTrace::from_velocities(vec![1.0, 1.0, 2.0, 3.0, 3.0]).unwrap();
        assert_eq!(trace.velocity_at(2.999).unwrap(), 2.0);
        assert_eq!(trace.velocity_at(3.0).unwrap(), 3.0);
        assert_eq!(trace.velocity_at(5.0).unwrap(), 3.0);
        assert!(matches!(trace.velocity_at(5.1), Err(Error::Domain { .. })));
        assert!(trace.velocity_at(-0.1).is_err());

        let c = MotionTrace::constant(5.0, 100).unwrap();
        assert_eq!(c.velocity_at(17.3).unwrap(), 5.0);
    }

    #[test]
    fn position_integrates_exactly() {
        let c = MotionTrace::constant(3.0, 20).unwrap();
        assert_eq!(c.position_at(10.0).unwrap(), 30.0);
        assert_eq!(c.position_at(0.0).unwrap(), 0.0);

        let trace = MotionTrace::from_velocities(vec![2.0, 2.0, 2.0, 3.0, 3.0, 3.0]).unwrap();
        assert_eq!(trace.position_at(5.0).unwrap(), 12.0);
        assert_eq!(trace.position_at(6.0).unwrap(), 15.0);
        assert_eq!(trace.position_at(3.5).unwrap(), 7.5);
        assert!(trace.position_at(6.5).is_err());
    }

    #[test]
    fn zero_duration_trace_answers_at_origin() {
        let trace = generate_trace(&params(0, 3, 5.0, 1)).unwrap();
        assert_eq!(trace.duration_s(), 0);
        assert_eq!(trace.velocity_at(0.0).unwrap(), 5.0);
        assert_eq!(trace.position_at(0.0).unwrap(), 0.0);
        assert!(trace.position_at(0.5).is_err());
    }
}
