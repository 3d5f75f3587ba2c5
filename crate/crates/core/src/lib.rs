//! Energy-aware localization scheduling.
//!
//! The [`strategy`] module decides *when* to localize next (by integrating
//! an EWMA speed estimate against the error budget left by the last fix)
//! and *how* (the method with the lowest energy per second of budget).
//! [`mobility`] produces the synthetic speed traces it is evaluated on, and
//! [`simulator`] closes the loop and scores each run by total fix energy and
//! by the fraction of time the requirement was met.

pub mod error;
pub mod export;
pub mod mobility;
pub mod simulator;
pub mod strategy;
pub mod sweep;

pub use error::{Error, Result};
pub use mobility::{generate_trace, next_acceleration, MobilityParams, MotionTrace};
pub use simulator::{
    run, run_on_trace, satisfaction_degree, total_energy, AccuracySchedule, Event, EventKind,
    RunResult, SimulationConfig, StrategyKind,
};
pub use strategy::{
    cost_rate, ewma_update, select_method, EpochStart, FixDecision, Method, MethodPolicy,
    MethodSet, Scheduler, SchedulerState, StrategyConfig,
};
pub use sweep::{figure_series, means, sweep, FigureRow, MeanRow, Metric, SummaryRow, SweepGrid};
