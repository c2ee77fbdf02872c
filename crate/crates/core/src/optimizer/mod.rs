//! Minimum-latency operating points.
//!
//! For a budget `J(βs)` and a channel, [`solve`] finds the smallest
//! blocklength whose decoding error is at most `(βt − βs)/(1 − βs)`;
//! [`sweep`] minimises that over a βs grid and collects one optimum per βt;
//! [`hull`] builds the lower convex envelope of the resulting latencies.

pub mod hull;
pub mod solve;
pub mod sweep;

pub use hull::{lower_convex_hull, LowerHull};
pub use solve::{
    epsilon_target, latency_seconds, solve_blocklength, solve_blocklength_awgn,
    solve_blocklength_fading_csi, solve_blocklength_fading_nocsi, Blocklength, Denominator,
    SolveOptions,
};
pub use sweep::{
    evaluate_point, sweep_beta_s, sweep_beta_t, with_jobs, BetaSweep, GridMode, GridSpec, Problem,
    TradeoffCurve, TradeoffPoint,
};
