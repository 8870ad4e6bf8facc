//! Gaussian-process surrogate, expected improvement, and the sequential
//! propose-evaluate loop.

mod acquisition;
mod gp;
mod objective;
mod optimizer;

pub use acquisition::{expected_improvement, propose_next};
pub use gp::{kernel_se, GpModel, KernelParams, MAX_JITTER};
pub use objective::{objective_map, Objective, RetrievalObjective};
pub use optimizer::{
    format_history, iteration_rng, parse_history, refit_kernel, run_bo_loop, BoConfig, BoState, HistoryRecord,
    Observation, DEFAULT_BUDGET, DEFAULT_CANDIDATES, DEFAULT_INIT, DEFAULT_SEED,
};
