//! Monte Carlo harness for the supersample and leave-one-out constructions, plus plug-in
//! estimators and bootstrap intervals.

mod bootstrap;
mod cmi;
mod harness;
mod persist;
mod plugin;
mod rng;

pub use bootstrap::{bootstrap_ci, bootstrap_mean_ci, resample_weights, weighted_mean, BootstrapConfig, Interval};
pub use cmi::{
    estimate_ecmi, estimate_emi, estimate_fcmi, estimate_loo_emi, estimate_per_sample_ldmi, prepare, prepare_loo,
    prepare_unconditional, CmiEstimate, Conditioning, LooEstimate, LooPrepared, Prepared, Quantity,
    DEFAULT_LOSS_LEVELS, DEFAULT_OCCUPANCY_FLOOR,
};
pub use harness::{
    run_loo_trials, run_supersample_trials, run_supersample_trials_inspect, Inspected, LearningProblem, LooTrial,
    SupersampleTrial, Symbolic, TrainingView, TrialBatch,
};
pub use persist::{read_batch, write_batch, BatchHeader, BatchRecord, BATCH_FORMAT, BATCH_VERSION};
pub use plugin::plug_in_mi;
pub use rng::{trial_rng, Stream};
