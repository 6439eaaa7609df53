//! Seeded Monte-Carlo harness over parameter grids, with CSV persistence.
//!
//! Every random draw of a trial is derived from `(master_seed, instance,
//! trial)`, so output does not depend on the number of worker threads.

mod config;
mod csv_io;
mod presets;
mod run;
mod summary;

pub use config::{Algo, ExperimentConfig};
pub use csv_io::{
    read_aggregate, read_aggregate_file, read_trials, read_trials_file, write_aggregate,
    write_aggregate_file, write_trials, write_trials_file, AGGREGATE_HEADER, TRIAL_HEADER,
};
pub use presets::{fig1, fig2, fig3, fig3_steps, fig4, log_grid, preset, FIGURES, NOISE_LEVELS};
pub use run::{grid_points, run_grid, run_trial, trial_seed, GridPoint, TrialRecord};
pub use summary::{summarize, AggregateRow};
