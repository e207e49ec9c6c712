//! Load-frequency control of an isolated wind–diesel system.
//!
//! A de-loaded wind plant holds a power reserve and releases it through a
//! frequency droop while a PI-controlled diesel generator restores
//! frequency. [`tuning`] searches the diesel gains with particle swarm
//! optimization against the integral of squared frequency error.
//!
//! ```
//! use hybrid_lfc::{run_simulation, Scenario};
//!
//! let mut scenario = Scenario::default();
//! scenario.solver.t_end = 30.0;
//! let result = run_simulation(&scenario).unwrap();
//! assert_eq!(result.records.len(), 301);
//! ```

// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diesel;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod output;
pub mod pso;
pub mod runner;
pub mod scenario;
pub mod tuning;
pub mod wind;

pub use diesel::Gains;
pub use error::{Error, Result};
pub use kernel::{Scheme, SolverSettings};
pub use runner::{
    run_observed, run_simulation, run_with_gains, simulate_ise, SimulationResult, StepView,
    Summary, TimeSeriesRecord,
};
pub use scenario::{load_scenario, Scenario};
pub use tuning::{evaluate_candidate, tune, tuner_settings, TuneReport};
