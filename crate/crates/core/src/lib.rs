//! Bohmian trajectories of a test particle in a two-slit setup, weakly coupled
//! to one or many pointer particles.

pub mod analysis;
pub mod bench;
pub mod cli;
pub mod error;
pub mod integrate;
pub mod model;
pub mod output;
pub mod plot;
pub mod reduced;
pub mod scenario;
pub mod validate;
pub mod velocity;

pub use error::{Error, Result};
pub use integrate::{
    crossing_time, integrate_full, integrate_reduced, integrate_trajectory, run_ensemble, Backend,
    Ensemble, EnsembleSpec, IntegratorOptions, Sample, Trajectory, ZInit,
};
pub use model::{fast_pointer_e, Branch, Configuration, Pointer, ScenarioParams};
pub use reduced::{effective_params, reconstruct_pointers, reduced_velocity, ReducedState};
pub use velocity::{velocity_analytic, velocity_numeric, VelocityVector};
