//! Master-equation models and their numerical integration.

mod integrate;
mod model;
mod params;

pub use integrate::{
    default_dt, evolve, evolve_with, uniform_samples, Trajectory, HERMITICITY_TOLERANCE, POSITIVITY_TOLERANCE,
    TRACE_ABORT,
};
pub use model::{build_ancilla_model, build_probe_mode_model, excitation_number, Jump, LindbladModel};
pub use params::SystemParams;
