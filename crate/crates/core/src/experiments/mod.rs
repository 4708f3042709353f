//! Configuration-driven scenarios producing CSV tables.

pub mod config;
pub mod csv;
pub mod figures;
pub mod ramsey;

pub use config::{Scenario, ScenarioConfig};
pub use csv::CsvTable;
pub use figures::{run_scenario, ScenarioOutput};
pub use ramsey::{apply_pi_half_pulse, probe_coherence, run_ramsey_point, RamseyRecord, RamseySweep};
