//! Dense complex linear algebra, composite spaces and state factories.

mod matrix;
pub mod operators;
mod space;
mod state;

pub use matrix::{kron, kron_all, ComplexMatrix};
pub use operators::boson_ops;
pub use space::{CompositeSpace, ANCILLA, PROBE};
pub use state::{
    basis_state, partial_trace, qubit_superposition_state, thermal_state, DensityMatrix, StateDiagnostics,
    StateTolerance,
};
