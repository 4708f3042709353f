//! Single-factor operators.
//!
//! Qubit basis: index 0 is |0⟩ (ground), index 1 is |1⟩ (excited), so
//! σ^z = |1⟩⟨1| − |0⟩⟨0| = diag(−1, 1) and σ⁺ = |1⟩⟨0|. Fock basis index n
//! is |n⟩.

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[real(-1.0), real(1.0)])
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| if i != j { real(1.0) } else { real(0.0) })
}

/// |1⟩⟨0|
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |i, j| if (i, j) == (1, 0) { real(1.0) } else { real(0.0) })
}

/// |0⟩⟨1|
pub fn sigma_minus() -> ComplexMatrix {
    sigma_plus().adjoint()
}

/// |1⟩⟨1|
pub fn excited_projector() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[real(0.0), real(1.0)])
}

/// Truncated ladder operators `(a, a†)` on `n_max + 1` Fock levels.
pub fn boson_ops(n_max: usize) -> (ComplexMatrix, ComplexMatrix) {
    assert!(n_max >= 1, "n_max must be at least 1");
    let d = n_max + 1;
    let a = ComplexMatrix::from_fn(d, d, |i, j| {
        if j == i + 1 {
            real((j as f64).sqrt())
        } else {
            real(0.0)
        }
    });
    let a_dag = a.adjoint();
    (a, a_dag)
}

pub fn number_operator(n_max: usize) -> ComplexMatrix {
    ComplexMatrix::diagonal(&(0..=n_max).map(|n| real(n as f64)).collect::<Vec<_>>())
}

/// `exp(-i θ/2 ·(cos φ σ^x + sin φ σ^y))`.
pub fn rotation(theta: f64, phi: f64) -> ComplexMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    let off = C64::new(0.0, -s) * C64::from_polar(1.0, -phi);
    ComplexMatrix::new(2, 2, vec![real(c), off, C64::new(0.0, -s) * C64::from_polar(1.0, phi), real(c)])
        .expect("2x2")
}
