//! Reference implementations and random generators shared by the test targets.

#![allow(dead_code)]

use coherence_trap::lindblad::{build_ancilla_model, evolve_with, SystemParams};
use coherence_trap::quantum::{CompositeSpace, ComplexMatrix, DensityMatrix};
use coherence_trap::C64;
use rand::Rng;

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// G G† / tr(G G†) for a random square G; full rank almost surely.
pub fn random_density(rng: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let g = random_matrix(rng, dim, dim);
    let m = g.matmul(&g.adjoint());
    let tr = m.trace().re;
    m.scale_real(1.0 / tr)
}

/// Kronecker product straight from the index formula.
pub fn brute_kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * rb, a.cols() * cb, |r, c| a.get(r / rb, c / cb) * b.get(r % rb, c % cb))
}

/// Partial trace by summing over every pair of basis states that agree off `keep`.
pub fn brute_partial_trace(m: &ComplexMatrix, dims: &[usize], keep: usize) -> ComplexMatrix {
    let space = CompositeSpace::new(dims.to_vec()).unwrap();
    let n = space.total_dim();
    let mut out = ComplexMatrix::zeros(dims[keep], dims[keep]);
    for i in 0..n {
        let di = space.unravel(i);
        for j in 0..n {
            let dj = space.unravel(j);
            let others_equal = (0..dims.len()).all(|k| k == keep || di[k] == dj[k]);
            if others_equal {
                let (a, b) = (di[keep], dj[keep]);
                out.set(a, b, out.get(a, b) + m.get(i, j));
            }
        }
    }
    out
}

/// Random physical parameters in units where Γ ~ 1.
pub fn random_params(rng: &mut impl Rng) -> SystemParams {
    SystemParams {
        omega: rng.gen_range(-1.0..1.0),
        omega_tilde: rng.gen_range(-1.0..1.0),
        omega_m: rng.gen_range(-0.5..0.5),
        lambda: rng.gen_range(0.0..1.0),
        lambda_tilde: rng.gen_range(-1.0..1.0),
        gamma: rng.gen_range(0.0..2.0),
        gamma_se: rng.gen_range(0.0..0.2),
        n_bar: rng.gen_range(0.0..0.3),
        n_max: rng.gen_range(1..=3),
    }
}

/// Worst trace error, Hermiticity error and smallest eigenvalue seen along a
/// trajectory of the probe/ancilla/mode model from a random mixed state.
pub fn invariant_extremes(rng: &mut impl Rng, p: &SystemParams, t_final: f64) -> (f64, f64, f64) {
    let model = build_ancilla_model(p).unwrap();
    let space = model.space().clone();
    let rho0 = DensityMatrix::new(space.clone(), random_density(rng, space.total_dim())).unwrap();
    let times: Vec<f64> = (0..=10).map(|k| t_final * k as f64 / 10.0).collect();
    let (mut trace, mut herm, mut min_eig) = (0.0f64, 0.0f64, f64::INFINITY);
    evolve_with(&model, &rho0, &times, 1e-3, |_, rho| {
        let d = rho.diagnostics()?;
        trace = trace.max(d.trace_error);
        herm = herm.max(d.hermiticity_error);
        min_eig = min_eig.min(d.min_eigenvalue);
        Ok(())
    })
    .unwrap();
    (trace, herm, min_eig)
}
