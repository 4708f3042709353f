//! Fixed-step RK4 integration of the GKSL equation.
//!
//! The generator is rewritten as `dρ/dt = A + A†` with
//! `A = −i H_eff ρ + ½ Σ γ L (Lρ)†` and `H_eff = H − (i/2) Σ γ L†L`. For a
//! Hermitian ρ this equals the usual form, and it keeps every stage exactly
//! Hermitian. Operators are stored as nonzero triplets for the products.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::quantum::{ComplexMatrix, DensityMatrix};

use super::model::LindbladModel;
use super::params::SystemParams;

/// Trace drift beyond which a step size is rejected.
pub const TRACE_ABORT: f64 = 1e-6;
/// Most negative eigenvalue tolerated in a sampled state.
pub const POSITIVITY_TOLERANCE: f64 = -1e-6;
/// Largest tolerated `max |ρ_ij − ρ*_ji|`.
pub const HERMITICITY_TOLERANCE: f64 = 1e-8;

/// Step size used when a scenario does not set one.
pub fn default_dt(p: &SystemParams) -> f64 {
    let scale = p.fastest_scale();
    if scale > 0.0 {
        1e-3 / scale
    } else {
        1e-3
    }
}

/// `count` equally spaced times on `[0, t_final]`.
pub fn uniform_samples(t_final: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2, "need at least two samples");
    (0..count).map(|k| t_final * k as f64 / (count - 1) as f64).collect()
}

#[derive(Clone, Debug)]
struct SparseOp {
    // (row, col, value), sorted by row
    entries: Vec<(usize, usize, C64)>,
}

impl SparseOp {
    fn from_dense(m: &ComplexMatrix) -> Self {
        let mut entries = Vec::new();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let v = m.get(i, j);
                if v.norm_sqr() > 0.0 {
                    entries.push((i, j, v));
                }
            }
        }
        Self { entries }
    }

    /// `out += scale · (self · x)` for row-major `n×n` buffers.
    fn mul_add(&self, x: &[C64], out: &mut [C64], n: usize, scale: C64) {
        for &(i, k, v) in &self.entries {
            let f = v * scale;
            let src = &x[k * n..(k + 1) * n];
            let dst = &mut out[i * n..(i + 1) * n];
            for (d, &s) in dst.iter_mut().zip(src) {
                *d += f * s;
            }
        }
    }
}

/// Compiled form of a [`LindbladModel`] plus scratch buffers.
struct Generator {
    n: usize,
    h_eff: SparseOp,
    jumps: Vec<(f64, SparseOp)>,
    half: Vec<C64>,
    l_rho: Vec<C64>,
    l_rho_dag: Vec<C64>,
}

impl Generator {
    fn new(model: &LindbladModel) -> Self {
        let n = model.dim();
        let mut h_eff = model.hamiltonian().clone();
        for j in model.jumps() {
            let ldl = j.operator.adjoint().matmul(&j.operator);
            h_eff = &h_eff - &ldl.scale(C64::new(0.0, 0.5 * j.rate));
        }
        Self {
            n,
            h_eff: SparseOp::from_dense(&h_eff),
            jumps: model.jumps().iter().map(|j| (j.rate, SparseOp::from_dense(&j.operator))).collect(),
            half: vec![C64::new(0.0, 0.0); n * n],
            l_rho: vec![C64::new(0.0, 0.0); n * n],
            l_rho_dag: vec![C64::new(0.0, 0.0); n * n],
        }
    }

    fn rhs(&mut self, rho: &[C64], out: &mut [C64]) {
        let n = self.n;
        let zero = C64::new(0.0, 0.0);
        self.half.fill(zero);
        self.h_eff.mul_add(rho, &mut self.half, n, C64::new(0.0, -1.0));
        for (rate, l) in &self.jumps {
            self.l_rho.fill(zero);
            l.mul_add(rho, &mut self.l_rho, n, C64::new(1.0, 0.0));
            for i in 0..n {
                for j in 0..n {
                    self.l_rho_dag[i * n + j] = self.l_rho[j * n + i].conj();
                }
            }
            l.mul_add(&self.l_rho_dag, &mut self.half, n, C64::new(0.5 * rate, 0.0));
        }
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = self.half[i * n + j] + self.half[j * n + i].conj();
            }
        }
    }
}

/// RK4 stepper that owns its workspace.
struct Rk4 {
    generator: Generator,
    k: [Vec<C64>; 4],
    stage: Vec<C64>,
}

impl Rk4 {
    fn new(model: &LindbladModel) -> Self {
        let len = model.dim() * model.dim();
        let z = || vec![C64::new(0.0, 0.0); len];
        Self { generator: Generator::new(model), k: [z(), z(), z(), z()], stage: z() }
    }

    fn step(&mut self, rho: &mut [C64], h: f64) {
        let [k1, k2, k3, k4] = &mut self.k;
        self.generator.rhs(rho, k1);
        for ((s, &r), &k) in self.stage.iter_mut().zip(rho.iter()).zip(k1.iter()) {
            *s = r + k * (0.5 * h);
        }
        self.generator.rhs(&self.stage, k2);
        for ((s, &r), &k) in self.stage.iter_mut().zip(rho.iter()).zip(k2.iter()) {
            *s = r + k * (0.5 * h);
        }
        self.generator.rhs(&self.stage, k3);
        for ((s, &r), &k) in self.stage.iter_mut().zip(rho.iter()).zip(k3.iter()) {
            *s = r + k * h;
        }
        self.generator.rhs(&self.stage, k4);
        let w = h / 6.0;
        for i in 0..rho.len() {
            rho[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
    }
}

/// States sampled along an integration.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
}

impl Trajectory {
    pub fn last(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }
}

/// Integrates from `rho0` at t = 0 and returns the state at every sample time.
pub fn evolve(model: &LindbladModel, rho0: &DensityMatrix, sample_times: &[f64], dt: f64) -> Result<Trajectory> {
    let mut times = Vec::with_capacity(sample_times.len());
    let mut states = Vec::with_capacity(sample_times.len());
    evolve_with(model, rho0, sample_times, dt, |t, rho| {
        times.push(t);
        states.push(rho.clone());
        Ok(())
    })?;
    Ok(Trajectory { times, states })
}

/// Like [`evolve`] but hands each sampled state to `observer` instead of storing it.
///
/// Each interval between samples is split into the smallest number of equal
/// steps not longer than `dt`, so samples are hit exactly. Every sample is
/// checked for trace drift, Hermiticity and positivity; violations abort the
/// run.
pub fn evolve_with<F>(
    model: &LindbladModel,
    rho0: &DensityMatrix,
    sample_times: &[f64],
    dt: f64,
    mut observer: F,
) -> Result<()>
where
    F: FnMut(f64, &DensityMatrix) -> Result<()>,
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidArgument(format!("dt = {dt}")));
    }
    if rho0.space() != model.space() {
        return Err(Error::Dimension(format!(
            "state on {:?}, model on {:?}",
            rho0.space().factor_dims(),
            model.space().factor_dims()
        )));
    }
    if sample_times.iter().any(|t| !(*t >= 0.0)) || sample_times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("sample times must be non-negative and sorted".into()));
    }

    let space = model.space().clone();
    let n = model.dim();
    let mut stepper = Rk4::new(model);
    let mut rho = rho0.matrix().clone();
    let mut t = 0.0;
    for &target in sample_times {
        let span = target - t;
        if span > 0.0 {
            let steps = (span / dt - 1e-9).ceil().max(1.0) as usize;
            let h = span / steps as f64;
            for _ in 0..steps {
                stepper.step(rho.as_mut_slice(), h);
            }
        }
        t = target;
        check_sample(t, &rho)?;
        let state = DensityMatrix::from_parts_unchecked(space.clone(), rho.clone());
        debug_assert_eq!(state.dim(), n);
        observer(t, &state)?;
    }
    Ok(())
}

fn check_sample(t: f64, rho: &ComplexMatrix) -> Result<()> {
    let drift = (rho.trace() - C64::new(1.0, 0.0)).norm();
    if !drift.is_finite() || drift > TRACE_ABORT {
        return Err(Error::StepSize { time: t, drift, tolerance: TRACE_ABORT });
    }
    let herm = rho.hermiticity_error();
    if herm > HERMITICITY_TOLERANCE {
        return Err(Error::Numerical(format!("Hermiticity lost at t = {t:e} (error {herm:e})")));
    }
    let min_eig = rho.hermitian_eigenvalues()?[0];
    if min_eig < POSITIVITY_TOLERANCE {
        return Err(Error::Positivity { time: t, min_eigenvalue: min_eig });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::model::Jump;
    use crate::quantum::{boson_ops, basis_state, CompositeSpace};

    #[test]
    fn sparse_rhs_matches_dense_generator() {
        let p = SystemParams {
            omega: 0.4,
            omega_tilde: 0.1,
            omega_m: -0.2,
            lambda: 0.3,
            lambda_tilde: -0.5,
            gamma: 1.0,
            gamma_se: 0.05,
            n_bar: 0.3,
            n_max: 2,
        };
        let model = crate::lindblad::build_ancilla_model(&p).unwrap();
        let n = model.dim();
        // Hermitian test matrix
        let x = ComplexMatrix::from_fn(n, n, |i, j| {
            let a = ((i * 7 + j * 3) % 11) as f64 / 11.0;
            let b = ((i * 5 + j * 13) % 17) as f64 / 17.0;
            C64::new(a, b)
        });
        let rho = &x + &x.adjoint();
        let dense = model.apply(&rho);
        let mut gen = Generator::new(&model);
        let mut out = vec![C64::new(0.0, 0.0); n * n];
        gen.rhs(rho.as_slice(), &mut out);
        let sparse = ComplexMatrix::new(n, n, out).unwrap();
        assert!(sparse.approx_eq(&dense, 1e-12), "diff {}", sparse.max_abs_diff(&dense));
    }

    #[test]
    fn null_generator_keeps_state() {
        let space = CompositeSpace::single(3).unwrap();
        let model = LindbladModel::new(space, ComplexMatrix::zeros(3, 3), vec![]).unwrap();
        let rho0 = basis_state(3, 1).unwrap();
        let traj = evolve(&model, &rho0, &uniform_samples(2.0, 5), 0.1).unwrap();
        for s in &traj.states {
            assert_eq!(s.matrix(), rho0.matrix());
        }
    }

    #[test]
    fn pure_damping_is_exponential() {
        let (a, a_dag) = boson_ops(3);
        let space = CompositeSpace::single(4).unwrap();
        let model = LindbladModel::new(
            space,
            ComplexMatrix::zeros(4, 4),
            vec![Jump { rate: 1.0, operator: a.clone(), label: "a" }],
        )
        .unwrap();
        let number = a_dag.matmul(&a);
        let rho0 = basis_state(4, 1).unwrap();
        let traj = evolve(&model, &rho0, &uniform_samples(5.0, 11), 1e-3).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            let n = s.expectation(&number).unwrap().re;
            assert!((n - (-t).exp()).abs() < 1e-8, "t={t}: {n}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let space = CompositeSpace::single(2).unwrap();
        let model = LindbladModel::new(space, ComplexMatrix::zeros(2, 2), vec![]).unwrap();
        let wrong = basis_state(3, 0).unwrap();
        assert!(matches!(evolve(&model, &wrong, &[0.0, 1.0], 0.1), Err(Error::Dimension(_))));
        let ok = basis_state(2, 0).unwrap();
        assert!(evolve(&model, &ok, &[0.0, 1.0], 0.0).is_err());
        assert!(evolve(&model, &ok, &[1.0, 0.5], 0.1).is_err());
    }

    #[test]
    fn oversized_step_is_rejected() {
        // exponential decay with h·γ = 5 blows up under RK4
        let (a, _) = boson_ops(1);
        let space = CompositeSpace::single(2).unwrap();
        let model =
            LindbladModel::new(space, ComplexMatrix::zeros(2, 2), vec![Jump { rate: 50.0, operator: a, label: "a" }])
                .unwrap();
        let rho0 = basis_state(2, 1).unwrap();
        let err = evolve(&model, &rho0, &uniform_samples(10.0, 3), 0.1).unwrap_err();
        assert!(matches!(err, Error::StepSize { .. } | Error::Positivity { .. }), "{err}");
    }
}
