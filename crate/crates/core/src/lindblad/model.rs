use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::quantum::operators::{sigma_minus, sigma_plus, sigma_z};
use crate::quantum::{boson_ops, ComplexMatrix, CompositeSpace, DensityMatrix, ANCILLA, PROBE};

use super::params::SystemParams;

/// One dissipative channel `rate · D[op]`.
#[derive(Clone, Debug)]
pub struct Jump {
    pub rate: f64,
    pub operator: ComplexMatrix,
    pub label: &'static str,
}

/// Hamiltonian plus jump operators of a GKSL generator.
#[derive(Clone, Debug)]
pub struct LindbladModel {
    space: CompositeSpace,
    hamiltonian: ComplexMatrix,
    jumps: Vec<Jump>,
}

impl LindbladModel {
    pub fn new(space: CompositeSpace, hamiltonian: ComplexMatrix, jumps: Vec<Jump>) -> Result<Self> {
        let d = space.total_dim();
        if hamiltonian.rows() != d || hamiltonian.cols() != d {
            return Err(Error::Dimension(format!("Hamiltonian is not {d}x{d}")));
        }
        let herm = hamiltonian.hermiticity_error();
        let scale = hamiltonian.frobenius_norm().max(1.0);
        if herm > 1e-10 * scale {
            return Err(Error::InvalidArgument(format!("Hamiltonian not Hermitian (error {herm:e})")));
        }
        for j in &jumps {
            if !(j.rate >= 0.0) || !j.rate.is_finite() {
                return Err(Error::InvalidArgument(format!("jump '{}' has rate {}", j.label, j.rate)));
            }
            if j.operator.rows() != d || j.operator.cols() != d {
                return Err(Error::Dimension(format!("jump '{}' is not {d}x{d}", j.label)));
            }
        }
        Ok(Self { space, hamiltonian, jumps })
    }

    pub fn space(&self) -> &CompositeSpace {
        &self.space
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn dim(&self) -> usize {
        self.space.total_dim()
    }

    /// Sum of all jump rates.
    pub fn total_rate(&self) -> f64 {
        self.jumps.iter().map(|j| j.rate).sum()
    }

    /// Dense evaluation of `−i[H, ρ] + Σ γ (LρL† − ½{L†L, ρ})`.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let minus_i = C64::new(0.0, -1.0);
        let mut out = self.hamiltonian.commutator(rho).scale(minus_i);
        for j in &self.jumps {
            let l = &j.operator;
            let ld = l.adjoint();
            let sandwich = l.matmul(rho).matmul(&ld);
            let anti = ld.matmul(l).anticommutator(rho).scale_real(0.5);
            out += &(&sandwich - &anti).scale_real(j.rate);
        }
        out
    }

    /// Convenience wrapper of [`Self::apply`] for states.
    pub fn apply_state(&self, rho: &DensityMatrix) -> Result<ComplexMatrix> {
        if rho.space() != &self.space {
            return Err(Error::Dimension(format!(
                "state on {:?}, model on {:?}",
                rho.space().factor_dims(),
                self.space.factor_dims()
            )));
        }
        Ok(self.apply(rho.matrix()))
    }
}

fn push_jump(jumps: &mut Vec<Jump>, rate: f64, operator: ComplexMatrix, label: &'static str) {
    if rate > 0.0 {
        jumps.push(Jump { rate, operator, label });
    }
}

/// Probe qubit coupled to a damped mode:
/// `H = (ω/2)σ^z + ω_m a†a + λ(σ⁻a† + σ⁺a)` on probe ⊗ mode, cooled at rate Γ
/// towards occupation n̄, with optional probe spontaneous emission.
pub fn build_probe_mode_model(p: &SystemParams) -> Result<LindbladModel> {
    p.validate()?;
    let space = CompositeSpace::probe_mode(p.n_max);
    let (a, a_dag) = boson_ops(p.n_max);
    let sz = space.embed(&sigma_z(), PROBE)?;
    let sp = space.embed(&sigma_plus(), PROBE)?;
    let sm = space.embed(&sigma_minus(), PROBE)?;
    let am = space.embed(&a, 1)?;
    let adm = space.embed(&a_dag, 1)?;
    let coupling = &sm.matmul(&adm) + &sp.matmul(&am);

    let mut h = sz.scale_real(0.5 * p.omega);
    h += &adm.matmul(&am).scale_real(p.omega_m);
    h += &coupling.scale_real(p.lambda);

    let mut jumps = Vec::new();
    push_jump(&mut jumps, p.gamma * (p.n_bar + 1.0), am, "a");
    push_jump(&mut jumps, p.gamma * p.n_bar, adm, "a_dag");
    push_jump(&mut jumps, p.gamma_se, sm, "sigma_minus");
    LindbladModel::new(space, h, jumps)
}

/// Probe and ancilla qubits sharing a damped mode, on probe ⊗ ancilla ⊗ mode.
///
/// Dissipators: laser cooling `Γ(n̄+1)D[a] + Γn̄D[a†]` and spontaneous emission
/// `Γ_se(D[σ⁻] + D[σ̃⁻])`. Zero-rate channels are omitted, so with n̄ = 0 and
/// Γ_se = 0 the only jump is `(Γ, a)`.
pub fn build_ancilla_model(p: &SystemParams) -> Result<LindbladModel> {
    p.validate()?;
    let space = CompositeSpace::probe_ancilla_mode(p.n_max);
    let mode = space.mode_factor();
    let (a, a_dag) = boson_ops(p.n_max);
    let am = space.embed(&a, mode)?;
    let adm = space.embed(&a_dag, mode)?;
    let sz = space.embed(&sigma_z(), PROBE)?;
    let sp = space.embed(&sigma_plus(), PROBE)?;
    let sm = space.embed(&sigma_minus(), PROBE)?;
    let tz = space.embed(&sigma_z(), ANCILLA)?;
    let tp = space.embed(&sigma_plus(), ANCILLA)?;
    let tm = space.embed(&sigma_minus(), ANCILLA)?;

    let probe_coupling = &sm.matmul(&adm) + &sp.matmul(&am);
    let ancilla_coupling = &tm.matmul(&adm) + &tp.matmul(&am);

    let mut h = sz.scale_real(0.5 * p.omega);
    h += &tz.scale_real(0.5 * p.omega_tilde);
    h += &adm.matmul(&am).scale_real(p.omega_m);
    h += &probe_coupling.scale_real(p.lambda);
    h += &ancilla_coupling.scale_real(p.lambda_tilde);

    let mut jumps = Vec::new();
    push_jump(&mut jumps, p.gamma * (p.n_bar + 1.0), am, "a");
    push_jump(&mut jumps, p.gamma * p.n_bar, adm, "a_dag");
    push_jump(&mut jumps, p.gamma_se, sm, "sigma_minus");
    push_jump(&mut jumps, p.gamma_se, tm, "sigma_minus_ancilla");
    LindbladModel::new(space, h, jumps)
}

/// Total excitation number σ⁺σ⁻ + σ̃⁺σ̃⁻ + a†a on probe ⊗ ancilla ⊗ mode.
pub fn excitation_number(n_max: usize) -> ComplexMatrix {
    let space = CompositeSpace::probe_ancilla_mode(n_max);
    let (a, a_dag) = boson_ops(n_max);
    let up = sigma_plus().matmul(&sigma_minus());
    let mut n = space.embed(&up, PROBE).expect("probe factor");
    n += &space.embed(&up, ANCILLA).expect("ancilla factor");
    n += &space.embed(&a_dag.matmul(&a), space.mode_factor()).expect("mode factor");
    n
}
