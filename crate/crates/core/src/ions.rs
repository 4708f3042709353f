//! Axial equilibrium and normal modes of a mixed-species linear ion chain.
//!
//! Lengths are scaled by ℓ = (e²/(4πε₀ m_ref ω_z²))^{1/3} and frequencies by
//! ω_z, so the axial potential reads `Σ z_j²/2 + Σ_{i<j} 1/|z_i − z_j|`. The
//! trap curvature is the same for every species, so an ion of mass m
//! oscillates alone at `ω_z √(m_ref/m)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
pub const HBAR: f64 = 1.054_571_817e-34;

pub const MASS_CA40: f64 = 39.9626;
pub const MASS_MG24: f64 = 23.9850;

/// Lamb-Dicke factors at or above this value are flagged.
pub const LAMB_DICKE_LIMIT: f64 = 0.3;

const MAX_NEWTON_ITERATIONS: usize = 200;
const FORCE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CrystalConfig {
    /// Ion masses along the axis, in amu.
    pub masses: Vec<f64>,
    /// Species whose single-ion axial frequency is `omega_z`, in amu.
    pub reference_mass: f64,
    /// Single-ion axial frequency of the reference species (rad/s).
    pub omega_z: f64,
    /// Wavelength of the sideband laser (m).
    pub laser_wavelength: f64,
    /// k_z/|k|.
    pub laser_axis_projection: f64,
}

impl CrystalConfig {
    /// ⁴⁰Ca⁺ – ⁴⁰Ca⁺ – ²⁴Mg⁺ at ω_z/2π = 1 MHz, addressed at 729 nm along the axis.
    pub fn ca_ca_mg() -> Self {
        Self {
            masses: vec![MASS_CA40, MASS_CA40, MASS_MG24],
            reference_mass: MASS_CA40,
            omega_z: 2.0 * std::f64::consts::PI * 1e6,
            laser_wavelength: 729e-9,
            laser_axis_projection: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.masses.len() < 2 {
            return Err(Error::InvalidArgument("need at least two ions".into()));
        }
        if self.masses.iter().any(|&m| !(m > 0.0)) || !(self.reference_mass > 0.0) {
            return Err(Error::InvalidArgument("masses must be positive".into()));
        }
        if !(self.omega_z > 0.0) {
            return Err(Error::InvalidArgument("omega_z must be positive".into()));
        }
        if !(self.laser_wavelength > 0.0) || !(0.0..=1.0).contains(&self.laser_axis_projection) {
            return Err(Error::InvalidArgument("invalid laser geometry".into()));
        }
        Ok(())
    }

    /// ℓ in metres.
    pub fn length_scale(&self) -> f64 {
        let m = self.reference_mass * ATOMIC_MASS_UNIT;
        let q2 = ELEMENTARY_CHARGE * ELEMENTARY_CHARGE;
        (q2 / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY * m * self.omega_z * self.omega_z)).cbrt()
    }

    pub fn k_z(&self) -> f64 {
        self.laser_axis_projection * 2.0 * std::f64::consts::PI / self.laser_wavelength
    }
}

#[derive(Clone, Debug)]
pub struct NormalModeResult {
    /// Equilibrium positions (m).
    pub equilibrium_positions: Vec<f64>,
    /// Axial mode frequencies, ascending (rad/s).
    pub mode_frequencies: Vec<f64>,
    /// `mode_matrix[(j, n)]`: mass-weighted amplitude of mode n at ion j.
    pub mode_matrix: DMatrix<f64>,
}

impl NormalModeResult {
    /// The highest-frequency mode, used as the dissipative mode.
    pub fn dissipative_mode(&self) -> usize {
        self.mode_frequencies.len() - 1
    }

    /// B̃ of the dissipative mode at the ancilla (ion 1) over that at the probe (ion 0).
    pub fn ancilla_probe_amplitude_ratio(&self) -> f64 {
        let n = self.dissipative_mode();
        self.mode_matrix[(1, n)] / self.mode_matrix[(0, n)]
    }
}

fn gradient(z: &[f64]) -> DVector<f64> {
    let n = z.len();
    DVector::from_fn(n, |i, _| {
        let mut g = z[i];
        for j in 0..n {
            if j != i {
                let d = z[i] - z[j];
                g -= d.signum() / (d * d);
            }
        }
        g
    })
}

fn hessian(z: &[f64]) -> DMatrix<f64> {
    let n = z.len();
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        h[(i, i)] = 1.0;
        for j in 0..n {
            if j != i {
                let c = 2.0 / (z[i] - z[j]).abs().powi(3);
                h[(i, i)] += c;
                h[(i, j)] = -c;
            }
        }
    }
    h
}

/// Equilibrium positions in units of ℓ, found by damped Newton iteration.
pub fn equilibrium_dimensionless(n_ions: usize) -> Result<Vec<f64>> {
    if n_ions < 2 {
        return Err(Error::InvalidArgument("need at least two ions".into()));
    }
    // equal spacing at roughly the central spacing of a homogeneous chain
    let spacing = 2.018 / (n_ions as f64).powf(0.559);
    let mut z: Vec<f64> = (0..n_ions).map(|j| (j as f64 - 0.5 * (n_ions - 1) as f64) * spacing).collect();
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let g = gradient(&z);
        let residual = g.amax();
        if residual < FORCE_TOLERANCE {
            return Ok(z);
        }
        let step = hessian(&z)
            .lu()
            .solve(&(-&g))
            .ok_or_else(|| Error::Convergence("singular Hessian in equilibrium search".into()))?;
        let mut damping = 1.0;
        loop {
            let trial: Vec<f64> = z.iter().zip(step.iter()).map(|(a, s)| a + damping * s).collect();
            let ordered = trial.windows(2).all(|w| w[1] > w[0]);
            if ordered && gradient(&trial).amax() < residual {
                z = trial;
                break;
            }
            damping *= 0.5;
            if damping < 1e-12 {
                // Newton has stalled at round-off level
                if residual < 1e3 * FORCE_TOLERANCE {
                    return Ok(z);
                }
                return Err(Error::Convergence("line search failed in equilibrium search".into()));
            }
        }
    }
    Err(Error::Convergence(format!("equilibrium not found in {MAX_NEWTON_ITERATIONS} iterations")))
}

/// Equilibrium positions in metres.
pub fn equilibrium_positions(config: &CrystalConfig) -> Result<Vec<f64>> {
    config.validate()?;
    let l = config.length_scale();
    Ok(equilibrium_dimensionless(config.masses.len())?.iter().map(|z| z * l).collect())
}

/// Axial normal modes from the mass-weighted Hessian at equilibrium.
pub fn normal_modes(config: &CrystalConfig) -> Result<NormalModeResult> {
    config.validate()?;
    let z = equilibrium_dimensionless(config.masses.len())?;
    let n = z.len();
    let mu: Vec<f64> = config.masses.iter().map(|m| m / config.reference_mass).collect();
    let h = hessian(&z);
    let k = DMatrix::from_fn(n, n, |i, j| h[(i, j)] / (mu[i] * mu[j]).sqrt());
    let eig = SymmetricEigen::new(k);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut freqs = Vec::with_capacity(n);
    let mut modes = DMatrix::zeros(n, n);
    for (col, &idx) in order.iter().enumerate() {
        let ev = eig.eigenvalues[idx];
        if !(ev > 0.0) {
            return Err(Error::Numerical(format!("unstable configuration: eigenvalue {ev}")));
        }
        freqs.push(config.omega_z * ev.sqrt());
        let mut v = eig.eigenvectors.column(idx).into_owned();
        // sign convention: largest component positive
        let lead = v.iter().copied().max_by(|a, b| a.abs().total_cmp(&b.abs())).unwrap_or(1.0);
        if lead < 0.0 {
            v = -v;
        }
        modes.set_column(col, &v);
    }
    let l = config.length_scale();
    Ok(NormalModeResult {
        equilibrium_positions: z.iter().map(|x| x * l).collect(),
        mode_frequencies: freqs,
        mode_matrix: modes,
    })
}

/// η_{jn} = k_z √(ħ/(2 m_j ω_n))
pub fn lamb_dicke(config: &CrystalConfig, ion: usize, mode: usize, modes: &NormalModeResult) -> Result<f64> {
    let m = *config
        .masses
        .get(ion)
        .ok_or_else(|| Error::InvalidArgument(format!("ion {ion} out of range")))?;
    let w = *modes
        .mode_frequencies
        .get(mode)
        .ok_or_else(|| Error::InvalidArgument(format!("mode {mode} out of range")))?;
    Ok(config.k_z() * (HBAR / (2.0 * m * ATOMIC_MASS_UNIT * w)).sqrt())
}

pub fn in_lamb_dicke_regime(eta: f64) -> bool {
    eta < LAMB_DICKE_LIMIT
}

/// Complex red-sideband couplings `λ_j = i B̃_{j3} η_{j3} Ω_j e^{i(k_z z_j + φ_j)}/2`
/// of the first `rabi.len()` ions to the dissipative mode.
pub fn spin_mode_coupling(
    config: &CrystalConfig,
    modes: &NormalModeResult,
    rabi: &[f64],
    phases: &[f64],
) -> Result<Vec<C64>> {
    if rabi.len() != phases.len() {
        return Err(Error::InvalidArgument("one phase per Rabi frequency".into()));
    }
    if rabi.len() > config.masses.len() {
        return Err(Error::InvalidArgument("more Rabi frequencies than ions".into()));
    }
    let n = modes.dissipative_mode();
    let kz = config.k_z();
    rabi.iter()
        .zip(phases)
        .enumerate()
        .map(|(j, (&omega_j, &phi))| {
            let b = modes.mode_matrix[(j, n)];
            let eta = lamb_dicke(config, j, n, modes)?;
            let phase = C64::from_polar(1.0, kz * modes.equilibrium_positions[j] + phi);
            Ok(C64::new(0.0, 0.5) * b * eta * omega_j * phase)
        })
        .collect()
}

/// Real couplings in the convention of the main model: |λ_j| with the sign
/// of B̃_{j3} relative to the probe ion.
pub fn signed_couplings(couplings: &[C64], modes: &NormalModeResult) -> Vec<f64> {
    let n = modes.dissipative_mode();
    let probe_sign = modes.mode_matrix[(0, n)].signum();
    couplings
        .iter()
        .enumerate()
        .map(|(j, c)| c.norm() * modes.mode_matrix[(j, n)].signum() * probe_sign)
        .collect()
}

/// Rabi frequencies that produce coupling magnitudes `|targets|` on the first ions.
pub fn rabi_for_couplings(config: &CrystalConfig, modes: &NormalModeResult, targets: &[f64]) -> Result<Vec<f64>> {
    let n = modes.dissipative_mode();
    targets
        .iter()
        .enumerate()
        .map(|(j, &target)| {
            let b = modes.mode_matrix[(j, n)];
            let eta = lamb_dicke(config, j, n, modes)?;
            if b == 0.0 || eta == 0.0 {
                return Err(Error::InvalidArgument(format!("ion {j} does not couple to the dissipative mode")));
            }
            Ok(2.0 * target.abs() / (b.abs() * eta))
        })
        .collect()
}
