//! Ramsey sequences on the probe qubit and ω sweeps over them.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lindblad::{build_ancilla_model, evolve_with, LindbladModel, SystemParams};
use crate::metrology::{ramsey_uncertainty, signal_derivative, slope_zeros};
use crate::quantum::{
    basis_state, qubit_superposition_state, thermal_state, operators::rotation, ComplexMatrix, DensityMatrix,
    ANCILLA, PROBE,
};
use crate::C64;

/// Largest population tolerated in the highest kept Fock level.
pub const FOCK_TAIL_LIMIT: f64 = 1e-6;

/// One Ramsey measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RamseyRecord {
    /// rad/s
    pub omega: f64,
    /// s
    pub time: f64,
    /// Excited-state probability of the probe after the second pulse.
    pub signal: f64,
    /// Δ²ω·T, `None` where it diverges or has not been computed.
    pub uncertainty: Option<f64>,
}

/// The instantaneous π/2 rotation used for both Ramsey pulses; takes |0⟩ to (|0⟩ + i|1⟩)/√2.
pub fn pi_half_pulse() -> ComplexMatrix {
    rotation(PI / 2.0, PI)
}

/// Applies the π/2 pulse to the probe factor of `rho`.
pub fn apply_pi_half_pulse(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let space = rho.space();
    if space.n_factors() < 2 || space.factor_dims()[PROBE] != 2 {
        return Err(Error::Dimension(format!(
            "pulse needs a qubit probe factor, got factors {:?}",
            space.factor_dims()
        )));
    }
    let u = space.embed(&pi_half_pulse(), PROBE)?;
    rho.conjugate_by(&u)
}

/// Qubits in |0⟩ and the mode thermal at `n_bar`, on the space of `model`.
pub fn ground_state(model: &LindbladModel, n_bar: f64) -> Result<DensityMatrix> {
    let space = model.space();
    let n_max = space.factor_dims()[space.mode_factor()] - 1;
    let mode = thermal_state(n_bar, n_max)?;
    let qubit = basis_state(2, 0)?;
    let mut factors: Vec<&DensityMatrix> = vec![&qubit; space.n_factors() - 1];
    factors.push(&mode);
    DensityMatrix::product(&factors)
}

fn fock_tail(rho: &DensityMatrix) -> Result<f64> {
    let mode_factor = rho.space().mode_factor();
    let reduced = rho.partial_trace(mode_factor)?;
    let top = reduced.dim() - 1;
    Ok(reduced.element(top, top).re)
}

fn check_fock_tail(t: f64, rho: &DensityMatrix) -> Result<()> {
    let tail = fock_tail(rho)?;
    if tail > FOCK_TAIL_LIMIT {
        return Err(Error::Numerical(format!(
            "Fock truncation: top level holds {tail:e} at t = {t:e}; raise n_max"
        )));
    }
    Ok(())
}

/// Ramsey signal at every sample time for one probe frequency.
///
/// The state evolves once under the probe/ancilla/mode model; at each sample
/// the second pulse is applied to a copy and the probe's excited population read.
pub fn run_ramsey_point(p: &SystemParams, times: &[f64], dt: f64) -> Result<Vec<RamseyRecord>> {
    let model = build_ancilla_model(p)?;
    let rho0 = apply_pi_half_pulse(&ground_state(&model, p.n_bar)?)?;
    let mut records = Vec::with_capacity(times.len());
    evolve_with(&model, &rho0, times, dt, |t, rho| {
        check_fock_tail(t, rho)?;
        let after = apply_pi_half_pulse(rho)?;
        let signal = after.partial_trace(PROBE)?.element(1, 1).re;
        records.push(RamseyRecord { omega: p.omega, time: t, signal, uncertainty: None });
        Ok(())
    })?;
    Ok(records)
}

/// Probe observables along one trajectory started from (|0⟩ + i|1⟩)/√2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoherenceSample {
    pub time: f64,
    /// ρ₁₀(t)/ρ₁₀(0) of the probe.
    pub coherence: C64,
    pub probe_excited: f64,
    /// `None` without an ancilla.
    pub ancilla_excited: Option<f64>,
    pub mode_occupation: f64,
}

/// Evolves the probe superposition (other qubits in |0⟩, mode thermal at
/// `n_bar`) and records its decoherence function.
pub fn probe_coherence(model: &LindbladModel, n_bar: f64, times: &[f64], dt: f64) -> Result<Vec<CoherenceSample>> {
    let space = model.space().clone();
    let ground = ground_state(model, n_bar)?;
    let mut factors = vec![qubit_superposition_state()];
    for k in 1..space.n_factors() {
        // reduced factors of a product state are the factors themselves
        factors.push(ground.partial_trace(k)?);
    }
    let refs: Vec<&DensityMatrix> = factors.iter().collect();
    let rho0 = DensityMatrix::product(&refs)?;
    let c0 = qubit_superposition_state().element(1, 0);
    let n_max = space.factor_dims()[space.mode_factor()] - 1;
    let number: Vec<f64> = (0..=n_max).map(|n| n as f64).collect();
    let has_ancilla = space.n_factors() == 3;
    let mut out = Vec::with_capacity(times.len());
    evolve_with(model, &rho0, times, dt, |t, rho| {
        let probe = rho.partial_trace(PROBE)?;
        let mode = rho.partial_trace(space.mode_factor())?;
        let ancilla_excited = if has_ancilla { Some(rho.partial_trace(ANCILLA)?.element(1, 1).re) } else { None };
        out.push(CoherenceSample {
            time: t,
            coherence: probe.element(1, 0) / c0,
            probe_excited: probe.element(1, 1).re,
            ancilla_excited,
            mode_occupation: number.iter().enumerate().map(|(n, &x)| x * mode.element(n, n).re).sum(),
        });
        Ok(())
    })?;
    Ok(out)
}

/// Ramsey signals on an ω grid, `signals[i][k]` at `omegas[i]` and `times[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct RamseySweep {
    pub omegas: Vec<f64>,
    pub times: Vec<f64>,
    pub signals: Vec<Vec<f64>>,
}

impl RamseySweep {
    /// Runs one trajectory per ω in parallel on the current rayon pool.
    ///
    /// Results are gathered in grid order, and each point is independent, so
    /// the output does not depend on the number of threads.
    pub fn run<F>(omegas: &[f64], times: &[f64], dt: f64, params_at: F) -> Result<Self>
    where
        F: Fn(f64) -> SystemParams + Sync,
    {
        let results: Vec<Result<Vec<RamseyRecord>>> =
            omegas.par_iter().map(|&w| run_ramsey_point(&params_at(w), times, dt)).collect();
        let mut signals = Vec::with_capacity(omegas.len());
        for r in results {
            signals.push(r?.into_iter().map(|rec| rec.signal).collect());
        }
        Ok(Self { omegas: omegas.to_vec(), times: times.to_vec(), signals })
    }

    pub fn signals_at(&self, time_index: usize) -> Vec<f64> {
        self.signals.iter().map(|s| s[time_index]).collect()
    }

    /// Records with Δ²ω·T from finite differences across ω. Points where
    /// the slope vanishes carry no uncertainty.
    pub fn records_at(&self, time_index: usize, n_probes: f64, total_time: f64) -> Result<Vec<RamseyRecord>> {
        let t = self.times[time_index];
        let grid: Vec<(f64, f64)> = self.omegas.iter().copied().zip(self.signals_at(time_index)).collect();
        let slopes: Vec<f64> = signal_derivative(&grid)?.into_iter().map(|(_, d)| d).collect();
        let zeros = slope_zeros(&slopes);
        Ok(grid
            .iter()
            .zip(slopes.iter().zip(zeros))
            .map(|(&(omega, signal), (&slope, zero))| {
                let u = ramsey_uncertainty(signal, slope, t, n_probes, total_time) * total_time;
                let uncertainty = (!zero && u.is_finite() && t > 0.0).then_some(u);
                RamseyRecord { omega, time: t, signal, uncertainty }
            })
            .collect())
    }

    /// Smallest Δ²ω·T over the ω grid at each sample time.
    pub fn optimal_uncertainty(&self, n_probes: f64, total_time: f64) -> Result<Vec<Option<f64>>> {
        (0..self.times.len())
            .map(|k| {
                let recs = self.records_at(k, n_probes, total_time)?;
                Ok(recs.iter().filter_map(|r| r.uncertainty).min_by(f64::total_cmp))
            })
            .collect()
    }
}
