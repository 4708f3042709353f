//! Scenario runners. Each returns its CSV tables and a short text report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::analytic::{c_infinity, f_basic, f_tilde};
use crate::error::{Error, Result};
use crate::ions::{
    in_lamb_dicke_regime, lamb_dicke, normal_modes, rabi_for_couplings, signed_couplings, spin_mode_coupling,
};
use crate::lindblad::{build_ancilla_model, default_dt, uniform_samples, SystemParams};
use crate::metrology::{asymptotic_entangled_error, ct_min_error, gain, minimize_bound};

use super::config::{Scenario, ScenarioConfig, TWO_PI};
use super::csv::{finite, CsvTable};
use super::ramsey::{probe_coherence, RamseySweep};

#[derive(Clone, Debug)]
pub struct ScenarioOutput {
    /// `(file name, table)` pairs.
    pub tables: Vec<(String, CsvTable)>,
    pub report: String,
}

impl ScenarioOutput {
    pub fn table(&self, file_name: &str) -> Option<&CsvTable> {
        self.tables.iter().find(|(name, _)| name == file_name).map(|(_, t)| t)
    }

    /// Writes every table plus the resolved config; returns the written paths.
    pub fn write(&self, config: &ScenarioConfig, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for (name, table) in &self.tables {
            let path = dir.join(name);
            table.write(&path)?;
            paths.push(path);
        }
        let path = dir.join(format!("{}.config.json", config.scenario));
        std::fs::write(&path, config.to_json_pretty() + "\n")?;
        paths.push(path);
        Ok(paths)
    }
}

pub fn provenance(config: &ScenarioConfig) -> String {
    format!(
        "config_sha256={} version={} scenario={}",
        config.hash(),
        env!("CARGO_PKG_VERSION"),
        config.scenario
    )
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    config.validate()?;
    match config.scenario {
        Scenario::Fig1 => run_fig1(config),
        Scenario::Fig2a => run_fig2a(config),
        Scenario::Fig2b => run_fig2b(config),
        Scenario::Evolve => run_evolve(config),
        Scenario::Bound => run_bound(config),
        Scenario::Modes => run_modes(config),
    }
}

fn step(config: &ScenarioConfig, p: &SystemParams) -> f64 {
    config.dt.unwrap_or_else(|| default_dt(p))
}

fn n_bar_label(n_bar: f64) -> String {
    format!("ct_nbar_{n_bar}")
}

/// Entangled bound and trapping error versus probe number, both in units of Γ.
pub fn run_fig1(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let p = config.system_params();
    let gamma = p.gamma;
    let est = config.estimation;
    let t_bar = est.interrogation_time;
    let c_inf = c_infinity(p.lambda, p.lambda_tilde)?;
    let headers = ["N", "ent_bound_2N (Gamma)", "ct_error_N (Gamma)", "gain", "ent_asymptotic_2N (Gamma)", "t_opt_2N (1/Gamma)"];
    let mut table = CsvTable::new(provenance(config), headers.iter().map(|h| h.to_string()).collect());
    let mut report = String::new();
    writeln!(report, "C_inf = {c_inf}, Gamma*t_bar = {}", gamma * t_bar).ok();
    let mut last_winner = None;
    for n in 1..=config.max_probes {
        let nf = n as f64;
        let curve = minimize_bound(&p, 2.0 * nf, est.total_time, config.bound_window)?;
        let ct = ct_min_error(nf, est.total_time, t_bar, c_inf) * est.total_time;
        let g = gain(nf, t_bar, p.lambda, p.lambda_tilde)?;
        let asym = asymptotic_entangled_error(2.0 * nf, 1.0, p.lambda);
        table.push(vec![
            Some(nf),
            finite(curve.value_at_min / gamma),
            finite(ct / gamma),
            finite(g),
            finite(asym / gamma),
            finite(curve.t_opt * gamma),
        ])?;
        if ct < curve.value_at_min {
            last_winner = Some(n);
        }
    }
    match last_winner {
        Some(n) => writeln!(report, "trapping beats the 2N-qubit entangled bound up to N = {n}").ok(),
        None => writeln!(report, "trapping never beats the 2N-qubit entangled bound").ok(),
    };
    Ok(ScenarioOutput { tables: vec![("fig1.csv".into(), table)], report })
}

/// Best entangled-strategy Δ²ω·T over the scan grid, with 2N qubits.
pub fn entangled_reference(config: &ScenarioConfig) -> Result<f64> {
    let est = config.estimation;
    let mut best = f64::INFINITY;
    for w in config.scan_omegas()? {
        let p = config.params_at(w, 0.0);
        let curve = minimize_bound(&p, 2.0 * est.n_probes as f64, est.total_time, config.bound_window)?;
        best = best.min(curve.value_at_min);
    }
    Ok(best)
}

struct Fig2Sweeps {
    labels: Vec<String>,
    sweeps: Vec<RamseySweep>,
}

fn fig2_sweeps(config: &ScenarioConfig, times: &[f64]) -> Result<Fig2Sweeps> {
    let omegas = config.scan_omegas()?;
    let mut labels = Vec::new();
    let mut sweeps = Vec::new();
    if config.simulate_zero_temperature {
        let dt = step(config, &config.params_at(omegas[0], 0.0));
        sweeps.push(RamseySweep::run(&omegas, times, dt, |w| SystemParams {
            gamma_se: 0.0,
            ..config.params_at(w, 0.0)
        })?);
        labels.push("ct_zero_T_sim".to_string());
    }
    for &n_bar in &config.n_bar_list {
        let dt = step(config, &config.params_at(omegas[0], n_bar));
        sweeps.push(RamseySweep::run(&omegas, times, dt, |w| config.params_at(w, n_bar))?);
        labels.push(n_bar_label(n_bar));
    }
    Ok(Fig2Sweeps { labels, sweeps })
}

/// Optimal Ramsey uncertainty versus interrogation time.
pub fn run_fig2a(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let p = config.system_params();
    let est = config.estimation;
    let n = est.n_probes as f64;
    let times = uniform_samples(config.t_final, config.sample_count);
    let Fig2Sweeps { labels, sweeps } = fig2_sweeps(config, &times)?;
    let curves: Vec<Vec<Option<f64>>> =
        sweeps.iter().map(|s| s.optimal_uncertainty(n, est.total_time)).collect::<Result<_>>()?;
    let c_inf = c_infinity(p.lambda, p.lambda_tilde)?;
    let ent = entangled_reference(config)?;

    let mut headers = vec!["t (s)".to_string(), "gamma_t".to_string()];
    headers.extend(labels.iter().map(|l| format!("{l} (rad^2/s)")));
    headers.push("ct_zero_T (rad^2/s)".into());
    headers.push("ent_bound (rad^2/s)".into());
    let mut table = CsvTable::new(provenance(config), headers);
    for (k, &t) in times.iter().enumerate() {
        let mut row = vec![Some(t), Some(p.gamma * t)];
        row.extend(curves.iter().map(|c| c[k]));
        row.push(finite(ct_min_error(n, est.total_time, t, c_inf) * est.total_time));
        row.push(finite(ent));
        table.push(row)?;
    }

    let mut report = String::new();
    writeln!(report, "C_inf = {c_inf}, entangled reference = {ent} rad^2/s").ok();
    for (label, curve) in labels.iter().zip(&curves) {
        match first_crossing(&times, curve, ent) {
            Some(t) => writeln!(report, "{label}: below entangled reference from Gamma*t = {:.2}", p.gamma * t).ok(),
            None => writeln!(report, "{label}: never below entangled reference").ok(),
        };
    }
    Ok(ScenarioOutput { tables: vec![("fig2a.csv".into(), table)], report })
}

/// First sample time after which `curve` stays below `level`, interpolated linearly.
pub fn first_crossing(times: &[f64], curve: &[Option<f64>], level: f64) -> Option<f64> {
    let last_above = curve.iter().rposition(|c| c.map_or(true, |v| v >= level))?;
    if last_above + 1 >= curve.len() {
        return None;
    }
    let (t0, t1) = (times[last_above], times[last_above + 1]);
    let v1 = curve[last_above + 1]?;
    match curve[last_above] {
        Some(v0) if v0.is_finite() && v0 != v1 => Some(t0 + (t1 - t0) * (v0 - level) / (v0 - v1)),
        _ => Some(t1),
    }
}

/// Uncertainty versus probe frequency at a fixed interrogation time.
pub fn run_fig2b(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let p = config.system_params();
    let est = config.estimation;
    let t_bar = est.interrogation_time;
    let times = [t_bar];
    let Fig2Sweeps { labels, sweeps } = fig2_sweeps(config, &times)?;
    let records: Vec<_> =
        sweeps.iter().map(|s| s.records_at(0, est.n_probes as f64, est.total_time)).collect::<Result<_>>()?;

    let mut headers = vec!["nu (Hz)".to_string(), "omega (rad/s)".to_string(), "omega_t (rad)".to_string()];
    for l in &labels {
        headers.push(format!("{l} (rad^2/s)"));
        headers.push(format!("signal_{}", l.trim_start_matches("ct_")));
    }
    let mut table = CsvTable::new(provenance(config), headers);
    let omegas = config.scan_omegas()?;
    for (i, &w) in omegas.iter().enumerate() {
        let mut row = vec![Some(w / TWO_PI), Some(w), Some(w * t_bar)];
        for recs in &records {
            row.push(recs[i].uncertainty);
            row.push(Some(recs[i].signal));
        }
        table.push(row)?;
    }
    let mut report = String::new();
    writeln!(report, "Gamma*t_bar = {}", p.gamma * t_bar).ok();
    for (label, recs) in labels.iter().zip(&records) {
        let gaps = recs.iter().filter(|r| r.uncertainty.is_none()).count();
        writeln!(report, "{label}: {gaps} divergent grid points").ok();
    }
    Ok(ScenarioOutput { tables: vec![("fig2b.csv".into(), table)], report })
}

/// One trajectory of the probe decoherence function against the
/// single-excitation amplitude solution.
pub fn run_evolve(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let p = config.system_params();
    let model = build_ancilla_model(&p)?;
    let times = uniform_samples(config.t_final, config.sample_count);
    let samples = probe_coherence(&model, p.n_bar, &times, step(config, &p))?;
    let headers = [
        "t (s)",
        "gamma_t",
        "coherence_re",
        "coherence_im",
        "coherence_abs",
        "single_excitation_re",
        "single_excitation_im",
        "probe_excited",
        "ancilla_excited",
        "mode_occupation",
    ];
    let mut table = CsvTable::new(provenance(config), headers.iter().map(|h| h.to_string()).collect());
    let mut worst: f64 = 0.0;
    for s in &samples {
        let reference = f_tilde(s.time, &p)?;
        worst = worst.max((s.coherence - reference).norm());
        table.push(vec![
            Some(s.time),
            Some(p.gamma * s.time),
            Some(s.coherence.re),
            Some(s.coherence.im),
            Some(s.coherence.norm()),
            Some(reference.re),
            Some(reference.im),
            Some(s.probe_excited),
            s.ancilla_excited,
            Some(s.mode_occupation),
        ])?;
    }
    let report = format!("max |f_sim - f_single_excitation| = {worst:e}\n");
    Ok(ScenarioOutput { tables: vec![("evolve.csv".into(), table)], report })
}

/// The entangled bound as a function of interrogation time.
pub fn run_bound(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let p = config.system_params();
    let est = config.estimation;
    let n = est.n_probes as f64;
    let curve = minimize_bound(&p, n, est.total_time, config.bound_window)?;
    let headers = ["t (s)", "gamma_t", "bound (rad^2/s)", "f_abs"];
    let mut table = CsvTable::new(provenance(config), headers.iter().map(|h| h.to_string()).collect());
    for (&t, &v) in curve.times.iter().zip(&curve.values) {
        table.push(vec![Some(t), Some(p.gamma * t), finite(v), Some(f_basic(t, &p).norm())])?;
    }
    let report = format!(
        "N = {n}: t_opt = {:e} s (Gamma*t_opt = {}), min = {:e} rad^2/s, large-N law = {:e} rad^2/s\n",
        curve.t_opt,
        p.gamma * curve.t_opt,
        curve.value_at_min,
        asymptotic_entangled_error(n, 1.0, p.lambda)
    );
    Ok(ScenarioOutput { tables: vec![("bound.csv".into(), table)], report })
}

/// Normal modes of the crystal and the couplings they imply.
pub fn run_modes(config: &ScenarioConfig) -> Result<ScenarioOutput> {
    let settings = &config.crystal;
    let crystal = settings.to_crystal();
    let modes = normal_modes(&crystal)?;
    let n_ions = crystal.masses.len();
    let dissipative = modes.dissipative_mode();
    let p = config.system_params();

    let mut headers = vec!["mode".to_string(), "frequency (Hz)".to_string()];
    headers.extend((0..n_ions).map(|j| format!("b_ion{j}")));
    headers.extend((0..n_ions).map(|j| format!("eta_ion{j}")));
    let mut table = CsvTable::new(provenance(config), headers);
    for (n, &w) in modes.mode_frequencies.iter().enumerate() {
        let mut row = vec![Some(n as f64), Some(w / TWO_PI)];
        row.extend((0..n_ions).map(|j| Some(modes.mode_matrix[(j, n)])));
        for j in 0..n_ions {
            row.push(Some(lamb_dicke(&crystal, j, n, &modes)?));
        }
        table.push(row)?;
    }

    let mut report = String::new();
    let um: Vec<String> = modes.equilibrium_positions.iter().map(|z| format!("{:.4}", z * 1e6)).collect();
    writeln!(report, "equilibrium positions (um): {}", um.join(", ")).ok();
    let mhz: Vec<String> = modes.mode_frequencies.iter().map(|w| format!("{:.4}", w / TWO_PI / 1e6)).collect();
    writeln!(report, "mode frequencies (MHz): {}", mhz.join(", ")).ok();
    writeln!(report, "mode amplitudes (rows ion, columns mode):").ok();
    for j in 0..n_ions {
        let row: Vec<String> = (0..n_ions).map(|n| format!("{:+.4}", modes.mode_matrix[(j, n)])).collect();
        writeln!(report, "  {}", row.join("  ")).ok();
    }
    writeln!(report, "dissipative mode ancilla/probe amplitude ratio: {:.4}", modes.ancilla_probe_amplitude_ratio())
        .ok();
    for j in 0..n_ions {
        let eta = lamb_dicke(&crystal, j, dissipative, &modes)?;
        let flag = if in_lamb_dicke_regime(eta) { "" } else { " (outside Lamb-Dicke regime)" };
        writeln!(report, "eta[ion {j}, dissipative mode] = {eta:.4}{flag}").ok();
    }

    let n_qubits = 2.min(n_ions);
    let rabi: Vec<f64> = match &settings.rabi {
        Some(hz) => hz.iter().map(|r| TWO_PI * r).collect(),
        None => rabi_for_couplings(&crystal, &modes, &[p.lambda, p.lambda_tilde][..n_qubits])?,
    };
    let phases = settings.phases.clone().unwrap_or_else(|| vec![0.0; rabi.len()]);
    if phases.len() != rabi.len() {
        return Err(Error::Config(format!("{} Rabi frequencies but {} phases", rabi.len(), phases.len())));
    }
    let couplings = spin_mode_coupling(&crystal, &modes, &rabi, &phases)?;
    let signed = signed_couplings(&couplings, &modes);
    for (j, ((r, c), s)) in rabi.iter().zip(&couplings).zip(&signed).enumerate() {
        writeln!(
            report,
            "ion {j}: Rabi/2pi = {:.3} Hz, lambda/2pi = {:.3}{:+.3}i Hz (signed {:.3} Hz)",
            r / TWO_PI,
            c.re / TWO_PI,
            c.im / TWO_PI,
            s / TWO_PI
        )
        .ok();
    }
    Ok(ScenarioOutput { tables: vec![("modes.csv".into(), table)], report })
}
