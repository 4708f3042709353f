//! Scenario configuration.
//!
//! Every frequency and rate in a config file is an ordinary frequency
//! ν = ω/2π in Hz; times are in seconds. JSON documents are merged onto the
//! defaults of their scenario, so a file only needs the keys it changes.

use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::ions::{CrystalConfig, MASS_CA40, MASS_MG24};
use crate::lindblad::SystemParams;
use crate::metrology::EstimationScenario;

pub const TWO_PI: f64 = 2.0 * PI;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Fig1,
    Fig2a,
    Fig2b,
    Evolve,
    Bound,
    Modes,
}

impl Scenario {
    pub const ALL: [Scenario; 6] =
        [Scenario::Fig1, Scenario::Fig2a, Scenario::Fig2b, Scenario::Evolve, Scenario::Bound, Scenario::Modes];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Fig1 => "fig1",
            Scenario::Fig2a => "fig2a",
            Scenario::Fig2b => "fig2b",
            Scenario::Evolve => "evolve",
            Scenario::Bound => "bound",
            Scenario::Modes => "modes",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// [`SystemParams`] with every frequency and rate given in Hz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrequencyParams {
    pub omega: f64,
    pub omega_tilde: f64,
    pub omega_m: f64,
    pub lambda: f64,
    pub lambda_tilde: f64,
    pub gamma: f64,
    pub gamma_se: f64,
    pub n_bar: f64,
    pub n_max: usize,
}

impl FrequencyParams {
    pub fn to_angular(&self) -> SystemParams {
        SystemParams {
            omega: TWO_PI * self.omega,
            omega_tilde: TWO_PI * self.omega_tilde,
            omega_m: TWO_PI * self.omega_m,
            lambda: TWO_PI * self.lambda,
            lambda_tilde: TWO_PI * self.lambda_tilde,
            gamma: TWO_PI * self.gamma,
            gamma_se: TWO_PI * self.gamma_se,
            n_bar: self.n_bar,
            n_max: self.n_max,
        }
    }

    /// Γ in rad/s.
    pub fn gamma_angular(&self) -> f64 {
        TWO_PI * self.gamma
    }
}

/// Probe frequency scan, in Hz.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scan {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Scan {
    /// Scan points converted to rad/s.
    pub fn omegas(&self) -> Vec<f64> {
        let n = self.points;
        (0..n)
            .map(|k| TWO_PI * (self.min + (self.max - self.min) * k as f64 / (n - 1) as f64))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Estimation {
    pub n_probes: u64,
    /// T (s).
    pub total_time: f64,
    /// t̄ (s).
    pub interrogation_time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrystalSettings {
    /// amu, probe first, then ancilla, then the coolant.
    pub masses: Vec<f64>,
    pub reference_mass: f64,
    /// ω_z/2π (Hz).
    pub axial_frequency: f64,
    /// m
    pub laser_wavelength: f64,
    pub laser_axis_projection: f64,
    /// Rabi frequencies Ω_j/2π on the qubit ions (Hz); derived from the
    /// target couplings when absent.
    pub rabi: Option<Vec<f64>>,
    pub phases: Option<Vec<f64>>,
}

impl CrystalSettings {
    pub fn to_crystal(&self) -> CrystalConfig {
        CrystalConfig {
            masses: self.masses.clone(),
            reference_mass: self.reference_mass,
            omega_z: TWO_PI * self.axial_frequency,
            laser_wavelength: self.laser_wavelength,
            laser_axis_projection: self.laser_axis_projection,
        }
    }
}

impl Default for CrystalSettings {
    fn default() -> Self {
        Self {
            masses: vec![MASS_CA40, MASS_CA40, MASS_MG24],
            reference_mass: MASS_CA40,
            axial_frequency: 1e6,
            laser_wavelength: 729e-9,
            laser_axis_projection: 1.0,
            rabi: None,
            phases: None,
        }
    }
}

/// Fully resolved scenario description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub params: FrequencyParams,
    /// Keep the ancilla on resonance with the probe while scanning ω.
    pub ancilla_tracks_probe: bool,
    pub scan: Option<Scan>,
    /// s
    pub t_final: f64,
    pub sample_count: usize,
    pub n_bar_list: Vec<f64>,
    pub estimation: Estimation,
    /// Also simulate the n̄ = 0, Γ_se = 0 reference.
    pub simulate_zero_temperature: bool,
    /// Largest probe number of the `fig1` sweep.
    pub max_probes: u64,
    /// Search window for the entangled-bound minimizer (s).
    pub bound_window: (f64, f64),
    /// Integrator step (s); a scale-based default is used when absent.
    pub dt: Option<f64>,
    pub crystal: CrystalSettings,
    pub output_dir: PathBuf,
}

const KHZ: f64 = 1e3;

fn fig2_params() -> FrequencyParams {
    FrequencyParams {
        omega: 0.0,
        omega_tilde: 0.0,
        omega_m: 0.0,
        lambda: 100.0,
        lambda_tilde: -290.0,
        gamma: KHZ,
        gamma_se: 0.14,
        n_bar: 0.0,
        n_max: 7,
    }
}

fn fig1_params() -> FrequencyParams {
    FrequencyParams {
        omega: 50.0,
        omega_tilde: 50.0,
        omega_m: 0.0,
        lambda: 300.0,
        lambda_tilde: 600.0,
        gamma: KHZ,
        gamma_se: 0.0,
        n_bar: 0.0,
        n_max: 7,
    }
}

impl ScenarioConfig {
    pub fn default_for(scenario: Scenario) -> Self {
        let gamma = TWO_PI * KHZ;
        let fig2 = Self {
            scenario,
            params: fig2_params(),
            ancilla_tracks_probe: true,
            scan: Some(Scan { min: -100.0, max: 100.0, points: 100 }),
            t_final: 180.0 / gamma,
            sample_count: 361,
            n_bar_list: vec![0.02, 0.05],
            estimation: Estimation { n_probes: 1, total_time: 1.0, interrogation_time: 120.0 / gamma },
            simulate_zero_temperature: true,
            max_probes: 12,
            bound_window: (1e-4 / gamma, 1e3 / gamma),
            dt: Some(0.05 / gamma),
            crystal: CrystalSettings::default(),
            output_dir: PathBuf::from("out"),
        };
        match scenario {
            Scenario::Fig2a | Scenario::Modes => fig2,
            Scenario::Fig2b => Self { t_final: 120.0 / gamma, sample_count: 2, ..fig2 },
            Scenario::Fig1 | Scenario::Bound => Self {
                params: fig1_params(),
                scan: None,
                t_final: 30.0 / gamma,
                sample_count: 2,
                n_bar_list: vec![],
                estimation: Estimation {
                    n_probes: if scenario == Scenario::Fig1 { 12 } else { 2 },
                    total_time: 1.0,
                    interrogation_time: 30.0 / gamma,
                },
                simulate_zero_temperature: false,
                dt: None,
                ..fig2
            },
            Scenario::Evolve => Self {
                params: fig1_params(),
                scan: None,
                t_final: 30.0 / gamma,
                sample_count: 301,
                n_bar_list: vec![],
                estimation: Estimation { n_probes: 1, total_time: 1.0, interrogation_time: 30.0 / gamma },
                simulate_zero_temperature: false,
                dt: None,
                ..fig2
            },
        }
    }

    /// Parses a JSON document and fills missing keys from the defaults of
    /// its scenario (or of `fallback` when the document names none).
    pub fn from_json(text: &str, fallback: Scenario) -> Result<Self> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid JSON: {e}")))?;
        if !doc.is_object() {
            return Err(Error::Config("config must be a JSON object".into()));
        }
        let scenario = match doc.get("scenario") {
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| Error::Config(format!("scenario: {e}")))?,
            None => fallback,
        };
        let mut merged = serde_json::to_value(Self::default_for(scenario)).expect("config serializes");
        merge(&mut merged, doc);
        let config: Self = serde_json::from_value(merged).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path, fallback: Scenario) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text, fallback)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        self.system_params().validate().map_err(|e| Error::Config(e.to_string()))?;
        if let Some(scan) = &self.scan {
            if scan.points < 3 || !(scan.max > scan.min) || !scan.min.is_finite() || !scan.max.is_finite() {
                return bad(format!("scan must be strictly increasing with at least 3 points: {scan:?}"));
            }
        }
        if self.sample_count < 2 {
            return bad("sample_count must be at least 2".into());
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return bad(format!("t_final = {}", self.t_final));
        }
        if self.n_bar_list.iter().any(|n| !(*n >= 0.0) || !n.is_finite()) {
            return bad("n_bar_list entries must be non-negative".into());
        }
        let e = &self.estimation;
        EstimationScenario::new(e.n_probes, e.total_time, e.interrogation_time)
            .map_err(|err| Error::Config(err.to_string()))?;
        if self.max_probes == 0 {
            return bad("max_probes must be positive".into());
        }
        let (lo, hi) = self.bound_window;
        if !(lo > 0.0) || !(hi > lo) {
            return bad(format!("bound_window = ({lo}, {hi})"));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return bad(format!("dt = {dt}"));
            }
        }
        let c = &self.crystal;
        c.to_crystal().validate().map_err(|err| Error::Config(err.to_string()))?;
        for list in [&c.rabi, &c.phases].into_iter().flatten() {
            if list.len() > c.masses.len() {
                return bad("more Rabi frequencies or phases than ions".into());
            }
        }
        Ok(())
    }

    pub fn system_params(&self) -> SystemParams {
        self.params.to_angular()
    }

    /// Parameters for one Ramsey point at probe frequency `omega` (rad/s).
    pub fn params_at(&self, omega: f64, n_bar: f64) -> SystemParams {
        let mut p = self.system_params();
        p.omega = omega;
        if self.ancilla_tracks_probe {
            p.omega_tilde = omega;
        }
        p.n_bar = n_bar;
        p
    }

    pub fn scan_omegas(&self) -> Result<Vec<f64>> {
        self.scan
            .as_ref()
            .map(Scan::omegas)
            .ok_or_else(|| Error::Config(format!("scenario {} needs a scan", self.scenario)))
    }

    /// Hex SHA-256 of the resolved config, excluding the output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = PathBuf::new();
        let text = serde_json::to_string(&canonical).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}
