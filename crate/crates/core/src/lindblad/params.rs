use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Rates and frequencies of the probe/ancilla/mode model, in angular units (rad/s).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Probe transition frequency ω.
    pub omega: f64,
    /// Ancilla transition frequency ω̃.
    pub omega_tilde: f64,
    /// Mode frequency ω_m.
    pub omega_m: f64,
    /// Probe–mode coupling λ.
    pub lambda: f64,
    /// Ancilla–mode coupling λ̃, may be negative.
    pub lambda_tilde: f64,
    /// Mode damping (cooling) rate Γ.
    pub gamma: f64,
    /// Spontaneous emission rate Γ_se of each qubit.
    pub gamma_se: f64,
    /// Mean occupation n̄ the cooling drives the mode to.
    pub n_bar: f64,
    /// Highest Fock level kept.
    pub n_max: usize,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let finite = [
            self.omega,
            self.omega_tilde,
            self.omega_m,
            self.lambda,
            self.lambda_tilde,
            self.gamma,
            self.gamma_se,
            self.n_bar,
        ];
        if finite.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidArgument("non-finite system parameter".into()));
        }
        if self.gamma < 0.0 || self.gamma_se < 0.0 || self.n_bar < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "rates and occupations must be non-negative (gamma={}, gamma_se={}, n_bar={})",
                self.gamma, self.gamma_se, self.n_bar
            )));
        }
        if self.n_max < 1 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        Ok(())
    }

    /// Same parameters with the ancilla on resonance with the probe.
    pub fn resonant(mut self) -> Self {
        self.omega_tilde = self.omega;
        self
    }

    /// Largest rate or frequency scale of the generator.
    pub fn fastest_scale(&self) -> f64 {
        [self.gamma, self.lambda.abs(), self.lambda_tilde.abs(), self.omega.abs(), self.omega_m.abs(), self.omega_tilde.abs()]
            .into_iter()
            .fold(0.0, f64::max)
    }
}
