use crate::error::{param, Result};

/// Thermodynamic state and physical constants (Gaussian-type unit system).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThermoState {
    pub beta: f64,
    pub hbar: f64,
    pub c: f64,
    pub kb: f64,
}

impl ThermoState {
    pub fn new(beta: f64, hbar: f64, c: f64, kb: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("hbar", hbar), ("c", c), ("kB", kb)] {
            if !(v.is_finite() && v > 0.0) {
                return param(format!("{name} must be finite and positive, got {v}"));
            }
        }
        Ok(Self { beta, hbar, c, kb })
    }

    /// Reduced units with `k_B = 1`.
    pub fn reduced(beta: f64, hbar: f64, c: f64) -> Result<Self> {
        Self::new(beta, hbar, c, 1.0)
    }

    /// Photon thermal length `β ħ c`.
    pub fn lambda_ph(&self) -> f64 {
        self.beta * self.hbar * self.c
    }

    pub fn temperature(&self) -> f64 {
        1.0 / (self.kb * self.beta)
    }

    /// De Broglie thermal length `ħ √(β/m)`.
    pub fn de_broglie(&self, mass: f64) -> f64 {
        self.hbar * (self.beta / mass).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    pub fn eta(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }
}

/// Microscopic constants of one particle species.
#[derive(Clone, Debug, PartialEq)]
pub struct SpeciesParams {
    pub name: String,
    pub charge: f64,
    pub mass: f64,
    pub spin: f64,
    pub statistics: Statistics,
    pub chemical_potential: f64,
    /// De Broglie length, fixed at construction from the thermodynamic state.
    pub lambda: f64,
}

impl SpeciesParams {
    pub fn new(
        name: impl Into<String>,
        charge: f64,
        mass: f64,
        spin: f64,
        statistics: Statistics,
        chemical_potential: f64,
        thermo: &ThermoState,
    ) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return param(format!("mass must be positive, got {mass}"));
        }
        if !charge.is_finite() {
            return param("charge must be finite");
        }
        if !(spin >= 0.0 && (2.0 * spin).fract() == 0.0) {
            return param(format!("spin must be a non-negative half-integer, got {spin}"));
        }
        if !chemical_potential.is_finite() {
            return param("chemical potential must be finite");
        }
        Ok(Self {
            name: name.into(),
            charge,
            mass,
            spin,
            statistics,
            chemical_potential,
            lambda: thermo.de_broglie(mass),
        })
    }
}
