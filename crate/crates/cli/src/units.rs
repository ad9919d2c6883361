use serde::{Deserialize, Serialize};

/// Unit system of the numbers in a configuration file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    /// Numbers are used as given.
    Reduced,
    /// Kelvin, kg, m, m⁻³ and charges in elementary charges.
    Si,
    /// Kelvin, g, cm, cm⁻³ and charges in elementary charges.
    Gaussian,
}

/// CODATA 2018 exact and recommended values.
mod si {
    pub const KB: f64 = 1.380_649e-23;
    pub const HBAR: f64 = 1.054_571_817e-34;
    pub const C: f64 = 299_792_458.0;
    pub const E: f64 = 1.602_176_634e-19;
    pub const EPS0: f64 = 8.854_187_812_8e-12;
}

mod gaussian {
    pub const KB: f64 = 1.380_649e-16;
    pub const HBAR: f64 = 1.054_571_817e-27;
    pub const C: f64 = 2.997_924_58e10;
    pub const E: f64 = 4.803_204_712_570_263e-10;
}

/// Map from physical input to the internal reduced system in which
/// `k_B T = 1`, `ħ = 1`, the elementary charge is 1 and lengths are measured
/// in Bjerrum lengths `ℓ_B = e²/k_BT` (Gaussian form).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Conversion {
    pub system: UnitSystem,
    /// Length unit in the input system (1 for reduced input).
    pub length_unit: f64,
    /// Force per area unit `k_BT/ℓ_B³` in the input system.
    pub pressure_unit: f64,
    /// Input mass per reduced mass unit.
    pub mass_unit: f64,
    /// Reduced speed of light `ħc/(k_BT ℓ_B)`.
    pub c_reduced: f64,
}

impl Conversion {
    pub fn reduced() -> Self {
        Self { system: UnitSystem::Reduced, length_unit: 1.0, pressure_unit: 1.0, mass_unit: 1.0, c_reduced: f64::NAN }
    }

    pub fn physical(system: UnitSystem, temperature: f64) -> Self {
        let (kb, hbar, c, e2) = match system {
            UnitSystem::Si => (si::KB, si::HBAR, si::C, si::E * si::E / (4.0 * std::f64::consts::PI * si::EPS0)),
            UnitSystem::Gaussian => (gaussian::KB, gaussian::HBAR, gaussian::C, gaussian::E * gaussian::E),
            UnitSystem::Reduced => return Self::reduced(),
        };
        let kt = kb * temperature;
        let l = e2 / kt;
        Self {
            system,
            length_unit: l,
            pressure_unit: kt / (l * l * l),
            mass_unit: hbar * hbar / (kt * l * l),
            c_reduced: hbar * c / (kt * l),
        }
    }

    pub fn length(&self, x: f64) -> f64 {
        x / self.length_unit
    }

    pub fn mass(&self, m: f64) -> f64 {
        m / self.mass_unit
    }

    pub fn density(&self, n: f64) -> f64 {
        n * self.length_unit.powi(3)
    }
}
