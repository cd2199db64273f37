use crate::error::{Error, Result};

/// Boltzmann constant in J/K (exact SI value).
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Physical constants of a monatomic gas with power-law viscosity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasParams {
    /// kg
    pub molecular_mass: f64,
    /// J/K
    pub boltzmann: f64,
    /// Pa s
    pub mu_ref: f64,
    /// K
    pub t_ref: f64,
    /// exponent in `mu = mu_ref (T / T_ref)^index`
    pub viscosity_index: f64,
    /// m, hard-sphere diameter used for the mean free path
    pub molecular_diameter: f64,
}

impl GasParams {
    pub fn new(
        molecular_mass: f64,
        mu_ref: f64,
        t_ref: f64,
        viscosity_index: f64,
        molecular_diameter: f64,
    ) -> Result<Self> {
        let gas = GasParams {
            molecular_mass,
            boltzmann: BOLTZMANN,
            mu_ref,
            t_ref,
            viscosity_index,
            molecular_diameter,
        };
        gas.validate()?;
        Ok(gas)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("molecular_mass", self.molecular_mass),
            ("boltzmann", self.boltzmann),
            ("mu_ref", self.mu_ref),
            ("T_ref", self.t_ref),
            ("molecular_diameter", self.molecular_diameter),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::argument(format!(
                    "gas.{name} must be positive, got {value}"
                )));
            }
        }
        // zero is allowed: constant viscosity
        if !(self.viscosity_index >= 0.0 && self.viscosity_index.is_finite()) {
            return Err(Error::argument(format!(
                "gas.viscosity_index must be non-negative, got {}",
                self.viscosity_index
            )));
        }
        Ok(())
    }

    /// `k_B T / m`, the squared thermal speed.
    #[inline]
    pub fn thermal_speed_sq(&self, temperature: f64) -> f64 {
        self.boltzmann * temperature / self.molecular_mass
    }

    #[inline]
    pub fn viscosity(&self, temperature: f64) -> f64 {
        self.mu_ref * (temperature / self.t_ref).powf(self.viscosity_index)
    }

    /// Number density of an ideal gas, `p / (k_B T)`.
    #[inline]
    pub fn number_density(&self, pressure: f64, temperature: f64) -> f64 {
        pressure / (self.boltzmann * temperature)
    }
}
