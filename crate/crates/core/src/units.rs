//! Conversion from laboratory quantities to the dimensionless couplings
//! `ω/B = μ E / (hc B̃)` and `Ω/B = μ² / (4π ε₀ r³ hc B̃)`.
//!
//! Constants are CODATA 2018 exact or recommended values.

use crate::error::{Error, Result};

/// Planck constant, J s (exact).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Speed of light, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
/// One debye, C m (`1e-21 / c`).
pub const DEBYE: f64 = 1e-21 / SPEED_OF_LIGHT;
/// Energy of one wavenumber, J per cm⁻¹.
pub const HC_PER_CM: f64 = PLANCK * SPEED_OF_LIGHT * 100.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams {
    /// Debye.
    pub dipole_moment: f64,
    /// kV/cm.
    pub field_strength: f64,
    /// nm.
    pub separation: f64,
    /// cm⁻¹.
    pub rotational_constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedCouplings {
    pub omega_over_b: f64,
    pub coupling_over_b: f64,
}

pub fn convert_units(phys: &PhysicalParams) -> Result<ReducedCouplings> {
    let fields = [
        ("dipole moment", phys.dipole_moment),
        ("field strength", phys.field_strength),
        ("separation", phys.separation),
        ("rotational constant", phys.rotational_constant),
    ];
    for (name, value) in fields {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::invalid(format!("{name} must be finite and > 0, got {value}")));
        }
    }
    let mu = phys.dipole_moment * DEBYE;
    let field = phys.field_strength * 1e5; // kV/cm -> V/m
    let r = phys.separation * 1e-9;
    let b = phys.rotational_constant * HC_PER_CM;
    Ok(ReducedCouplings {
        omega_over_b: mu * field / b,
        coupling_over_b: mu * mu / (4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY * r.powi(3) * b),
    })
}
