//! Physical constants and unit conversion.
//!
//! Everything inside the engine is expressed in natural units with
//! `k_B = ħ = c = 1`. The base unit is the metre: lengths are in m, while
//! frequencies, temperatures and energies all share the dimension of an
//! inverse length (1/m). Free energy per unit area is then 1/m³, pressure
//! 1/m⁴ and entropy per unit area 1/m².
//!
//! Constants are CODATA 2018.

use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, CasimirError, Result};

/// Reduced Planck constant (J·s)
pub const HBAR: f64 = 1.054_571_817e-34;

/// Speed of light in vacuum (m/s)
pub const C: f64 = 299_792_458.0;

/// Boltzmann constant (J/K)
pub const K_B: f64 = 1.380_649e-23;

/// Elementary charge (C), i.e. joules per electronvolt
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

/// Riemann zeta(3)
pub const ZETA3: f64 = 1.202_056_903_159_594_2;

pub const PI: f64 = std::f64::consts::PI;

/// ħc in J·m; converts 1/m to joules.
pub const HBAR_C: f64 = HBAR * C;

/// Constant table handed to callers that want the values as data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub k_b: f64,
    pub zeta3: f64,
    pub pi: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    hbar: HBAR,
    c: C,
    k_b: K_B,
    zeta3: ZETA3,
    pi: PI,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Dimension {
    Frequency,
    Temperature,
    Length,
    EnergyPerArea,
    PressureUnits,
    EntropyPerArea,
    Dimensionless,
}

impl Dimension {
    fn name(self) -> &'static str {
        match self {
            Dimension::Frequency => "frequency",
            Dimension::Temperature => "temperature",
            Dimension::Length => "length",
            Dimension::EnergyPerArea => "energy-per-area",
            Dimension::PressureUnits => "pressure",
            Dimension::EntropyPerArea => "entropy-per-area",
            Dimension::Dimensionless => "dimensionless",
        }
    }

    /// Frequency and temperature are the same natural dimension (1/m).
    fn is_inverse_length(self) -> bool {
        matches!(self, Dimension::Frequency | Dimension::Temperature)
    }
}

/// Laboratory units accepted at the boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    ElectronVolt,
    RadPerSecond,
    Kelvin,
    Meter,
    Micrometer,
    Nanometer,
}

impl Unit {
    pub const ALL: [Unit; 6] = [
        Unit::ElectronVolt,
        Unit::RadPerSecond,
        Unit::Kelvin,
        Unit::Meter,
        Unit::Micrometer,
        Unit::Nanometer,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Unit::ElectronVolt => "eV",
            Unit::RadPerSecond => "rad/s",
            Unit::Kelvin => "K",
            Unit::Meter => "m",
            Unit::Micrometer => "um",
            Unit::Nanometer => "nm",
        }
    }

    fn dimension(self) -> Dimension {
        match self {
            Unit::ElectronVolt | Unit::RadPerSecond => Dimension::Frequency,
            Unit::Kelvin => Dimension::Temperature,
            Unit::Meter | Unit::Micrometer | Unit::Nanometer => Dimension::Length,
        }
    }

    /// Natural-unit value of one of this unit.
    fn scale(self) -> f64 {
        match self {
            Unit::ElectronVolt => ELEMENTARY_CHARGE / HBAR_C,
            Unit::RadPerSecond => 1.0 / C,
            Unit::Kelvin => K_B / HBAR_C,
            Unit::Meter => 1.0,
            Unit::Micrometer => 1e-6,
            Unit::Nanometer => 1e-9,
        }
    }
}

impl fmt::Display for Unit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl FromStr for Unit {
    type Err = CasimirError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "eV" => Ok(Unit::ElectronVolt),
            "rad/s" => Ok(Unit::RadPerSecond),
            "K" => Ok(Unit::Kelvin),
            "m" => Ok(Unit::Meter),
            "um" | "μm" | "µm" => Ok(Unit::Micrometer),
            "nm" => Ok(Unit::Nanometer),
            other => Err(CasimirError::UnknownUnit(other.to_string())),
        }
    }
}

/// A value in natural units tagged with its dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quantity {
    pub value: f64,
    pub dimension: Dimension,
}

impl Quantity {
    pub fn new(value: f64, dimension: Dimension) -> Self {
        Self { value, dimension }
    }

    /// Expresses this quantity in `unit`.
    pub fn to_si(self, unit: Unit) -> Result<f64> {
        let target = unit.dimension();
        let compatible = self.dimension == target
            || (self.dimension.is_inverse_length() && target.is_inverse_length());
        if !compatible {
            return Err(CasimirError::DimensionMismatch {
                from: self.dimension.name(),
                to: unit.symbol(),
            });
        }
        Ok(self.value / unit.scale())
    }
}

/// Converts a laboratory value into natural units.
pub fn from_si(value: f64, unit: Unit) -> Quantity {
    Quantity::new(value * unit.scale(), unit.dimension())
}

/// Parses the unit tag and converts; unknown tags are rejected.
pub fn from_si_tagged(value: f64, unit: &str) -> Result<Quantity> {
    Ok(from_si(value, unit.parse()?))
}

/// `T_eff = 1/(2a)`, the thermal scale set by the plate separation.
pub fn effective_temperature(separation: Quantity) -> Result<Quantity> {
    if separation.dimension != Dimension::Length {
        return Err(invalid("a", "separation must be a length"));
    }
    if !(separation.value > 0.0) || !separation.value.is_finite() {
        return Err(invalid(
            "a",
            format!("separation must be positive, got {}", separation.value),
        ));
    }
    Ok(Quantity::new(
        1.0 / (2.0 * separation.value),
        Dimension::Temperature,
    ))
}

/// Free energy per area: 1/m³ to J/m².
pub fn energy_per_area_to_si(value: f64) -> f64 {
    value * HBAR_C
}

/// Pressure: 1/m⁴ to Pa.
pub fn pressure_to_si(value: f64) -> f64 {
    value * HBAR_C
}

/// Entropy per area: 1/m² to J/(m²·K).
pub fn entropy_per_area_to_si(value: f64) -> f64 {
    value * K_B
}

pub fn kelvin(t: f64) -> f64 {
    t * Unit::Kelvin.scale()
}

pub fn to_kelvin(t: f64) -> f64 {
    t / Unit::Kelvin.scale()
}

pub fn micrometres(a: f64) -> f64 {
    a * 1e-6
}

pub fn to_micrometres(a: f64) -> f64 {
    a * 1e6
}

pub fn electronvolts(e: f64) -> f64 {
    e * Unit::ElectronVolt.scale()
}

pub fn rad_per_second(w: f64) -> f64 {
    w * Unit::RadPerSecond.scale()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn zeta3_matches_truncated_series() {
        // summed from the small end for accuracy
        let sum: f64 = (1..=1_000_000u64).rev().map(|n| (n as f64).powi(-3)).sum();
        assert!((sum - ZETA3).abs() < 1e-12, "{sum} vs {ZETA3}");
    }

    #[test]
    fn plasma_frequency_of_gold() {
        let wp = from_si(9.0, Unit::ElectronVolt);
        assert_eq!(wp.dimension, Dimension::Frequency);
        // ω_p = 9 eV / ħc with ħc = 197.3269804 eV nm
        assert_relative_eq!(wp.value, 9.0 / 197.326_980_4e-9, max_relative = 1e-9);
    }

    #[test]
    fn zero_kelvin() {
        let t = from_si(0.0, Unit::Kelvin);
        assert_eq!(t.value, 0.0);
        assert_eq!(t.dimension, Dimension::Temperature);
    }

    #[test]
    fn relaxation_anchors_agree() {
        let a = from_si(5.32e13, Unit::RadPerSecond);
        let b = from_si(35e-3, Unit::ElectronVolt);
        assert_eq!(a.dimension, b.dimension);
        assert!(((a.value - b.value) / b.value).abs() < 5e-3);
    }

    #[test]
    fn unknown_unit_rejected() {
        assert!(matches!(
            from_si_tagged(1.0, "furlong"),
            Err(CasimirError::UnknownUnit(_))
        ));
        assert!(from_si_tagged(1.0, "μm").is_ok());
    }

    #[test]
    fn effective_temperature_at_one_micron() {
        let teff = effective_temperature(from_si(1.0, Unit::Micrometer)).unwrap();
        // ħc/(2 a k_B) from ħc = 197.3269804 eV nm, k_B = 8.617333262e-5 eV/K
        let expected = 197.326_980_4e-9 / (2.0 * 1e-6 * 8.617_333_262e-5);
        assert_relative_eq!(
            teff.to_si(Unit::Kelvin).unwrap(),
            expected,
            max_relative = 1e-9
        );
        assert!((teff.to_si(Unit::Kelvin).unwrap() - 1145.0).abs() < 1.0);

        let half = effective_temperature(from_si(2.0, Unit::Micrometer)).unwrap();
        let double = effective_temperature(from_si(0.5, Unit::Micrometer)).unwrap();
        assert_relative_eq!(half.value * 2.0, teff.value, max_relative = 1e-15);
        assert_relative_eq!(double.value, 2.0 * teff.value, max_relative = 1e-15);
    }

    #[test]
    fn effective_temperature_rejects_nonpositive() {
        assert!(effective_temperature(from_si(0.0, Unit::Meter)).is_err());
        assert!(effective_temperature(from_si(-1.0, Unit::Micrometer)).is_err());
        assert!(effective_temperature(from_si(1.0, Unit::Kelvin)).is_err());
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let len = from_si(1.0, Unit::Micrometer);
        assert!(len.to_si(Unit::Kelvin).is_err());
        // temperature and frequency share a natural dimension
        let t = from_si(300.0, Unit::Kelvin);
        assert!(t.to_si(Unit::ElectronVolt).is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn round_trip(value in 1e-12f64..1e15, idx in 0usize..6) {
                let unit = Unit::ALL[idx];
                let back = from_si(value, unit).to_si(unit).unwrap();
                prop_assert!(((back - value) / value).abs() <= 1e-12);
            }

            #[test]
            fn teff_times_two_a_is_one(a in 1e-9f64..1e-3) {
                let teff = effective_temperature(Quantity::new(a, Dimension::Length)).unwrap();
                prop_assert!((teff.value * 2.0 * a - 1.0).abs() <= 1e-15);
            }
        }
    }
}
