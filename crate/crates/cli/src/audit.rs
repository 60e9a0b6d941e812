//! Nernst audit and asymptotic cross-check reports.

use std::fmt;
use std::path::Path;

use casimir_core::asymptotics::{
    validate_asymptotics, zero_temperature_entropy_for_wavelength, AsymptoticComparison,
    AsymptoticModel,
};
use casimir_core::materials::presets;
use casimir_core::quantities::{
    energy_per_area_to_si, entropy_per_area_to_si, kelvin, micrometres, to_kelvin,
};
use casimir_core::thermo::nernst_limit;
use casimir_core::Geometry;

use crate::config::{Material, Quantity};
use crate::error::CliError;
use crate::sweep::{fmt_number, write_csv, SweepRow};

/// S0 below this fraction of the closed-form scale counts as a violation.
/// Drops unit round-trip noise such as 2.9999999999999996.
fn display_kelvin(t: f64) -> f64 {
    (t * 1e9).round() / 1e9
}

pub const VIOLATION_FRACTION: f64 = 0.05;
/// Asymptotic agreement required by `validate-asym`.
pub const ASYMPTOTIC_CRITERION: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Consistent,
    Violation,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Consistent => "CONSISTENT",
            Verdict::Violation => "VIOLATION",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NernstReport {
    pub model: String,
    pub a_um: f64,
    /// J/(m²·K)
    pub s0: f64,
    /// Closed-form zero-temperature entropy of a Drude metal with the same
    /// plasma wavelength (λ_p = 0 when the material has none).
    pub reference: f64,
    pub ratio: f64,
    pub fit_residual: f64,
    pub verdict: Verdict,
    pub rows: Vec<SweepRow>,
}

pub fn nernst_audit(
    material: &Material,
    a_um: f64,
    t_list_k: &[f64],
    rel_tol: f64,
) -> Result<NernstReport, CliError> {
    let geom = Geometry::from_micrometres(a_um)?;
    let temps: Vec<f64> = t_list_k.iter().map(|&t| kelvin(t)).collect();
    let lambda_p = material
        .response
        .plasma_frequency()
        .map_or(0.0, |wp| 2.0 * std::f64::consts::PI / wp);
    let reference =
        entropy_per_area_to_si(zero_temperature_entropy_for_wavelength(&geom, lambda_p)?);
    let fit = nernst_limit(&geom, &material.response, &temps, rel_tol)?;
    let s0 = entropy_per_area_to_si(fit.s0);
    let verdict = if s0 < -VIOLATION_FRACTION * reference.abs() {
        Verdict::Violation
    } else {
        Verdict::Consistent
    };
    let rows = fit
        .samples
        .iter()
        .zip(t_list_k)
        .map(|(s, &t_k)| SweepRow {
            t_k,
            a_um,
            quantity: Quantity::Entropy,
            value_si: entropy_per_area_to_si(s.entropy),
            abs_error_si: entropy_per_area_to_si(s.abs_error()),
            model: material.tag.clone(),
        })
        .collect();
    Ok(NernstReport {
        model: material.tag.clone(),
        a_um,
        s0,
        reference,
        ratio: s0 / reference,
        fit_residual: entropy_per_area_to_si(fit.residual),
        verdict,
        rows,
    })
}

impl NernstReport {
    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        write_csv(path, &self.rows, None)
    }
}

impl fmt::Display for NernstReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model         {}", self.model)?;
        writeln!(f, "a_um          {}", self.a_um)?;
        for row in &self.rows {
            writeln!(
                f,
                "S({} K)  {} J/(m^2 K)",
                display_kelvin(row.t_k),
                fmt_number(row.value_si)
            )?;
        }
        writeln!(f, "S0            {} J/(m^2 K)", fmt_number(self.s0))?;
        writeln!(f, "S0_reference  {} J/(m^2 K)", fmt_number(self.reference))?;
        writeln!(f, "ratio         {:.6}", self.ratio)?;
        writeln!(
            f,
            "fit_residual  {} J/(m^2 K)",
            fmt_number(self.fit_residual)
        )?;
        write!(f, "verdict       {}", self.verdict)
    }
}

pub fn asymptotic_model(preset: &str) -> Result<AsymptoticModel, CliError> {
    match preset {
        "gold-paper-drude" => Ok(AsymptoticModel::Drude(presets::gold_params())),
        "gold-drude-residual" => Ok(AsymptoticModel::Drude(presets::gold_residual_params())),
        "ideal-metal" => Ok(AsymptoticModel::IdealMetal),
        other => Err(CliError::Config(format!(
            "no low-temperature expansion for `{other}`; use gold-paper-drude, gold-drude-residual or ideal-metal"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticReport {
    pub model: String,
    pub a_um: f64,
    pub comparisons: Vec<AsymptoticComparison>,
}

impl AsymptoticReport {
    pub fn passed(&self) -> bool {
        self.comparisons
            .iter()
            .all(|c| c.rel_diff < ASYMPTOTIC_CRITERION)
    }
}

pub fn validate_asym(
    preset: &str,
    a_um: f64,
    t_list_k: &[f64],
    rel_tol: f64,
) -> Result<AsymptoticReport, CliError> {
    let model = asymptotic_model(preset)?;
    let geom = Geometry::new(micrometres(a_um))?;
    let temps: Vec<f64> = t_list_k.iter().map(|&t| kelvin(t)).collect();
    let comparisons = validate_asymptotics(&geom, &model, &temps, rel_tol)?;
    Ok(AsymptoticReport {
        model: preset.to_string(),
        a_um,
        comparisons,
    })
}

impl fmt::Display for AsymptoticReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model {}  a_um {}", self.model, self.a_um)?;
        writeln!(
            f,
            "{:>10}  {:>20}  {:>20}  {:>12}",
            "T_K", "F_direct_J_m2", "F_asym_J_m2", "rel_diff"
        )?;
        for c in &self.comparisons {
            writeln!(
                f,
                "{:>10}  {:>20}  {:>20}  {:>12.4e}",
                display_kelvin(to_kelvin(c.temperature)),
                fmt_number(energy_per_area_to_si(c.direct)),
                fmt_number(energy_per_area_to_si(c.asymptotic)),
                c.rel_diff
            )?;
        }
        write!(
            f,
            "{} (rel_diff < {ASYMPTOTIC_CRITERION:e} at every temperature)",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}
