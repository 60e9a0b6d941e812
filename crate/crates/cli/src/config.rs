//! JSON run configuration and material presets.

use std::fmt;
use std::path::PathBuf;

use casimir_core::materials::presets;
use casimir_core::quantities::{electronvolts, kelvin, rad_per_second};
use casimir_core::{DrudeParams, ImpedanceModel, MaterialResponse, RelaxationModel};
use serde::Deserialize;

use crate::error::CliError;

pub const PRESETS: [&str; 7] = [
    "gold-paper-drude",
    "gold-paper-plasma",
    "gold-impedance-IR",
    "mica-eps7",
    "dielectric-eps100",
    "ideal-metal",
    "gold-drude-residual",
];

pub const DEFAULT_REL_TOL: f64 = 1e-5;
pub const MAX_TEMPERATURE_K: f64 = 2000.0;
pub const MAX_POINTS: usize = 10_000;
pub const SEPARATION_RANGE_UM: (f64, f64) = (0.2, 5.0);

pub fn preset(name: &str) -> Result<MaterialResponse, CliError> {
    Ok(match name {
        "gold-paper-drude" => presets::gold_drude(),
        "gold-paper-plasma" => presets::gold_plasma(),
        "gold-impedance-IR" => presets::gold_impedance_ir(),
        "mica-eps7" => presets::mica(),
        "dielectric-eps100" => presets::dielectric_eps100(),
        "ideal-metal" => MaterialResponse::ideal_metal(),
        "gold-drude-residual" => MaterialResponse::drude(presets::gold_residual_params()),
        other => {
            return Err(CliError::Config(format!(
                "unknown preset `{other}`; known presets: {}",
                PRESETS.join(", ")
            )))
        }
    })
}

/// Material given inline in laboratory units.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InlineMaterial {
    Drude {
        omega_p_ev: f64,
        nu_ref_ev: f64,
        #[serde(default = "default_t_ref")]
        t_ref_k: f64,
        #[serde(default = "default_theta")]
        theta_debye_k: f64,
        #[serde(default)]
        nu_residual_rad_s: f64,
    },
    Plasma {
        omega_p_ev: f64,
    },
    ConstantEps {
        eps: f64,
    },
    IdealMetal,
    ImpedanceIr {
        omega_p_ev: f64,
    },
    /// Z = prefactor·ζ^exponent with ζ in 1/m.
    ImpedancePowerLaw {
        prefactor: f64,
        exponent: f64,
    },
}

fn default_t_ref() -> f64 {
    presets::GOLD_T_REF_K
}

fn default_theta() -> f64 {
    presets::GOLD_THETA_DEBYE_K
}

impl InlineMaterial {
    fn tag(&self) -> &'static str {
        match self {
            Self::Drude { .. } => "inline-drude",
            Self::Plasma { .. } => "inline-plasma",
            Self::ConstantEps { .. } => "inline-constant-eps",
            Self::IdealMetal => "inline-ideal-metal",
            Self::ImpedanceIr { .. } => "inline-impedance-IR",
            Self::ImpedancePowerLaw { .. } => "inline-impedance-power-law",
        }
    }

    fn build(&self) -> casimir_core::Result<MaterialResponse> {
        Ok(match *self {
            Self::Drude {
                omega_p_ev,
                nu_ref_ev,
                t_ref_k,
                theta_debye_k,
                nu_residual_rad_s,
            } => {
                let relax = RelaxationModel::new(
                    electronvolts(nu_ref_ev),
                    kelvin(t_ref_k),
                    kelvin(theta_debye_k),
                    rad_per_second(nu_residual_rad_s),
                )?;
                MaterialResponse::drude(DrudeParams::new(electronvolts(omega_p_ev), relax)?)
            }
            Self::Plasma { omega_p_ev } => MaterialResponse::plasma(electronvolts(omega_p_ev))?,
            Self::ConstantEps { eps } => MaterialResponse::constant_eps(eps)?,
            Self::IdealMetal => MaterialResponse::ideal_metal(),
            Self::ImpedanceIr { omega_p_ev } => MaterialResponse::impedance(
                ImpedanceModel::infrared_optics(electronvolts(omega_p_ev))?,
            ),
            Self::ImpedancePowerLaw {
                prefactor,
                exponent,
            } => MaterialResponse::impedance(ImpedanceModel::power_law(prefactor, exponent)?),
        })
    }
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum MaterialSpec {
    Preset(String),
    Inline(InlineMaterial),
}

/// A resolved material and the tag written to the `model` column.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    pub response: MaterialResponse,
    pub tag: String,
}

impl MaterialSpec {
    pub fn resolve(&self) -> Result<Material, CliError> {
        match self {
            Self::Preset(name) => Ok(Material {
                response: preset(name)?,
                tag: name.clone(),
            }),
            Self::Inline(inline) => Ok(Material {
                response: inline
                    .build()
                    .map_err(|e| CliError::Config(e.to_string()))?,
                tag: inline.tag().to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    FreeEnergy,
    Pressure,
    Entropy,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Self::FreeEnergy => "free_energy",
            Self::Pressure => "pressure",
            Self::Entropy => "entropy",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "free_energy" => Some(Self::FreeEnergy),
            "pressure" => Some(Self::Pressure),
            "entropy" => Some(Self::Entropy),
            _ => None,
        }
    }

    pub fn si_unit(self) -> &'static str {
        match self {
            Self::FreeEnergy => "J/m^2",
            Self::Pressure => "Pa",
            Self::Entropy => "J/(m^2 K)",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct TemperatureRange {
    pub min_k: f64,
    pub max_k: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SeparationRange {
    pub min_um: f64,
    pub max_um: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub material: MaterialSpec,
    #[serde(default)]
    pub a_um: Option<f64>,
    #[serde(default)]
    pub t_range: Option<TemperatureRange>,
    #[serde(default)]
    pub a_range: Option<SeparationRange>,
    #[serde(default)]
    pub t_k: Option<f64>,
    pub quantity: Quantity,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    pub output_path: PathBuf,
    #[serde(default)]
    pub emit_plot_script: bool,
}

fn default_rel_tol() -> f64 {
    DEFAULT_REL_TOL
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl RunConfig {
    /// Parses and checks everything that does not depend on the sweep kind.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| config_error(format!("invalid config: {e}")))?;
        cfg.material.resolve()?;
        if !(cfg.rel_tol > 1e-14 && cfg.rel_tol < 1e-2) {
            return Err(config_error(format!(
                "rel_tol must lie in (1e-14, 1e-2), got {}",
                cfg.rel_tol
            )));
        }
        if let Some(r) = cfg.t_range {
            if !(r.min_k > 0.0) || !(r.max_k > r.min_k) || r.max_k > MAX_TEMPERATURE_K {
                return Err(config_error(format!(
                    "t_range must satisfy 0 < min_k < max_k <= {MAX_TEMPERATURE_K}"
                )));
            }
            check_points("t_range", r.n)?;
        }
        if let Some(r) = cfg.a_range {
            let (lo, hi) = SEPARATION_RANGE_UM;
            if !(r.min_um >= lo) || !(r.max_um > r.min_um) || !(r.max_um <= hi) {
                return Err(config_error(format!(
                    "a_range must satisfy {lo} <= min_um < max_um <= {hi}"
                )));
            }
            check_points("a_range", r.n)?;
        }
        if let Some(a) = cfg.a_um {
            if !(a > 0.0) || !a.is_finite() {
                return Err(config_error(format!("a_um must be positive, got {a}")));
            }
        }
        if let Some(t) = cfg.t_k {
            if !(t > 0.0) || t > MAX_TEMPERATURE_K {
                return Err(config_error(format!(
                    "t_k must lie in (0, {MAX_TEMPERATURE_K}], got {t}"
                )));
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

fn check_points(name: &str, n: usize) -> Result<(), CliError> {
    if !(2..=MAX_POINTS).contains(&n) {
        return Err(config_error(format!(
            "{name}.n must lie in [2, {MAX_POINTS}], got {n}"
        )));
    }
    Ok(())
}
