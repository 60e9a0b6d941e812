//! Material response on the imaginary frequency axis.
//!
//! Dielectric models supply ε(iζ); impedance models supply Z(iζ). Every model
//! also supplies its analytic ζ → 0 reflection coefficients, which are the
//! only values ever used for the zero Matsubara mode.
//!
//! All frequencies and temperatures are in natural units (1/m).

use crate::error::{invalid, CasimirError, Result};
use crate::quadrature::{self, QuadOptions};
use crate::quantities;

/// Tolerance for the Bloch-Grüneisen integral.
const BG_REL_TOL: f64 = 1e-9;

/// Bloch-Grüneisen integral G(t) = t⁵ ∫₀^{1/t} x⁵ eˣ/(eˣ−1)² dx.
///
/// G(t) ≈ 5! ζ(5) t⁵ for t → 0 and G(t) ≈ t/4 for t → ∞.
pub fn bloch_gruneisen_integral(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    // x⁵ e^{-x} is below 1e-75 past x = 200
    let upper = (1.0 / t).min(200.0);
    let integrand = |x: f64| {
        if x == 0.0 {
            0.0
        } else {
            let em1 = (-x).exp_m1();
            x.powi(5) * (-x).exp() / (em1 * em1)
        }
    };
    let breaks: Vec<f64> = [1.0, 4.0, 10.0, 25.0, 60.0]
        .into_iter()
        .filter(|&b| b < upper)
        .collect();
    let opts = QuadOptions {
        rel_tol: BG_REL_TOL,
        abs_tol: 0.0,
        max_panels: 2000,
    };
    let integral = quadrature::integrate(integrand, 0.0, upper, &breaks, opts)
        .map(|o| o.value)
        .unwrap_or_else(|e| match e {
            CasimirError::QuadratureFailure { partial, .. } => partial,
            _ => f64::NAN,
        });
    t.powi(5) * integral
}

/// dG/dt, from differentiating under the integral sign.
fn bloch_gruneisen_derivative(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    let u = 1.0 / t;
    let em1 = (-u).exp_m1();
    let boundary = if u > 700.0 {
        0.0
    } else {
        (-u).exp() / (em1 * em1) / (t * t)
    };
    5.0 * bloch_gruneisen_integral(t) / t - boundary
}

/// Temperature-dependent relaxation parameter ν(T) following the
/// Bloch-Grüneisen law, anchored at a reference temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationModel {
    nu_ref: f64,
    t_ref: f64,
    theta_debye: f64,
    nu_residual: f64,
    scale: f64,
}

impl RelaxationModel {
    pub fn new(nu_ref: f64, t_ref: f64, theta_debye: f64, nu_residual: f64) -> Result<Self> {
        if !(nu_ref >= 0.0) || !nu_ref.is_finite() {
            return Err(invalid("nu_ref", "must be finite and >= 0"));
        }
        if !(t_ref > 0.0) {
            return Err(invalid("t_ref", "must be positive"));
        }
        if !(theta_debye > 0.0) {
            return Err(invalid("theta_debye", "must be positive"));
        }
        if !(nu_residual >= 0.0) || !nu_residual.is_finite() {
            return Err(invalid("nu_residual", "must be finite and >= 0"));
        }
        let scale = nu_ref / bloch_gruneisen_integral(t_ref / theta_debye);
        Ok(Self {
            nu_ref,
            t_ref,
            theta_debye,
            nu_residual,
            scale,
        })
    }

    pub fn with_residual(mut self, nu_residual: f64) -> Result<Self> {
        if !(nu_residual >= 0.0) || !nu_residual.is_finite() {
            return Err(invalid("nu_residual", "must be finite and >= 0"));
        }
        self.nu_residual = nu_residual;
        Ok(self)
    }

    pub fn nu_ref(&self) -> f64 {
        self.nu_ref
    }

    pub fn t_ref(&self) -> f64 {
        self.t_ref
    }

    pub fn theta_debye(&self) -> f64 {
        self.theta_debye
    }

    pub fn nu_residual(&self) -> f64 {
        self.nu_residual
    }

    /// ν(T).
    pub fn nu(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(invalid("T", format!("temperature must be >= 0, got {t}")));
        }
        Ok(self.nu_residual + self.scale * bloch_gruneisen_integral(t / self.theta_debye))
    }

    /// dν/dT.
    pub fn nu_derivative(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(invalid("T", format!("temperature must be >= 0, got {t}")));
        }
        Ok(self.scale * bloch_gruneisen_derivative(t / self.theta_debye) / self.theta_debye)
    }
}

/// Free-function form of [`RelaxationModel::nu`].
pub fn bloch_gruneisen_nu(t: f64, model: &RelaxationModel) -> Result<f64> {
    model.nu(t)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeParams {
    omega_p: f64,
    pub relaxation: RelaxationModel,
}

impl DrudeParams {
    pub fn new(omega_p: f64, relaxation: RelaxationModel) -> Result<Self> {
        if !(omega_p > 0.0) || !omega_p.is_finite() {
            return Err(invalid("omega_p", "plasma frequency must be positive"));
        }
        Ok(Self {
            omega_p,
            relaxation,
        })
    }

    pub fn omega_p(&self) -> f64 {
        self.omega_p
    }

    /// λ_p = 2π/ω_p (c = 1).
    pub fn plasma_wavelength(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega_p
    }
}

/// ε(iζ) = 1 + ω_p²/(ζ(ζ+ν)) with ν = ν(T).
pub fn drude_permittivity(zeta: f64, params: &DrudeParams, t: f64) -> Result<f64> {
    if !(zeta > 0.0) {
        return Err(CasimirError::ZeroFrequency);
    }
    let nu = params.relaxation.nu(t)?;
    Ok(drude_eps(zeta, params.omega_p, nu))
}

#[inline]
fn drude_eps(zeta: f64, omega_p: f64, nu: f64) -> f64 {
    1.0 + omega_p * omega_p / (zeta * (zeta + nu))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DielectricModel {
    Drude(DrudeParams),
    Plasma { omega_p: f64 },
    ConstantEps { eps: f64 },
    IdealMetal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImpedanceModel {
    /// Z(iζ) = ζ/√(ζ²+ω_p²).
    InfraredOptics { omega_p: f64 },
    /// Z(iζ) = prefactor·ζ^exponent, capped at 1. `prefactor` carries
    /// units of m^exponent.
    PowerLaw { prefactor: f64, exponent: f64 },
}

/// Exponent used for the anomalous-skin-effect power law.
pub const ANOMALOUS_SKIN_EXPONENT: f64 = 2.0 / 3.0;

impl ImpedanceModel {
    pub fn infrared_optics(omega_p: f64) -> Result<Self> {
        if !(omega_p > 0.0) || !omega_p.is_finite() {
            return Err(invalid("omega_p", "plasma frequency must be positive"));
        }
        Ok(Self::InfraredOptics { omega_p })
    }

    pub fn power_law(prefactor: f64, exponent: f64) -> Result<Self> {
        if !(prefactor > 0.0) || !prefactor.is_finite() {
            return Err(invalid("prefactor", "must be positive"));
        }
        if !(exponent > 0.0 && exponent < 1.0) {
            return Err(invalid("exponent", "must lie in (0, 1)"));
        }
        Ok(Self::PowerLaw {
            prefactor,
            exponent,
        })
    }

    /// Normal skin effect: Z ≈ √(ζν)/ω_p for ζ ≪ ν.
    pub fn normal_skin(omega_p: f64, nu: f64) -> Result<Self> {
        Self::power_law((nu / (omega_p * omega_p)).sqrt(), 0.5)
    }
}

/// Z(iζ) for the impedance models; always in (0, 1].
pub fn impedance_on_imaginary_axis(zeta: f64, model: &ImpedanceModel) -> Result<f64> {
    if !(zeta > 0.0) {
        return Err(CasimirError::ZeroFrequency);
    }
    Ok(impedance(zeta, model))
}

#[inline]
fn impedance(zeta: f64, model: &ImpedanceModel) -> f64 {
    match *model {
        ImpedanceModel::InfraredOptics { omega_p } => zeta / zeta.hypot(omega_p),
        ImpedanceModel::PowerLaw {
            prefactor,
            exponent,
        } => (prefactor * zeta.powf(exponent)).min(1.0),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaterialResponse {
    Dielectric(DielectricModel),
    Impedance(ImpedanceModel),
}

impl MaterialResponse {
    pub fn drude(params: DrudeParams) -> Self {
        Self::Dielectric(DielectricModel::Drude(params))
    }

    pub fn plasma(omega_p: f64) -> Result<Self> {
        if !(omega_p > 0.0) || !omega_p.is_finite() {
            return Err(invalid("omega_p", "plasma frequency must be positive"));
        }
        Ok(Self::Dielectric(DielectricModel::Plasma { omega_p }))
    }

    pub fn constant_eps(eps: f64) -> Result<Self> {
        if !(eps > 1.0) || !eps.is_finite() {
            return Err(invalid(
                "eps",
                "constant permittivity must be finite and > 1",
            ));
        }
        Ok(Self::Dielectric(DielectricModel::ConstantEps { eps }))
    }

    pub fn ideal_metal() -> Self {
        Self::Dielectric(DielectricModel::IdealMetal)
    }

    pub fn impedance(model: ImpedanceModel) -> Self {
        Self::Impedance(model)
    }

    /// Plasma frequency, when the model has one.
    pub fn plasma_frequency(&self) -> Option<f64> {
        match self {
            Self::Dielectric(DielectricModel::Drude(p)) => Some(p.omega_p),
            Self::Dielectric(DielectricModel::Plasma { omega_p })
            | Self::Impedance(ImpedanceModel::InfraredOptics { omega_p }) => Some(*omega_p),
            _ => None,
        }
    }

    pub fn is_drude(&self) -> bool {
        matches!(self, Self::Dielectric(DielectricModel::Drude(_)))
    }

    /// Resolves temperature-dependent parameters (ν(T) for Drude).
    pub fn bind(&self, t: f64) -> Result<BoundMaterial> {
        let kind = match self {
            Self::Dielectric(DielectricModel::Drude(p)) => BoundKind::Drude {
                omega_p: p.omega_p,
                nu: p.relaxation.nu(t)?,
            },
            Self::Dielectric(DielectricModel::Plasma { omega_p }) => {
                BoundKind::Plasma { omega_p: *omega_p }
            }
            Self::Dielectric(DielectricModel::ConstantEps { eps }) => BoundKind::ConstantEps(*eps),
            Self::Dielectric(DielectricModel::IdealMetal) => BoundKind::IdealMetal,
            Self::Impedance(m) => BoundKind::Impedance(*m),
        };
        Ok(BoundMaterial {
            source: *self,
            kind,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum BoundKind {
    Drude { omega_p: f64, nu: f64 },
    Plasma { omega_p: f64 },
    ConstantEps(f64),
    IdealMetal,
    Impedance(ImpedanceModel),
}

/// A material with its temperature dependence resolved.
#[derive(Debug, Clone, Copy)]
pub struct BoundMaterial {
    source: MaterialResponse,
    kind: BoundKind,
}

/// A squared reflection ratio r² together with 1 − r², each computed
/// without cancellation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reflection {
    pub value: f64,
    pub complement: f64,
}

impl Reflection {
    pub const PERFECT: Reflection = Reflection {
        value: 1.0,
        complement: 0.0,
    };

    pub const NONE: Reflection = Reflection {
        value: 0.0,
        complement: 1.0,
    };

    /// r² and 1 − r² for r = (u − v)/(u + v) with u, v ≥ 0.
    #[inline]
    pub(crate) fn from_ratio(u: f64, v: f64) -> Self {
        let sum = u + v;
        let r = (u - v) / sum;
        Reflection {
            value: r * r,
            complement: 4.0 * u * v / (sum * sum),
        }
    }

    /// ln(1 − r² e^{−y}).
    ///
    /// Near r²e^{−y} → 1 the argument is rebuilt as (1 − r²) + r²(1 − e^{−y})
    /// so that perfect reflectors at small y keep full precision.
    #[inline]
    pub fn log_factor(&self, y: f64) -> f64 {
        let x = self.value * (-y).exp();
        if x < 0.5 {
            (-x).ln_1p()
        } else {
            (self.complement - self.value * (-y).exp_m1()).ln()
        }
    }
}

impl BoundMaterial {
    pub fn source(&self) -> &MaterialResponse {
        &self.source
    }

    /// Relaxation parameter in effect, zero for non-Drude models.
    pub fn nu(&self) -> f64 {
        match self.kind {
            BoundKind::Drude { nu, .. } => nu,
            _ => 0.0,
        }
    }

    /// ε(iζ); `None` for ideal metals and impedance models.
    pub fn permittivity(&self, zeta: f64) -> Option<f64> {
        match self.kind {
            BoundKind::Drude { omega_p, nu } => Some(drude_eps(zeta, omega_p, nu)),
            BoundKind::Plasma { omega_p } => Some(drude_eps(zeta, omega_p, 0.0)),
            BoundKind::ConstantEps(eps) => Some(eps),
            _ => None,
        }
    }

    pub fn impedance(&self, zeta: f64) -> Option<f64> {
        match &self.kind {
            BoundKind::Impedance(m) => Some(impedance(zeta, m)),
            _ => None,
        }
    }

    /// (TM, TE) reflection at ζ > 0 and q ≥ ζ; ζ = 0 goes through the
    /// analytic zero-mode path.
    #[inline]
    pub fn coefficients(&self, zeta: f64, q: f64) -> (Reflection, Reflection) {
        if zeta == 0.0 {
            return self.zero_mode(q);
        }
        match self.kind {
            BoundKind::Drude { omega_p, nu } => {
                dielectric_pair(zeta, q, drude_eps(zeta, omega_p, nu))
            }
            BoundKind::Plasma { omega_p } => {
                dielectric_pair(zeta, q, drude_eps(zeta, omega_p, 0.0))
            }
            BoundKind::ConstantEps(eps) => dielectric_pair(zeta, q, eps),
            BoundKind::IdealMetal => (Reflection::PERFECT, Reflection::PERFECT),
            BoundKind::Impedance(m) => {
                let z = impedance(zeta, &m);
                (
                    Reflection::from_ratio(q, z * zeta),
                    Reflection::from_ratio(zeta, z * q),
                )
            }
        }
    }

    #[inline]
    fn zero_mode(&self, q: f64) -> (Reflection, Reflection) {
        match self.kind {
            BoundKind::Drude { .. } => (Reflection::PERFECT, Reflection::NONE),
            BoundKind::Plasma { omega_p } => (
                Reflection::PERFECT,
                Reflection::from_ratio(q.hypot(omega_p), q),
            ),
            BoundKind::ConstantEps(eps) => (Reflection::from_ratio(eps, 1.0), Reflection::NONE),
            BoundKind::IdealMetal => (Reflection::PERFECT, Reflection::PERFECT),
            BoundKind::Impedance(ImpedanceModel::InfraredOptics { omega_p }) => {
                (Reflection::PERFECT, Reflection::from_ratio(omega_p, q))
            }
            BoundKind::Impedance(ImpedanceModel::PowerLaw { .. }) => {
                (Reflection::PERFECT, Reflection::PERFECT)
            }
        }
    }
}

#[inline]
fn dielectric_pair(zeta: f64, q: f64, eps: f64) -> (Reflection, Reflection) {
    let s = ((eps - 1.0) * zeta * zeta + q * q).sqrt();
    (
        Reflection::from_ratio(eps * q, s),
        Reflection::from_ratio(q, s),
    )
}

/// Analytic ζ → 0 limits (A₀, B₀) of the reflection coefficients.
pub fn zero_mode_coefficients(q: f64, material: &MaterialResponse) -> Result<(f64, f64)> {
    if !(q > 0.0) {
        return Err(invalid("q", "wave number must be positive"));
    }
    // binding only matters for Drude's ν, which the zero mode ignores
    let bound = material.bind(0.0)?;
    let (a, b) = bound.zero_mode(q);
    Ok((a.value, b.value))
}

/// Named parameter sets.
pub mod presets {
    use super::*;

    pub const GOLD_PLASMA_EV: f64 = 9.0;
    pub const GOLD_NU_300K_EV: f64 = 35e-3;
    pub const GOLD_T_REF_K: f64 = 300.0;
    pub const GOLD_THETA_DEBYE_K: f64 = 175.0;
    /// Impurity floor for a resistivity ratio of 10⁶ (rad/s).
    pub const GOLD_NU_RESIDUAL_RAD_S: f64 = 5.32e7;
    pub const MICA_EPS: f64 = 7.0;

    pub fn gold_relaxation() -> RelaxationModel {
        RelaxationModel::new(
            quantities::electronvolts(GOLD_NU_300K_EV),
            quantities::kelvin(GOLD_T_REF_K),
            quantities::kelvin(GOLD_THETA_DEBYE_K),
            0.0,
        )
        .expect("valid preset")
    }

    pub fn gold_plasma_frequency() -> f64 {
        quantities::electronvolts(GOLD_PLASMA_EV)
    }

    /// ω_p = 9.0 eV, ν(300 K) = 35 meV, Θ = 175 K.
    pub fn gold_params() -> DrudeParams {
        DrudeParams::new(gold_plasma_frequency(), gold_relaxation()).expect("valid preset")
    }

    /// As [`gold_params`] with the residual relaxation floor.
    pub fn gold_residual_params() -> DrudeParams {
        let relax = gold_relaxation()
            .with_residual(quantities::rad_per_second(GOLD_NU_RESIDUAL_RAD_S))
            .expect("valid preset");
        DrudeParams::new(gold_plasma_frequency(), relax).expect("valid preset")
    }

    pub fn gold_drude() -> MaterialResponse {
        MaterialResponse::drude(gold_params())
    }

    pub fn gold_plasma() -> MaterialResponse {
        MaterialResponse::plasma(gold_plasma_frequency()).expect("valid preset")
    }

    pub fn gold_impedance_ir() -> MaterialResponse {
        MaterialResponse::impedance(ImpedanceModel::InfraredOptics {
            omega_p: gold_plasma_frequency(),
        })
    }

    pub fn mica() -> MaterialResponse {
        MaterialResponse::constant_eps(MICA_EPS).expect("valid preset")
    }

    pub fn dielectric_eps100() -> MaterialResponse {
        MaterialResponse::constant_eps(100.0).expect("valid preset")
    }
}
