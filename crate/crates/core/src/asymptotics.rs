//! Low-temperature expansion of the Drude-metal free energy.
//!
//! With x = λ_p/(πa) and τ = T/T_eff the expansion reads
//!
//! ```text
//! F = −π²/(720a³)·(1 − 2x + 18x²/5)
//!     − ζ(3)/(16πa³)·[(1 + x)τ³ − π³/(45ζ(3))·(1 + 2x)τ⁴]
//!     + ζ(3)T/(16πa²)·(1 − 2x + 3x²)
//!     + (ν/ω_p)·T/(4πa²)·Σ_{m≥1} [ζ̃_m·I₁(ζ̃_m) + I₂(ζ̃_m)/ζ̃_m]
//! ```
//!
//! where I₁, I₂ are the Bose tails [`bose_tail_1`], [`bose_tail_2`]. The
//! linear term survives at T → 0 and gives a negative entropy there.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::error::{invalid, CasimirError, Result};
use crate::lifshitz::{free_energy, Geometry};
use crate::materials::{DrudeParams, MaterialResponse};
use crate::quadrature::GaussLegendre;
use crate::quantities::ZETA3;

/// Largest T/T_eff accepted.
pub const MAX_REDUCED_TEMPERATURE: f64 = 0.2;
/// Largest ν/ω_p accepted.
pub const MAX_NU_OVER_OMEGA_P: f64 = 1e-2;
/// Largest λ_p/(2πa) accepted.
pub const MAX_LAMBDA_P_RATIO: f64 = 0.2;
/// ν ≪ 2πT is enforced as ν ≤ this fraction of 2πT.
pub const RELAXATION_APPLICABILITY: f64 = 0.1;
/// Matsubara series cut once ζ̃_m exceeds this.
const SERIES_CUTOFF: f64 = 45.0;

/// ∫_x^∞ dy/(e^y − 1) = −ln(1 − e^{−x}).
pub fn bose_tail_1(x: f64) -> Result<f64> {
    if !(x > 0.0) {
        return Err(invalid("x", "integral diverges for x <= 0"));
    }
    if x > std::f64::consts::LN_2 {
        Ok(-(-(-x).exp()).ln_1p())
    } else {
        Ok(-(-(-x).exp_m1()).ln())
    }
}

/// ∫_x^∞ y² dy/(e^y − 1).
///
/// For x ≥ 1 the termwise series Σ e^{−nx}(x²/n + 2x/n² + 2/n³) converges
/// geometrically. Below that it is 2ζ(3) minus the integral over [0, x],
/// whose integrand is analytic within 2π of the origin so a single
/// Gauss-Legendre panel is exact to rounding.
pub fn bose_tail_2(x: f64) -> Result<f64> {
    if !(x >= 0.0) || x.is_nan() {
        return Err(invalid("x", "must be >= 0"));
    }
    if x >= 1.0 {
        let mut sum = 0.0;
        for n in 1..10_000 {
            let nf = n as f64;
            let term = (-nf * x).exp() * (x * x / nf + 2.0 * x / (nf * nf) + 2.0 / (nf * nf * nf));
            sum += term;
            if term < 1e-16 * sum {
                break;
            }
        }
        return Ok(sum);
    }
    if x == 0.0 {
        return Ok(2.0 * ZETA3);
    }
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    let rule = RULE.get_or_init(|| GaussLegendre::new(16));
    let head = rule.integrate(&|y: f64| y * y / y.exp_m1(), 0.0, x);
    Ok(2.0 * ZETA3 - head)
}

/// The three small parameters of the expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityParameters {
    pub t_over_teff: f64,
    pub nu_over_omega_p: f64,
    pub lambda_p_over_2pi_a: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticExpansion {
    pub total: f64,
    pub term_static: f64,
    pub term_t3: f64,
    pub term_t4: f64,
    pub term_linear: f64,
    pub term_nu_series: f64,
    pub validity: ValidityParameters,
}

fn check_lambda(ratio: f64) -> Result<()> {
    if ratio >= MAX_LAMBDA_P_RATIO {
        return Err(CasimirError::OutOfValidity {
            parameter: "lambda_p/(2 pi a)",
            value: ratio,
            limit: MAX_LAMBDA_P_RATIO,
        });
    }
    Ok(())
}

fn check_temperature(t: f64, geom: &Geometry) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(invalid("T", "temperature must be >= 0"));
    }
    let tau = t / geom.effective_temperature();
    if tau >= MAX_REDUCED_TEMPERATURE {
        return Err(CasimirError::OutOfValidity {
            parameter: "T/T_eff",
            value: tau,
            limit: MAX_REDUCED_TEMPERATURE,
        });
    }
    Ok(tau)
}

/// Enforces ν(T) ≪ ζ₁ = 2πT.
pub fn check_relaxation_applicability(drude: &DrudeParams, t: f64) -> Result<()> {
    let nu = drude.relaxation.nu(t)?;
    let ratio = nu / (2.0 * PI * t);
    if !(ratio <= RELAXATION_APPLICABILITY) {
        return Err(CasimirError::RelaxationTooLarge {
            temperature_kelvin: crate::quantities::to_kelvin(t),
            ratio,
        });
    }
    Ok(())
}

/// g(x) = x·I₁(x) + I₂(x)/x, the summand of the ν/ω_p series.
fn nu_summand(x: f64) -> f64 {
    x * bose_tail_1(x).unwrap_or(0.0) + bose_tail_2(x).unwrap_or(0.0) / x
}

/// g'(x) = I₁(x) − 2x/(eˣ − 1) − I₂(x)/x².
fn nu_summand_derivative(x: f64) -> f64 {
    bose_tail_1(x).unwrap_or(0.0) - 2.0 * x / x.exp_m1() - bose_tail_2(x).unwrap_or(0.0) / (x * x)
}

fn reduced_frequencies(tau: f64) -> impl Iterator<Item = f64> {
    let step = 2.0 * PI * tau;
    (1..)
        .map(move |m| m as f64 * step)
        .take_while(|&x| x <= SERIES_CUTOFF)
}

fn expansion(
    geom: &Geometry,
    t: f64,
    x: f64,
    nu_over_wp: f64,
    drude_terms: bool,
) -> AsymptoticExpansion {
    let a = geom.separation();
    let tau = t / geom.effective_temperature();
    let a3 = a * a * a;
    let term_static = -PI * PI / (720.0 * a3) * (1.0 - 2.0 * x + 3.6 * x * x);
    let term_t3 = -ZETA3 / (16.0 * PI * a3) * (1.0 + x) * tau.powi(3);
    let term_t4 = PI * PI / (720.0 * a3) * (1.0 + 2.0 * x) * tau.powi(4);
    let (term_linear, term_nu_series) = if drude_terms && t > 0.0 {
        let linear = ZETA3 * t / (16.0 * PI * a * a) * (1.0 - 2.0 * x + 3.0 * x * x);
        let series: f64 = reduced_frequencies(tau).map(nu_summand).sum();
        (linear, nu_over_wp * t / (4.0 * PI * a * a) * series)
    } else {
        (0.0, 0.0)
    };
    AsymptoticExpansion {
        total: term_static + term_t3 + term_t4 + term_linear + term_nu_series,
        term_static,
        term_t3,
        term_t4,
        term_linear,
        term_nu_series,
        validity: ValidityParameters {
            t_over_teff: tau,
            nu_over_omega_p: nu_over_wp,
            lambda_p_over_2pi_a: 0.5 * x,
        },
    }
}

/// Evaluates the low-temperature expansion for a Drude metal, with ν taken
/// at the evaluation temperature.
pub fn asymptotic_free_energy(
    geom: &Geometry,
    t: f64,
    drude: &DrudeParams,
) -> Result<AsymptoticExpansion> {
    check_temperature(t, geom)?;
    let x = drude.plasma_wavelength() / (PI * geom.separation());
    check_lambda(0.5 * x)?;
    let nu = drude.relaxation.nu(t)?;
    let nu_over_wp = nu / drude.omega_p();
    if nu_over_wp >= MAX_NU_OVER_OMEGA_P {
        return Err(CasimirError::OutOfValidity {
            parameter: "nu/omega_p",
            value: nu_over_wp,
            limit: MAX_NU_OVER_OMEGA_P,
        });
    }
    if t > 0.0 {
        check_relaxation_applicability(drude, t)?;
    }
    Ok(expansion(geom, t, x, nu_over_wp, true))
}

/// The same expansion for a perfect reflector: no linear or ν terms.
pub fn ideal_metal_asymptotic_free_energy(geom: &Geometry, t: f64) -> Result<AsymptoticExpansion> {
    check_temperature(t, geom)?;
    Ok(expansion(geom, t, 0.0, 0.0, false))
}

/// −∂F/∂T of the expansion, differentiated term by term.
pub fn asymptotic_entropy(geom: &Geometry, t: f64, drude: &DrudeParams) -> Result<f64> {
    let exp = asymptotic_free_energy(geom, t, drude)?;
    let a = geom.separation();
    let teff = geom.effective_temperature();
    let x = drude.plasma_wavelength() / (PI * a);
    let tau = exp.validity.t_over_teff;
    let a3 = a * a * a;
    let d_t3 = -ZETA3 / (16.0 * PI * a3) * (1.0 + x) * 3.0 * tau * tau / teff;
    let d_t4 = PI * PI / (720.0 * a3) * (1.0 + 2.0 * x) * 4.0 * tau.powi(3) / teff;
    if t == 0.0 {
        return zero_temperature_entropy(geom, drude);
    }
    let d_lin = ZETA3 / (16.0 * PI * a * a) * (1.0 - 2.0 * x + 3.0 * x * x);
    let nu = drude.relaxation.nu(t)?;
    let dnu = drude.relaxation.nu_derivative(t)?;
    let (sum, dsum) = reduced_frequencies(tau).fold((0.0, 0.0), |(s, ds), xm| {
        (s + nu_summand(xm), ds + nu_summand_derivative(xm) * xm / t)
    });
    let d_nu = (dnu * t * sum + nu * sum + nu * t * dsum) / (drude.omega_p() * 4.0 * PI * a * a);
    Ok(-(d_t3 + d_t4 + d_lin + d_nu))
}

/// S(T = 0) = −ζ(3)/(16πa²)·(1 − 2x + 3x²), x = λ_p/(πa).
pub fn zero_temperature_entropy(geom: &Geometry, drude: &DrudeParams) -> Result<f64> {
    zero_temperature_entropy_for_wavelength(geom, drude.plasma_wavelength())
}

/// As [`zero_temperature_entropy`] from λ_p directly; λ_p = 0 is the
/// perfect-reflector scale −ζ(3)/(16πa²).
pub fn zero_temperature_entropy_for_wavelength(geom: &Geometry, lambda_p: f64) -> Result<f64> {
    if !(lambda_p >= 0.0) || !lambda_p.is_finite() {
        return Err(invalid("lambda_p", "plasma wavelength must be >= 0"));
    }
    let a = geom.separation();
    let x = lambda_p / (PI * a);
    check_lambda(0.5 * x)?;
    Ok(-ZETA3 / (16.0 * PI * a * a) * (1.0 - 2.0 * x + 3.0 * x * x))
}

/// Materials the expansion is available for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AsymptoticModel {
    Drude(DrudeParams),
    IdealMetal,
}

impl AsymptoticModel {
    pub fn free_energy(&self, geom: &Geometry, t: f64) -> Result<AsymptoticExpansion> {
        match self {
            Self::Drude(p) => asymptotic_free_energy(geom, t, p),
            Self::IdealMetal => ideal_metal_asymptotic_free_energy(geom, t),
        }
    }

    pub fn material(&self) -> MaterialResponse {
        match self {
            Self::Drude(p) => MaterialResponse::drude(*p),
            Self::IdealMetal => MaterialResponse::ideal_metal(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticComparison {
    pub temperature: f64,
    pub direct: f64,
    pub direct_error: f64,
    pub asymptotic: f64,
    pub rel_diff: f64,
}

/// Compares the full Matsubara sum with the expansion at each temperature.
pub fn validate_asymptotics(
    geom: &Geometry,
    model: &AsymptoticModel,
    temperatures: &[f64],
    rel_tol: f64,
) -> Result<Vec<AsymptoticComparison>> {
    // validate everything before spending time on the direct sums
    let expansions = temperatures
        .iter()
        .map(|&t| model.free_energy(geom, t))
        .collect::<Result<Vec<_>>>()?;
    let material = model.material();
    temperatures
        .iter()
        .zip(expansions)
        .map(|(&t, asym)| {
            let direct = free_energy(geom, t, &material, rel_tol)?;
            Ok(AsymptoticComparison {
                temperature: t,
                direct: direct.free_energy,
                direct_error: direct.abs_error,
                asymptotic: asym.total,
                rel_diff: ((direct.free_energy - asym.total) / direct.free_energy).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::presets;
    use crate::quadrature::{integrate, QuadOptions};
    use crate::quantities::kelvin;
    use approx::assert_relative_eq;

    fn numeric_tail(f: impl Fn(f64) -> f64, x: f64) -> f64 {
        let opts = QuadOptions {
            rel_tol: 1e-13,
            abs_tol: 0.0,
            max_panels: 4000,
        };
        integrate(f, x, x + 80.0, &[x + 1.0, x + 5.0, x + 20.0], opts)
            .unwrap()
            .value
    }

    #[test]
    fn bose_tail_1_values() {
        assert_relative_eq!(
            bose_tail_1(2f64.ln()).unwrap(),
            2f64.ln(),
            max_relative = 1e-15
        );
        assert!(
            (bose_tail_1(40.0).unwrap() - (-40f64).exp()).abs() < 1e-15 * (-40f64).exp() + 1e-30
        );
        assert_relative_eq!(
            bose_tail_1(1.0).unwrap(),
            0.458_675_145_387_081_9,
            max_relative = 1e-14
        );
        assert!(bose_tail_1(0.0).is_err());
    }

    #[test]
    fn bose_tail_1_against_quadrature() {
        for x in [0.1, 1.0, 5.0, 20.0] {
            let num = numeric_tail(|y: f64| 1.0 / y.exp_m1(), x);
            assert_relative_eq!(bose_tail_1(x).unwrap(), num, max_relative = 1e-10);
        }
    }

    #[test]
    fn bose_tail_2_values() {
        assert_relative_eq!(bose_tail_2(0.0).unwrap(), 2.0 * ZETA3, max_relative = 1e-15);
        assert_relative_eq!(
            bose_tail_2(0.0).unwrap(),
            2.404_113_806_319_188_5,
            max_relative = 1e-15
        );
        let x = 40.0f64;
        let lead = (-x).exp() * (x * x + 2.0 * x + 2.0);
        assert!((bose_tail_2(x).unwrap() - lead).abs() < 1e-12 * lead);
        // both branches against direct quadrature
        for x in [0.05, 0.5, 0.999, 1.0, 3.0, 12.0] {
            let num = numeric_tail(|y: f64| y * y / y.exp_m1(), x);
            assert_relative_eq!(bose_tail_2(x).unwrap(), num, max_relative = 1e-11);
        }
    }

    #[test]
    fn bose_tail_2_derivative_identity() {
        let (x, h) = (1.0f64, 1e-4);
        let fd = (bose_tail_2(x + h).unwrap() - bose_tail_2(x - h).unwrap()) / (2.0 * h);
        assert!((fd + x * x / x.exp_m1()).abs() < 1e-6);
    }

    #[test]
    fn static_term_limits() {
        let geom = Geometry::new(1.0).unwrap();
        let ideal = ideal_metal_asymptotic_free_energy(&geom, 0.0).unwrap();
        assert_relative_eq!(ideal.total, -PI * PI / 720.0, max_relative = 1e-15);

        let geom = Geometry::from_micrometres(1.0).unwrap();
        let gold = presets::gold_params();
        let e = asymptotic_free_energy(&geom, 0.0, &gold).unwrap();
        let x = gold.plasma_wavelength() / (PI * geom.separation());
        assert!((x - 0.043855).abs() < 1e-5, "{x}");
        let bracket = e.term_static / (-PI * PI / (720.0 * geom.separation().powi(3)));
        assert!((bracket - 0.919215).abs() < 1e-5, "{bracket}");
        assert!((bracket - 0.919221).abs() < 1e-6, "{bracket}");
        assert_eq!(e.term_linear, 0.0);
        assert_eq!(e.total, e.term_static);
    }

    #[test]
    fn term_sum_identity() {
        let geom = Geometry::from_micrometres(1.0).unwrap();
        let e = asymptotic_free_energy(&geom, kelvin(20.0), &presets::gold_params()).unwrap();
        let sum = e.term_static + e.term_t3 + e.term_t4 + e.term_linear + e.term_nu_series;
        assert_relative_eq!(e.total, sum, max_relative = 1e-12);
        assert!(e.term_static < 0.0);
        assert!(e.term_linear > 0.0);
        assert!(e.term_nu_series > 0.0);
    }

    #[test]
    fn zero_temperature_entropy_values() {
        // λ_p → 0 at a = 1
        let tiny = DrudeParams::new(1e12, presets::gold_relaxation()).unwrap();
        let geom = Geometry::new(1.0).unwrap();
        assert_relative_eq!(
            zero_temperature_entropy(&geom, &tiny).unwrap(),
            -ZETA3 / (16.0 * PI),
            max_relative = 1e-10
        );
        let s = zero_temperature_entropy(&geom, &tiny).unwrap();
        assert!((s + 0.023_914_16).abs() < 1e-7, "{s}");

        let geom = Geometry::from_micrometres(1.0).unwrap();
        let s = zero_temperature_entropy(&geom, &presets::gold_params()).unwrap();
        let bracket = s / (-ZETA3 / (16.0 * PI * geom.separation().powi(2)));
        assert!((bracket - 0.918067).abs() < 1e-6, "{bracket}");
    }

    #[test]
    fn entropy_bracket_range() {
        // x = λ_p/a; the bracket reaches 0.8 at x ≈ 0.3849
        let bracket = |x: f64| 1.0 - 2.0 * x / PI + 3.0 * x * x / (PI * PI);
        for i in 1..=380 {
            let b = bracket(0.38 * i as f64 / 380.0);
            assert!(b > 0.8 && b < 1.0);
        }
        assert!(bracket(0.4) > 0.79 && bracket(0.4) < 0.8);
    }

    #[test]
    fn linear_term_gives_zero_temperature_entropy() {
        let geom = Geometry::from_micrometres(1.0).unwrap();
        let gold = presets::gold_params();
        let (t1, t2) = (kelvin(1.0), kelvin(2.0));
        let l1 = asymptotic_free_energy(&geom, t1, &gold)
            .unwrap()
            .term_linear;
        let l2 = asymptotic_free_energy(&geom, t2, &gold)
            .unwrap()
            .term_linear;
        let s0 = zero_temperature_entropy(&geom, &gold).unwrap();
        assert_relative_eq!(-(l2 - l1) / (t2 - t1), s0, max_relative = 1e-12);
    }

    #[test]
    fn analytic_entropy_matches_finite_difference() {
        let geom = Geometry::from_micrometres(1.0).unwrap();
        let gold = presets::gold_params();
        let t = geom.effective_temperature() / 100.0;
        let f = |t: f64| asymptotic_free_energy(&geom, t, &gold).unwrap().total;
        let h = t * 1e-2;
        let d1 = (f(t + h) - f(t - h)) / (2.0 * h);
        let d2 = (f(t + h / 2.0) - f(t - h / 2.0)) / h;
        let fd = -(4.0 * d2 - d1) / 3.0;
        let analytic = asymptotic_entropy(&geom, t, &gold).unwrap();
        assert_relative_eq!(analytic, fd, max_relative = 1e-8);
        assert!(analytic < 0.0);
    }

    #[test]
    fn validity_rejections() {
        let gold = presets::gold_params();
        let geom = Geometry::from_micrometres(1.0).unwrap();
        let err = asymptotic_free_energy(&geom, kelvin(300.0), &gold).unwrap_err();
        assert!(matches!(
            err,
            CasimirError::OutOfValidity {
                parameter: "T/T_eff",
                ..
            }
        ));
        let close = Geometry::from_micrometres(0.05).unwrap();
        let err = asymptotic_free_energy(&close, kelvin(1.0), &gold).unwrap_err();
        assert!(matches!(
            err,
            CasimirError::OutOfValidity {
                parameter: "lambda_p/(2 pi a)",
                ..
            }
        ));
        // residual floor breaks ν ≪ 2πT at very low T
        let impure = presets::gold_residual_params();
        let err = asymptotic_free_energy(&geom, kelvin(1e-5), &impure).unwrap_err();
        assert!(matches!(err, CasimirError::RelaxationTooLarge { .. }));
        assert!(asymptotic_free_energy(&geom, kelvin(1e-3), &impure).is_ok());
    }

    #[test]
    fn validation_against_direct_sum() {
        let model = AsymptoticModel::Drude(presets::gold_params());
        let temps = [kelvin(10.0), kelvin(20.0), kelvin(40.0)];
        let one = validate_asymptotics(
            &Geometry::from_micrometres(1.0).unwrap(),
            &model,
            &temps,
            1e-10,
        )
        .unwrap();
        assert!(one.iter().all(|c| c.rel_diff < 1e-2));
        assert!(one.windows(2).all(|w| w[1].rel_diff <= w[0].rel_diff));
        let two = validate_asymptotics(
            &Geometry::from_micrometres(2.0).unwrap(),
            &model,
            &temps[..1],
            1e-10,
        )
        .unwrap();
        assert!(two[0].rel_diff < one[0].rel_diff);
    }

    #[test]
    fn ideal_metal_validation() {
        let geom = Geometry::from_micrometres(1.0).unwrap();
        let t = geom.effective_temperature() / 50.0;
        let c = validate_asymptotics(&geom, &AsymptoticModel::IdealMetal, &[t], 1e-10).unwrap();
        assert!(c[0].rel_diff < 1e-3);
        // the printed T⁴ sign is the one the direct sum reproduces
        assert!(c[0].rel_diff < 1e-9, "{}", c[0].rel_diff);
    }

    #[test]
    fn validation_rejects_before_computing() {
        let geom = Geometry::from_micrometres(1.0).unwrap();
        let model = AsymptoticModel::Drude(presets::gold_params());
        assert!(
            validate_asymptotics(&geom, &model, &[kelvin(10.0), kelvin(500.0)], 1e-10).is_err()
        );
    }
}
