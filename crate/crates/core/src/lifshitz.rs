//! Lifshitz free energy per unit area between two semispaces.
//!
//! ```text
//! F = (T/2π) Σ'_m ∫_{ζ_m}^∞ q dq [ln(1 − A_m e^{−2qa}) + ln(1 − B_m e^{−2qa})]
//! ```
//!
//! The m = 0 term carries weight ½. The q integral is done in y = 2qa, which
//! turns the measure into y dy/(4a²) and the damping into e^{−y}.

use rayon::prelude::*;

use crate::error::{invalid, CasimirError, Result};
use crate::materials::{BoundMaterial, MaterialResponse, Reflection};
use crate::quadrature::{self, QuadOptions};

/// Plate separation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometry {
    separation: f64,
}

impl Geometry {
    pub fn new(separation: f64) -> Result<Self> {
        if !(separation > 0.0) || !separation.is_finite() {
            return Err(invalid(
                "a",
                format!("separation must be positive, got {separation}"),
            ));
        }
        Ok(Self { separation })
    }

    pub fn from_micrometres(a_um: f64) -> Result<Self> {
        Self::new(a_um * 1e-6)
    }

    pub fn separation(&self) -> f64 {
        self.separation
    }

    /// T_eff = 1/(2a).
    pub fn effective_temperature(&self) -> f64 {
        0.5 / self.separation
    }
}

/// Matsubara frequencies ζ_m = 2πmT at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatsubaraGrid {
    temperature: f64,
    separation: f64,
}

impl MatsubaraGrid {
    pub fn new(temperature: f64, geom: &Geometry) -> Result<Self> {
        if !(temperature > 0.0) || !temperature.is_finite() {
            return Err(invalid(
                "T",
                format!("temperature must be positive, got {temperature}"),
            ));
        }
        Ok(Self {
            temperature,
            separation: geom.separation,
        })
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// ζ_m.
    pub fn frequency(&self, m: usize) -> f64 {
        2.0 * std::f64::consts::PI * m as f64 * self.temperature
    }

    /// ζ̃_m = 2aζ_m.
    pub fn reduced(&self, m: usize) -> f64 {
        2.0 * self.separation * self.frequency(m)
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps >= 1.0) {
        return Err(invalid(
            "eps",
            format!("permittivity must be >= 1, got {eps}"),
        ));
    }
    Ok(())
}

fn check_zeta_q(zeta: f64, q: f64) -> Result<()> {
    if zeta == 0.0 {
        return Err(CasimirError::ZeroFrequency);
    }
    if !(zeta > 0.0) {
        return Err(invalid("zeta", "frequency must be positive"));
    }
    if !(q >= zeta) {
        return Err(invalid("q", "wave number must satisfy q >= zeta"));
    }
    Ok(())
}

/// TM coefficient A = [(εq − s)/(εq + s)]², s = √((ε−1)ζ² + q²).
pub fn reflection_tm(zeta: f64, q: f64, eps: f64) -> Result<f64> {
    check_zeta_q(zeta, q)?;
    check_eps(eps)?;
    if eps.is_infinite() {
        return Ok(1.0);
    }
    let s = ((eps - 1.0) * zeta * zeta + q * q).sqrt();
    Ok(Reflection::from_ratio(eps * q, s).value)
}

/// TE coefficient B = [(q − s)/(q + s)]².
pub fn reflection_te(zeta: f64, q: f64, eps: f64) -> Result<f64> {
    check_zeta_q(zeta, q)?;
    check_eps(eps)?;
    if eps.is_infinite() {
        return Ok(1.0);
    }
    let s = ((eps - 1.0) * zeta * zeta + q * q).sqrt();
    Ok(Reflection::from_ratio(q, s).value)
}

fn check_impedance(z: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&z) {
        return Err(invalid(
            "Z",
            format!("impedance must lie in [0, 1], got {z}"),
        ));
    }
    Ok(())
}

/// Impedance TM coefficient [(q − Zζ)/(q + Zζ)]².
pub fn reflection_tm_impedance(zeta: f64, q: f64, z: f64) -> Result<f64> {
    check_zeta_q(zeta, q)?;
    check_impedance(z)?;
    Ok(Reflection::from_ratio(q, z * zeta).value)
}

/// Impedance TE coefficient [(ζ − Zq)/(ζ + Zq)]².
pub fn reflection_te_impedance(zeta: f64, q: f64, z: f64) -> Result<f64> {
    check_zeta_q(zeta, q)?;
    check_impedance(z)?;
    Ok(Reflection::from_ratio(zeta, z * q).value)
}

fn check_rel_tol(rel_tol: f64) -> Result<()> {
    if !(rel_tol > 1e-14 && rel_tol < 1e-2) {
        return Err(invalid(
            "rel_tol",
            format!("must lie in (1e-14, 1e-2), got {rel_tol}"),
        ));
    }
    Ok(())
}

/// Inner q-integral of one Matsubara mode, including the 1/(4a²) factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeIntegral {
    pub value: f64,
    pub abs_error: f64,
    pub tail_bound: f64,
    /// Upper end of the y = 2qa range actually integrated.
    pub y_max: f64,
}

/// ∫_Y^∞ 4y e^{−y} dy: bounds the integrand tail since |ln(1−x)| ≤ 2x for
/// x ≤ ½ and both coefficients are ≤ 1.
fn integrand_tail(y: f64) -> f64 {
    4.0 * (y + 1.0) * (-y).exp()
}

const FIRST_WINDOW: f64 = 40.0;
const EXTENSION: f64 = 20.0;
const MAX_WINDOW: f64 = 700.0;

pub fn mode_integral(
    m: usize,
    grid: &MatsubaraGrid,
    geom: &Geometry,
    material: &MaterialResponse,
    rel_tol: f64,
) -> Result<ModeIntegral> {
    check_rel_tol(rel_tol)?;
    let bound = material.bind(grid.temperature)?;
    mode_integral_bound(m, grid, geom, &bound, rel_tol)
}

pub(crate) fn mode_integral_bound(
    m: usize,
    grid: &MatsubaraGrid,
    geom: &Geometry,
    material: &BoundMaterial,
    rel_tol: f64,
) -> Result<ModeIntegral> {
    let a = geom.separation;
    let zeta = grid.frequency(m);
    let y0 = grid.reduced(m);
    let integrand = |y: f64| {
        if y <= 0.0 {
            return 0.0;
        }
        let q = y / (2.0 * a);
        let (tm, te) = material.coefficients(zeta, q);
        y * (tm.log_factor(y) + te.log_factor(y))
    };
    let opts = QuadOptions {
        rel_tol: 0.5 * rel_tol,
        abs_tol: 0.0,
        max_panels: 4000,
    };

    let mut upper = y0 + FIRST_WINDOW;
    let breaks: Vec<f64> = [0.5, 2.0, 5.0, 10.0, 20.0].iter().map(|d| y0 + d).collect();
    let scale = 1.0 / (4.0 * a * a);
    let fail = |partial: f64, error_bound: f64| CasimirError::QuadratureFailure {
        partial: partial * scale,
        error_bound: error_bound * scale,
    };
    let first =
        quadrature::integrate(integrand, y0, upper, &breaks, opts).map_err(|e| match e {
            CasimirError::QuadratureFailure {
                partial,
                error_bound,
            } => fail(partial, error_bound),
            other => other,
        })?;
    let mut value = first.value;
    let mut error = first.abs_error;
    loop {
        let tail = integrand_tail(upper);
        if tail <= 0.5 * rel_tol * value.abs() || tail < f64::MIN_POSITIVE {
            return Ok(ModeIntegral {
                value: value * scale,
                abs_error: (error + tail) * scale,
                tail_bound: tail * scale,
                y_max: upper,
            });
        }
        if upper - y0 >= MAX_WINDOW {
            return Err(fail(value, error + tail));
        }
        let next =
            quadrature::integrate(integrand, upper, upper + EXTENSION, &[], opts).map_err(|e| {
                match e {
                    CasimirError::QuadratureFailure {
                        partial,
                        error_bound,
                    } => fail(value + partial, error + error_bound),
                    other => other,
                }
            })?;
        value += next.value;
        error += next.abs_error;
        upper += EXTENSION;
    }
}

/// Contribution of one Matsubara mode to the free energy sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeTerm {
    pub m: usize,
    /// ζ̃_m = 2aζ_m.
    pub reduced_frequency: f64,
    /// The integral I_m, before the ½ weight for m = 0.
    pub value: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FreeEnergyResult {
    /// Free energy per unit area (1/m³).
    pub free_energy: f64,
    pub abs_error: f64,
    /// Number of Matsubara terms summed (m = 0 included).
    pub modes_used: usize,
    /// Analytic bound on the neglected Matsubara terms.
    pub tail_bound: f64,
    pub terms: Vec<ModeTerm>,
}

/// Σ_{k>m} ∫ 4y e^{−y}: neglected-mode bound for x = ζ̃_{m+1}, spacing Δ.
fn matsubara_tail(x: f64, spacing: f64) -> f64 {
    let r = (-spacing).exp();
    let one_minus_r = -(-spacing).exp_m1();
    4.0 * (-x).exp() * ((x + 1.0) / one_minus_r + spacing * r / (one_minus_r * one_minus_r))
}

const MAX_MODES: usize = 5_000_000;

/// Lifshitz free energy per unit area at temperature `t > 0`.
pub fn free_energy(
    geom: &Geometry,
    t: f64,
    material: &MaterialResponse,
    rel_tol: f64,
) -> Result<FreeEnergyResult> {
    check_rel_tol(rel_tol)?;
    let grid = MatsubaraGrid::new(t, geom)?;
    let bound = material.bind(t)?;
    let spacing = grid.reduced(1);
    let cutoff = (1.0 / rel_tol).ln() + 10.0;
    let scale = 1.0 / (4.0 * geom.separation * geom.separation);

    let mut terms: Vec<ModeTerm> = Vec::new();
    let mut partial = 0.0;
    let mut error = 0.0;
    let mut next_m = 0usize;
    let mut batch_end = ((cutoff / spacing).ceil() as usize).saturating_add(2);
    loop {
        if batch_end > MAX_MODES {
            return Err(CasimirError::BudgetExceeded(format!(
                "more than {MAX_MODES} Matsubara modes needed at T = {t:e}"
            )));
        }
        let batch: Vec<Result<ModeTerm>> = (next_m..batch_end)
            .into_par_iter()
            .map(|m| {
                let mi = mode_integral_bound(m, &grid, geom, &bound, rel_tol)?;
                Ok(ModeTerm {
                    m,
                    reduced_frequency: grid.reduced(m),
                    value: mi.value,
                    abs_error: mi.abs_error,
                })
            })
            .collect();
        for term in batch {
            let term = term?;
            let weight = if term.m == 0 { 0.5 } else { 1.0 };
            partial += weight * term.value;
            error += weight * term.abs_error;
            let m = term.m;
            let last = term;
            terms.push(term);
            if m == 0 {
                continue;
            }
            let tail = scale * matsubara_tail(grid.reduced(m + 1), spacing);
            let small_term = last.value.abs() < rel_tol * partial.abs();
            if last.reduced_frequency > cutoff && small_term && tail <= rel_tol * partial.abs() {
                let prefactor = t / (2.0 * std::f64::consts::PI);
                return Ok(FreeEnergyResult {
                    free_energy: prefactor * partial,
                    abs_error: prefactor * (error + tail),
                    modes_used: terms.len(),
                    tail_bound: prefactor * tail,
                    terms,
                });
            }
        }
        next_m = batch_end;
        batch_end += 64;
    }
}

/// Composite Simpson panels per mode in the brute-force oracle.
const ORACLE_PANELS: usize = 200_000;
const ORACLE_WINDOW: f64 = 200.0;
const ORACLE_MAX_EVALUATIONS: f64 = 4e9;

/// Free energy by fixed-step Simpson quadrature and a fixed Matsubara cutoff.
///
/// Slow and non-adaptive; meant as an independent cross-check on small
/// grids. `abs_error` and `tail_bound` are reported as zero.
pub fn brute_force_free_energy(
    geom: &Geometry,
    t: f64,
    material: &MaterialResponse,
) -> Result<FreeEnergyResult> {
    let grid = MatsubaraGrid::new(t, geom)?;
    let bound = material.bind(t)?;
    let t_eff = geom.effective_temperature();
    let m_max = (50.0 * t_eff / (std::f64::consts::PI * t)).ceil() as usize;
    let work = (m_max as f64 + 1.0) * (ORACLE_PANELS as f64 + 1.0);
    if work > ORACLE_MAX_EVALUATIONS {
        return Err(CasimirError::BudgetExceeded(format!(
            "oracle needs {m_max} modes x {ORACLE_PANELS} panels"
        )));
    }
    let a = geom.separation;
    let terms: Vec<ModeTerm> = (0..=m_max)
        .into_par_iter()
        .map(|m| {
            let zeta = grid.frequency(m);
            let y0 = grid.reduced(m);
            let f = |y: f64| {
                if y == 0.0 {
                    return 0.0;
                }
                let (tm, te) = bound.coefficients(zeta, y / (2.0 * a));
                let damp = (-y).exp();
                y * ((1.0 - tm.value * damp).ln() + (1.0 - te.value * damp).ln())
            };
            let value = simpson(f, y0, y0 + ORACLE_WINDOW, ORACLE_PANELS) / (4.0 * a * a);
            ModeTerm {
                m,
                reduced_frequency: y0,
                value,
                abs_error: 0.0,
            }
        })
        .collect();
    let sum = terms
        .iter()
        .map(|term| {
            if term.m == 0 {
                0.5 * term.value
            } else {
                term.value
            }
        })
        .sum::<f64>();
    Ok(FreeEnergyResult {
        free_energy: t / (2.0 * std::f64::consts::PI) * sum,
        abs_error: 0.0,
        modes_used: terms.len(),
        tail_bound: 0.0,
        terms,
    })
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..n {
        let v = f(a + i as f64 * h);
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even)
}
