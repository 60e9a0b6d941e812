//! Entropy, pressure and curve-shape diagnostics derived from F(a, T).
//!
//! Derivatives are central differences with one Richardson level:
//! D = (4·D_{h/2} − D_h)/3, with |D_h − D_{h/2}|/3 as the truncation
//! estimate.

use rayon::prelude::*;

use crate::asymptotics::check_relaxation_applicability;
use crate::error::{invalid, CasimirError, Result};
use crate::lifshitz::{free_energy, Geometry};
use crate::materials::MaterialResponse;
use crate::quantities::kelvin;

/// One Richardson-extrapolated derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Derivative {
    value: f64,
    richardson_error: f64,
    propagated_error: f64,
}

/// `f` returns (value, abs_error).
fn richardson<F>(f: F, x: f64, h: f64) -> Result<Derivative>
where
    F: Fn(f64) -> Result<(f64, f64)> + Sync,
{
    let points = [x + h, x - h, x + 0.5 * h, x - 0.5 * h];
    let evals: Vec<(f64, f64)> = points.par_iter().map(|&p| f(p)).collect::<Result<_>>()?;
    let d_h = (evals[0].0 - evals[1].0) / (2.0 * h);
    let d_half = (evals[2].0 - evals[3].0) / h;
    let err_h = (evals[0].1 + evals[1].1) / (2.0 * h);
    let err_half = (evals[2].1 + evals[3].1) / h;
    Ok(Derivative {
        value: (4.0 * d_half - d_h) / 3.0,
        richardson_error: (d_h - d_half).abs() / 3.0,
        propagated_error: (4.0 * err_half + err_h) / 3.0,
    })
}

fn check_step(h: f64, x: f64, name: &'static str) -> Result<()> {
    if !(h > 0.0) || x + h == x || x - 0.5 * h == x {
        return Err(invalid(
            name,
            format!("finite-difference step underflows at {x:e}"),
        ));
    }
    Ok(())
}

/// Entropy per unit area, S = −∂F/∂T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyResult {
    pub entropy: f64,
    pub temperature: f64,
    pub step: f64,
    pub richardson_error: f64,
    /// Free-energy errors carried through the difference quotients.
    pub propagated_error: f64,
}

impl EntropyResult {
    pub fn abs_error(&self) -> f64 {
        self.richardson_error + self.propagated_error
    }
}

pub fn entropy(
    geom: &Geometry,
    t: f64,
    material: &MaterialResponse,
    rel_tol: f64,
) -> Result<EntropyResult> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid("T", format!("entropy needs T > 0, got {t}")));
    }
    let h = (0.25 * t).min(geom.effective_temperature() / 200.0);
    check_step(h, t, "T")?;
    let d = richardson(
        |tt| free_energy(geom, tt, material, rel_tol).map(|r| (r.free_energy, r.abs_error)),
        t,
        h,
    )?;
    Ok(EntropyResult {
        entropy: -d.value,
        temperature: t,
        step: h,
        richardson_error: d.richardson_error,
        propagated_error: d.propagated_error,
    })
}

/// Pressure, P = −∂F/∂a. Negative means attraction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureResult {
    pub pressure: f64,
    pub separation: f64,
    pub step: f64,
    pub richardson_error: f64,
    pub propagated_error: f64,
}

impl PressureResult {
    pub fn abs_error(&self) -> f64 {
        self.richardson_error + self.propagated_error
    }
}

pub fn pressure(
    geom: &Geometry,
    t: f64,
    material: &MaterialResponse,
    rel_tol: f64,
) -> Result<PressureResult> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid("T", format!("pressure needs T > 0, got {t}")));
    }
    let a = geom.separation();
    let h = a * 1e-3;
    check_step(h, a, "a")?;
    let d = richardson(
        |aa| {
            let g = Geometry::new(aa)?;
            free_energy(&g, t, material, rel_tol).map(|r| (r.free_energy, r.abs_error))
        },
        a,
        h,
    )?;
    Ok(PressureResult {
        pressure: -d.value,
        separation: a,
        step: h,
        richardson_error: d.richardson_error,
        propagated_error: d.propagated_error,
    })
}

/// Quadratic extrapolation of S(T) to T = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct NernstFit {
    pub s0: f64,
    pub c1: f64,
    pub c2: f64,
    /// Euclidean norm of the fit residuals.
    pub residual: f64,
    pub samples: Vec<EntropyResult>,
}

pub fn nernst_limit(
    geom: &Geometry,
    material: &MaterialResponse,
    temperatures: &[f64],
    rel_tol: f64,
) -> Result<NernstFit> {
    if temperatures.len() < 4 {
        return Err(invalid("T_sequence", "need at least 4 temperatures"));
    }
    if temperatures.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid(
            "T_sequence",
            "temperatures must be strictly decreasing",
        ));
    }
    let limit = geom.effective_temperature() / 20.0;
    for &t in temperatures {
        if !(t > 0.0) || t >= limit {
            return Err(invalid(
                "T_sequence",
                format!(
                    "T = {:.6} K is outside (0, T_eff/20 = {:.6} K)",
                    crate::quantities::to_kelvin(t),
                    crate::quantities::to_kelvin(limit)
                ),
            ));
        }
        if let MaterialResponse::Dielectric(crate::materials::DielectricModel::Drude(p)) = material
        {
            check_relaxation_applicability(p, t)?;
        }
    }
    let samples = temperatures
        .iter()
        .map(|&t| entropy(geom, t, material, rel_tol))
        .collect::<Result<Vec<_>>>()?;
    let ys: Vec<f64> = samples.iter().map(|s| s.entropy).collect();
    let (coeffs, residual) = quadratic_fit(temperatures, &ys);
    Ok(NernstFit {
        s0: coeffs[0],
        c1: coeffs[1],
        c2: coeffs[2],
        residual,
        samples,
    })
}

/// Least squares y ≈ c0 + c1·x + c2·x², solved on x scaled to [0, 1].
fn quadratic_fit(xs: &[f64], ys: &[f64]) -> ([f64; 3], f64) {
    let scale = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut ata = [[0.0; 3]; 3];
    let mut aty = [0.0; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let u = x / scale;
        let row = [1.0, u, u * u];
        for i in 0..3 {
            aty[i] += row[i] * y;
            for j in 0..3 {
                ata[i][j] += row[i] * row[j];
            }
        }
    }
    let c = solve3(ata, aty);
    let coeffs = [c[0], c[1] / scale, c[2] / (scale * scale)];
    let residual = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let r = y - (coeffs[0] + coeffs[1] * x + coeffs[2] * x * x);
            r * r
        })
        .sum::<f64>()
        .sqrt();
    (coeffs, residual)
}

/// Gaussian elimination with partial pivoting.
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> [f64; 3] {
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (dst, src) in m[row].iter_mut().zip(pivot_row).skip(col) {
                *dst -= f * src;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let s: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / m[row][row];
    }
    x
}

/// Below this the default sweep grid is logarithmic.
pub const LOG_GRID_KNEE_K: f64 = 50.0;

/// Sweep grid: about a quarter of the points log-spaced below 50 K, the rest
/// linear up to `t_max`. Ranges entirely on one side use a single spacing.
pub fn temperature_grid(t_min: f64, t_max: f64, n: usize) -> Result<Vec<f64>> {
    if !(t_min > 0.0) || !(t_max > t_min) {
        return Err(invalid("T_range", "need 0 < T_min < T_max"));
    }
    if n < 2 {
        return Err(invalid("T_range", "need at least 2 points"));
    }
    let knee = kelvin(LOG_GRID_KNEE_K);
    let linear = |lo: f64, hi: f64, k: usize| -> Vec<f64> {
        (0..k)
            .map(|j| lo + (hi - lo) * j as f64 / (k - 1) as f64)
            .collect()
    };
    if t_min >= knee || n < 4 {
        return Ok(linear(t_min, t_max, n));
    }
    if t_max <= knee {
        let ratio = t_max / t_min;
        return Ok((0..n)
            .map(|j| t_min * ratio.powf(j as f64 / (n - 1) as f64))
            .collect());
    }
    let n_log = (n / 4).max(1);
    let ratio = knee / t_min;
    let mut grid: Vec<f64> = (0..n_log)
        .map(|j| t_min * ratio.powf(j as f64 / n_log as f64))
        .collect();
    grid.extend(linear(knee, t_max, n - n_log));
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    MonotoneIncreasingMagnitude,
    MonotoneDecreasingMagnitude,
    NonMonotonic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TurningKind {
    Maximum,
    Minimum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TurningPoint {
    pub temperature: f64,
    pub kind: TurningKind,
}

/// |P| at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSample {
    pub temperature: f64,
    pub magnitude: f64,
    pub abs_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport {
    pub classification: Monotonicity,
    pub turning_points: Vec<TurningPoint>,
    pub scanned_range: (f64, f64),
    pub n_samples: usize,
    pub samples: Vec<ForceSample>,
}

impl MonotonicityReport {
    /// True when |P| drops significantly somewhere in the scan.
    pub fn has_decreasing_interval(&self) -> bool {
        self.classification == Monotonicity::MonotoneDecreasingMagnitude
            || self
                .turning_points
                .iter()
                .any(|p| p.kind == TurningKind::Maximum)
            || self
                .samples
                .windows(2)
                .any(|w| significant_sign(&w[0], &w[1]) == Some(-1))
    }
}

/// Differences smaller than this multiple of the summed errors are noise.
pub const SIGNIFICANCE: f64 = 3.0;
/// Turning points are located to this width.
pub const TURNING_RESOLUTION_K: f64 = 1.0;
pub const MAX_SCAN_TEMPERATURE_K: f64 = 2000.0;

fn significant_sign(a: &ForceSample, b: &ForceSample) -> Option<i8> {
    let diff = b.magnitude - a.magnitude;
    if diff.abs() > SIGNIFICANCE * (a.abs_error + b.abs_error) {
        Some(if diff > 0.0 { 1 } else { -1 })
    } else {
        None
    }
}

fn force_sample(
    geom: &Geometry,
    t: f64,
    material: &MaterialResponse,
    rel_tol: f64,
) -> Result<ForceSample> {
    let p = pressure(geom, t, material, rel_tol)?;
    Ok(ForceSample {
        temperature: t,
        magnitude: p.pressure.abs(),
        abs_error: p.abs_error(),
    })
}

/// Classifies |P|(T) over the sweep grid from sign changes of significant
/// successive differences.
pub fn classify_monotonicity(
    geom: &Geometry,
    material: &MaterialResponse,
    t_range: (f64, f64),
    n_samples: usize,
    rel_tol: f64,
) -> Result<MonotonicityReport> {
    if n_samples < 32 {
        return Err(invalid("n_samples", "need at least 32 samples"));
    }
    let (t_min, t_max) = t_range;
    if !(t_min > 0.0) || !(t_max > t_min) || t_max > kelvin(MAX_SCAN_TEMPERATURE_K) * (1.0 + 1e-12)
    {
        return Err(invalid("T_range", "need 0 < T_min < T_max <= 2000 K"));
    }
    let grid = temperature_grid(t_min, t_max, n_samples)?;
    let samples: Vec<ForceSample> = grid
        .par_iter()
        .map(|&t| force_sample(geom, t, material, rel_tol))
        .collect::<Result<_>>()?;

    // significant differences with the sample interval they span
    let steps: Vec<(usize, i8)> = samples
        .windows(2)
        .enumerate()
        .filter_map(|(i, w)| significant_sign(&w[0], &w[1]).map(|s| (i, s)))
        .collect();
    if steps.is_empty() {
        return Err(CasimirError::Inconclusive);
    }

    let mut turning_points = Vec::new();
    for pair in steps.windows(2) {
        let ((i, s1), (j, s2)) = (pair[0], pair[1]);
        if s1 == s2 {
            continue;
        }
        let lo = samples[i].temperature;
        let hi = samples[j + 1].temperature;
        let temperature = locate_turning_point(geom, material, rel_tol, lo, hi, s1)?;
        let kind = if s1 > 0 {
            TurningKind::Maximum
        } else {
            TurningKind::Minimum
        };
        turning_points.push(TurningPoint { temperature, kind });
    }

    let classification = if !turning_points.is_empty() {
        Monotonicity::NonMonotonic
    } else if steps[0].1 > 0 {
        Monotonicity::MonotoneIncreasingMagnitude
    } else {
        Monotonicity::MonotoneDecreasingMagnitude
    };
    Ok(MonotonicityReport {
        classification,
        turning_points,
        scanned_range: (t_min, t_max),
        n_samples,
        samples,
    })
}

/// Bisects on the sign of the local slope of |P| until the bracket is
/// narrower than the resolution. `rising` is the slope sign left of the
/// extremum.
fn locate_turning_point(
    geom: &Geometry,
    material: &MaterialResponse,
    rel_tol: f64,
    mut lo: f64,
    mut hi: f64,
    rising: i8,
) -> Result<f64> {
    let resolution = kelvin(TURNING_RESOLUTION_K);
    while hi - lo > resolution {
        let mid = 0.5 * (lo + hi);
        // widen the symmetric probe until the slope sign is significant
        let mut delta = 0.25 * resolution;
        let sign = loop {
            let left = force_sample(geom, mid - delta, material, rel_tol)?;
            let right = force_sample(geom, mid + delta, material, rel_tol)?;
            if let Some(s) = significant_sign(&left, &right) {
                break Some(s);
            }
            delta *= 2.0;
            if delta > 0.5 * (hi - lo) || delta >= mid {
                break None;
            }
        };
        match sign {
            None => return Ok(mid),
            Some(s) if s == rising => lo = mid,
            Some(_) => hi = mid,
        }
    }
    Ok(0.5 * (lo + hi))
}
