//! Temperature and separation sweeps written as CSV.

use std::path::{Path, PathBuf};

use casimir_core::quantities::{
    energy_per_area_to_si, entropy_per_area_to_si, kelvin, micrometres, pressure_to_si, to_kelvin,
    to_micrometres,
};
use casimir_core::thermo::temperature_grid;
use casimir_core::{entropy, free_energy, pressure, Geometry, MaterialResponse};
use rayon::prelude::*;

use crate::config::{Material, Quantity, RunConfig};
use crate::error::CliError;
use crate::plot;

pub const HEADER: [&str; 6] = ["T_K", "a_um", "quantity", "value_SI", "abs_err_SI", "model"];
pub const PARTIAL_MARKER: &str = "#PARTIAL";
/// Absolute error floor in SI units for the tolerance check.
pub const ERROR_FLOOR_SI: f64 = 1e-30;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub t_k: f64,
    pub a_um: f64,
    pub quantity: Quantity,
    pub value_si: f64,
    pub abs_error_si: f64,
    pub model: String,
}

impl SweepRow {
    pub fn within_tolerance(&self, rel_tol: f64) -> bool {
        self.abs_error_si <= rel_tol * self.value_si.abs() + ERROR_FLOOR_SI
    }

    fn record(&self) -> [String; 6] {
        [
            fmt_number(self.t_k),
            fmt_number(self.a_um),
            self.quantity.name().to_string(),
            fmt_number(self.value_si),
            fmt_number(self.abs_error_si),
            self.model.clone(),
        ]
    }
}

/// Twelve significant digits, independent of locale.
pub fn fmt_number(x: f64) -> String {
    format!("{x:.11e}")
}

/// Free energies are computed this much tighter than the requested
/// tolerance so that differentiation does not eat the error budget.
pub fn internal_tolerance(rel_tol: f64) -> f64 {
    (rel_tol * 1e-3).max(1e-13)
}

/// Value and error in SI units at separation `a` (m) and temperature `t`
/// (natural units).
pub fn evaluate(
    material: &MaterialResponse,
    a: f64,
    t: f64,
    quantity: Quantity,
    rel_tol: f64,
) -> casimir_core::Result<(f64, f64)> {
    let geom = Geometry::new(a)?;
    let tol = internal_tolerance(rel_tol);
    Ok(match quantity {
        Quantity::FreeEnergy => {
            let r = free_energy(&geom, t, material, tol)?;
            (
                energy_per_area_to_si(r.free_energy),
                energy_per_area_to_si(r.abs_error),
            )
        }
        Quantity::Pressure => {
            let r = pressure(&geom, t, material, tol)?;
            (pressure_to_si(r.pressure), pressure_to_si(r.abs_error()))
        }
        Quantity::Entropy => {
            let r = entropy(&geom, t, material, tol)?;
            (
                entropy_per_area_to_si(r.entropy),
                entropy_per_area_to_si(r.abs_error()),
            )
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    Temperature,
    Separation,
}

/// (a in m, T natural) sample points in sweep order.
pub fn sweep_points(cfg: &RunConfig, kind: SweepKind) -> Result<Vec<(f64, f64)>, CliError> {
    match kind {
        SweepKind::Temperature => {
            let a = cfg
                .a_um
                .ok_or_else(|| CliError::Config("sweep-t needs `a_um`".into()))?;
            let r = cfg
                .t_range
                .ok_or_else(|| CliError::Config("sweep-t needs `t_range`".into()))?;
            let grid = temperature_grid(kelvin(r.min_k), kelvin(r.max_k), r.n)?;
            Ok(grid.into_iter().map(|t| (micrometres(a), t)).collect())
        }
        SweepKind::Separation => {
            let t = cfg
                .t_k
                .ok_or_else(|| CliError::Config("sweep-a needs `t_k`".into()))?;
            let r = cfg
                .a_range
                .ok_or_else(|| CliError::Config("sweep-a needs `a_range`".into()))?;
            Ok((0..r.n)
                .map(|j| {
                    let a = r.min_um + (r.max_um - r.min_um) * j as f64 / (r.n - 1) as f64;
                    (micrometres(a), kelvin(t))
                })
                .collect())
        }
    }
}

/// Computes every row; stops at the first failure in sweep order.
pub fn compute_rows(
    material: &Material,
    points: &[(f64, f64)],
    quantity: Quantity,
    rel_tol: f64,
) -> (Vec<SweepRow>, Option<CliError>) {
    let results: Vec<casimir_core::Result<SweepRow>> = points
        .par_iter()
        .map(|&(a, t)| {
            let (value_si, abs_error_si) = evaluate(&material.response, a, t, quantity, rel_tol)?;
            Ok(SweepRow {
                t_k: to_kelvin(t),
                a_um: to_micrometres(a),
                quantity,
                value_si,
                abs_error_si,
                model: material.tag.clone(),
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(row) => rows.push(row),
            Err(e) => return (rows, Some(CliError::Numerical(e.to_string()))),
        }
    }
    (rows, None)
}

pub fn write_csv(
    path: &Path,
    rows: &[SweepRow],
    failure: Option<&CliError>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(row.record())?;
    }
    if let Some(err) = failure {
        w.write_record([PARTIAL_MARKER, "", "", "", "", &err.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub rows: usize,
    pub outside_tolerance: usize,
    pub plot_script: Option<PathBuf>,
}

/// Runs a sweep end to end: computes, writes the CSV and optionally the
/// plot script.
pub fn run_sweep(cfg: &RunConfig, kind: SweepKind) -> Result<SweepSummary, CliError> {
    let material = cfg.material.resolve()?;
    let points = sweep_points(cfg, kind)?;
    let (rows, failure) = compute_rows(&material, &points, cfg.quantity, cfg.rel_tol);
    write_csv(&cfg.output_path, &rows, failure.as_ref())?;
    if let Some(err) = failure {
        return Err(err);
    }
    let outside: Vec<&SweepRow> = rows
        .iter()
        .filter(|r| !r.within_tolerance(cfg.rel_tol))
        .collect();
    for row in &outside {
        eprintln!(
            "warning: T = {} K, a = {} um: abs_err {:e} exceeds rel_tol x |value|",
            row.t_k, row.a_um, row.abs_error_si
        );
    }
    let plot_script = if cfg.emit_plot_script {
        let out = cfg.output_path.with_extension("gp");
        plot::emit_plot_script(std::slice::from_ref(&cfg.output_path), &out)?;
        Some(out)
    } else {
        None
    };
    Ok(SweepSummary {
        rows: rows.len(),
        outside_tolerance: outside.len(),
        plot_script,
    })
}
