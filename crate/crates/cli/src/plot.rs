//! gnuplot script generation for sweep CSVs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::config::Quantity;
use crate::error::CliError;
use crate::sweep::{HEADER, PARTIAL_MARKER};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlotStyle {
    /// First curve solid, the rest dashed.
    #[default]
    Overlay,
    /// Every curve solid.
    Solid,
}

#[derive(Debug, Clone, PartialEq)]
struct CsvSummary {
    path: PathBuf,
    quantity: Quantity,
    model: String,
    temperature_sweep: bool,
}

fn schema_error(path: &Path, column: &str, detail: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}: column `{column}` {detail}", path.display()))
}

fn inspect(path: &Path) -> Result<CsvSummary, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let header = reader.headers()?.clone();
    for (i, expected) in HEADER.iter().enumerate() {
        match header.get(i) {
            Some(name) if name == *expected => {}
            Some(name) => {
                return Err(schema_error(
                    path,
                    expected,
                    format!("expected, found `{name}`"),
                ))
            }
            None => return Err(schema_error(path, expected, "missing")),
        }
    }
    if header.len() > HEADER.len() {
        return Err(schema_error(path, &header[HEADER.len()], "unexpected"));
    }

    let mut quantity = None;
    let mut model = String::new();
    let mut temperatures = Vec::new();
    for record in reader.records() {
        let record = record?;
        if record.get(0).is_some_and(|f| f.starts_with(PARTIAL_MARKER)) {
            continue;
        }
        if record.len() != HEADER.len() {
            return Err(schema_error(
                path,
                HEADER[record.len().min(HEADER.len() - 1)],
                "has a malformed row",
            ));
        }
        for idx in [0, 1, 3, 4] {
            if record[idx].parse::<f64>().is_err() {
                return Err(schema_error(
                    path,
                    HEADER[idx],
                    format!("is not numeric: `{}`", &record[idx]),
                ));
            }
        }
        let q = Quantity::parse(&record[2]).ok_or_else(|| {
            schema_error(
                path,
                "quantity",
                format!("has unknown value `{}`", &record[2]),
            )
        })?;
        if quantity.is_some_and(|prev| prev != q) {
            return Err(schema_error(path, "quantity", "mixes quantities"));
        }
        quantity = Some(q);
        model = record[5].to_string();
        temperatures.push(record[0].parse::<f64>().unwrap_or_default());
    }
    let quantity = quantity.ok_or_else(|| schema_error(path, "T_K", "has no data rows"))?;
    let temperature_sweep = temperatures.len() < 2 || temperatures.windows(2).any(|w| w[0] != w[1]);
    Ok(CsvSummary {
        path: path.to_path_buf(),
        quantity,
        model,
        temperature_sweep,
    })
}

fn y_label(q: Quantity) -> String {
    match q {
        Quantity::FreeEnergy => format!("F ({})", q.si_unit()),
        Quantity::Pressure => format!("|P| ({})", q.si_unit()),
        Quantity::Entropy => format!("entropy S ({})", q.si_unit()),
    }
}

/// Builds the script text without touching the output path.
pub fn plot_script(csv_paths: &[PathBuf], style: PlotStyle) -> Result<String, CliError> {
    if csv_paths.is_empty() {
        return Err(CliError::Config("plot needs at least one CSV".into()));
    }
    let summaries = csv_paths
        .iter()
        .map(|p| inspect(p))
        .collect::<Result<Vec<_>, _>>()?;
    let first = &summaries[0];
    for s in &summaries[1..] {
        if s.quantity != first.quantity {
            return Err(schema_error(
                &s.path,
                "quantity",
                format!("differs from {}", first.path.display()),
            ));
        }
        if s.temperature_sweep != first.temperature_sweep {
            let column = if first.temperature_sweep {
                "T_K"
            } else {
                "a_um"
            };
            return Err(schema_error(
                &s.path,
                column,
                "is not the swept variable of the first CSV",
            ));
        }
    }

    let (x_col, x_label) = if first.temperature_sweep {
        (1, "T (K)")
    } else {
        (2, "a (um)")
    };
    let y_expr = match first.quantity {
        Quantity::Pressure => "(abs($4))",
        _ => "4",
    };
    let mut out = String::new();
    writeln!(out, "# generated by casimir plot").unwrap();
    writeln!(out, "set datafile separator \",\"").unwrap();
    writeln!(out, "set xlabel \"{x_label}\"").unwrap();
    writeln!(out, "set ylabel \"{}\"", y_label(first.quantity)).unwrap();
    writeln!(out, "set key top left").unwrap();
    let clauses: Vec<String> = summaries
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let dash = match style {
                PlotStyle::Overlay if i > 0 => 2,
                _ => 1,
            };
            format!(
                "  \"{}\" every ::1 using {x_col}:{y_expr} with lines linecolor rgb \"black\" dashtype {dash} linewidth 2 title \"{}\"",
                s.path.display(),
                s.model
            )
        })
        .collect();
    writeln!(out, "plot \\\n{}", clauses.join(", \\\n")).unwrap();
    Ok(out)
}

pub fn emit_plot_script(csv_paths: &[PathBuf], out: &Path) -> Result<(), CliError> {
    emit_plot_script_styled(csv_paths, out, PlotStyle::default())
}

pub fn emit_plot_script_styled(
    csv_paths: &[PathBuf],
    out: &Path,
    style: PlotStyle,
) -> Result<(), CliError> {
    let script = plot_script(csv_paths, style)?;
    std::fs::write(out, script).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))
}
