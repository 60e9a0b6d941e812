use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use casimir_cli::audit::{nernst_audit, validate_asym};
use casimir_cli::config::{MaterialSpec, RunConfig};
use casimir_cli::plot::{emit_plot_script_styled, PlotStyle};
use casimir_cli::sweep::{run_sweep, SweepKind};
use casimir_cli::{configure_threads, CliError};

#[derive(Parser)]
#[command(
    name = "casimir",
    version,
    about = "Thermal Casimir sweeps and third-law audits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Overlay,
    Solid,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep temperature at fixed separation.
    SweepT {
        #[arg(long)]
        config: PathBuf,
    },
    /// Sweep separation at fixed temperature.
    SweepA {
        #[arg(long)]
        config: PathBuf,
    },
    /// Extrapolate the entropy to T = 0 and compare with the Drude closed form.
    Nernst {
        #[arg(long)]
        preset: String,
        #[arg(long)]
        a_um: f64,
        /// Decreasing temperatures in K, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        t_list: Vec<f64>,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = 1e-11)]
        rel_tol: f64,
    },
    /// Compare the full Matsubara sum with the low-temperature expansion.
    ValidateAsym {
        #[arg(long)]
        a_um: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        t_list: Vec<f64>,
        #[arg(long, default_value = "gold-paper-drude")]
        preset: String,
        #[arg(long, default_value_t = 1e-10)]
        rel_tol: f64,
    },
    /// Write a gnuplot script overlaying sweep CSVs.
    Plot {
        #[arg(long, value_delimiter = ',', required = true)]
        csv: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "overlay")]
        style: Style,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::SweepT { config } => sweep(&config, SweepKind::Temperature),
        Command::SweepA { config } => sweep(&config, SweepKind::Separation),
        Command::Nernst {
            preset,
            a_um,
            t_list,
            csv,
            rel_tol,
        } => {
            let material = MaterialSpec::Preset(preset).resolve()?;
            let report = nernst_audit(&material, a_um, &t_list, rel_tol)?;
            println!("{report}");
            if let Some(path) = csv {
                report.write_csv(&path)?;
            }
            Ok(())
        }
        Command::ValidateAsym {
            a_um,
            t_list,
            preset,
            rel_tol,
        } => {
            let report = validate_asym(&preset, a_um, &t_list, rel_tol)?;
            println!("{report}");
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::Numerical(
                    "asymptotic agreement criterion not met".into(),
                ))
            }
        }
        Command::Plot { csv, out, style } => {
            let style = match style {
                Style::Overlay => PlotStyle::Overlay,
                Style::Solid => PlotStyle::Solid,
            };
            emit_plot_script_styled(&csv, &out, style)?;
            println!("wrote {}", out.display());
            Ok(())
        }
    }
}

fn sweep(config: &std::path::Path, kind: SweepKind) -> Result<(), CliError> {
    let cfg = RunConfig::load(config)?;
    let summary = run_sweep(&cfg, kind)?;
    println!(
        "wrote {} rows to {}",
        summary.rows,
        cfg.output_path.display()
    );
    if let Some(script) = summary.plot_script {
        println!("wrote {}", script.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
