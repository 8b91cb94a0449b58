//! `tcs`: runs damped-oscillator coherent-state scenarios and writes CSV or
//! JSON artifacts.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod scenarios;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64 as C64;

use config::{Format, Layer, RunConfig};
use table::Table;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] tcs_core::Error),
    #[error("cannot write output: {0}")]
    Io(#[from] io::Error),
}

#[derive(Parser, Debug)]
#[command(name = "tcs", version, about = "Trajectory-coherent states of the Caldirola-Kanai oscillator")]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Mass
    #[arg(long, global = true)]
    m: Option<f64>,
    /// Undamped angular frequency
    #[arg(long, global = true)]
    omega0: Option<f64>,
    /// Damping rate
    #[arg(long, global = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    hbar: Option<f64>,
    /// Width preset: Re b = 0, Im b = mu m omega
    #[arg(long, global = true)]
    mu: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    b_re: Option<f64>,
    #[arg(long, global = true)]
    b_im: Option<f64>,
    #[arg(long, global = true)]
    t_max: Option<f64>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Output file (standard output when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Add the closed-form against ODE deviation column
    #[arg(long, global = true)]
    oracle: bool,
    /// key = value file; flags take precedence over it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

impl CommonArgs {
    fn layer(&self) -> Layer {
        Layer {
            m: self.m,
            omega0: self.omega0,
            gamma: self.gamma,
            hbar: self.hbar,
            mu: self.mu,
            b_re: self.b_re,
            b_im: self.b_im,
            t_max: self.t_max,
            samples: self.samples,
            out: self.out.clone(),
            format: self.format,
            oracle: self.oracle.then_some(true),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classical trajectory, Jacobi fields, phase and action on the grid
    Trajectory,
    /// Moments and norms of |0>..|levels> and of |alpha>
    States {
        #[arg(long, default_value_t = 3)]
        levels: usize,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        alpha_re: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        alpha_im: f64,
    },
    /// Uncertainties and products in |level> and |alpha>
    Uncertainty {
        #[arg(long, default_value_t = 0)]
        level: usize,
    },
    /// Times where the uncertainty product reaches its floor
    Minima,
    /// Width parameter mu that minimizes the product at a given time
    SolveMu {
        #[arg(long)]
        time: f64,
    },
    /// Run the verification suite and report JSON
    Verify {
        /// all, dynamics, states or observables
        #[arg(long, default_value = "all")]
        suite: String,
        /// Inject a relative fault, e.g. `--perturb w 1e-2`
        #[arg(long, num_args = 2, value_names = ["FIELD", "VALUE"])]
        perturb: Option<Vec<String>>,
    },
}

fn sink(cfg: &RunConfig) -> Result<Box<dyn Write>, CliError> {
    Ok(match &cfg.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(cfg: &RunConfig, table: &Table) -> Result<(), CliError> {
    let mut out = sink(cfg)?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => table.write_csv(&mut out)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &table.to_json()).map_err(io::Error::from)?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    Ok(())
}

fn perturbation(spec: &Option<Vec<String>>) -> Result<f64, CliError> {
    let Some(spec) = spec else { return Ok(0.0) };
    match spec.as_slice() {
        [field, value] if field == "w" => value
            .parse()
            .map_err(|_| CliError::Usage(format!("cannot parse perturbation '{value}'"))),
        [field, _] => Err(CliError::Usage(format!("only w can be perturbed, got '{field}'"))),
        _ => Err(CliError::Usage("--perturb takes FIELD VALUE".into())),
    }
}

/// Ok(true) when the run succeeded and any verification passed.
fn run(cli: Cli) -> Result<bool, CliError> {
    let file = match &cli.common.config {
        Some(path) => Layer::from_file(path)?,
        None => Layer::default(),
    };
    let cfg = RunConfig::resolve(&cli.common.layer(), &file)?;
    match cli.command {
        Command::Trajectory => emit(&cfg, &scenarios::trajectory(&cfg)?)?,
        Command::States { levels, alpha_re, alpha_im } => {
            emit(&cfg, &scenarios::states(&cfg, levels, C64::new(alpha_re, alpha_im))?)?
        }
        Command::Uncertainty { level } => emit(&cfg, &scenarios::uncertainty(&cfg, level)?)?,
        Command::Minima => emit(&cfg, &scenarios::minima(&cfg)?)?,
        Command::SolveMu { time } => emit(&cfg, &scenarios::solve_mu(&cfg, time)?)?,
        Command::Verify { suite, perturb } => {
            let report = scenarios::verify(&cfg, &suite, perturbation(&perturb)?)?;
            match cfg.format.unwrap_or(Format::Json) {
                Format::Json => {
                    let mut out = sink(&cfg)?;
                    serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::from)?;
                    writeln!(out)?;
                    out.flush()?;
                }
                Format::Csv => emit(&cfg, &report.to_table())?,
            }
            return Ok(report.pass);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
