//! `lightcone` — run the reproducible experiments from the command line.
//!
//! Every run subcommand reads an optional flat `key = value` config, applies
//! the command-line overrides and writes its artifacts under `--out`.
//! Exit status: 0 success, 2 invalid input, 3 a numerical check failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lightcone::error::Error;
use lightcone::experiments::{
    cmd_bench, cmd_coeff, cmd_compare, cmd_limits, cmd_oscillator, cmd_propagate, cmd_twoslit, Report,
};
use lightcone::io::ExperimentConfig;

#[derive(Parser)]
#[command(name = "lightcone", version, about = "Relativistic path integral on the light cone")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV, SVG and the manifest.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override any config key, e.g. `--set xi_list=25,100`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the kinetic coefficient C(ξ) and check its large-ξ limit.
    Coeff {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        xi_min: Option<f64>,
        #[arg(long)]
        xi_max: Option<f64>,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Degenerate and distinguished limit ladders.
    Limits {
        #[command(flatten)]
        common: Common,
        #[arg(long = "T")]
        t_end: Option<f64>,
        #[arg(long)]
        xi_list: Option<String>,
        #[arg(long)]
        cdt_list: Option<String>,
    },
    /// Delayed arrival behind the exclusion triangle of a two-slit gap.
    Twoslit {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        c: Option<f64>,
        #[arg(long = "W")]
        w: Option<usize>,
    },
    /// Energy recovery and boundary-layer order for the harmonic oscillator.
    Oscillator {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        x0: Option<f64>,
        #[arg(long)]
        eps_list: Option<String>,
    },
    /// Time the direct and FFT backends and check they agree.
    Bench {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sizes: Option<String>,
        #[arg(long)]
        widths: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Raw path-integral run writing snapshots, norms and fronts.
    Propagate {
        #[command(flatten)]
        common: Common,
        /// Initial data, e.g. `gaussian 1 0 8.5` or `box -1 1`.
        #[arg(long)]
        initial: Option<String>,
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long = "W")]
        w: Option<usize>,
        #[arg(long)]
        backend: Option<String>,
    },
    /// Relative L² difference of two snapshot CSVs.
    Compare {
        a: PathBuf,
        b: PathBuf,
        /// Fail with exit 3 above this difference.
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn config(common: &Common, extra: &[(&str, Option<String>)]) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::new(),
    };
    cfg.apply_overrides(common.overrides.iter().map(String::as_str))?;
    for (k, v) in extra {
        if let Some(v) = v {
            cfg.set(k, v);
        }
    }
    Ok(cfg)
}

fn run(cmd: Command) -> Result<Report, Error> {
    let s = |v: Option<f64>| v.map(|x| x.to_string());
    match cmd {
        Command::Coeff {
            common,
            xi_min,
            xi_max,
            samples,
        } => {
            let mut cfg = config(&common, &[])?;
            let lo = xi_min.map_or_else(|| cfg.get_or("xi_min", 1000.0), Ok)?;
            let hi = xi_max.map_or_else(|| cfg.get_or("xi_max", 1200.0), Ok)?;
            let n = samples.map_or_else(|| cfg.get_or("samples", 401), Ok)?;
            cmd_coeff(lo, hi, n, &common.out)
        }
        Command::Limits {
            common,
            t_end,
            xi_list,
            cdt_list,
        } => {
            let mut cfg = config(
                &common,
                &[("T", s(t_end)), ("xi_list", xi_list), ("cdt_list", cdt_list)],
            )?;
            cmd_limits(&mut cfg, &common.out)
        }
        Command::Twoslit { common, c, w } => {
            let mut cfg = config(&common, &[("c", s(c)), ("W", w.map(|v| v.to_string()))])?;
            cmd_twoslit(&mut cfg, &common.out)
        }
        Command::Oscillator {
            common,
            eps,
            x0,
            eps_list,
        } => {
            let mut cfg = config(&common, &[("eps", s(eps)), ("x0", s(x0)), ("eps_list", eps_list)])?;
            cmd_oscillator(&mut cfg, &common.out)
        }
        Command::Bench {
            common,
            sizes,
            widths,
            seed,
        } => {
            let mut cfg = config(
                &common,
                &[
                    ("sizes", sizes),
                    ("widths", widths),
                    ("seed", seed.map(|v| v.to_string())),
                ],
            )?;
            cmd_bench(&mut cfg, &common.out)
        }
        Command::Propagate {
            common,
            initial,
            steps,
            w,
            backend,
        } => {
            let mut cfg = config(
                &common,
                &[
                    ("initial", initial),
                    ("steps", steps.map(|v| v.to_string())),
                    ("W", w.map(|v| v.to_string())),
                    ("backend", backend),
                ],
            )?;
            cmd_propagate(&mut cfg, &common.out)
        }
        Command::Compare { a, b, tol } => cmd_compare(&a, &b, tol),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Accuracy { .. } | Error::Stability { .. } | Error::Numerical(_) | Error::Comparison(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(report) => {
            print!("{}", report.render());
            if report.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
