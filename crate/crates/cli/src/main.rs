//! Verification CLI: runs the exact one-loop check suites and writes
//! deterministic JSON or CSV reports.
//!
//! Exit status: 0 when all checks pass, 1 on verification failure (the
//! report is still written), 2 on invalid configuration or I/O errors.

mod checks;
mod config;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use sigma_forge_core::geometry::Chart;
use sigma_forge_core::report::Report;

use config::{load_target_config, TargetConfig};

const DEFAULT_SEED: u64 = 20240601;
const DEFAULT_CUTOFF: u32 = 6;

#[derive(Parser)]
#[command(name = "sigma-forge")]
#[command(about = "Exact one-loop verification suites for the two-dimensional sigma model")]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Report destination; "-" writes to stdout.
    #[arg(long, global = true, default_value = "-")]
    output: String,

    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for the randomized property suites (recorded in the report).
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Gaussian-moment battery: permutation sum vs iterated contraction vs
    /// quadrature.
    VerifyWick {
        /// Largest number of variables.
        #[arg(long, default_value_t = 4)]
        dim: usize,
        /// Largest monomial degree.
        #[arg(long = "max-degree", default_value_t = 8)]
        max_degree: u32,
    },
    /// Finite BV checks: square-zero of the scale differential and the
    /// eigenvalue-scale descent identity on seeded random models.
    VerifyQmeFinite {
        /// Number of seeded random models for the descent battery.
        #[arg(long, default_value_t = 50)]
        models: usize,
        #[arg(long = "max-dim", default_value_t = 3)]
        max_dim: usize,
        #[arg(long = "max-degree", default_value_t = 4)]
        max_degree: u32,
        #[arg(long = "hbar-cutoff", default_value_t = 2)]
        hbar_cutoff: usize,
    },
    /// O(N)-model identities (I), (II), (III) plus the classical master
    /// equation on the round sphere.
    VerifyOnModel {
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        cutoff: Option<u32>,
        /// Target config file (sphere targets only).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// One-loop log coefficient of the two-point function vs the Ricci
    /// tensor.
    Beta {
        /// Target kind for inline configuration.
        #[arg(long, default_value = "sphere")]
        target: String,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        cutoff: Option<u32>,
        /// Target config file (overrides inline flags).
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Chevalley-Eilenberg suite for so(N) and the constrained cocycle
    /// dimension on sphere jets.
    Cohomology {
        #[arg(long = "N", default_value_t = 3)]
        n: usize,
        #[arg(long = "max-degree", default_value_t = 2)]
        max_degree: usize,
        #[arg(long, default_value_t = 4)]
        cutoff: u32,
    },
    /// Classical master equation residuals for the round sphere.
    Cme {
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long)]
        cutoff: Option<u32>,
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

/// Resolves a sphere target from flags or a config file.
fn sphere_target(
    n: Option<usize>,
    cutoff: Option<u32>,
    config: &Option<PathBuf>,
) -> Result<(usize, u32, TargetConfig), String> {
    if let Some(path) = config {
        let cfg = load_target_config(path)?;
        match &cfg {
            TargetConfig::Sphere { n, cutoff, .. } => Ok((*n, *cutoff, cfg.clone())),
            TargetConfig::Custom { .. } => {
                Err("this check needs the so(N) symmetry data of a sphere target".into())
            }
        }
    } else {
        let n = n.ok_or("missing --N (or --config)")?;
        let cutoff = cutoff.unwrap_or(DEFAULT_CUTOFF);
        if cutoff < 2 {
            return Err(format!("cutoff must be >= 2, got {cutoff}"));
        }
        if n < 2 {
            return Err(format!("N must be >= 2, got {n}"));
        }
        Ok((n, cutoff, TargetConfig::sphere(n, cutoff, Chart::Graph)))
    }
}

fn run(cli: Cli) -> Result<Report, String> {
    let seed = cli.seed;
    match &cli.command {
        Command::VerifyWick { dim, max_degree } => {
            if *dim == 0 || *dim > 6 {
                return Err(format!("dim must be in 1..=6, got {dim}"));
            }
            let config = serde_json::json!({"dim": dim, "max_degree": max_degree});
            let mut report = Report::new("verify-wick", config, seed);
            report.extend(checks::verify_wick(*dim, *max_degree, seed));
            Ok(report)
        }
        Command::VerifyQmeFinite { models, max_dim, max_degree, hbar_cutoff } => {
            if *max_dim < 2 {
                return Err("max-dim must be >= 2 for an eigenvalue split".into());
            }
            let config = serde_json::json!({
                "models": models,
                "max_dim": max_dim,
                "max_degree": max_degree,
                "hbar_cutoff": hbar_cutoff,
            });
            let mut report = Report::new("verify-qme-finite", config, seed);
            report.extend(checks::verify_qme_finite(*models, *max_dim, *max_degree, *hbar_cutoff, seed));
            Ok(report)
        }
        Command::VerifyOnModel { n, cutoff, config } => {
            let (n, cutoff, cfg) = sphere_target(*n, *cutoff, config)?;
            if n < 3 {
                return Err("verify-on-model needs N >= 3".into());
            }
            let mut report = Report::new("verify-on-model", cfg.echo(), seed);
            report.extend(checks::verify_on_model(n, cutoff));
            Ok(report)
        }
        Command::Beta { target, n, cutoff, config } => {
            let cfg = if let Some(path) = config {
                load_target_config(path)?
            } else {
                if target != "sphere" {
                    return Err(format!(
                        "unknown inline target {target:?}; use --config for custom targets"
                    ));
                }
                let n = n.ok_or("missing --N (or --config)")?;
                let cutoff = cutoff.unwrap_or(DEFAULT_CUTOFF);
                TargetConfig::sphere(n, cutoff, Chart::Normal)
            };
            let mut report = Report::new("beta", cfg.echo(), seed);
            report.extend(checks::beta(&cfg)?);
            Ok(report)
        }
        Command::Cohomology { n, max_degree, cutoff } => {
            if *n < 2 {
                return Err(format!("N must be >= 2, got {n}"));
            }
            let config = serde_json::json!({"N": n, "max_degree": max_degree, "cutoff": cutoff});
            let mut report = Report::new("cohomology", config, seed);
            let (records, dims) = checks::cohomology(*n, *max_degree, *cutoff);
            report.extend(records);
            report.cohomology = dims;
            Ok(report)
        }
        Command::Cme { n, cutoff, config } => {
            let (n, cutoff, cfg) = sphere_target(*n, *cutoff, config)?;
            let mut report = Report::new("cme", cfg.echo(), seed);
            report.extend(checks::cme(n, cutoff));
            Ok(report)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let output = cli.output.clone();
    let format = cli.format;

    let report = match run(cli) {
        Ok(report) => report,
        Err(message) => {
            eprintln!("sigma-forge: {message}");
            return ExitCode::from(2);
        }
    };

    let rendered = match format {
        Format::Json => report.render_json(),
        Format::Csv => report.render_csv(),
    };
    if output == "-" {
        print!("{rendered}");
    } else if let Err(e) = std::fs::write(&output, rendered) {
        eprintln!("sigma-forge: cannot write {output}: {e}");
        return ExitCode::from(2);
    }

    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
