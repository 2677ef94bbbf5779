//! `nsbf`: double-barrier knock-out pricing from the command line.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nsbf_core::config::{ModelConfig, OutputFormat};
use nsbf_core::pipeline;
use nsbf_core::pricing::{OptionStyle, PricingResult};
use nsbf_core::RunConfig;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "nsbf", version, about = "Double-barrier knock-out options by Neumann series of Bessel functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Price only, on the reduced path.
    Price,
    /// Price with Delta, Vega and Theta.
    Greeks,
    /// Value surface over time and spot.
    Surface,
    /// Eigenvalues and norms.
    Spectrum,
    /// Partial sums of the pricing series by band.
    Contrib,
    /// Residual curves of the summation identities.
    CheckCoefficients,
    /// Spectral price against the Crank-Nicolson solver.
    OracleCompare,
    /// Cross-product sweep over strikes, betas and gammas.
    Table,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Opts {
    /// JSON run configuration.
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration: table1-medium or table3-short.
    #[arg(long, global = true, value_name = "NAME")]
    preset: Option<String>,
    /// Write to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Mesh point count (must be 1 mod 5).
    #[arg(long, global = true, value_name = "M")]
    mesh: Option<usize>,
    #[arg(long, global = true, value_name = "W")]
    omega_max: Option<f64>,
    #[arg(long, global = true, value_name = "COUNT")]
    omega_grid: Option<usize>,
    #[arg(long, global = true, value_name = "M")]
    nsbf_order: Option<usize>,
    #[arg(long, global = true, value_name = "X")]
    lambda_cutoff: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    beta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    gamma: Option<f64>,
    #[arg(long, global = true)]
    strike: Option<f64>,
    #[arg(long, global = true)]
    style: Option<Style>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Style {
    Call,
    Put,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn load(opts: &Opts) -> Result<RunConfig> {
    let mut cfg = match (&opts.config, &opts.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            RunConfig::from_json(&text)?
        }
        (None, Some(name)) => RunConfig::preset(name)?,
        (None, None) => bail!("either --config or --preset is required"),
    };
    let n = &mut cfg.numerics;
    if let Some(m) = opts.mesh {
        n.mesh_points = m;
    }
    if let Some(w) = opts.omega_max {
        n.omega_max = w;
    }
    if let Some(c) = opts.omega_grid {
        n.omega_grid = c;
    }
    if let Some(m) = opts.nsbf_order {
        n.nsbf_order = m;
    }
    if let Some(x) = opts.lambda_cutoff {
        n.lambda_cutoff = x;
    }
    if opts.beta.is_some() || opts.gamma.is_some() {
        let ModelConfig::Ejdcev(e) = &mut cfg.model else {
            bail!("--beta and --gamma apply to ejdcev models only");
        };
        e.beta = opts.beta.unwrap_or(e.beta);
        e.gamma = opts.gamma.unwrap_or(e.gamma);
        e.delta = None;
    }
    if let Some(k) = opts.strike {
        cfg.contract.strike = k;
    }
    if let Some(s) = opts.style {
        cfg.contract.style = match s {
            Style::Call => OptionStyle::Call,
            Style::Put => OptionStyle::Put,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = load(&cli.opts)?;
    let format = match cli.opts.format {
        Some(Format::Json) => OutputFormat::Json,
        Some(Format::Csv) => OutputFormat::Csv,
        None => cfg.output.format,
    };
    let csv = format == OutputFormat::Csv;
    let text = match cli.command {
        Command::Price => result_out(&pipeline::run_price(&cfg)?, csv)?,
        Command::Greeks => result_out(&pipeline::run_greeks(&cfg)?, csv)?,
        Command::Contrib => {
            let r = pipeline::run_contributions(&cfg)?;
            if csv {
                let mut s = String::from("n1,n2,value\n");
                for b in r.contributions.iter().flat_map(|c| &c.bands) {
                    s.push_str(&format!("{},{},{}\n", b.n1, b.n2, b.value));
                }
                s
            } else {
                json(&r)?
            }
        }
        Command::Surface => {
            let s = pipeline::run_surface(&cfg)?;
            if csv {
                let mut out = String::from("t,y,value\n");
                for (t, row) in s.times.iter().zip(&s.values) {
                    for (y, v) in s.prices.iter().zip(row) {
                        out.push_str(&format!("{t},{y},{v}\n"));
                    }
                }
                out
            } else {
                json(&s)?
            }
        }
        Command::Spectrum => {
            let r = pipeline::run_spectrum(&cfg)?;
            if csv {
                let mut s = String::from("n,omega,lambda,norm_sq\n");
                for row in &r.rows {
                    s.push_str(&format!("{},{},{},{}\n", row.n, row.omega, row.lambda, row.norm_sq));
                }
                s
            } else {
                json(&r)?
            }
        }
        Command::CheckCoefficients => {
            let r = pipeline::run_check_coefficients(&cfg)?;
            if csv {
                let mut s = String::from("y,alpha_even,alpha_alternating,beta_even,beta_alternating\n");
                for (i, y) in r.prices.iter().enumerate() {
                    s.push_str(&y.to_string());
                    for curve in &r.residuals {
                        s.push_str(&format!(",{}", curve[i]));
                    }
                    s.push('\n');
                }
                s
            } else {
                json(&r)?
            }
        }
        Command::OracleCompare => {
            let r = pipeline::run_oracle_compare(&cfg)?;
            if csv {
                format!("nsbf,fd,gap\n{},{},{}\n", r.nsbf, r.fd, r.gap)
            } else {
                json(&r)?
            }
        }
        Command::Table => {
            let t = pipeline::run_table(&cfg)?;
            if csv {
                t.to_csv()
            } else {
                json(&t)?
            }
        }
    };
    let dest = cli.opts.output.clone().or_else(|| cfg.output.path.as_ref().map(PathBuf::from));
    match dest {
        Some(path) => fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn json<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn result_out(r: &PricingResult, csv: bool) -> Result<String> {
    if !csv {
        return json(r);
    }
    let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    Ok(format!(
        "price,delta,vega,theta,n_used,m_used\n{},{},{},{},{},{}\n",
        r.price,
        opt(r.delta),
        opt(r.vega),
        opt(r.theta),
        r.n_used,
        r.m_used
    ))
}
