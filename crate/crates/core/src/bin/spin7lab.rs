use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spin7lab::cli::{execute, Command, Formula, RunConfig, Weights};
use spin7lab::Error;

#[derive(Parser)]
#[command(name = "spin7lab", version, about = "Spin(7)-instanton gluing laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// JSON report path.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config file with the same keys as the flags; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override a check bound, as `name=value`. Repeatable.
    #[arg(long = "tolerance", global = true, value_parser = parse_tolerance)]
    tolerances: Vec<(String, f64)>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Eigenstructure of the Cayley form and the two model constructions.
    AlgebraVerify,
    /// Charge-one instanton, its deformation complex and decay.
    BpstVerify {
        #[arg(long)]
        scale: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Lattice Fueter operator and the component-wise instanton condition.
    FueterVerify {
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Pregluing error across λ, and weighted-norm properties.
    GraftSweep(SweepArgs),
    /// Weitzenböck identity and the reduced fixed-point problem.
    Solve {
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
    },
    /// Index formulas on a ledger (bundled K3 ledger by default).
    Index {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long, value_parser = |s: &str| s.parse::<Formula>().map_err(|e| e.to_string()))]
        formula: Option<Formula>,
    },
    /// Every suite.
    All,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_delimiter = ',')]
    lambdas: Option<Vec<f64>>,
    /// Sweep table (lambda, err_norm, c_ratio, grid_h).
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Norm weights `ell,delta,lambda`.
    #[arg(long, value_parser = |s: &str| s.parse::<Weights>().map_err(|e| e.to_string()))]
    weights: Option<Weights>,
    /// Per-sample weighted error at the `--weights` λ.
    #[arg(long)]
    weights_csv: Option<PathBuf>,
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    Ok((k.to_string(), v.parse().map_err(|_| format!("bad number `{v}`"))?))
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn config(cli: Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    cfg.command = match cli.command {
        Cmd::AlgebraVerify => Command::AlgebraVerify,
        Cmd::BpstVerify { scale, grid, radius } => {
            set(&mut cfg.scale, scale);
            cfg.grid = grid.or(cfg.grid);
            set(&mut cfg.radius, radius);
            Command::BpstVerify
        }
        Cmd::FueterVerify { grid } => {
            cfg.grid = grid.or(cfg.grid);
            Command::FueterVerify
        }
        Cmd::GraftSweep(a) => {
            set(&mut cfg.lambdas, a.lambdas);
            cfg.csv = a.csv.or(cfg.csv);
            cfg.weights = a.weights.or(cfg.weights);
            cfg.weights_csv = a.weights_csv.or(cfg.weights_csv);
            Command::GraftSweep
        }
        Cmd::Solve { lambda, tol, max_iter } => {
            set(&mut cfg.lambda, lambda);
            set(&mut cfg.tol, tol);
            set(&mut cfg.max_iter, max_iter);
            Command::Solve
        }
        Cmd::Index { input, formula } => {
            cfg.input = input.or(cfg.input);
            cfg.formula = formula.or(cfg.formula);
            Command::Index
        }
        Cmd::All => Command::All,
    };
    cfg.out = cli.out.or(cfg.out);
    set(&mut cfg.seed, cli.seed);
    cfg.tolerances.extend(cli.tolerances);
    Ok(cfg)
}

fn main() -> ExitCode {
    let cfg = match config(Cli::parse()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let (code, report, err) = execute(&cfg);
    if let Some(report) = &report {
        for suite in &report.suites {
            for section in &suite.sections {
                if let Some(e) = &section.error {
                    println!("FAIL {:<14} {:<22} error: {e}", suite.command.name(), section.name);
                }
                for c in &section.checks {
                    let status = if c.pass { "ok  " } else { "FAIL" };
                    println!("{status} {:<14} {:<22} {:<36} {:>14.6e}  {}", suite.command.name(), section.name, c.name, c.value, c.describe_bound());
                }
            }
        }
    }
    if let Some(e) = err {
        eprintln!("error: {e}");
    }
    ExitCode::from(code as u8)
}
