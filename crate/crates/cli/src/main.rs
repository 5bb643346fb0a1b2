mod commands;
mod problem;
mod report;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use fockmod::linalg::c;
use fockmod::C64;

use commands::Ctx;
use problem::ProblemSpec;

#[derive(Parser)]
#[command(name = "fockmod", version, about = "Submodules of truncated Fock spaces and their factorizations")]
struct Cli {
    /// Assertion tolerance for residual checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Seed for randomized instances.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Override every truncation degree in the spec.
    #[arg(long, global = true)]
    degree: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Dimensions and creation-operator identities of F²_{n,d}.
    FockInfo {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
    },
    /// Generate a submodule and compute its wandering subspace.
    Submodule {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Inner factorization of a submodule of F²_{n,d} ⊗ C^k.
    Blh {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Classify a joint invariant subspace of a Fock n-module.
    Polyball {
        #[arg(long)]
        spec: PathBuf,
        /// 1-based factor order, e.g. `2,1`.
        #[arg(long, value_delimiter = ',')]
        permute: Option<Vec<usize>>,
    },
    /// Constrained quotients and, with generators, their classification.
    Variety {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Evaluate Φ_ij(z) by resolvent and by power series.
    DaMultiplier {
        #[arg(long)]
        spec: PathBuf,
        /// `i,j`.
        #[arg(long, value_delimiter = ',')]
        key: Option<Vec<usize>>,
        /// Points as `re,im,re,im,...`; repeat the flag for several points.
        #[arg(long)]
        z: Vec<String>,
    },
    /// Built-in instances.
    Example {
        #[command(subcommand)]
        which: Example,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "core")]
        suite: verify::Suite,
    },
}

#[derive(Subcommand)]
enum Example {
    /// Inner operator whose fiber is larger than its target.
    DimGap {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        d: usize,
    },
    /// A named fixture from the catalogue.
    Fixture {
        #[arg(long)]
        name: String,
    },
}

fn load(path: &PathBuf, degree: Option<usize>) -> Result<(ProblemSpec, Vec<u8>), String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok((ProblemSpec::parse(text, degree)?, bytes))
}

fn parse_point(s: &str) -> Result<Vec<C64>, String> {
    let xs: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("bad point {s:?}: {e}")))
        .collect::<Result<_, _>>()?;
    if xs.len() % 2 != 0 || xs.is_empty() {
        return Err(format!("point {s:?} needs re,im pairs"));
    }
    Ok(xs.chunks(2).map(|p| c(p[0], p[1])).collect())
}

fn dispatch(cli: &Cli) -> Result<report::Report, String> {
    if !(cli.tol > 0.0) {
        return Err("--tol must be positive".into());
    }
    let ctx = Ctx { tol: cli.tol, seed: cli.seed };
    match &cli.command {
        Command::FockInfo { n, d } => commands::fock_info(*n, cli.degree.unwrap_or(*d), &ctx),
        Command::Submodule { spec } => {
            let (s, b) = load(spec, cli.degree)?;
            commands::submodule(&s, &b, &ctx)
        }
        Command::Blh { spec } => {
            let (s, b) = load(spec, cli.degree)?;
            commands::blh(&s, &b, &ctx)
        }
        Command::Polyball { spec, permute } => {
            let (s, b) = load(spec, cli.degree)?;
            commands::polyball(&s, &b, permute.as_deref(), &ctx)
        }
        Command::Variety { spec } => {
            let (s, b) = load(spec, cli.degree)?;
            commands::variety(&s, &b, &ctx)
        }
        Command::DaMultiplier { spec, key, z } => {
            let (s, b) = load(spec, cli.degree)?;
            let key = match key.as_deref() {
                None => None,
                Some([i, j]) => Some((*i, *j)),
                Some(_) => return Err("--key takes i,j".into()),
            };
            let points = if z.is_empty() { None } else { Some(z.iter().map(|p| parse_point(p)).collect::<Result<_, _>>()?) };
            commands::da_multiplier(&s, &b, key, points, &ctx)
        }
        Command::Example { which: Example::DimGap { m, n, d } } => {
            commands::dim_gap(*m, *n, cli.degree.unwrap_or(*d), &ctx)
        }
        Command::Example { which: Example::Fixture { name } } => commands::fixture_report(name, &ctx),
        Command::Verify { suite } => verify::run(*suite, &ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = match dispatch(&cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    eprint!("{}", report.summary());
    let json = report.to_json();
    match &cli.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{json}"),
    }
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
