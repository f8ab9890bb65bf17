use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use swlab::config::{HMode, RunConfig, Suite};
use swlab::exit;
use swlab::ledger::records_to_jsonl;

#[derive(Parser, Debug)]
#[command(
    name = "swlab",
    version,
    about = "Verification checks for the reduced Seiberg-Witten equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Field grid size N (N×N nodes).
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Seed for all random fields; replaces the configured seed list.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Tolerance of the roundoff-level identity checks.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Check ledger (JSON lines, appended). Without it records go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Directory for SWRD field snapshots.
    #[arg(long, global = true)]
    snapshot: Option<PathBuf>,
    /// Fiber metric used by the symplectic and Quillen suites.
    #[arg(long = "h-mode", global = true)]
    h_mode: Option<HMode>,
    /// TOML config file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Four-dimensional equations against their planar reduction.
    ReduceCheck,
    /// Closed-form hyperbolic patch solution.
    PatchVerify,
    /// Newton solvers for the curvature equation and the coupled system.
    LiouvilleSolve,
    /// Lattice index, deformation complex and dimension formulas.
    IndexCheck,
    /// Metric, symplectic forms and moment map.
    SymplecticCheck,
    /// Curvature identities of the determinant line bundles.
    QuillenCheck,
    /// Every suite, or the ones listed in the config file.
    All,
}

impl Command {
    fn suite(self) -> Option<Suite> {
        match self {
            Command::ReduceCheck => Some(Suite::Reduce),
            Command::PatchVerify => Some(Suite::Patch),
            Command::LiouvilleSolve => Some(Suite::Liouville),
            Command::IndexCheck => Some(Suite::Index),
            Command::SymplecticCheck => Some(Suite::Symplectic),
            Command::QuillenCheck => Some(Suite::Quillen),
            Command::All => None,
        }
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, String> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            RunConfig::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))?
        }
        None => RunConfig::default(),
    };
    if let Some(s) = cli.command.suite() {
        cfg.suites = [s].into_iter().collect();
    }
    if let Some(g) = cli.grid {
        cfg.grid = g;
    }
    if let Some(s) = cli.seed {
        cfg.seeds = vec![s];
    }
    if let Some(t) = cli.tol {
        cfg.tol = t;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }
    if cli.snapshot.is_some() {
        cfg.snapshot = cli.snapshot.clone();
    }
    if let Some(h) = cli.h_mode {
        cfg.h_mode = h;
    }
    cfg.validate().map_err(|e| e.to_string())?;
    Ok(cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { exit::USAGE } else { exit::PASS };
            return ExitCode::from(code as u8);
        }
    };
    let cfg = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("swlab: {e}");
            return ExitCode::from(exit::USAGE as u8);
        }
    };
    let out = match swlab::run_suite(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("swlab: {e}");
            return ExitCode::from(exit::IO as u8);
        }
    };
    if cfg.out.is_none() {
        use std::io::Write;
        let _ = std::io::stdout().write_all(&records_to_jsonl(&out.records));
    }
    let failed: Vec<_> = out.records.iter().filter(|r| !r.pass).collect();
    for r in &failed {
        eprintln!("FAIL {} {:?}", r.check_id, r.parameters);
    }
    eprintln!("{} checks, {} failed", out.records.len(), failed.len());
    ExitCode::from(if failed.is_empty() {
        exit::PASS
    } else {
        exit::CHECK_FAILURE
    } as u8)
}
