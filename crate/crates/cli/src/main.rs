//! `torsion`: batch front-end for the torsion-core checks.

mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "torsion", version, about = "Model spectra, zeta determinants and torsion gluing checks")]
struct Cli {
    /// JSON run configuration; flags given on the command line win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for every random scenario.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Directory for CSV tables and reports [env: TORSION_OUT_DIR, default: .]
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Run batches on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Roots of e^{4iRλ}C(λ) = -1 (full) or e^{2iRλ}C(λ) = -1 (boundary) in a window.
    Spectrum(SpectrumArgs),
    /// ζ'(0) of the model operator with constant scattering matrix C.
    Zeta(ZetaArgs),
    /// Scaled Mayer-Vietoris torsion against its large-R asymptotics.
    Mv(MvArgs),
    /// Model zeta gluing identity and the circle check.
    Gluing(GluingArgs),
    /// The full acceptance suite.
    Verify,
    /// Print the effective configuration in canonical form.
    Config,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    #[arg(long = "R")]
    r: Option<f64>,
    /// `lo:hi`
    #[arg(long, allow_hyphen_values = true)]
    window: Option<String>,
    /// `identity[:n]`, `minus-identity[:n]`, `phases:t1,t2,..` (constant
    /// diagonal e^{it}), or `linear:±a1,±a2,..` (e^{iλa/2}·diag(±1)·e^{iλa/2}).
    #[arg(long)]
    family: Option<String>,
    /// `full` or `boundary`
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Debug, Args)]
struct ZetaArgs {
    /// `identity[:n]`, `minus-identity[:n]` or `phases:t1,t2,..`; the phases
    /// must be closed under t ↦ -t.
    #[arg(long = "C", allow_hyphen_values = true)]
    c: Option<String>,
    #[arg(long = "R")]
    r: Option<f64>,
}

#[derive(Debug, Args)]
struct MvArgs {
    /// `dim H^p(Y)`, comma separated
    #[arg(long, value_delimiter = ',')]
    h: Option<Vec<usize>>,
    #[arg(long)]
    scenarios: Option<usize>,
    #[arg(long = "R-grid", value_delimiter = ',')]
    r_grid: Option<Vec<f64>>,
    #[arg(long)]
    perturbation: Option<f64>,
    #[arg(long)]
    tolerance: Option<f64>,
}

#[derive(Debug, Args)]
struct GluingArgs {
    #[arg(long, value_delimiter = ',')]
    h: Option<Vec<usize>>,
    #[arg(long)]
    scenarios: Option<usize>,
    #[arg(long = "R-grid", value_delimiter = ',')]
    r_grid: Option<Vec<f64>>,
    #[arg(long)]
    tolerance: Option<f64>,
}

fn effective_config(cli: &Cli) -> anyhow::Result<config::RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => config::RunConfig::load(path)?,
        None => config::RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if cli.out_dir.is_some() {
        cfg.out_dir = cli.out_dir.clone();
    }
    if cli.sequential {
        cfg.exec = torsion_core::Exec::Sequential;
    }
    match &cli.command {
        Command::Spectrum(a) => {
            let s = &mut cfg.spectrum;
            if let Some(r) = a.r {
                s.r = r;
            }
            if let Some(w) = &a.window {
                s.window = commands::parse_window(w)?;
            }
            if let Some(f) = &a.family {
                s.family = f.clone();
            }
            if let Some(m) = &a.mode {
                s.mode = m.clone();
            }
        }
        Command::Zeta(a) => {
            if let Some(c) = &a.c {
                cfg.zeta.c = c.clone();
            }
            if let Some(r) = a.r {
                cfg.zeta.r = r;
            }
        }
        Command::Mv(a) => {
            let m = &mut cfg.mv;
            if let Some(h) = &a.h {
                m.h = h.clone();
            }
            if let Some(n) = a.scenarios {
                m.scenarios = n;
            }
            if let Some(g) = &a.r_grid {
                m.r_grid = g.clone();
            }
            if let Some(p) = a.perturbation {
                m.perturbation = p;
            }
            if let Some(t) = a.tolerance {
                m.tolerance = t;
            }
        }
        Command::Gluing(a) => {
            let g = &mut cfg.gluing;
            if let Some(h) = &a.h {
                g.h = h.clone();
            }
            if let Some(n) = a.scenarios {
                g.scenarios = n;
            }
            if let Some(r) = &a.r_grid {
                g.r_grid = r.clone();
            }
            if let Some(t) = a.tolerance {
                g.tolerance = t;
            }
        }
        Command::Verify | Command::Config => {}
    }
    Ok(cfg)
}

/// Exit code 0 when every assertion holds, 1 on a failed assertion, 2 on
/// bad usage or input.
fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = effective_config(&cli).and_then(|cfg| match cli.command {
        Command::Spectrum(_) => commands::spectrum(&cfg),
        Command::Zeta(_) => commands::zeta(&cfg),
        Command::Mv(_) => commands::mv(&cfg),
        Command::Gluing(_) => commands::gluing(&cfg),
        Command::Verify => commands::verify(&cfg),
        Command::Config => {
            print!("{}", cfg.to_canonical());
            Ok(commands::Status::Passed)
        }
    });
    match outcome {
        Ok(commands::Status::Passed) => 0,
        Ok(commands::Status::Failed { report }) => {
            eprintln!("assertion failed; report written to {}", report.display());
            1
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
