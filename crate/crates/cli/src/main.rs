use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use cavity_cli::config::{experiment_entries, load_entries, merge_entries, RunConfig};
use cavity_cli::run::{run_assemble, run_mesh, run_solve, run_sweep, Outcome};
use cavity_core::modes::Experiment;
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cavity-modes", version, about = "Resonant modes of closed cavities with edge elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (`key = value` lines).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Check conformity of imported meshes.
    #[arg(long)]
    strict: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Generate or load the mesh, print statistics and write it.
    Mesh(Common),
    /// Assemble the matrices and check the structural identities.
    Assemble(Common),
    /// Solve with every configured method and compare against the reference.
    Solve(Common),
    /// Run a validation experiment: A (sphere), B (cylinder, electric loss),
    /// C (cylinder, electric and magnetic loss). `--config` overrides defaults.
    Validate {
        experiment: String,
        #[command(flatten)]
        common: Common,
    },
    /// Label penalty eigenvalues by their stability across `solver.alpha_list`.
    Sweep(Common),
}

fn load(common: &Common) -> Result<RunConfig> {
    let path = common.config.as_deref().context("--config is required for this subcommand")?;
    let entries = load_entries(path)?;
    Ok(RunConfig::from_entries(&entries)?)
}

fn write_outcome(outcome: &Outcome, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for (name, contents) in &outcome.files {
        let path = dir.join(name);
        std::fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    }
    std::fs::write(dir.join("summary"), outcome.summary_text()).context("writing summary")?;
    Ok(())
}

fn execute(cli: Cli) -> Result<bool> {
    let (cfg, common, outcome) = match cli.command {
        Command::Mesh(c) => {
            let cfg = load(&c)?;
            let o = run_mesh(&cfg, c.strict)?;
            (cfg, c, o)
        }
        Command::Assemble(c) => {
            let cfg = load(&c)?;
            let o = run_assemble(&cfg, c.strict)?;
            (cfg, c, o)
        }
        Command::Solve(c) => {
            let cfg = load(&c)?;
            let o = run_solve(&cfg, c.strict)?;
            (cfg, c, o)
        }
        Command::Sweep(c) => {
            let cfg = load(&c)?;
            let o = run_sweep(&cfg, c.strict)?;
            (cfg, c, o)
        }
        Command::Validate { experiment, common } => {
            let which: Experiment = experiment.parse()?;
            let overrides = match &common.config {
                Some(p) => load_entries(p)?,
                None => Vec::new(),
            };
            let cfg = RunConfig::from_entries(&merge_entries(&experiment_entries(which), &overrides))?;
            println!("validate {} ({})", which.letter(), which.id());
            let o = run_solve(&cfg, common.strict)?;
            (cfg, common, o)
        }
    };
    for line in &outcome.log {
        println!("{line}");
    }
    let dir = common
        .out
        .clone()
        .or_else(|| cfg.output.dir.clone())
        .unwrap_or_else(|| PathBuf::from("cavity-out"));
    write_outcome(&outcome, &dir)?;
    println!("reports written to {}", dir.display());
    if !outcome.passed {
        match outcome.first_failure() {
            Some(key) => eprintln!("failed: {key}"),
            None => bail!("run failed"),
        }
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
