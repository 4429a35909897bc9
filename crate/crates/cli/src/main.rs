//! `sympd`: runs configured saddle-point experiments and writes CSV results
//! plus newline-delimited JSON trajectories.
//!
//! Exit status is 0 when every run stopped on the tolerance test, 2 when any
//! run hit its iteration limit and 1 on errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod bench;
mod config;
mod output;
mod runner;

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use sympd_core::problems::toy_distance;
use sympd_core::saddle::Method;

use crate::config::{Experiment, ExperimentConfig};
use crate::output::{write_csv, ResultRow};
use crate::runner::{execute, resolve_seeds, run_toy, Summary};

const EXIT_MAX_ITER: u8 = 2;

#[derive(Parser)]
#[command(name = "sympd", version, about = "Symmetric primal-dual saddle-point experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every (instance, method, seed) cell of a TOML experiment file.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Dump the six toy LP trajectories (AHPD, FOPDA, SPIDA at steps 1 and √2).
    Toy {
        /// Output directory.
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Run a built-in desk-scale preset for one results table.
    Bench {
        /// One of t2, t3, t4, t5, t6, t8.
        #[arg(long)]
        table: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(clap::Args)]
struct Common {
    /// Output directory; overrides the config file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of consecutive seeds starting at the config's first seed (or $SYMPD_SEED).
    #[arg(long)]
    seeds: Option<usize>,
    /// Worker threads for independent cells.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
}

fn seed_base() -> Result<Option<u64>> {
    match std::env::var("SYMPD_SEED") {
        Ok(v) => Ok(Some(v.trim().parse().with_context(|| format!("SYMPD_SEED={v:?} is not an integer"))?)),
        Err(_) => Ok(None),
    }
}

fn run_experiment(cfg: ExperimentConfig, common: Common) -> Result<Summary> {
    let seeds = resolve_seeds(&cfg.seeds, common.seeds, seed_base()?);
    let out = common.out.unwrap_or_else(|| cfg.output.dir.clone());
    let summary = execute(&cfg, &seeds, &out, common.parallel)?;
    report(&summary.rows);
    eprintln!("wrote {}", summary.csv.display());
    Ok(summary)
}

fn report(rows: &[ResultRow]) {
    for r in rows.iter().filter(|r| r.seed.is_none()) {
        eprintln!(
            "{:<14} {:<10} {:<22} iters {:>10.1}  time {:>8.3}s  {}",
            r.experiment, r.method, r.instance_id, r.iterations, r.wall_time_s, r.termination
        );
    }
}

fn cmd_toy(out: PathBuf) -> Result<bool> {
    let dir = out.join("toy");
    std::fs::create_dir_all(&dir)?;
    let methods = [("ahpd", Method::Ahpd), ("fopda", Method::Fopda { tau: 1.0 }), ("spida", Method::Spida)];
    let (eps, max_iter) = Experiment::ToyLp.default_stopping();
    let mut rows = Vec::new();
    for (step_label, step) in [("1", 1.0), ("sqrt2", std::f64::consts::SQRT_2)] {
        for (name, method) in methods {
            let path = dir.join(format!("{name}_step{step_label}.ndjson"));
            let mut w =
                BufWriter::new(File::create(&path).with_context(|| format!("cannot create {}", path.display()))?);
            let r = run_toy(method, (step, step), eps, max_iter, Some(&mut w))?;
            eprintln!(
                "{name:<6} step {step_label:<6} {:>6} iterations  {:<9} distance {:.3e}",
                r.iterations,
                r.termination.as_str(),
                toy_distance(r.x(), r.y())
            );
            rows.push(ResultRow {
                experiment: "toy-lp".into(),
                method: name.into(),
                instance_id: format!("step{step_label}"),
                seed: Some(0),
                iterations: r.iterations as f64,
                wall_time_s: r.wall_time_s,
                rel_err: Some(toy_distance(r.x(), r.y()) / std::f64::consts::SQRT_2),
                termination: r.termination.as_str().into(),
                ..Default::default()
            });
        }
    }
    write_csv(&out.join("toy.csv"), &rows)?;
    Ok(rows.iter().all(|r| r.converged()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, common } => {
            ExperimentConfig::load(&config).and_then(|cfg| run_experiment(cfg, common)).map(|s| s.all_converged())
        }
        Command::Bench { table, common } => {
            bench::preset(&table).and_then(|cfg| run_experiment(cfg, common)).map(|s| s.all_converged())
        }
        Command::Toy { out } => cmd_toy(out),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("some runs stopped at the iteration limit");
            ExitCode::from(EXIT_MAX_ITER)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
