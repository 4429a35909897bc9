use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;
use serde_json::json;
use sympd_core::lcp::{run_lcp, LcpScheme};
use sympd_core::problems::bp::{build_basis_pursuit, gen_bp, gen_bp_dims, rel_err, BpFlavor, BpParams};
use sympd_core::problems::game::{build_matrix_game, game_config, gen_game, GameKernel};
use sympd_core::problems::rpca::{gen_rpca, rpca_outcome, RpcaMethod};
use sympd_core::problems::tv::{build_tv_restore, tv_config_with, TvVariant};
use sympd_core::problems::{toy_distance, toy_lp, ImageSource, Instance, InstanceSpec};
use sympd_core::saddle::{run, Method, RunReport, SolverConfig};

use crate::config::{Experiment, ExperimentConfig, KernelChoice, MethodParams, SizeSpec};
use crate::output::{with_means, write_csv, ResultRow};

/// One `(instance, method, seed)` combination.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cell {
    pub instance: usize,
    pub method: String,
    pub seed: u64,
}

pub fn instance_id(experiment: Experiment, size: &SizeSpec) -> String {
    let n = |v: Option<usize>| v.map_or_else(|| "?".to_string(), |v| v.to_string());
    match experiment {
        Experiment::ToyLp => "toy".into(),
        Experiment::MatrixGame => format!("{}x{}", n(size.m), n(size.n)),
        Experiment::BasisPursuit => match size.i {
            Some(i) => format!("i{i}"),
            None => format!("{}x{}s{}", n(size.m), n(size.n), n(size.s)),
        },
        Experiment::Rpca => format!("n{}r{}", n(size.n), n(size.r)),
        Experiment::TvRestore => match &size.image {
            Some(ImageSource::Checkerboard { height, width, cell }) => format!("checkerboard{height}x{width}c{cell}"),
            Some(ImageSource::Ramp { height, width }) => format!("ramp{height}x{width}"),
            Some(ImageSource::Chart { height, width }) => format!("chart{height}x{width}"),
            Some(ImageSource::Pgm { path }) => {
                path.file_stem().map_or_else(|| "pgm".to_string(), |s| s.to_string_lossy().into_owned())
            }
            None => "?".into(),
        },
    }
}

/// Cells in instance, method, seed order.
pub fn plan(cfg: &ExperimentConfig, seeds: &[u64]) -> Vec<Cell> {
    let sizes = cfg.instances.len().max(1);
    let mut cells = Vec::new();
    for instance in 0..sizes {
        for method in &cfg.methods {
            for &seed in seeds {
                cells.push(Cell { instance, method: method.clone(), seed });
            }
        }
    }
    cells
}

/// Seeds after applying `--seeds N` and a `SYMPD_SEED` base.
pub fn resolve_seeds(config_seeds: &[u64], count: Option<usize>, base: Option<u64>) -> Vec<u64> {
    match (base, count) {
        (None, None) => config_seeds.to_vec(),
        (base, count) => {
            let start = base.unwrap_or_else(|| config_seeds.first().copied().unwrap_or(0));
            let count = count.unwrap_or(config_seeds.len());
            (0..count as u64).map(|k| start + k).collect()
        }
    }
}

fn fopda_tau(p: &MethodParams) -> f64 {
    p.tau.unwrap_or(1.0)
}

fn override_steps(cfg: &mut SolverConfig, p: &MethodParams) {
    if let Some(g) = p.gamma {
        cfg.gamma = g;
    }
    if let Some(m) = p.mu {
        cfg.mu = m;
    }
}

fn trajectory_writer(dir: Option<&Path>, name: &str) -> Result<Option<BufWriter<File>>> {
    let Some(dir) = dir else { return Ok(None) };
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("{name}.ndjson"));
    let f = File::create(&path).with_context(|| format!("cannot create {}", path.display()))?;
    Ok(Some(BufWriter::new(f)))
}

fn saddle_method(name: &str, p: &MethodParams) -> Method {
    match name {
        "ahpd" => Method::Ahpd,
        "fopda" => Method::Fopda { tau: fopda_tau(p) },
        _ => Method::Spida,
    }
}

/// Toy LP run from the origin; the trajectory holds `(x₁, x₂, y)` and the
/// distance to the saddle point at every iteration.
pub fn run_toy(
    method: Method,
    (gamma, mu): (f64, f64),
    eps: f64,
    max_iter: usize,
    traj: Option<&mut dyn Write>,
) -> Result<RunReport> {
    let mut sc = SolverConfig::new(method, gamma, mu).with_tolerance(eps, max_iter);
    sc.record_trajectory = true;
    sc.keep_iterates = traj.is_some();
    let report = run(&toy_lp()?, &sc)?;
    if let Some(out) = traj {
        for (k, (x, y)) in report.iterates.iter().enumerate() {
            let tol = if k == 0 { None } else { report.tol_log.get(k - 1).copied() };
            let rec = json!({"k": k, "x1": x[0], "x2": x[1], "y": y[0], "dist": toy_distance(x, y), "tol": tol});
            serde_json::to_writer(&mut *out, &rec)?;
            out.write_all(b"\n")?;
        }
        out.flush()?;
    }
    Ok(report)
}

fn base_row(cfg: &ExperimentConfig, cell: &Cell, id: &str, iterations: usize, wall: f64, term: &str) -> ResultRow {
    ResultRow {
        experiment: cfg.experiment.name().into(),
        method: cell.method.clone(),
        instance_id: id.into(),
        seed: Some(cell.seed),
        iterations: iterations as f64,
        wall_time_s: wall,
        termination: term.into(),
        ..Default::default()
    }
}

fn from_report(cfg: &ExperimentConfig, cell: &Cell, id: &str, r: &RunReport) -> ResultRow {
    base_row(cfg, cell, id, r.iterations, r.wall_time_s, r.termination.as_str())
}

fn write_saddle_trajectory(w: Option<BufWriter<File>>, r: &RunReport) -> Result<()> {
    if let Some(mut w) = w {
        r.write_trajectory(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

/// Builds the instance for a cell, solves it and scores the result.
pub fn run_cell(cfg: &ExperimentConfig, cell: &Cell, traj_dir: Option<&Path>) -> Result<ResultRow> {
    let size = cfg.instances.get(cell.instance).cloned().unwrap_or_default();
    let id = instance_id(cfg.experiment, &size);
    let p = cfg.params(&cell.method);
    let (eps, max_iter) = cfg.stopping();
    let traj_name = format!("{}_{}_{}_seed{}", cfg.experiment.name(), cell.method, id, cell.seed);
    let traj = trajectory_writer(traj_dir, &traj_name)?;
    let record = traj.is_some();
    let row = match cfg.experiment {
        Experiment::ToyLp => {
            let step = p.gamma.or(p.mu).unwrap_or(1.0);
            let (gamma, mu) = (p.gamma.unwrap_or(step), p.mu.unwrap_or(step));
            let mut traj = traj;
            let r = run_toy(
                saddle_method(&cell.method, &p),
                (gamma, mu),
                eps,
                max_iter,
                traj.as_mut().map(|w| w as &mut dyn Write),
            )?;
            let mut row = from_report(cfg, cell, &id, &r);
            row.rel_err = Some(toy_distance(r.x(), r.y()) / 2f64.sqrt());
            row
        }
        Experiment::MatrixGame => {
            let (m, n) = (size.m.unwrap_or(0), size.n.unwrap_or(0));
            let inst = gen_game(m, n, cfg.game.entries, cell.seed)?;
            let kernel = match cfg.game.kernel {
                KernelChoice::Euclidean => GameKernel::Euclidean,
                KernelChoice::Entropy => GameKernel::Entropy,
            };
            let mut sc = game_config(&inst, saddle_method(&cell.method, &p), kernel).with_tolerance(eps, max_iter);
            override_steps(&mut sc, &p);
            sc.record_trajectory = record;
            let r = run(&build_matrix_game(&inst)?, &sc)?;
            write_saddle_trajectory(traj, &r)?;
            let mut row = from_report(cfg, cell, &id, &r);
            row.gap = r.metrics.get("gap").copied();
            row
        }
        Experiment::BasisPursuit => {
            let sensing = cfg.bp.sensing;
            let inst = match size.i {
                Some(i) => gen_bp(i, sensing, cell.seed)?,
                None => gen_bp_dims(size.m.unwrap_or(0), size.n.unwrap_or(0), size.s.unwrap_or(0), sensing, cell.seed)?,
            };
            let flavor = match cell.method.as_str() {
                "fopda" => BpFlavor::Fopda,
                "balm" => BpFlavor::Balm,
                "spida-i" => BpFlavor::SpidaI,
                _ => BpFlavor::SpidaII,
            };
            let d = flavor.default_params();
            let params = BpParams {
                gamma: p.gamma.unwrap_or(d.gamma),
                mu: p.mu.unwrap_or(d.mu),
                kappa: p.kappa.unwrap_or(d.kappa),
            };
            let problem = build_basis_pursuit(&inst)?;
            let (mut row, x) = match flavor.solver_config(&inst, params)? {
                Some(mut sc) => {
                    if flavor == BpFlavor::Fopda {
                        sc.method = Method::Fopda { tau: fopda_tau(&p) };
                    }
                    sc = sc.with_tolerance(eps, max_iter);
                    sc.record_trajectory = record;
                    let r = run(&problem.to_saddle()?, &sc)?;
                    write_saddle_trajectory(traj, &r)?;
                    (from_report(cfg, cell, &id, &r), r.state.x)
                }
                None => {
                    let r = run_lcp(
                        &problem,
                        &BpFlavor::balm_config(params).with_tolerance(eps, max_iter),
                        LcpScheme::Balm,
                    )?;
                    if let Some(mut w) = traj {
                        for (k, tol) in r.tol_log.iter().enumerate() {
                            serde_json::to_writer(&mut w, &json!({"k": k + 1, "tol": tol}))?;
                            w.write_all(b"\n")?;
                        }
                        w.flush()?;
                    }
                    (base_row(cfg, cell, &id, r.iterations, r.wall_time_s, r.termination.as_str()), r.state.x)
                }
            };
            row.rel_err = Some(rel_err(&x, &inst.x_true)?);
            row
        }
        Experiment::Rpca => {
            let mut inst = gen_rpca(size.n.unwrap_or(0), size.r.unwrap_or(0), cell.seed)?;
            if let Some(l) = cfg.rpca.lambda {
                inst = inst.with_lambda(l);
            }
            let method = if cell.method == "fopda" { RpcaMethod::Fopda } else { RpcaMethod::Spida };
            let mut sc = method.solver_config().with_tolerance(eps, max_iter);
            if method == RpcaMethod::Fopda {
                sc.method = Method::Fopda { tau: fopda_tau(&p) };
            }
            override_steps(&mut sc, &p);
            sc.seed = cell.seed;
            sc.record_trajectory = record;
            let lcp = sympd_core::problems::rpca::build_rpca(&inst)?;
            let r = run(&lcp.to_saddle()?, &sc)?;
            write_saddle_trajectory(traj, &r)?;
            let out = rpca_outcome(&inst, method, &r)?;
            let mut row = from_report(cfg, cell, &id, &r);
            row.rank = Some(out.metrics.rank as f64);
            row.nnz = Some(out.metrics.nnz as f64);
            row.rerr = Some(out.metrics.rerr);
            row
        }
        Experiment::TvRestore => {
            let Some(image) = size.image.clone() else { bail!("tv-restore instance without image") };
            let spec = InstanceSpec::TvRestore {
                image,
                kernel_size: cfg.tv.kernel_size,
                noise_std: cfg.tv.noise_std,
                lambda: cfg.tv.lambda,
                seed: cell.seed,
            };
            let Instance::TvRestore(inst) = spec.build()? else { unreachable!("tv spec builds a tv instance") };
            let variant = match cell.method.as_str() {
                "fopda-tv" => TvVariant::FopdaTv,
                "spida-i" => TvVariant::SpidaI,
                _ => TvVariant::SpidaII,
            };
            let (g0, m0) = variant.default_params();
            let mut sc = tv_config_with(&inst, variant, p.gamma.unwrap_or(g0), p.mu.unwrap_or(m0))?
                .with_tolerance(eps, max_iter);
            if variant == TvVariant::FopdaTv {
                sc.method = Method::FopdaDualFirst { tau: fopda_tau(&p) };
            }
            sc.seed = cell.seed;
            sc.record_trajectory = record;
            let r = run(&build_tv_restore(&inst)?, &sc)?;
            write_saddle_trajectory(traj, &r)?;
            let mut row = from_report(cfg, cell, &id, &r);
            row.snr = r.metrics.get("snr").copied();
            row
        }
    };
    Ok(row)
}

/// Outcome of a whole experiment: rows with means and the CSV location.
pub struct Summary {
    pub rows: Vec<ResultRow>,
    pub csv: PathBuf,
}

impl Summary {
    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged())
    }
}

/// Runs every cell on a pool of `threads` workers and writes the CSV once all
/// cells are done.
pub fn execute(cfg: &ExperimentConfig, seeds: &[u64], out_dir: &Path, threads: usize) -> Result<Summary> {
    let cells = plan(cfg, seeds);
    let traj_dir = cfg.output.trajectories.then(|| out_dir.join("trajectories"));
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build()?;
    let rows: Vec<ResultRow> = pool.install(|| {
        cells
            .par_iter()
            .map(|c| {
                run_cell(cfg, c, traj_dir.as_deref())
                    .with_context(|| format!("{} seed {} instance {}", c.method, c.seed, c.instance))
            })
            .collect::<Result<_>>()
    })?;
    let rows = with_means(&rows);
    let csv = out_dir.join(&cfg.output.csv);
    write_csv(&csv, &rows)?;
    Ok(Summary { rows, csv })
}
