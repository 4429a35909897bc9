use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use super::{bregman_gap, kkt_residual, step, IterateState, SaddleProblem, SolverConfig};
use crate::error::Result;
use crate::Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Tolerance,
    MaxIter,
}

impl Termination {
    pub fn as_str(&self) -> &'static str {
        match self {
            Termination::Tolerance => "tolerance",
            Termination::MaxIter => "max-iter",
        }
    }
}

/// One line of a trajectory dump. Non-finite values serialize as `null`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrajectoryRecord {
    pub k: usize,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kkt: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bregman_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metric: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub method: String,
    pub iterations: usize,
    /// Seconds spent in the iteration loop only.
    pub wall_time_s: f64,
    pub termination: Termination,
    pub tol_log: Vec<f64>,
    pub kkt_log: Vec<f64>,
    pub gap_log: Vec<f64>,
    /// Problem metric per iteration; filled only when recording a trajectory.
    pub metric_log: Vec<f64>,
    pub trajectory: Vec<TrajectoryRecord>,
    /// `(x^k, y^k)` for k = 0..=iterations, kept only on request.
    pub iterates: Vec<(Vector, Vector)>,
    /// Mean of `x^1..x^N`.
    pub x_avg: Vector,
    /// Mean of `ỹ^1..ỹ^N`.
    pub y_avg: Vector,
    pub state: IterateState,
    pub metrics: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn x(&self) -> &Vector {
        &self.state.x
    }

    pub fn y(&self) -> &Vector {
        &self.state.y
    }

    /// Newline-delimited JSON, one record per iteration.
    pub fn write_trajectory(&self, out: &mut impl Write) -> std::io::Result<()> {
        for rec in &self.trajectory {
            serde_json::to_writer(&mut *out, rec)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// `‖(x⁺, y⁺) − (x, y)‖ / ‖(x, y)‖`.
///
/// A zero denominator yields `0` for a zero step and `+∞` otherwise, so the
/// test never passes on a step that leaves the origin.
pub fn relative_change(next: &IterateState, prev: &IterateState) -> f64 {
    let num = ((&next.x - &prev.x).norm_squared() + (&next.y - &prev.y).norm_squared()).sqrt();
    let den = (prev.x.norm_squared() + prev.y.norm_squared()).sqrt();
    if den > 0.0 {
        num / den
    } else if num > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

pub fn run(problem: &SaddleProblem, config: &SolverConfig) -> Result<RunReport> {
    run_from(problem, config, problem.initial_state())
}

pub fn run_from(problem: &SaddleProblem, config: &SolverConfig, start: IterateState) -> Result<RunReport> {
    config.check()?;
    let mut state = start;
    let mut report = RunReport {
        method: config.method.label(),
        iterations: 0,
        wall_time_s: 0.0,
        termination: Termination::MaxIter,
        tol_log: Vec::new(),
        kkt_log: Vec::new(),
        gap_log: Vec::new(),
        metric_log: Vec::new(),
        trajectory: Vec::new(),
        iterates: Vec::new(),
        x_avg: Vector::zeros(problem.primal_dim()),
        y_avg: Vector::zeros(problem.dual_dim()),
        state: state.clone(),
        metrics: BTreeMap::new(),
    };
    if config.keep_iterates {
        report.iterates.push((state.x.clone(), state.y.clone()));
    }
    let track_gap = config.track_bregman_gap && problem.solution().is_some();
    let mut x_sum = Vector::zeros(problem.primal_dim());
    let mut y_sum = Vector::zeros(problem.dual_dim());

    let started = Instant::now();
    while report.iterations < config.max_iter {
        let next = step(problem, &state, config)?;
        let tol = relative_change(&next, &state);
        state = next;
        report.iterations += 1;
        x_sum += &state.x;
        y_sum += &state.y_tilde;

        report.tol_log.push(tol);
        let kkt = if config.track_kkt { Some(kkt_residual(problem, &state, config, 1.0)?) } else { None };
        let gap = match problem.solution() {
            Some((xs, ys)) if track_gap => Some(bregman_gap(&state, (xs, ys), config)?),
            _ => None,
        };
        let metric = if config.record_trajectory { problem.metric().map(|(_, m)| m(&state.x, &state.y)) } else { None };
        report.kkt_log.extend(kkt);
        report.gap_log.extend(gap);
        report.metric_log.extend(metric);
        if config.record_trajectory {
            report.trajectory.push(TrajectoryRecord { k: state.k, tol, kkt, bregman_gap: gap, metric });
        }
        if config.keep_iterates {
            report.iterates.push((state.x.clone(), state.y.clone()));
        }
        if tol <= config.eps {
            report.termination = Termination::Tolerance;
            break;
        }
    }
    report.wall_time_s = started.elapsed().as_secs_f64();

    if report.iterations > 0 {
        let n = report.iterations as f64;
        report.x_avg = x_sum / n;
        report.y_avg = y_sum / n;
    } else {
        report.x_avg = state.x.clone();
        report.y_avg = state.y.clone();
    }
    if let Some(t) = report.tol_log.last() {
        report.metrics.insert("tol".into(), *t);
    }
    if let Some((name, m)) = problem.metric() {
        report.metrics.insert(name.to_string(), m(&state.x, &state.y));
    }
    report.state = state;
    Ok(report)
}
