use std::path::Path;

use anyhow::{Context, Result};

pub const COLUMNS: [&str; 13] = [
    "experiment",
    "method",
    "instance_id",
    "seed",
    "iterations",
    "wall_time_s",
    "gap",
    "rank",
    "nnz",
    "rerr",
    "snr",
    "rel_err",
    "termination",
];

/// One finished cell, or the mean over seeds when `seed` is `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ResultRow {
    pub experiment: String,
    pub method: String,
    pub instance_id: String,
    pub seed: Option<u64>,
    pub iterations: f64,
    pub wall_time_s: f64,
    pub gap: Option<f64>,
    pub rank: Option<f64>,
    pub nnz: Option<f64>,
    pub rerr: Option<f64>,
    pub snr: Option<f64>,
    pub rel_err: Option<f64>,
    pub termination: String,
}

fn sci(v: Option<f64>) -> String {
    v.map(|v| format!("{v:.6e}")).unwrap_or_default()
}

impl ResultRow {
    pub fn converged(&self) -> bool {
        self.termination == "tolerance"
    }

    fn record(&self) -> Vec<String> {
        // counts print as integers on seed rows and with one decimal on mean rows
        let count = |v: f64| match self.seed {
            Some(_) => format!("{v:.0}"),
            None => format!("{v:.1}"),
        };
        vec![
            self.experiment.clone(),
            self.method.clone(),
            self.instance_id.clone(),
            self.seed.map_or_else(|| "mean".to_string(), |s| s.to_string()),
            count(self.iterations),
            format!("{:.4}", self.wall_time_s),
            sci(self.gap),
            self.rank.map(count).unwrap_or_default(),
            self.nnz.map(count).unwrap_or_default(),
            sci(self.rerr),
            sci(self.snr),
            sci(self.rel_err),
            self.termination.clone(),
        ]
    }
}

fn mean(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Option<Vec<f64>> = values.collect();
    v.filter(|v| !v.is_empty()).map(|v| v.iter().sum::<f64>() / v.len() as f64)
}

/// Arithmetic mean over seeds of every numeric column.
pub fn mean_row(rows: &[&ResultRow]) -> ResultRow {
    let first = rows[0];
    let termination = if rows.iter().all(|r| r.converged()) { "tolerance" } else { "max-iter" };
    ResultRow {
        experiment: first.experiment.clone(),
        method: first.method.clone(),
        instance_id: first.instance_id.clone(),
        seed: None,
        iterations: mean(rows.iter().map(|r| Some(r.iterations))).unwrap_or(0.0),
        wall_time_s: mean(rows.iter().map(|r| Some(r.wall_time_s))).unwrap_or(0.0),
        gap: mean(rows.iter().map(|r| r.gap)),
        rank: mean(rows.iter().map(|r| r.rank)),
        nnz: mean(rows.iter().map(|r| r.nnz)),
        rerr: mean(rows.iter().map(|r| r.rerr)),
        snr: mean(rows.iter().map(|r| r.snr)),
        rel_err: mean(rows.iter().map(|r| r.rel_err)),
        termination: termination.into(),
    }
}

/// Seed rows grouped by `(instance, method)` in first-seen order, each group
/// followed by its mean row.
pub fn with_means(rows: &[ResultRow]) -> Vec<ResultRow> {
    let mut keys: Vec<(&str, &str)> = Vec::new();
    for r in rows {
        let key = (r.instance_id.as_str(), r.method.as_str());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    let mut out = Vec::with_capacity(rows.len() + keys.len());
    for (inst, method) in keys {
        let group: Vec<&ResultRow> = rows.iter().filter(|r| r.instance_id == inst && r.method == method).collect();
        out.extend(group.iter().map(|r| (*r).clone()));
        out.push(mean_row(&group));
    }
    out
}

pub fn write_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot create {}", path.display()))?;
    w.write_record(COLUMNS)?;
    for r in rows {
        w.write_record(r.record())?;
    }
    w.flush()?;
    Ok(())
}
