use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sympd(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_sympd"));
    cmd.args(args).env_remove("SYMPD_SEED");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect()
}

fn col(name: &str) -> usize {
    let header = [
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
    header.iter().position(|h| *h == name).unwrap()
}

const GAME: &str = r#"
experiment = "matrix-game"
methods = ["fopda", "spida"]
seeds = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]
[[instances]]
m = 20
n = 20
[output]
trajectories = true
"#;

#[test]
fn game_run_counts_rows_and_means() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "game.toml", GAME);
    let out = dir.path().join("out");
    let o = sympd(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--parallel", "2"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out.join("results.csv"));
    assert_eq!(rows.len(), 22);
    let means: Vec<_> = rows.iter().filter(|r| r[col("seed")] == "mean").collect();
    assert_eq!(means.len(), 2);
    assert_eq!(rows[10][col("seed")], "mean");
    assert_eq!(rows[10][col("method")], "fopda");
    let mean_iters: f64 = rows[..10].iter().map(|r| r[col("iterations")].parse::<f64>().unwrap()).sum::<f64>() / 10.0;
    assert!((rows[10][col("iterations")].parse::<f64>().unwrap() - mean_iters).abs() < 0.06);
    for r in &rows {
        assert_eq!(r[col("termination")], "tolerance");
        assert!(r[col("gap")].parse::<f64>().unwrap() >= 0.0);
    }
    let traj = std::fs::read_dir(out.join("trajectories")).unwrap().count();
    assert_eq!(traj, 20);
    let first = std::fs::read_to_string(out.join("trajectories/matrix-game_spida_20x20_seed3.ndjson")).unwrap();
    let rec: serde_json::Value = serde_json::from_str(first.lines().last().unwrap()).unwrap();
    assert!(rec["tol"].as_f64().unwrap() <= 1e-4);
    assert!(rec["metric"].as_f64().is_some());
}

#[test]
fn csv_is_byte_stable_except_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "game.toml", GAME);
    let strip = |p: PathBuf| -> Vec<Vec<String>> {
        read_csv(&p)
            .into_iter()
            .map(|mut r| {
                r.remove(col("wall_time_s"));
                r
            })
            .collect()
    };
    let mut runs = Vec::new();
    for (k, par) in ["1", "3"].iter().enumerate() {
        let out = dir.path().join(format!("out{k}"));
        let o =
            sympd(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--parallel", par], &[]);
        assert!(o.status.success());
        runs.push(strip(out.join("results.csv")));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn seed_flag_and_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "game.toml", GAME);
    let out = dir.path().join("out");
    let o = sympd(
        &["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seeds", "2"],
        &[("SYMPD_SEED", "40")],
    );
    assert!(o.status.success());
    let seeds: Vec<String> = read_csv(&out.join("results.csv")).into_iter().map(|r| r[col("seed")].clone()).collect();
    assert_eq!(seeds, ["40", "41", "mean", "40", "41", "mean"]);
}

#[test]
fn iteration_limit_gives_distinct_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "game.toml",
        "experiment = \"matrix-game\"\nmethods = [\"spida\"]\nmax_iter = 5\n[[instances]]\nm = 20\nn = 20\n",
    );
    let out = dir.path().join("out");
    let o = sympd(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    let rows = read_csv(&out.join("results.csv"));
    assert_eq!(rows[0][col("termination")], "max-iter");
    assert_eq!(rows[0][col("iterations")], "5");
}

#[test]
fn bad_configs_fail_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("experiment = \"rpca\"\nmethods = [\"balm\"]\n[[instances]]\nn = 8\nr = 1\n", "unknown method"),
        (
            "experiment = \"matrix-game\"\nmethods = [\"spida\"]\n[[instances]]\nm = 3\nn = 3\n[params.spida]\ngamma = -1.0\n",
            "must be positive",
        ),
        ("experiment = \"matrix-game\"\nmethods = [\"spida\"]\n", "[[instances]]"),
        ("experiment = \"lasso\"\nmethods = [\"spida\"]\n", "parse"),
    ];
    for (k, (text, needle)) in cases.iter().enumerate() {
        let cfg = write_config(dir.path(), &format!("bad{k}.toml"), text);
        let o = sympd(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], &[]);
        assert_eq!(o.status.code(), Some(1));
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(err.contains(needle), "{err}");
    }
    let o = sympd(&["bench", "--table", "t7"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown table"));
}

fn trajectory(path: &Path) -> Vec<serde_json::Value> {
    std::fs::read_to_string(path).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn toy_command_dumps_six_panels() {
    let dir = tempfile::tempdir().unwrap();
    let o = sympd(&["toy", "--out", dir.path().to_str().unwrap()], &[]);
    // AHPD cycles and exhausts its budget
    assert_eq!(o.status.code(), Some(2));
    for m in ["ahpd", "fopda", "spida"] {
        for s in ["1", "sqrt2"] {
            let t = trajectory(&dir.path().join(format!("toy/{m}_step{s}.ndjson")));
            assert_eq!(t[0]["x1"], 0.0);
            assert_eq!(t[0]["y"], 0.0);
            for rec in &t {
                assert!(rec["x1"].is_f64() && rec["x2"].is_f64() && rec["y"].is_f64());
            }
        }
    }
    let dist = |rec: &serde_json::Value| {
        let (x1, x2, y) = (rec["x1"].as_f64().unwrap(), rec["x2"].as_f64().unwrap(), rec["y"].as_f64().unwrap());
        (x1 * x1 + (x2 - 1.0).powi(2) + (y - 1.0).powi(2)).sqrt()
    };
    let spida = trajectory(&dir.path().join("toy/spida_step1.ndjson"));
    assert!(dist(spida.last().unwrap()) < 1e-4);
    let fopda = trajectory(&dir.path().join("toy/fopda_step1.ndjson"));
    assert!(dist(fopda.last().unwrap()) < 1e-4);
    assert!(fopda.len() >= spida.len());
    let ahpd = trajectory(&dir.path().join("toy/ahpd_step1.ndjson"));
    assert_eq!(ahpd.len(), 10_001);
    for window in ahpd[100..].chunks(100) {
        let worst = window.iter().map(dist).fold(0.0, f64::max);
        assert!(worst >= 0.1);
    }
    let rows = read_csv(&dir.path().join("toy.csv"));
    assert_eq!(rows.len(), 6);
}

#[test]
fn toy_config_writes_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs/toy-lp.toml")).unwrap();
    let cfg = write_config(dir.path(), "toy.toml", &text);
    let out = dir.path().join("out");
    let o = sympd(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(2));
    let spida = trajectory(&out.join("trajectories/toy-lp_spida_toy_seed0.ndjson"));
    assert!(spida.last().unwrap()["dist"].as_f64().unwrap() < 1e-4);
}

#[test]
fn rpca_row_carries_rank_nnz_rerr() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "rpca.toml",
        "experiment = \"rpca\"\nmethods = [\"spida\"]\nseeds = [1]\n[[instances]]\nn = 256\nr = 13\n[rpca]\nlambda = 0.0625\n",
    );
    let out = dir.path().join("out");
    let o = sympd(&["run", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out.join("results.csv"));
    assert_eq!(rows[0][col("instance_id")], "n256r13");
    assert_eq!(rows[0][col("rank")], "13");
    let nnz: f64 = rows[0][col("nnz")].parse().unwrap();
    assert!((nnz - 6554.0).abs() / 6554.0 < 0.01);
    assert!(rows[0][col("rerr")].parse::<f64>().unwrap() <= 1e-3);
}
