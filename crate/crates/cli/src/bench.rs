use anyhow::{bail, Result};

use crate::config::ExperimentConfig;

pub const TABLES: [&str; 6] = ["t2", "t3", "t4", "t5", "t6", "t8"];

const T2: &str = r#"
experiment = "matrix-game"
methods = ["fopda", "spida"]
seeds = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]
[[instances]]
m = 100
n = 100
[[instances]]
m = 100
n = 500
[game]
entries = "uniform"
"#;

const T3: &str = r#"
experiment = "matrix-game"
methods = ["fopda", "spida"]
seeds = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]
[[instances]]
m = 100
n = 100
[[instances]]
m = 100
n = 500
[game]
entries = "gaussian"
"#;

const T4: &str = r#"
experiment = "basis-pursuit"
methods = ["fopda", "balm", "spida-i", "spida-ii"]
seeds = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]
[[instances]]
i = 1
[[instances]]
i = 2
[bp]
sensing = "gaussian"
"#;

const T5: &str = r#"
experiment = "basis-pursuit"
methods = ["fopda", "balm", "spida-i", "spida-ii"]
seeds = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9]
[[instances]]
i = 1
[[instances]]
i = 2
[bp]
sensing = "dct"
"#;

const T6: &str = r#"
experiment = "rpca"
methods = ["fopda", "spida"]
seeds = [0, 1, 2]
[[instances]]
n = 256
r = 13
"#;

const T8: &str = r#"
experiment = "tv-restore"
methods = ["fopda-tv", "spida-i", "spida-ii"]
seeds = [0, 1, 2]
[[instances]]
image = { kind = "chart", height = 64, width = 64 }
[[instances]]
image = { kind = "checkerboard", height = 64, width = 64, cell = 8 }
[[instances]]
image = { kind = "ramp", height = 64, width = 64 }
"#;

/// Desk-scale preset for a results table; the CSV is named after the table.
pub fn preset(table: &str) -> Result<ExperimentConfig> {
    let text = match table {
        "t2" => T2,
        "t3" => T3,
        "t4" => T4,
        "t5" => T5,
        "t6" => T6,
        "t8" => T8,
        _ => bail!("unknown table {table:?}; expected one of {}", TABLES.join(", ")),
    };
    let mut cfg = ExperimentConfig::from_toml(text)?;
    cfg.output.csv = format!("{table}.csv");
    Ok(cfg)
}
