use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use sympd_core::problems::bp::SensingKind;
use sympd_core::problems::game::EntryDist;
use sympd_core::problems::ImageSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    ToyLp,
    MatrixGame,
    BasisPursuit,
    Rpca,
    TvRestore,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::ToyLp => "toy-lp",
            Experiment::MatrixGame => "matrix-game",
            Experiment::BasisPursuit => "basis-pursuit",
            Experiment::Rpca => "rpca",
            Experiment::TvRestore => "tv-restore",
        }
    }

    pub fn methods(&self) -> &'static [&'static str] {
        match self {
            Experiment::ToyLp | Experiment::MatrixGame => &["ahpd", "fopda", "spida"],
            Experiment::BasisPursuit => &["fopda", "balm", "spida-i", "spida-ii"],
            Experiment::Rpca => &["fopda", "spida"],
            Experiment::TvRestore => &["fopda-tv", "spida-i", "spida-ii"],
        }
    }

    /// Default `(ε, max_iter)`.
    pub fn default_stopping(&self) -> (f64, usize) {
        match self {
            Experiment::ToyLp => (1e-6, 10_000),
            Experiment::MatrixGame => (1e-4, 100_000),
            Experiment::BasisPursuit => (1e-6, 20_000),
            Experiment::Rpca => (1e-5, 2_000),
            Experiment::TvRestore => (1e-4, 5_000),
        }
    }
}

/// One problem size; which fields are required depends on the experiment.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizeSpec {
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub s: Option<usize>,
    /// Basis-pursuit scale index: `(m, n, s) = (180i, 960i, 30i)`.
    pub i: Option<usize>,
    pub r: Option<usize>,
    pub image: Option<ImageSource>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodParams {
    pub gamma: Option<f64>,
    pub mu: Option<f64>,
    pub kappa: Option<f64>,
    pub tau: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    #[default]
    Euclidean,
    Entropy,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GameOptions {
    pub entries: EntryDist,
    pub kernel: KernelChoice,
}

impl Default for GameOptions {
    fn default() -> Self {
        GameOptions { entries: EntryDist::Uniform, kernel: KernelChoice::Euclidean }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BpOptions {
    pub sensing: SensingKind,
}

impl Default for BpOptions {
    fn default() -> Self {
        BpOptions { sensing: SensingKind::Gaussian }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RpcaOptions {
    /// Weight of the sparse term; `1/√n` when absent.
    pub lambda: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TvOptions {
    pub kernel_size: usize,
    pub noise_std: f64,
    pub lambda: f64,
}

impl Default for TvOptions {
    fn default() -> Self {
        TvOptions { kernel_size: 21, noise_std: 0.002, lambda: 1000.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputOptions {
    pub dir: PathBuf,
    pub csv: String,
    pub trajectories: bool,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions { dir: PathBuf::from("results"), csv: "results.csv".into(), trajectories: false }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub methods: Vec<String>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub eps: Option<f64>,
    pub max_iter: Option<usize>,
    #[serde(default)]
    pub instances: Vec<SizeSpec>,
    #[serde(default)]
    pub params: BTreeMap<String, MethodParams>,
    #[serde(default)]
    pub game: GameOptions,
    #[serde(default)]
    pub bp: BpOptions,
    #[serde(default)]
    pub rpca: RpcaOptions,
    #[serde(default)]
    pub tv: TvOptions,
    #[serde(default)]
    pub output: OutputOptions,
}

fn default_seeds() -> Vec<u64> {
    vec![0]
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).context("cannot parse experiment config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn stopping(&self) -> (f64, usize) {
        let (eps, max_iter) = self.experiment.default_stopping();
        (self.eps.unwrap_or(eps), self.max_iter.unwrap_or(max_iter))
    }

    pub fn params(&self, method: &str) -> MethodParams {
        self.params.get(method).copied().unwrap_or_default()
    }

    pub fn validate(&self) -> Result<()> {
        let known = self.experiment.methods();
        if self.methods.is_empty() {
            bail!("no methods listed");
        }
        for m in self.methods.iter().chain(self.params.keys()) {
            if !known.contains(&m.as_str()) {
                bail!("unknown method {m:?} for {}; expected one of {}", self.experiment.name(), known.join(", "));
            }
        }
        for (m, p) in &self.params {
            for (name, v) in [("gamma", p.gamma), ("mu", p.mu), ("kappa", p.kappa)] {
                if let Some(v) = v {
                    if !(v > 0.0 && v.is_finite()) {
                        bail!("{m}.{name} must be positive and finite, got {v}");
                    }
                }
            }
            if let Some(t) = p.tau {
                if !(0.0..=1.0).contains(&t) {
                    bail!("{m}.tau must lie in [0, 1], got {t}");
                }
            }
        }
        if let Some(eps) = self.eps {
            if !(eps >= 0.0) {
                bail!("eps must be nonnegative");
            }
        }
        if self.seeds.is_empty() {
            bail!("seed list is empty");
        }
        if self.experiment != Experiment::ToyLp && self.instances.is_empty() {
            bail!("{} needs at least one [[instances]] entry", self.experiment.name());
        }
        for (k, size) in self.instances.iter().enumerate() {
            let missing = |field: &str| anyhow::anyhow!("instance {k}: missing field {field:?}");
            match self.experiment {
                Experiment::ToyLp => {}
                Experiment::MatrixGame => {
                    size.m.ok_or_else(|| missing("m"))?;
                    size.n.ok_or_else(|| missing("n"))?;
                }
                Experiment::BasisPursuit => {
                    if size.i.is_none() {
                        size.m.ok_or_else(|| missing("m or i"))?;
                        size.n.ok_or_else(|| missing("n"))?;
                        size.s.ok_or_else(|| missing("s"))?;
                    }
                }
                Experiment::Rpca => {
                    size.n.ok_or_else(|| missing("n"))?;
                    size.r.ok_or_else(|| missing("r"))?;
                }
                Experiment::TvRestore => {
                    size.image.as_ref().ok_or_else(|| missing("image"))?;
                }
            }
        }
        Ok(())
    }
}
