//! Run configuration.
//!
//! The file format is one `key = value` per line; `#` starts a comment. Every
//! key is also a command-line flag (`resid_window` is `--resid-window`), and
//! flags override the file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use tdavol_core::embedding::EmbeddingConfig;
use tdavol_core::landscape::{LandscapeConfig, TdaConfig};
use tdavol_core::surrogate::SurrogateKind;
use tdavol_core::svmodel::If2Settings;

use crate::error::{PipelineError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChangepointMode {
    /// Penalized PELT segmentation.
    Pelt,
    /// Exactly one split at the SSE minimizer.
    Single,
}

impl ChangepointMode {
    pub fn as_str(self) -> &'static str {
        match self {
            ChangepointMode::Pelt => "pelt",
            ChangepointMode::Single => "single",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    pub prices: Option<PathBuf>,
    pub sentiment: Option<PathBuf>,
    pub out: PathBuf,
    pub seed: u64,
    pub price_column: String,
    pub tda: TdaConfig,
    pub roll_window: usize,
    pub surrogates: usize,
    pub surrogate_kinds: Vec<SurrogateKind>,
    pub quantile_low: f64,
    pub quantile_high: f64,
    /// `None` selects `2 σ̂² ln n` on the correlation series.
    pub penalty: Option<f64>,
    pub changepoint_mode: ChangepointMode,
    pub resid_window: usize,
    pub acf_lags: usize,
    /// IF2 settings; the seed field is replaced by a value derived from `seed`.
    pub if2: If2Settings<f64>,
    /// Particles in the final filter at the estimate.
    pub filter_particles: usize,
    pub dump_diagrams: bool,
    /// Worker threads; `None` uses every core. Never affects results.
    pub workers: Option<usize>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self {
            prices: None,
            sentiment: None,
            out: PathBuf::from("out"),
            seed: 20_200_101,
            price_column: "Close".into(),
            tda: TdaConfig {
                embedding: EmbeddingConfig::default(),
                landscape: LandscapeConfig::default(),
            },
            roll_window: 180,
            surrogates: 30,
            surrogate_kinds: SurrogateKind::ALL.to_vec(),
            quantile_low: 0.05,
            quantile_high: 0.95,
            penalty: None,
            changepoint_mode: ChangepointMode::Pelt,
            resid_window: 30,
            acf_lags: 40,
            if2: If2Settings::default(),
            filter_particles: 2000,
            dump_diagrams: false,
            workers: None,
        }
    }
}

/// Keys that only say where or how fast to run; left out of the written
/// config so output directories from different locations or thread counts
/// compare equal.
const RUNTIME_KEYS: [&str; 2] = ["out", "workers"];

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| PipelineError::Config(format!("{key} = {value:?}: {e}")))
}

fn positive(key: &str, value: &str) -> Result<usize> {
    let v: usize = parse(key, value)?;
    if v == 0 {
        return Err(PipelineError::Config(format!("{key} must be positive")));
    }
    Ok(v)
}

impl AnalysisConfig {
    /// Applies one setting. Keys may use `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let key = key.as_str();
        let value = value.trim();
        let emb = &mut self.tda.embedding;
        match key {
            "prices" => self.prices = (!value.is_empty()).then(|| PathBuf::from(value)),
            "sentiment" => self.sentiment = (!value.is_empty()).then(|| PathBuf::from(value)),
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = parse(key, value)?,
            "price_column" => self.price_column = value.to_string(),
            "m" => emb.dimension = positive(key, value)?,
            "d" => emb.delay = positive(key, value)?,
            "window" => emb.window = parse(key, value)?,
            "stride" => emb.stride = positive(key, value)?,
            "i_max" => self.tda.landscape.i_max = positive(key, value)?,
            "grid_size" => self.tda.landscape.grid_size = parse(key, value)?,
            "roll_window" => self.roll_window = parse(key, value)?,
            "surrogates" => self.surrogates = parse(key, value)?,
            "surrogate_kind" => {
                self.surrogate_kinds = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| s.parse::<SurrogateKind>())
                    .collect::<Result<Vec<_>, _>>()?;
                self.surrogate_kinds.dedup();
            }
            "q_low" => self.quantile_low = parse(key, value)?,
            "q_high" => self.quantile_high = parse(key, value)?,
            "penalty" => {
                self.penalty = match value {
                    "auto" | "" => None,
                    v => Some(parse(key, v)?),
                }
            }
            "changepoint_mode" => {
                self.changepoint_mode = match value {
                    "pelt" => ChangepointMode::Pelt,
                    "single" => ChangepointMode::Single,
                    other => {
                        return Err(PipelineError::Config(format!(
                            "changepoint_mode must be pelt or single, got {other:?}"
                        )))
                    }
                }
            }
            "resid_window" => self.resid_window = parse(key, value)?,
            "acf_lags" => self.acf_lags = positive(key, value)?,
            "if2_iterations" => self.if2.iterations = parse(key, value)?,
            "if2_replicates" => self.if2.replicates = positive(key, value)?,
            "if2_particles" => self.if2.particles = positive(key, value)?,
            "if2_eval_particles" => self.if2.eval_particles = positive(key, value)?,
            "if2_evals" => self.if2.evals = positive(key, value)?,
            "if2_rw_sd" => {
                let sds: Vec<f64> = value
                    .split(',')
                    .map(|s| parse(key, s.trim()))
                    .collect::<Result<_>>()?;
                self.if2.rw_sd = match sds.as_slice() {
                    [s] => [*s; 4],
                    [a, b, c, d] => [*a, *b, *c, *d],
                    _ => {
                        return Err(PipelineError::Config(
                            "if2_rw_sd takes one value or four (mu, logit phi, log sigma, h0)".into(),
                        ))
                    }
                };
            }
            "if2_cooling" => self.if2.cooling = parse(key, value)?,
            "filter_particles" => self.filter_particles = positive(key, value)?,
            "dump_diagrams" => self.dump_diagrams = parse(key, value)?,
            "workers" => {
                self.workers = match value {
                    "auto" | "" | "0" => None,
                    v => Some(parse(key, v)?),
                }
            }
            other => return Err(PipelineError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Reads a flat `key = value` file on top of `self`.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(PipelineError::io(path))?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| PipelineError::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message: "expected key = value".into(),
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Every key with its effective value, in a fixed order.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let emb = &self.tda.embedding;
        let sd = self.if2.rw_sd.map(|s| s.to_string()).join(",");
        vec![
            ("prices", path(&self.prices)),
            ("sentiment", path(&self.sentiment)),
            ("out", self.out.display().to_string()),
            ("seed", self.seed.to_string()),
            ("price_column", self.price_column.clone()),
            ("m", emb.dimension.to_string()),
            ("d", emb.delay.to_string()),
            ("window", emb.window.to_string()),
            ("stride", emb.stride.to_string()),
            ("i_max", self.tda.landscape.i_max.to_string()),
            ("grid_size", self.tda.landscape.grid_size.to_string()),
            ("roll_window", self.roll_window.to_string()),
            ("surrogates", self.surrogates.to_string()),
            (
                "surrogate_kind",
                self.surrogate_kinds
                    .iter()
                    .map(|k| k.as_str())
                    .collect::<Vec<_>>()
                    .join(","),
            ),
            ("q_low", self.quantile_low.to_string()),
            ("q_high", self.quantile_high.to_string()),
            ("penalty", self.penalty.map_or("auto".into(), |p| p.to_string())),
            ("changepoint_mode", self.changepoint_mode.as_str().into()),
            ("resid_window", self.resid_window.to_string()),
            ("acf_lags", self.acf_lags.to_string()),
            ("if2_iterations", self.if2.iterations.to_string()),
            ("if2_replicates", self.if2.replicates.to_string()),
            ("if2_particles", self.if2.particles.to_string()),
            ("if2_eval_particles", self.if2.eval_particles.to_string()),
            ("if2_evals", self.if2.evals.to_string()),
            ("if2_rw_sd", sd),
            ("if2_cooling", self.if2.cooling.to_string()),
            ("filter_particles", self.filter_particles.to_string()),
            ("dump_diagrams", self.dump_diagrams.to_string()),
            ("workers", self.workers.map_or("auto".into(), |w| w.to_string())),
        ]
    }

    /// Entries that determine the results (everything but output location and
    /// thread count).
    pub fn result_entries(&self) -> Vec<(&'static str, String)> {
        self.entries()
            .into_iter()
            .filter(|(k, _)| !RUNTIME_KEYS.contains(k))
            .collect()
    }

    /// The effective configuration in the file format accepted by
    /// [`apply_file`](Self::apply_file).
    pub fn to_text(&self) -> String {
        let mut out = String::from("# effective configuration; out and workers omitted\n");
        for (k, v) in self.result_entries() {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }

    /// Short SHA-256 digest of [`to_text`](Self::to_text).
    pub fn digest(&self) -> String {
        hex::encode(&Sha256::digest(self.to_text().as_bytes())[..8])
    }

    pub fn validate(&self) -> Result<()> {
        self.tda.embedding.validate()?;
        self.tda.landscape.validate()?;
        self.if2.validate()?;
        if self.roll_window < 2 {
            return Err(PipelineError::Config("roll_window must be at least 2".into()));
        }
        if self.surrogates < 2 {
            return Err(PipelineError::Config("surrogates must be at least 2".into()));
        }
        if !(0.0 <= self.quantile_low && self.quantile_low < self.quantile_high && self.quantile_high <= 1.0)
        {
            return Err(PipelineError::Config("need 0 <= q_low < q_high <= 1".into()));
        }
        if let Some(p) = self.penalty {
            if p.is_nan() || p <= 0.0 {
                return Err(PipelineError::Config("penalty must be positive".into()));
            }
        }
        if self.resid_window < 2 {
            return Err(PipelineError::Config("resid_window must be at least 2".into()));
        }
        if !matches!(self.price_column.as_str(), "Close" | "Adj Close") {
            log::warn!("using non-standard price column {:?}", self.price_column);
        }
        Ok(())
    }
}
