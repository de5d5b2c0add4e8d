use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use chrono::Duration;
use cohortnet::classify::{PeriodRange, Thresholds};
use cohortnet::ingest::{default_frames, load_frames, FramePattern};
use cohortnet::synthgen::{GeneratorSpec, IncomerSchedule};
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::{ClassifyArgs, GenerateArgs, RunArgs};

/// Reads TOML when the extension says so, JSON otherwise.
pub fn read_structured<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let raw =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = match path.extension().and_then(|e| e.to_str()) {
        Some("toml") => toml::from_str(&raw).map_err(anyhow::Error::from),
        _ => serde_json::from_str(&raw).map_err(anyhow::Error::from),
    };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct FileConfig {
    input: Vec<PathBuf>,
    frames: Option<PathBuf>,
    window_hours: Option<u64>,
    out: Option<PathBuf>,
    cumulative: Option<bool>,
    include_passive: Option<bool>,
    clustering_metric: Option<String>,
    formation_window: Option<String>,
    thresholds: Option<Thresholds>,
}

/// Fully resolved settings for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub frames: Vec<FramePattern>,
    pub width: Duration,
    pub out: PathBuf,
    pub cumulative: bool,
    pub include_passive: bool,
    pub clustering_metric: String,
    pub formation_window: Option<PeriodRange>,
    pub thresholds: Thresholds,
}

impl RunConfig {
    pub fn resolve(args: &RunArgs, require_inputs: bool) -> Result<Self> {
        let file: FileConfig = match &args.config {
            Some(path) => read_structured(path)?,
            None => FileConfig::default(),
        };
        let inputs = if args.inputs.is_empty() {
            file.input
        } else {
            args.inputs.clone()
        };
        if require_inputs {
            ensure!(
                !inputs.is_empty(),
                "no input given; pass --input or set `input` in the config file"
            );
            for path in &inputs {
                ensure!(path.exists(), "input {} does not exist", path.display());
            }
        }
        let frames = match args.frames.clone().or(file.frames) {
            Some(path) => load_frames(&path)
                .with_context(|| format!("loading frames from {}", path.display()))?,
            None => default_frames(),
        };
        let hours = args.window_hours.or(file.window_hours).unwrap_or(72);
        ensure!(hours > 0, "window width must be positive");
        let formation_window = file
            .formation_window
            .map(|s| s.parse::<PeriodRange>())
            .transpose()
            .context("formation_window in config file")?;
        Ok(RunConfig {
            inputs,
            frames,
            width: Duration::hours(hours as i64),
            out: args
                .out
                .clone()
                .or(file.out)
                .unwrap_or_else(|| PathBuf::from("out")),
            cumulative: args.cumulative || file.cumulative.unwrap_or(false),
            include_passive: args
                .include_passive
                .or(file.include_passive)
                .unwrap_or(true),
            clustering_metric: args
                .clustering_metric
                .clone()
                .or(file.clustering_metric)
                .unwrap_or_else(|| "clustering".into()),
            formation_window,
            thresholds: file.thresholds.unwrap_or_default(),
        })
    }

    pub fn for_classify(args: &ClassifyArgs) -> Result<Self> {
        let mut config = Self::resolve(&args.run, args.from_analysis.is_none())?;
        if let Some(path) = &args.thresholds {
            config.thresholds = read_structured(path)?;
        }
        if let Some(window) = args.formation_window {
            config.formation_window = Some(window);
        }
        Ok(config)
    }
}

pub fn generator_spec(args: &GenerateArgs) -> Result<GeneratorSpec> {
    let mut spec: GeneratorSpec = match &args.spec {
        Some(path) => read_structured(path)?,
        None => GeneratorSpec::default(),
    };
    spec.regime = args.regime.clone();
    spec.seed = args.seed;
    macro_rules! apply {
        ($($field:ident),*) => {
            $(if let Some(v) = args.$field {
                spec.$field = v;
            })*
        };
    }
    apply!(
        periods,
        core_size,
        p_retweet_core,
        takeover_period,
        chatter_rate,
        return_rate
    );
    if args.incomers_initial.is_some() || args.incomers_decay.is_some() {
        let (initial, decay) = match spec.incomers {
            IncomerSchedule::Geometric { initial, decay } => (initial, decay),
            IncomerSchedule::Explicit { .. } => {
                bail!("--incomers-initial/--incomers-decay need a geometric incomer schedule")
            }
        };
        spec.incomers = IncomerSchedule::Geometric {
            initial: args.incomers_initial.unwrap_or(initial),
            decay: args.incomers_decay.unwrap_or(decay),
        };
    }
    Ok(spec)
}
