//! Seeded synthetic interaction streams, one regime per discourse
//! hypothesis.
//!
//! Randomness comes from ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, and every bounded draw is taken over `u64`, so a given
//! spec produces byte-identical output on every platform.

mod regimes;
mod stream;

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use regimes::{ActivistCore, Opportunist, Waves};
pub use stream::{Act, Draw, Stream, UserId};

use crate::ingest::RawRecord;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
}

/// Newcomers per period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IncomerSchedule {
    /// `round(initial * decay^(p-1))`, at least 1.
    Geometric { initial: f64, decay: f64 },
    /// One count per period.
    Explicit { counts: Vec<usize> },
}

impl Default for IncomerSchedule {
    fn default() -> Self {
        IncomerSchedule::Geometric {
            initial: 300.0,
            decay: 0.85,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorSpec {
    pub regime: String,
    pub seed: u64,
    pub periods: usize,
    /// Size of the activist core, and of each opportunist or rival set.
    pub core_size: usize,
    pub incomers: IncomerSchedule,
    /// Probability an active user retweets a hub.
    pub p_retweet_core: f64,
    pub takeover_period: usize,
    /// Probability of an extra random interaction per active user.
    pub chatter_rate: f64,
    /// Probability an earlier user is active again in a given period.
    pub return_rate: f64,
    /// Probability a hub retweet also mentions a neighbour of the same hub,
    /// ramping from start to max.
    pub peer_mention_start: f64,
    pub peer_mention_max: f64,
    pub peer_ramp_periods: usize,
    /// Periods between rival sets after the takeover; 0 disables them.
    pub rival_interval: usize,
    /// Share of hub retweets a rival set captures in its period.
    pub rival_share: f64,
    /// Probability a wave listener also mentions a speaker of the other
    /// live wave.
    pub cross_rate: f64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        GeneratorSpec {
            regime: "activist_core".into(),
            seed: 0,
            periods: 21,
            core_size: 12,
            incomers: IncomerSchedule::default(),
            p_retweet_core: 0.6,
            takeover_period: 8,
            chatter_rate: 0.1,
            return_rate: 0.2,
            peer_mention_start: 0.15,
            peer_mention_max: 0.75,
            peer_ramp_periods: 7,
            rival_interval: 4,
            rival_share: 0.7,
            cross_rate: 0.05,
        }
    }
}

impl GeneratorSpec {
    pub fn new(regime: &str, seed: u64) -> Self {
        GeneratorSpec {
            regime: regime.into(),
            seed,
            ..Default::default()
        }
    }

    pub fn incomers(&self, period: usize) -> usize {
        match &self.incomers {
            IncomerSchedule::Geometric { initial, decay } => {
                ((initial * decay.powi(period as i32 - 1)).round() as usize).max(1)
            }
            IncomerSchedule::Explicit { counts } => counts[period - 1],
        }
    }

    fn validate(&self) -> Result<(), GenError> {
        let invalid = |msg: String| Err(GenError::InvalidSpec(msg));
        if self.periods < 5 {
            return invalid(format!("periods must be at least 5, got {}", self.periods));
        }
        if self.core_size < 2 {
            return invalid(format!(
                "core_size must be at least 2, got {}",
                self.core_size
            ));
        }
        for (name, p) in [
            ("p_retweet_core", self.p_retweet_core),
            ("chatter_rate", self.chatter_rate),
            ("return_rate", self.return_rate),
            ("peer_mention_start", self.peer_mention_start),
            ("peer_mention_max", self.peer_mention_max),
            ("rival_share", self.rival_share),
            ("cross_rate", self.cross_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return invalid(format!("{name} must be a probability, got {p}"));
            }
        }
        match &self.incomers {
            IncomerSchedule::Geometric { initial, decay } => {
                if !(initial.is_finite() && *initial >= 1.0) {
                    return invalid(format!("initial incomers must be >= 1, got {initial}"));
                }
                if !(*decay > 0.0 && *decay <= 1.0) {
                    return invalid(format!("incomer decay must lie in (0, 1], got {decay}"));
                }
            }
            IncomerSchedule::Explicit { counts } => {
                if counts.len() < self.periods {
                    return invalid(format!(
                        "{} incomer counts for {} periods",
                        counts.len(),
                        self.periods
                    ));
                }
                if counts.contains(&0) {
                    return invalid("incomer counts must be positive".into());
                }
                if counts.windows(2).any(|w| w[1] > w[0]) {
                    return invalid("incomer schedule must be non-increasing".into());
                }
            }
        }
        Ok(())
    }
}

/// A stylized generator for one discourse regime.
pub trait Regime: Send + Sync {
    fn name(&self) -> &'static str;
    fn description(&self) -> &'static str;
    /// Regime-specific checks on top of the shared spec validation.
    fn validate(&self, _spec: &GeneratorSpec) -> Result<(), GenError> {
        Ok(())
    }
    fn simulate(&self, spec: &GeneratorSpec, stream: &mut Stream);
}

#[derive(Clone)]
pub struct RegimeRegistry {
    regimes: BTreeMap<&'static str, Arc<dyn Regime>>,
}

impl Default for RegimeRegistry {
    fn default() -> Self {
        let mut registry = RegimeRegistry {
            regimes: BTreeMap::new(),
        };
        registry.register(ActivistCore);
        registry.register(Opportunist);
        registry.register(Waves);
        registry
    }
}

impl RegimeRegistry {
    pub fn register<R: Regime + 'static>(&mut self, regime: R) {
        self.regimes.insert(regime.name(), Arc::new(regime));
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Regime>, GenError> {
        self.regimes.get(name).cloned().ok_or_else(|| {
            GenError::InvalidSpec(format!(
                "unknown regime {name:?} (known: {})",
                self.names().collect::<Vec<_>>().join(", ")
            ))
        })
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.regimes.keys().copied()
    }

    pub fn generate(&self, spec: &GeneratorSpec) -> Result<SyntheticDataset, GenError> {
        let regime = self.get(&spec.regime)?;
        spec.validate()?;
        regime.validate(spec)?;
        let mut stream = Stream::new(spec.seed);
        regime.simulate(spec, &mut stream);
        let events = stream.events();
        let users = stream.user_count();
        let records = stream.finish();
        let manifest = Manifest {
            generator: format!("cohortnet-synthgen {}", env!("CARGO_PKG_VERSION")),
            rng: "ChaCha8 (rand_chacha) seeded with seed_from_u64".into(),
            spec: spec.clone(),
            records: records.len(),
            events,
            users,
        };
        Ok(SyntheticDataset { records, manifest })
    }
}

/// Sidecar describing how a dataset was generated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub generator: String,
    pub rng: String,
    pub spec: GeneratorSpec,
    pub records: usize,
    /// Interactions encoded in the records.
    pub events: usize,
    pub users: usize,
}

#[derive(Debug, Clone)]
pub struct SyntheticDataset {
    pub records: Vec<RawRecord>,
    pub manifest: Manifest,
}

/// Generates with the built-in regimes.
pub fn generate(spec: &GeneratorSpec) -> Result<SyntheticDataset, GenError> {
    RegimeRegistry::default().generate(spec)
}
