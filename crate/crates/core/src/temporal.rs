//! Fixed-width windowing, per-window snapshots and cohort labels.
//!
//! Windows are half-open `[start, start + width)` intervals anchored at
//! midnight UTC of the earliest timestamp in the dataset, numbered from 1.
//! Empty windows are kept so period indices line up with calendar time.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use chrono::{DateTime, Duration, Utc};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{extract_interactions, Interaction, RawRecord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TemporalError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("window width must be at least one second")]
    InvalidWidth,
}

pub fn default_width() -> Duration {
    Duration::hours(72)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowIndex {
    /// 1-based period number.
    pub index: usize,
    pub start: DateTime<Utc>,
    pub width: Duration,
}

impl WindowIndex {
    pub fn end(&self) -> DateTime<Utc> {
        self.start + self.width
    }
}

/// Window layout covering a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowScheme {
    pub origin: DateTime<Utc>,
    pub width: Duration,
    pub count: usize,
}

impl WindowScheme {
    pub fn covering<I>(timestamps: I, width: Duration) -> Result<Self, TemporalError>
    where
        I: IntoIterator<Item = DateTime<Utc>>,
    {
        if width.num_seconds() < 1 {
            return Err(TemporalError::InvalidWidth);
        }
        let (min, max) = timestamps
            .into_iter()
            .fold(
                None,
                |acc: Option<(DateTime<Utc>, DateTime<Utc>)>, ts| match acc {
                    None => Some((ts, ts)),
                    Some((lo, hi)) => Some((lo.min(ts), hi.max(ts))),
                },
            )
            .ok_or(TemporalError::EmptyDataset)?;
        let origin = min
            .date_naive()
            .and_hms_opt(0, 0, 0)
            .expect("midnight exists")
            .and_utc();
        let mut scheme = WindowScheme {
            origin,
            width,
            count: 0,
        };
        scheme.count = scheme.index_of(max).expect("max is after origin");
        Ok(scheme)
    }

    /// 1-based window containing `ts`; `None` before the origin.
    pub fn index_of(&self, ts: DateTime<Utc>) -> Option<usize> {
        let offset = (ts - self.origin).num_seconds();
        (offset >= 0).then(|| (offset / self.width.num_seconds()) as usize + 1)
    }

    pub fn window(&self, index: usize) -> WindowIndex {
        WindowIndex {
            index,
            start: self.origin + self.width * (index as i32 - 1),
            width: self.width,
        }
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

/// Pairs every interaction with its window.
pub fn assign_windows(
    interactions: &[Interaction],
    width: Duration,
) -> Result<Vec<(Interaction, WindowIndex)>, TemporalError> {
    let scheme = WindowScheme::covering(interactions.iter().map(|i| i.timestamp), width)?;
    Ok(window_with(&scheme, interactions))
}

fn window_with(
    scheme: &WindowScheme,
    interactions: &[Interaction],
) -> Vec<(Interaction, WindowIndex)> {
    interactions
        .iter()
        .map(|i| {
            let index = scheme
                .index_of(i.timestamp)
                .expect("scheme covers all interactions");
            (i.clone(), scheme.window(index))
        })
        .collect()
}

/// The interaction graph of one window. Parallel interactions of any kind
/// fold into one weighted edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Snapshot {
    pub window: WindowIndex,
    pub nodes: BTreeSet<String>,
    pub edges: BTreeMap<(String, String), u32>,
}

impl Snapshot {
    pub fn empty(window: WindowIndex) -> Self {
        Snapshot {
            window,
            nodes: BTreeSet::new(),
            edges: BTreeMap::new(),
        }
    }

    fn add(&mut self, source: &str, target: &str, weight: u32) {
        self.nodes.insert(source.to_string());
        self.nodes.insert(target.to_string());
        *self
            .edges
            .entry((source.to_string(), target.to_string()))
            .or_insert(0) += weight;
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.values().map(|&w| u64::from(w)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// One snapshot per window from 1 through the last window seen, gaps
/// included.
pub fn build_snapshots(windowed: &[(Interaction, WindowIndex)]) -> Vec<Snapshot> {
    let Some((_, sample)) = windowed.first() else {
        return Vec::new();
    };
    let origin = sample.start - sample.width * (sample.index as i32 - 1);
    let count = windowed.iter().map(|(_, w)| w.index).max().unwrap_or(0);
    let scheme = WindowScheme {
        origin,
        width: sample.width,
        count,
    };
    let mut by_window: Vec<Vec<&Interaction>> = vec![Vec::new(); count];
    for (interaction, window) in windowed {
        by_window[window.index - 1].push(interaction);
    }
    snapshots_from_groups(&scheme, by_window)
}

fn snapshots_from_groups(
    scheme: &WindowScheme,
    by_window: Vec<Vec<&Interaction>>,
) -> Vec<Snapshot> {
    by_window
        .into_par_iter()
        .enumerate()
        .map(|(idx, group)| {
            let mut snapshot = Snapshot::empty(scheme.window(idx + 1));
            for i in group {
                if i.source != i.target {
                    snapshot.add(&i.source, &i.target, 1);
                }
            }
            snapshot
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortEntry {
    /// Earliest window in which the user appears at all.
    pub cohort: usize,
    pub first_authored: Option<usize>,
    pub first_targeted: Option<usize>,
}

impl CohortEntry {
    /// Never authored a frame-matching record.
    pub fn is_passive(&self) -> bool {
        self.first_authored.is_none()
    }

    /// Has not authored anything yet as of `period`.
    pub fn passive_in(&self, period: usize) -> bool {
        self.first_authored.is_none_or(|a| period < a)
    }
}

/// Username → arrival cohort.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CohortMap {
    entries: BTreeMap<String, CohortEntry>,
}

impl CohortMap {
    fn observe(&mut self, user: &str, window: usize, authored: bool) {
        let entry = self.entries.entry(user.to_string()).or_insert(CohortEntry {
            cohort: window,
            first_authored: None,
            first_targeted: None,
        });
        entry.cohort = entry.cohort.min(window);
        let slot = if authored {
            &mut entry.first_authored
        } else {
            &mut entry.first_targeted
        };
        *slot = Some(slot.map_or(window, |w| w.min(window)));
    }

    pub fn get(&self, user: &str) -> Option<&CohortEntry> {
        self.entries.get(user)
    }

    pub fn cohort_of(&self, user: &str) -> Option<usize> {
        self.entries.get(user).map(|e| e.cohort)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &CohortEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Copy without users that never author.
    pub fn without_passive(&self) -> CohortMap {
        CohortMap {
            entries: self
                .entries
                .iter()
                .filter(|(_, e)| !e.is_passive())
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
        }
    }

    /// Largest cohort index in use.
    pub fn max_cohort(&self) -> usize {
        self.entries.values().map(|e| e.cohort).max().unwrap_or(0)
    }
}

/// Labels every author and interaction target with the window of their
/// first appearance. Authors are also tracked separately so users who were
/// targeted before they wrote anything can be flagged passive until then.
pub fn assign_cohorts(
    records: &[RawRecord],
    windowed: &[(Interaction, WindowIndex)],
    scheme: &WindowScheme,
) -> CohortMap {
    let mut map = CohortMap::default();
    for record in records {
        if let Some(window) = scheme.index_of(record.timestamp) {
            map.observe(&record.author, window, true);
        }
    }
    for (interaction, window) in windowed {
        map.observe(&interaction.source, window.index, true);
        map.observe(&interaction.target, window.index, false);
    }
    map
}

/// Entry `k - 1` counts the users of cohort `k`.
pub fn incomer_curve(cohorts: &CohortMap, n_windows: usize) -> Vec<usize> {
    let mut curve = vec![0; n_windows];
    for (_, entry) in cohorts.iter() {
        if let Some(slot) = curve.get_mut(entry.cohort - 1) {
            *slot += 1;
        }
    }
    curve
}

/// Records per window.
pub fn tweets_per_period(records: &[RawRecord], scheme: &WindowScheme) -> Vec<usize> {
    let mut counts = vec![0; scheme.len()];
    for record in records {
        if let Some(slot) = scheme
            .index_of(record.timestamp)
            .and_then(|w| counts.get_mut(w - 1))
        {
            *slot += 1;
        }
    }
    counts
}

/// The longitudinal series of snapshots for one frame.
#[derive(Debug, Clone)]
pub struct TemporalNetwork {
    pub frame: String,
    pub scheme: WindowScheme,
    pub snapshots: Vec<Snapshot>,
    pub cohorts: CohortMap,
    /// Interactions extracted from the records, self-targets already dropped.
    pub interaction_count: usize,
}

impl TemporalNetwork {
    /// Builds the network from frame-filtered records.
    pub fn build(
        frame: &str,
        records: &[RawRecord],
        width: Duration,
    ) -> Result<Self, TemporalError> {
        let scheme = WindowScheme::covering(records.iter().map(|r| r.timestamp), width)?;
        let interactions: Vec<Interaction> = records
            .par_iter()
            .flat_map_iter(extract_interactions)
            .collect();
        let windowed = window_with(&scheme, &interactions);

        let mut by_window: Vec<Vec<&Interaction>> = vec![Vec::new(); scheme.len()];
        for (interaction, window) in &windowed {
            by_window[window.index - 1].push(interaction);
        }
        let snapshots = snapshots_from_groups(&scheme, by_window);
        let cohorts = assign_cohorts(records, &windowed, &scheme);
        Ok(TemporalNetwork {
            frame: frame.to_string(),
            scheme,
            snapshots,
            cohorts,
            interaction_count: interactions.len(),
        })
    }

    pub fn n_periods(&self) -> usize {
        self.snapshots.len()
    }

    pub fn incomer_curve(&self) -> Vec<usize> {
        incomer_curve(&self.cohorts, self.n_periods())
    }

    /// Snapshot `p` becomes the union of snapshots `1..=p`.
    pub fn cumulative(&self) -> TemporalNetwork {
        let mut running = Snapshot::empty(self.scheme.window(1));
        let snapshots = self
            .snapshots
            .iter()
            .map(|s| {
                for ((u, v), w) in &s.edges {
                    running.add(u, v, *w);
                }
                running.nodes.extend(s.nodes.iter().cloned());
                Snapshot {
                    window: s.window,
                    ..running.clone()
                }
            })
            .collect();
        TemporalNetwork {
            snapshots,
            ..self.clone()
        }
    }
}

/// `<frame>_p<index>.csv`, with the frame label reduced to filename-safe
/// characters.
pub fn edge_list_file_name(frame: &str, index: usize) -> String {
    format!("{}_p{index}.csv", sanitize_label(frame))
}

pub fn sanitize_label(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Writes `source,target,weight` rows under a header.
pub fn write_edge_list<W: Write>(snapshot: &Snapshot, out: W) -> std::io::Result<()> {
    let mut csv = csv::Writer::from_writer(out);
    csv.write_record(["source", "target", "weight"])?;
    for ((source, target), weight) in &snapshot.edges {
        csv.write_record([source.as_str(), target.as_str(), &weight.to_string()])?;
    }
    csv.flush()
}
