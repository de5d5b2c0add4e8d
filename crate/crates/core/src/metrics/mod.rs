//! Graph metric kernels and their cohort × period aggregation.
//!
//! Every metric runs on the undirected simple projection of a single
//! period's snapshot. Node-level metrics implement [`CohortMetric`] and are
//! looked up by name through a [`MetricRegistry`].

mod betweenness;
mod clustering;
mod components;
mod graph;
mod matrix;

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use betweenness::{betweenness, betweenness_raw, betweenness_with_threads};
pub use clustering::{clustering_all, clustering_within_groups, local_clustering};
pub use components::{connected_components, giant_component_share};
pub use graph::{density, SimpleGraph};
pub use matrix::{deviation_grid, CohortMetricsMatrix};

use crate::temporal::TemporalNetwork;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("node {0} is not in the graph")]
    NodeNotFound(String),
    #[error("bad matrix: {0}")]
    Shape(String),
    #[error("unknown metric {0:?}")]
    UnknownMetric(String),
}

/// A per-node metric averaged into cohort cells.
pub trait CohortMetric: Send + Sync {
    fn name(&self) -> &'static str;
    /// One value per node of `graph`; `cohort_of[v]` is node `v`'s cohort.
    fn node_values(&self, graph: &SimpleGraph, cohort_of: &[usize]) -> Vec<f64>;
}

pub struct LocalClustering;

impl CohortMetric for LocalClustering {
    fn name(&self) -> &'static str {
        "clustering"
    }

    fn node_values(&self, graph: &SimpleGraph, _: &[usize]) -> Vec<f64> {
        clustering_all(graph)
    }
}

/// Clustering inside the subgraph induced by each node's own cohort.
pub struct WithinCohortClustering;

impl CohortMetric for WithinCohortClustering {
    fn name(&self) -> &'static str {
        "cohort_clustering"
    }

    fn node_values(&self, graph: &SimpleGraph, cohort_of: &[usize]) -> Vec<f64> {
        clustering_within_groups(graph, cohort_of)
    }
}

pub struct Betweenness;

impl CohortMetric for Betweenness {
    fn name(&self) -> &'static str {
        "betweenness"
    }

    fn node_values(&self, graph: &SimpleGraph, _: &[usize]) -> Vec<f64> {
        betweenness(graph)
    }
}

#[derive(Clone)]
pub struct MetricRegistry {
    metrics: BTreeMap<&'static str, Arc<dyn CohortMetric>>,
}

impl Default for MetricRegistry {
    fn default() -> Self {
        let mut registry = MetricRegistry {
            metrics: BTreeMap::new(),
        };
        registry.register(LocalClustering);
        registry.register(WithinCohortClustering);
        registry.register(Betweenness);
        registry
    }
}

impl MetricRegistry {
    pub fn register<M: CohortMetric + 'static>(&mut self, metric: M) {
        self.metrics.insert(metric.name(), Arc::new(metric));
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn CohortMetric>, MetricsError> {
        self.metrics
            .get(name)
            .cloned()
            .ok_or_else(|| MetricsError::UnknownMetric(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.metrics.keys().copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregationOptions {
    /// Count users in periods before their first authored record.
    pub include_passive: bool,
}

impl Default for AggregationOptions {
    fn default() -> Self {
        AggregationOptions {
            include_passive: true,
        }
    }
}

/// Cell `(c, p)` is the mean of `metric` over cohort-`c` nodes of snapshot
/// `p`, missing when none are active.
pub fn cohort_matrix(
    net: &TemporalNetwork,
    metric: &dyn CohortMetric,
    options: AggregationOptions,
) -> CohortMetricsMatrix {
    let n_periods = net.n_periods();
    let columns: Vec<Vec<Option<f64>>> = net
        .snapshots
        .par_iter()
        .map(|snapshot| {
            let period = snapshot.window.index;
            let graph = SimpleGraph::from_snapshot(snapshot);
            let entries: Vec<_> = graph
                .labels()
                .iter()
                .map(|u| {
                    *net.cohorts
                        .get(u)
                        .expect("every snapshot node has a cohort")
                })
                .collect();
            let cohort_of: Vec<usize> = entries.iter().map(|e| e.cohort).collect();
            let values = metric.node_values(&graph, &cohort_of);
            let mut sums = vec![(0.0, 0usize); n_periods];
            for (entry, value) in entries.iter().zip(values) {
                if options.include_passive || !entry.passive_in(period) {
                    let slot = &mut sums[entry.cohort - 1];
                    slot.0 += value;
                    slot.1 += 1;
                }
            }
            sums.into_iter()
                .map(|(sum, count)| (count > 0).then(|| sum / count as f64))
                .collect()
        })
        .collect();

    let mut m = CohortMetricsMatrix::new(metric.name(), n_periods, n_periods);
    for (p, column) in columns.into_iter().enumerate() {
        for (c, value) in column.into_iter().enumerate() {
            m.set(c + 1, p + 1, value);
        }
    }
    m
}

pub fn avg_clustering_by_cohort(net: &TemporalNetwork) -> CohortMetricsMatrix {
    cohort_matrix(net, &LocalClustering, AggregationOptions::default())
}

pub fn avg_betweenness_by_cohort(net: &TemporalNetwork) -> CohortMetricsMatrix {
    cohort_matrix(net, &Betweenness, AggregationOptions::default())
}

/// Size and connectivity of one period's projection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodSummary {
    pub period: usize,
    pub nodes: usize,
    pub edges: usize,
    pub giant_share: f64,
}

impl PeriodSummary {
    pub fn density(&self) -> f64 {
        density(self.nodes, self.edges)
    }
}

pub fn period_summaries(net: &TemporalNetwork) -> Vec<PeriodSummary> {
    net.snapshots
        .par_iter()
        .map(|s| {
            let g = SimpleGraph::from_snapshot(s);
            PeriodSummary {
                period: s.window.index,
                nodes: g.node_count(),
                edges: g.edge_count(),
                giant_share: giant_component_share(&g),
            }
        })
        .collect()
}
