use std::collections::HashMap;

use crate::temporal::Snapshot;

/// Undirected, unweighted simple graph: the projection metrics run on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    /// Sorted, deduplicated neighbour lists.
    adjacency: Vec<Vec<usize>>,
}

impl SimpleGraph {
    /// Builds a graph on `labels` from an edge list. Self-loops are dropped,
    /// parallel and reversed edges collapse.
    pub fn new(labels: Vec<String>, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        for (u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range for {n} nodes");
            if u != v {
                adjacency[u].push(v);
                adjacency[v].push(u);
            }
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        SimpleGraph {
            labels,
            index,
            adjacency,
        }
    }

    /// Nodes labelled `"0".."n-1"`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        Self::new((0..n).map(|i| i.to_string()).collect(), edges)
    }

    /// Undirected simple projection: an edge exists iff any directed edge
    /// exists either way. Node order follows the snapshot's sorted node set.
    pub fn from_snapshot(snapshot: &Snapshot) -> Self {
        let labels: Vec<String> = snapshot.nodes.iter().cloned().collect();
        let position: HashMap<&str, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.as_str(), i))
            .collect();
        let edges: Vec<(usize, usize)> = snapshot
            .edges
            .keys()
            .map(|(u, v)| (position[u.as_str()], position[v.as_str()]))
            .collect();
        Self::new(labels, edges)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adjacency[u].binary_search(&v).is_ok()
    }

    /// Edge density `2m / (n (n - 1))`, the expected clustering of a random
    /// graph with the same size and edge count. Zero below two nodes.
    pub fn density(&self) -> f64 {
        density(self.node_count(), self.edge_count())
    }
}

pub fn density(nodes: usize, edges: usize) -> f64 {
    if nodes < 2 {
        return 0.0;
    }
    2.0 * edges as f64 / (nodes as f64 * (nodes as f64 - 1.0))
}
