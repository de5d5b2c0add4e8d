use super::{MetricsError, SimpleGraph};

fn clustering_with_marks(g: &SimpleGraph, v: usize, marks: &mut [bool]) -> f64 {
    let neighbors = g.neighbors(v);
    let k = neighbors.len();
    if k < 2 {
        return 0.0;
    }
    for &u in neighbors {
        marks[u] = true;
    }
    // each closing edge between two neighbours is seen from both ends
    let mut closed = 0usize;
    for &u in neighbors {
        closed += g.neighbors(u).iter().filter(|&&w| marks[w]).count();
    }
    for &u in neighbors {
        marks[u] = false;
    }
    let triangles = closed / 2;
    triangles as f64 / (k * (k - 1) / 2) as f64
}

/// Local clustering coefficient of `v`: closed neighbour pairs over all
/// neighbour pairs, 0 when the degree is below 2.
pub fn local_clustering(g: &SimpleGraph, v: usize) -> Result<f64, MetricsError> {
    if v >= g.node_count() {
        return Err(MetricsError::NodeNotFound(v.to_string()));
    }
    let mut marks = vec![false; g.node_count()];
    Ok(clustering_with_marks(g, v, &mut marks))
}

/// Local clustering of every node, in node order.
pub fn clustering_all(g: &SimpleGraph) -> Vec<f64> {
    let mut marks = vec![false; g.node_count()];
    (0..g.node_count())
        .map(|v| clustering_with_marks(g, v, &mut marks))
        .collect()
}

/// Clustering of each node within the subgraph induced by nodes sharing
/// its group label.
pub fn clustering_within_groups(g: &SimpleGraph, group: &[usize]) -> Vec<f64> {
    assert_eq!(group.len(), g.node_count());
    let n = g.node_count();
    let edges = (0..n).flat_map(|u| {
        g.neighbors(u)
            .iter()
            .filter(move |&&w| w > u && group[u] == group[w])
            .map(move |&w| (u, w))
    });
    let induced = SimpleGraph::new(g.labels().to_vec(), edges.collect::<Vec<_>>());
    clustering_all(&induced)
}
