use super::SimpleGraph;

/// Connected components, largest first; ties keep discovery order. Node
/// lists are sorted.
pub fn connected_components(g: &SimpleGraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut components = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        seen[start] = true;
        let mut members = vec![start];
        let mut cursor = 0;
        while cursor < members.len() {
            let v = members[cursor];
            cursor += 1;
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    members.push(w);
                }
            }
        }
        members.sort_unstable();
        components.push(members);
    }
    components.sort_by_key(|c| std::cmp::Reverse(c.len()));
    components
}

/// Share of nodes in the largest component; 0 for the empty graph.
pub fn giant_component_share(g: &SimpleGraph) -> f64 {
    if g.node_count() == 0 {
        return 0.0;
    }
    let largest = connected_components(g).first().map_or(0, Vec::len);
    largest as f64 / g.node_count() as f64
}
