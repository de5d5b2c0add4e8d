//! Independent reference implementations and pipeline helpers shared by the
//! integration tests.
#![allow(dead_code)]

pub mod criteria;

use std::collections::{BTreeMap, BTreeSet};

use cohortnet::classify::{self, HypothesisVerdict, PeriodRange, Thresholds};
use cohortnet::ingest::RawRecord;
use cohortnet::metrics::{self, CohortMetricsMatrix};
use cohortnet::synthgen::{self, GeneratorSpec, SyntheticDataset};
use cohortnet::temporal::{default_width, TemporalNetwork};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Edges = Vec<(usize, usize)>;

pub const KNOWN_CONNECTED_COUNTS: [usize; 9] = [0, 1, 1, 2, 6, 21, 112, 853, 11117];

// ---------------------------------------------------------------------------
// exhaustive connected graphs via canonical forms

fn adjacency_bits(n: usize, edges: &[(usize, usize)]) -> Vec<u16> {
    let mut adj = vec![0u16; n];
    for &(u, v) in edges {
        adj[u] |= 1 << v;
        adj[v] |= 1 << u;
    }
    adj
}

/// Splits every cell by neighbour counts into the other cells until stable.
fn refine(adj: &[u16], mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    loop {
        let masks: Vec<u16> = cells
            .iter()
            .map(|c| c.iter().fold(0, |m, &v| m | 1 << v))
            .collect();
        let mut next = Vec::with_capacity(cells.len());
        for cell in &cells {
            let mut groups: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
            for &v in cell {
                let sig = masks.iter().map(|m| (adj[v] & m).count_ones()).collect();
                groups.entry(sig).or_default().push(v);
            }
            next.extend(groups.into_values());
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

fn code(adj: &[u16], order: &[usize]) -> u64 {
    let mut bits = 0u64;
    for i in 0..order.len() {
        for j in i + 1..order.len() {
            bits = bits << 1 | u64::from(adj[order[i]] >> order[j] & 1);
        }
    }
    bits
}

fn search(adj: &[u16], cells: Vec<Vec<usize>>, best: &mut u64) {
    let Some(target) = cells.iter().position(|c| c.len() > 1) else {
        let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
        *best = (*best).max(code(adj, &order));
        return;
    };
    let cell = &cells[target];
    let mut explored: Vec<usize> = Vec::new();
    for &v in cell {
        // twins give identical subtrees
        let twin = explored
            .iter()
            .any(|&u| adj[u] & !(1 << v) == adj[v] & !(1 << u));
        if twin {
            continue;
        }
        explored.push(v);
        let mut split = cells.clone();
        let rest: Vec<usize> = cell.iter().copied().filter(|&u| u != v).collect();
        split.splice(target..=target, [vec![v], rest]);
        search(adj, refine(adj, split), best);
    }
}

/// Canonical code: identical for two graphs exactly when they are isomorphic.
pub fn canonical_code(n: usize, edges: &[(usize, usize)]) -> u64 {
    let adj = adjacency_bits(n, edges);
    let mut best = 0;
    search(&adj, refine(&adj, vec![(0..n).collect()]), &mut best);
    best
}

/// One representative of every isomorphism class of connected graphs on
/// `n` nodes. Built by attaching a new vertex to every non-empty subset of
/// each smaller class, since every connected graph has a non-cut vertex.
pub fn connected_graphs(n: usize) -> Vec<Edges> {
    let mut classes: Vec<Edges> = vec![vec![]];
    for size in 2..=n {
        let mut seen = BTreeSet::new();
        let mut next = Vec::new();
        for g in &classes {
            let new = size - 1;
            for subset in 1u32..1 << new {
                let mut h = g.clone();
                h.extend((0..new).filter(|i| subset >> i & 1 == 1).map(|i| (i, new)));
                if seen.insert(canonical_code(size, &h)) {
                    next.push(h);
                }
            }
        }
        classes = next;
    }
    if n == 0 {
        vec![]
    } else {
        classes
    }
}

// ---------------------------------------------------------------------------
// brute-force oracles

fn matrix(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut m = vec![vec![false; n]; n];
    for &(u, v) in edges {
        if u != v {
            m[u][v] = true;
            m[v][u] = true;
        }
    }
    m
}

/// Floyd-Warshall distances; `usize::MAX` when unreachable.
pub fn distances(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let adj = matrix(n, edges);
    let mut d = vec![vec![usize::MAX; n]; n];
    for i in 0..n {
        d[i][i] = 0;
        for j in 0..n {
            if adj[i][j] {
                d[i][j] = 1;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] != usize::MAX && d[k][j] != usize::MAX && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

/// Every shortest path from `s` to `t`, listed explicitly.
pub fn shortest_paths(adj: &[Vec<bool>], d: &[Vec<usize>], s: usize, t: usize) -> Vec<Vec<usize>> {
    fn walk(
        adj: &[Vec<bool>],
        d: &[Vec<usize>],
        t: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let here = *path.last().unwrap();
        if here == t {
            out.push(path.clone());
            return;
        }
        for w in 0..adj.len() {
            if adj[here][w] && d[w][t] != usize::MAX && d[w][t] + 1 == d[here][t] {
                path.push(w);
                walk(adj, d, t, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    if d[s][t] != usize::MAX {
        walk(adj, d, t, &mut vec![s], &mut out);
    }
    out
}

/// Normalized betweenness by enumerating all shortest paths of every
/// unordered pair.
pub fn brute_betweenness(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let adj = matrix(n, edges);
    let d = distances(n, edges);
    let mut score = vec![0.0; n];
    if n < 3 {
        return score;
    }
    for s in 0..n {
        for t in s + 1..n {
            let paths = shortest_paths(&adj, &d, s, t);
            if paths.is_empty() {
                continue;
            }
            let mut through = vec![0usize; n];
            for p in &paths {
                for &v in &p[1..p.len() - 1] {
                    through[v] += 1;
                }
            }
            for v in 0..n {
                score[v] += through[v] as f64 / paths.len() as f64;
            }
        }
    }
    let pairs = ((n - 1) * (n - 2)) as f64 / 2.0;
    score.iter().map(|s| s / pairs).collect()
}

/// Sum over ordered reachable pairs of the intermediate nodes on a shortest
/// path.
pub fn intermediate_traversals(n: usize, edges: &[(usize, usize)]) -> f64 {
    let d = distances(n, edges);
    let mut total = 0.0;
    for s in 0..n {
        for t in 0..n {
            if s != t && d[s][t] != usize::MAX {
                total += (d[s][t] - 1) as f64;
            }
        }
    }
    total
}

/// Local clustering by enumerating all node triples.
pub fn triple_clustering(n: usize, edges: &[(usize, usize)]) -> Vec<f64> {
    let adj = matrix(n, edges);
    let mut closed = vec![0usize; n];
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if adj[a][b] && adj[b][c] && adj[a][c] {
                    closed[a] += 1;
                    closed[b] += 1;
                    closed[c] += 1;
                }
            }
        }
    }
    (0..n)
        .map(|v| {
            let k = adj[v].iter().filter(|&&x| x).count();
            if k < 2 {
                0.0
            } else {
                closed[v] as f64 / (k * (k - 1) / 2) as f64
            }
        })
        .collect()
}

pub fn random_graph(rng: &mut ChaCha8Rng, max_nodes: usize) -> (usize, Edges) {
    let n = rng.gen_range(1..=max_nodes);
    let p: f64 = rng.gen_range(0.05..0.9);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    (n, edges)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------------------
// pipeline helpers

pub struct Run {
    pub data: SyntheticDataset,
    pub net: TemporalNetwork,
    pub clustering: CohortMetricsMatrix,
    pub betweenness: CohortMetricsMatrix,
    pub window: PeriodRange,
    pub verdict: HypothesisVerdict,
}

pub fn network(records: &[RawRecord]) -> TemporalNetwork {
    TemporalNetwork::build("99percent", records, default_width()).expect("non-empty dataset")
}

pub fn run(regime: &str, seed: u64) -> Run {
    let data = synthgen::generate(&GeneratorSpec::new(regime, seed)).expect("valid spec");
    let net = network(&data.records);
    let clustering = metrics::avg_clustering_by_cohort(&net);
    let betweenness = metrics::avg_betweenness_by_cohort(&net);
    let window = classify::formation_window_detect(&net).expect("enough periods");
    let thresholds = Thresholds::default();
    let features = classify::extract_features(&net, &clustering, &betweenness, window, &thresholds)
        .expect("enough cohorts");
    let verdict = classify::classify(&features, &thresholds);
    Run {
        data,
        net,
        clustering,
        betweenness,
        window,
        verdict,
    }
}

/// Kendall's tau-a between position and value.
pub fn kendall_trend(values: &[f64]) -> f64 {
    let n = values.len();
    let mut score = 0i64;
    for i in 0..n {
        for j in i + 1..n {
            score += match values[j].partial_cmp(&values[i]) {
                Some(std::cmp::Ordering::Greater) => 1,
                Some(std::cmp::Ordering::Less) => -1,
                _ => 0,
            };
        }
    }
    score as f64 / (n * (n - 1) / 2) as f64
}
