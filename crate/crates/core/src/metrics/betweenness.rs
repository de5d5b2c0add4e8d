//! Exact Brandes betweenness on unweighted undirected graphs.
//!
//! Sources are split into fixed-size chunks. Each chunk accumulates its
//! sources in order, and chunk partials are summed in chunk order, so the
//! result is bit-identical for any thread count.

use std::collections::VecDeque;

use rayon::prelude::*;

use super::SimpleGraph;

const SOURCES_PER_CHUNK: usize = 32;

struct Workspace {
    stack: Vec<usize>,
    queue: VecDeque<usize>,
    preds: Vec<Vec<usize>>,
    sigma: Vec<f64>,
    dist: Vec<i64>,
    delta: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Workspace {
            stack: Vec::with_capacity(n),
            queue: VecDeque::with_capacity(n),
            preds: vec![Vec::new(); n],
            sigma: vec![0.0; n],
            dist: vec![-1; n],
            delta: vec![0.0; n],
        }
    }

    /// Adds the dependencies of every target on `source` into `acc`.
    fn accumulate(&mut self, g: &SimpleGraph, source: usize, acc: &mut [f64]) {
        for &v in &self.stack {
            self.preds[v].clear();
            self.sigma[v] = 0.0;
            self.dist[v] = -1;
            self.delta[v] = 0.0;
        }
        self.stack.clear();

        self.sigma[source] = 1.0;
        self.dist[source] = 0;
        self.queue.push_back(source);
        while let Some(v) = self.queue.pop_front() {
            self.stack.push(v);
            for &w in g.neighbors(v) {
                if self.dist[w] < 0 {
                    self.dist[w] = self.dist[v] + 1;
                    self.queue.push_back(w);
                }
                if self.dist[w] == self.dist[v] + 1 {
                    self.sigma[w] += self.sigma[v];
                    self.preds[w].push(v);
                }
            }
        }

        for &w in self.stack.iter().rev() {
            let coeff = (1.0 + self.delta[w]) / self.sigma[w];
            for &v in &self.preds[w] {
                self.delta[v] += self.sigma[v] * coeff;
            }
            if w != source {
                acc[w] += self.delta[w];
            }
        }
    }
}

/// Raw Brandes scores summed over ordered (source, target) pairs: twice the
/// undirected betweenness.
pub fn betweenness_raw(g: &SimpleGraph) -> Vec<f64> {
    let n = g.node_count();
    let sources: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = sources
        .par_chunks(SOURCES_PER_CHUNK)
        .map(|chunk| {
            let mut ws = Workspace::new(n);
            let mut acc = vec![0.0; n];
            for &s in chunk {
                ws.accumulate(g, s, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = vec![0.0; n];
    for partial in partials {
        for (t, p) in total.iter_mut().zip(partial) {
            *t += p;
        }
    }
    total
}

/// Betweenness of every node normalized by `(n-1)(n-2)/2`, the number of
/// unordered pairs not involving the node. All zeros below three nodes.
pub fn betweenness(g: &SimpleGraph) -> Vec<f64> {
    let n = g.node_count();
    if n < 3 {
        return vec![0.0; n];
    }
    // raw counts each unordered pair twice
    let scale = 1.0 / ((n - 1) as f64 * (n - 2) as f64);
    betweenness_raw(g).into_iter().map(|b| b * scale).collect()
}

/// [`betweenness`] on a dedicated pool of `threads` workers.
pub fn betweenness_with_threads(g: &SimpleGraph, threads: usize) -> Vec<f64> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("thread pool")
        .install(|| betweenness(g))
}
