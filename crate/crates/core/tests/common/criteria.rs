//! Acceptance criteria at their pinned tolerances. Each returns a one-line
//! detail on success and a failure description otherwise.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::time::{Duration, Instant};

use cohortnet::classify::Label;
use cohortnet::ingest::{
    default_frames, extract_interactions, match_frame, parse_jsonl, read_dataset, write_jsonl,
};
use cohortnet::metrics::{
    betweenness, betweenness_raw, betweenness_with_threads, clustering_all, deviation_grid,
    SimpleGraph,
};
use cohortnet::synthgen::{generate, GeneratorSpec};
use sha2::{Digest, Sha256};

use super::*;

pub type Outcome = Result<String, String>;

const REGIMES: [(&str, Label); 3] = [
    ("activist_core", Label::H0),
    ("opportunist", Label::H1),
    ("waves", Label::H2),
];

fn within(start: Instant, limit: Duration, what: &str) -> Result<Duration, String> {
    let took = start.elapsed();
    if took < limit {
        Ok(took)
    } else {
        Err(format!("{what} took {took:.1?}, limit {limit:?}"))
    }
}

fn compare_betweenness(n: usize, edges: &[(usize, usize)]) -> Result<(), String> {
    let fast = betweenness(&SimpleGraph::from_edges(n, edges.iter().copied()));
    let oracle = brute_betweenness(n, edges);
    for v in 0..n {
        if (fast[v] - oracle[v]).abs() > 1e-9 {
            return Err(format!(
                "n={n} edges={edges:?} node {v}: {} vs oracle {}",
                fast[v], oracle[v]
            ));
        }
    }
    Ok(())
}

pub fn betweenness_oracle() -> Outcome {
    let start = Instant::now();
    let mut exhaustive = 0;
    for n in 1..=8 {
        let graphs = connected_graphs(n);
        if graphs.len() != KNOWN_CONNECTED_COUNTS[n] {
            return Err(format!(
                "{} connected graphs on {n} nodes, expected {}",
                graphs.len(),
                KNOWN_CONNECTED_COUNTS[n]
            ));
        }
        for edges in &graphs {
            compare_betweenness(n, edges)?;
            let raw: f64 = betweenness_raw(&SimpleGraph::from_edges(n, edges.iter().copied()))
                .iter()
                .sum();
            let expected = intermediate_traversals(n, edges);
            if (raw - expected).abs() > 1e-9 * expected.max(1.0) {
                return Err(format!(
                    "raw sum {raw} vs {expected} traversals on {edges:?}"
                ));
            }
        }
        exhaustive += graphs.len();
    }
    let mut r = rng(0xB7);
    for _ in 0..200 {
        let (n, edges) = random_graph(&mut r, 12);
        compare_betweenness(n, &edges)?;
    }
    let took = within(start, Duration::from_secs(60), "betweenness oracle")?;
    Ok(format!(
        "{exhaustive} connected graphs <= 8 nodes + 200 random <= 12 nodes, 1e-9, {took:.1?}"
    ))
}

pub fn clustering_oracle() -> Outcome {
    let start = Instant::now();
    let mut r = rng(0xC1);
    let mut nodes = 0;
    for _ in 0..500 {
        let (n, edges) = random_graph(&mut r, 30);
        let fast = clustering_all(&SimpleGraph::from_edges(n, edges.iter().copied()));
        let oracle = triple_clustering(n, &edges);
        if fast != oracle {
            return Err(format!(
                "n={n} edges={edges:?}: {fast:?} vs oracle {oracle:?}"
            ));
        }
        nodes += n;
    }
    let took = within(start, Duration::from_secs(30), "clustering oracle")?;
    Ok(format!(
        "500 random graphs <= 30 nodes ({nodes} nodes), exact, {took:.1?}"
    ))
}

pub fn fixture(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn parser_corpus() -> Outcome {
    let parsed = read_dataset(&fixture("parser_corpus.jsonl")).map_err(|e| e.to_string())?;
    if !parsed.errors.is_empty() {
        return Err(format!("parse errors: {:?}", parsed.errors));
    }
    let expected = std::fs::read_to_string(fixture("parser_corpus.expected.tsv"))
        .map_err(|e| e.to_string())?;
    let frame = &default_frames()[0];
    let by_id: BTreeMap<&str, _> = parsed.records.iter().map(|r| (r.id.as_str(), r)).collect();
    let mut checked = 0;
    for line in expected.lines().skip(1) {
        let cols: Vec<&str> = line.split('\t').collect();
        let (id, in_frame, labels) = (cols[0], cols[1] == "1", cols[2]);
        let record = by_id.get(id).ok_or(format!("record {id} missing"))?;
        let want: BTreeSet<String> = labels
            .split(' ')
            .filter(|s| *s != "-")
            .map(str::to_string)
            .collect();
        let got: BTreeSet<String> = extract_interactions(record)
            .iter()
            .map(|i| format!("{}:{}", i.kind, i.target))
            .collect();
        if got != want {
            return Err(format!(
                "record {id} {:?}: got {got:?}, expected {want:?}",
                record.text
            ));
        }
        if match_frame(record, frame) != in_frame {
            return Err(format!("record {id}: frame match should be {in_frame}"));
        }
        checked += 1;
    }
    if checked != 50 || parsed.records.len() != 50 {
        return Err(format!(
            "{checked} labels for {} records",
            parsed.records.len()
        ));
    }
    Ok("50 hand-labelled records match exactly".into())
}

pub fn pipeline_conservation() -> Outcome {
    let mut runs = 0;
    for (regime, _) in REGIMES {
        for seed in [0, 11, 4242] {
            let data = generate(&GeneratorSpec::new(regime, seed)).map_err(|e| e.to_string())?;
            let mut file = Vec::new();
            write_jsonl(&data.records, &mut file).map_err(|e| e.to_string())?;
            let parsed = parse_jsonl(file.as_slice()).map_err(|e| e.to_string())?;
            if !parsed.errors.is_empty() || parsed.records != data.records {
                return Err(format!("{regime}/{seed}: records do not round-trip"));
            }
            let net = network(&parsed.records);
            let weight: u64 = net.snapshots.iter().map(|s| s.total_weight()).sum();
            if weight != data.manifest.events as u64 {
                return Err(format!(
                    "{regime}/{seed}: edge weight {weight} != {} events",
                    data.manifest.events
                ));
            }
            let mut users: BTreeSet<&str> = BTreeSet::new();
            let interactions: Vec<_> = parsed
                .records
                .iter()
                .flat_map(extract_interactions)
                .collect();
            users.extend(parsed.records.iter().map(|r| r.author.as_str()));
            users.extend(interactions.iter().map(|i| i.target.as_str()));
            let incomers: usize = net.incomer_curve().iter().sum();
            if incomers != users.len() || incomers != data.manifest.users {
                return Err(format!(
                    "{regime}/{seed}: incomers sum {incomers}, {} unique users, {} generated",
                    users.len(),
                    data.manifest.users
                ));
            }
            runs += 1;
        }
    }
    Ok(format!(
        "{runs} generated datasets conserve events and users"
    ))
}

pub fn classifier_separation() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    let mut failed = Vec::new();
    for (regime, label) in REGIMES {
        let hits = (0..50u64)
            .filter(|&seed| run(regime, seed).verdict.label == label)
            .count();
        let accuracy = hits as f64 / 50.0;
        lines.push(format!("{regime} {hits}/50"));
        if accuracy < 0.9 {
            failed.push(format!("{regime} accuracy {accuracy:.2} < 0.90"));
        }
    }
    let took = within(start, Duration::from_secs(600), "classifier separation")?;
    if failed.is_empty() {
        Ok(format!("{}, {took:.1?}", lines.join(", ")))
    } else {
        Err(failed.join("; "))
    }
}

pub const SHAPE_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
pub const EARLY_COHORTS: usize = 7;

/// Incomers decline throughout: never more than 10% above the previous
/// period after period 3, and the last period is below the first.
pub fn concave_incomers(curve: &[usize]) -> bool {
    let bounded = curve
        .windows(2)
        .enumerate()
        .all(|(i, w)| i + 2 <= 3 || w[1] as f64 <= 1.1 * w[0] as f64);
    let non_increasing = curve[1..].windows(2).all(|w| w[1] <= w[0]);
    bounded && non_increasing && curve.last() < curve.first()
}

/// Arrival-period clustering of each early cohort trends upward.
pub fn early_clustering_trend(r: &Run) -> (f64, f64, f64) {
    let diag: Vec<f64> = (1..=EARLY_COHORTS)
        .filter_map(|c| r.clustering.get(c, c))
        .collect();
    let third = diag.len() / 3;
    let head = diag[..third].iter().sum::<f64>() / third as f64;
    let tail = diag[diag.len() - third..].iter().sum::<f64>() / third as f64;
    (kendall_trend(&diag), head, tail)
}

pub fn cohort_one_lead(r: &Run) -> f64 {
    let z = deviation_grid(&r.betweenness);
    let led = r
        .window
        .periods()
        .filter(|&p| {
            let col = z.column(p);
            let top = col
                .iter()
                .map(|(_, v)| *v)
                .fold(f64::NEG_INFINITY, f64::max);
            col.iter()
                .find(|(c, _)| *c == 1)
                .is_some_and(|(_, v)| *v == top)
        })
        .count();
    led as f64 / r.window.len() as f64
}

pub fn activist_core_shape() -> Outcome {
    let mut details = Vec::new();
    for seed in SHAPE_SEEDS {
        let r = run("activist_core", seed);
        let curve = r.net.incomer_curve();
        if !concave_incomers(&curve) {
            return Err(format!(
                "seed {seed}: incomer curve {curve:?} is not concave"
            ));
        }
        let (tau, head, tail) = early_clustering_trend(&r);
        if tau < 0.5 || tail <= head {
            return Err(format!("seed {seed}: early cohort clustering not rising (tau {tau:.2}, {head:.3} -> {tail:.3})"));
        }
        let lead = cohort_one_lead(&r);
        if lead < 0.7 {
            return Err(format!(
                "seed {seed}: cohort 1 leads BC z in {lead:.2} of window {}",
                r.window
            ));
        }
        details.push(format!("s{seed}: tau {tau:.2}, lead {lead:.2}"));
    }
    Ok(details.join("; "))
}

/// Frozen digests of the JSON-lines rendering of default-parameter runs.
pub const FROZEN_DIGESTS: [(&str, u64, &str); 3] = [
    (
        "activist_core",
        1,
        "d3abae8ff5c0b0b26082086b67254fabc6ae9a1215741d668894f121e8f2d86a",
    ),
    (
        "opportunist",
        1,
        "39983ea880f600335f1d380cc3f67bea02306fe9867dac60543f33ed75f40235",
    ),
    (
        "waves",
        1,
        "da4dee02e93a1a29be7a9ee4f00f56cad431d52495dee4d3e24e0415d5a089d4",
    ),
];

pub fn dataset_digest(regime: &str, seed: u64) -> String {
    let data = generate(&GeneratorSpec::new(regime, seed)).expect("valid spec");
    let mut bytes = Vec::new();
    write_jsonl(&data.records, &mut bytes).expect("in-memory write");
    format!("{:x}", Sha256::digest(&bytes))
}

pub fn determinism() -> Outcome {
    let threads = std::thread::available_parallelism()
        .map_or(4, |n| n.get())
        .max(4);
    let mut r = rng(0xD7);
    let mut graphs: Vec<SimpleGraph> = (0..20)
        .map(|_| {
            let (n, edges) = random_graph(&mut r, 200);
            SimpleGraph::from_edges(n, edges)
        })
        .collect();
    let net = run("activist_core", 3).net;
    graphs.extend(net.snapshots.iter().map(SimpleGraph::from_snapshot));
    for (i, g) in graphs.iter().enumerate() {
        let one: Vec<u64> = betweenness_with_threads(g, 1)
            .iter()
            .map(|x| x.to_bits())
            .collect();
        let many: Vec<u64> = betweenness_with_threads(g, threads)
            .iter()
            .map(|x| x.to_bits())
            .collect();
        if one != many {
            return Err(format!(
                "graph {i}: 1-thread and {threads}-thread betweenness differ"
            ));
        }
    }
    for (regime, seed, frozen) in FROZEN_DIGESTS {
        let digest = dataset_digest(regime, seed);
        if digest != frozen {
            return Err(format!(
                "{regime}/{seed} digest {digest} != frozen {frozen}"
            ));
        }
        if dataset_digest(regime, seed) != digest {
            return Err(format!("{regime}/{seed} differs between runs"));
        }
    }
    Ok(format!(
        "{} graphs bit-identical on 1 vs {threads} threads; 3 frozen digests match",
        graphs.len()
    ))
}
