use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use cohortnet::classify::{self, PeriodRange, VerdictReport};
use cohortnet::ingest::{
    descriptive_stats, match_frame, read_dataset, write_jsonl, FramePattern, ParsedDataset,
    RawRecord,
};
use cohortnet::metrics::{
    cohort_matrix, deviation_grid, period_summaries, AggregationOptions, Betweenness,
    CohortMetricsMatrix, MetricRegistry, PeriodSummary,
};
use cohortnet::synthgen::{RegimeRegistry, SyntheticDataset};
use cohortnet::temporal::{
    edge_list_file_name, sanitize_label, tweets_per_period, write_edge_list, TemporalNetwork,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{self, RunConfig};
use crate::output::{write_atomic, write_rows, write_string};
use crate::{ClassifyArgs, GenerateArgs, RunArgs};

const INDEX_FILE: &str = "analysis.json";

fn load_records(config: &RunConfig) -> Result<Vec<RawRecord>> {
    let mut all = ParsedDataset::default();
    for path in &config.inputs {
        let parsed = read_dataset(path).with_context(|| format!("reading {}", path.display()))?;
        if !parsed.errors.is_empty() {
            log::warn!(
                "{}: skipped {} malformed line(s)",
                path.display(),
                parsed.errors.len()
            );
            for e in parsed.errors.iter().take(5) {
                log::warn!("  {e}");
            }
        }
        all.extend(ParsedDataset {
            errors: Vec::new(),
            ..parsed
        });
    }
    for e in &all.errors {
        log::warn!("{e}");
    }
    Ok(all.records)
}

fn frame_records(records: &[RawRecord], frame: &FramePattern) -> Vec<RawRecord> {
    records
        .iter()
        .filter(|r| match_frame(r, frame))
        .cloned()
        .collect()
}

fn prefix(out: &Path, frame: &str, suffix: &str) -> PathBuf {
    out.join(format!("{}_{suffix}", sanitize_label(frame)))
}

pub fn stats(args: &RunArgs) -> Result<()> {
    let config = RunConfig::resolve(args, true)?;
    let records = load_records(&config)?;
    if records.is_empty() {
        log::warn!("no records in the input");
    }
    let tables: Vec<_> = config
        .frames
        .par_iter()
        .map(|frame| {
            let stats = descriptive_stats(&frame_records(&records, frame));
            if stats.total_tweets == 0 {
                log::warn!("frame {}: no matching records", frame.label);
            }
            let rows = stats
                .rows()
                .map(|(name, value)| [name.to_string(), value.to_string()]);
            write_rows(
                &prefix(&config.out, &frame.label, "stats.csv"),
                &["statistic", "value"],
                rows,
            )?;
            Ok((frame.label.clone(), stats))
        })
        .collect::<Result<_>>()?;
    for (label, stats) in tables {
        println!("{label}");
        for (name, value) in stats.rows() {
            println!("  {name:<22} {value}");
        }
    }
    Ok(())
}

/// Everything `analyze` derives for one frame.
struct Analysis {
    frame: String,
    tweets: Vec<usize>,
    incomers: Vec<usize>,
    clustering: CohortMetricsMatrix,
    betweenness: CohortMetricsMatrix,
    summaries: Vec<PeriodSummary>,
    net: TemporalNetwork,
}

fn analyze_frame(
    config: &RunConfig,
    frame: &FramePattern,
    records: &[RawRecord],
) -> Result<Option<Analysis>> {
    let matched = frame_records(records, frame);
    if matched.is_empty() {
        log::warn!("frame {}: no matching records, skipped", frame.label);
        return Ok(None);
    }
    let mut net = TemporalNetwork::build(&frame.label, &matched, config.width)?;
    if config.cumulative {
        net = net.cumulative();
    }
    let metric = MetricRegistry::default().get(&config.clustering_metric)?;
    let options = AggregationOptions {
        include_passive: config.include_passive,
    };
    Ok(Some(Analysis {
        frame: frame.label.clone(),
        tweets: tweets_per_period(&matched, &net.scheme),
        incomers: net.incomer_curve(),
        clustering: cohort_matrix(&net, metric.as_ref(), options),
        betweenness: cohort_matrix(&net, &Betweenness, options),
        summaries: period_summaries(&net),
        net,
    }))
}

fn write_matrix(path: &Path, m: &CohortMetricsMatrix) -> Result<()> {
    write_atomic(path, |out| m.write_csv(out))
}

fn write_analysis(out: &Path, a: &Analysis) -> Result<()> {
    let f = &a.frame;
    write_rows(
        &prefix(out, f, "tweets_per_period.csv"),
        &["period", "tweets"],
        a.tweets
            .iter()
            .enumerate()
            .map(|(i, n)| [(i + 1).to_string(), n.to_string()]),
    )?;
    let mut running = 0;
    write_rows(
        &prefix(out, f, "incomers.csv"),
        &["period", "incomers", "cumulative"],
        a.incomers.iter().enumerate().map(|(i, n)| {
            running += n;
            [(i + 1).to_string(), n.to_string(), running.to_string()]
        }),
    )?;
    write_matrix(&prefix(out, f, "clustering.csv"), &a.clustering)?;
    write_matrix(&prefix(out, f, "betweenness.csv"), &a.betweenness)?;
    write_matrix(
        &prefix(out, f, "betweenness_z.csv"),
        &deviation_grid(&a.betweenness),
    )?;
    write_rows(
        &prefix(out, f, "giant_component.csv"),
        &["period", "nodes", "edges", "giant_share"],
        a.summaries.iter().map(|s| {
            [
                s.period.to_string(),
                s.nodes.to_string(),
                s.edges.to_string(),
                s.giant_share.to_string(),
            ]
        }),
    )?;
    write_rows(
        &prefix(out, f, "cohorts.csv"),
        &["user", "cohort", "first_authored", "first_targeted"],
        a.net.cohorts.iter().map(|(user, e)| {
            let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
            [
                user.to_string(),
                e.cohort.to_string(),
                opt(e.first_authored),
                opt(e.first_targeted),
            ]
        }),
    )?;
    let edges = out.join("edges");
    for s in &a.net.snapshots {
        write_atomic(&edges.join(edge_list_file_name(f, s.window.index)), |w| {
            write_edge_list(s, w)
        })?;
    }
    Ok(())
}

/// Index of an `analyze` output directory.
#[derive(Debug, Serialize, Deserialize)]
struct AnalysisIndex {
    frames: Vec<String>,
    window_hours: i64,
    cumulative: bool,
    include_passive: bool,
    clustering_metric: String,
}

fn run_analyses(config: &RunConfig) -> Result<Vec<Analysis>> {
    let records = load_records(config)?;
    let analyses: Vec<Option<Analysis>> = config
        .frames
        .par_iter()
        .map(|frame| analyze_frame(config, frame, &records))
        .collect::<Result<_>>()?;
    let analyses: Vec<Analysis> = analyses.into_iter().flatten().collect();
    if analyses.is_empty() {
        bail!("no frame matched any record");
    }
    Ok(analyses)
}

pub fn analyze(args: &RunArgs) -> Result<()> {
    let config = RunConfig::resolve(args, true)?;
    let analyses = run_analyses(&config)?;
    analyses
        .par_iter()
        .try_for_each(|a| write_analysis(&config.out, a))?;
    let index = AnalysisIndex {
        frames: analyses.iter().map(|a| a.frame.clone()).collect(),
        window_hours: config.width.num_hours(),
        cumulative: config.cumulative,
        include_passive: config.include_passive,
        clustering_metric: config.clustering_metric.clone(),
    };
    write_string(
        &config.out.join(INDEX_FILE),
        &(serde_json::to_string_pretty(&index)? + "\n"),
    )?;
    for a in &analyses {
        println!(
            "{}: {} periods, {} users, {} interactions",
            a.frame,
            a.net.n_periods(),
            a.net.cohorts.len(),
            a.net.interaction_count
        );
    }
    Ok(())
}

/// The inputs the classifier needs, from memory or from analysis files.
struct ClassifierInput {
    frame: String,
    incomers: Vec<usize>,
    clustering: CohortMetricsMatrix,
    betweenness: CohortMetricsMatrix,
    summaries: Vec<PeriodSummary>,
}

fn read_csv_rows(path: &Path) -> Result<Vec<csv::StringRecord>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    csv::Reader::from_reader(file)
        .records()
        .collect::<Result<_, _>>()
        .with_context(|| format!("reading {}", path.display()))
}

fn field<T: std::str::FromStr>(row: &csv::StringRecord, i: usize, path: &Path) -> Result<T> {
    row.get(i)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| anyhow!("{}: bad value in column {}", path.display(), i + 1))
}

fn read_staged(dir: &Path, frame: &str) -> Result<ClassifierInput> {
    let matrix = |suffix: &str, metric: &str| -> Result<CohortMetricsMatrix> {
        let path = prefix(dir, frame, suffix);
        let file = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
        CohortMetricsMatrix::read_csv(metric, file)
            .with_context(|| format!("reading {}", path.display()))
    };
    let incomers_path = prefix(dir, frame, "incomers.csv");
    let incomers = read_csv_rows(&incomers_path)?
        .iter()
        .map(|row| field(row, 1, &incomers_path))
        .collect::<Result<_>>()?;
    let giant_path = prefix(dir, frame, "giant_component.csv");
    let summaries = read_csv_rows(&giant_path)?
        .iter()
        .map(|row| {
            Ok(PeriodSummary {
                period: field(row, 0, &giant_path)?,
                nodes: field(row, 1, &giant_path)?,
                edges: field(row, 2, &giant_path)?,
                giant_share: field(row, 3, &giant_path)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ClassifierInput {
        frame: frame.to_string(),
        incomers,
        clustering: matrix("clustering.csv", "clustering")?,
        betweenness: matrix("betweenness.csv", "betweenness")?,
        summaries,
    })
}

fn verdict(config: &RunConfig, input: &ClassifierInput) -> Result<VerdictReport> {
    let window: PeriodRange = match config.formation_window {
        Some(w) => w,
        None => classify::formation_window_from_curve(&input.incomers)?,
    };
    let features = classify::features_from_summaries(
        &input.summaries,
        &input.clustering,
        &input.betweenness,
        window,
        &config.thresholds,
    )?;
    Ok(VerdictReport::new(
        &input.frame,
        window,
        classify::classify(&features, &config.thresholds),
    ))
}

pub fn classify(args: &ClassifyArgs) -> Result<()> {
    let config = RunConfig::for_classify(args)?;
    let inputs: Vec<ClassifierInput> = match &args.from_analysis {
        Some(dir) => {
            let index: AnalysisIndex = config::read_structured(&dir.join(INDEX_FILE))?;
            index
                .frames
                .iter()
                .map(|f| read_staged(dir, f))
                .collect::<Result<_>>()?
        }
        None => run_analyses(&config)?
            .into_iter()
            .map(|a| ClassifierInput {
                frame: a.frame,
                incomers: a.incomers,
                clustering: a.clustering,
                betweenness: a.betweenness,
                summaries: a.summaries,
            })
            .collect(),
    };

    let results: Vec<Result<VerdictReport>> = inputs
        .par_iter()
        .map(|input| verdict(&config, input))
        .collect();
    let mut failures = Vec::new();
    for (input, result) in inputs.iter().zip(results) {
        match result {
            Ok(report) => {
                write_string(
                    &prefix(&config.out, &report.frame, "verdict.json"),
                    &(serde_json::to_string_pretty(&report)? + "\n"),
                )?;
                let summary = report.summary();
                write_string(&prefix(&config.out, &report.frame, "verdict.txt"), &summary)?;
                print!("{summary}");
            }
            Err(e) => failures.push(format!("frame {}: {e:#}", input.frame)),
        }
    }
    if !failures.is_empty() {
        bail!("{}", failures.join("; "));
    }
    Ok(())
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let spec = config::generator_spec(args)?;
    let SyntheticDataset { records, manifest } = RegimeRegistry::default().generate(&spec)?;
    let stem = format!("{}_s{}", spec.regime, spec.seed);
    let data_path = args.out.join(format!("{stem}.jsonl"));
    write_atomic(&data_path, |out| write_jsonl(&records, out))?;
    write_string(
        &args.out.join(format!("{stem}.manifest.json")),
        &(serde_json::to_string_pretty(&manifest)? + "\n"),
    )?;
    println!(
        "{}: {} records, {} users, {} interactions",
        data_path.display(),
        manifest.records,
        manifest.users,
        manifest.events
    );
    Ok(())
}
