//! Hypothesis scoring from cohort clustering and betweenness patterns.
//!
//! | hypothesis | clustering within cohorts | betweenness                         |
//! |------------|---------------------------|-------------------------------------|
//! | H0         | high                      | first incomers hold the highest BC  |
//! | H1         | high                      | high-BC cohorts change over periods |
//! | H2         | low                       | BC homogeneous across cohorts       |
//!
//! Each condition becomes a linear ramp reaching 1 at twice its threshold,
//! conjunctions take the minimum, and near-ties are reported as
//! inconclusive rather than forced into a label.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{deviation_grid, period_summaries, CohortMetricsMatrix, PeriodSummary};
use crate::temporal::TemporalNetwork;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid period range {0:?}")]
    InvalidRange(String),
}

/// Inclusive 1-based period range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodRange {
    pub start: usize,
    pub end: usize,
}

impl PeriodRange {
    pub fn new(start: usize, end: usize) -> Result<Self, ClassifyError> {
        if start == 0 || end < start {
            return Err(ClassifyError::InvalidRange(format!("{start}..{end}")));
        }
        Ok(PeriodRange { start, end })
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn periods(&self) -> impl Iterator<Item = usize> {
        self.start..=self.end
    }
}

impl fmt::Display for PeriodRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

impl FromStr for PeriodRange {
    type Err = ClassifyError;

    /// Accepts `a..b`, `a..=b` or `a-b`, all inclusive.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ClassifyError::InvalidRange(s.to_string());
        let (a, b) = s
            .split_once("..=")
            .or_else(|| s.split_once(".."))
            .or_else(|| s.split_once('-'))
            .ok_or_else(bad)?;
        let start = a.trim().parse().map_err(|_| bad())?;
        let end = b.trim().parse().map_err(|_| bad())?;
        PeriodRange::new(start, end)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Thresholds {
    /// Clustering relative to a density-matched random graph.
    pub clustering_high: f64,
    pub dominance: f64,
    pub takeover: f64,
    /// Coefficient of variation.
    pub homogeneity: f64,
    /// Minimum gap between the two best scores for a definite label.
    pub inconclusive_gap: f64,
    /// A new column leader counts as a takeover when it arrived fewer than
    /// this many periods ago.
    pub takeover_recency: usize,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            clustering_high: 2.0,
            dominance: 0.5,
            takeover: 2.0,
            homogeneity: 0.5,
            inconclusive_gap: 0.1,
            takeover_recency: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvidenceFeatures {
    /// Median over periods of mean cohort clustering divided by the
    /// period's edge density.
    pub clustering_level: f64,
    /// Share of periods where cohort 1 holds the top betweenness z-score.
    pub first_cohort_dominance: f64,
    /// Leadership changes to a recently arrived cohort.
    pub takeover_events: usize,
    /// Median over periods of the coefficient of variation of cohort
    /// betweenness.
    pub bc_homogeneity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    H0,
    H1,
    H2,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::H0 => "H0",
            Label::H1 => "H1",
            Label::H2 => "H2",
            Label::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub h0: f64,
    pub h1: f64,
    pub h2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisVerdict {
    pub scores: Scores,
    pub label: Label,
    pub features: EvidenceFeatures,
    pub thresholds: Thresholds,
}

fn median(mut values: Vec<f64>) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

/// Cohort with the highest z-score in a period; ties go to the earliest
/// cohort.
fn column_leader(z: &CohortMetricsMatrix, period: usize) -> Option<usize> {
    z.column(period)
        .into_iter()
        .fold(None, |best: Option<(usize, f64)>, (c, v)| match best {
            Some((_, bv)) if bv >= v => best,
            _ => Some((c, v)),
        })
        .map(|(c, _)| c)
}

fn coefficient_of_variation(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if mean <= 0.0 {
        return 0.0;
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    var.sqrt() / mean
}

/// Computes the evidence features from per-period projection sizes and the
/// two cohort matrices.
pub fn features_from_summaries(
    periods: &[PeriodSummary],
    clustering: &CohortMetricsMatrix,
    bc: &CohortMetricsMatrix,
    window: PeriodRange,
    thresholds: &Thresholds,
) -> Result<EvidenceFeatures, ClassifyError> {
    let n_periods = bc.n_periods();
    if n_periods < 3 {
        return Err(ClassifyError::InsufficientData(format!(
            "{n_periods} period(s); at least 3 are needed"
        )));
    }
    if bc.populated_cohorts() < 2 {
        return Err(ClassifyError::InsufficientData(format!(
            "{} populated cohort(s); at least 2 are needed",
            bc.populated_cohorts()
        )));
    }
    if clustering.n_periods() != n_periods || periods.len() != n_periods {
        return Err(ClassifyError::InsufficientData(
            "clustering, betweenness and period summaries disagree on period count".into(),
        ));
    }
    if window.end > n_periods {
        return Err(ClassifyError::InvalidRange(format!(
            "{window} exceeds {n_periods} periods"
        )));
    }

    let ratios: Vec<f64> = window
        .periods()
        .filter_map(|p| {
            let baseline = periods[p - 1].density();
            let observed = clustering.column_mean(p)?;
            (baseline > 0.0).then(|| observed / baseline)
        })
        .collect();
    let clustering_level = median(ratios);

    let z = deviation_grid(bc);
    let leaders: Vec<Option<usize>> = window.periods().map(|p| column_leader(&z, p)).collect();
    let dominated = leaders.iter().filter(|l| **l == Some(1)).count();
    let first_cohort_dominance = dominated as f64 / window.len() as f64;

    let takeover_events = window
        .periods()
        .zip(&leaders)
        .zip(leaders.iter().skip(1))
        .filter(|((_, prev), cur)| cur.is_some() && prev.is_some() && prev != cur)
        .filter(|((p, _), cur)| {
            let period = p + 1;
            let cohort = cur.expect("checked");
            period.saturating_sub(cohort) < thresholds.takeover_recency
        })
        .count();

    let cvs: Vec<f64> = window
        .periods()
        .filter_map(|p| {
            let values: Vec<f64> = bc.column(p).into_iter().map(|(_, v)| v).collect();
            (!values.is_empty()).then(|| coefficient_of_variation(&values))
        })
        .collect();
    let bc_homogeneity = median(cvs);

    Ok(EvidenceFeatures {
        clustering_level,
        first_cohort_dominance,
        takeover_events,
        bc_homogeneity,
    })
}

pub fn extract_features(
    net: &TemporalNetwork,
    clustering: &CohortMetricsMatrix,
    bc: &CohortMetricsMatrix,
    window: PeriodRange,
    thresholds: &Thresholds,
) -> Result<EvidenceFeatures, ClassifyError> {
    features_from_summaries(&period_summaries(net), clustering, bc, window, thresholds)
}

/// 0 at zero, 1 at twice the threshold and beyond.
fn ramp(value: f64, threshold: f64) -> f64 {
    if threshold <= 0.0 {
        return if value > 0.0 { 1.0 } else { 0.0 };
    }
    (value / (2.0 * threshold)).clamp(0.0, 1.0)
}

pub fn classify(features: &EvidenceFeatures, thresholds: &Thresholds) -> HypothesisVerdict {
    let clustered = ramp(features.clustering_level, thresholds.clustering_high);
    let dominant = ramp(features.first_cohort_dominance, thresholds.dominance);
    let takeovers = ramp(features.takeover_events as f64, thresholds.takeover);
    let heterogeneous = ramp(features.bc_homogeneity, thresholds.homogeneity);

    let scores = Scores {
        h0: clustered.min(dominant),
        h1: clustered.min(takeovers).min(1.0 - dominant),
        h2: (1.0 - clustered).min(1.0 - heterogeneous),
    };
    let mut ranked = [
        (Label::H0, scores.h0),
        (Label::H1, scores.h1),
        (Label::H2, scores.h2),
    ];
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1));
    let label = if ranked[0].1 - ranked[1].1 < thresholds.inconclusive_gap {
        Label::Inconclusive
    } else {
        ranked[0].0
    };
    HypothesisVerdict {
        scores,
        label,
        features: *features,
        thresholds: *thresholds,
    }
}

/// Periods 1 through the first period whose incomer count drops below 10%
/// of the running per-period average of users seen so far; never shorter
/// than three periods.
pub fn formation_window_from_curve(incomers: &[usize]) -> Result<PeriodRange, ClassifyError> {
    let n = incomers.len();
    if n < 3 {
        return Err(ClassifyError::InsufficientData(format!(
            "{n} period(s); at least 3 are needed for a formation window"
        )));
    }
    let mut total = 0usize;
    let mut end = n;
    for (i, &count) in incomers.iter().enumerate() {
        let k = i + 1;
        total += count;
        if (count as f64) < 0.1 * total as f64 / k as f64 {
            end = k;
            break;
        }
    }
    PeriodRange::new(1, end.max(3))
}

pub fn formation_window_detect(net: &TemporalNetwork) -> Result<PeriodRange, ClassifyError> {
    formation_window_from_curve(&net.incomer_curve())
}

/// Everything a verdict file carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub frame: String,
    pub window: PeriodRange,
    pub label: Label,
    pub scores: Scores,
    pub features: EvidenceFeatures,
    pub thresholds: Thresholds,
}

impl VerdictReport {
    pub fn new(frame: &str, window: PeriodRange, verdict: HypothesisVerdict) -> Self {
        VerdictReport {
            frame: frame.to_string(),
            window,
            label: verdict.label,
            scores: verdict.scores,
            features: verdict.features,
            thresholds: verdict.thresholds,
        }
    }

    pub fn summary(&self) -> String {
        let f = &self.features;
        let t = &self.thresholds;
        format!(
            "frame {frame}: {label}\n\
             formation window: periods {window}\n\
             scores: H0 {h0:.3}  H1 {h1:.3}  H2 {h2:.3}\n\
             clustering level      {cl:.3} (high at >= {tcl})\n\
             first-cohort dominance {dom:.3} (threshold {tdom})\n\
             takeover events       {tk} (threshold {ttk})\n\
             BC homogeneity (CV)   {hom:.3} (homogeneous at <= {thom})\n",
            frame = self.frame,
            label = self.label,
            window = self.window,
            h0 = self.scores.h0,
            h1 = self.scores.h1,
            h2 = self.scores.h2,
            cl = f.clustering_level,
            tcl = t.clustering_high,
            dom = f.first_cohort_dominance,
            tdom = t.dominance,
            tk = f.takeover_events,
            ttk = t.takeover,
            hom = f.bc_homogeneity,
            thom = t.homogeneity,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn features(cl: f64, dom: f64, tk: usize, hom: f64) -> EvidenceFeatures {
        EvidenceFeatures {
            clustering_level: cl,
            first_cohort_dominance: dom,
            takeover_events: tk,
            bc_homogeneity: hom,
        }
    }

    #[test]
    fn rule_examples() {
        let t = Thresholds::default();
        assert_eq!(classify(&features(3.0, 0.9, 0, 0.8), &t).label, Label::H0);
        assert_eq!(classify(&features(3.0, 0.2, 4, 1.5), &t).label, Label::H1);
        assert_eq!(classify(&features(0.8, 0.3, 1, 0.2), &t).label, Label::H2);
    }

    #[test]
    fn ramp_scores() {
        let v = classify(&features(3.0, 0.9, 0, 0.8), &Thresholds::default());
        assert!((v.scores.h0 - 0.75).abs() < 1e-12);
        assert_eq!(v.scores.h1, 0.0);
        assert!((v.scores.h2 - 0.2).abs() < 1e-12);
        assert_eq!(v.thresholds, Thresholds::default());
    }

    #[test]
    fn near_boundary_is_inconclusive() {
        // clustering right at the threshold: H0 = 0.5, H2 = 0.5
        let v = classify(&features(2.0, 1.0, 0, 0.0), &Thresholds::default());
        assert_eq!(v.label, Label::Inconclusive);
        // H0 and H1 both moderate
        let v = classify(&features(4.0, 0.5, 4, 2.0), &Thresholds::default());
        assert_eq!(v.label, Label::Inconclusive);
    }

    fn matrix(rows: Vec<Vec<Option<f64>>>) -> CohortMetricsMatrix {
        CohortMetricsMatrix::from_rows("bc", rows).unwrap()
    }

    fn flat_summaries(n: usize) -> Vec<PeriodSummary> {
        (1..=n)
            .map(|p| PeriodSummary {
                period: p,
                nodes: 10,
                edges: 9,
                giant_share: 1.0,
            })
            .collect()
    }

    #[test]
    fn dominance_counts_leader_periods() {
        // cohort 1 leads in 9 of 10 periods, cohort 2 leads period 10
        let row1 = (1..=10)
            .map(|p| Some(if p == 10 { 0.1 } else { 0.5 }))
            .collect();
        let row2 = (1..=10).map(|_| Some(0.2)).collect();
        let bc = matrix(vec![row1, row2]);
        let cl = bc.clone();
        let f = features_from_summaries(
            &flat_summaries(10),
            &cl,
            &bc,
            PeriodRange::new(1, 10).unwrap(),
            &Thresholds::default(),
        )
        .unwrap();
        assert!((f.first_cohort_dominance - 0.9).abs() < 1e-12);
        // cohort 2 arrived long before period 10
        assert_eq!(f.takeover_events, 0);
    }

    #[test]
    fn homogeneous_matrix() {
        let rows = vec![vec![Some(0.3); 5], vec![Some(0.3); 5], vec![Some(0.3); 5]];
        let bc = matrix(rows);
        let f = features_from_summaries(
            &flat_summaries(5),
            &bc,
            &bc,
            PeriodRange::new(1, 5).unwrap(),
            &Thresholds::default(),
        )
        .unwrap();
        assert_eq!(f.bc_homogeneity, 0.0);
        assert_eq!(f.takeover_events, 0);
        assert_eq!(f.first_cohort_dominance, 1.0);
    }

    #[test]
    fn takeover_requires_recent_arrival() {
        // leader sequence: 1, 1, 3, 3, 2, 5
        let bc = matrix(vec![
            vec![
                Some(9.0),
                Some(9.0),
                Some(1.0),
                Some(1.0),
                Some(1.0),
                Some(1.0),
            ],
            vec![None, Some(1.0), Some(1.0), Some(1.0), Some(9.0), Some(1.0)],
            vec![None, None, Some(9.0), Some(9.0), Some(1.0), Some(1.0)],
            vec![None; 6],
            vec![None, None, None, None, Some(1.0), Some(9.0)],
            vec![None; 6],
        ]);
        let f = features_from_summaries(
            &flat_summaries(6),
            &bc,
            &bc,
            PeriodRange::new(1, 6).unwrap(),
            &Thresholds::default(),
        )
        .unwrap();
        // 1 -> 3 at period 3 counts, 3 -> 2 at 5 does not, 2 -> 5 at 6 counts
        assert_eq!(f.takeover_events, 2);
    }

    #[test]
    fn clustering_level_is_ratio_to_density() {
        let cl = matrix(vec![vec![Some(0.4); 3], vec![Some(0.2); 3]]);
        let bc = matrix(vec![vec![Some(0.1); 3], vec![Some(0.1); 3]]);
        // density of 10 nodes / 9 edges = 0.2; mean cohort clustering 0.3
        let f = features_from_summaries(
            &flat_summaries(3),
            &cl,
            &bc,
            PeriodRange::new(1, 3).unwrap(),
            &Thresholds::default(),
        )
        .unwrap();
        assert!((f.clustering_level - 1.5).abs() < 1e-12);
    }

    #[test]
    fn insufficient_data() {
        let bc = matrix(vec![vec![Some(1.0), Some(1.0)], vec![Some(1.0), Some(1.0)]]);
        let err = features_from_summaries(
            &flat_summaries(2),
            &bc,
            &bc,
            PeriodRange::new(1, 2).unwrap(),
            &Thresholds::default(),
        );
        assert!(matches!(err, Err(ClassifyError::InsufficientData(_))));
        let bc = matrix(vec![vec![Some(1.0); 4], vec![None; 4]]);
        let err = features_from_summaries(
            &flat_summaries(4),
            &bc,
            &bc,
            PeriodRange::new(1, 4).unwrap(),
            &Thresholds::default(),
        );
        assert!(matches!(err, Err(ClassifyError::InsufficientData(_))));
    }

    #[test]
    fn formation_window_rule() {
        let curve = [100, 50, 25, 12, 3, 1, 1, 1];
        assert_eq!(
            formation_window_from_curve(&curve).unwrap(),
            PeriodRange::new(1, 5).unwrap()
        );
        assert_eq!(
            formation_window_from_curve(&[7; 12]).unwrap(),
            PeriodRange::new(1, 12).unwrap()
        );
        // an early cutoff is stretched to three periods
        assert_eq!(
            formation_window_from_curve(&[100, 0, 0, 0]).unwrap(),
            PeriodRange::new(1, 3).unwrap()
        );
        assert!(formation_window_from_curve(&[5, 5]).is_err());
    }

    #[test]
    fn period_range_parsing() {
        assert_eq!(
            "1..20".parse::<PeriodRange>().unwrap(),
            PeriodRange::new(1, 20).unwrap()
        );
        assert_eq!("2..=4".parse::<PeriodRange>().unwrap().len(), 3);
        assert_eq!("3-5".parse::<PeriodRange>().unwrap().to_string(), "3..5");
        assert!("5..2".parse::<PeriodRange>().is_err());
        assert!("0..2".parse::<PeriodRange>().is_err());
    }
}
