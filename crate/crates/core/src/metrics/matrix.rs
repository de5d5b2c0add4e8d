use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::MetricsError;

/// Cohort × period grid of a metric. Row `c - 1` is cohort `c`, column
/// `p - 1` is period `p`; `None` where the cohort had no active member.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortMetricsMatrix {
    pub metric: String,
    values: Vec<Vec<Option<f64>>>,
    periods: usize,
}

impl CohortMetricsMatrix {
    pub fn new(metric: &str, cohorts: usize, periods: usize) -> Self {
        CohortMetricsMatrix {
            metric: metric.to_string(),
            values: vec![vec![None; periods]; cohorts],
            periods,
        }
    }

    /// From explicit rows; all rows must have the same length and defined
    /// cells must be finite.
    pub fn from_rows(metric: &str, rows: Vec<Vec<Option<f64>>>) -> Result<Self, MetricsError> {
        let periods = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != periods) {
            return Err(MetricsError::Shape("ragged matrix rows".into()));
        }
        if rows.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(MetricsError::Shape("non-finite cell".into()));
        }
        Ok(CohortMetricsMatrix {
            metric: metric.to_string(),
            values: rows,
            periods,
        })
    }

    pub fn n_cohorts(&self) -> usize {
        self.values.len()
    }

    pub fn n_periods(&self) -> usize {
        self.periods
    }

    /// 1-based cohort and period.
    pub fn get(&self, cohort: usize, period: usize) -> Option<f64> {
        self.values
            .get(cohort.wrapping_sub(1))?
            .get(period.wrapping_sub(1))
            .copied()
            .flatten()
    }

    pub fn set(&mut self, cohort: usize, period: usize, value: Option<f64>) {
        debug_assert!(value.is_none_or(f64::is_finite));
        self.values[cohort - 1][period - 1] = value;
    }

    pub fn rows(&self) -> &[Vec<Option<f64>>] {
        &self.values
    }

    /// Defined cells of a period as `(cohort, value)`.
    pub fn column(&self, period: usize) -> Vec<(usize, f64)> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(c, row)| row[period - 1].map(|v| (c + 1, v)))
            .collect()
    }

    pub fn column_mean(&self, period: usize) -> Option<f64> {
        let col = self.column(period);
        (!col.is_empty()).then(|| col.iter().map(|(_, v)| v).sum::<f64>() / col.len() as f64)
    }

    /// Population standard deviation over defined cells.
    pub fn column_std(&self, period: usize) -> Option<f64> {
        let col = self.column(period);
        let mean = self.column_mean(period)?;
        let var = col.iter().map(|(_, v)| (v - mean).powi(2)).sum::<f64>() / col.len() as f64;
        Some(var.sqrt())
    }

    /// Cohorts with at least one defined cell.
    pub fn populated_cohorts(&self) -> usize {
        self.values
            .iter()
            .filter(|r| r.iter().any(Option::is_some))
            .count()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for v in out.values.iter_mut().flatten().flatten() {
            *v *= factor;
        }
        out
    }

    /// Writes the grid as `cohort,p1,..,pN` rows; missing cells are empty.
    pub fn write_csv<W: Write>(&self, out: W) -> std::io::Result<()> {
        let mut csv = csv::Writer::from_writer(out);
        let header: Vec<String> = std::iter::once("cohort".to_string())
            .chain((1..=self.periods).map(|p| format!("p{p}")))
            .collect();
        csv.write_record(&header)?;
        for (c, row) in self.values.iter().enumerate() {
            let fields: Vec<String> = std::iter::once((c + 1).to_string())
                .chain(
                    row.iter()
                        .map(|v| v.map(|x| x.to_string()).unwrap_or_default()),
                )
                .collect();
            csv.write_record(&fields)?;
        }
        csv.flush()
    }

    pub fn read_csv<R: Read>(metric: &str, input: R) -> Result<Self, MetricsError> {
        let mut csv = csv::Reader::from_reader(input);
        let bad = |e: csv::Error| MetricsError::Shape(e.to_string());
        let periods = csv.headers().map_err(bad)?.len().saturating_sub(1);
        let mut rows = Vec::new();
        for (i, record) in csv.records().enumerate() {
            let record = record.map_err(bad)?;
            let label: usize = record
                .get(0)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| MetricsError::Shape(format!("row {} has no cohort label", i + 1)))?;
            if label != i + 1 {
                return Err(MetricsError::Shape(format!(
                    "expected cohort {} got {label}",
                    i + 1
                )));
            }
            let row = record
                .iter()
                .skip(1)
                .map(|cell| match cell.trim() {
                    "" => Ok(None),
                    s => s
                        .parse::<f64>()
                        .map(Some)
                        .map_err(|_| MetricsError::Shape(format!("bad cell {s:?}"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != periods {
                return Err(MetricsError::Shape("ragged matrix rows".into()));
            }
            rows.push(row);
        }
        Self::from_rows(metric, rows)
    }
}

/// Per-column z-scores `(value - mean) / std` over defined cells. Missing
/// cells stay missing; zero-variance columns map to 0.
pub fn deviation_grid(m: &CohortMetricsMatrix) -> CohortMetricsMatrix {
    let mut z = CohortMetricsMatrix::new(&format!("{}_z", m.metric), m.n_cohorts(), m.n_periods());
    for p in 1..=m.n_periods() {
        let (Some(mean), Some(std)) = (m.column_mean(p), m.column_std(p)) else {
            continue;
        };
        for (c, v) in m.column(p) {
            let score = if std > 0.0 { (v - mean) / std } else { 0.0 };
            z.set(c, p, Some(score));
        }
    }
    z
}
