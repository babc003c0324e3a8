use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::metrics::Measure;
use crate::report::ScoreReport;

/// Systems × measures score grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    systems: Vec<String>,
    measures: Vec<Measure>,
    /// `values[s][j]` is the score of system `s` under `measures[j]`.
    values: Vec<Vec<f64>>,
}

impl ScoreTable {
    pub fn new(systems: Vec<String>, measures: Vec<Measure>, values: Vec<Vec<f64>>) -> Result<Self> {
        if values.len() != systems.len() {
            return Err(Error::Schema(format!("{} systems but {} score rows", systems.len(), values.len())));
        }
        for (s, row) in systems.iter().zip(&values) {
            if row.len() != measures.len() {
                return Err(Error::Schema(format!("system {s}: {} scores for {} measures", row.len(), measures.len())));
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Schema(format!("system {s}: {} is not finite", measures[j])));
            }
        }
        Ok(Self { systems, measures, values })
    }

    /// Builds a table from reports, keeping the measures every report has
    /// (in the order of the first one).
    pub fn from_reports(reports: &[ScoreReport]) -> Result<Self> {
        if reports.len() < 2 {
            return Err(Error::UndefinedCorrelation(format!(
                "need at least 2 systems, got {}",
                reports.len()
            )));
        }
        let measures: Vec<Measure> = reports[0]
            .measures()
            .filter(|&m| reports.iter().all(|r| r.get(m).is_some()))
            .collect();
        let values = reports
            .iter()
            .map(|r| measures.iter().map(|&m| r.get(m).expect("filtered")).collect())
            .collect();
        Self::new(reports.iter().map(|r| r.label.clone()).collect(), measures, values)
    }

    pub fn systems(&self) -> &[String] {
        &self.systems
    }

    pub fn measures(&self) -> &[Measure] {
        &self.measures
    }

    pub fn value(&self, system: usize, measure: usize) -> f64 {
        self.values[system][measure]
    }

    /// Scores of one measure across systems, sign-flipped for measures where
    /// lower is better so that larger always means "ranked better".
    pub fn oriented_column(&self, measure: usize) -> Vec<f64> {
        let sign = if self.measures[measure].higher_is_better() { 1.0 } else { -1.0 };
        self.values.iter().map(|row| sign * row[measure]).collect()
    }
}

/// Kendall's tau-b between two score vectors.
///
/// Knight's algorithm: sort by `(a, b)`, count ties, and count discordant
/// pairs as the inversions of `b` in that order.
pub fn kendall_tau(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::UndefinedCorrelation(format!("lengths differ ({} vs {})", a.len(), b.len())));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::UndefinedCorrelation("need at least 2 systems".into()));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(Error::UndefinedCorrelation("non-finite score".into()));
    }
    let cmp = |x: f64, y: f64| x.partial_cmp(&y).expect("finite");
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| cmp(a[i], a[j]).then(cmp(b[i], b[j])));

    let pairs = |t: u64| t * (t - 1) / 2;
    let tie_pairs = |same: &dyn Fn(usize, usize) -> bool, order: &[usize]| -> u64 {
        let mut total = 0;
        let mut run = 1u64;
        for w in order.windows(2) {
            if same(w[0], w[1]) {
                run += 1;
            } else {
                total += pairs(run);
                run = 1;
            }
        }
        total + pairs(run)
    };
    let ties_a = tie_pairs(&|i, j| a[i] == a[j], &idx);
    let ties_ab = tie_pairs(&|i, j| a[i] == a[j] && b[i] == b[j], &idx);

    let mut seq: Vec<f64> = idx.iter().map(|&i| b[i]).collect();
    let discordant = count_inversions(&mut seq);
    // seq is now sorted by b
    let ties_b = {
        let order: Vec<usize> = (0..n).collect();
        tie_pairs(&|i, j| seq[i] == seq[j], &order)
    };

    let total = pairs(n as u64);
    if ties_a == total || ties_b == total {
        return Err(Error::UndefinedCorrelation("all scores tied on one side".into()));
    }
    let numerator = total as f64 - ties_a as f64 - ties_b as f64 + ties_ab as f64 - 2.0 * discordant as f64;
    let denominator = ((total - ties_a) as f64 * (total - ties_b) as f64).sqrt();
    Ok(numerator / denominator)
}

/// Sorts `v` and returns the number of strict inversions.
fn count_inversions(v: &mut [f64]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mut buf = v.to_vec();
    let mut inversions = 0;
    let mut width = 1;
    while width < n {
        let mut start = 0;
        while start < n {
            let mid = (start + width).min(n);
            let end = (start + 2 * width).min(n);
            let (mut i, mut j, mut o) = (start, mid, start);
            while i < mid && j < end {
                if v[j] < v[i] {
                    buf[o] = v[j];
                    inversions += (mid - i) as u64;
                    j += 1;
                } else {
                    buf[o] = v[i];
                    i += 1;
                }
                o += 1;
            }
            buf[o..o + mid - i].copy_from_slice(&v[i..mid]);
            o += mid - i;
            buf[o..o + end - j].copy_from_slice(&v[j..end]);
            start = end;
        }
        v.copy_from_slice(&buf);
        width *= 2;
    }
    inversions
}

/// Measure × measure tau-b matrix. Cells where tau is undefined (a measure
/// ties every system) are `None`; the diagonal is always 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub measures: Vec<Measure>,
    pub tau: Vec<Vec<Option<f64>>>,
}

impl CorrelationMatrix {
    pub fn get(&self, a: Measure, b: Measure) -> Option<f64> {
        let i = self.measures.iter().position(|&m| m == a)?;
        let j = self.measures.iter().position(|&m| m == b)?;
        self.tau[i][j]
    }

    /// Square CSV with a header row of measure names; undefined cells are empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["measure".to_owned()];
        header.extend(self.measures.iter().map(|m| m.name().to_owned()));
        w.write_record(&header)?;
        for (m, row) in self.measures.iter().zip(&self.tau) {
            let mut record = vec![m.name().to_owned()];
            record.extend(row.iter().map(|c| c.map(|t| t.to_string()).unwrap_or_default()));
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }
}

/// Kendall's tau-b between the system orderings induced by every pair of
/// measures (best-first for each measure's orientation).
pub fn correlation_matrix(table: &ScoreTable) -> CorrelationMatrix {
    let d = table.measures.len();
    let columns: Vec<Vec<f64>> = (0..d).map(|j| table.oriented_column(j)).collect();
    let mut tau = vec![vec![None; d]; d];
    for i in 0..d {
        tau[i][i] = Some(1.0);
        for j in i + 1..d {
            let t = kendall_tau(&columns[i], &columns[j]).ok();
            tau[i][j] = t;
            tau[j][i] = t;
        }
    }
    CorrelationMatrix {
        measures: table.measures.clone(),
        tau,
    }
}
