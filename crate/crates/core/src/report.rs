//! Score reports: what `eval`, `sliding` and `insertion` emit.
//!
//! JSON carries everything; CSV is one row per measure
//! (`label,measure,value,higher_is_better`). Values are written with the
//! shortest representation that round-trips, so nothing is lost.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{Diagnostics, Evaluation, JointConfig, Measure};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreEntry {
    pub measure: Measure,
    pub value: f64,
    pub higher_is_better: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub label: String,
    pub config: JointConfig,
    pub scores: Vec<ScoreEntry>,
    #[serde(default)]
    pub diagnostics: Diagnostics,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl ScoreReport {
    pub fn from_evaluation(label: impl Into<String>, config: JointConfig, eval: Evaluation) -> Self {
        let scores = eval
            .scores
            .into_iter()
            .map(|(measure, value)| ScoreEntry {
                measure,
                value,
                higher_is_better: measure.higher_is_better(),
            })
            .collect();
        Self {
            label: label.into(),
            config,
            scores,
            diagnostics: eval.diagnostics,
            warnings: Vec::new(),
        }
    }

    pub fn get(&self, measure: Measure) -> Option<f64> {
        self.scores.iter().find(|s| s.measure == measure).map(|s| s.value)
    }

    pub fn measures(&self) -> impl Iterator<Item = Measure> + '_ {
        self.scores.iter().map(|s| s.measure)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let report: ScoreReport = serde_json::from_str(text)?;
        report.check()?;
        Ok(report)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["label", "measure", "value", "higher_is_better"])?;
        for s in &self.scores {
            w.write_record([
                self.label.as_str(),
                s.measure.name(),
                &s.value.to_string(),
                if s.higher_is_better { "true" } else { "false" },
            ])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    /// Reads the CSV form back. The CSV does not carry the configuration or
    /// diagnostics, so those come back as defaults.
    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let mut label = None;
        let mut scores = Vec::new();
        for (row, record) in r.records().enumerate() {
            let record = record?;
            let line = row + 2;
            if record.len() < 3 {
                return Err(Error::Parse {
                    line,
                    message: "expected label,measure,value[,higher_is_better]".into(),
                });
            }
            let measure: Measure = record[1].parse()?;
            let value: f64 = record[2].trim().parse().map_err(|_| Error::Parse {
                line,
                message: format!("bad value {:?}", &record[2]),
            })?;
            label.get_or_insert_with(|| record[0].to_owned());
            scores.push(ScoreEntry {
                measure,
                value,
                higher_is_better: measure.higher_is_better(),
            });
        }
        let report = ScoreReport {
            label: label.unwrap_or_default(),
            config: JointConfig::default(),
            scores,
            diagnostics: Diagnostics::default(),
            warnings: Vec::new(),
        };
        report.check()?;
        Ok(report)
    }

    /// Loads a report, picking the format from the extension (`.csv`, else JSON).
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            Self::read_csv(text.as_bytes())
        } else {
            Self::from_json(&text)
        }
    }

    fn check(&self) -> Result<()> {
        for (i, s) in self.scores.iter().enumerate() {
            if !s.value.is_finite() {
                return Err(Error::Schema(format!("{} is not finite in report {:?}", s.measure, self.label)));
            }
            if self.scores[..i].iter().any(|t| t.measure == s.measure) {
                return Err(Error::Schema(format!("{} appears twice in report {:?}", s.measure, self.label)));
            }
        }
        Ok(())
    }
}
