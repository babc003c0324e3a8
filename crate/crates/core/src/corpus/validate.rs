use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::{RelevanceTable, RunData};

/// Result of checking a run against a relevance table.
///
/// Structural problems (gaps, duplicates) are rejected when the run is
/// loaded, so this only covers cross-file issues.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    /// Run users absent from the relevance table; joint evaluation fails on these.
    pub unknown_users: Vec<String>,
    /// Run items absent from the relevance table; treated as grade 0.
    pub unknown_items: Vec<String>,
    /// List depth -> number of (user, round) lists with that depth.
    pub depth_histogram: BTreeMap<usize, usize>,
    /// Users whose relevance table row has no positive grade.
    pub users_without_relevant: usize,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.unknown_users.is_empty() && self.unknown_items.is_empty()
    }
}

pub fn validate(run: &RunData, rel: &RelevanceTable) -> ValidationReport {
    let mut report = ValidationReport::default();
    for (u, name) in run.users().names().iter().enumerate() {
        match rel.users().get(name) {
            None => report.unknown_users.push(name.clone()),
            Some(ru) if rel.num_relevant(ru) == 0 => report.users_without_relevant += 1,
            Some(_) => {}
        }
        for list in run.user_lists(u) {
            *report.depth_histogram.entry(list.len()).or_default() += 1;
        }
    }
    let mut used = vec![false; run.items().len()];
    for list in run.lists().iter().flatten() {
        for &i in list.items() {
            used[i as usize] = true;
        }
    }
    for (i, name) in run.items().names().iter().enumerate() {
        if used[i] && rel.items().get(name).is_none() {
            report.unknown_items.push(name.clone());
        }
    }
    if !report.unknown_users.is_empty() {
        report.warnings.push(format!(
            "{} run users are missing from the relevance table",
            report.unknown_users.len()
        ));
    }
    if !report.unknown_items.is_empty() {
        report.warnings.push(format!(
            "{} run items are missing from the relevance table and count as grade 0",
            report.unknown_items.len()
        ));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_item_is_warning() {
        let run = RunData::from_single_round(vec![("u", vec!["a", "zz"])]).unwrap();
        let rel = RelevanceTable::from_triples([("u", "a", 1.0)]).unwrap();
        let r = validate(&run, &rel);
        assert_eq!(r.unknown_items, vec!["zz".to_string()]);
        assert!(r.unknown_users.is_empty());
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn depth_histogram() {
        let run = RunData::from_single_round(vec![("u", vec!["a", "b"]), ("v", vec!["a", "b"]), ("w", vec!["a"])])
            .unwrap();
        let rel = RelevanceTable::from_triples([("u", "a", 1.0), ("v", "a", 0.0), ("w", "b", 1.0)]).unwrap();
        let r = validate(&run, &rel);
        assert!(r.is_clean());
        assert_eq!(r.depth_histogram, BTreeMap::from([(1, 1), (2, 2)]));
        assert_eq!(r.users_without_relevant, 1);
    }
}
