//! Raw user-item interactions and dataset preprocessing.

use std::collections::HashMap;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum number of train interactions a user needs to stay in a split.
pub const MIN_TRAIN_INTERACTIONS: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub user: String,
    pub item: String,
    pub rating: Option<f64>,
    pub timestamp: Option<i64>,
}

impl Interaction {
    pub fn new(user: impl Into<String>, item: impl Into<String>) -> Self {
        Self {
            user: user.into(),
            item: item.into(),
            rating: None,
            timestamp: None,
        }
    }

    pub fn rated(mut self, rating: f64) -> Self {
        self.rating = Some(rating);
        self
    }

    pub fn at(mut self, timestamp: i64) -> Self {
        self.timestamp = Some(timestamp);
        self
    }
}

/// A column given either by 0-based position or by header name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    Index(usize),
    Name(String),
}

impl From<usize> for Column {
    fn from(i: usize) -> Self {
        Column::Index(i)
    }
}

impl From<&str> for Column {
    fn from(s: &str) -> Self {
        Column::Name(s.to_owned())
    }
}

/// Layout of a delimited interactions file.
#[derive(Debug, Clone)]
pub struct ColumnSchema {
    pub delimiter: u8,
    pub has_header: bool,
    pub user: Column,
    pub item: Column,
    pub rating: Option<Column>,
    pub timestamp: Option<Column>,
    /// Inclusive range ratings must fall in.
    pub rating_range: Option<(f64, f64)>,
}

impl ColumnSchema {
    /// Tab-separated `user item [rating] [timestamp]` with a header row.
    pub fn tsv() -> Self {
        Self {
            delimiter: b'\t',
            has_header: true,
            user: Column::Index(0),
            item: Column::Index(1),
            rating: None,
            timestamp: None,
            rating_range: None,
        }
    }

    pub fn csv() -> Self {
        Self {
            delimiter: b',',
            ..Self::tsv()
        }
    }

    pub fn with_rating(mut self, col: impl Into<Column>) -> Self {
        self.rating = Some(col.into());
        self
    }

    pub fn with_timestamp(mut self, col: impl Into<Column>) -> Self {
        self.timestamp = Some(col.into());
        self
    }

    pub fn with_rating_range(mut self, lo: f64, hi: f64) -> Self {
        self.rating_range = Some((lo, hi));
        self
    }
}

fn resolve(col: &Column, header: Option<&csv::StringRecord>) -> Result<usize> {
    match col {
        Column::Index(i) => Ok(*i),
        Column::Name(name) => header
            .and_then(|h| h.iter().position(|c| c.trim() == name))
            .ok_or_else(|| Error::Schema(format!("missing required column {name:?}"))),
    }
}

/// Loads interactions, keeping only the most recent record of each
/// (user, item) pair. Without timestamps the later row wins.
pub fn load_interactions(path: impl AsRef<Path>, schema: &ColumnSchema) -> Result<Vec<Interaction>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_interactions(std::io::BufReader::new(file), schema)
}

pub fn read_interactions<R: std::io::Read>(reader: R, schema: &ColumnSchema) -> Result<Vec<Interaction>> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .has_headers(schema.has_header)
        .flexible(true)
        .from_reader(reader);
    let header = if schema.has_header {
        Some(rdr.headers()?.clone())
    } else {
        None
    };
    let user_col = resolve(&schema.user, header.as_ref())?;
    let item_col = resolve(&schema.item, header.as_ref())?;
    let rating_col = schema.rating.as_ref().map(|c| resolve(c, header.as_ref())).transpose()?;
    let ts_col = schema.timestamp.as_ref().map(|c| resolve(c, header.as_ref())).transpose()?;
    let width = [Some(user_col), Some(item_col), rating_col, ts_col]
        .into_iter()
        .flatten()
        .max()
        .unwrap_or(0);

    let mut out: Vec<Interaction> = Vec::new();
    let mut slot: HashMap<(String, String), usize> = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() <= width {
            return Err(Error::Parse {
                line,
                message: format!("expected at least {} columns, found {}", width + 1, record.len()),
            });
        }
        let field = |c: usize| record[c].trim();
        let rating = match rating_col.map(field) {
            None | Some("") => None,
            Some(raw) => {
                let r: f64 = raw.parse().map_err(|_| Error::Parse {
                    line,
                    message: format!("invalid rating {raw:?}"),
                })?;
                if let Some((lo, hi)) = schema.rating_range {
                    if !(lo..=hi).contains(&r) {
                        return Err(Error::Parse {
                            line,
                            message: format!("rating {r} outside [{lo}, {hi}]"),
                        });
                    }
                }
                Some(r)
            }
        };
        let timestamp = match ts_col.map(field) {
            None | Some("") => None,
            Some(raw) => Some(raw.parse::<i64>().map_err(|_| Error::Parse {
                line,
                message: format!("invalid timestamp {raw:?}"),
            })?),
        };
        let rec = Interaction {
            user: field(user_col).to_owned(),
            item: field(item_col).to_owned(),
            rating,
            timestamp,
        };
        match slot.get(&(rec.user.clone(), rec.item.clone())) {
            Some(&pos) => {
                if rec.timestamp >= out[pos].timestamp {
                    out[pos] = rec;
                }
            }
            None => {
                slot.insert((rec.user.clone(), rec.item.clone()), out.len());
                out.push(rec);
            }
        }
    }
    Ok(out)
}

/// Converts ratings `>= threshold` to grade 1 and drops the rest.
/// Interactions without a rating (implicit feedback) pass through.
pub fn binarize(interactions: &[Interaction], threshold: f64) -> Vec<Interaction> {
    interactions
        .iter()
        .filter_map(|x| match x.rating {
            None => Some(x.clone()),
            Some(r) if r >= threshold => Some(Interaction {
                rating: Some(1.0),
                ..x.clone()
            }),
            Some(_) => None,
        })
        .collect()
}

/// Iteratively removes users and items with fewer than `c` interactions
/// until every survivor has at least `c`.
pub fn kcore_filter(interactions: &[Interaction], c: usize) -> Vec<Interaction> {
    let mut alive: Vec<bool> = vec![true; interactions.len()];
    loop {
        let mut users: HashMap<&str, usize> = HashMap::new();
        let mut items: HashMap<&str, usize> = HashMap::new();
        for (x, _) in interactions.iter().zip(&alive).filter(|(_, &a)| a) {
            *users.entry(&x.user).or_default() += 1;
            *items.entry(&x.item).or_default() += 1;
        }
        let mut changed = false;
        for (x, a) in interactions.iter().zip(alive.iter_mut()) {
            if *a && (users[x.user.as_str()] < c || items[x.item.as_str()] < c) {
                *a = false;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    interactions
        .iter()
        .zip(alive)
        .filter(|(_, a)| *a)
        .map(|(x, _)| x.clone())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    Temporal,
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitBundle {
    pub train: Vec<Interaction>,
    pub validation: Vec<Interaction>,
    pub test: Vec<Interaction>,
    /// Interactions of users removed for having too few train interactions.
    pub dropped: Vec<Interaction>,
    pub ratios: (f64, f64, f64),
}

/// Global (not per-user) train/validation/test split.
///
/// Temporal mode orders by timestamp with ties kept in input order; random
/// mode shuffles with a seeded generator. Users left with fewer than
/// [`MIN_TRAIN_INTERACTIONS`] train interactions are removed from all sets.
pub fn split(
    interactions: &[Interaction],
    ratios: (f64, f64, f64),
    mode: SplitMode,
    seed: u64,
) -> Result<SplitBundle> {
    let (a, b, c) = ratios;
    if [a, b, c].iter().any(|r| !(0.0..=1.0).contains(r)) || ((a + b + c) - 1.0).abs() > 1e-9 {
        return Err(Error::Config(format!("split ratios {ratios:?} must be in [0,1] and sum to 1")));
    }
    let mut order: Vec<usize> = (0..interactions.len()).collect();
    match mode {
        SplitMode::Temporal => {
            if interactions.iter().any(|x| x.timestamp.is_none()) {
                return Err(Error::Config("temporal split needs a timestamp on every interaction".into()));
            }
            order.sort_by(|&x, &y| {
                let (ix, iy) = (&interactions[x], &interactions[y]);
                ix.timestamp
                    .cmp(&iy.timestamp)
                    .then(x.cmp(&y))
                    .then_with(|| ix.user.cmp(&iy.user))
            });
        }
        SplitMode::Random => order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed)),
    }
    let total = interactions.len();
    let n_train = (total as f64 * a + 1e-9).floor() as usize;
    let n_val = ((total as f64 * b + 1e-9).floor() as usize).min(total - n_train);

    let take = |range: std::ops::Range<usize>| -> Vec<Interaction> {
        order[range].iter().map(|&i| interactions[i].clone()).collect()
    };
    let train = take(0..n_train);
    let validation = take(n_train..n_train + n_val);
    let test = take(n_train + n_val..total);

    let mut train_counts: HashMap<String, usize> = HashMap::new();
    for x in &train {
        *train_counts.entry(x.user.clone()).or_default() += 1;
    }
    let keep = |x: &Interaction| train_counts.get(x.user.as_str()).copied().unwrap_or(0) >= MIN_TRAIN_INTERACTIONS;
    let mut dropped = Vec::new();
    let mut partition = |set: Vec<Interaction>| -> Vec<Interaction> {
        let (kept, gone): (Vec<_>, Vec<_>) = set.into_iter().partition(|x| keep(x));
        dropped.extend(gone);
        kept
    };
    let train_kept = partition(train);
    let validation = partition(validation);
    let test = partition(test);
    Ok(SplitBundle {
        train: train_kept,
        validation,
        test,
        dropped,
        ratios,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn duplicate_pair_keeps_latest() {
        let text = "user\titem\trating\tts\nu\ta\t4\t10\nu\tb\t2\t11\nu\ta\t1\t20\n";
        let schema = ColumnSchema::tsv().with_rating("rating").with_timestamp("ts");
        let xs = read_interactions(text.as_bytes(), &schema).unwrap();
        assert_eq!(xs.len(), 2);
        assert_eq!(xs[0].rating, Some(1.0));
        assert_eq!(xs[0].timestamp, Some(20));
    }

    #[test]
    fn older_duplicate_does_not_replace() {
        let text = "user\titem\tts\nu\ta\t20\nu\ta\t10\n";
        let xs = read_interactions(text.as_bytes(), &ColumnSchema::tsv().with_timestamp(2)).unwrap();
        assert_eq!(xs[0].timestamp, Some(20));
    }

    #[test]
    fn empty_file_with_header() {
        let xs = read_interactions("user\titem\n".as_bytes(), &ColumnSchema::tsv()).unwrap();
        assert!(xs.is_empty());
    }

    #[test]
    fn bad_rating_names_line() {
        let err = read_interactions("user\titem\trating\nu\ta\tabc\n".as_bytes(), &ColumnSchema::tsv().with_rating(2))
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn rating_range_enforced() {
        let schema = ColumnSchema::tsv().with_rating(2).with_rating_range(1.0, 5.0);
        let err = read_interactions("user\titem\trating\nu\ta\t7\n".as_bytes(), &schema).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    #[test]
    fn missing_named_column() {
        let err = read_interactions("user\titem\n".as_bytes(), &ColumnSchema::tsv().with_rating("rating")).unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
    }

    #[test]
    fn binarize_threshold() {
        let xs: Vec<_> = [1.0, 3.0, 5.0].iter().map(|&r| Interaction::new("u", format!("i{r}")).rated(r)).collect();
        let out = binarize(&xs, 3.0);
        assert_eq!(out.len(), 2);
        assert!(out.iter().all(|x| x.rating == Some(1.0)));
        assert!(binarize(&xs[..1], 3.0).is_empty());
        let implicit = vec![Interaction::new("u", "a"), Interaction::new("v", "b")];
        assert_eq!(binarize(&implicit, 3.0), implicit);
    }

    #[test]
    fn kcore_star_collapses() {
        let xs: Vec<_> = (0..5).map(|i| Interaction::new("u", format!("i{i}"))).collect();
        assert!(kcore_filter(&xs, 5).is_empty());
        assert_eq!(kcore_filter(&xs, 1), xs);
    }

    #[test]
    fn kcore_complete_bipartite_kept() {
        let xs: Vec<_> = (0..5)
            .flat_map(|u| (0..5).map(move |i| Interaction::new(format!("u{u}"), format!("i{i}"))))
            .collect();
        assert_eq!(kcore_filter(&xs, 5), xs);
    }

    #[test]
    fn temporal_split_takes_earliest() {
        let xs: Vec<_> = (0..10).rev().map(|t| Interaction::new("u", format!("i{t}")).at(t)).collect();
        let b = split(&xs, (0.6, 0.2, 0.2), SplitMode::Temporal, 0).unwrap();
        let ts: Vec<i64> = b.train.iter().map(|x| x.timestamp.unwrap()).collect();
        assert_eq!(ts, vec![0, 1, 2, 3, 4, 5]);
        assert_eq!(b.validation.len(), 2);
        assert_eq!(b.test.len(), 2);
    }

    #[test]
    fn temporal_split_needs_timestamps() {
        let xs = vec![Interaction::new("u", "a")];
        assert!(matches!(split(&xs, (0.6, 0.2, 0.2), SplitMode::Temporal, 0), Err(Error::Config(_))));
    }

    #[test]
    fn users_with_few_train_interactions_dropped() {
        // "big" has 8 early interactions; "small" has 4 early ones and 6 late ones.
        let mut xs = Vec::new();
        for t in 0..8 {
            xs.push(Interaction::new("big", format!("b{t}")).at(t));
        }
        for t in 0..4 {
            xs.push(Interaction::new("small", format!("s{t}")).at(t));
        }
        for t in 100..108 {
            xs.push(Interaction::new("small", format!("s{t}")).at(t));
        }
        let b = split(&xs, (0.6, 0.2, 0.2), SplitMode::Temporal, 0).unwrap();
        for set in [&b.train, &b.validation, &b.test] {
            assert!(set.iter().all(|x| x.user == "big"));
        }
        assert_eq!(b.dropped.len() + b.train.len() + b.validation.len() + b.test.len(), xs.len());
    }

    #[test]
    fn random_split_is_seeded() {
        let xs: Vec<_> = (0..40).map(|t| Interaction::new(format!("u{}", t % 3), format!("i{t}"))).collect();
        let a = split(&xs, (0.6, 0.2, 0.2), SplitMode::Random, 7).unwrap();
        let b = split(&xs, (0.6, 0.2, 0.2), SplitMode::Random, 7).unwrap();
        assert_eq!(a, b);
    }
}
