//! System output: per-user, per-round ranked lists.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::ids::Interner;

/// One ranked list, best item first. Scores are either present for every
/// entry or absent for the whole list.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList {
    items: Vec<u32>,
    scores: Option<Vec<f64>>,
}

impl RankedList {
    pub fn new(items: Vec<u32>) -> Self {
        Self {
            items,
            scores: None,
        }
    }

    pub fn with_scores(items: Vec<u32>, scores: Vec<f64>) -> Result<Self> {
        if items.len() != scores.len() {
            return Err(Error::Schema(format!(
                "{} items but {} scores",
                items.len(),
                scores.len()
            )));
        }
        Ok(Self {
            items,
            scores: Some(scores),
        })
    }

    pub fn items(&self) -> &[u32] {
        &self.items
    }

    pub fn scores(&self) -> Option<&[f64]> {
        self.scores.as_deref()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Sub-list of ranks `start..start + len` (1-based start), re-indexed from 1.
    pub(crate) fn slice(&self, start: usize, len: usize) -> RankedList {
        let lo = (start - 1).min(self.items.len());
        let hi = (lo + len).min(self.items.len());
        RankedList {
            items: self.items[lo..hi].to_vec(),
            scores: self.scores.as_ref().map(|s| s[lo..hi].to_vec()),
        }
    }
}

/// Recommendation lists for every user and round.
///
/// `lists[u][w]` is the list for user index `u` in round `w + 1`; every user
/// has exactly `rounds` lists.
#[derive(Debug, Clone, PartialEq)]
pub struct RunData {
    users: Interner,
    items: Interner,
    rounds: u32,
    lists: Vec<Vec<RankedList>>,
}

impl RunData {
    /// Builds a run from dense lists, checking that items are unique per list
    /// and that every user has the same number of rounds.
    pub fn new(users: Interner, items: Interner, lists: Vec<Vec<RankedList>>) -> Result<Self> {
        if lists.len() != users.len() {
            return Err(Error::Schema(format!(
                "{} users but {} list groups",
                users.len(),
                lists.len()
            )));
        }
        let rounds = lists.first().map_or(1, |l| l.len()) as u32;
        let mut missing = Vec::new();
        let mut dupes = Vec::new();
        let mut stamp = vec![u32::MAX; items.len()];
        let mut tick = 0u32;
        for (u, per_round) in lists.iter().enumerate() {
            if per_round.len() as u32 != rounds || rounds == 0 {
                missing.push((users.name(u as u32).to_owned(), per_round.len() as u32));
                continue;
            }
            for (w, list) in per_round.iter().enumerate() {
                for &i in &list.items {
                    let slot = stamp
                        .get_mut(i as usize)
                        .ok_or_else(|| Error::Schema(format!("item index {i} out of range")))?;
                    if *slot == tick {
                        dupes.push((users.name(u as u32).to_owned(), w as u32 + 1));
                        break;
                    }
                    *slot = tick;
                }
                tick = tick.wrapping_add(1);
                if tick == u32::MAX {
                    stamp.fill(u32::MAX);
                    tick = 0;
                }
            }
        }
        if !missing.is_empty() {
            return Err(Error::Structural {
                message: format!("every user needs exactly {rounds} rounds"),
                lists: missing,
            });
        }
        if !dupes.is_empty() {
            return Err(Error::Structural {
                message: "item repeated within a list".into(),
                lists: dupes,
            });
        }
        Ok(Self {
            users,
            items,
            rounds,
            lists,
        })
    }

    /// Convenience constructor from string identifiers, one list per user,
    /// single round.
    pub fn from_single_round<U, I>(lists: Vec<(U, Vec<I>)>) -> Result<Self>
    where
        U: Into<String>,
        I: Into<String>,
    {
        let mut users = Interner::new();
        let mut items = Interner::new();
        let mut dense = Vec::with_capacity(lists.len());
        for (user, ranked) in lists {
            users.intern(user);
            let ids = ranked.into_iter().map(|i| items.intern(i)).collect();
            dense.push(vec![RankedList::new(ids)]);
        }
        Self::new(users, items, dense)
    }

    pub fn users(&self) -> &Interner {
        &self.users
    }

    pub fn items(&self) -> &Interner {
        &self.items
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    /// List of user `u` in round `w` (0-based).
    pub fn list(&self, u: usize, w: usize) -> &RankedList {
        &self.lists[u][w]
    }

    pub fn user_lists(&self, u: usize) -> &[RankedList] {
        &self.lists[u]
    }

    pub(crate) fn lists(&self) -> &[Vec<RankedList>] {
        &self.lists
    }

    /// Smallest list length over all users and rounds.
    pub fn min_depth(&self) -> usize {
        self.lists
            .iter()
            .flatten()
            .map(RankedList::len)
            .min()
            .unwrap_or(0)
    }

    /// Fails with a depth error naming the first list shorter than `required`.
    pub fn require_depth(&self, required: usize) -> Result<()> {
        for (u, per_round) in self.lists.iter().enumerate() {
            for (w, list) in per_round.iter().enumerate() {
                if list.len() < required {
                    return Err(Error::Depth {
                        user: self.users.name(u as u32).to_owned(),
                        round: w as u32 + 1,
                        depth: list.len(),
                        required,
                    });
                }
            }
        }
        Ok(())
    }

    /// Window of ranks `start..start + size` of every list, re-ranked from 1.
    pub fn window(&self, start: usize, size: usize) -> RunData {
        let lists = self
            .lists
            .iter()
            .map(|per_round| per_round.iter().map(|l| l.slice(start, size)).collect())
            .collect();
        RunData {
            users: self.users.clone(),
            items: self.items.clone(),
            rounds: self.rounds,
            lists,
        }
    }

    /// Keeps only the first `depth` entries of every list.
    pub fn truncate(&self, depth: usize) -> RunData {
        self.window(1, depth)
    }

    pub(crate) fn with_lists(&self, lists: Vec<Vec<RankedList>>) -> Result<RunData> {
        RunData::new(self.users.clone(), self.items.clone(), lists)
    }

    /// Reads a run file from disk.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(std::io::BufReader::new(file))
    }

    /// Parses `user<TAB>item<TAB>round<TAB>rank<TAB>score` rows. An empty
    /// round means round 1, and the score column may be empty or missing.
    /// A first line whose rank column reads `rank` is taken as a header.
    pub fn parse<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = tsv_reader(reader);
        let mut users = Interner::new();
        let mut items = Interner::new();
        // (user, round) -> rank -> (item, score)
        let mut grouped: BTreeMap<(u32, u32), Vec<(usize, u32, Option<f64>, usize)>> =
            BTreeMap::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let line = record.position().map_or(row + 1, |p| p.line() as usize);
            if record.len() == 1 && record[0].trim().is_empty() {
                continue;
            }
            if record.len() < 4 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected at least 4 columns, found {}", record.len()),
                });
            }
            if row == 0 && record[3].trim().eq_ignore_ascii_case("rank") {
                continue;
            }
            let round = match record[2].trim() {
                "" => 1,
                s => s.parse::<u32>().ok().filter(|&r| r >= 1).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("invalid round {s:?}"),
                })?,
            };
            let rank = record[3]
                .trim()
                .parse::<usize>()
                .ok()
                .filter(|&r| r >= 1)
                .ok_or_else(|| Error::Parse {
                    line,
                    message: format!("invalid rank {:?}", &record[3]),
                })?;
            let score = match record.get(4).map(str::trim) {
                None | Some("") => None,
                Some(s) => Some(s.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(
                    || Error::Parse {
                        line,
                        message: format!("invalid score {s:?}"),
                    },
                )?),
            };
            let u = users.intern(record[0].trim());
            let i = items.intern(record[1].trim());
            grouped
                .entry((u, round))
                .or_default()
                .push((rank, i, score, line));
        }

        let rounds = grouped.keys().map(|&(_, w)| w).max().unwrap_or(1);
        let mut lists: Vec<Vec<Option<RankedList>>> = vec![vec![None; rounds as usize]; users.len()];
        let mut gaps = Vec::new();
        let mut dupes = Vec::new();
        let mut mixed = Vec::new();
        for ((u, w), mut rows) in grouped {
            rows.sort_by_key(|r| (r.0, r.3));
            let key = (users.name(u).to_owned(), w);
            if rows.iter().enumerate().any(|(pos, r)| r.0 != pos + 1) {
                gaps.push(key);
                continue;
            }
            let mut seen = std::collections::HashSet::with_capacity(rows.len());
            if !rows.iter().all(|r| seen.insert(r.1)) {
                dupes.push(key);
                continue;
            }
            let with_scores = rows.iter().filter(|r| r.2.is_some()).count();
            let ids: Vec<u32> = rows.iter().map(|r| r.1).collect();
            let list = if with_scores == rows.len() {
                RankedList::with_scores(ids, rows.iter().map(|r| r.2.unwrap_or(0.0)).collect())?
            } else if with_scores == 0 {
                RankedList::new(ids)
            } else {
                mixed.push(key);
                continue;
            };
            lists[u as usize][w as usize - 1] = Some(list);
        }
        if !gaps.is_empty() {
            return Err(Error::Structural {
                message: "ranks are not contiguous from 1".into(),
                lists: gaps,
            });
        }
        if !dupes.is_empty() {
            return Err(Error::Structural {
                message: "item repeated within a list".into(),
                lists: dupes,
            });
        }
        if !mixed.is_empty() {
            return Err(Error::Structural {
                message: "scores must be given for all or none of a list".into(),
                lists: mixed,
            });
        }
        let mut missing = Vec::new();
        let mut dense = Vec::with_capacity(lists.len());
        for (u, per_round) in lists.into_iter().enumerate() {
            let mut complete = Vec::with_capacity(per_round.len());
            for (w, list) in per_round.into_iter().enumerate() {
                match list {
                    Some(l) => complete.push(l),
                    None => missing.push((users.name(u as u32).to_owned(), w as u32 + 1)),
                }
            }
            dense.push(complete);
        }
        if !missing.is_empty() {
            return Err(Error::Structural {
                message: "missing list for round".into(),
                lists: missing,
            });
        }
        if dense.is_empty() {
            return Ok(Self {
                users,
                items,
                rounds: 1,
                lists: dense,
            });
        }
        Self::new(users, items, dense)
    }

    /// Writes the run in the tab-separated run format, header included.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "user\titem\tround\trank\tscore")?;
        for (u, per_round) in self.lists.iter().enumerate() {
            let user = self.users.name(u as u32);
            for (w, list) in per_round.iter().enumerate() {
                for (pos, &i) in list.items.iter().enumerate() {
                    let item = self.items.name(i);
                    match &list.scores {
                        Some(s) => writeln!(out, "{user}\t{item}\t{}\t{}\t{}", w + 1, pos + 1, s[pos])?,
                        None => writeln!(out, "{user}\t{item}\t{}\t{}\t", w + 1, pos + 1)?,
                    }
                }
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut buf = std::io::BufWriter::new(file);
        self.write_tsv(&mut buf).map_err(|e| Error::io(path, e))?;
        buf.flush().map_err(|e| Error::io(path, e))
    }
}

pub(crate) fn tsv_reader<R: Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .delimiter(b'\t')
        .has_headers(false)
        .flexible(true)
        .quoting(false)
        .comment(Some(b'#'))
        .from_reader(reader)
}
