use crate::corpus::{RelevanceTable, RunData};
use crate::error::{Error, Result};

/// A run aligned with a relevance table on a shared dense item universe.
///
/// The item universe is the relevance table's items followed by any items
/// that only occur in the run (grade 0). Only the top-`k` prefix of every
/// list is kept, plus the full-list rank of each relevant item.
#[derive(Debug, Clone)]
pub struct EvalContext<'a> {
    rel: &'a RelevanceTable,
    user_names: Vec<&'a str>,
    rel_user: Vec<u32>,
    n: usize,
    k: usize,
    rounds: usize,
    /// `[user][round]` top-k items in the evaluation universe.
    top: Vec<Vec<Vec<u32>>>,
    /// `[user][round]` 1-based rank of each entry of `rel.relevant(u)`.
    rel_ranks: Vec<Vec<Vec<Option<u32>>>>,
}

impl<'a> EvalContext<'a> {
    /// Aligns `run` with `rel` at cutoff `k`, failing when a run user is
    /// unknown to `rel` or a list is shorter than `k`.
    pub fn new(run: &'a RunData, rel: &'a RelevanceTable, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::DegenerateCutoff(0));
        }
        run.require_depth(k)?;

        let mut n = rel.items().len();
        let item_map: Vec<u32> = run
            .items()
            .names()
            .iter()
            .map(|name| {
                rel.items().get(name).unwrap_or_else(|| {
                    n += 1;
                    (n - 1) as u32
                })
            })
            .collect();

        let m = run.num_users();
        let mut user_names = Vec::with_capacity(m);
        let mut rel_user = Vec::with_capacity(m);
        for name in run.users().names() {
            let ru = rel.users().get(name).ok_or_else(|| Error::UnknownUser(name.clone()))?;
            user_names.push(name.as_str());
            rel_user.push(ru);
        }

        // slot[i] = position of item i in the current user's relevant list
        let mut slot = vec![u32::MAX; n];
        let rounds = run.rounds() as usize;
        let mut top = Vec::with_capacity(m);
        let mut rel_ranks = Vec::with_capacity(m);
        for u in 0..m {
            let relevant = rel.relevant(rel_user[u]);
            for (j, &(i, _)) in relevant.iter().enumerate() {
                slot[i as usize] = j as u32;
            }
            let mut user_top = Vec::with_capacity(rounds);
            let mut user_ranks = Vec::with_capacity(rounds);
            for list in run.user_lists(u) {
                let items = list.items();
                user_top.push(items[..k].iter().map(|&i| item_map[i as usize]).collect());
                let mut ranks = vec![None; relevant.len()];
                if !relevant.is_empty() {
                    for (pos, &i) in items.iter().enumerate() {
                        let j = slot[item_map[i as usize] as usize];
                        if j != u32::MAX {
                            ranks[j as usize] = Some(pos as u32 + 1);
                        }
                    }
                }
                user_ranks.push(ranks);
            }
            for &(i, _) in relevant {
                slot[i as usize] = u32::MAX;
            }
            top.push(user_top);
            rel_ranks.push(user_ranks);
        }

        Ok(Self {
            rel,
            user_names,
            rel_user,
            n,
            k,
            rounds,
            top,
            rel_ranks,
        })
    }

    /// Number of evaluated users `m`.
    pub fn num_users(&self) -> usize {
        self.user_names.len()
    }

    /// Size `n` of the item universe.
    pub fn num_items(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn user_name(&self, u: usize) -> &str {
        self.user_names[u]
    }

    /// Name of an item in the evaluation universe, when it is judged.
    pub fn judged_item_name(&self, i: u32) -> Option<&str> {
        ((i as usize) < self.rel.items().len()).then(|| self.rel.items().name(i))
    }

    /// Top-k list of user `u` in round `w` (0-based).
    pub fn top(&self, u: usize, w: usize) -> &[u32] {
        &self.top[u][w]
    }

    /// Positive-grade items of user `u`, sorted by item index.
    pub fn relevant(&self, u: usize) -> &[(u32, f64)] {
        self.rel.relevant(self.rel_user[u])
    }

    pub fn grade(&self, u: usize, i: u32) -> f64 {
        if (i as usize) < self.rel.items().len() {
            self.rel.grade(self.rel_user[u], i)
        } else {
            0.0
        }
    }

    /// Full-list ranks in round `w` of `relevant(u)`, aligned by position.
    pub fn relevant_ranks(&self, u: usize, w: usize) -> &[Option<u32>] {
        &self.rel_ranks[u][w]
    }
}
