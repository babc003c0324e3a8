//! Popularity-skewed synthetic runs standing in for trained recommenders.
//!
//! Items have a popularity rank `p` (0 = most popular). For every user:
//!
//! ```text
//! model score  s(u, p) = -skew * ln(p + 1) + g1
//! true affinity t(u, p) = -0.75 * skew * ln(p + 1) + 0.25 * g1 + g2
//! ```
//!
//! with `g1`, `g2` independent standard Gumbel draws per (user, item). The
//! user ranks the whole catalog by `s`; the model therefore leans harder on
//! popularity than the users do. The user's relevant items are the top
//! `R_u ~ U{1..2k-1}` items by `t`, graded `1/j` for the `j`-th of them.
//! Item labels are a seeded shuffle of popularity, so label order carries
//! no popularity signal.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gumbel};
use serde::{Deserialize, Serialize};

use super::labels;
use crate::corpus::{RankedList, RelevanceTable, RunData};
use crate::error::{Error, Result};
use crate::ids::Interner;

/// How much of the model's popularity skew users share.
const TRUTH_SKEW_RATIO: f64 = 0.75;
/// Weight of the model's noise in the users' affinity.
const SHARED_NOISE: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub users: usize,
    pub items: usize,
    /// Average number of relevant items per user.
    pub k: usize,
    pub skew: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            users: 500,
            items: 2000,
            k: 10,
            skew: 1.75,
            seed: 1,
        }
    }
}

/// Full-depth scored run plus graded relevance; deterministic per seed.
pub fn synthetic_popularity_run(cfg: &SyntheticConfig) -> Result<(RunData, RelevanceTable)> {
    if !(cfg.skew >= 0.0) || !cfg.skew.is_finite() {
        return Err(Error::Config(format!("skew must be a non-negative number, got {}", cfg.skew)));
    }
    if cfg.users == 0 || cfg.k == 0 || cfg.items < 2 * cfg.k {
        return Err(Error::Config(format!(
            "need users >= 1, k >= 1 and items >= 2k (users={}, items={}, k={})",
            cfg.users, cfg.items, cfg.k
        )));
    }
    let n = cfg.items;
    let users = labels("u", cfg.users);
    let items = Interner::from_names(labels("i", n));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // label[p]: item id of popularity rank p
    let mut label: Vec<u32> = (0..n as u32).collect();
    label.shuffle(&mut rng);
    let log_pop: Vec<f64> = (0..n).map(|p| ((p + 1) as f64).ln()).collect();
    let gumbel = Gumbel::new(0.0, 1.0).expect("valid Gumbel");

    let mut rel = RelevanceTable::new();
    for u in &users {
        rel.declare_user(u.as_str());
    }
    for name in items.names() {
        rel.declare_item(name.as_str());
    }
    let mut lists = Vec::with_capacity(cfg.users);
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for user in &users {
        let noise: Vec<f64> = (0..n).map(|_| gumbel.sample(&mut rng)).collect();
        let score: Vec<f64> = (0..n).map(|p| -cfg.skew * log_pop[p] + noise[p]).collect();
        let truth: Vec<f64> = (0..n)
            .map(|p| -TRUTH_SKEW_RATIO * cfg.skew * log_pop[p] + SHARED_NOISE * noise[p] + gumbel.sample(&mut rng))
            .collect();
        let relevant = rng.random_range(1..=2 * cfg.k - 1);

        order.clear();
        order.extend(0..n);
        order.sort_by(|&a, &b| truth[b].total_cmp(&truth[a]).then(a.cmp(&b)));
        for (j, &p) in order[..relevant].iter().enumerate() {
            rel.set(user.as_str(), items.name(label[p]), 1.0 / (j + 1) as f64)?;
        }

        order.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
        let ids = order.iter().map(|&p| label[p]).collect();
        let scores = order.iter().map(|&p| score[p]).collect();
        lists.push(vec![RankedList::with_scores(ids, scores)?]);
    }
    let run = RunData::new(Interner::from_names(users), items, lists)?;
    Ok((run, rel))
}
