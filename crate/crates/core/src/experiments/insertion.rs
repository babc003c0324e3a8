//! Artificial insertion of relevant, rarely exposed items.
//!
//! Step 0: every user gets the same `k` items. Those items are exactly the
//! relevant items of one exceptional user, so the catalog needs only `k·m`
//! items. Every other user has `k` dedicated relevant items nobody else
//! cares about. At step `t` the item at rank `k - t + 1` of each ordinary
//! user is replaced by the user's `t`-th dedicated item; after `k` steps
//! every user sees exactly their own relevant items.
//!
//! Lists are full rankings: after the top-`k` come all remaining catalog
//! items in catalog order.

use std::io::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::labels;
use crate::corpus::{RankedList, RelevanceTable, RunData};
use crate::error::{Error, Result};
use crate::ids::Interner;
use crate::metrics::{evaluate, JointConfig, Measure};
use crate::report::ScoreReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct InsertionConfig {
    pub users: usize,
    pub items: usize,
    pub k: usize,
    pub seed: u64,
}

impl Default for InsertionConfig {
    fn default() -> Self {
        Self {
            users: 1000,
            items: 10_000,
            k: 10,
            seed: 0,
        }
    }
}

impl InsertionConfig {
    fn validate(&self) -> Result<()> {
        if self.users < 2 || self.k < 2 {
            return Err(Error::Config(format!(
                "insertion needs at least 2 users and k >= 2 (got m={}, k={})",
                self.users, self.k
            )));
        }
        if self.items < self.users * self.k {
            return Err(Error::Config(format!(
                "insertion needs n >= k*m ({} < {})",
                self.items,
                self.users * self.k
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InsertionStep {
    pub inserted: usize,
    /// Distinct items across all top-k lists.
    pub unique_items: usize,
    pub report: ScoreReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InsertionTrajectory {
    pub config: InsertionConfig,
    pub exceptional_user: String,
    pub steps: Vec<InsertionStep>,
}

impl InsertionTrajectory {
    /// Long-format CSV: `step,measure,value`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["step", "measure", "value"])?;
        for step in &self.steps {
            for s in &step.report.scores {
                w.write_record([step.inserted.to_string(), s.measure.name().to_owned(), s.value.to_string()])?;
            }
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn series(&self, measure: Measure) -> Vec<f64> {
        self.steps.iter().filter_map(|s| s.report.get(measure)).collect()
    }
}

/// The fixed part of the construction: who owns which items.
struct Layout {
    cfg: InsertionConfig,
    exceptional: usize,
    /// `owned[u]`: the user's relevant items; for the exceptional user these
    /// are the shared items in rank order.
    owned: Vec<Vec<u32>>,
    users: Interner,
    items: Interner,
}

impl Layout {
    fn new(cfg: InsertionConfig) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut catalog: Vec<u32> = (0..cfg.items as u32).collect();
        catalog.shuffle(&mut rng);
        let exceptional = rng.random_range(0..cfg.users);
        let owned = (0..cfg.users)
            .map(|u| {
                let mut own = catalog[u * cfg.k..(u + 1) * cfg.k].to_vec();
                own.sort_unstable();
                own
            })
            .collect();
        Ok(Self {
            cfg,
            exceptional,
            owned,
            users: Interner::from_names(labels("u", cfg.users)),
            items: Interner::from_names(labels("i", cfg.items)),
        })
    }

    fn relevance(&self) -> RelevanceTable {
        let mut rel = RelevanceTable::new();
        for u in 0..self.cfg.users {
            rel.declare_user(self.users.name(u as u32));
        }
        for i in 0..self.cfg.items {
            rel.declare_item(self.items.name(i as u32));
        }
        for (u, own) in self.owned.iter().enumerate() {
            for &i in own {
                rel.set(self.users.name(u as u32), self.items.name(i), 1.0)
                    .expect("grade in range");
            }
        }
        rel
    }

    fn top_k(&self, u: usize, step: usize) -> Vec<u32> {
        let shared = &self.owned[self.exceptional];
        if u == self.exceptional {
            return shared.clone();
        }
        let k = self.cfg.k;
        let mut top = shared.clone();
        for t in 1..=step {
            top[k - t] = self.owned[u][t - 1];
        }
        top
    }

    fn run(&self, step: usize) -> Result<RunData> {
        let n = self.cfg.items;
        let mut in_top = vec![false; n];
        let lists = (0..self.cfg.users)
            .map(|u| {
                let mut list = self.top_k(u, step);
                list.reserve(n - list.len());
                for &i in &list {
                    in_top[i as usize] = true;
                }
                for i in 0..n as u32 {
                    if !in_top[i as usize] {
                        list.push(i);
                    }
                }
                for &i in &list[..self.cfg.k] {
                    in_top[i as usize] = false;
                }
                vec![RankedList::new(list)]
            })
            .collect();
        RunData::new(self.users.clone(), self.items.clone(), lists)
    }

    fn unique_items(&self, step: usize) -> usize {
        let mut seen = vec![false; self.cfg.items];
        (0..self.cfg.users)
            .flat_map(|u| self.top_k(u, step))
            .filter(|&i| !std::mem::replace(&mut seen[i as usize], true))
            .count()
    }
}

/// The run after `step` insertions, with its relevance table.
pub fn insertion_run(cfg: &InsertionConfig, step: usize) -> Result<(RunData, RelevanceTable)> {
    let layout = Layout::new(*cfg)?;
    if step > cfg.k {
        return Err(Error::Config(format!("step {step} beyond k={}", cfg.k)));
    }
    Ok((layout.run(step)?, layout.relevance()))
}

/// Runs all `k + 1` steps and evaluates `measures` at every one of them.
/// `joint.k` is replaced by the construction's `k`.
pub fn insertion_sim(cfg: &InsertionConfig, joint: &JointConfig, measures: &[Measure]) -> Result<InsertionTrajectory> {
    let layout = Layout::new(*cfg)?;
    let rel = layout.relevance();
    let joint = joint.with_k(cfg.k);
    let steps = (0..=cfg.k)
        .map(|t| {
            let run = layout.run(t)?;
            let eval = evaluate(&run, &rel, &joint, measures)?;
            Ok(InsertionStep {
                inserted: t,
                unique_items: layout.unique_items(t),
                report: ScoreReport::from_evaluation(format!("step{t}"), joint, eval),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(InsertionTrajectory {
        config: *cfg,
        exceptional_user: layout.users.name(layout.exceptional as u32).to_owned(),
        steps,
    })
}
