use serde::Serialize;

use crate::corpus::{RankedList, RelevanceTable, RunData};
use crate::error::{Error, Result};
use crate::metrics::{evaluate, JointConfig, Measure};
use crate::report::ScoreReport;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowReport {
    /// First and last original rank of the window (1-based, inclusive).
    pub start: usize,
    pub end: usize,
    pub report: ScoreReport,
}

/// Moves ranks `start..start + size` of every list to the front, keeping
/// the remaining items behind them in their original order. The top-`size`
/// of the result is the window; the tail keeps full rankings full so
/// measures that read ranks beyond the cutoff still work.
pub fn windowed_run(run: &RunData, start: usize, size: usize) -> Result<RunData> {
    if start == 0 || size == 0 {
        return Err(Error::Config("window start and size must be at least 1".into()));
    }
    run.require_depth(start + size - 1)?;
    let lo = start - 1;
    let hi = lo + size;
    let lists = (0..run.num_users())
        .map(|u| {
            run.user_lists(u)
                .iter()
                .map(|l| {
                    let items = l.items();
                    let mut out = Vec::with_capacity(items.len());
                    out.extend_from_slice(&items[lo..hi]);
                    out.extend_from_slice(&items[..lo]);
                    out.extend_from_slice(&items[hi..]);
                    RankedList::new(out)
                })
                .collect()
        })
        .collect();
    run.with_lists(lists)
}

/// Evaluates `count` windows of `size` consecutive ranks starting at ranks
/// 1, 2, …, `count`, each at cutoff `size`.
pub fn sliding_windows(
    run: &RunData,
    rel: &RelevanceTable,
    cfg: &JointConfig,
    measures: &[Measure],
    size: usize,
    count: usize,
) -> Result<Vec<WindowReport>> {
    if count == 0 {
        return Err(Error::Config("need at least one window".into()));
    }
    run.require_depth(size + count - 1)?;
    let cfg = cfg.with_k(size);
    (1..=count)
        .map(|start| {
            let end = start + size - 1;
            let windowed = windowed_run(run, start, size)?;
            let eval = evaluate(&windowed, rel, &cfg, measures)?;
            Ok(WindowReport {
                start,
                end,
                report: ScoreReport::from_evaluation(format!("{start}-{end}"), cfg, eval),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run() -> RunData {
        RunData::from_single_round(vec![
            ("u", vec!["a", "b", "c", "d", "e", "f"]),
            ("v", vec!["b", "c", "d", "e", "f", "a"]),
        ])
        .unwrap()
    }

    #[test]
    fn window_moves_to_front() {
        let w = windowed_run(&run(), 2, 3).unwrap();
        let names: Vec<_> = w.list(0, 0).items().iter().map(|&i| w.items().name(i)).collect();
        assert_eq!(names, ["b", "c", "d", "a", "e", "f"]);
    }

    #[test]
    fn first_window_is_plain_evaluation() {
        let rel = RelevanceTable::from_triples([("u", "c", 1.0), ("v", "a", 1.0), ("v", "b", 0.5)]).unwrap();
        let cfg = JointConfig::default();
        let windows = sliding_windows(&run(), &rel, &cfg, &Measure::ALL, 3, 4).unwrap();
        assert_eq!(windows.len(), 4);
        assert_eq!((windows[3].start, windows[3].end), (4, 6));
        let plain = evaluate(&run(), &rel, &cfg.with_k(3), &Measure::ALL).unwrap();
        for (m, v) in plain.scores {
            assert_eq!(windows[0].report.get(m), Some(v), "{m}");
        }
    }

    #[test]
    fn shallow_run_fails() {
        let rel = RelevanceTable::from_triples([("u", "c", 1.0), ("v", "a", 1.0)]).unwrap();
        let r = sliding_windows(&run(), &rel, &JointConfig::default(), &[Measure::Hr], 5, 5);
        assert!(matches!(r, Err(Error::Depth { .. })));
    }
}
