use std::collections::BTreeMap;

use fairrel::corpus::{kcore_filter, split, Interaction, RelevanceTable, RunData, SplitMode};
use fairrel::report::ScoreReport;
use fairrel::metrics::{evaluate, JointConfig, Measure};
use proptest::prelude::*;

fn run_strategy() -> impl Strategy<Value = RunData> {
    (1usize..5, 1usize..4, 2usize..8, any::<bool>(), any::<u64>()).prop_map(|(users, rounds, items, scored, seed)| {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut text = String::from("user\titem\tround\trank\tscore\n");
        for u in 0..users {
            for w in 1..=rounds {
                let mut perm: Vec<usize> = (0..items).collect();
                perm.shuffle(&mut rng);
                for (p, i) in perm.iter().enumerate() {
                    let score = if scored { format!("{}", 1.0 / (p as f64 + 1.0) + 1e-13 * *i as f64) } else { String::new() };
                    text.push_str(&format!("user {u}\ti{i}\t{w}\t{}\t{score}\n", p + 1));
                }
            }
        }
        RunData::parse(text.as_bytes()).unwrap()
    })
}

fn named_lists(run: &RunData) -> BTreeMap<(String, usize), Vec<(String, Option<f64>)>> {
    let mut out = BTreeMap::new();
    for u in 0..run.num_users() {
        for (w, list) in run.user_lists(u).iter().enumerate() {
            let row = list
                .items()
                .iter()
                .enumerate()
                .map(|(p, &i)| (run.items().name(i).to_owned(), list.scores().map(|s| s[p])))
                .collect();
            out.insert((run.users().name(u as u32).to_owned(), w), row);
        }
    }
    out
}

fn tsv<F: Fn(&mut Vec<u8>)>(f: F) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf);
    buf
}

proptest! {
    #[test]
    fn run_round_trips(run in run_strategy()) {
        let text = tsv(|b| run.write_tsv(b).unwrap());
        let back = RunData::parse(text.as_slice()).unwrap();
        prop_assert_eq!(named_lists(&back), named_lists(&run));
        prop_assert_eq!(tsv(|b| back.write_tsv(b).unwrap()), text);
    }

    #[test]
    fn qrels_round_trip(grades in prop::collection::vec((0u8..4, 0u8..6, 0u8..4), 1..30)) {
        let mut rel = RelevanceTable::new();
        for (u, i, g) in grades {
            rel.set(format!("u{u}"), format!("i{i}"), g as f64 / 3.0).unwrap();
        }
        let text = tsv(|b| rel.write_tsv(b).unwrap());
        let back = RelevanceTable::parse(text.as_slice()).unwrap();
        prop_assert_eq!(back.items().len(), rel.items().len());
        prop_assert_eq!(back.users().len(), rel.users().len());
        for user in rel.users().names() {
            for item in rel.items().names() {
                let g = |t: &RelevanceTable| t.grade(t.users().get(user).unwrap(), t.items().get(item).unwrap());
                prop_assert_eq!(g(&back), g(&rel));
            }
        }
    }

    #[test]
    fn report_round_trips(run in run_strategy()) {
        let mut rel = RelevanceTable::new();
        for u in run.users().names() {
            rel.set(u.clone(), "i0", 1.0).unwrap();
            rel.set(u.clone(), "i1", 0.5).unwrap();
        }
        let cfg = JointConfig::default().with_k(2);
        let eval = evaluate(&run, &rel, &cfg, &Measure::ALL).unwrap();
        let report = ScoreReport::from_evaluation("sys", cfg, eval);
        let json = ScoreReport::from_json(&report.to_json().unwrap()).unwrap();
        prop_assert_eq!(&json.scores, &report.scores);
        let csv = ScoreReport::read_csv(report.to_csv().unwrap().as_bytes()).unwrap();
        prop_assert_eq!(&csv.scores, &report.scores);
    }

    #[test]
    fn kcore_is_idempotent(pairs in prop::collection::vec((0u8..8, 0u8..10), 0..120), c in 1usize..5) {
        let xs: Vec<Interaction> = pairs.iter().map(|(u, i)| Interaction::new(format!("u{u}"), format!("i{i}"))).collect();
        let once = kcore_filter(&xs, c);
        prop_assert_eq!(kcore_filter(&once, c), once);
    }

    #[test]
    fn split_partitions_the_input(n in 0usize..200, seed in any::<u64>(), temporal in any::<bool>()) {
        let xs: Vec<Interaction> = (0..n)
            .map(|j| Interaction::new(format!("u{}", j % 9), format!("i{j}")).at((j * 7 % 13) as i64))
            .collect();
        let mode = if temporal { SplitMode::Temporal } else { SplitMode::Random };
        let b = split(&xs, (0.8, 0.1, 0.1), mode, seed).unwrap();
        let key = |x: &Interaction| (x.user.clone(), x.item.clone());
        let mut all: Vec<_> = b.train.iter().chain(&b.validation).chain(&b.test).chain(&b.dropped).map(key).collect();
        let mut want: Vec<_> = xs.iter().map(key).collect();
        all.sort();
        want.sort();
        prop_assert_eq!(all, want);
    }
}
