mod common;

use common::*;
use plankit::scoring::score_plan;
use plankit::{CommandTriple, MatchMode};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn raws(p: &[CommandTriple]) -> Vec<Raw> {
    p.iter().map(raw).collect()
}

#[test]
fn exhaustive_short_pairs_match_brute_force() {
    let alphabet = scoring_alphabet();
    let golds = sequences(&alphabet, 1..=3);
    let preds = sequences(&alphabet, 0..=3);
    for mode in MatchMode::BOTH {
        let permissive = mode == MatchMode::Permissive;
        for g in &golds {
            for p in &preds {
                let ours = plan_scores_tally(g, &score_plan(g, p, mode));
                let theirs = oracle_tally(&[(raws(g), raws(p))], permissive);
                assert_eq!(ours, theirs, "{mode:?} gold {g:?} pred {p:?}");
            }
        }
    }
}

#[test]
fn aggregate_matches_brute_force_on_random_corpus() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let vocab = random_vocab(&mut rng, 12);
    let pairs: Vec<_> = (0..2000)
        .map(|_| {
            let g = random_plan(&mut rng, &vocab, 1..=12);
            let p = random_plan(&mut rng, &vocab, 0..=12);
            (g, p)
        })
        .collect();
    let raw_pairs: Vec<_> = pairs.iter().map(|(g, p)| (raws(g), raws(p))).collect();
    for mode in MatchMode::BOTH {
        assert_eq!(aggregate_tally(&pairs, mode), oracle_tally(&raw_pairs, mode == MatchMode::Permissive));
    }
}

fn arb_pair() -> impl Strategy<Value = (Vec<CommandTriple>, Vec<CommandTriple>)> {
    (any::<u64>(), 1usize..=20, 0usize..=20).prop_map(|(seed, gl, pl)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vocab = random_vocab(&mut rng, 6);
        (random_plan(&mut rng, &vocab, gl..=gl), random_plan(&mut rng, &vocab, pl..=pl))
    })
}

proptest! {
    #[test]
    fn permissive_dominates_strict((g, p) in arb_pair()) {
        let s = score_plan(&g, &p, MatchMode::Strict);
        let q = score_plan(&g, &p, MatchMode::Permissive);
        prop_assert_eq!(&s.command, &q.command);
        for (a, b) in s.triple.iter().zip(&q.triple) { prop_assert!(!a | b); }
        for (a, b) in s.arg1.iter().zip(&q.arg1) { prop_assert!(a.unwrap_or(false) <= b.unwrap_or(false)); }
        for (a, b) in s.arg2.iter().zip(&q.arg2) { prop_assert!(a.unwrap_or(false) <= b.unwrap_or(false)); }
        prop_assert!(!s.full_sequence | q.full_sequence);
        prop_assert!(!s.full_minus_first | q.full_minus_first);
    }

    #[test]
    fn full_sequence_implies_minus_first((g, p) in arb_pair()) {
        for mode in MatchMode::BOTH {
            let s = score_plan(&g, &p, mode);
            prop_assert!(!s.full_sequence | s.full_minus_first);
            prop_assert_eq!(s.full_sequence, s.triple.iter().all(|b| *b) && g.len() == p.len());
        }
    }

    #[test]
    fn a_plan_scores_perfectly_against_itself((g, _) in arb_pair()) {
        let s = score_plan(&g, &g, MatchMode::Strict);
        prop_assert!(s.full_sequence && s.full_minus_first && s.triple.iter().all(|b| *b));
    }
}
