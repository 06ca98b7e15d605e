mod common;

use common::*;
use plankit::analysis::{align, classify, EditOp, ErrorLabel};
use plankit::CommandTriple;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn cost_equals_levenshtein_on_short_plans() {
    let seqs = sequences(&alignment_alphabet(), 0..=4);
    for g in &seqs {
        for p in &seqs {
            let s = align(g, p);
            assert_eq!(s.cost, levenshtein(g, p), "gold {g:?} pred {p:?}");
            assert_eq!(s.replay(g), *p);
        }
    }
}

fn arb_pair() -> impl Strategy<Value = (Vec<CommandTriple>, Vec<CommandTriple>)> {
    (any::<u64>(), 0usize..=10, 0usize..=10).prop_map(|(seed, gl, pl)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let vocab = random_vocab(&mut rng, 4);
        (random_plan(&mut rng, &vocab, gl..=gl), random_plan(&mut rng, &vocab, pl..=pl))
    })
}

proptest! {
    #[test]
    fn script_is_minimal_and_replays((g, p) in arb_pair()) {
        let s = align(&g, &p);
        prop_assert_eq!(s.cost, levenshtein(&g, &p));
        prop_assert_eq!(s.cost, s.ops.iter().filter(|o| !o.is_match()).count());
        prop_assert_eq!(s.replay(&g), p);
    }

    #[test]
    fn every_edit_gets_one_primary_label((g, p) in arb_pair()) {
        let s = align(&g, &p);
        let c = classify(&g, &p, &s).unwrap();
        let edits: Vec<usize> = s.ops.iter().enumerate().filter(|(_, o)| !o.is_match()).map(|(i, _)| i).collect();
        let primary: Vec<usize> = c
            .attributions
            .iter()
            .filter(|(_, l)| *l != ErrorLabel::OffsetError)
            .map(|(i, _)| *i)
            .collect();
        let mut sorted = primary.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), primary.len(), "an op was labelled twice");
        prop_assert_eq!(sorted, edits);
        prop_assert_eq!(c.labels.is_empty(), s.cost == 0);
    }

    #[test]
    fn identical_plans_align_to_matches((g, _) in arb_pair()) {
        let s = align(&g, &g);
        prop_assert_eq!(s.cost, 0);
        prop_assert!(s.ops.iter().all(EditOp::is_match));
    }
}
