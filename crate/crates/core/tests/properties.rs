//! Random compositions past the exhaustively swept sizes.

use proptest::prelude::*;

use wlab::component::check_e_in_u;
use wlab::diagram::neighboring_pairs;
use wlab::section::{build_section, lemma_checks};
use wlab::weyl::{excluded_direct, excluded_via_word, structural_checks};
use wlab::Composition;

fn composition() -> impl Strategy<Value = Composition> {
    prop::collection::vec(1usize..=4, 1..=7)
        .prop_filter("size 10..=16", |p| {
            (10..=16).contains(&p.iter().sum::<usize>())
        })
        .prop_map(|p| Composition::new(p).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn closed_form_matches_inversions(c in composition()) {
        for p in neighboring_pairs(&c) {
            prop_assert_eq!(excluded_direct(&c, &p), excluded_via_word(&c, &p));
        }
    }

    #[test]
    fn section_lemmas_hold(c in composition()) {
        let ls = build_section(&c).unwrap();
        let report = lemma_checks(&ls);
        prop_assert!(report.ok(), "{:?}", report);
        prop_assert_eq!(ls.v().len(), neighboring_pairs(&c).len());
        prop_assert!(check_e_in_u(&c).unwrap());
    }

    #[test]
    fn structural_facts_hold(c in composition()) {
        prop_assert!(structural_checks(&c).always_true_parts_hold());
    }
}
