mod common;

use std::collections::BTreeSet;

use common::arb_internal_formula;
use proptest::prelude::*;
use smartpark_core::oracle::{holds_on_lasso, oracle_decide};
use smartpark_core::tableau::Verdict;
use smartpark_core::Formula;

/// Every word of length `len` over the subsets of `atoms`.
fn words(atoms: &BTreeSet<String>, len: usize) -> Vec<Vec<BTreeSet<String>>> {
    let atoms: Vec<&String> = atoms.iter().collect();
    let letters: Vec<BTreeSet<String>> = (0..1usize << atoms.len())
        .map(|m| atoms.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, a)| (*a).clone()).collect())
        .collect();
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                letters.iter().map(move |l| {
                    let mut w = w.clone();
                    w.push(l.clone());
                    w
                })
            })
            .collect();
    }
    out
}

fn brute_force(f: &Formula, max_prefix: usize, max_period: usize) -> Verdict {
    let atoms = f.atoms();
    for u in 0..=max_prefix {
        for v in 1..=max_period {
            for prefix in words(&atoms, u) {
                for period in words(&atoms, v) {
                    if holds_on_lasso(f, &prefix, &period) {
                        return Verdict::Sat;
                    }
                }
            }
        }
    }
    Verdict::Unsat
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn lasso_search_matches_direct_evaluation(f in arb_internal_formula(&["p", "q"], 4)) {
        prop_assert_eq!(oracle_decide(&f, 2, 2).unwrap(), brute_force(&f, 2, 2));
    }
}
