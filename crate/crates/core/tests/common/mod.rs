#![allow(dead_code)]

use proptest::prelude::*;
use smartpark_core::Formula;

pub const ATOMS: [&str; 3] = ["p", "q", "r"];

/// Every formula over `ATOMS` with exactly `size` syntax nodes, surface connectives only.
pub fn formulas_of_size(size: usize) -> Vec<Formula> {
    let mut table: Vec<Vec<Formula>> = vec![Vec::new()];
    for n in 1..=size {
        let mut out = Vec::new();
        if n == 1 {
            out.extend(ATOMS.iter().map(|a| Formula::atom(*a)));
        } else {
            for f in &table[n - 1] {
                out.push(Formula::not(f.clone()));
                out.push(Formula::eventually(f.clone()));
                out.push(Formula::always(f.clone()));
            }
            for left in 1..n - 1 {
                let right = n - 1 - left;
                for l in &table[left] {
                    for r in &table[right] {
                        out.push(Formula::and(l.clone(), r.clone()));
                        out.push(Formula::or(l.clone(), r.clone()));
                        out.push(Formula::implies(l.clone(), r.clone()));
                    }
                }
            }
        }
        table.push(out);
    }
    table.swap_remove(size)
}

pub fn formulas_up_to(size: usize) -> Vec<Formula> {
    (1..=size).flat_map(formulas_of_size).collect()
}

/// Random surface formulas over the given atoms.
pub fn arb_formula(atoms: &'static [&'static str], depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = proptest::sample::select(atoms).prop_map(Formula::atom);
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::eventually),
            inner.clone().prop_map(Formula::always),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::implies(l, r)),
        ]
    })
}

/// Random formulas that may also contain the internal next operator.
pub fn arb_internal_formula(atoms: &'static [&'static str], depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = proptest::sample::select(atoms).prop_map(Formula::atom);
    leaf.prop_recursive(depth, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::eventually),
            inner.clone().prop_map(Formula::always),
            inner.clone().prop_map(Formula::next),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::and(l, r)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Formula::or(l, r)),
            (inner.clone(), inner).prop_map(|(l, r)| Formula::implies(l, r)),
        ]
    })
}
