#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use smartpark_core::Formula;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

/// Every formula over `atoms` with exactly `size` nodes, built from the surface connectives.
pub fn formulas_of_size(atoms: &[&str], size: usize) -> Vec<Formula> {
    let mut table: Vec<Vec<Formula>> = vec![Vec::new()];
    for n in 1..=size {
        let mut out = Vec::new();
        if n == 1 {
            out.extend(atoms.iter().map(|a| Formula::atom(*a)));
        } else {
            for f in &table[n - 1] {
                out.push(Formula::not(f.clone()));
                out.push(Formula::eventually(f.clone()));
                out.push(Formula::always(f.clone()));
            }
            for left in 1..n - 1 {
                for l in &table[left] {
                    for r in &table[n - 1 - left] {
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

pub fn formulas_up_to(atoms: &[&str], size: usize) -> Vec<Formula> {
    (1..=size).flat_map(|n| formulas_of_size(atoms, n)).collect()
}

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
