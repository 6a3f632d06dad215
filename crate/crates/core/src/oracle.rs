//! Satisfiability by search over ultimately periodic traces `u·v^ω`.
//!
//! This is independent of the tableau: it evaluates the standard semantics on
//! concrete lasso-shaped traces. Rather than evaluating every trace from
//! scratch, it computes the truth vector (one bit per subformula) at the start
//! of every periodic tail `v^ω`, then prepends letters one at a time; the
//! vector at a position depends only on its letter and the vector after it.
//! The set of vectors reachable with `|u| <= max_prefix` is exactly the set of
//! vectors at position 0 of all traces in the search space.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::formula::Formula;
use crate::tableau::Verdict;

pub const MAX_ATOMS: usize = 4;
const MAX_SUBFORMULAS: usize = 128;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("formula has {0} atoms; the trace search is limited to {MAX_ATOMS}")]
    TooManyAtoms(usize),
    #[error("formula has {0} distinct subformulas; at most {MAX_SUBFORMULAS} are supported")]
    TooLarge(usize),
    #[error("prefix and period bounds must be at least 1")]
    ZeroBound,
}

/// A valuation of the formula's atoms: bit `i` is the `i`-th atom in sorted order.
pub type Letter = u8;

#[derive(Clone, Copy)]
enum Op {
    Atom(u8),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Eventually(usize),
    Always(usize),
    Next(usize),
}

struct Compiled {
    ops: Vec<Op>,
    root: usize,
    letters: u8,
}

fn compile(f: &Formula) -> Result<Compiled, OracleError> {
    let atoms: Vec<String> = f.atoms().into_iter().collect();
    if atoms.len() > MAX_ATOMS {
        return Err(OracleError::TooManyAtoms(atoms.len()));
    }
    let mut subs: Vec<Formula> = f.subformulas().into_iter().collect();
    if subs.len() > MAX_SUBFORMULAS {
        return Err(OracleError::TooLarge(subs.len()));
    }
    // children strictly smaller than parents, so size order is evaluation order
    subs.sort_by_key(Formula::size);
    let index: BTreeMap<&Formula, usize> = subs.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let ops = subs
        .iter()
        .map(|g| match g {
            Formula::Atom(a) => Op::Atom(atoms.iter().position(|x| x == a).expect("atom collected") as u8),
            Formula::Not(x) => Op::Not(index[&**x]),
            Formula::And(l, r) => Op::And(index[&**l], index[&**r]),
            Formula::Or(l, r) => Op::Or(index[&**l], index[&**r]),
            Formula::Implies(l, r) => Op::Implies(index[&**l], index[&**r]),
            Formula::Eventually(x) => Op::Eventually(index[&**x]),
            Formula::Always(x) => Op::Always(index[&**x]),
            Formula::Next(x) => Op::Next(index[&**x]),
        })
        .collect();
    Ok(Compiled { ops, root: index[f], letters: 1 << atoms.len() })
}

fn bit(v: u128, i: usize) -> bool {
    v >> i & 1 == 1
}

impl Compiled {
    /// Truth vectors at every position of `word^ω`, written into `vecs`.
    fn periodic(&self, word: &[Letter], vecs: &mut Vec<u128>) {
        let q = word.len();
        vecs.clear();
        vecs.resize(q, 0);
        for (i, op) in self.ops.iter().enumerate() {
            let mask = 1u128 << i;
            match *op {
                // every position of the cycle recurs forever
                Op::Eventually(x) => {
                    if vecs.iter().any(|v| bit(*v, x)) {
                        vecs.iter_mut().for_each(|v| *v |= mask);
                    }
                }
                Op::Always(x) => {
                    if vecs.iter().all(|v| bit(*v, x)) {
                        vecs.iter_mut().for_each(|v| *v |= mask);
                    }
                }
                Op::Next(x) => {
                    let first = bit(vecs[0], x);
                    for p in 0..q {
                        let b = if p + 1 == q { first } else { bit(vecs[p + 1], x) };
                        vecs[p] |= (b as u128) << i;
                    }
                }
                _ => {
                    for (p, v) in vecs.iter_mut().enumerate() {
                        *v |= (self.local(*op, word[p], *v) as u128) << i;
                    }
                }
            }
        }
    }

    fn local(&self, op: Op, letter: Letter, v: u128) -> bool {
        match op {
            Op::Atom(a) => letter >> a & 1 == 1,
            Op::Not(x) => !bit(v, x),
            Op::And(l, r) => bit(v, l) && bit(v, r),
            Op::Or(l, r) => bit(v, l) || bit(v, r),
            Op::Implies(l, r) => !bit(v, l) || bit(v, r),
            Op::Eventually(_) | Op::Always(_) | Op::Next(_) => unreachable!("temporal ops are not local"),
        }
    }

    fn carried_mask(&self) -> u128 {
        self.ops.iter().enumerate().fold(0, |m, (i, op)| match *op {
            Op::Next(x) => m | 1 << x,
            Op::Eventually(_) | Op::Always(_) => m | 1 << i,
            _ => m,
        })
    }

    /// Truth vector at a position carrying `letter`, followed by a position with vector `after`.
    fn step(&self, letter: Letter, after: u128) -> u128 {
        let mut v = 0u128;
        for (i, op) in self.ops.iter().enumerate() {
            let b = match *op {
                Op::Next(x) => bit(after, x),
                Op::Eventually(x) => bit(v, x) || bit(after, i),
                Op::Always(x) => bit(v, x) && bit(after, i),
                local => self.local(local, letter, v),
            };
            v |= (b as u128) << i;
        }
        v
    }
}

/// Decides `f` over all traces `u·v^ω` with `|u| <= max_prefix` and `1 <= |v| <= max_period`.
pub fn oracle_decide(f: &Formula, max_prefix: usize, max_period: usize) -> Result<Verdict, OracleError> {
    if max_prefix == 0 || max_period == 0 {
        return Err(OracleError::ZeroBound);
    }
    let c = compile(f)?;
    // Only these bits of a successor's vector are ever read by `step`.
    let carried = c.carried_mask();
    let root = 1u128 << c.root;
    // Every v^ω equals w^ω for a Lyndon word w no longer than v, and the
    // positions of w^ω are exactly the rotations of w. Visiting every position
    // of every Lyndon word therefore covers position 0 of every periodic tail.
    let mut seen: BTreeSet<u128> = BTreeSet::new();
    let mut frontier = Vec::new();
    let mut buf = Vec::new();
    let mut sat = false;
    for_each_lyndon_word(max_period, c.letters, |word| {
        if sat {
            return;
        }
        c.periodic(word, &mut buf);
        for &v in &buf {
            sat |= v & root != 0;
            if seen.insert(v & carried) {
                frontier.push(v & carried);
            }
        }
    });
    for _ in 0..max_prefix {
        if sat || frontier.is_empty() {
            break;
        }
        let mut fresh = Vec::new();
        for &after in &frontier {
            for letter in 0..c.letters {
                let v = c.step(letter, after);
                sat |= v & root != 0;
                if seen.insert(v & carried) {
                    fresh.push(v & carried);
                }
            }
        }
        frontier = fresh;
    }
    Ok(if sat { Verdict::Sat } else { Verdict::Unsat })
}

/// Duval's generation of all Lyndon words of length `1..=max_len` over `letters` symbols.
fn for_each_lyndon_word(max_len: usize, letters: u8, mut visit: impl FnMut(&[Letter])) {
    let mut w: Vec<Letter> = alloc::vec![0];
    visit(&w);
    loop {
        let m = w.len();
        while w.len() < max_len {
            w.push(w[w.len() - m]);
        }
        while w.last() == Some(&(letters - 1)) {
            w.pop();
        }
        let Some(last) = w.last_mut() else { break };
        *last += 1;
        visit(&w);
    }
}

/// Direct evaluation of `f` at position 0 of `prefix · period^ω`.
///
/// Each position is given as the set of atoms true there. Slow and literal;
/// kept as the reference the trace search is tested against.
pub fn holds_on_lasso(f: &Formula, prefix: &[BTreeSet<String>], period: &[BTreeSet<String>]) -> bool {
    assert!(!period.is_empty(), "lasso period must be nonempty");
    let trace: Vec<&BTreeSet<String>> = prefix.iter().chain(period.iter()).collect();
    eval_at(f, 0, &trace, prefix.len())
}

fn eval_at(f: &Formula, pos: usize, trace: &[&BTreeSet<String>], loop_start: usize) -> bool {
    let n = trace.len();
    let succ = |p: usize| if p + 1 == n { loop_start } else { p + 1 };
    // positions visited from `pos` onwards, each once
    let future = || {
        let start = pos;
        let tail_from = if pos < loop_start { loop_start } else { pos };
        (start..n).chain(loop_start..tail_from)
    };
    match f {
        Formula::Atom(a) => trace[pos].contains(a),
        Formula::Not(x) => !eval_at(x, pos, trace, loop_start),
        Formula::And(l, r) => eval_at(l, pos, trace, loop_start) && eval_at(r, pos, trace, loop_start),
        Formula::Or(l, r) => eval_at(l, pos, trace, loop_start) || eval_at(r, pos, trace, loop_start),
        Formula::Implies(l, r) => !eval_at(l, pos, trace, loop_start) || eval_at(r, pos, trace, loop_start),
        Formula::Next(x) => eval_at(x, succ(pos), trace, loop_start),
        Formula::Eventually(x) => future().any(|p| eval_at(x, p, trace, loop_start)),
        Formula::Always(x) => future().all(|p| eval_at(x, p, trace, loop_start)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;
    use alloc::string::ToString;
    use alloc::vec;

    fn verdict(text: &str) -> Verdict {
        oracle_decide(&parse(text).unwrap(), 6, 4).unwrap()
    }

    #[test]
    fn basic_verdicts() {
        assert_eq!(verdict("p & ~p"), Verdict::Unsat);
        assert_eq!(verdict("F p"), Verdict::Sat);
        assert_eq!(verdict("G ~g3 & g3"), Verdict::Unsat);
        assert_eq!(verdict("F p & G ~p"), Verdict::Unsat);
        assert_eq!(verdict("G F p & G F ~p"), Verdict::Sat);
        assert_eq!(verdict("~(G p -> F p)"), Verdict::Unsat);
    }

    #[test]
    fn prefix_matters() {
        // needs a prefix of length 2 before the loop
        let f = Formula::and(
            Formula::atom("p"),
            Formula::next(Formula::and(Formula::atom("p"), Formula::next(Formula::always(Formula::not(Formula::atom("p")))))),
        );
        assert_eq!(oracle_decide(&f, 1, 1).unwrap(), Verdict::Unsat);
        assert_eq!(oracle_decide(&f, 2, 1).unwrap(), Verdict::Sat);
    }

    #[test]
    fn lyndon_word_counts() {
        // necklace counts of primitive words: 8, 28, 168, 1008 for lengths 1..=4 over 8 letters
        let mut by_len = [0usize; 5];
        for_each_lyndon_word(4, 8, |w| by_len[w.len()] += 1);
        assert_eq!(by_len, [0, 8, 28, 168, 1008]);
        let mut binary = Vec::new();
        for_each_lyndon_word(3, 2, |w| binary.push(w.to_vec()));
        assert_eq!(binary, [vec![0], vec![0, 0, 1], vec![0, 1], vec![0, 1, 1], vec![1]]);
    }

    #[test]
    fn guards() {
        let f = parse("a & b & c & d & e").unwrap();
        assert_eq!(oracle_decide(&f, 1, 1), Err(OracleError::TooManyAtoms(5)));
        assert_eq!(oracle_decide(&parse("p").unwrap(), 0, 1), Err(OracleError::ZeroBound));
        assert_eq!(oracle_decide(&parse("p").unwrap(), 1, 0), Err(OracleError::ZeroBound));
    }

    #[test]
    fn lasso_evaluation() {
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>();
        let f = parse("~p & F G p").unwrap();
        assert!(holds_on_lasso(&f, &[set(&[])], &[set(&["p"])]));
        assert!(!holds_on_lasso(&f, &[], &[set(&[]), set(&["p"])]));
        let g = parse("G F q").unwrap();
        assert!(holds_on_lasso(&g, &[set(&["q"])], &[set(&[]), set(&["q"])]));
        assert!(!holds_on_lasso(&g, &[set(&["q"])], &[set(&[])]));
    }
}
