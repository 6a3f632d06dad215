//! Semantic tableaux for the temporal fragment.
//!
//! A formula is first put in negation normal form and placed at state 0. Each
//! branch is expanded one entry at a time with the usual decompositions:
//!
//! | entry      | kind  | result                                  |
//! |------------|-------|-----------------------------------------|
//! | `a & b`    | alpha | `a`, `b`                                |
//! | `G a`      | alpha | `a`, `X G a`                            |
//! | `a \| b`   | beta  | `a` / `b`                               |
//! | `a -> b`   | beta  | `nnf(~a)` / `b`                         |
//! | `F a`      | beta  | `a` / `X F a` (eventuality deferred)    |
//!
//! When a state has nothing left but literals and `X` entries, the `X` bodies
//! are carried into the next state. A branch closes on a complementary pair of
//! literals at one state, or when the carried set repeats an earlier one while
//! an eventuality deferred at or before that earlier state is still pending.
//! It is open when nothing is carried or when the repeat leaves nothing pending
//! from before the loop.
//!
//! The deferred alternative of `F a` is only explored when the branch that
//! fulfils `a` immediately turns out closed; an open fulfilling branch already
//! settles the verdict, so the deferred copy is never materialized in the tree.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::formula::Formula;
use crate::syntax::render;

/// A formula asserted at a temporal state of a branch.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrefixedFormula {
    pub state: usize,
    pub formula: Formula,
}

/// The decomposition step that introduced a tree node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    Root,
    Conjunction,
    Always,
    Disjunction,
    Implication,
    /// Left child of `F a`: the eventuality is fulfilled now.
    Fulfil,
    /// Right child of `F a`: the eventuality is postponed to the next state.
    Defer,
    /// Body of an `X` entry carried into the following state.
    Step,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Root => "root",
            Rule::Conjunction => "and",
            Rule::Always => "always",
            Rule::Disjunction => "or",
            Rule::Implication => "implies",
            Rule::Fulfil => "eventually",
            Rule::Defer => "defer",
            Rule::Step => "next",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BranchStatus {
    Open,
    Closed,
    Unexpanded,
}

/// Why a branch closed or stayed open.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Termination {
    /// `atom` and `~atom` were both asserted at `state`.
    Contradiction { state: usize, atom: String },
    /// The set carried into `state` equals the one carried into `repeats`,
    /// with an eventuality still pending from before the loop.
    UnfulfilledLoop { state: usize, repeats: usize },
    /// The carried set repeats and every pending eventuality was fulfilled inside the loop.
    FulfilledLoop { state: usize, repeats: usize },
    /// Nothing was left to carry into a next state.
    Exhausted { state: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    /// Every distinct formula asserted along the branch, in derivation order.
    pub entries: Vec<PrefixedFormula>,
    /// Deferred eventualities (`F a` formulas) with the state they were first postponed at.
    pub pending: BTreeMap<Formula, usize>,
    pub status: BranchStatus,
    /// Literals asserted at each state.
    pub state_labels: BTreeMap<usize, BTreeSet<Formula>>,
    /// Atoms `a` for which an eventuality `F a` was fulfilled on this branch.
    pub fulfilled: BTreeSet<String>,
    pub termination: Option<Termination>,
    /// Tree node at which the branch ends.
    pub leaf: usize,
}

impl Branch {
    /// Pending eventualities as `(state, formula)` pairs.
    pub fn pending_eventualities(&self) -> BTreeSet<(usize, Formula)> {
        self.pending.iter().map(|(f, s)| (*s, f.clone())).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode {
    pub entry: PrefixedFormula,
    pub rule: Rule,
    pub children: Vec<usize>,
    /// Set on the node a branch terminates at.
    pub leaf: Option<BranchStatus>,
}

/// A finished truth tree. Node 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthTree {
    pub root: Formula,
    pub nodes: Vec<TreeNode>,
    pub branches: Vec<Branch>,
}

impl TruthTree {
    pub fn open_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.leaf == Some(BranchStatus::Open)).count()
    }

    pub fn closed_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.leaf == Some(BranchStatus::Closed)).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Sat,
    Unsat,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableauResult {
    pub verdict: Verdict,
    pub tree: TruthTree,
    pub open_branches: Vec<Branch>,
    /// For each open branch (same order), the atoms whose eventuality it fulfilled.
    pub fulfilled_targets: Vec<BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableauError {
    #[error("depth bound must be at least 1")]
    ZeroDepth,
    #[error("a branch reached the depth bound of {bound} states without closing or looping")]
    DepthExceeded { bound: usize },
}

/// Formulas a tableau for `f` can ever assert, `X`-wrapped unfoldings included.
pub fn closure(f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    close_over(&f.nnf(), &mut out);
    out
}

fn close_over(f: &Formula, out: &mut BTreeSet<Formula>) {
    if !out.insert(f.clone()) {
        return;
    }
    match f {
        Formula::Atom(_) | Formula::Not(_) => {}
        Formula::And(l, r) | Formula::Or(l, r) => {
            close_over(l, out);
            close_over(r, out);
        }
        Formula::Implies(l, r) => {
            close_over(&Formula::not((**l).clone()).nnf(), out);
            close_over(r, out);
        }
        Formula::Always(b) | Formula::Eventually(b) => {
            close_over(b, out);
            out.insert(Formula::next(f.clone()));
        }
        Formula::Next(b) => close_over(b, out),
    }
}

/// A depth bound that is never exceeded for `f`: one more than the number of
/// distinct sets that can be carried across a state boundary, and at least
/// `2 * |closure| + 2`.
pub fn default_depth(f: &Formula) -> usize {
    let cl = closure(f);
    let carried = cl.iter().filter(|g| matches!(g, Formula::Next(_))).count();
    let sets = if carried >= 24 { 1usize << 24 } else { 1usize << carried };
    (2 * cl.len() + 2).max(sets + 2)
}

/// Builds the finished truth tree for `f` and reads off the verdict.
pub fn decide(f: &Formula, depth_bound: usize) -> Result<TableauResult, TableauError> {
    if depth_bound == 0 {
        return Err(TableauError::ZeroDepth);
    }
    let root = f.nnf();
    let mut builder = Builder { nodes: Vec::new(), branches: Vec::new(), depth_bound };
    builder.nodes.push(TreeNode {
        entry: PrefixedFormula { state: 0, formula: root.clone() },
        rule: Rule::Root,
        children: Vec::new(),
        leaf: None,
    });
    let mut work = Work {
        entries: Vec::new(),
        expanded: Vec::new(),
        present: BTreeSet::new(),
        labels: BTreeMap::new(),
        pending: BTreeMap::new(),
        fulfilled: BTreeSet::new(),
        history: alloc::vec![BTreeSet::from([root.clone()])],
        state: 0,
        tip: 0,
    };
    let closed = work.assert_formula(root);
    if let Some(termination) = closed {
        builder.finish(work, BranchStatus::Closed, termination);
    } else {
        builder.explore(work)?;
    }

    let open_branches: Vec<Branch> =
        builder.branches.iter().filter(|b| b.status == BranchStatus::Open).cloned().collect();
    let fulfilled_targets = open_branches.iter().map(|b| b.fulfilled.clone()).collect();
    let verdict = if open_branches.is_empty() { Verdict::Unsat } else { Verdict::Sat };
    Ok(TableauResult {
        verdict,
        tree: TruthTree { root: f.clone(), nodes: builder.nodes, branches: builder.branches },
        open_branches,
        fulfilled_targets,
    })
}

/// `f` is valid iff the tree for `~f` closes.
pub fn is_valid(f: &Formula, depth_bound: usize) -> Result<bool, TableauError> {
    Ok(decide(&Formula::not(f.clone()), depth_bound)?.verdict == Verdict::Unsat)
}

/// Branch under construction.
#[derive(Clone)]
struct Work {
    entries: Vec<PrefixedFormula>,
    expanded: Vec<bool>,
    /// Formulas asserted at the current state.
    present: BTreeSet<Formula>,
    labels: BTreeMap<usize, BTreeSet<Formula>>,
    pending: BTreeMap<Formula, usize>,
    fulfilled: BTreeSet<String>,
    /// Sets carried into each state so far; index = state.
    history: Vec<BTreeSet<Formula>>,
    state: usize,
    tip: usize,
}

impl Work {
    /// Records `f` at the current state. Returns the contradiction if one arises.
    fn assert_formula(&mut self, f: Formula) -> Option<Termination> {
        if !self.present.insert(f.clone()) {
            return None;
        }
        let atomic = f.is_literal() || matches!(f, Formula::Next(_));
        let mut contradiction = None;
        if f.is_literal() {
            let complement = match &f {
                Formula::Not(inner) => (**inner).clone(),
                other => Formula::not(other.clone()),
            };
            if self.present.contains(&complement) {
                let atom = match complement {
                    Formula::Atom(name) => name,
                    Formula::Not(inner) => match *inner {
                        Formula::Atom(name) => name,
                        _ => unreachable!("literal complement"),
                    },
                    _ => unreachable!("literal complement"),
                };
                contradiction = Some(Termination::Contradiction { state: self.state, atom });
            }
            self.labels.entry(self.state).or_default().insert(f.clone());
        }
        self.entries.push(PrefixedFormula { state: self.state, formula: f });
        self.expanded.push(atomic);
        contradiction
    }

    /// Earliest unexpanded alpha entry at the current state, else earliest beta.
    fn next_entry(&self) -> Option<usize> {
        let mut beta = None;
        for (i, e) in self.entries.iter().enumerate() {
            if e.state != self.state || self.expanded[i] {
                continue;
            }
            if matches!(e.formula, Formula::And(..) | Formula::Always(_)) {
                return Some(i);
            }
            beta.get_or_insert(i);
        }
        beta
    }
}

struct Builder {
    nodes: Vec<TreeNode>,
    branches: Vec<Branch>,
    depth_bound: usize,
}

impl Builder {
    fn add_node(&mut self, work: &mut Work, formula: &Formula, rule: Rule) {
        let idx = self.nodes.len();
        self.nodes.push(TreeNode {
            entry: PrefixedFormula { state: work.state, formula: formula.clone() },
            rule,
            children: Vec::new(),
            leaf: None,
        });
        self.nodes[work.tip].children.push(idx);
        work.tip = idx;
    }

    /// Adds a tree node and asserts the formula on the branch.
    fn push(&mut self, work: &mut Work, formula: Formula, rule: Rule) -> Option<Termination> {
        self.add_node(work, &formula, rule);
        work.assert_formula(formula)
    }

    fn finish(&mut self, work: Work, status: BranchStatus, termination: Termination) -> bool {
        self.nodes[work.tip].leaf = Some(status);
        self.branches.push(Branch {
            entries: work.entries,
            pending: work.pending,
            status,
            state_labels: work.labels,
            fulfilled: work.fulfilled,
            termination: Some(termination),
            leaf: work.tip,
        });
        status == BranchStatus::Open
    }

    /// Expands a branch to completion. Returns whether any open branch was found below it.
    fn explore(&mut self, mut work: Work) -> Result<bool, TableauError> {
        loop {
            let Some(idx) = work.next_entry() else {
                match self.advance(&mut work)? {
                    Some((status, termination)) => return Ok(self.finish(work, status, termination)),
                    None => continue,
                }
            };
            work.expanded[idx] = true;
            let formula = work.entries[idx].formula.clone();
            match formula {
                Formula::And(l, r) => {
                    for part in [*l, *r] {
                        if let Some(t) = self.push(&mut work, part, Rule::Conjunction) {
                            return Ok(self.finish(work, BranchStatus::Closed, t));
                        }
                    }
                }
                Formula::Always(body) => {
                    let again = Formula::always((*body).clone());
                    if let Some(t) = self.push(&mut work, *body, Rule::Always) {
                        return Ok(self.finish(work, BranchStatus::Closed, t));
                    }
                    if let Some(t) = self.push(&mut work, Formula::next(again), Rule::Always) {
                        return Ok(self.finish(work, BranchStatus::Closed, t));
                    }
                }
                Formula::Or(l, r) => return self.fork(work, *l, *r, Rule::Disjunction),
                Formula::Implies(l, r) => {
                    let left = Formula::not(*l).nnf();
                    return self.fork(work, left, *r, Rule::Implication);
                }
                Formula::Eventually(body) => {
                    let eventuality = Formula::eventually((*body).clone());
                    let mut now = work.clone();
                    now.pending.remove(&eventuality);
                    if let Formula::Atom(name) = &*body {
                        now.fulfilled.insert(name.clone());
                    }
                    if self.child(now, *body, Rule::Fulfil)? {
                        return Ok(true);
                    }
                    let state = work.state;
                    work.pending.entry(eventuality.clone()).or_insert(state);
                    return self.child(work, Formula::next(eventuality), Rule::Defer);
                }
                Formula::Atom(_) | Formula::Not(_) | Formula::Next(_) => {
                    unreachable!("literals and next entries are never selected")
                }
            }
        }
    }

    fn fork(&mut self, work: Work, left: Formula, right: Formula, rule: Rule) -> Result<bool, TableauError> {
        let left_open = self.child(work.clone(), left, rule)?;
        let right_open = self.child(work, right, rule)?;
        Ok(left_open || right_open)
    }

    fn child(&mut self, mut work: Work, formula: Formula, rule: Rule) -> Result<bool, TableauError> {
        match self.push(&mut work, formula, rule) {
            Some(t) => Ok(self.finish(work, BranchStatus::Closed, t)),
            None => self.explore(work),
        }
    }

    /// Moves a fully expanded state to the next one, or reports how the branch ends.
    fn advance(&mut self, work: &mut Work) -> Result<Option<(BranchStatus, Termination)>, TableauError> {
        let carried: BTreeSet<Formula> = work
            .present
            .iter()
            .filter_map(|f| match f {
                Formula::Next(body) => Some((**body).clone()),
                _ => None,
            })
            .collect();
        let state = work.state;
        if carried.is_empty() {
            return Ok(Some((BranchStatus::Open, Termination::Exhausted { state })));
        }
        if let Some(repeats) = work.history.iter().position(|h| *h == carried) {
            let unfulfilled = work.pending.values().any(|&since| since <= repeats);
            let next = state + 1;
            return Ok(Some(if unfulfilled {
                (BranchStatus::Closed, Termination::UnfulfilledLoop { state: next, repeats })
            } else {
                (BranchStatus::Open, Termination::FulfilledLoop { state: next, repeats })
            }));
        }
        if state + 1 >= self.depth_bound {
            return Err(TableauError::DepthExceeded { bound: self.depth_bound });
        }
        work.state = state + 1;
        work.history.push(carried.clone());
        work.present.clear();
        for f in carried {
            if let Some(t) = self.push(work, f, Rule::Step) {
                return Ok(Some((BranchStatus::Closed, t)));
            }
        }
        Ok(None)
    }
}

/// Renders the tree as indented text: one `s<state>: <formula>` line per node,
/// `x` under closed branch ends and `o` under open ones.
pub fn render_tree(tree: &TruthTree) -> String {
    let mut out = String::new();
    if !tree.nodes.is_empty() {
        walk(tree, 0, "", "", &mut out);
    }
    out
}

fn walk(tree: &TruthTree, idx: usize, first: &str, rest: &str, out: &mut String) {
    let node = &tree.nodes[idx];
    out.push_str(first);
    out.push_str(&format!("s{}: {}", node.entry.state, render(&node.entry.formula)));
    if node.rule != Rule::Root {
        out.push_str(&format!("  [{}]", node.rule.name()));
    }
    out.push('\n');
    if let Some(status) = node.leaf {
        out.push_str(rest);
        out.push_str(if status == BranchStatus::Closed { "x" } else { "o" });
        out.push('\n');
    }
    match node.children.as_slice() {
        [] => {}
        [only] => walk(tree, *only, rest, rest, out),
        many => {
            for (i, &child) in many.iter().enumerate() {
                if i + 1 == many.len() {
                    walk(tree, child, &format!("{rest}`-- "), &format!("{rest}    "), out);
                } else {
                    walk(tree, child, &format!("{rest}|-- "), &format!("{rest}|   "), out);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;
    use alloc::string::ToString;
    use alloc::vec;

    fn run(text: &str) -> TableauResult {
        let f = parse(text).unwrap();
        decide(&f, default_depth(&f)).unwrap()
    }

    fn targets(r: &TableauResult) -> Vec<Vec<String>> {
        r.fulfilled_targets.iter().map(|s| s.iter().cloned().collect()).collect()
    }

    #[test]
    fn never_entered_gate_closes() {
        let r = run("G ~g3 & g3");
        assert_eq!(r.verdict, Verdict::Unsat);
        assert_eq!(r.tree.branches.len(), 1);
        let b = &r.tree.branches[0];
        assert_eq!(b.status, BranchStatus::Closed);
        assert_eq!(b.termination, Some(Termination::Contradiction { state: 0, atom: "g3".to_string() }));
        let labels = &b.state_labels[&0];
        assert!(labels.contains(&Formula::atom("g3")));
        assert!(labels.contains(&Formula::not(Formula::atom("g3"))));
        assert!(r.open_branches.is_empty());
    }

    #[test]
    fn single_preference_one_open_one_closed() {
        let r = run("g2 & (g2 -> F p010)");
        assert_eq!(r.verdict, Verdict::Sat);
        assert_eq!(r.tree.closed_leaves(), 1);
        assert_eq!(r.tree.open_leaves(), 1);
        assert_eq!(targets(&r), vec![vec!["p010".to_string()]]);
    }

    #[test]
    fn two_preferences_two_open_two_closed() {
        let r = run("g1 & ((g1 -> F p018) | (g1 -> F p015))");
        assert_eq!(r.verdict, Verdict::Sat);
        assert_eq!(r.tree.closed_leaves(), 2);
        assert_eq!(r.tree.open_leaves(), 2);
        assert_eq!(targets(&r), vec![vec!["p018".to_string()], vec!["p015".to_string()]]);
    }

    #[test]
    fn propositional_contradiction() {
        assert_eq!(run("p & ~p").verdict, Verdict::Unsat);
    }

    #[test]
    fn eventuality_never_fulfilled() {
        let r = run("F p & G ~p");
        assert_eq!(r.verdict, Verdict::Unsat);
        assert!(r
            .tree
            .branches
            .iter()
            .any(|b| matches!(b.termination, Some(Termination::UnfulfilledLoop { .. }))));
    }

    #[test]
    fn recurring_eventuality_loops_open() {
        let r = run("G F p & G F ~p");
        assert_eq!(r.verdict, Verdict::Sat);
    }

    #[test]
    fn validity() {
        let valid = |t: &str| {
            let f = parse(t).unwrap();
            is_valid(&f, default_depth(&Formula::not(f.clone()))).unwrap()
        };
        assert!(valid("p | ~p"));
        assert!(valid("G p -> F p"));
        assert!(!valid("p"));
    }

    #[test]
    fn depth_errors() {
        let f = Formula::next(Formula::atom("p"));
        assert_eq!(decide(&f, 0), Err(TableauError::ZeroDepth));
        assert_eq!(decide(&f, 1).unwrap_err(), TableauError::DepthExceeded { bound: 1 });
        assert_eq!(decide(&f, 2).unwrap().verdict, Verdict::Sat);
        // the loop back to state 0 is found before the bound matters
        assert_eq!(decide(&parse("G F p").unwrap(), 1).unwrap().verdict, Verdict::Sat);
    }

    #[test]
    fn render_marks() {
        let text = render_tree(&run("G ~g3 & g3").tree);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.first(), Some(&"s0: (G (~g3) & g3)"));
        assert_eq!(lines.last(), Some(&"x"));
        assert!(!text.contains("\no"));

        assert_eq!(render_tree(&run("p").tree), "s0: p\no\n");

        let text = render_tree(&run("g1 & ((g1 -> F p018) | (g1 -> F p015))").tree);
        let marks = |m: &str| text.lines().filter(|l| l.trim_start_matches(['|', '`', '-', ' ']) == m).count();
        assert_eq!(marks("x"), 2);
        assert_eq!(marks("o"), 2);
        assert!(text.contains("s0: p018  [eventually]"));
    }

    #[test]
    fn step_entries_advance_state() {
        let r = run("G p & F ~p");
        assert_eq!(r.verdict, Verdict::Unsat);
        for b in &r.tree.branches {
            let states: Vec<usize> = b.entries.iter().map(|e| e.state).collect();
            assert!(states.windows(2).all(|w| w[1] == w[0] || w[1] == w[0] + 1));
        }
    }
}
