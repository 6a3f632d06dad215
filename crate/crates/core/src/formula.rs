//! Abstract syntax of the temporal fragment and normal-form preprocessing.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::string::String;

/// A propositional linear temporal logic formula.
///
/// Structural equality is identity: two formulas are the same iff their trees
/// are equal. `Next` is internal; the surface syntax cannot produce it.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Always(Box<Formula>),
    Next(Box<Formula>),
}

/// Returns true if `name` is a legal atom name: `[a-zA-Z][a-zA-Z0-9_]*`.
pub fn is_atom_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => chars.all(|c| c.is_ascii_alphanumeric() || c == '_'),
        _ => false,
    }
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Self {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Formula::Always(Box::new(f))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    /// `gate -> F space`, the shape of a learned parking preference.
    pub fn preference(gate: &str, space: &str) -> Self {
        Formula::implies(Formula::atom(gate), Formula::eventually(Formula::atom(space)))
    }

    /// `G ~gate`, the "never entered this gate" shape.
    pub fn never(gate: &str) -> Self {
        Formula::always(Formula::not(Formula::atom(gate)))
    }

    /// If this formula has the shape `gate -> F space` over atoms, returns both names.
    pub fn as_preference(&self) -> Option<(&str, &str)> {
        match self {
            Formula::Implies(l, r) => match (&**l, &**r) {
                (Formula::Atom(g), Formula::Eventually(body)) => match &**body {
                    Formula::Atom(p) => Some((g.as_str(), p.as_str())),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// If this formula has the shape `G ~gate`, returns the gate name.
    pub fn as_never(&self) -> Option<&str> {
        match self {
            Formula::Always(body) => match &**body {
                Formula::Not(inner) => match &**inner {
                    Formula::Atom(g) => Some(g.as_str()),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// A literal is an atom or a negated atom.
    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(inner) => matches!(**inner, Formula::Atom(_)),
            _ => false,
        }
    }

    /// Number of nodes in the syntax tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(f) | Formula::Eventually(f) | Formula::Always(f) | Formula::Next(f) => 1 + f.size(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => 1 + l.size() + r.size(),
        }
    }

    /// The exact set of atom names occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                out.insert(a.clone());
            }
            Formula::Not(f) | Formula::Eventually(f) | Formula::Always(f) | Formula::Next(f) => f.collect_atoms(out),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    /// All distinct subformulas, the formula itself included.
    pub fn subformulas(&self) -> BTreeSet<Formula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<Formula>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            Formula::Atom(_) => {}
            Formula::Not(f) | Formula::Eventually(f) | Formula::Always(f) | Formula::Next(f) => {
                f.collect_subformulas(out)
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.collect_subformulas(out);
                r.collect_subformulas(out);
            }
        }
    }

    /// Applies `rename` to every atom name.
    pub fn map_atoms(&self, rename: &impl Fn(&str) -> String) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(rename(a)),
            Formula::Not(f) => Formula::not(f.map_atoms(rename)),
            Formula::Eventually(f) => Formula::eventually(f.map_atoms(rename)),
            Formula::Always(f) => Formula::always(f.map_atoms(rename)),
            Formula::Next(f) => Formula::next(f.map_atoms(rename)),
            Formula::And(l, r) => Formula::and(l.map_atoms(rename), r.map_atoms(rename)),
            Formula::Or(l, r) => Formula::or(l.map_atoms(rename), r.map_atoms(rename)),
            Formula::Implies(l, r) => Formula::implies(l.map_atoms(rename), r.map_atoms(rename)),
        }
    }

    /// Negation normal form. Negations are pushed onto atoms; implication is
    /// kept as a connective (only its negation is rewritten).
    pub fn nnf(&self) -> Formula {
        match self {
            Formula::Atom(_) => self.clone(),
            Formula::Not(inner) => inner.negated_nnf(),
            Formula::And(l, r) => Formula::and(l.nnf(), r.nnf()),
            Formula::Or(l, r) => Formula::or(l.nnf(), r.nnf()),
            Formula::Implies(l, r) => Formula::implies(l.nnf(), r.nnf()),
            Formula::Eventually(f) => Formula::eventually(f.nnf()),
            Formula::Always(f) => Formula::always(f.nnf()),
            Formula::Next(f) => Formula::next(f.nnf()),
        }
    }

    /// `nnf(~self)` without building the intermediate negation.
    fn negated_nnf(&self) -> Formula {
        match self {
            Formula::Atom(_) => Formula::not(self.clone()),
            Formula::Not(inner) => inner.nnf(),
            Formula::And(l, r) => Formula::or(l.negated_nnf(), r.negated_nnf()),
            Formula::Or(l, r) => Formula::and(l.negated_nnf(), r.negated_nnf()),
            Formula::Implies(l, r) => Formula::and(l.nnf(), r.negated_nnf()),
            Formula::Eventually(f) => Formula::always(f.negated_nnf()),
            Formula::Always(f) => Formula::eventually(f.negated_nnf()),
            Formula::Next(f) => Formula::next(f.negated_nnf()),
        }
    }

    /// True when negation occurs only directly on atoms.
    pub fn is_nnf(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(inner) => matches!(**inner, Formula::Atom(_)),
            Formula::Eventually(f) | Formula::Always(f) | Formula::Next(f) => f.is_nnf(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => l.is_nnf() && r.is_nnf(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn a(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn atom_names() {
        assert!(is_atom_name("p018"));
        assert!(is_atom_name("idOla91"));
        assert!(is_atom_name("a_b"));
        assert!(!is_atom_name(""));
        assert!(!is_atom_name("1p"));
        assert!(!is_atom_name("_p"));
        assert!(!is_atom_name("p-1"));
    }

    #[test]
    fn nnf_duality_and_implication() {
        let not_always = Formula::not(Formula::always(a("p")));
        assert_eq!(not_always.nnf(), Formula::eventually(Formula::not(a("p"))));

        let not_imp = Formula::not(Formula::implies(a("p"), a("q")));
        assert_eq!(not_imp.nnf(), Formula::and(a("p"), Formula::not(a("q"))));

        let never_g3 = Formula::and(Formula::never("g3"), a("g3"));
        assert_eq!(never_g3.nnf(), never_g3);
    }

    #[test]
    fn nnf_keeps_implication() {
        let f = Formula::implies(Formula::not(Formula::not(a("p"))), a("q"));
        assert_eq!(f.nnf(), Formula::implies(a("p"), a("q")));
    }

    #[test]
    fn nnf_pushes_through_next() {
        let f = Formula::not(Formula::next(Formula::or(a("p"), a("q"))));
        assert_eq!(f.nnf(), Formula::next(Formula::and(Formula::not(a("p")), Formula::not(a("q")))));
    }

    #[test]
    fn atom_sets() {
        let never_g3 = Formula::and(Formula::never("g3"), a("g3"));
        assert_eq!(never_g3.atoms().into_iter().collect::<vec::Vec<_>>(), vec!["g3".to_string()]);
        let two_prefs = Formula::and(
            a("g1"),
            Formula::or(Formula::preference("g1", "p018"), Formula::preference("g1", "p015")),
        );
        let names: vec::Vec<_> = two_prefs.atoms().into_iter().collect();
        assert_eq!(names, vec!["g1", "p015", "p018"]);
        assert_eq!(a("p").atoms().len(), 1);
    }

    #[test]
    fn shape_helpers() {
        assert_eq!(Formula::preference("g2", "p018").as_preference(), Some(("g2", "p018")));
        assert_eq!(Formula::never("g3").as_never(), Some("g3"));
        assert_eq!(Formula::never("g3").as_preference(), None);
        assert_eq!(Formula::implies(a("g2"), a("p")).as_preference(), None);
    }
}
