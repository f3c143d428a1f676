use std::collections::BTreeSet;

use super::{Formula, OTerm, Term};
use crate::error::{Error, Result};

/// An atom or a negated atom.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub atom: Formula,
    pub positive: bool,
}

impl Literal {
    pub fn pos(atom: Formula) -> Self {
        Literal { atom, positive: true }
    }

    pub fn neg(atom: Formula) -> Self {
        Literal {
            atom,
            positive: false,
        }
    }

    pub fn to_formula(&self) -> Formula {
        if self.positive {
            self.atom.clone()
        } else {
            Formula::not(self.atom.clone())
        }
    }

    pub fn negated(&self) -> Literal {
        Literal {
            atom: self.atom.clone(),
            positive: !self.positive,
        }
    }
}

pub fn quantifier_rank(f: &Formula) -> usize {
    match f {
        Formula::Exists(_, b) | Formula::Forall(_, b) => 1 + quantifier_rank(b),
        Formula::Not(a) => quantifier_rank(a),
        Formula::And(v) | Formula::Or(v) => v.iter().map(quantifier_rank).max().unwrap_or(0),
        Formula::Implies(a, b) => quantifier_rank(a).max(quantifier_rank(b)),
        _ => 0,
    }
}

fn atom_vars(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Eq(t) | Formula::Lt(t) | Formula::U(_, t) | Formula::K(_, t) | Formula::R(_, t) => {
            out.extend(t.vars())
        }
        Formula::OrderEq(a, b) | Formula::OrderLt(a, b) => {
            out.insert(a.var.clone());
            out.insert(b.var.clone());
        }
        _ => {}
    }
}

pub fn free_vars(f: &Formula) -> BTreeSet<String> {
    match f {
        Formula::Exists(x, b) | Formula::Forall(x, b) => {
            let mut s = free_vars(b);
            s.remove(x);
            s
        }
        Formula::Not(a) => free_vars(a),
        Formula::And(v) | Formula::Or(v) => v.iter().flat_map(free_vars).collect(),
        Formula::Implies(a, b) => {
            let mut s = free_vars(a);
            s.extend(free_vars(b));
            s
        }
        atom => {
            let mut s = BTreeSet::new();
            atom_vars(atom, &mut s);
            s
        }
    }
}

/// All variable names occurring anywhere, bound or free.
pub fn all_vars(f: &Formula) -> BTreeSet<String> {
    match f {
        Formula::Exists(x, b) | Formula::Forall(x, b) => {
            let mut s = all_vars(b);
            s.insert(x.clone());
            s
        }
        Formula::Not(a) => all_vars(a),
        Formula::And(v) | Formula::Or(v) => v.iter().flat_map(all_vars).collect(),
        Formula::Implies(a, b) => {
            let mut s = all_vars(a);
            s.extend(all_vars(b));
            s
        }
        atom => {
            let mut s = BTreeSet::new();
            atom_vars(atom, &mut s);
            s
        }
    }
}

pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|n| !avoid.contains(n))
        .unwrap()
}

/// Negation normal form: no implications, negations only on atoms.
pub fn nnf(f: &Formula) -> Formula {
    nnf_sign(f, true)
}

fn nnf_sign(f: &Formula, pos: bool) -> Formula {
    match f {
        Formula::Not(a) => nnf_sign(a, !pos),
        Formula::And(v) => {
            let parts = v.iter().map(|g| nnf_sign(g, pos)).collect();
            if pos {
                Formula::and(parts)
            } else {
                Formula::or(parts)
            }
        }
        Formula::Or(v) => {
            let parts = v.iter().map(|g| nnf_sign(g, pos)).collect();
            if pos {
                Formula::or(parts)
            } else {
                Formula::and(parts)
            }
        }
        Formula::Implies(a, b) => {
            if pos {
                Formula::or(vec![nnf_sign(a, false), nnf_sign(b, true)])
            } else {
                Formula::and(vec![nnf_sign(a, true), nnf_sign(b, false)])
            }
        }
        Formula::Exists(x, b) => {
            if pos {
                Formula::exists(x, nnf_sign(b, true))
            } else {
                Formula::forall(x, nnf_sign(b, false))
            }
        }
        Formula::Forall(x, b) => {
            if pos {
                Formula::forall(x, nnf_sign(b, true))
            } else {
                Formula::exists(x, nnf_sign(b, false))
            }
        }
        atom => {
            let a = simplify_atom(atom);
            if pos {
                a
            } else {
                Formula::not(a)
            }
        }
    }
}

/// Evaluates atoms whose truth does not depend on any variable.
pub fn simplify_atom(f: &Formula) -> Formula {
    match f {
        Formula::Eq(t) | Formula::U(_, t) | Formula::K(_, t) | Formula::R(_, t) if t.is_zero() => {
            Formula::True
        }
        Formula::Lt(t) if t.is_zero() => Formula::False,
        Formula::OrderEq(a, b) if a == b => Formula::True,
        Formula::OrderLt(a, b) if a == b => Formula::False,
        other => other.clone(),
    }
}

/// Constant folding and flattening, bottom up.
pub fn simplify(f: &Formula) -> Formula {
    match f {
        Formula::Not(a) => Formula::not(simplify(a)),
        Formula::And(v) => {
            let mut parts = Vec::new();
            for g in v.iter().map(simplify) {
                if !parts.contains(&g) {
                    parts.push(g);
                }
            }
            Formula::and(parts)
        }
        Formula::Or(v) => {
            let mut parts = Vec::new();
            for g in v.iter().map(simplify) {
                if !parts.contains(&g) {
                    parts.push(g);
                }
            }
            Formula::or(parts)
        }
        Formula::Implies(a, b) => {
            let (a, b) = (simplify(a), simplify(b));
            match (&a, &b) {
                (Formula::False, _) | (_, Formula::True) => Formula::True,
                (Formula::True, _) => b,
                (_, Formula::False) => Formula::not(a),
                _ => Formula::implies(a, b),
            }
        }
        Formula::Exists(x, b) => {
            let b = simplify(b);
            if free_vars(&b).contains(x) {
                Formula::exists(x, b)
            } else {
                b
            }
        }
        Formula::Forall(x, b) => {
            let b = simplify(b);
            if free_vars(&b).contains(x) {
                Formula::forall(x, b)
            } else {
                b
            }
        }
        atom => simplify_atom(atom),
    }
}

/// Clauses of the disjunctive normal form, with trivial literals removed,
/// contradictory clauses dropped and duplicates merged.
pub fn dnf_clauses(f: &Formula) -> Result<Vec<Vec<Literal>>> {
    if !f.is_quantifier_free() {
        return Err(Error::QuantifierPresent);
    }
    Ok(clauses(&nnf(f)))
}

fn clauses(f: &Formula) -> Vec<Vec<Literal>> {
    match f {
        Formula::True => vec![vec![]],
        Formula::False => vec![],
        Formula::Or(v) => {
            let mut out: Vec<Vec<Literal>> = Vec::new();
            for g in v {
                for c in clauses(g) {
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
            }
            out
        }
        Formula::And(v) => {
            let mut acc: Vec<Vec<Literal>> = vec![vec![]];
            for g in v {
                let cs = clauses(g);
                let mut next = Vec::new();
                for a in &acc {
                    for c in &cs {
                        if let Some(m) = merge(a, c) {
                            if !next.contains(&m) {
                                next.push(m);
                            }
                        }
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            acc
        }
        Formula::Not(a) => vec![vec![Literal::neg((**a).clone())]],
        atom => vec![vec![Literal::pos(atom.clone())]],
    }
}

fn merge(a: &[Literal], b: &[Literal]) -> Option<Vec<Literal>> {
    let mut out = a.to_vec();
    for l in b {
        if out.contains(&l.negated()) {
            return None;
        }
        if !out.contains(l) {
            out.push(l.clone());
        }
    }
    out.sort();
    Some(out)
}

pub fn clauses_to_formula(cs: &[Vec<Literal>]) -> Formula {
    Formula::or(
        cs.iter()
            .map(|c| Formula::and(c.iter().map(Literal::to_formula).collect()))
            .collect(),
    )
}

pub fn to_dnf(f: &Formula) -> Result<Formula> {
    Ok(clauses_to_formula(&dnf_clauses(f)?))
}

fn map_atom_terms(f: &Formula, g: &dyn Fn(&Term) -> Term) -> Formula {
    match f {
        Formula::Eq(t) => Formula::Eq(g(t)),
        Formula::Lt(t) => Formula::Lt(g(t)),
        Formula::U(i, t) => Formula::U(*i, g(t)),
        Formula::K(l, t) => Formula::K(l.clone(), g(t)),
        Formula::R(l, t) => Formula::R(l.clone(), g(t)),
        other => other.clone(),
    }
}

/// Renames bound variables that would capture a name in `avoid`.
fn rename_bound(f: &Formula, avoid: &BTreeSet<String>) -> Formula {
    match f {
        Formula::Exists(x, b) | Formula::Forall(x, b) => {
            let (x2, b2) = if avoid.contains(x) {
                let mut used = all_vars(b);
                used.extend(avoid.iter().cloned());
                let nx = fresh_name(x, &used);
                (nx.clone(), rename_free(b, x, &nx))
            } else {
                (x.clone(), (**b).clone())
            };
            let b3 = rename_bound(&b2, avoid);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(&x2, b3)
            } else {
                Formula::forall(&x2, b3)
            }
        }
        Formula::Not(a) => Formula::Not(Box::new(rename_bound(a, avoid))),
        Formula::And(v) => Formula::And(v.iter().map(|g| rename_bound(g, avoid)).collect()),
        Formula::Or(v) => Formula::Or(v.iter().map(|g| rename_bound(g, avoid)).collect()),
        Formula::Implies(a, b) => {
            Formula::implies(rename_bound(a, avoid), rename_bound(b, avoid))
        }
        atom => atom.clone(),
    }
}

fn rename_free(f: &Formula, from: &str, to: &str) -> Formula {
    match f {
        Formula::OrderEq(a, b) | Formula::OrderLt(a, b) => {
            let fix = |o: &OTerm| {
                if o.var == from {
                    OTerm::new(to, o.shift)
                } else {
                    o.clone()
                }
            };
            if matches!(f, Formula::OrderEq(..)) {
                Formula::OrderEq(fix(a), fix(b))
            } else {
                Formula::OrderLt(fix(a), fix(b))
            }
        }
        _ => substitute_with(f, from, &|t: &Term| t.rename(from, to), &|o| {
            OTerm::new(to, o.shift)
        }),
    }
}

fn substitute_with(
    f: &Formula,
    x: &str,
    g: &dyn Fn(&Term) -> Term,
    go: &dyn Fn(&OTerm) -> OTerm,
) -> Formula {
    match f {
        Formula::Exists(y, b) | Formula::Forall(y, b) => {
            if y == x {
                return f.clone();
            }
            let nb = substitute_with(b, x, g, go);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(y, nb)
            } else {
                Formula::forall(y, nb)
            }
        }
        Formula::Not(a) => Formula::Not(Box::new(substitute_with(a, x, g, go))),
        Formula::And(v) => Formula::And(v.iter().map(|h| substitute_with(h, x, g, go)).collect()),
        Formula::Or(v) => Formula::Or(v.iter().map(|h| substitute_with(h, x, g, go)).collect()),
        Formula::Implies(a, b) => {
            Formula::implies(substitute_with(a, x, g, go), substitute_with(b, x, g, go))
        }
        Formula::OrderEq(a, b) | Formula::OrderLt(a, b) => {
            let fix = |o: &OTerm| if o.var == x { go(o) } else { o.clone() };
            if matches!(f, Formula::OrderEq(..)) {
                Formula::OrderEq(fix(a), fix(b))
            } else {
                Formula::OrderLt(fix(a), fix(b))
            }
        }
        atom => map_atom_terms(atom, g),
    }
}

/// Capture-avoiding substitution of `x := s` in a group-language formula.
pub fn substitute(f: &Formula, x: &str, s: &Term) -> Formula {
    let avoid = s.vars();
    let safe = rename_bound(f, &avoid);
    substitute_with(&safe, x, &|t: &Term| t.substitute(x, s), &|o| o.clone())
}

/// Capture-avoiding substitution of `x := s^k(y)` in an order-language formula.
pub fn substitute_order(f: &Formula, x: &str, s: &OTerm) -> Formula {
    let avoid: BTreeSet<String> = [s.var.clone()].into();
    let safe = rename_bound(f, &avoid);
    substitute_with(&safe, x, &|t: &Term| t.clone(), &|o| {
        OTerm::new(&s.var, o.shift + s.shift)
    })
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Vocabulary};
    use super::*;
    use proptest::prelude::*;

    fn g(s: &str) -> Formula {
        parse(s, Vocabulary::Group).unwrap()
    }

    #[test]
    fn rank() {
        assert_eq!(quantifier_rank(&parse("E x. A y. x < y", Vocabulary::Order).unwrap()), 2);
        assert_eq!(quantifier_rank(&g("x = y")), 0);
        assert_eq!(quantifier_rank(&g("(E x. x = y) & (A z. E w. z < w)")), 2);
    }

    #[test]
    fn de_morgan() {
        let f = g("!(a < 0 & b = 0)");
        let d = to_dnf(&f).unwrap();
        assert_eq!(d, Formula::Or(vec![g("!(a < 0)"), g("!(b = 0)")]));
    }

    #[test]
    fn distribution() {
        let f = g("(p = 0 | q = 0) & w = 0");
        let d = to_dnf(&f).unwrap();
        assert_eq!(d, g("p = 0 & w = 0 | q = 0 & w = 0"));
    }

    #[test]
    fn dnf_rejects_quantifiers() {
        assert_eq!(to_dnf(&g("E x. x = y")), Err(Error::QuantifierPresent));
    }

    #[test]
    fn substitution_avoids_capture() {
        let f = g("E y. x < y");
        let s = substitute(&f, "x", &Term::var("y"));
        match &s {
            Formula::Exists(v, b) => {
                assert_ne!(v, "y");
                assert_eq!(**b, Formula::lt(&Term::var("y"), &Term::var(v)));
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(free_vars(&s), ["y".to_string()].into());
    }

    fn arb_clause_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(g("a = 0")),
            Just(g("b < 0")),
            Just(g("c = 0")),
            Just(g("d < 0")),
        ];
        leaf.prop_recursive(4, 20, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
                proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
                proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::implies(a, b)),
            ]
        })
    }

    fn eval_bool(f: &Formula, val: &dyn Fn(&Formula) -> bool) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Not(a) => !eval_bool(a, val),
            Formula::And(v) => v.iter().all(|h| eval_bool(h, val)),
            Formula::Or(v) => v.iter().any(|h| eval_bool(h, val)),
            Formula::Implies(a, b) => !eval_bool(a, val) || eval_bool(b, val),
            atom => val(atom),
        }
    }

    proptest! {
        #[test]
        fn dnf_preserves_valuations(f in arb_clause_formula(), bits in 0u8..16) {
            let atoms = [g("a = 0"), g("b < 0"), g("c = 0"), g("d < 0")];
            let val = |a: &Formula| {
                let i = atoms.iter().position(|x| x == a).unwrap();
                bits & (1 << i) != 0
            };
            let d = to_dnf(&f).unwrap();
            prop_assert_eq!(eval_bool(&f, &val), eval_bool(&d, &val));
        }
    }
}
