//! First-order formulas over ordered groups with an automorphism `s`.
//!
//! Group atoms are kept in the one-sided forms `t = 0` and `t < 0`.
//! Order-language atoms (`s^a(x) < s^b(y)`) have their own variants since
//! that language has no addition.

mod normal;
mod parse;
mod print;
mod unpack;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use crate::operator::LaurentOperator;

pub use normal::{dnf_clauses, Literal};
pub use parse::{parse, parse_term};
pub use unpack::{unpack, Unpacked, UnpackedAtom};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjKind {
    /// `k_L`: projection onto the kernel of `L`.
    K,
    /// `r_L`: projection onto the range of `L`.
    R,
}

/// A variable, possibly under a stack of `k_L` / `r_L` projections.
/// Projections commute and are idempotent, so a set is enough.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermKey {
    pub var: String,
    pub projs: BTreeSet<(ProjKind, LaurentOperator)>,
}

impl TermKey {
    pub fn plain(var: &str) -> Self {
        TermKey {
            var: var.to_string(),
            projs: BTreeSet::new(),
        }
    }
}

/// `sum L_j(key_j)`; the empty map is the constant `0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Term {
    coeffs: BTreeMap<TermKey, LaurentOperator>,
}

impl Term {
    pub fn zero() -> Self {
        Term::default()
    }

    pub fn var(name: &str) -> Self {
        Term::monomial(TermKey::plain(name), LaurentOperator::one())
    }

    pub fn monomial(key: TermKey, op: LaurentOperator) -> Self {
        let mut t = Term::zero();
        t.add_monomial(key, op);
        t
    }

    /// `op(name)`
    pub fn scaled_var(name: &str, op: LaurentOperator) -> Self {
        Term::monomial(TermKey::plain(name), op)
    }

    pub fn from_pairs(pairs: &[(&str, LaurentOperator)]) -> Self {
        let mut t = Term::zero();
        for (v, op) in pairs {
            t.add_monomial(TermKey::plain(v), op.clone());
        }
        t
    }

    pub fn add_monomial(&mut self, key: TermKey, op: LaurentOperator) {
        if op.is_zero() {
            return;
        }
        if key
            .projs
            .iter()
            .any(|(k, l)| *k == ProjKind::K && key.projs.contains(&(ProjKind::R, l.clone())))
        {
            return;
        }
        let slot = self.coeffs.entry(key.clone()).or_default();
        *slot = &*slot + &op;
        if slot.is_zero() {
            self.coeffs.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&TermKey, &LaurentOperator)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Term) -> Term {
        let mut t = self.clone();
        for (k, op) in &other.coeffs {
            t.add_monomial(k.clone(), op.clone());
        }
        t
    }

    pub fn neg(&self) -> Term {
        Term {
            coeffs: self.coeffs.iter().map(|(k, op)| (k.clone(), -op)).collect(),
        }
    }

    pub fn sub(&self, other: &Term) -> Term {
        self.add(&other.neg())
    }

    /// `L(t)`
    pub fn apply(&self, l: &LaurentOperator) -> Term {
        let mut t = Term::zero();
        for (k, op) in &self.coeffs {
            t.add_monomial(k.clone(), op * l);
        }
        t
    }

    pub fn scale(&self, c: i64) -> Term {
        self.apply(&LaurentOperator::constant(c))
    }

    pub fn scale_big(&self, c: &BigInt) -> Term {
        self.apply(&LaurentOperator::constant(c.clone()))
    }

    /// `k_L(t)` or `r_L(t)`.
    pub fn project(&self, kind: ProjKind, l: &LaurentOperator) -> Term {
        let mut t = Term::zero();
        for (k, op) in &self.coeffs {
            let mut key = k.clone();
            key.projs.insert((kind, l.clone()));
            t.add_monomial(key, op.clone());
        }
        t
    }

    /// Applies a whole projection set.
    pub fn project_all(&self, projs: &BTreeSet<(ProjKind, LaurentOperator)>) -> Term {
        let mut t = Term::zero();
        for (k, op) in &self.coeffs {
            let mut key = k.clone();
            key.projs.extend(projs.iter().cloned());
            t.add_monomial(key, op.clone());
        }
        t
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.coeffs.keys().map(|k| k.var.clone()).collect()
    }

    pub fn mentions(&self, x: &str) -> bool {
        self.coeffs.keys().any(|k| k.var == x)
    }

    pub fn has_projections(&self) -> bool {
        self.coeffs.keys().any(|k| !k.projs.is_empty())
    }

    /// Splits into the part on `x` and the rest.
    pub fn split_var(&self, x: &str) -> (Term, Term) {
        let mut on = Term::zero();
        let mut off = Term::zero();
        for (k, op) in &self.coeffs {
            if k.var == x {
                on.add_monomial(k.clone(), op.clone());
            } else {
                off.add_monomial(k.clone(), op.clone());
            }
        }
        (on, off)
    }

    /// Coefficient of the unprojected variable `x`.
    pub fn coeff(&self, x: &str) -> LaurentOperator {
        self.coeffs
            .get(&TermKey::plain(x))
            .cloned()
            .unwrap_or_default()
    }

    pub fn coeff_key(&self, key: &TermKey) -> LaurentOperator {
        self.coeffs.get(key).cloned().unwrap_or_default()
    }

    /// Replaces the monomial on `key` (not the whole variable) with `op(s)`.
    pub fn substitute_key(&self, key: &TermKey, s: &Term) -> Term {
        let mut t = Term::zero();
        for (k, op) in &self.coeffs {
            if k == key {
                t = t.add(&s.apply(op));
            } else {
                t.add_monomial(k.clone(), op.clone());
            }
        }
        t
    }

    /// Replaces the variable `x` with `s` throughout.
    pub fn substitute(&self, x: &str, s: &Term) -> Term {
        let mut t = Term::zero();
        for (k, op) in &self.coeffs {
            if k.var == x {
                t = t.add(&s.project_all(&k.projs).apply(op));
            } else {
                t.add_monomial(k.clone(), op.clone());
            }
        }
        t
    }

    pub fn rename(&self, from: &str, to: &str) -> Term {
        self.substitute(from, &Term::var(to))
    }

    /// Multiplies by a power of `s` so all exponents are nonnegative and the
    /// smallest is zero.
    pub fn normalize_shift(&self) -> Term {
        let min = self.coeffs.values().filter_map(|op| op.min_exp()).min();
        match min {
            Some(k) if k != 0 => self.apply(&LaurentOperator::sigma(-k)),
            _ => self.clone(),
        }
    }
}

/// `s^shift(var)` in the order language.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OTerm {
    pub var: String,
    pub shift: i32,
}

impl OTerm {
    pub fn new(var: &str, shift: i32) -> Self {
        OTerm {
            var: var.to_string(),
            shift,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    /// `t = 0`
    Eq(Term),
    /// `t < 0`
    Lt(Term),
    OrderEq(OTerm, OTerm),
    OrderLt(OTerm, OTerm),
    /// `U_alpha(t)`
    U(usize, Term),
    /// `K_L(t)`: `t` lies in the kernel of `L`.
    K(LaurentOperator, Term),
    /// `R_L(t)`: `t` lies in the range of `L`.
    R(LaurentOperator, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Eq,
    Lt,
}

/// Which symbols a formula may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Vocabulary {
    /// `<` and `s` only.
    Order,
    /// Ordered group with `s`.
    Group,
    /// Group plus `U_0 .. U_n`.
    Graded(usize),
    /// Graded plus `K_L`, `R_L`, `k_L`, `r_L`.
    GradedStar(usize),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        match f {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Not(g) => *g,
            g => Formula::Not(Box::new(g)),
        }
    }

    /// Conjunction with unit/zero simplification; singletons unwrap.
    pub fn and(fs: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::True => {}
                Formula::False => return Formula::False,
                Formula::And(gs) => out.extend(gs),
                g => out.push(g),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().unwrap(),
            _ => Formula::And(out),
        }
    }

    pub fn or(fs: Vec<Formula>) -> Formula {
        let mut out = Vec::new();
        for f in fs {
            match f {
                Formula::False => {}
                Formula::True => return Formula::True,
                Formula::Or(gs) => out.extend(gs),
                g => out.push(g),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().unwrap(),
            _ => Formula::Or(out),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(x: &str, body: Formula) -> Formula {
        Formula::Exists(x.to_string(), Box::new(body))
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(x.to_string(), Box::new(body))
    }

    pub fn exists_many(xs: &[String], body: Formula) -> Formula {
        xs.iter().rev().fold(body, |b, x| Formula::exists(x, b))
    }

    pub fn forall_many(xs: &[String], body: Formula) -> Formula {
        xs.iter().rev().fold(body, |b, x| Formula::forall(x, b))
    }

    /// `a = b` as `a - b = 0`.
    pub fn eq(a: &Term, b: &Term) -> Formula {
        Formula::Eq(a.sub(b))
    }

    /// `a < b` as `a - b < 0`.
    pub fn lt(a: &Term, b: &Term) -> Formula {
        Formula::Lt(a.sub(b))
    }

    pub fn is_atom(&self) -> bool {
        matches!(
            self,
            Formula::True
                | Formula::False
                | Formula::Eq(_)
                | Formula::Lt(_)
                | Formula::OrderEq(..)
                | Formula::OrderLt(..)
                | Formula::U(..)
                | Formula::K(..)
                | Formula::R(..)
        )
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => false,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(v) | Formula::Or(v) => v.iter().all(|f| f.is_quantifier_free()),
            Formula::Implies(a, b) => a.is_quantifier_free() && b.is_quantifier_free(),
            _ => true,
        }
    }
}

/// Canonical `L(x) rel 0` form of `lhs rel rhs`.
pub fn normalize_atom(lhs: &Term, rel: Rel, rhs: &Term) -> Formula {
    let t = lhs.sub(rhs);
    match rel {
        Rel::Eq => Formula::Eq(t),
        Rel::Lt => Formula::Lt(t),
    }
}

pub use normal::{
    all_vars, clauses_to_formula, free_vars, fresh_name, nnf, quantifier_rank, simplify, substitute,
    substitute_order, to_dnf,
};
