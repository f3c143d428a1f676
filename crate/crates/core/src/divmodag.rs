//! Quantifier elimination for divisible ordered difference groups of a fixed species.
//!
//! The structure is an ordered vector space over the field generated by `s`,
//! with signs of scalars given by the species oracle. Elimination is
//! Fourier–Motzkin with operator coefficients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::formula::{dnf_clauses, free_vars, nnf, simplify, Formula, Literal, Term};
use crate::operator::{LaurentOperator, Sign};
use crate::species::{op_sign, Species};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CRel {
    Eq,
    Lt,
    Ne,
}

/// `term rel 0`
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Constraint {
    pub term: Term,
    pub rel: CRel,
}

impl Constraint {
    pub fn new(term: Term, rel: CRel) -> Self {
        Constraint { term: primitive(&term), rel }
    }

    pub fn to_formula(&self) -> Formula {
        let f = match self.rel {
            CRel::Eq => Formula::Eq(self.term.clone()),
            CRel::Lt => Formula::Lt(self.term.clone()),
            CRel::Ne => Formula::not(Formula::Eq(self.term.clone())),
        };
        simplify(&f)
    }
}

/// Divides out the positive integer content of all coefficients.
pub fn primitive(t: &Term) -> Term {
    let mut g = BigInt::zero();
    for (_, op) in t.iter() {
        for (_, c) in op.terms() {
            g = g.gcd(c);
        }
    }
    if g.is_zero() || g == BigInt::from(1) {
        return t.clone();
    }
    let mut out = Term::zero();
    for (k, op) in t.iter() {
        let mut o = LaurentOperator::zero();
        for (e, c) in op.terms() {
            o.add_term(e, c / &g);
        }
        out.add_monomial(k.clone(), o);
    }
    out
}

fn literal_constraint(l: &Literal) -> Result<Constraint> {
    match (&l.atom, l.positive) {
        (Formula::Eq(t), true) => Ok(Constraint::new(t.clone(), CRel::Eq)),
        (Formula::Eq(t), false) => Ok(Constraint::new(t.clone(), CRel::Ne)),
        (Formula::Lt(t), true) => Ok(Constraint::new(t.clone(), CRel::Lt)),
        (Formula::Lt(_), false) => Err(Error::NotConjunctive),
        (other, _) => Err(Error::UnsupportedVocabulary(format!("{other}"))),
    }
}

/// Converts a conjunction of literals into constraints.
pub fn constraints_of(clause: &[Literal]) -> Result<Vec<Constraint>> {
    clause.iter().map(literal_constraint).collect()
}

fn check_plain(t: &Term) -> Result<()> {
    if t.has_projections() {
        return Err(Error::UnsupportedVocabulary(
            "projections need a graded vocabulary".into(),
        ));
    }
    Ok(())
}

/// `E x. /\ c` as a quantifier-free formula.
pub fn eliminate_exists(x: &str, c: &[Constraint], s: &Species) -> Result<Formula> {
    let mut rest: Vec<Constraint> = Vec::new();
    let mut active: Vec<(LaurentOperator, Sign, Term, CRel)> = Vec::new();
    for con in c {
        check_plain(&con.term)?;
        let l = con.term.coeff(x);
        let (_, u) = con.term.split_var(x);
        let sg = op_sign(&l, s)?;
        if sg == Sign::Zero {
            rest.push(Constraint::new(u, con.rel));
        } else {
            active.push((l, sg, u, con.rel));
        }
    }
    if let Some(p) = active.iter().position(|a| a.3 == CRel::Eq) {
        let (l, sg, u, _) = active[p].clone();
        for (i, (m, _, w, rel)) in active.iter().enumerate() {
            if i == p {
                continue;
            }
            // M x + w, with L x = -u:  L(Mx + w) = L w - M u
            let mut t = w.apply(&l).sub(&u.apply(m));
            if sg == Sign::Neg && *rel == CRel::Lt {
                t = t.neg();
            }
            rest.push(Constraint::new(t, *rel));
        }
    } else {
        let lowers: Vec<_> = active
            .iter()
            .filter(|a| a.3 == CRel::Lt && a.1 == Sign::Neg)
            .collect();
        let uppers: Vec<_> = active
            .iter()
            .filter(|a| a.3 == CRel::Lt && a.1 == Sign::Pos)
            .collect();
        for (a_op, _, a, _) in &lowers {
            for (b_op, _, b, _) in &uppers {
                // A x + a < 0 (A < 0) and B x + b < 0 (B > 0):  B a - A b < 0
                let t = a.apply(b_op).sub(&b.apply(a_op));
                rest.push(Constraint::new(t, CRel::Lt));
            }
        }
    }
    let mut parts: Vec<Formula> = Vec::new();
    for r in rest {
        let f = r.to_formula();
        if !parts.contains(&f) {
            parts.push(f);
        }
    }
    Ok(Formula::and(parts))
}

/// Rewrites `!(t < 0)` as `t = 0 | -t < 0` inside a negation normal form.
pub fn expand_negated_lt(f: &Formula) -> Formula {
    match f {
        Formula::Not(a) => match &**a {
            Formula::Lt(t) => Formula::or(vec![Formula::Eq(t.clone()), Formula::Lt(t.neg())]),
            _ => f.clone(),
        },
        Formula::And(v) => Formula::and(v.iter().map(expand_negated_lt).collect()),
        Formula::Or(v) => Formula::or(v.iter().map(expand_negated_lt).collect()),
        Formula::Exists(x, b) => Formula::exists(x, expand_negated_lt(b)),
        Formula::Forall(x, b) => Formula::forall(x, expand_negated_lt(b)),
        other => other.clone(),
    }
}

fn eliminate_formula(x: &str, body: &Formula, s: &Species) -> Result<Formula> {
    let prepared = expand_negated_lt(&nnf(body));
    let mut out = Vec::new();
    for clause in dnf_clauses(&prepared)? {
        let (with_x, without): (Vec<Literal>, Vec<Literal>) = clause
            .into_iter()
            .partition(|l| free_vars(&l.atom).contains(x));
        let cs = constraints_of(&with_x)?;
        let mut parts: Vec<Formula> = without.iter().map(Literal::to_formula).collect();
        parts.push(eliminate_exists(x, &cs, s)?);
        let f = Formula::and(parts);
        if !out.contains(&f) {
            out.push(f);
        }
    }
    Ok(simplify(&Formula::or(out)))
}

/// Quantifier-free equivalent of `f` over every model of the species' theory.
pub fn qe(f: &Formula, s: &Species) -> Result<Formula> {
    Ok(simplify(&qe_inner(f, s)?))
}

fn qe_inner(f: &Formula, s: &Species) -> Result<Formula> {
    Ok(match f {
        Formula::Exists(x, b) => {
            let inner = qe_inner(b, s)?;
            eliminate_formula(x, &inner, s)?
        }
        Formula::Forall(x, b) => {
            let inner = qe_inner(b, s)?;
            Formula::not(eliminate_formula(x, &Formula::not(inner), s)?)
        }
        Formula::Not(a) => Formula::not(qe_inner(a, s)?),
        Formula::And(v) => Formula::and(v.iter().map(|g| qe_inner(g, s)).collect::<Result<_>>()?),
        Formula::Or(v) => Formula::or(v.iter().map(|g| qe_inner(g, s)).collect::<Result<_>>()?),
        Formula::Implies(a, b) => Formula::implies(qe_inner(a, s)?, qe_inner(b, s)?),
        Formula::Eq(t) | Formula::Lt(t) => {
            check_plain(t)?;
            f.clone()
        }
        Formula::True | Formula::False => f.clone(),
        other => return Err(Error::UnsupportedVocabulary(format!("{other}"))),
    })
}

/// Truth value of a formula without variables.
pub fn eval_ground(f: &Formula) -> Option<bool> {
    match simplify(f) {
        Formula::True => Some(true),
        Formula::False => Some(false),
        _ => None,
    }
}

pub fn decide_sentence(f: &Formula, s: &Species) -> Result<bool> {
    let fv = free_vars(f);
    if !fv.is_empty() {
        return Err(Error::FreeVariables(fv.into_iter().collect()));
    }
    let q = qe(f, s)?;
    eval_ground(&q).ok_or_else(|| Error::Input(format!("residual formula {q}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concrete::SumModel;
    use crate::formula::{parse, Vocabulary};
    use num_rational::BigRational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn g(s: &str) -> Formula {
        parse(s, Vocabulary::Group).unwrap()
    }

    fn body(f: &Formula) -> Vec<Constraint> {
        let cl = dnf_clauses(f).unwrap();
        assert_eq!(cl.len(), 1);
        constraints_of(&cl[0]).unwrap()
    }

    #[test]
    fn interval_is_nonempty_iff_ordered() {
        let r = eliminate_exists("x", &body(&g("a < x & x < b")), &Species::eq_int(2)).unwrap();
        assert_eq!(r, g("a < b"));
    }

    #[test]
    fn operators_are_surjective() {
        let r = eliminate_exists("x", &body(&g("s(x) = y")), &Species::eq_int(2)).unwrap();
        assert_eq!(r, Formula::True);
    }

    #[test]
    fn cross_multiplication() {
        let r = eliminate_exists("x", &body(&g("2*x < a & 3*x > b")), &Species::eq_int(2)).unwrap();
        assert_eq!(r, g("2*b < 3*a"));
        // oracle: feasibility in Q at random points
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = SumModel::from_ints(&[2]);
        for _ in 0..100 {
            let a = BigRational::new(rng.gen_range(-50..50).into(), rng.gen_range(1..7).into());
            let b = BigRational::new(rng.gen_range(-50..50).into(), rng.gen_range(1..7).into());
            let feasible = &b / BigRational::from_integer(3.into()) < &a / BigRational::from_integer(2.into());
            let env = SumModel::scalar_env(&[("a", a), ("b", b)]);
            assert_eq!(m.eval(&r, &env, &[]), feasible);
        }
    }

    #[test]
    fn qe_examples() {
        let s2 = Species::eq_int(2);
        let s3 = Species::eq_int(3);
        assert_eq!(qe(&g("A y. E x. x < y"), &s2).unwrap(), Formula::True);
        assert_eq!(qe(&g("E x. s(x) = 2*x & x != 0"), &s3).unwrap(), Formula::False);
        let qf = g("a < b & c = 0");
        assert_eq!(qe(&qf, &s2).unwrap(), qf);
    }

    #[test]
    fn decide_examples() {
        let s2 = Species::eq_int(2);
        let s3 = Species::eq_int(3);
        assert!(decide_sentence(&g("E x. x != 0"), &s2).unwrap());
        assert!(decide_sentence(&g("A x. (0 < x -> 2*x < s(x))"), &s3).unwrap());
        assert!(!decide_sentence(&g("A x. s(x) = x"), &s2).unwrap());
        assert!(matches!(
            decide_sentence(&g("x = 0"), &s2),
            Err(Error::FreeVariables(_))
        ));
    }
}
