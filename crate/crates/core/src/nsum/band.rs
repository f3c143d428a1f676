//! Elimination of one variable inside a dull part.
//!
//! Every literal has the eliminated key with coefficient `1` or `-1`, so it
//! reads `x = e`, `x != e`, `x < e`, `e < x`, `x in e + U_j` or
//! `x notin e + U_j`, with `j` a local level of the part. Bands are cosets of
//! convex subgroups, so the feasible set is an intersection of convex sets in
//! a line and pairwise conditions suffice. An excluded coset only matters if
//! it swallows the whole feasible set.

use crate::error::{Error, Result};
use crate::formula::{simplify, Formula, Literal, Term, TermKey};
use crate::operator::LaurentOperator;

use super::Partition;

enum Lit {
    Eq(Term),
    /// `x notin e + U_j`; `j = 0` is `x != e`.
    Excl(usize, Term),
    Lower(Term),
    Upper(Term),
    /// `x in e + U_j`
    Band(usize, Term),
}

fn unit(c: &LaurentOperator) -> Option<i64> {
    if c.is_one() {
        Some(1)
    } else if (-c).is_one() {
        Some(-1)
    } else {
        None
    }
}

fn classify(part: &Partition, p: usize, key: &TermKey, l: &Literal) -> Result<Lit> {
    let bad = || Error::UnsplittableAtom(format!("{}", l.atom));
    let (t, level) = match &l.atom {
        Formula::Eq(t) => (t, 0),
        Formula::Lt(t) => (t, usize::MAX),
        Formula::U(a, t) => (t, part.local_level(p, *a)),
        _ => return Err(bad()),
    };
    let c = t.coeff_key(key);
    let a = unit(&c).ok_or_else(bad)?;
    let rest = t.sub(&Term::monomial(key.clone(), c));
    // a x + rest, so x is compared with e = -a rest
    let e = rest.scale(-a);
    Ok(match (level, l.positive) {
        (usize::MAX, true) if a == 1 => Lit::Upper(e),
        (usize::MAX, true) => Lit::Lower(e),
        (usize::MAX, false) => return Err(Error::NotConjunctive),
        (0, true) => Lit::Eq(e),
        (j, true) => Lit::Band(j, e),
        (j, false) => Lit::Excl(j, e),
    })
}

/// `E x. /\ lits` for literals living in part `p`.
pub(super) fn eliminate_part(
    part: &Partition,
    p: usize,
    key: &TermKey,
    lits: &[Literal],
) -> Result<Formula> {
    let m = part.width(p);
    let classified = lits
        .iter()
        .map(|l| classify(part, p, key, l))
        .collect::<Result<Vec<_>>>()?;
    let u = |j: usize, t: Term| part.u_atom(p, j, &t);

    if let Some(i) = classified.iter().position(|l| matches!(l, Lit::Eq(_))) {
        let Lit::Eq(e) = &classified[i] else { unreachable!() };
        let mut conj = Vec::new();
        for (k, l) in lits.iter().enumerate() {
            if k == i {
                continue;
            }
            let atom = match &l.atom {
                Formula::Eq(t) => Formula::Eq(t.substitute_key(key, e)),
                Formula::Lt(t) => Formula::Lt(t.substitute_key(key, e)),
                Formula::U(a, t) => Formula::U(*a, t.substitute_key(key, e)),
                other => other.clone(),
            };
            let atom = simplify(&atom);
            conj.push(if l.positive { atom } else { Formula::not(atom) });
        }
        return Ok(simplify(&Formula::and(conj)));
    }

    let mut lowers = Vec::new();
    let mut uppers = Vec::new();
    let mut bands = Vec::new();
    let mut excls = Vec::new();
    for l in classified {
        match l {
            Lit::Lower(e) => lowers.push(e),
            Lit::Upper(e) => uppers.push(e),
            Lit::Band(j, e) if j < m => bands.push((j, e)),
            Lit::Band(..) => {}
            Lit::Excl(j, e) => excls.push((j, e)),
            Lit::Eq(_) => unreachable!(),
        }
    }
    let (a, c) = bands
        .iter()
        .min_by_key(|(j, _)| *j)
        .cloned()
        .unwrap_or((m, Term::zero()));

    let mut conj = Vec::new();
    for (j, e) in &bands {
        conj.push(u(*j, c.sub(e)));
    }
    for l in &lowers {
        for h in &uppers {
            conj.push(Formula::Lt(l.sub(h)));
        }
    }
    if a < m {
        for l in &lowers {
            conj.push(Formula::or(vec![Formula::Lt(l.sub(&c)), u(a, c.sub(l))]));
        }
        for h in &uppers {
            conj.push(Formula::or(vec![Formula::Lt(c.sub(h)), u(a, h.sub(&c))]));
        }
    }
    for (beta, d) in &excls {
        let beta = *beta;
        if beta >= a {
            conj.push(Formula::not(u(beta, c.sub(d))));
        } else if beta > 0 {
            let above = uppers
                .iter()
                .map(|h| Formula::and(vec![Formula::Lt(d.sub(h)), Formula::not(u(beta, h.sub(d)))]))
                .collect();
            let below = lowers
                .iter()
                .map(|l| Formula::and(vec![Formula::Lt(l.sub(d)), Formula::not(u(beta, d.sub(l)))]))
                .collect();
            conj.push(Formula::or(vec![
                Formula::not(u(a, d.sub(&c))),
                Formula::and(above),
                Formula::and(below),
            ]));
        }
    }
    Ok(simplify(&Formula::and(conj)))
}
