//! Representative sequences and existential/universal definitions of `U_a`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::formula::{Formula, Term};
use crate::operator::{LaurentOperator, Sign};
use crate::species::{
    cmp_with_rational, op_sign, same_real, separating_point, species_equiv, AlgRel, Separator,
    Species,
};

use super::NSumSpec;

/// Which minimal-polynomial clause constrains a coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ClauseTag {
    Eq,
    Lt,
    Gt,
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RepresentativePlan {
    /// `(q_i, r_i)`; `None` is `+infinity`.
    pub intervals: Vec<(BigRational, Option<BigRational>)>,
    pub tags: Vec<ClauseTag>,
}

fn same_value(a: &Species, b: &Species) -> bool {
    species_equiv(a, b) || same_real(a, b)
}

fn cmp_value(a: &Species, b: &Species) -> Result<Ordering> {
    if same_value(a, b) {
        return Ok(Ordering::Equal);
    }
    match separating_point(a, b)? {
        Separator::Rational(q) => Ok(if cmp_with_rational(a, &q)? == Sign::Neg {
            Ordering::Less
        } else {
            Ordering::Greater
        }),
        Separator::Algebraic(_) => Ok(Ordering::Equal),
    }
}

/// Simplest positive rational strictly above every species in `lo` and
/// strictly below every species in `hi`.
fn simplest_in(lo: &[&Species], hi: &[&Species]) -> Result<BigRational> {
    let (mut ln, mut ld) = (BigInt::zero(), BigInt::one());
    let (mut hn, mut hd) = (BigInt::one(), BigInt::zero());
    for _ in 0..100_000 {
        let m = BigRational::new(&ln + &hn, &ld + &hd);
        let mut above_lo = true;
        for s in lo {
            above_lo &= cmp_with_rational(s, &m)? == Sign::Neg;
        }
        let mut below_hi = true;
        for s in hi {
            below_hi &= cmp_with_rational(s, &m)? == Sign::Pos;
        }
        if !above_lo {
            ln = m.numer().clone();
            ld = m.denom().clone();
        } else if !below_hi {
            hn = m.numer().clone();
            hd = m.denom().clone();
        } else {
            return Ok(m);
        }
    }
    Err(Error::Unresolvable)
}

/// Groups coordinates by real value, orders the groups and separates
/// neighbours by the simplest rationals.
pub fn plan(g: &NSumSpec) -> Result<RepresentativePlan> {
    let mut reps: Vec<&Species> = Vec::new();
    let mut group_of = Vec::new();
    for s in &g.coords {
        let found = reps.iter().position(|r| same_value(r, s));
        group_of.push(match found {
            Some(k) => k,
            None => {
                reps.push(s);
                reps.len() - 1
            }
        });
    }
    let mut order: Vec<usize> = (0..reps.len()).collect();
    // insertion sort; comparisons may fail
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 && cmp_value(reps[order[j]], reps[order[j - 1]])? == Ordering::Less {
            order.swap(j, j - 1);
            j -= 1;
        }
    }
    let members = |k: usize| -> Vec<&Species> {
        (0..g.n())
            .filter(|&i| group_of[i] == k)
            .map(|i| &g.coords[i])
            .collect()
    };
    let mut bounds: Vec<(BigRational, Option<BigRational>)> = vec![Default::default(); reps.len()];
    let mut lower = simplest_in(&[], &members(order[0]))?;
    for (k, &gi) in order.iter().enumerate() {
        let upper = if *reps[gi] == Species::Infinite {
            None
        } else {
            let next = match order.get(k + 1) {
                Some(&h) if *reps[h] != Species::Infinite => members(h),
                _ => Vec::new(),
            };
            Some(simplest_in(&members(gi), &next)?)
        };
        bounds[gi] = (lower.clone(), upper.clone());
        if let Some(u) = upper {
            lower = u;
        }
    }
    let tags = g
        .coords
        .iter()
        .map(|s| match s {
            Species::Algebraic(AlgRel::Eq, _) => ClauseTag::Eq,
            Species::Algebraic(AlgRel::Lt, _) => ClauseTag::Lt,
            Species::Algebraic(AlgRel::Gt, _) => ClauseTag::Gt,
            _ => ClauseTag::None,
        })
        .collect();
    Ok(RepresentativePlan {
        intervals: group_of.iter().map(|&k| bounds[k].clone()).collect(),
        tags,
    })
}

pub fn seq_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("a{i}")).collect()
}

/// `(d s - n)` for `q = n/d`.
fn ratio_op(q: &BigRational) -> LaurentOperator {
    LaurentOperator::from_bigints(&[-q.numer().clone(), q.denom().clone()])
}

/// Quantifier-free formula in `a0 .. a{n-1}` saying the tuple is a
/// representative sequence.
pub fn representative_theta(g: &NSumSpec) -> Result<(RepresentativePlan, Formula)> {
    g.check()?;
    g.require_reduced()?;
    let plan = plan(g)?;
    let names = seq_names(g.n());
    let a = |i: usize| Term::var(&names[i]);
    let mut conj = vec![Formula::lt(&Term::zero(), &a(0))];
    for i in 1..g.n() {
        conj.push(Formula::lt(&a(i - 1), &a(i)));
    }
    for (i, (q, r)) in plan.intervals.iter().enumerate() {
        // q a < s(a) and s(a) < r a
        conj.push(Formula::Lt(Term::scaled_var(&names[i], ratio_op(q)).neg()));
        if let Some(r) = r {
            conj.push(Formula::Lt(Term::scaled_var(&names[i], ratio_op(r))));
        }
    }
    for (i, s) in g.coords.iter().enumerate() {
        let Some(p) = s.point() else { continue };
        let l = p.operator();
        let la = Term::scaled_var(&names[i], l.clone());
        conj.push(match plan.tags[i] {
            ClauseTag::Eq => Formula::Eq(la),
            // the sign of the minimal polynomial just off its root depends on
            // the root, so the clause states the sign that actually holds
            _ => match op_sign(&l, s)? {
                Sign::Neg => Formula::Lt(la),
                _ => Formula::Lt(la.neg()),
            },
        });
    }
    Ok((plan, Formula::and(conj)))
}

/// `|x| < a`, as two cases.
fn abs_lt(x: &Term, a: &Term) -> Formula {
    let neg = Formula::lt(x, &Term::zero());
    Formula::or(vec![
        Formula::and(vec![Formula::not(neg.clone()), Formula::lt(x, a)]),
        Formula::and(vec![neg, Formula::lt(&x.neg(), a)]),
    ])
}

/// Existential and universal definitions of `U_alpha(x)`.
pub fn u_alpha_defs(alpha: usize, g: &NSumSpec) -> Result<(Formula, Formula)> {
    let n = g.n();
    if alpha > n {
        return Err(Error::IndexOutOfRange { index: alpha, max: n });
    }
    g.require_reduced()?;
    let x = Term::var("x");
    if alpha == 0 {
        let f = Formula::eq(&x, &Term::zero());
        return Ok((f.clone(), f));
    }
    if alpha == n {
        let f = Formula::eq(&x, &x);
        return Ok((f.clone(), f));
    }
    let (_, theta) = representative_theta(g)?;
    let names = seq_names(n);
    let ex = Formula::exists_many(
        &names,
        Formula::and(vec![theta.clone(), abs_lt(&x, &Term::var(&names[alpha - 1]))]),
    );
    let un = Formula::forall_many(
        &names,
        Formula::implies(theta, abs_lt(&x, &Term::var(&names[alpha]))),
    );
    Ok((ex, un))
}
