//! Omega-sums: coordinatewise classification against a point, the
//! model-completeness criterion, tail axioms, the `gamma*` map and the
//! formulas used to witness failure of model completeness.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{Formula, Term, UnpackedAtom};
use crate::operator::{LaurentOperator, Sign};
use crate::species::{
    cmp_with_rational, op_sign, separating_point, species_equiv, AlgRel, AlgebraicPoint,
    Separator, Species,
};

mod ratstr {
    use num_rational::BigRational;
    use serde::{de, Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Raw {
        Int(i64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(q: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        match Raw::deserialize(d)? {
            Raw::Int(n) => Ok(BigRational::from_integer(n.into())),
            Raw::Text(t) => t.trim().parse().map_err(de::Error::custom),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// The listed species repeat forever.
    Cycle(Vec<Species>),
    /// Tail coordinate `i` is `(= a*i + b)`.
    Unbounded {
        #[serde(with = "ratstr")]
        a: BigRational,
        #[serde(with = "ratstr")]
        b: BigRational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaSumSpec {
    #[serde(default)]
    pub prefix: Vec<Species>,
    pub tail: Tail,
}

impl OmegaSumSpec {
    pub fn cycle(prefix: Vec<Species>, cycle: Vec<Species>) -> Self {
        OmegaSumSpec { prefix, tail: Tail::Cycle(cycle) }
    }

    pub fn unbounded(prefix: Vec<Species>, a: BigRational, b: BigRational) -> Self {
        OmegaSumSpec { prefix, tail: Tail::Unbounded { a, b } }
    }

    pub fn check(&self) -> Result<()> {
        for s in &self.prefix {
            s.check()?;
        }
        match &self.tail {
            Tail::Cycle(c) if c.is_empty() => {
                Err(Error::InvalidSpecies("empty cycle".into()))
            }
            Tail::Cycle(c) => c.iter().try_for_each(|s| s.check()),
            Tail::Unbounded { a, b } => {
                if a.is_positive() && b.is_positive() {
                    Ok(())
                } else {
                    Err(Error::InvalidSpecies(
                        "unbounded tail needs a > 0 and b > 0".into(),
                    ))
                }
            }
        }
    }

    /// Species of coordinate `i`.
    pub fn species(&self, i: usize) -> Species {
        if i < self.prefix.len() {
            return self.prefix[i].clone();
        }
        let j = i - self.prefix.len();
        match &self.tail {
            Tail::Cycle(c) => c[j % c.len()].clone(),
            Tail::Unbounded { a, b } => {
                let m = a * BigRational::from_integer(BigInt::from(j)) + b;
                Species::rational(&m)
            }
        }
    }

    /// The first `n` coordinates.
    pub fn truncate(&self, n: usize) -> Vec<Species> {
        (0..n).map(|i| self.species(i)).collect()
    }

    /// The behavior at infinity: the common tail species, `(infinite)` for
    /// unbounded tails, `None` when the tail is mixed.
    pub fn type_at_infinity(&self) -> Option<Species> {
        match &self.tail {
            Tail::Unbounded { .. } => Some(Species::Infinite),
            Tail::Cycle(c) => c
                .iter()
                .all(|s| species_equiv(s, &c[0]))
                .then(|| c[0].clone()),
        }
    }
}

impl fmt::Display for OmegaSumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.prefix {
            write!(f, "{s} + ")?;
        }
        match &self.tail {
            Tail::Cycle(c) => {
                write!(f, "(")?;
                for (i, s) in c.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, ")^omega")
            }
            Tail::Unbounded { a, b } => write!(f, "(= {a}*i + {b}) for i in omega"),
        }
    }
}

/// Sign behavior of one coordinate relative to a point `rho`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Behavior {
    Con,
    Inc,
    Dec,
}

fn check_rho(rho: &AlgebraicPoint) -> Result<()> {
    let issues = rho.validate();
    if issues.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidRho(format!("{issues:?}")))
    }
}

/// Whether `s(x) = rho x`, `s(x) > rho x` or `s(x) < rho x` for positive `x`
/// in a coordinate of species `s`.
pub fn behavior(s: &Species, rho: &AlgebraicPoint) -> Result<Behavior> {
    if let Some(p) = s.point() {
        if p.same_root(rho) {
            return Ok(match s {
                Species::Algebraic(AlgRel::Eq, _) => Behavior::Con,
                Species::Algebraic(AlgRel::Lt, _) => Behavior::Dec,
                _ => Behavior::Inc,
            });
        }
    }
    let q = match rho.as_rational() {
        Some(q) => q,
        None => match separating_point(s, &Species::Algebraic(AlgRel::Eq, rho.clone()))? {
            Separator::Rational(q) => q,
            Separator::Algebraic(_) => return Err(Error::Unresolvable),
        },
    };
    Ok(match cmp_with_rational(s, &q)? {
        Sign::Pos => Behavior::Inc,
        Sign::Neg => Behavior::Dec,
        Sign::Zero => Behavior::Con,
    })
}

/// An eventually periodic set of indices: the members of `below` (all less
/// than `start`) together with every `i >= start` whose offset
/// `(i - start) mod period` is in `residues`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexSet {
    pub below: BTreeSet<usize>,
    pub start: usize,
    pub period: usize,
    pub residues: BTreeSet<usize>,
}

impl IndexSet {
    pub fn contains(&self, i: usize) -> bool {
        if i < self.start {
            self.below.contains(&i)
        } else {
            self.residues.contains(&((i - self.start) % self.period))
        }
    }

    pub fn is_finite(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn is_cofinite(&self) -> bool {
        self.residues.len() == self.period
    }

    /// Indices missing from a cofinite set, or the members of a finite one.
    pub fn exceptions(&self) -> Option<BTreeSet<usize>> {
        if self.is_finite() {
            Some(self.below.clone())
        } else if self.is_cofinite() {
            Some((0..self.start).filter(|i| !self.below.contains(i)).collect())
        } else {
            None
        }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |s: &BTreeSet<usize>| {
            s.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
        };
        if self.is_finite() {
            write!(f, "finite {{{}}}", list(&self.below))
        } else if self.is_cofinite() {
            write!(f, "cofinite, missing {{{}}}", list(&self.exceptions().unwrap()))
        } else {
            write!(
                f,
                "infinite, not cofinite: {{{}}} and i >= {} with (i - {}) mod {} in {{{}}}",
                list(&self.below),
                self.start,
                self.start,
                self.period,
                list(&self.residues),
            )
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RhoClassification {
    pub con: IndexSet,
    pub inc: IndexSet,
    pub dec: IndexSet,
}

impl RhoClassification {
    pub fn get(&self, b: Behavior) -> &IndexSet {
        match b {
            Behavior::Con => &self.con,
            Behavior::Inc => &self.inc,
            Behavior::Dec => &self.dec,
        }
    }

    pub fn has_cofinite(&self) -> bool {
        self.con.is_cofinite() || self.inc.is_cofinite() || self.dec.is_cofinite()
    }
}

/// Least `j >= 0` with `a j + b > bound`.
fn first_above(a: &BigRational, b: &BigRational, bound: &BigRational) -> usize {
    let t = (bound - b) / a;
    if t.is_negative() {
        0
    } else {
        (t.floor().to_integer() + BigInt::one()).to_usize().unwrap_or(usize::MAX)
    }
}

pub fn classify_rho(g: &OmegaSumSpec, rho: &AlgebraicPoint) -> Result<RhoClassification> {
    g.check()?;
    check_rho(rho)?;
    let (start, period, tail_of): (usize, usize, Vec<Behavior>) = match &g.tail {
        Tail::Cycle(c) => (
            g.prefix.len(),
            c.len(),
            c.iter().map(|s| behavior(s, rho)).collect::<Result<_>>()?,
        ),
        Tail::Unbounded { a, b } => {
            let j = first_above(a, b, &rho.interval().hi);
            (g.prefix.len() + j, 1, vec![Behavior::Inc])
        }
    };
    let below = (0..start)
        .map(|i| behavior(&g.species(i), rho))
        .collect::<Result<Vec<_>>>()?;
    let set = |b: Behavior| IndexSet {
        below: (0..start).filter(|&i| below[i] == b).collect(),
        start,
        period,
        residues: (0..period).filter(|&r| tail_of[r] == b).collect(),
    };
    Ok(RhoClassification {
        con: set(Behavior::Con),
        inc: set(Behavior::Inc),
        dec: set(Behavior::Dec),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Obstruction {
    /// `Con` is infinite but not cofinite at the witness.
    ConNotCofinite,
    /// `Con` is finite while `Inc` and `Dec` are both infinite.
    IncDecBothInfinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum McVerdict {
    Mc,
    NotMc {
        witness: AlgebraicPoint,
        lemma: Obstruction,
    },
}

impl McVerdict {
    pub fn is_mc(&self) -> bool {
        matches!(self, McVerdict::Mc)
    }
}

pub fn is_model_complete(g: &OmegaSumSpec) -> Result<McVerdict> {
    g.check()?;
    let c = match &g.tail {
        Tail::Unbounded { .. } => return Ok(McVerdict::Mc),
        Tail::Cycle(c) => c,
    };
    if c.iter().all(|s| species_equiv(s, &c[0])) {
        return Ok(McVerdict::Mc);
    }
    // a tail species fixing some point makes Con infinite there, and the
    // tail is mixed, so Con misses infinitely many indices
    if let Some(p) = c.iter().find_map(|s| s.eq_point()) {
        return Ok(McVerdict::NotMc {
            witness: p.clone(),
            lemma: Obstruction::ConNotCofinite,
        });
    }
    let other = c.iter().find(|s| !species_equiv(s, &c[0])).unwrap();
    let witness = match separating_point(&c[0], other)? {
        Separator::Rational(q) => AlgebraicPoint::rational(&q),
        Separator::Algebraic(p) => p,
    };
    Ok(McVerdict::NotMc {
        witness,
        lemma: Obstruction::IncDecBothInfinite,
    })
}

/// The resolved disjunct of `phi_L`: every `x` above `U_n` has `L(x)` of sign `sign`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TailAxiom {
    pub n: usize,
    pub sign: Sign,
    pub formula: Formula,
}

/// Cauchy bound on the positive real roots of `l`.
fn root_bound(l: &LaurentOperator) -> BigRational {
    let p = l.to_poly();
    let lead = p.lead().abs();
    let mut m = BigRational::zero();
    for c in p.coeffs() {
        let r = c.abs() / &lead;
        if r > m {
            m = r;
        }
    }
    m + BigRational::one()
}

pub fn tail_axioms(g: &OmegaSumSpec, l: &LaurentOperator) -> Result<TailAxiom> {
    if l.is_zero() {
        return Err(Error::ZeroOperator);
    }
    if !is_model_complete(g)?.is_mc() {
        return Err(Error::NotModelComplete);
    }
    // every coordinate from `start` on has the sign at infinity
    let (sign, start) = match &g.tail {
        Tail::Cycle(c) => (op_sign(l, &c[0])?, g.prefix.len()),
        Tail::Unbounded { a, b } => (
            op_sign(l, &Species::Infinite)?,
            g.prefix.len() + first_above(a, b, &root_bound(l)),
        ),
    };
    let mut n = 0;
    for i in (0..start).rev() {
        if op_sign(l, &g.species(i))? != sign {
            n = i + 1;
            break;
        }
    }
    let x = Term::var("x");
    let mut guard = vec![Formula::lt(&Term::zero(), &x)];
    if n > 0 {
        guard.push(Formula::not(Formula::U(n, x.clone())));
    }
    let lx = x.apply(l);
    let body = match sign {
        Sign::Pos => Formula::Lt(lx.neg()),
        Sign::Neg => Formula::Lt(lx),
        Sign::Zero => Formula::Eq(lx),
    };
    Ok(TailAxiom {
        n,
        sign,
        formula: Formula::forall("x", Formula::implies(Formula::and(guard), body)),
    })
}

/// Name of the `w` variable standing for `above[i]`.
pub fn w_name(i: usize) -> String {
    format!("w{}", i + 1)
}

/// The image of a conjunction of unpacked atoms over variables `0..`, where
/// `below` lists the variables under the cut and `above` those over it. The
/// result is a formula in `w1 .. wm`, `m = above.len()`.
pub fn gamma_star(
    conj: &[UnpackedAtom],
    below: &BTreeSet<usize>,
    above: &[usize],
) -> Result<Formula> {
    let pos = |v: usize| above.iter().position(|&a| a == v);
    let ws: Vec<String> = (0..above.len()).map(w_name).collect();
    let trivial = || match above.first() {
        Some(_) => Formula::eq(&Term::var(&ws[0]), &Term::var(&ws[0])),
        None => Formula::True,
    };
    let mut out = Vec::new();
    for atom in conj {
        let vs = atom.vars();
        let generic: Vec<String> = (0..=vs.iter().copied().max().unwrap_or(0))
            .map(|i| format!("x{i}"))
            .collect();
        let bad = || Error::UnsplittableAtom(atom.display(&generic));
        for &v in &vs {
            if !below.contains(&v) && pos(v).is_none() {
                return Err(Error::Input(format!("variable {v} is on neither side")));
            }
        }
        let is_low: Vec<bool> = vs.iter().map(|v| below.contains(v)).collect();
        if is_low.iter().all(|&b| b) {
            out.push(trivial());
        } else if is_low.iter().all(|&b| !b) {
            out.push(atom.map(|v| pos(v).unwrap()).to_formula(&ws));
        } else {
            match (atom, is_low.as_slice()) {
                (UnpackedAtom::Sub(i, j, _), [false, false, true]) => out.push(Formula::eq(
                    &Term::var(&ws[pos(*i).unwrap()]),
                    &Term::var(&ws[pos(*j).unwrap()]),
                )),
                // always true across the cut
                (UnpackedAtom::Lt(..), [true, false]) => out.push(trivial()),
                _ => return Err(bad()),
            }
        }
    }
    Ok(Formula::and(out))
}

/// Formulas built around a point `rho`: elements near `rho`, their convex
/// classes, the successor relation on classes, and the same for elements
/// with `s(x) > rho x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionFormulas {
    /// `near(x)`
    pub near: Formula,
    /// `b in [a]`
    pub class: Formula,
    /// `next(x, y)`
    pub next: Formula,
    /// `phi(x, a)`
    pub phi: Formula,
    /// `s(x) > rho x`, for positive `x`
    pub gt: Formula,
    /// `b in [a]>`
    pub class_gt: Formula,
    /// `next>(x, y)`
    pub next_gt: Formula,
    /// `phi>(x, a)`
    pub phi_gt: Formula,
}

type Pred<'a> = &'a dyn Fn(&Term) -> Formula;

fn le(a: &Term, b: &Term) -> Formula {
    Formula::not(Formula::lt(b, a))
}

fn fresh(base: &str, ts: &[&Term]) -> String {
    let mut used = BTreeSet::new();
    for t in ts {
        used.extend(t.vars());
    }
    crate::formula::fresh_name(base, &used)
}

/// `b in [a]` for the convex class cut out by `p`.
fn member(p: Pred, a: &Term, b: &Term) -> Formula {
    let c = fresh("c", &[a, b]);
    let tc = Term::var(&c);
    let side = |lo: &Term, hi: &Term| {
        Formula::and(vec![
            le(lo, hi),
            Formula::forall(
                &c,
                Formula::implies(Formula::and(vec![le(lo, &tc), le(&tc, hi)]), p(&tc)),
            ),
        ])
    };
    Formula::or(vec![side(a, b), side(b, a)])
}

fn next_of(p: Pred, x: &Term, y: &Term) -> Formula {
    let z = fresh("z", &[x, y]);
    let tz = Term::var(&z);
    Formula::and(vec![
        Formula::lt(&Term::zero(), x),
        Formula::lt(x, y),
        p(x),
        p(y),
        Formula::not(member(p, x, y)),
        Formula::forall(
            &z,
            Formula::implies(
                Formula::and(vec![le(x, &tz), le(&tz, y), p(&tz)]),
                Formula::or(vec![member(p, x, &tz), member(p, y, &tz)]),
            ),
        ),
    ])
}

fn phi_of(p: Pred, x: &Term, a: &Term) -> Formula {
    Formula::or(vec![
        Formula::and(vec![le(&Term::zero(), x), le(x, a)]),
        member(p, a, x),
    ])
}

/// `d s - n` for `q = n / d`.
fn ratio_op(q: &BigRational) -> LaurentOperator {
    LaurentOperator::from_bigints(&[-q.numer().clone(), q.denom().clone()])
}

fn near_of(l: &LaurentOperator, a: &Term) -> Formula {
    let b = fresh("b", &[a]);
    let tb = Term::var(&b);
    Formula::and(vec![
        Formula::lt(&Term::zero(), a),
        Formula::exists(
            &b,
            Formula::and(vec![
                le(a, &tb),
                le(&tb, &a.scale(2)),
                Formula::Eq(tb.apply(l)),
            ]),
        ),
    ])
}

/// `s(v) > rho v` for positive `v`. An irrational `rho` is pinned by its
/// isolating interval `(lo, hi)` and the sign of its minimal polynomial just
/// above the root.
fn gt_of(rho: &AlgebraicPoint, v: &Term) -> Result<Formula> {
    if let Some(q) = rho.as_rational() {
        return Ok(Formula::Lt(v.apply(&ratio_op(&q)).neg()));
    }
    let p = rho.operator();
    let eps = op_sign(&p, &Species::Algebraic(AlgRel::Gt, rho.clone()))?;
    let pv = v.apply(&p);
    let pv_pos = if eps == Sign::Pos { Formula::Lt(pv.neg()) } else { Formula::Lt(pv) };
    let iv = rho.interval();
    Ok(Formula::or(vec![
        Formula::not(Formula::Lt(v.apply(&ratio_op(&iv.hi)))),
        Formula::and(vec![Formula::Lt(v.apply(&ratio_op(&iv.lo)).neg()), pv_pos]),
    ]))
}

pub fn obstruction_formulas(rho: &AlgebraicPoint) -> Result<ObstructionFormulas> {
    check_rho(rho)?;
    let l = rho.operator();
    let near = |t: &Term| near_of(&l, t);
    // checked once; the closure below cannot fail afterwards
    gt_of(rho, &Term::var("x"))?;
    let gt = |t: &Term| gt_of(rho, t).unwrap();
    let (x, y, a, b) = (Term::var("x"), Term::var("y"), Term::var("a"), Term::var("b"));
    Ok(ObstructionFormulas {
        near: near(&x),
        class: member(&near, &a, &b),
        next: next_of(&near, &x, &y),
        phi: phi_of(&near, &x, &a),
        gt: gt(&x),
        class_gt: member(&gt, &a, &b),
        next_gt: next_of(&gt, &x, &y),
        phi_gt: phi_of(&gt, &x, &a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{free_vars, quantifier_rank};
    use crate::nsum::{decide_nsum, NSumSpec};
    use proptest::prelude::*;

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn pt(n: i64) -> AlgebraicPoint {
        AlgebraicPoint::rational(&int(n))
    }

    fn sqrt2() -> AlgebraicPoint {
        AlgebraicPoint::from_i64(&[-2, 0, 1], (1, 1), (3, 2))
    }

    fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(vec![
            Formula::implies(a.clone(), b.clone()),
            Formula::implies(b, a),
        ])
    }

    #[test]
    fn classify_examples() {
        let g = OmegaSumSpec::cycle(vec![], vec![Species::eq_int(2)]);
        let c = classify_rho(&g, &pt(2)).unwrap();
        assert!(c.con.is_cofinite());
        assert!(c.inc.is_finite() && c.inc.below.is_empty());
        assert!(c.dec.is_finite() && c.dec.below.is_empty());

        let g = OmegaSumSpec::cycle(vec![], vec![Species::eq_int(2), Species::eq_int(3)]);
        let c = classify_rho(&g, &pt(2)).unwrap();
        assert!(!c.con.is_finite() && !c.con.is_cofinite());
        assert!((0..20).all(|i| c.con.contains(i) == (i % 2 == 0)));
        assert!((0..20).all(|i| c.inc.contains(i) == (i % 2 == 1)));

        let g = OmegaSumSpec::unbounded(vec![], int(1), int(1));
        let c = classify_rho(&g, &pt(5)).unwrap();
        assert!(c.inc.is_cofinite());
        assert_eq!(c.inc.exceptions().unwrap(), (0..5).collect());
        assert_eq!(c.con.below, [4].into());
    }

    #[test]
    fn model_completeness_examples() {
        let g = OmegaSumSpec::unbounded(vec![], int(1), int(1));
        assert_eq!(is_model_complete(&g).unwrap(), McVerdict::Mc);

        let g = OmegaSumSpec::cycle(vec![], vec![Species::eq_int(2), Species::eq_int(3)]);
        assert_eq!(
            is_model_complete(&g).unwrap(),
            McVerdict::NotMc { witness: pt(2), lemma: Obstruction::ConNotCofinite }
        );

        let g = OmegaSumSpec::cycle(
            vec![],
            vec![
                Species::Algebraic(AlgRel::Lt, sqrt2()),
                Species::Algebraic(AlgRel::Gt, sqrt2()),
            ],
        );
        match is_model_complete(&g).unwrap() {
            McVerdict::NotMc { witness, lemma } => {
                assert!(witness.same_root(&sqrt2()));
                assert_eq!(lemma, Obstruction::IncDecBothInfinite);
                let c = classify_rho(&g, &witness).unwrap();
                assert!(c.con.is_finite());
                assert!(!c.inc.is_finite() && !c.dec.is_finite());
            }
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn tail_axiom_examples() {
        let l = LaurentOperator::parse("s - 3").unwrap();
        let g = OmegaSumSpec::cycle(vec![], vec![Species::eq_int(2)]);
        let t = tail_axioms(&g, &l).unwrap();
        assert_eq!((t.n, t.sign), (0, Sign::Neg));
        assert_eq!(t.formula.to_string(), "A x. 0 < x -> s(x) < 3*x");

        let g = OmegaSumSpec::unbounded(vec![], int(1), int(1));
        let t = tail_axioms(&g, &l).unwrap();
        assert_eq!((t.n, t.sign), (3, Sign::Pos));

        assert_eq!(tail_axioms(&g, &LaurentOperator::zero()), Err(Error::ZeroOperator));
        let bad = OmegaSumSpec::cycle(vec![], vec![Species::eq_int(2), Species::eq_int(3)]);
        assert_eq!(tail_axioms(&bad, &l), Err(Error::NotModelComplete));
    }

    #[test]
    fn tail_axiom_holds_in_truncations() {
        let l = LaurentOperator::parse("s^2 - 7*s + 11").unwrap();
        let g = OmegaSumSpec::unbounded(vec![Species::eq_int(9)], int(1), int(1));
        let t = tail_axioms(&g, &l).unwrap();
        for i in t.n..t.n + 12 {
            assert_eq!(op_sign(&l, &g.species(i)).unwrap(), t.sign, "coordinate {i}");
        }
        if t.n > 0 {
            assert_ne!(op_sign(&l, &g.species(t.n - 1)).unwrap(), t.sign);
        }
    }

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn gamma_star_cases() {
        // x1 = 0, x2 = 1 below; y1 = 2, y2 = 3 above
        let below: BTreeSet<usize> = [0, 1].into();
        let above = [2, 3];
        let u = |a: UnpackedAtom| gamma_star(&[a], &below, &above).unwrap().to_string();
        assert_eq!(u(UnpackedAtom::Sub(2, 3, 0)), "w1 = w2");
        assert_eq!(u(UnpackedAtom::Sigma(2, 3)), "s(w1) = w2");
        // `w1 = w1` normalizes to `0 = 0`
        assert_eq!(u(UnpackedAtom::Lt(0, 1)), "0 = 0");
        assert_eq!(
            u(UnpackedAtom::Add(3, 2, 3)),
            UnpackedAtom::Add(1, 0, 1).to_formula(&names(&["w1", "w2"])).to_string()
        );
        let e = gamma_star(&[UnpackedAtom::Add(0, 1, 2)], &below, &above);
        assert!(matches!(e, Err(Error::UnsplittableAtom(_))));
        let e = gamma_star(&[UnpackedAtom::Lt(2, 0)], &below, &above);
        assert!(matches!(e, Err(Error::UnsplittableAtom(_))));
        let f = gamma_star(
            &[UnpackedAtom::Sub(3, 2, 1), UnpackedAtom::Eq(0, 1), UnpackedAtom::Lt(2, 3)],
            &below,
            &above,
        )
        .unwrap();
        assert!(crate::formula::free_vars(&f).is_subset(&names(&["w1", "w2"]).into_iter().collect()));
    }

    #[test]
    fn near_formula_shape() {
        let o = obstruction_formulas(&pt(2)).unwrap();
        assert_eq!(
            o.near.to_string(),
            "0 < x & (E b1. !(b1 < x) & !(2*x < b1) & s(b1) = 2*b1)"
        );
        assert!(quantifier_rank(&o.next) >= 1);
        assert_eq!(free_vars(&o.next), names(&["x", "y"]).into_iter().collect());
        assert_eq!(free_vars(&o.phi), names(&["a", "x"]).into_iter().collect());
        let Formula::Or(d) = &o.class else { panic!() };
        let swapped = crate::formula::substitute(
            &crate::formula::substitute(
                &crate::formula::substitute(&o.class, "a", &Term::var("t")),
                "b",
                &Term::var("a"),
            ),
            "t",
            &Term::var("b"),
        );
        assert_eq!(swapped, Formula::or(vec![d[1].clone(), d[0].clone()]));
    }

    #[test]
    fn near_is_the_fixed_band() {
        let o = obstruction_formulas(&pt(2)).unwrap();
        let x = Term::var("x");
        let pos = Formula::lt(&Term::zero(), &x);
        let f = Formula::forall(
            "x",
            iff(o.near.clone(), Formula::and(vec![pos.clone(), Formula::U(1, x.clone())])),
        );
        assert!(decide_nsum(&f, &NSumSpec::from_ints(&[2, 3])).unwrap());
        let f = Formula::forall(
            "x",
            iff(o.near, Formula::and(vec![pos, Formula::not(Formula::U(1, x))])),
        );
        assert!(decide_nsum(&f, &NSumSpec::from_ints(&[3, 2])).unwrap());
    }

    #[test]
    fn gt_at_an_irrational_point() {
        let o = obstruction_formulas(&sqrt2()).unwrap();
        let x = Term::var("x");
        let f = Formula::forall(
            "x",
            Formula::implies(
                Formula::lt(&Term::zero(), &x),
                iff(o.gt, Formula::not(Formula::U(1, x))),
            ),
        );
        assert!(decide_nsum(&f, &NSumSpec::from_ints(&[1, 2])).unwrap());
    }

    #[test]
    fn invalid_rho() {
        let bad = AlgebraicPoint::from_i64(&[-2, 0, 1], (2, 1), (3, 1));
        assert!(matches!(obstruction_formulas(&bad), Err(Error::InvalidRho(_))));
        let g = OmegaSumSpec::cycle(vec![], vec![Species::eq_int(2)]);
        assert!(matches!(classify_rho(&g, &bad), Err(Error::InvalidRho(_))));
    }

    #[test]
    fn spec_json_round_trip() {
        let text = r#"{"prefix":[],"tail":{"unbounded":{"a":1,"b":"3/2"}}}"#;
        let g: OmegaSumSpec = serde_json::from_str(text).unwrap();
        assert_eq!(g, OmegaSumSpec::unbounded(vec![], int(1), BigRational::new(3.into(), 2.into())));
        let back: OmegaSumSpec = serde_json::from_str(&serde_json::to_string(&g).unwrap()).unwrap();
        assert_eq!(back, g);
    }

    fn arb_species() -> impl Strategy<Value = Species> {
        prop_oneof![
            (1i64..5).prop_map(Species::eq_int),
            (1i64..5).prop_map(|n| Species::Algebraic(AlgRel::Lt, pt(n))),
            (1i64..5).prop_map(|n| Species::Algebraic(AlgRel::Gt, pt(n))),
            Just(Species::Algebraic(AlgRel::Eq, sqrt2())),
            Just(Species::Algebraic(AlgRel::Gt, sqrt2())),
        ]
    }

    fn arb_cycle() -> impl Strategy<Value = OmegaSumSpec> {
        (
            prop::collection::vec(arb_species(), 0..3),
            prop::collection::vec(arb_species(), 1..4),
        )
            .prop_map(|(p, c)| OmegaSumSpec::cycle(p, c))
    }

    fn candidates(g: &OmegaSumSpec) -> Vec<AlgebraicPoint> {
        let Tail::Cycle(c) = &g.tail else { unreachable!() };
        let mut out: Vec<AlgebraicPoint> = c.iter().filter_map(|s| s.point().cloned()).collect();
        for a in c {
            for b in c {
                if let Ok(s) = separating_point(a, b) {
                    out.push(match s {
                        Separator::Rational(q) => AlgebraicPoint::rational(&q),
                        Separator::Algebraic(p) => p,
                    });
                }
            }
        }
        out
    }

    proptest! {
        #[test]
        fn classes_partition(g in arb_cycle(), n in 1i64..12, d in 1i64..4) {
            let rho = AlgebraicPoint::rational(&BigRational::new(n.into(), d.into()));
            let c = classify_rho(&g, &rho).unwrap();
            for i in 0..40 {
                let k = [&c.con, &c.inc, &c.dec].iter().filter(|s| s.contains(i)).count();
                prop_assert_eq!(k, 1);
                prop_assert!(c.get(behavior(&g.species(i), &rho).unwrap()).contains(i));
            }
        }

        #[test]
        fn verdict_survives_rotation(g in arb_cycle(), r in 0usize..4, k in 1usize..3) {
            let Tail::Cycle(c) = &g.tail else { unreachable!() };
            let mut rot = c.clone();
            rot.rotate_left(r % c.len());
            let rep: Vec<Species> = rot.iter().cycle().take(rot.len() * k).cloned().collect();
            let h = OmegaSumSpec::cycle(g.prefix.clone(), rep);
            prop_assert_eq!(
                is_model_complete(&g).unwrap().is_mc(),
                is_model_complete(&h).unwrap().is_mc()
            );
        }

        #[test]
        fn verdict_matches_criterion(g in arb_cycle(), qs in prop::collection::vec((1i64..40, 1i64..8), 50)) {
            let mut pts = candidates(&g);
            pts.extend(qs.iter().map(|&(n, d)| AlgebraicPoint::rational(&BigRational::new(n.into(), d.into()))));
            let all_cofinite = pts
                .iter()
                .all(|p| classify_rho(&g, p).unwrap().has_cofinite());
            prop_assert_eq!(is_model_complete(&g).unwrap().is_mc(), all_cofinite);
        }
    }
}
