//! Graded n-sums of div-MODAGs.
//!
//! An [`NSumSpec`] lists coordinate species `H_0 .. H_{n-1}`; the sum is
//! ordered reverse-lexicographically and `U_a` is the span of coordinates
//! below `a`. An operator acts on each coordinate as multiplication by its
//! value at that coordinate's multiplier, so it is zero or invertible there.

mod band;
mod repseq;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{
    dnf_clauses, free_vars, nnf, simplify, Formula, Literal, ProjKind, Term, TermKey,
};
use crate::operator::{LaurentOperator, Sign};
use crate::species::{op_sign, species_equiv, Species, SpeciesKind};

pub use repseq::{representative_theta, u_alpha_defs, ClauseTag, RepresentativePlan};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NSumSpec {
    pub coords: Vec<Species>,
}

impl NSumSpec {
    pub fn new(coords: Vec<Species>) -> Self {
        NSumSpec { coords }
    }

    pub fn from_ints(ms: &[i64]) -> Self {
        NSumSpec::new(ms.iter().map(|&m| Species::eq_int(m)).collect())
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn check(&self) -> Result<()> {
        if self.coords.is_empty() {
            return Err(Error::Input("an n-sum needs at least one coordinate".into()));
        }
        self.coords.iter().try_for_each(Species::check)
    }

    /// Index of the first adjacent pair of equivalent coordinates.
    pub fn first_unreduced(&self) -> Option<usize> {
        self.coords
            .windows(2)
            .position(|w| species_equiv(&w[0], &w[1]))
    }

    pub fn is_reduced(&self) -> bool {
        self.first_unreduced().is_none()
    }

    pub fn require_reduced(&self) -> Result<()> {
        match self.first_unreduced() {
            Some(i) => Err(Error::NotReduced(i, i + 1)),
            None => Ok(()),
        }
    }
}

impl fmt::Display for NSumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|s| s.to_string()).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

/// Collapses runs of adjacent equivalent coordinates.
pub fn reduce_spec(g: &NSumSpec) -> NSumSpec {
    let mut out: Vec<Species> = Vec::new();
    for s in &g.coords {
        if out.last().map_or(true, |l| !species_equiv(l, s)) {
            out.push(s.clone());
        }
    }
    NSumSpec::new(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Dullness {
    Dull,
    NotDull { witness: LaurentOperator },
}

/// Dull when every operator kills all coordinates or none.
pub fn is_dull(g: &NSumSpec) -> Dullness {
    let eq: Vec<&Species> = g
        .coords
        .iter()
        .filter(|s| s.kind() == SpeciesKind::AlgebraicEq)
        .collect();
    let Some(first) = eq.first() else {
        return Dullness::Dull;
    };
    let p = first.eq_point().expect("algebraic eq").minpoly().to_vec();
    if eq.len() == g.n() && eq.iter().all(|s| s.eq_point().unwrap().minpoly() == p.as_slice()) {
        Dullness::Dull
    } else {
        Dullness::NotDull {
            witness: first.eq_point().unwrap().operator(),
        }
    }
}

/// A witness operator with the coordinates it kills (`s`) and the rest (`t`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitData {
    pub witness: LaurentOperator,
    pub s: Vec<usize>,
    pub t: Vec<usize>,
}

impl SplitData {
    pub fn new(witness: LaurentOperator, g: &NSumSpec) -> Result<Self> {
        let (mut s, mut t) = (Vec::new(), Vec::new());
        for (i, sp) in g.coords.iter().enumerate() {
            if op_sign(&witness, sp)? == Sign::Zero {
                s.push(i);
            } else {
                t.push(i);
            }
        }
        if s.is_empty() || t.is_empty() {
            return Err(Error::Input(format!("{witness} does not split {g}")));
        }
        Ok(SplitData { witness, s, t })
    }

    pub fn for_spec(g: &NSumSpec) -> Result<Option<Self>> {
        match is_dull(g) {
            Dullness::Dull => Ok(None),
            Dullness::NotDull { witness } => SplitData::new(witness, g).map(Some),
        }
    }
}

/// A set of coordinates addressed by a fixed set of projections.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    pub coords: Vec<usize>,
    pub projs: BTreeSet<(ProjKind, LaurentOperator)>,
}

/// Coordinates split into parts, each reached by projecting terms.
#[derive(Debug, Clone)]
pub struct Partition {
    pub n: usize,
    pub species: Vec<Species>,
    pub parts: Vec<Part>,
}

impl Partition {
    /// Parts on which every operator vanishes everywhere or nowhere: one per
    /// minimal polynomial of an eq coordinate, plus the remaining coordinates.
    pub fn classes(g: &NSumSpec) -> Result<Self> {
        g.check()?;
        let mut keys: Vec<Option<LaurentOperator>> = Vec::new();
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, s) in g.coords.iter().enumerate() {
            let key = s.eq_point().map(|p| p.operator());
            let pos = match keys.iter().position(|k| *k == key) {
                Some(p) => p,
                None => {
                    keys.push(key);
                    keys.len() - 1
                }
            };
            members.entry(pos).or_default().push(i);
        }
        let minpolys: Vec<LaurentOperator> = keys.iter().flatten().cloned().collect();
        let single = keys.len() == 1;
        let parts = keys
            .iter()
            .enumerate()
            .map(|(pos, key)| {
                let projs = match (single, key) {
                    (true, _) => BTreeSet::new(),
                    (false, Some(p)) => [(ProjKind::K, p.clone())].into_iter().collect(),
                    (false, None) => minpolys.iter().map(|p| (ProjKind::R, p.clone())).collect(),
                };
                Part {
                    coords: members[&pos].clone(),
                    projs,
                }
            })
            .collect();
        Ok(Partition {
            n: g.n(),
            species: g.coords.clone(),
            parts,
        })
    }

    /// The kernel and range of the split witness.
    pub fn from_split(sd: &SplitData, g: &NSumSpec) -> Self {
        let part = |coords: &Vec<usize>, kind| Part {
            coords: coords.clone(),
            projs: [(kind, sd.witness.clone())].into_iter().collect(),
        };
        Partition {
            n: g.n(),
            species: g.coords.clone(),
            parts: vec![part(&sd.s, ProjKind::K), part(&sd.t, ProjKind::R)],
        }
    }

    pub fn part_of(&self, i: usize) -> usize {
        self.parts
            .iter()
            .position(|p| p.coords.contains(&i))
            .expect("partition covers every coordinate")
    }

    pub fn vanishes(&self, l: &LaurentOperator, i: usize) -> Result<bool> {
        Ok(op_sign(l, &self.species[i])? == Sign::Zero)
    }

    /// Coordinates a projected variable can be nonzero on.
    pub fn key_support(&self, key: &TermKey) -> Result<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        'coords: for i in 0..self.n {
            for (kind, l) in &key.projs {
                let z = self.vanishes(l, i)?;
                if z != (*kind == ProjKind::K) {
                    continue 'coords;
                }
            }
            out.insert(i);
        }
        Ok(out)
    }

    /// Projection of `t` onto part `p`, with keys rewritten to the part's
    /// projections where possible and vanishing monomials dropped.
    pub fn project(&self, t: &Term, p: usize) -> Result<Term> {
        let part = &self.parts[p];
        let mut out = Term::zero();
        for (key, op) in t.iter() {
            let support: Vec<usize> = self
                .key_support(key)?
                .into_iter()
                .filter(|i| part.coords.contains(i))
                .collect();
            let mut live = false;
            for &i in &support {
                live |= !self.vanishes(op, i)?;
            }
            if !live {
                continue;
            }
            let projs = if support.len() == part.coords.len() {
                part.projs.clone()
            } else {
                key.projs.union(&part.projs).cloned().collect()
            };
            out.add_monomial(
                TermKey {
                    var: key.var.clone(),
                    projs,
                },
                op.clone(),
            );
        }
        Ok(out)
    }

    /// Number of coordinates of part `p` below the global level `alpha`.
    pub fn local_level(&self, p: usize, alpha: usize) -> usize {
        self.parts[p].coords.iter().filter(|&&i| i < alpha).count()
    }

    pub fn global_level(&self, p: usize, j: usize) -> usize {
        self.parts[p].coords.get(j).copied().unwrap_or(self.n)
    }

    pub fn width(&self, p: usize) -> usize {
        self.parts[p].coords.len()
    }

    /// `U` at local level `j` of part `p`, for a term living in that part.
    pub fn u_atom(&self, p: usize, j: usize, t: &Term) -> Formula {
        if j == 0 {
            simplify(&Formula::Eq(t.clone()))
        } else if j >= self.width(p) {
            Formula::True
        } else {
            simplify(&Formula::U(self.global_level(p, j), t.clone()))
        }
    }

    /// Which part a term built only from this part's keys belongs to.
    pub fn part_of_term(&self, t: &Term) -> Option<usize> {
        let key = t.iter().next()?.0;
        self.parts.iter().position(|p| p.projs == key.projs)
    }
}

impl Partition {
    fn projections(&self, t: &Term) -> Result<Vec<Term>> {
        (0..self.parts.len()).map(|p| self.project(t, p)).collect()
    }

    /// `t < 0` from the signs of its projections: the top nonzero coordinate
    /// falls in some run of consecutive coordinates of one part.
    fn rewrite_lt(&self, t: &Term) -> Result<Formula> {
        let proj = self.projections(t)?;
        let live: Vec<usize> = (0..proj.len()).filter(|&p| !proj[p].is_zero()).collect();
        match live.as_slice() {
            [] => return Ok(Formula::False),
            [p] => return Ok(Formula::Lt(proj[*p].clone())),
            _ => {}
        }
        let labels: Vec<(usize, usize)> = (0..self.n)
            .map(|i| (i, self.part_of(i)))
            .filter(|(_, p)| live.contains(p))
            .collect();
        let mut out = Vec::new();
        let mut k = 0;
        while k < labels.len() {
            let (a, p) = labels[k];
            let mut m = k;
            while m < labels.len() && labels[m].1 == p {
                m += 1;
            }
            let b = labels.get(m).map_or(self.n, |l| l.0);
            let mut conj: Vec<Formula> = live
                .iter()
                .map(|&q| self.u_atom(q, self.local_level(q, b), &proj[q]))
                .collect();
            let la = self.local_level(p, a);
            if la > 0 {
                conj.push(Formula::not(self.u_atom(p, la, &proj[p])));
            }
            conj.push(Formula::Lt(proj[p].clone()));
            out.push(Formula::and(conj));
            k = m;
        }
        Ok(Formula::or(out))
    }

    /// Equivalent boolean combination of atoms each living in one part.
    pub fn rewrite_atom(&self, atom: &Formula) -> Result<Formula> {
        let f = match atom {
            Formula::Eq(t) => Formula::and(
                self.projections(t)?
                    .into_iter()
                    .map(|s| simplify(&Formula::Eq(s)))
                    .collect(),
            ),
            Formula::Lt(t) => self.rewrite_lt(t)?,
            Formula::U(alpha, t) => {
                if *alpha > self.n {
                    return Err(Error::IndexOutOfRange {
                        index: *alpha,
                        max: self.n,
                    });
                }
                let mut conj = Vec::new();
                for (p, s) in self.projections(t)?.iter().enumerate() {
                    conj.push(self.u_atom(p, self.local_level(p, *alpha), s));
                }
                Formula::and(conj)
            }
            Formula::K(l, t) | Formula::R(l, t) => {
                let kernel = matches!(atom, Formula::K(..));
                let mut conj = Vec::new();
                for (p, s) in self.projections(t)?.into_iter().enumerate() {
                    let mut zeros = 0;
                    for &i in &self.parts[p].coords {
                        zeros += self.vanishes(l, i)? as usize;
                    }
                    let all = zeros == self.width(p);
                    conj.push(match (kernel, zeros == 0, all) {
                        (true, _, true) | (false, true, _) => Formula::True,
                        (true, true, _) | (false, _, true) => simplify(&Formula::Eq(s)),
                        (true, ..) => simplify(&Formula::K(l.clone(), s)),
                        (false, ..) => simplify(&Formula::R(l.clone(), s)),
                    });
                }
                Formula::and(conj)
            }
            Formula::True | Formula::False => atom.clone(),
            other => return Err(Error::UnsupportedVocabulary(format!("{other}"))),
        };
        Ok(simplify(&f))
    }

    fn rewrite_where(&self, f: &Formula, pick: &dyn Fn(&Formula) -> bool) -> Result<Formula> {
        Ok(match f {
            Formula::Not(a) => Formula::not(self.rewrite_where(a, pick)?),
            Formula::And(v) => Formula::and(
                v.iter()
                    .map(|g| self.rewrite_where(g, pick))
                    .collect::<Result<_>>()?,
            ),
            Formula::Or(v) => Formula::or(
                v.iter()
                    .map(|g| self.rewrite_where(g, pick))
                    .collect::<Result<_>>()?,
            ),
            Formula::Implies(a, b) => {
                Formula::implies(self.rewrite_where(a, pick)?, self.rewrite_where(b, pick)?)
            }
            Formula::Exists(..) | Formula::Forall(..) => return Err(Error::NotQuantifierFree),
            a if pick(a) => self.rewrite_atom(a)?,
            a => a.clone(),
        })
    }

    pub fn x_key(&self, x: &str, p: usize) -> TermKey {
        TermKey {
            var: x.to_string(),
            projs: self.parts[p].projs.clone(),
        }
    }
}

/// Rewrites a quantifier-free formula so every atom sits on the kernel or
/// the range of the split witness.
pub fn kr_split(f: &Formula, sd: &SplitData, g: &NSumSpec) -> Result<Formula> {
    check_vocabulary(f, g.n())?;
    let part = Partition::from_split(sd, g);
    part.rewrite_where(f, &|_| true)
}

fn check_vocabulary(f: &Formula, n: usize) -> Result<()> {
    match f {
        Formula::U(a, _) if *a > n => Err(Error::IndexOutOfRange { index: *a, max: n }),
        Formula::OrderEq(..) | Formula::OrderLt(..) => {
            Err(Error::UnsupportedVocabulary(format!("{f}")))
        }
        Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => check_vocabulary(a, n),
        Formula::Implies(a, b) => {
            check_vocabulary(a, n)?;
            check_vocabulary(b, n)
        }
        Formula::And(v) | Formula::Or(v) => v.iter().try_for_each(|g| check_vocabulary(g, n)),
        _ => Ok(()),
    }
}

fn term_of(atom: &Formula) -> Option<&Term> {
    match atom {
        Formula::Eq(t) | Formula::Lt(t) | Formula::U(_, t) | Formula::K(_, t) | Formula::R(_, t) => {
            Some(t)
        }
        _ => None,
    }
}

fn map_atoms(f: &Formula, m: &mut dyn FnMut(&Formula) -> Result<Formula>) -> Result<Formula> {
    Ok(match f {
        Formula::Not(a) => Formula::not(map_atoms(a, m)?),
        Formula::And(v) => Formula::and(v.iter().map(|g| map_atoms(g, m)).collect::<Result<_>>()?),
        Formula::Or(v) => Formula::or(v.iter().map(|g| map_atoms(g, m)).collect::<Result<_>>()?),
        Formula::Implies(a, b) => Formula::implies(map_atoms(a, m)?, map_atoms(b, m)?),
        a => m(a)?,
    })
}

fn collect_coeffs(f: &Formula, key: &TermKey, out: &mut Vec<LaurentOperator>) {
    match f {
        Formula::Not(a) => collect_coeffs(a, key, out),
        Formula::And(v) | Formula::Or(v) => v.iter().for_each(|g| collect_coeffs(g, key, out)),
        Formula::Implies(a, b) => {
            collect_coeffs(a, key, out);
            collect_coeffs(b, key, out);
        }
        a => {
            if let Some(t) = term_of(a) {
                let c = t.coeff_key(key);
                if !c.is_zero() && !out.contains(&c) {
                    out.push(c);
                }
            }
        }
    }
}

/// Substitutes `x_p = C^-1 y` (C the product of all coefficients of `x_p`)
/// and multiplies each atom by the invertible cofactor, so `y` (reusing the
/// key of `x_p`) appears with coefficient `1`. Order atoms whose cofactor
/// changes sign across the part split by level.
fn unit_coefficients(f: &Formula, x: &str, part: &Partition) -> Result<Formula> {
    let mut f = f.clone();
    for p in 0..part.parts.len() {
        let key = part.x_key(x, p);
        let mut coeffs = Vec::new();
        collect_coeffs(&f, &key, &mut coeffs);
        if coeffs.is_empty() || coeffs.iter().all(|c| c.is_one()) {
            continue;
        }
        let mut cof: Vec<(LaurentOperator, Vec<Sign>)> = Vec::new();
        for i in 0..coeffs.len() {
            let mut m = LaurentOperator::one();
            for (k, c) in coeffs.iter().enumerate() {
                if k != i {
                    m = &m * c;
                }
            }
            let signs = part.parts[p]
                .coords
                .iter()
                .map(|&j| op_sign(&m, &part.species[j]))
                .collect::<Result<Vec<_>>>()?;
            cof.push((m, signs));
        }
        f = map_atoms(&f, &mut |a| {
            let Some(t) = term_of(a) else { return Ok(a.clone()) };
            let c = t.coeff_key(&key);
            let Some(i) = coeffs.iter().position(|d| *d == c) else {
                return Ok(a.clone());
            };
            let (m, signs) = &cof[i];
            let rest = t.sub(&Term::monomial(key.clone(), c));
            let w = Term::monomial(key.clone(), LaurentOperator::one()).add(&rest.apply(m));
            Ok(match a {
                Formula::Eq(_) => Formula::Eq(w),
                Formula::U(alpha, _) => Formula::U(*alpha, w),
                Formula::Lt(_) => signed_lt(part, p, &w, signs),
                other => return Err(Error::UnsplittableAtom(format!("{other}"))),
            })
        })?;
    }
    Ok(f)
}

/// `w < 0` given the sign of the cofactor at each local coordinate.
fn signed_lt(part: &Partition, p: usize, w: &Term, signs: &[Sign]) -> Formula {
    let lt = |s: Sign| Formula::Lt(if s == Sign::Neg { w.neg() } else { w.clone() });
    if signs.iter().all(|s| *s == signs[0]) {
        return lt(signs[0]);
    }
    let mut out = Vec::new();
    let mut a = 0;
    while a < signs.len() {
        let mut b = a;
        while b < signs.len() && signs[b] == signs[a] {
            b += 1;
        }
        let mut conj = vec![part.u_atom(p, b, w)];
        if a > 0 {
            conj.push(Formula::not(part.u_atom(p, a, w)));
        }
        conj.push(lt(signs[a]));
        out.push(Formula::and(conj));
        a = b;
    }
    Formula::or(out)
}

fn expand_negated_lt(f: &Formula) -> Formula {
    match f {
        Formula::Not(a) => match &**a {
            Formula::Lt(t) => Formula::or(vec![Formula::Eq(t.clone()), Formula::Lt(t.neg())]),
            _ => f.clone(),
        },
        Formula::And(v) => Formula::and(v.iter().map(expand_negated_lt).collect()),
        Formula::Or(v) => Formula::or(v.iter().map(expand_negated_lt).collect()),
        other => other.clone(),
    }
}

fn eliminate(x: &str, body: &Formula, part: &Partition) -> Result<Formula> {
    let mentions = |a: &Formula| term_of(a).is_some_and(|t| t.mentions(x));
    let split = part.rewrite_where(body, &mentions)?;
    let unit = unit_coefficients(&split, x, part)?;
    let prepared = expand_negated_lt(&nnf(&unit));
    let mut out: Vec<Formula> = Vec::new();
    for clause in dnf_clauses(&prepared)? {
        let mut groups: BTreeMap<usize, Vec<Literal>> = BTreeMap::new();
        let mut conj = Vec::new();
        for l in clause {
            let t = term_of(&l.atom).filter(|t| t.mentions(x));
            match t {
                None => conj.push(l.to_formula()),
                Some(t) => {
                    let p = (0..part.parts.len())
                        .find(|&p| !t.coeff_key(&part.x_key(x, p)).is_zero())
                        .ok_or_else(|| Error::UnsplittableAtom(format!("{}", l.atom)))?;
                    groups.entry(p).or_default().push(l);
                }
            }
        }
        for (p, lits) in groups {
            conj.push(band::eliminate_part(part, p, &part.x_key(x, p), &lits)?);
        }
        let f = simplify(&Formula::and(conj));
        if !out.contains(&f) {
            out.push(f);
        }
    }
    Ok(simplify(&Formula::or(out)))
}

fn qe_inner(f: &Formula, part: &Partition) -> Result<Formula> {
    Ok(match f {
        Formula::Exists(x, b) => eliminate(x, &qe_inner(b, part)?, part)?,
        Formula::Forall(x, b) => {
            Formula::not(eliminate(x, &Formula::not(qe_inner(b, part)?), part)?)
        }
        Formula::Not(a) => Formula::not(qe_inner(a, part)?),
        Formula::And(v) => Formula::and(v.iter().map(|g| qe_inner(g, part)).collect::<Result<_>>()?),
        Formula::Or(v) => Formula::or(v.iter().map(|g| qe_inner(g, part)).collect::<Result<_>>()?),
        Formula::Implies(a, b) => Formula::implies(qe_inner(a, part)?, qe_inner(b, part)?),
        other => other.clone(),
    })
}

/// Quantifier-free equivalent of `f` over the graded sum of `g`.
pub fn qe_nsum(f: &Formula, g: &NSumSpec) -> Result<Formula> {
    check_vocabulary(f, g.n())?;
    let part = Partition::classes(g)?;
    Ok(simplify(&qe_inner(f, &part)?))
}

pub fn decide_nsum(f: &Formula, g: &NSumSpec) -> Result<bool> {
    let fv = free_vars(f);
    if !fv.is_empty() {
        return Err(Error::FreeVariables(fv.into_iter().collect()));
    }
    match qe_nsum(f, g)? {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        other => {
            // ground atoms left unfolded, e.g. projections of zero terms
            let part = Partition::classes(g)?;
            match part.rewrite_where(&other, &|_| true)? {
                Formula::True => Ok(true),
                Formula::False => Ok(false),
                rest => Err(Error::Input(format!("residual formula {rest}"))),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concrete::{Env, SumModel, Vector};
    use crate::formula::{parse, Vocabulary};
    use crate::species::{AlgRel, AlgebraicPoint, Interval};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn g23() -> NSumSpec {
        NSumSpec::from_ints(&[2, 3])
    }

    fn f(s: &str, n: usize) -> Formula {
        parse(s, Vocabulary::GradedStar(n)).unwrap()
    }

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn vecs(n: usize, range: std::ops::RangeInclusive<i64>) -> Vec<Vector> {
        let mut out = vec![Vec::new()];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v| {
                    range.clone().map(move |c| {
                        let mut w = v.clone();
                        w.push(r(c));
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn reduction() {
        assert_eq!(reduce_spec(&NSumSpec::from_ints(&[2, 2, 3])), g23());
        assert_eq!(reduce_spec(&g23()), g23());
        let g = NSumSpec::from_ints(&[2, 3, 2]);
        assert_eq!(reduce_spec(&g), g);
        assert_eq!(reduce_spec(&reduce_spec(&g)), reduce_spec(&g));
    }

    #[test]
    fn dullness() {
        assert_eq!(is_dull(&NSumSpec::from_ints(&[2, 2])), Dullness::Dull);
        assert_eq!(
            is_dull(&g23()),
            Dullness::NotDull {
                witness: LaurentOperator::from_coeffs(&[-2, 1])
            }
        );
        let t = Species::transcendental("t", vec![Interval::new(r(3), r(4))]);
        let gt = Species::algebraic(AlgRel::Gt, AlgebraicPoint::from_i64(&[-2, 0, 1], (1, 1), (2, 1)));
        assert_eq!(is_dull(&NSumSpec::new(vec![t, gt])), Dullness::Dull);
    }

    fn agree_qf(a: &Formula, b: &Formula, m: &SumModel) {
        for x in vecs(m.dim(), -2..=2) {
            let mut env = Env::new();
            env.insert("x".to_string(), x);
            assert_eq!(m.eval(a, &env, &[]), m.eval(b, &env, &[]), "{a} vs {b}");
        }
    }

    #[test]
    fn kr_split_examples() {
        let g = g23();
        let sd = SplitData::for_spec(&g).unwrap().unwrap();
        assert_eq!((sd.s.clone(), sd.t.clone()), (vec![0], vec![1]));
        let m = SumModel::from_ints(&[2, 3]);
        let lt = kr_split(&f("x < 0", 2), &sd, &g).unwrap();
        assert_eq!(lt, f("r[s - 2](x) = 0 & k[s - 2](x) < 0 | r[s - 2](x) < 0", 2));
        agree_qf(&lt, &f("x < 0", 2), &m);
        let u0 = kr_split(&f("U0(x)", 2), &sd, &g).unwrap();
        assert_eq!(u0, f("k[s - 2](x) = 0 & r[s - 2](x) = 0", 2));
        let k = kr_split(&f("K[s - 2](x)", 2), &sd, &g).unwrap();
        assert_eq!(k, f("r[s - 2](x) = 0", 2));
        for src in ["U1(x)", "s(x) < 2*x", "R[s - 3](x + s(x))", "U1(x - k[s - 3](x))"] {
            agree_qf(&kr_split(&f(src, 2), &sd, &g).unwrap(), &f(src, 2), &m);
        }
    }

    #[test]
    fn qe_examples() {
        let g = g23();
        assert_eq!(qe_nsum(&f("E x. x != 0 & s(x) = 2*x", 2), &g).unwrap(), Formula::True);
        assert_eq!(qe_nsum(&f("E x. 0 < x & s(x) = 6*x", 2), &g).unwrap(), Formula::False);
        let qf = f("y < z & U1(y)", 2);
        assert_eq!(qe_nsum(&qf, &g).unwrap(), qf);
    }

    #[test]
    fn decide_examples() {
        let g = g23();
        assert!(decide_nsum(&f("A x. (0 < x -> x < s(x))", 2), &g).unwrap());
        assert!(!decide_nsum(&f("E x. x != 0 & s(x) = x", 2), &g).unwrap());
        assert!(decide_nsum(&f("E x. !U1(x)", 2), &g).unwrap());
        assert!(decide_nsum(&f("A x. (0 < x -> 2*x <= s(x))", 2), &g).unwrap());
        assert!(!decide_nsum(&f("A x. (0 < x -> 2*x < s(x))", 2), &g).unwrap());
        assert!(!decide_nsum(&f("A x. (0 < x -> 3*x <= s(x))", 2), &g).unwrap());
        assert!(decide_nsum(&f("A x. (U1(x) -> s(x) = 2*x)", 2), &g).unwrap());
        assert!(decide_nsum(&f("A x. E y. U1(y) & !U1(x - y) -> U1(x)", 2), &g).is_ok());
        assert!(matches!(decide_nsum(&f("U1(x)", 2), &g), Err(Error::FreeVariables(_))));
    }

    #[test]
    fn non_uniform_signs() {
        // s - 5/2 is negative on the first coordinate and positive on the second
        let t = Species::transcendental("t", vec![Interval::new(r(3), r(4))]);
        let g = NSumSpec::new(vec![Species::eq_int(2), t.clone(), Species::Infinite]);
        assert!(decide_nsum(&f("E x. 0 < x & U1(x) & 2*s(x) < 5*x", 3), &g).unwrap());
        assert!(!decide_nsum(&f("E x. 0 < x & U1(x) & 5*x < 2*s(x)", 3), &g).unwrap());
        assert!(decide_nsum(&f("E x. 0 < x & !U2(x) & 5*x < 2*s(x)", 3), &g).unwrap());
        let dull = NSumSpec::new(vec![t, Species::Infinite]);
        assert!(!decide_nsum(&f("E x. 0 < x & !U1(x) & s(x) < 5*x", 2), &dull).unwrap());
        assert!(decide_nsum(&f("E x. 0 < x & s(x) < 5*x", 2), &dull).unwrap());
    }

    #[test]
    fn representative_example() {
        let (plan, theta) = representative_theta(&g23()).unwrap();
        assert_eq!(plan.tags, vec![ClauseTag::Eq, ClauseTag::Eq]);
        assert_eq!(plan.intervals[0], (r(1), Some(BigRational::new(5.into(), 2.into()))));
        assert_eq!(plan.intervals[1], (BigRational::new(5.into(), 2.into()), Some(r(4))));
        assert!(theta.is_quantifier_free());
        let m = SumModel::from_ints(&[2, 3]);
        let mut env = Env::new();
        env.insert("a0".to_string(), vec![r(1), r(0)]);
        env.insert("a1".to_string(), vec![r(0), r(1)]);
        assert!(m.eval(&theta, &env, &[]));
        let g = NSumSpec::new(vec![Species::eq_int(2), Species::Infinite]);
        let (plan, _) = representative_theta(&g).unwrap();
        assert_eq!(plan.intervals[1].1, None);
        assert!(matches!(
            representative_theta(&NSumSpec::from_ints(&[2, 2])),
            Err(Error::NotReduced(0, 1))
        ));
    }

    #[test]
    fn u_alpha_definitions() {
        let g = g23();
        assert_eq!(u_alpha_defs(0, &g).unwrap().0, f("x = 0", 2));
        assert_eq!(u_alpha_defs(2, &g).unwrap().1, f("x = x", 2));
        let (ex, un) = u_alpha_defs(1, &g).unwrap();
        let m = SumModel::from_ints(&[2, 3]);
        let mut dom: Vec<Vector> = (1..=6).map(|c| vec![r(c), r(0)]).collect();
        dom.extend((1..=4).map(|c| vec![r(0), BigRational::new(c.into(), 4.into())]));
        for x in vecs(2, -2..=2) {
            let mut env = Env::new();
            let inside = x[1] == r(0);
            env.insert("x".to_string(), x);
            assert_eq!(m.eval(&ex, &env, &dom), inside);
            assert_eq!(m.eval(&un, &env, &dom), inside);
        }
    }

    fn atom2() -> impl Strategy<Value = String> {
        let var = prop::sample::select(vec!["x", "y", "k[s - 2](x)", "r[s - 2](y)", "s(x)", "z"]);
        let term = prop::collection::vec((-2i64..3, var), 1..3).prop_map(|v| {
            v.iter()
                .map(|(c, t)| format!("{c}*{t}"))
                .collect::<Vec<_>>()
                .join(" + ")
        });
        let rel = prop::sample::select(vec!["<", "=", "!=", "<="]);
        prop_oneof![
            (term.clone(), rel, term.clone()).prop_map(|(a, o, b)| format!("{a} {o} {b}")),
            (0usize..3, term.clone()).prop_map(|(i, t)| format!("U{i}({t})")),
            term.clone().prop_map(|t| format!("!U1({t})")),
            term.prop_map(|t| format!("K[s - 3]({t})")),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn witnesses_are_sound(atoms in prop::collection::vec(atom2(), 1..4), seed in 0u64..1000) {
            let src = format!("E x. {}", atoms.join(" & "));
            let phi = f(&src, 2);
            let q = qe_nsum(&phi, &g23()).unwrap();
            prop_assert!(q.is_quantifier_free());
            let m = SumModel::from_ints(&[2, 3]);
            let dom = vecs(2, -3..=3);
            let mut env = Env::new();
            let pick = |k: u64| dom[((seed * 31 + k * 17) % dom.len() as u64) as usize].clone();
            env.insert("y".to_string(), pick(1));
            env.insert("z".to_string(), pick(2));
            if m.eval(&phi, &env, &dom) {
                prop_assert!(m.eval(&q, &env, &dom), "{} -> {}", phi, q);
            }
        }

        #[test]
        fn negation_flips(atoms in prop::collection::vec(atom2(), 1..3)) {
            let src = format!("A y. A z. E x. {}", atoms.join(" & "));
            let phi = f(&src, 2);
            let g = g23();
            prop_assert_eq!(decide_nsum(&phi, &g).unwrap(), !decide_nsum(&Formula::not(phi), &g).unwrap());
        }
    }
}
