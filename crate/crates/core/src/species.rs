//! Species of `rho` and the sign oracle for linear difference operators.
//!
//! A species fixes the sign of every operator `L(x)` on positive `x`
//! (the OM trichotomy). Algebraic species carry a squarefree integer
//! polynomial and an open interval isolating one positive root; the
//! `Lt`/`Gt` kinds sit infinitesimally below/above that root.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{LaurentOperator, Sign};
use crate::poly::{simplest_between, QPoly};

pub const DEFAULT_BUDGET: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        Interval { lo, hi }
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}

/// A positive real algebraic number: minimal polynomial plus isolating interval.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraicPoint {
    minpoly: Vec<BigInt>,
    interval: Interval,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpeciesKind {
    AlgebraicEq,
    AlgebraicLt,
    AlgebraicGt,
    Transcendental,
    Infinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AlgRel {
    Eq,
    Lt,
    Gt,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Species {
    Algebraic(AlgRel, AlgebraicPoint),
    Transcendental {
        name: String,
        intervals: Vec<Interval>,
    },
    Infinite,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Separator {
    Rational(BigRational),
    Algebraic(AlgebraicPoint),
}

impl fmt::Display for Separator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Separator::Rational(q) => write!(f, "{q}"),
            Separator::Algebraic(p) => write!(f, "{p}"),
        }
    }
}

impl AlgebraicPoint {
    /// Normalizes the polynomial to primitive form with positive leading coefficient.
    pub fn new(minpoly: &[BigInt], interval: Interval) -> Self {
        let minpoly = QPoly::from_ints(minpoly).primitive();
        AlgebraicPoint { minpoly, interval }
    }

    pub fn from_i64(minpoly: &[i64], lo: (i64, i64), hi: (i64, i64)) -> Self {
        let m: Vec<BigInt> = minpoly.iter().map(|&c| BigInt::from(c)).collect();
        AlgebraicPoint::new(
            &m,
            Interval::new(
                BigRational::new(lo.0.into(), lo.1.into()),
                BigRational::new(hi.0.into(), hi.1.into()),
            ),
        )
    }

    /// The positive rational `q` as an algebraic point.
    pub fn rational(q: &BigRational) -> Self {
        let m = vec![-q.numer().clone(), q.denom().clone()];
        let lo = q / BigRational::from_integer(BigInt::from(2));
        let hi = q + BigRational::one();
        AlgebraicPoint::new(&m, Interval::new(lo, hi))
    }

    pub fn minpoly(&self) -> &[BigInt] {
        &self.minpoly
    }

    pub fn poly(&self) -> QPoly {
        QPoly::from_ints(&self.minpoly)
    }

    pub fn operator(&self) -> LaurentOperator {
        LaurentOperator::from_bigints(&self.minpoly)
    }

    pub fn interval(&self) -> &Interval {
        &self.interval
    }

    /// If the minimal polynomial is linear, the root itself.
    pub fn as_rational(&self) -> Option<BigRational> {
        (self.minpoly.len() == 2)
            .then(|| BigRational::new(-self.minpoly[0].clone(), self.minpoly[1].clone()))
    }

    /// Interval of half the width, still isolating the root.
    pub fn narrowed(&self) -> AlgebraicPoint {
        let p = self.poly();
        let Interval { lo, hi } = &self.interval;
        let mid = self.interval.mid();
        let interval = if p.eval(&mid).is_zero() {
            let q = self.interval.width() / BigRational::from_integer(BigInt::from(4));
            Interval::new(&mid - &q, &mid + q)
        } else if p.count_roots(lo, &mid) == 1 {
            Interval::new(lo.clone(), mid)
        } else {
            Interval::new(mid, hi.clone())
        };
        AlgebraicPoint {
            minpoly: self.minpoly.clone(),
            interval,
        }
    }

    /// Exact comparison of the root with a rational.
    pub fn cmp_rational(&self, q: &BigRational) -> Ordering {
        let Interval { lo, hi } = &self.interval;
        if q <= lo {
            return Ordering::Greater;
        }
        if q >= hi {
            return Ordering::Less;
        }
        let p = self.poly();
        if p.eval(q).is_zero() {
            Ordering::Equal
        } else if p.count_roots(lo, q) == 1 {
            Ordering::Less
        } else {
            Ordering::Greater
        }
    }

    /// Sign of `p` at the root.
    pub fn sign_of(&self, p: &QPoly, budget: usize) -> Result<Sign> {
        let big = self.poly();
        let r = p.rem(&big);
        if r.is_zero() {
            return Ok(Sign::Zero);
        }
        let g = r.gcd(&big);
        if !g.is_constant() && g.count_roots_open(&self.interval.lo, &self.interval.hi) > 0 {
            return Ok(Sign::Zero);
        }
        let mut pt = self.clone();
        for _ in 0..=budget {
            let Interval { lo, hi } = &pt.interval;
            if r.count_roots_closed(lo, hi) == 0 {
                return Ok(r.sign_at(lo));
            }
            pt = pt.narrowed();
        }
        Err(Error::InsufficientPrecision)
    }

    /// Sign of `p` just below (`rel = Lt`) or just above (`Gt`) the root.
    pub fn one_sided_sign(&self, p: &QPoly, rel: AlgRel, budget: usize) -> Result<Sign> {
        if p.is_zero() {
            return Ok(Sign::Zero);
        }
        if rel == AlgRel::Eq {
            return self.sign_of(p, budget);
        }
        let big = self.poly();
        let mut q = p.clone();
        let mut m = 0usize;
        loop {
            let (d, r) = q.divrem(&big);
            if !r.is_zero() {
                break;
            }
            q = d;
            m += 1;
        }
        let sq = self.sign_of(&q, budget)?;
        if sq != Sign::Zero {
            let dp = self.sign_of(&big.derivative(), budget)?;
            let side = if rel == AlgRel::Lt { dp.flip() } else { dp };
            return Ok(sq.times(side.pow(m)));
        }
        // reducible witness: first nonvanishing derivative decides the side
        let mut d = p.clone();
        let mut k = 0usize;
        loop {
            d = d.derivative();
            k += 1;
            let s = self.sign_of(&d, budget)?;
            if s != Sign::Zero {
                return Ok(if rel == AlgRel::Lt { s.times(Sign::Neg.pow(k)) } else { s });
            }
        }
    }

    pub fn same_root(&self, other: &AlgebraicPoint) -> bool {
        let lo = &other.interval.lo;
        let hi = &other.interval.hi;
        self.cmp_rational(lo) == Ordering::Greater
            && self.cmp_rational(hi) == Ordering::Less
            && matches!(self.sign_of(&other.poly(), 4 * DEFAULT_BUDGET), Ok(Sign::Zero))
    }

    pub fn validate(&self) -> Vec<SpeciesIssue> {
        let mut issues = Vec::new();
        let p = self.poly();
        if p.degree().unwrap_or(0) < 1 {
            issues.push(SpeciesIssue::DegreeTooLow);
            return issues;
        }
        let Interval { lo, hi } = &self.interval;
        if !p.is_squarefree() {
            issues.push(SpeciesIssue::NotSquarefree);
        }
        if !lo.is_positive() {
            issues.push(SpeciesIssue::NonPositiveEndpoint);
        }
        if lo >= hi {
            issues.push(SpeciesIssue::EmptyInterval);
            return issues;
        }
        let sf = p.squarefree_part();
        let count = sf.count_roots_open(lo, hi);
        if count != 1 {
            issues.push(SpeciesIssue::NotIsolating { roots: count });
        }
        let deg = p.degree().unwrap();
        if (2..=3).contains(&deg) {
            if let Some(r) = p.rational_roots().into_iter().next() {
                issues.push(SpeciesIssue::Reducible {
                    rational_root: r.to_string(),
                });
            }
        }
        issues
    }
}

impl fmt::Display for AlgebraicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_rational() {
            Some(q) => write!(f, "{q}"),
            None => write!(f, "root of {} in {}", self.poly(), self.interval),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "issue", rename_all = "snake_case")]
pub enum SpeciesIssue {
    DegreeTooLow,
    NotSquarefree,
    NonPositiveEndpoint,
    EmptyInterval,
    NotIsolating { roots: usize },
    Reducible { rational_root: String },
    NoIntervals,
    NotNested { index: usize },
    EmptyName,
}

impl fmt::Display for SpeciesIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpeciesIssue::DegreeTooLow => write!(f, "NotAlgebraic: polynomial degree below 1"),
            SpeciesIssue::NotSquarefree => write!(f, "NotSquarefree"),
            SpeciesIssue::NonPositiveEndpoint => write!(f, "NonPositiveEndpoint"),
            SpeciesIssue::EmptyInterval => write!(f, "EmptyInterval"),
            SpeciesIssue::NotIsolating { roots } => {
                write!(f, "NotIsolating: interval holds {roots} roots")
            }
            SpeciesIssue::Reducible { rational_root } => {
                write!(f, "Reducible: rational root {rational_root}")
            }
            SpeciesIssue::NoIntervals => write!(f, "NoIntervals"),
            SpeciesIssue::NotNested { index } => write!(f, "NotNested at interval {index}"),
            SpeciesIssue::EmptyName => write!(f, "EmptyName"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub issues: Vec<SpeciesIssue>,
}

impl Species {
    pub fn algebraic(rel: AlgRel, point: AlgebraicPoint) -> Self {
        Species::Algebraic(rel, point)
    }

    /// `AlgebraicEq` at the positive rational `q`.
    pub fn rational(q: &BigRational) -> Self {
        Species::Algebraic(AlgRel::Eq, AlgebraicPoint::rational(q))
    }

    pub fn eq_int(n: i64) -> Self {
        Species::rational(&BigRational::from_integer(BigInt::from(n)))
    }

    pub fn transcendental(name: &str, intervals: Vec<Interval>) -> Self {
        Species::Transcendental {
            name: name.to_string(),
            intervals,
        }
    }

    pub fn kind(&self) -> SpeciesKind {
        match self {
            Species::Algebraic(AlgRel::Eq, _) => SpeciesKind::AlgebraicEq,
            Species::Algebraic(AlgRel::Lt, _) => SpeciesKind::AlgebraicLt,
            Species::Algebraic(AlgRel::Gt, _) => SpeciesKind::AlgebraicGt,
            Species::Transcendental { .. } => SpeciesKind::Transcendental,
            Species::Infinite => SpeciesKind::Infinite,
        }
    }

    pub fn point(&self) -> Option<&AlgebraicPoint> {
        match self {
            Species::Algebraic(_, p) => Some(p),
            _ => None,
        }
    }

    /// The point for `AlgebraicEq` species only.
    pub fn eq_point(&self) -> Option<&AlgebraicPoint> {
        match self {
            Species::Algebraic(AlgRel::Eq, p) => Some(p),
            _ => None,
        }
    }

    /// Rational multiplier of an `AlgebraicEq` species with linear minpoly.
    pub fn multiplier(&self) -> Option<BigRational> {
        self.eq_point().and_then(|p| p.as_rational())
    }

    pub fn validate(&self) -> ValidationReport {
        let issues = match self {
            Species::Algebraic(_, p) => p.validate(),
            Species::Transcendental { name, intervals } => {
                let mut v = Vec::new();
                if name.is_empty() {
                    v.push(SpeciesIssue::EmptyName);
                }
                if intervals.is_empty() {
                    v.push(SpeciesIssue::NoIntervals);
                }
                for (i, iv) in intervals.iter().enumerate() {
                    if !iv.lo.is_positive() {
                        v.push(SpeciesIssue::NonPositiveEndpoint);
                    }
                    if iv.lo >= iv.hi {
                        v.push(SpeciesIssue::EmptyInterval);
                    }
                    if i > 0 {
                        let prev = &intervals[i - 1];
                        let inside = prev.lo <= iv.lo && iv.hi <= prev.hi;
                        if !inside || (prev.lo == iv.lo && prev.hi == iv.hi) {
                            v.push(SpeciesIssue::NotNested { index: i });
                        }
                    }
                }
                v
            }
            Species::Infinite => Vec::new(),
        };
        ValidationReport {
            ok: issues.is_empty(),
            issues,
        }
    }

    pub fn check(&self) -> Result<()> {
        let r = self.validate();
        match r.issues.first() {
            None => Ok(()),
            Some(i) => Err(Error::InvalidSpecies(i.to_string())),
        }
    }

    fn structurally_sound(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSpecies(m.to_string()));
        match self {
            Species::Algebraic(_, p) => {
                if p.minpoly.len() < 2 {
                    return bad("NotAlgebraic: polynomial degree below 1");
                }
                if !p.interval.lo.is_positive() || p.interval.lo >= p.interval.hi {
                    return bad("interval must be positive and nonempty");
                }
                Ok(())
            }
            Species::Transcendental { intervals, .. } if intervals.is_empty() => {
                bad("NoIntervals")
            }
            _ => Ok(()),
        }
    }
}

pub fn op_sign(l: &LaurentOperator, s: &Species) -> Result<Sign> {
    op_sign_with_budget(l, s, DEFAULT_BUDGET)
}

pub fn op_sign_with_budget(l: &LaurentOperator, s: &Species, budget: usize) -> Result<Sign> {
    s.structurally_sound()?;
    if l.is_zero() {
        return Ok(Sign::Zero);
    }
    let p = l.to_poly();
    match s {
        Species::Algebraic(rel, pt) => pt.one_sided_sign(&p, *rel, budget),
        Species::Transcendental { intervals, .. } => {
            let iv = intervals.last().unwrap();
            if p.count_roots_closed(&iv.lo, &iv.hi) == 0 {
                Ok(p.sign_at(&iv.lo))
            } else {
                Err(Error::InsufficientPrecision)
            }
        }
        Species::Infinite => Ok(Sign::of(&p.lead())),
    }
}

/// Sign of `rho - q`, i.e. of the operator `den*s - num`.
pub fn cmp_with_rational(s: &Species, q: &BigRational) -> Result<Sign> {
    let op = LaurentOperator::from_bigints(&[-q.numer().clone(), q.denom().clone()]);
    op_sign(&op, s)
}

pub fn species_equiv(a: &Species, b: &Species) -> bool {
    match (a, b) {
        (Species::Algebraic(ra, pa), Species::Algebraic(rb, pb)) => ra == rb && pa.same_root(pb),
        (Species::Transcendental { name: na, .. }, Species::Transcendental { name: nb, .. }) => {
            na == nb
        }
        (Species::Infinite, Species::Infinite) => true,
        _ => false,
    }
}

/// Both species are algebraic with the same underlying root.
pub fn same_real(a: &Species, b: &Species) -> bool {
    match (a.point(), b.point()) {
        (Some(pa), Some(pb)) => pa.same_root(pb),
        _ => false,
    }
}

const SEPARATION_STEPS: usize = 100_000;

pub fn separating_point(a: &Species, b: &Species) -> Result<Separator> {
    if species_equiv(a, b) {
        return Err(Error::NoSeparator);
    }
    if same_real(a, b) {
        return Ok(Separator::Algebraic(a.point().unwrap().clone()));
    }
    // Stern–Brocot descent to the simplest rational strictly between the two cuts.
    let one = BigInt::one();
    let (mut ln, mut ld) = (BigInt::zero(), one.clone());
    let (mut hn, mut hd): (BigInt, BigInt) = (one.clone(), BigInt::zero());
    for _ in 0..SEPARATION_STEPS {
        let m = BigRational::new(&ln + &hn, &ld + &hd);
        let sa = cmp_with_rational(a, &m).map_err(|_| Error::Unresolvable)?;
        let sb = cmp_with_rational(b, &m).map_err(|_| Error::Unresolvable)?;
        let up = sa != Sign::Neg && sb != Sign::Neg;
        let down = sa != Sign::Pos && sb != Sign::Pos;
        if up {
            ln = m.numer().clone();
            ld = m.denom().clone();
        } else if down {
            hn = m.numer().clone();
            hd = m.denom().clone();
        } else {
            return Ok(Separator::Rational(m));
        }
    }
    Err(Error::Unresolvable)
}

/// Simplest rational strictly between two positive rationals; convenience re-export.
pub fn simplest_rational_between(lo: &BigRational, hi: &BigRational) -> BigRational {
    simplest_between(lo, Some(hi))
}

impl fmt::Display for Species {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Species::Algebraic(rel, p) => {
                let r = match rel {
                    AlgRel::Eq => "=",
                    AlgRel::Lt => "<",
                    AlgRel::Gt => ">",
                };
                write!(f, "({r}{p})")
            }
            Species::Transcendental { name, .. } => write!(f, "(transcendental {name})"),
            Species::Infinite => write!(f, "(infinite)"),
        }
    }
}

// ---------------------------------------------------------------------------
// JSON records

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpeciesRecord {
    pub kind: SpeciesKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minpoly: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interval: Option<[[i64; 2]; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intervals: Option<Vec<[[i64; 2]; 2]>>,
}

fn rat_of(p: [i64; 2]) -> Result<BigRational> {
    if p[1] == 0 {
        return Err(Error::InvalidSpecies("zero denominator".into()));
    }
    Ok(BigRational::new(p[0].into(), p[1].into()))
}

fn pair_of(q: &BigRational) -> Result<[i64; 2]> {
    let n: i64 = q
        .numer()
        .try_into()
        .map_err(|_| Error::Input("rational too large for record".into()))?;
    let d: i64 = q
        .denom()
        .try_into()
        .map_err(|_| Error::Input("rational too large for record".into()))?;
    Ok([n, d])
}

fn interval_of(iv: [[i64; 2]; 2]) -> Result<Interval> {
    Ok(Interval::new(rat_of(iv[0])?, rat_of(iv[1])?))
}

impl TryFrom<&SpeciesRecord> for Species {
    type Error = Error;

    fn try_from(r: &SpeciesRecord) -> Result<Species> {
        let missing = |f: &str| Error::InvalidSpecies(format!("missing field {f}"));
        match r.kind {
            SpeciesKind::AlgebraicEq | SpeciesKind::AlgebraicLt | SpeciesKind::AlgebraicGt => {
                let m = r.minpoly.as_ref().ok_or_else(|| missing("minpoly"))?;
                let iv = interval_of(r.interval.ok_or_else(|| missing("interval"))?)?;
                let m: Vec<BigInt> = m.iter().map(|&c| BigInt::from(c)).collect();
                let rel = match r.kind {
                    SpeciesKind::AlgebraicEq => AlgRel::Eq,
                    SpeciesKind::AlgebraicLt => AlgRel::Lt,
                    _ => AlgRel::Gt,
                };
                Ok(Species::Algebraic(rel, AlgebraicPoint::new(&m, iv)))
            }
            SpeciesKind::Transcendental => {
                let name = r.name.clone().ok_or_else(|| missing("name"))?;
                let ivs = r.intervals.as_ref().ok_or_else(|| missing("intervals"))?;
                let intervals = ivs.iter().map(|&iv| interval_of(iv)).collect::<Result<_>>()?;
                Ok(Species::Transcendental { name, intervals })
            }
            SpeciesKind::Infinite => Ok(Species::Infinite),
        }
    }
}

impl Species {
    pub fn to_record(&self) -> Result<SpeciesRecord> {
        let mut rec = SpeciesRecord {
            kind: self.kind(),
            minpoly: None,
            interval: None,
            name: None,
            intervals: None,
        };
        match self {
            Species::Algebraic(_, p) => {
                let m = p
                    .minpoly
                    .iter()
                    .map(|c| i64::try_from(c).map_err(|_| Error::Input("coefficient too large".into())))
                    .collect::<Result<Vec<_>>>()?;
                rec.minpoly = Some(m);
                rec.interval = Some([pair_of(&p.interval.lo)?, pair_of(&p.interval.hi)?]);
            }
            Species::Transcendental { name, intervals } => {
                rec.name = Some(name.clone());
                rec.intervals = Some(
                    intervals
                        .iter()
                        .map(|iv| Ok([pair_of(&iv.lo)?, pair_of(&iv.hi)?]))
                        .collect::<Result<_>>()?,
                );
            }
            Species::Infinite => {}
        }
        Ok(rec)
    }
}

/// Compact point syntax: a positive rational `3/2`, or a polynomial in `s`
/// with an isolating interval, `s^2 - 2 @ 1, 3/2`.
impl std::str::FromStr for AlgebraicPoint {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let bad = |m: &str| Error::Input(format!("bad point {text:?}: {m}"));
        let Some((poly, iv)) = text.split_once('@') else {
            let q: BigRational = text.trim().parse().map_err(|_| bad("not a rational"))?;
            return Ok(AlgebraicPoint::rational(&q));
        };
        let op = LaurentOperator::parse(poly.trim())?;
        if op.min_exp().unwrap_or(0) < 0 {
            return Err(bad("negative powers of s"));
        }
        let top = op.max_exp().unwrap_or(0);
        let coeffs: Vec<BigInt> = (0..=top).map(|e| op.coeff(e)).collect();
        let (lo, hi) = iv.split_once(',').ok_or_else(|| bad("interval needs lo, hi"))?;
        let lo: BigRational = lo.trim().parse().map_err(|_| bad("interval endpoint"))?;
        let hi: BigRational = hi.trim().parse().map_err(|_| bad("interval endpoint"))?;
        Ok(AlgebraicPoint::new(&coeffs, Interval::new(lo, hi)))
    }
}

/// Compact species syntax: `=2`, `<3/2`, `>s^2 - 2 @ 1, 3/2`, `inf`, or a
/// JSON record.
impl std::str::FromStr for Species {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('{') {
            return serde_json::from_str(t).map_err(|e| Error::Input(e.to_string()));
        }
        if t == "inf" || t == "infinite" {
            return Ok(Species::Infinite);
        }
        let rel = match t.chars().next() {
            Some('=') => AlgRel::Eq,
            Some('<') => AlgRel::Lt,
            Some('>') => AlgRel::Gt,
            _ => return Err(Error::Input(format!("bad species {t:?}"))),
        };
        Ok(Species::Algebraic(rel, t[1..].parse()?))
    }
}

impl Serialize for Species {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_record()
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Species {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        // either a full record or the compact text form
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Record(SpeciesRecord),
        }
        match Repr::deserialize(d)? {
            Repr::Text(t) => t.parse().map_err(serde::de::Error::custom),
            Repr::Record(rec) => Species::try_from(&rec).map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};
    use proptest::prelude::*;

    fn sqrt2(rel: AlgRel) -> Species {
        Species::Algebraic(rel, AlgebraicPoint::from_i64(&[-2, 0, 1], (1, 1), (2, 1)))
    }

    fn op(c: &[i64]) -> LaurentOperator {
        LaurentOperator::from_coeffs(c)
    }

    #[test]
    fn deserialize_compact_text() {
        let s: Species = serde_json::from_str(r#"">s^2-2@1,2""#).unwrap();
        assert_eq!(s, sqrt2(AlgRel::Gt));
        let v: Vec<Species> = serde_json::from_str(r#"["=2", "inf"]"#).unwrap();
        assert_eq!(v, vec![Species::eq_int(2), Species::Infinite]);
    }

    #[test]
    fn sign_examples() {
        assert_eq!(op_sign(&op(&[-2, 1]), &Species::eq_int(2)).unwrap(), Sign::Zero);
        let t = Species::transcendental("t1", vec![Interval::new(int(2), int(3))]);
        assert_eq!(op_sign(&op(&[-1, 1]), &t).unwrap(), Sign::Pos);
        assert_eq!(op_sign(&op(&[-2, 0, 1]), &sqrt2(AlgRel::Lt)).unwrap(), Sign::Neg);
        assert_eq!(op_sign(&op(&[-2, 0, 1]), &sqrt2(AlgRel::Gt)).unwrap(), Sign::Pos);
        assert_eq!(op_sign(&op(&[-2, 0, 1]), &sqrt2(AlgRel::Eq)).unwrap(), Sign::Zero);
        assert_eq!(op_sign(&op(&[3, -1]), &Species::Infinite).unwrap(), Sign::Neg);
        assert_eq!(
            op_sign(&LaurentOperator::zero(), &Species::Infinite).unwrap(),
            Sign::Zero
        );
    }

    #[test]
    fn squared_minpoly_on_one_side() {
        // (x^2-2)^2 is positive on both sides of sqrt 2
        let p = &op(&[-2, 0, 1]) * &op(&[-2, 0, 1]);
        assert_eq!(op_sign(&p, &sqrt2(AlgRel::Lt)).unwrap(), Sign::Pos);
        assert_eq!(op_sign(&p, &sqrt2(AlgRel::Gt)).unwrap(), Sign::Pos);
        // (x - 3)(x^2 - 2) just below sqrt 2: (neg)(neg) = pos
        let q = &op(&[-3, 1]) * &op(&[-2, 0, 1]);
        assert_eq!(op_sign(&q, &sqrt2(AlgRel::Lt)).unwrap(), Sign::Pos);
    }

    #[test]
    fn transcendental_precision() {
        let t = Species::transcendental("t", vec![Interval::new(int(1), int(4))]);
        assert_eq!(
            op_sign(&op(&[-2, 1]), &t),
            Err(Error::InsufficientPrecision)
        );
    }

    #[test]
    fn equivalence_examples() {
        let a = Species::eq_int(2);
        let b = Species::Algebraic(AlgRel::Eq, AlgebraicPoint::from_i64(&[-4, 2], (1, 1), (5, 1)));
        assert!(species_equiv(&a, &b));
        assert!(!species_equiv(&sqrt2(AlgRel::Lt), &sqrt2(AlgRel::Gt)));
        let t = Species::transcendental("t1", vec![Interval::new(int(2), int(4))]);
        assert!(!species_equiv(&t, &Species::eq_int(3)));
        assert!(species_equiv(&t, &t.clone()));
    }

    #[test]
    fn separator_examples() {
        assert_eq!(
            separating_point(&Species::eq_int(2), &Species::eq_int(3)).unwrap(),
            Separator::Rational(rat(5, 2))
        );
        match separating_point(&sqrt2(AlgRel::Lt), &sqrt2(AlgRel::Gt)).unwrap() {
            Separator::Algebraic(p) => assert_eq!(p.poly(), QPoly::from_i64s(&[-2, 0, 1])),
            other => panic!("{other:?}"),
        }
        assert_eq!(
            separating_point(&Species::eq_int(2), &Species::eq_int(2)),
            Err(Error::NoSeparator)
        );
        let s = separating_point(&Species::Infinite, &Species::eq_int(3)).unwrap();
        assert_eq!(s, Separator::Rational(int(4)));
    }

    #[test]
    fn validation_examples() {
        assert!(sqrt2(AlgRel::Eq).validate().ok);
        let sq = Species::Algebraic(AlgRel::Eq, AlgebraicPoint::from_i64(&[1, -2, 1], (0, 1), (2, 1)));
        assert!(sq.validate().issues.contains(&SpeciesIssue::NotSquarefree));
        let wide = Species::Algebraic(AlgRel::Eq, AlgebraicPoint::from_i64(&[-2, 0, 1], (-2, 1), (2, 1)));
        assert!(wide
            .validate()
            .issues
            .contains(&SpeciesIssue::NotIsolating { roots: 2 }));
        let red = Species::Algebraic(AlgRel::Eq, AlgebraicPoint::from_i64(&[2, -3, 1], (3, 2), (3, 1)));
        assert!(matches!(red.validate().issues[0], SpeciesIssue::Reducible { .. }));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"kind":"AlgebraicEq","minpoly":[-2,0,1],"interval":[[1,1],[2,1]]}"#;
        let s: Species = serde_json::from_str(text).unwrap();
        assert_eq!(s, sqrt2(AlgRel::Eq));
        assert_eq!(serde_json::to_string(&s).unwrap(), text);
        let inf: Species = serde_json::from_str(r#"{"kind":"Infinite"}"#).unwrap();
        assert_eq!(inf, Species::Infinite);
    }

    fn arb_op() -> impl Strategy<Value = LaurentOperator> {
        proptest::collection::vec((-2i32..4, -9i64..10), 0..5).prop_map(|ts| {
            let mut o = LaurentOperator::zero();
            for (e, c) in ts {
                o.add_term(e, BigInt::from(c));
            }
            o
        })
    }

    fn arb_species() -> impl Strategy<Value = Species> {
        prop_oneof![
            (1i64..6).prop_map(Species::eq_int),
            Just(sqrt2(AlgRel::Eq)),
            Just(sqrt2(AlgRel::Lt)),
            Just(sqrt2(AlgRel::Gt)),
            Just(Species::Algebraic(AlgRel::Lt, AlgebraicPoint::from_i64(&[-2, 1], (1, 1), (3, 1)))),
            Just(Species::Infinite),
        ]
    }

    proptest! {
        #[test]
        fn multiplicative(a in arb_op(), b in arb_op(), s in arb_species()) {
            let ab = op_sign(&(&a * &b), &s).unwrap();
            prop_assert_eq!(ab, op_sign(&a, &s).unwrap().times(op_sign(&b, &s).unwrap()));
        }

        #[test]
        fn shift_invariant(a in arb_op(), k in -4i32..5, s in arb_species()) {
            prop_assert_eq!(op_sign(&a.shift(k), &s).unwrap(), op_sign(&a, &s).unwrap());
        }

        #[test]
        fn positives_add(a in arb_op(), b in arb_op(), s in arb_species()) {
            if op_sign(&a, &s).unwrap() == Sign::Pos && op_sign(&b, &s).unwrap() == Sign::Pos {
                prop_assert_eq!(op_sign(&(&a + &b), &s).unwrap(), Sign::Pos);
            }
        }

        #[test]
        fn rational_eq_matches_evaluation(a in arb_op(), q in 1i64..7) {
            let s = Species::eq_int(q);
            prop_assert_eq!(op_sign(&a, &s).unwrap(), Sign::of(&a.eval(&int(q))));
        }

        #[test]
        fn equiv_is_equivalence(a in arb_species(), b in arb_species(), c in arb_species()) {
            prop_assert!(species_equiv(&a, &a));
            prop_assert_eq!(species_equiv(&a, &b), species_equiv(&b, &a));
            if species_equiv(&a, &b) && species_equiv(&b, &c) {
                prop_assert!(species_equiv(&a, &c));
            }
        }

        #[test]
        fn separators_separate(a in arb_species(), b in arb_species()) {
            match separating_point(&a, &b) {
                Err(Error::NoSeparator) => prop_assert!(species_equiv(&a, &b)),
                Ok(Separator::Rational(q)) => {
                    prop_assert_ne!(cmp_with_rational(&a, &q).unwrap(), cmp_with_rational(&b, &q).unwrap());
                }
                Ok(Separator::Algebraic(_p)) => prop_assert!(same_real(&a, &b) && a.kind() != b.kind()),
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }
}
