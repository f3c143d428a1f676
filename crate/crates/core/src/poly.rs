//! Dense univariate polynomials over the rationals.
//!
//! Coefficients are stored constant term first with no trailing zeros, so
//! the zero polynomial is the empty vector.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::operator::Sign;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        QPoly::new(vec![c])
    }

    /// `x - r`
    pub fn linear_root(r: &BigRational) -> Self {
        QPoly::new(vec![-r.clone(), BigRational::one()])
    }

    pub fn from_ints(coeffs: &[BigInt]) -> Self {
        QPoly::new(
            coeffs
                .iter()
                .map(|c| BigRational::from_integer(c.clone()))
                .collect(),
        )
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        QPoly::new(coeffs.iter().map(|&c| int(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn lead(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn sign_at(&self, x: &BigRational) -> Sign {
        Sign::of(&self.eval(x))
    }

    pub fn derivative(&self) -> Self {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = BigRational::zero();
        QPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        QPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        QPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Quotient and remainder. Panics on division by zero.
    pub fn divrem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "polynomial division by zero");
        let dd = d.coeffs.len() - 1;
        let lead = d.lead();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (QPoly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    rem[k + j] -= &c * dc;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (QPoly::new(quot), QPoly::new(rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.divrem(d).1
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let l = self.lead();
        self.scale(&(BigRational::one() / l))
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).is_constant()
    }

    pub fn squarefree_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    /// Integer coefficients with content removed and positive leading coefficient.
    pub fn primitive(&self) -> Vec<BigInt> {
        if self.is_zero() {
            return Vec::new();
        }
        let mut den = BigInt::one();
        for c in &self.coeffs {
            den = den.lcm(c.denom());
        }
        let mut ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let mut g = BigInt::zero();
        for c in &ints {
            g = g.gcd(c);
        }
        if ints.last().is_some_and(|l| l.is_negative()) {
            g = -g;
        }
        for c in ints.iter_mut() {
            *c = &*c / &g;
        }
        ints
    }

    /// Signed remainder sequence of `self` and its derivative.
    pub fn sturm_sequence(&self) -> Vec<QPoly> {
        let mut seq = vec![self.clone()];
        if self.is_zero() {
            return seq;
        }
        let mut b = self.derivative();
        while !b.is_zero() {
            let r = seq.last().unwrap().rem(&b).neg();
            seq.push(b);
            b = r;
        }
        seq
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_roots(&self, a: &BigRational, b: &BigRational) -> usize {
        if self.is_zero() || a >= b {
            return 0;
        }
        let seq = self.sturm_sequence();
        variations(&seq, a).saturating_sub(variations(&seq, b))
    }

    /// Number of distinct real roots in the open interval `(a, b)`.
    pub fn count_roots_open(&self, a: &BigRational, b: &BigRational) -> usize {
        let n = self.count_roots(a, b);
        if n > 0 && self.eval(b).is_zero() {
            n - 1
        } else {
            n
        }
    }

    /// Number of distinct real roots in the closed interval `[a, b]`.
    pub fn count_roots_closed(&self, a: &BigRational, b: &BigRational) -> usize {
        let n = self.count_roots(a, b);
        if !self.is_zero() && self.eval(a).is_zero() {
            n + 1
        } else {
            n
        }
    }

    /// Rational roots of a polynomial with integer coefficients, by the
    /// rational root test. Only used for small-degree irreducibility checks.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let ints = self.primitive();
        if ints.is_empty() {
            return Vec::new();
        }
        let mut out = Vec::new();
        if ints[0].is_zero() {
            out.push(BigRational::zero());
        }
        let low = ints.iter().find(|c| !c.is_zero()).unwrap().abs();
        let high = ints.last().unwrap().abs();
        let ps = divisors(&low);
        let qs = divisors(&high);
        for p in &ps {
            for q in &qs {
                for s in [1, -1] {
                    let r = BigRational::new(p * BigInt::from(s), q.clone());
                    if self.eval(&r).is_zero() && !out.contains(&r) {
                        out.push(r);
                    }
                }
            }
        }
        out.sort();
        out
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut i = BigInt::one();
    while &i * &i <= *n {
        if (n % &i).is_zero() {
            out.push(i.clone());
            let j = n / &i;
            if j != i {
                out.push(j);
            }
        }
        i += 1;
    }
    out
}

fn variations(seq: &[QPoly], x: &BigRational) -> usize {
    let mut count = 0;
    let mut prev = Sign::Zero;
    for p in seq {
        let s = p.sign_at(x);
        if s == Sign::Zero {
            continue;
        }
        if prev != Sign::Zero && s != prev {
            count += 1;
        }
        prev = s;
    }
    count
}

/// Rational with the smallest denominator in the open interval `(lo, hi)`,
/// `hi = None` meaning `+inf`. Requires `lo < hi`.
pub fn simplest_between(lo: &BigRational, hi: Option<&BigRational>) -> BigRational {
    let zero = BigRational::zero();
    if lo.is_negative() {
        match hi {
            None => return zero,
            Some(h) if h.is_positive() => return zero,
            Some(h) => {
                let m = -h.clone();
                return -simplest_between(&m, Some(&-lo.clone()));
            }
        }
    }
    let fl = lo.floor();
    let next = &fl + BigRational::one();
    let hi = match hi {
        None => return next,
        Some(h) => h,
    };
    assert!(lo < hi, "empty interval");
    if &next < hi {
        return next;
    }
    let f1 = lo - &fl;
    let f2 = hi - &fl;
    let inv_hi = BigRational::one() / f2;
    let inner = if f1.is_zero() {
        simplest_between(&inv_hi, None)
    } else {
        let inv_lo = BigRational::one() / f1;
        simplest_between(&inv_hi, Some(&inv_lo))
    };
    fl + BigRational::one() / inner
}

/// Simplest rational in the closed interval `[lo, hi]`.
pub fn simplest_closed(lo: &BigRational, hi: &BigRational) -> BigRational {
    if lo == hi {
        return lo.clone();
    }
    let inner = simplest_between(lo, Some(hi));
    let mut best = inner;
    for cand in [lo, hi] {
        if cand.denom() < best.denom()
            || (cand.denom() == best.denom() && cand.numer().abs() < best.numer().abs())
        {
            best = cand.clone();
        }
    }
    best
}

fn fmt_rat(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            first = false;
            let unit = a.is_one() && i > 0;
            if !unit {
                write!(f, "{}", fmt_rat(&a))?;
            }
            match i {
                0 => {}
                1 => write!(f, "{}x", if unit { "" } else { "*" })?,
                _ => write!(f, "{}x^{}", if unit { "" } else { "*" }, i)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(c: &[i64]) -> QPoly {
        QPoly::from_i64s(c)
    }

    #[test]
    fn divrem_reconstructs() {
        let a = p(&[1, 2, 3, 4]);
        let d = p(&[-1, 1]);
        let (q, r) = a.divrem(&d);
        assert_eq!(q.mul(&d).add(&r), a);
        assert!(r.degree().unwrap_or(0) < 1);
    }

    #[test]
    fn gcd_and_squarefree() {
        // (x-1)^2 (x+2)
        let a = p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[2, 1]));
        assert!(!a.is_squarefree());
        assert_eq!(a.squarefree_part(), p(&[-1, 1]).mul(&p(&[2, 1])));
        assert!(p(&[-2, 0, 1]).is_squarefree());
    }

    #[test]
    fn sturm_counts() {
        let q = p(&[-2, 0, 1]);
        assert_eq!(q.count_roots(&int(1), &int(2)), 1);
        assert_eq!(q.count_roots(&int(-2), &int(2)), 2);
        assert_eq!(q.count_roots(&int(0), &int(1)), 0);
        let lin = p(&[-2, 1]);
        assert_eq!(lin.count_roots(&int(1), &int(2)), 1);
        assert_eq!(lin.count_roots_open(&int(1), &int(2)), 0);
        assert_eq!(lin.count_roots_closed(&int(2), &int(3)), 1);
    }

    #[test]
    fn simplest_rationals() {
        assert_eq!(simplest_between(&int(2), Some(&int(3))), rat(5, 2));
        assert_eq!(simplest_between(&rat(1, 2), Some(&rat(7, 2))), int(1));
        assert_eq!(simplest_between(&rat(1, 3), Some(&rat(1, 2))), rat(2, 5));
        assert_eq!(simplest_between(&int(0), Some(&int(1))), rat(1, 2));
        assert_eq!(simplest_between(&rat(7, 5), None), int(2));
        assert_eq!(simplest_between(&int(-3), Some(&int(-2))), rat(-5, 2));
        assert_eq!(simplest_closed(&int(2), &int(3)), int(2));
    }

    #[test]
    fn primitive_normalizes() {
        let q = QPoly::new(vec![int(4), int(-2)]);
        assert_eq!(q.primitive(), vec![BigInt::from(-2), BigInt::from(1)]);
    }

    #[test]
    fn rational_root_test() {
        assert_eq!(p(&[-6, 1, 1]).rational_roots(), vec![int(-3), int(2)]);
        assert!(p(&[-2, 0, 1]).rational_roots().is_empty());
        assert_eq!(p(&[-1, 2]).rational_roots(), vec![rat(1, 2)]);
    }

    #[test]
    fn display() {
        assert_eq!(p(&[-2, 0, 1]).to_string(), "x^2 - 2");
        assert_eq!(p(&[1, -3]).to_string(), "-3*x + 1");
    }

    proptest! {
        #[test]
        fn simplest_is_inside(a in -50i64..50, b in 1i64..20, c in 1i64..50, d in 1i64..20) {
            let lo = rat(a, b);
            let hi = &lo + rat(c, d);
            let s = simplest_between(&lo, Some(&hi));
            prop_assert!(lo < s && s < hi);
            // no rational with smaller denominator lies inside
            let den: i64 = s.denom().try_into().unwrap();
            for q in 1..den {
                let qq = BigRational::from_integer(BigInt::from(q));
                let k = (&lo * &qq).floor() + BigRational::one();
                prop_assert!(!(k / qq < hi));
            }
        }

        #[test]
        fn sturm_matches_linear_factors(roots in proptest::collection::btree_set(-8i64..8, 1..5)) {
            let mut q = p(&[1]);
            for r in &roots {
                q = q.mul(&p(&[-r, 1]));
            }
            let inside = roots.iter().filter(|&&r| r > -3 && r <= 4).count();
            prop_assert_eq!(q.count_roots(&int(-3), &int(4)), inside);
        }
    }
}
