//! Linear difference operators: integer Laurent polynomials in `s`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::QPoly;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Neg,
    Zero,
    Pos,
}

impl Sign {
    pub fn of<T: Signed>(x: &T) -> Sign {
        if x.is_zero() {
            Sign::Zero
        } else if x.is_positive() {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn from_i32(x: i32) -> Sign {
        match x.signum() {
            -1 => Sign::Neg,
            0 => Sign::Zero,
            _ => Sign::Pos,
        }
    }

    pub fn to_i32(self) -> i32 {
        match self {
            Sign::Neg => -1,
            Sign::Zero => 0,
            Sign::Pos => 1,
        }
    }

    pub fn flip(self) -> Sign {
        Sign::from_i32(-self.to_i32())
    }

    pub fn times(self, other: Sign) -> Sign {
        Sign::from_i32(self.to_i32() * other.to_i32())
    }

    pub fn pow(self, m: usize) -> Sign {
        match (self, m) {
            (_, 0) => Sign::Pos,
            (Sign::Neg, m) if m % 2 == 0 => Sign::Pos,
            (s, _) => s,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Neg => "Neg",
            Sign::Zero => "Zero",
            Sign::Pos => "Pos",
        })
    }
}

/// An element of `Z[s, s^-1]`. Exponent → coefficient, zero coefficients never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LaurentOperator {
    coeffs: BTreeMap<i32, BigInt>,
}

impl LaurentOperator {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c * s^e`
    pub fn monomial(c: impl Into<BigInt>, e: i32) -> Self {
        let mut op = Self::zero();
        op.add_term(e, c.into());
        op
    }

    /// `s^e`
    pub fn sigma(e: i32) -> Self {
        Self::monomial(1, e)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    /// From coefficients listed constant term first.
    pub fn from_coeffs(coeffs: &[i64]) -> Self {
        let mut op = Self::zero();
        for (i, c) in coeffs.iter().enumerate() {
            op.add_term(i as i32, BigInt::from(*c));
        }
        op
    }

    pub fn from_bigints(coeffs: &[BigInt]) -> Self {
        let mut op = Self::zero();
        for (i, c) in coeffs.iter().enumerate() {
            op.add_term(i as i32, c.clone());
        }
        op
    }

    pub fn add_term(&mut self, e: i32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(e).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigInt)> + '_ {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, e: i32) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs.get(&0).is_some_and(|c| c.is_one())
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.coeffs.keys().next_back().copied()
    }

    /// If the operator is a single term `c * s^e`, returns `(c, e)`.
    pub fn as_monomial(&self) -> Option<(&BigInt, i32)> {
        if self.coeffs.len() == 1 {
            let (e, c) = self.coeffs.iter().next().unwrap();
            Some((c, *e))
        } else {
            None
        }
    }

    pub fn shift(&self, k: i32) -> Self {
        LaurentOperator {
            coeffs: self.coeffs.iter().map(|(e, c)| (e + k, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        LaurentOperator {
            coeffs: self.coeffs.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    /// Shifted so the lowest exponent is 0, as a polynomial in `x`.
    pub fn to_poly(&self) -> QPoly {
        let k = self.min_exp().unwrap_or(0);
        let n = (self.max_exp().unwrap_or(0) - k) as usize;
        let mut v = vec![BigInt::zero(); if self.is_zero() { 0 } else { n + 1 }];
        for (e, c) in &self.coeffs {
            v[(e - k) as usize] = c.clone();
        }
        QPoly::from_ints(&v)
    }

    /// Value at a nonzero rational point `s = q`.
    pub fn eval(&self, q: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.coeffs {
            let p = if *e >= 0 {
                num_traits::pow(q.clone(), *e as usize)
            } else {
                BigRational::one() / num_traits::pow(q.clone(), (-*e) as usize)
            };
            acc += BigRational::from_integer(c.clone()) * p;
        }
        acc
    }

    /// Parses text like `s^2 - 2*s + 1`, `3`, `-s^-1`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut op = Self::zero();
        let b = text.as_bytes();
        let mut i = 0;
        let skip = |i: &mut usize| {
            while *i < b.len() && b[*i].is_ascii_whitespace() {
                *i += 1;
            }
        };
        let err = |i: usize, m: &str| Error::Syntax {
            offset: i,
            message: m.to_string(),
        };
        let number = |i: &mut usize| -> Option<BigInt> {
            let st = *i;
            while *i < b.len() && b[*i].is_ascii_digit() {
                *i += 1;
            }
            (st < *i).then(|| text[st..*i].parse().unwrap())
        };
        let mut first = true;
        loop {
            skip(&mut i);
            if i >= b.len() {
                if first {
                    return Err(err(i, "empty operator"));
                }
                break;
            }
            let mut sign = BigInt::one();
            if b[i] == b'+' || b[i] == b'-' {
                if b[i] == b'-' {
                    sign = -sign;
                }
                i += 1;
                skip(&mut i);
            } else if !first {
                return Err(err(i, "expected '+' or '-'"));
            }
            first = false;
            let coef = number(&mut i);
            skip(&mut i);
            let mut has_s = false;
            if coef.is_some() && i < b.len() && b[i] == b'*' {
                i += 1;
                skip(&mut i);
                if i >= b.len() || b[i] != b's' {
                    return Err(err(i, "expected 's'"));
                }
            }
            let mut exp = 0i32;
            if i < b.len() && b[i] == b's' {
                has_s = true;
                i += 1;
                exp = 1;
                skip(&mut i);
                if i < b.len() && b[i] == b'^' {
                    i += 1;
                    skip(&mut i);
                    let mut neg = false;
                    if i < b.len() && b[i] == b'-' {
                        neg = true;
                        i += 1;
                    }
                    let e = number(&mut i).ok_or_else(|| err(i, "expected exponent"))?;
                    let e: i32 = e.try_into().map_err(|_| err(i, "exponent too large"))?;
                    exp = if neg { -e } else { e };
                }
            }
            if coef.is_none() && !has_s {
                return Err(err(i, "expected coefficient or 's'"));
            }
            op.add_term(exp, sign * coef.unwrap_or_else(BigInt::one));
        }
        Ok(op)
    }
}

impl Add for &LaurentOperator {
    type Output = LaurentOperator;
    fn add(self, rhs: &LaurentOperator) -> LaurentOperator {
        let mut out = self.clone();
        for (e, c) in &rhs.coeffs {
            out.add_term(*e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentOperator {
    type Output = LaurentOperator;
    fn sub(self, rhs: &LaurentOperator) -> LaurentOperator {
        self + &(-rhs)
    }
}

impl Neg for &LaurentOperator {
    type Output = LaurentOperator;
    fn neg(self) -> LaurentOperator {
        LaurentOperator {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl Mul for &LaurentOperator {
    type Output = LaurentOperator;
    fn mul(self, rhs: &LaurentOperator) -> LaurentOperator {
        let mut out = LaurentOperator::zero();
        for (e1, c1) in &self.coeffs {
            for (e2, c2) in &rhs.coeffs {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for LaurentOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.coeffs.iter().rev().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            if *e == 0 {
                write!(f, "{a}")?;
                continue;
            }
            if !a.is_one() {
                write!(f, "{a}*")?;
            }
            match e {
                1 => write!(f, "s")?,
                _ => write!(f, "s^{e}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn arithmetic() {
        let a = LaurentOperator::from_coeffs(&[-2, 1]);
        let b = LaurentOperator::from_coeffs(&[2, 1]);
        assert_eq!(&a * &b, LaurentOperator::from_coeffs(&[-4, 0, 1]));
        assert!((&a - &a).is_zero());
        assert_eq!(a.shift(-1).min_exp(), Some(-1));
    }

    #[test]
    fn parse_and_print() {
        for s in ["s^2 - 2", "s - 2", "3 - s^-1", "4", "2*s^3 + s", "-5*s^-2"] {
            let op = LaurentOperator::parse(s).unwrap();
            assert_eq!(op.to_string(), s);
        }
        assert_eq!(
            LaurentOperator::parse("1 + s - 1").unwrap(),
            LaurentOperator::sigma(1)
        );
        assert!(LaurentOperator::parse("s s").is_err());
        assert!(LaurentOperator::parse("").is_err());
    }

    #[test]
    fn to_poly_shifts() {
        let op = LaurentOperator::parse("s - 2*s^-1").unwrap();
        assert_eq!(op.to_poly(), QPoly::from_i64s(&[-2, 0, 1]));
    }

    #[test]
    fn eval_at_rational() {
        let op = LaurentOperator::parse("s^2 - s^-1").unwrap();
        let q = BigRational::from_integer(BigInt::from(2));
        assert_eq!(op.eval(&q), BigRational::new(7.into(), 2.into()));
    }

    fn arb_op() -> impl Strategy<Value = LaurentOperator> {
        proptest::collection::vec((-3i32..4, -9i64..10), 0..5).prop_map(|ts| {
            let mut op = LaurentOperator::zero();
            for (e, c) in ts {
                op.add_term(e, BigInt::from(c));
            }
            op
        })
    }

    proptest! {
        #[test]
        fn print_parse_roundtrip(op in arb_op()) {
            prop_assert_eq!(LaurentOperator::parse(&op.to_string()).unwrap(), op);
        }

        #[test]
        fn ring_laws(a in arb_op(), b in arb_op(), c in arb_op()) {
            prop_assert_eq!(&a * &b, &b * &a);
            prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
            let q = BigRational::new(3.into(), 2.into());
            prop_assert_eq!((&a * &b).eval(&q), a.eval(&q) * b.eval(&q));
        }
    }
}
