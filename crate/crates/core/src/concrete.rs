//! Evaluation in explicit models with rational data.
//!
//! [`SumModel`] is `Q^n` with `s` acting as multiplication by `q_i` on
//! coordinate `i`, ordered reverse-lexicographically (the highest nonzero
//! coordinate decides the sign). With `n = 1` it is the ordered field `Q`
//! with `s(x) = q x`. [`ShiftModel`] is `Q` with `s(x) = x + c`, a model of
//! the order language only.
//!
//! Quantifiers range over a caller-supplied finite sample, so quantified
//! formulas are only approximated; quantifier-free formulas are exact.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::formula::{Formula, OTerm, ProjKind, Term, TermKey};
use crate::operator::{LaurentOperator, Sign};

pub type Vector = Vec<BigRational>;
pub type Env<T> = BTreeMap<String, T>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SumModel {
    pub mults: Vec<BigRational>,
}

impl SumModel {
    pub fn new(mults: Vec<BigRational>) -> Self {
        assert!(mults.iter().all(|q| q.is_positive()), "multipliers must be positive");
        SumModel { mults }
    }

    pub fn from_ints(ms: &[i64]) -> Self {
        SumModel::new(ms.iter().map(|&m| BigRational::from_integer(m.into())).collect())
    }

    pub fn dim(&self) -> usize {
        self.mults.len()
    }

    pub fn zero(&self) -> Vector {
        vec![BigRational::zero(); self.dim()]
    }

    fn keeps(&self, key: &TermKey, i: usize) -> bool {
        key.projs.iter().all(|(kind, l)| {
            let z = l.eval(&self.mults[i]).is_zero();
            match kind {
                ProjKind::K => z,
                ProjKind::R => !z,
            }
        })
    }

    pub fn apply_op(&self, l: &LaurentOperator, v: &Vector) -> Vector {
        v.iter()
            .zip(&self.mults)
            .map(|(x, q)| x * l.eval(q))
            .collect()
    }

    pub fn eval_term(&self, t: &Term, env: &Env<Vector>) -> Vector {
        let mut out = self.zero();
        for (key, op) in t.iter() {
            let v = env
                .get(&key.var)
                .unwrap_or_else(|| panic!("unbound variable {}", key.var));
            for i in 0..self.dim() {
                if self.keeps(key, i) {
                    out[i] += &v[i] * op.eval(&self.mults[i]);
                }
            }
        }
        out
    }

    pub fn sign(&self, v: &Vector) -> Sign {
        v.iter()
            .rev()
            .find(|x| !x.is_zero())
            .map(Sign::of)
            .unwrap_or(Sign::Zero)
    }

    fn oterm(&self, o: &OTerm, env: &Env<Vector>) -> Vector {
        self.apply_op(&LaurentOperator::sigma(o.shift), &env[&o.var])
    }

    pub fn eval_atom(&self, f: &Formula, env: &Env<Vector>) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Eq(t) => self.sign(&self.eval_term(t, env)) == Sign::Zero,
            Formula::Lt(t) => self.sign(&self.eval_term(t, env)) == Sign::Neg,
            Formula::U(a, t) => self.eval_term(t, env)[*a..].iter().all(|x| x.is_zero()),
            Formula::K(l, t) => {
                let v = self.eval_term(t, env);
                self.apply_op(l, &v).iter().all(|x| x.is_zero())
            }
            Formula::R(l, t) => {
                let v = self.eval_term(t, env);
                v.iter()
                    .zip(&self.mults)
                    .all(|(x, q)| !l.eval(q).is_zero() || x.is_zero())
            }
            Formula::OrderEq(a, b) => self.oterm(a, env) == self.oterm(b, env),
            Formula::OrderLt(a, b) => {
                let d: Vector = self
                    .oterm(a, env)
                    .iter()
                    .zip(self.oterm(b, env))
                    .map(|(x, y)| x - y)
                    .collect();
                self.sign(&d) == Sign::Neg
            }
            _ => unreachable!("not an atom"),
        }
    }

    /// Truth value with quantifiers ranging over `domain`.
    pub fn eval(&self, f: &Formula, env: &Env<Vector>, domain: &[Vector]) -> bool {
        eval_generic(f, env, domain, &|a, e| self.eval_atom(a, e))
    }

    pub fn scalar_env(pairs: &[(&str, BigRational)]) -> Env<Vector> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), vec![v.clone()]))
            .collect()
    }
}

/// `Q` with `s(x) = x + shift`; increasing, decreasing or the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftModel {
    pub shift: BigRational,
}

impl ShiftModel {
    pub fn new(shift: i64) -> Self {
        ShiftModel {
            shift: BigRational::from_integer(shift.into()),
        }
    }

    pub fn value(&self, o: &OTerm, env: &Env<BigRational>) -> BigRational {
        &env[&o.var] + &self.shift * BigRational::from_integer(o.shift.into())
    }

    pub fn eval_atom(&self, f: &Formula, env: &Env<BigRational>) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::OrderEq(a, b) => self.value(a, env) == self.value(b, env),
            Formula::OrderLt(a, b) => self.value(a, env) < self.value(b, env),
            other => panic!("not an order atom: {other}"),
        }
    }

    pub fn eval(&self, f: &Formula, env: &Env<BigRational>, domain: &[BigRational]) -> bool {
        eval_generic(f, env, domain, &|a, e| self.eval_atom(a, e))
    }
}

pub fn eval_generic<T: Clone>(
    f: &Formula,
    env: &Env<T>,
    domain: &[T],
    atom: &dyn Fn(&Formula, &Env<T>) -> bool,
) -> bool {
    match f {
        Formula::Not(a) => !eval_generic(a, env, domain, atom),
        Formula::And(v) => v.iter().all(|g| eval_generic(g, env, domain, atom)),
        Formula::Or(v) => v.iter().any(|g| eval_generic(g, env, domain, atom)),
        Formula::Implies(a, b) => {
            !eval_generic(a, env, domain, atom) || eval_generic(b, env, domain, atom)
        }
        Formula::Exists(x, b) | Formula::Forall(x, b) => {
            let mut e = env.clone();
            let mut test = |d: &T| {
                e.insert(x.clone(), d.clone());
                eval_generic(b, &e, domain, atom)
            };
            if matches!(f, Formula::Exists(..)) {
                domain.iter().any(&mut test)
            } else {
                domain.iter().all(&mut test)
            }
        }
        a => atom(a, env),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{parse, Vocabulary};

    fn r(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn reverse_lex_sign() {
        let m = SumModel::from_ints(&[2, 3]);
        assert_eq!(m.sign(&vec![r(5), r(-1)]), Sign::Neg);
        assert_eq!(m.sign(&vec![r(-5), r(0)]), Sign::Neg);
        assert_eq!(m.sign(&vec![r(0), r(0)]), Sign::Zero);
    }

    #[test]
    fn projections_follow_kernels() {
        let m = SumModel::from_ints(&[2, 3]);
        let f = parse("k[s - 2](x) = x", Vocabulary::GradedStar(2)).unwrap();
        let mut env = Env::new();
        env.insert("x".to_string(), vec![r(1), r(0)]);
        assert!(m.eval_atom(&f, &env));
        env.insert("x".to_string(), vec![r(1), r(1)]);
        assert!(!m.eval_atom(&f, &env));
        let g = parse("K[s - 2](x)", Vocabulary::GradedStar(2)).unwrap();
        assert!(!m.eval_atom(&g, &env));
    }

    #[test]
    fn sampled_quantifiers() {
        let m = ShiftModel::new(1);
        let f = parse("A x. x < s(x)", Vocabulary::Order).unwrap();
        let dom: Vec<_> = (-3..4).map(r).collect();
        assert!(m.eval(&f, &Env::new(), &dom));
    }
}
