//! Rewriting a linear difference atom into a conjunction of unpacked atoms:
//! `xi + xj = xk`, `xi - xj = xk`, `s(xi) = xj`, `xi = xj`, `xi < xj`, `xi = 0`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::{Formula, Term};
use crate::error::{Error, Result};
use crate::operator::LaurentOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnpackedAtom {
    /// `xi + xj = xk`
    Add(usize, usize, usize),
    /// `xi - xj = xk`
    Sub(usize, usize, usize),
    /// `s(xi) = xj`
    Sigma(usize, usize),
    /// `xi = xj`
    Eq(usize, usize),
    /// `xi < xj`
    Lt(usize, usize),
    /// `xi = 0`
    Zero(usize),
}

impl UnpackedAtom {
    pub fn vars(&self) -> Vec<usize> {
        match *self {
            UnpackedAtom::Add(i, j, k) | UnpackedAtom::Sub(i, j, k) => vec![i, j, k],
            UnpackedAtom::Sigma(i, j) | UnpackedAtom::Eq(i, j) | UnpackedAtom::Lt(i, j) => vec![i, j],
            UnpackedAtom::Zero(i) => vec![i],
        }
    }

    pub fn map(&self, f: impl Fn(usize) -> usize) -> UnpackedAtom {
        match *self {
            UnpackedAtom::Add(i, j, k) => UnpackedAtom::Add(f(i), f(j), f(k)),
            UnpackedAtom::Sub(i, j, k) => UnpackedAtom::Sub(f(i), f(j), f(k)),
            UnpackedAtom::Sigma(i, j) => UnpackedAtom::Sigma(f(i), f(j)),
            UnpackedAtom::Eq(i, j) => UnpackedAtom::Eq(f(i), f(j)),
            UnpackedAtom::Lt(i, j) => UnpackedAtom::Lt(f(i), f(j)),
            UnpackedAtom::Zero(i) => UnpackedAtom::Zero(f(i)),
        }
    }

    pub fn to_formula(&self, names: &[String]) -> Formula {
        let v = |i: usize| Term::var(&names[i]);
        match *self {
            UnpackedAtom::Add(i, j, k) => Formula::eq(&v(i).add(&v(j)), &v(k)),
            UnpackedAtom::Sub(i, j, k) => Formula::eq(&v(i).sub(&v(j)), &v(k)),
            UnpackedAtom::Sigma(i, j) => {
                Formula::eq(&v(i).apply(&LaurentOperator::sigma(1)), &v(j))
            }
            UnpackedAtom::Eq(i, j) => Formula::eq(&v(i), &v(j)),
            UnpackedAtom::Lt(i, j) => Formula::lt(&v(i), &v(j)),
            UnpackedAtom::Zero(i) => Formula::Eq(v(i)),
        }
    }

    pub fn display(&self, names: &[String]) -> String {
        let n = |i: usize| names[i].as_str();
        match *self {
            UnpackedAtom::Add(i, j, k) => format!("{} = {} + {}", n(k), n(i), n(j)),
            UnpackedAtom::Sub(i, j, k) => format!("{} = {} - {}", n(k), n(i), n(j)),
            UnpackedAtom::Sigma(i, j) => format!("{} = s({})", n(j), n(i)),
            UnpackedAtom::Eq(i, j) => format!("{} = {}", n(i), n(j)),
            UnpackedAtom::Lt(i, j) => format!("{} < {}", n(i), n(j)),
            UnpackedAtom::Zero(i) => format!("{} = 0", n(i)),
        }
    }
}

/// Result of unpacking: the extended variable list and the conjunction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Unpacked {
    pub vars: Vec<String>,
    /// Indices of the fresh variables, in allocation order.
    pub fresh: Vec<usize>,
    pub atoms: Vec<UnpackedAtom>,
}

impl Unpacked {
    pub fn to_formula(&self) -> Formula {
        Formula::and(self.atoms.iter().map(|a| a.to_formula(&self.vars)).collect())
    }
}

impl fmt::Display for Unpacked {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .atoms
            .iter()
            .map(|a| format!("({})", a.display(&self.vars)))
            .collect();
        write!(f, "{}", parts.join(" & "))
    }
}

struct Builder {
    vars: Vec<String>,
    fresh: Vec<usize>,
    atoms: Vec<UnpackedAtom>,
    chains: BTreeMap<(usize, u32), usize>,
}

impl Builder {
    fn new_var(&mut self) -> usize {
        let i = self.vars.len();
        self.vars.push(format!("z{}", i + 1));
        self.fresh.push(i);
        i
    }

    /// Index holding `s^e(x_i)`.
    fn sigma_pow(&mut self, i: usize, e: u32) -> usize {
        if e == 0 {
            return i;
        }
        if let Some(&j) = self.chains.get(&(i, e)) {
            return j;
        }
        let prev = self.sigma_pow(i, e - 1);
        let j = self.new_var();
        self.atoms.push(UnpackedAtom::Sigma(prev, j));
        self.chains.insert((i, e), j);
        j
    }

    /// Index holding `c * x_i` for a positive integer `c`.
    fn times(&mut self, i: usize, c: u64) -> usize {
        let mut acc = i;
        for _ in 1..c {
            let j = self.new_var();
            self.atoms.push(UnpackedAtom::Add(acc, i, j));
            acc = j;
        }
        acc
    }
}

fn unit_monomials(t: &Term, ctx: &[String]) -> Option<Vec<(usize, i32, bool)>> {
    let mut out = Vec::new();
    for (k, op) in t.iter() {
        if !k.projs.is_empty() {
            return None;
        }
        let i = ctx.iter().position(|v| *v == k.var)?;
        for (e, c) in op.terms() {
            if c.abs() != BigInt::one() {
                return None;
            }
            out.push((i, e, c.is_positive()));
        }
    }
    Some(out)
}

/// Recognizes atoms that are already one of the six shapes.
fn already_unpacked(f: &Formula, ctx: &[String]) -> Option<UnpackedAtom> {
    let (t, is_eq) = match f {
        Formula::Eq(t) => (t, true),
        Formula::Lt(t) => (t, false),
        _ => return None,
    };
    let ms = unit_monomials(t, ctx)?;
    let pos: Vec<_> = ms.iter().filter(|m| m.2).collect();
    let neg: Vec<_> = ms.iter().filter(|m| !m.2).collect();
    let flat = ms.iter().all(|m| m.1 == 0);
    match (is_eq, pos.len(), neg.len()) {
        (true, 1, 0) | (true, 0, 1) if flat => Some(UnpackedAtom::Zero(ms[0].0)),
        (true, 1, 1) if flat => Some(UnpackedAtom::Eq(pos[0].0, neg[0].0)),
        (true, 1, 1) => {
            let (a, b) = (pos[0], neg[0]);
            match (a.1, b.1) {
                (1, 0) => Some(UnpackedAtom::Sigma(a.0, b.0)),
                (0, 1) => Some(UnpackedAtom::Sigma(b.0, a.0)),
                _ => None,
            }
        }
        (true, 2, 1) if flat => Some(UnpackedAtom::Add(pos[0].0, pos[1].0, neg[0].0)),
        (true, 1, 2) if flat => Some(UnpackedAtom::Sub(pos[0].0, neg[0].0, neg[1].0)),
        (false, 1, 1) if flat => Some(UnpackedAtom::Lt(pos[0].0, neg[0].0)),
        _ => None,
    }
}

/// Unpacks a normalized group atom over the variables `ctx`. Fresh variables
/// are named `z<n>` with `n` continuing the 1-based numbering of `ctx`.
pub fn unpack(atom: &Formula, ctx: &[String]) -> Result<Unpacked> {
    let (t, is_eq) = match atom {
        Formula::Eq(t) => (t.normalize_shift(), true),
        Formula::Lt(t) => (t.normalize_shift(), false),
        other => {
            return Err(Error::UnsupportedVocabulary(format!(
                "cannot unpack {other}"
            )))
        }
    };
    for v in t.vars() {
        if !ctx.contains(&v) {
            return Err(Error::Input(format!("variable {v} not in context")));
        }
    }
    if t.has_projections() {
        return Err(Error::UnsupportedVocabulary("projections cannot be unpacked".into()));
    }
    let normalized = if is_eq { Formula::Eq(t.clone()) } else { Formula::Lt(t.clone()) };
    let mut b = Builder {
        vars: ctx.to_vec(),
        fresh: Vec::new(),
        atoms: Vec::new(),
        chains: BTreeMap::new(),
    };
    if let Some(a) = already_unpacked(&normalized, ctx) {
        b.atoms.push(a);
        return Ok(Unpacked {
            vars: b.vars,
            fresh: b.fresh,
            atoms: b.atoms,
        });
    }
    if t.is_zero() {
        // 0 = 0 or 0 < 0 over a single fresh zero
        let z = b.new_var();
        b.atoms.push(UnpackedAtom::Zero(z));
        if !is_eq {
            b.atoms.push(UnpackedAtom::Lt(z, z));
        }
        return Ok(Unpacked {
            vars: b.vars,
            fresh: b.fresh,
            atoms: b.atoms,
        });
    }
    // summands in variable order, exponents descending
    let mut summands: Vec<(usize, u32, BigInt)> = Vec::new();
    let mut keys: Vec<_> = t.iter().collect();
    keys.sort_by_key(|(k, _)| ctx.iter().position(|v| *v == k.var).unwrap());
    for (k, op) in keys {
        let i = ctx.iter().position(|v| *v == k.var).unwrap();
        let terms: Vec<_> = op.terms().collect();
        for (e, c) in terms.into_iter().rev() {
            summands.push((i, e as u32, c.clone()));
        }
    }
    let mut values: Vec<(usize, bool)> = Vec::new();
    for (i, e, c) in &summands {
        let s = b.sigma_pow(*i, *e);
        let n = c.abs().to_u64().ok_or_else(|| Error::Input("coefficient too large".into()))?;
        let v = b.times(s, n);
        values.push((v, c.is_positive()));
    }
    let all_neg = values.iter().all(|v| !v.1);
    if all_neg {
        for v in values.iter_mut() {
            v.1 = true;
        }
    }
    if let Some(p) = values.iter().position(|v| v.1) {
        let first = values.remove(p);
        values.insert(0, first);
    }
    let mut acc = values[0].0;
    for &(v, pos) in &values[1..] {
        let j = b.new_var();
        b.atoms.push(if pos {
            UnpackedAtom::Add(acc, v, j)
        } else {
            UnpackedAtom::Sub(acc, v, j)
        });
        acc = j;
    }
    if is_eq {
        b.atoms.push(UnpackedAtom::Zero(acc));
    } else {
        let z = b.new_var();
        b.atoms.push(UnpackedAtom::Zero(z));
        b.atoms.push(if all_neg {
            UnpackedAtom::Lt(z, acc)
        } else {
            UnpackedAtom::Lt(acc, z)
        });
    }
    Ok(Unpacked {
        vars: b.vars,
        fresh: b.fresh,
        atoms: b.atoms,
    })
}

#[cfg(test)]
mod tests {
    use super::super::{parse, Vocabulary};
    use super::*;

    fn ctx(n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("x{i}")).collect()
    }

    #[test]
    fn nine_conjunct_example() {
        let f = parse("s^2(x1) - 2*s(x2) + 3*x3 = 0", Vocabulary::Group).unwrap();
        let u = unpack(&f, &ctx(3)).unwrap();
        use UnpackedAtom::*;
        // indices are 0-based: x4 is index 3
        assert_eq!(
            u.atoms,
            vec![
                Sigma(0, 3),
                Sigma(3, 4),
                Sigma(1, 5),
                Add(5, 5, 6),
                Add(2, 2, 7),
                Add(7, 2, 8),
                Sub(4, 6, 9),
                Add(9, 8, 10),
                Zero(10),
            ]
        );
        assert_eq!(u.fresh.len(), 8);
        assert_eq!(u.vars[10], "z11");
    }

    #[test]
    fn already_unpacked_is_identity() {
        let f = parse("x1 = x2", Vocabulary::Group).unwrap();
        let u = unpack(&f, &ctx(2)).unwrap();
        assert_eq!(u.atoms, vec![UnpackedAtom::Eq(0, 1)]);
        assert!(u.fresh.is_empty());
    }

    #[test]
    fn sigma_plus_variable() {
        let f = parse("s(x1) + x2 = 0", Vocabulary::Group).unwrap();
        let u = unpack(&f, &ctx(2)).unwrap();
        use UnpackedAtom::*;
        assert_eq!(u.atoms, vec![Sigma(0, 2), Add(2, 1, 3), Zero(3)]);
    }
}
