use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use super::{Formula, OTerm, Term, TermKey};
use crate::operator::LaurentOperator;

fn key_text(k: &TermKey) -> String {
    let mut s = k.var.clone();
    for (kind, op) in k.projs.iter().rev() {
        let name = match kind {
            super::ProjKind::K => "k",
            super::ProjKind::R => "r",
        };
        s = format!("{name}[{op}]({s})");
    }
    s
}

fn sigma_text(e: i32, inner: &str) -> String {
    match e {
        0 => inner.to_string(),
        1 => format!("s({inner})"),
        _ => format!("s^{e}({inner})"),
    }
}

/// Monomials `(coefficient, text)` in print order.
fn monomials(t: &Term) -> Vec<(BigInt, String)> {
    let mut out = Vec::new();
    for (k, op) in t.iter() {
        let base = key_text(k);
        let terms: Vec<(i32, &BigInt)> = op.terms().collect();
        for (e, c) in terms.into_iter().rev() {
            out.push((c.clone(), sigma_text(e, &base)));
        }
    }
    out
}

fn mono_text(c: &BigInt, body: &str) -> String {
    let a = c.abs();
    if a.is_one() {
        body.to_string()
    } else {
        format!("{a}*{body}")
    }
}

fn side(ms: &[(BigInt, String)]) -> String {
    if ms.is_empty() {
        return "0".to_string();
    }
    ms.iter()
        .map(|(c, b)| mono_text(c, b))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// `pos rel neg` with all coefficients positive on both sides.
fn relation(t: &Term, rel: &str) -> String {
    let ms = monomials(t);
    let pos: Vec<_> = ms.iter().filter(|(c, _)| c.is_positive()).cloned().collect();
    let neg: Vec<_> = ms
        .iter()
        .filter(|(c, _)| c.is_negative())
        .map(|(c, b)| (-c, b.clone()))
        .collect();
    format!("{} {rel} {}", side(&pos), side(&neg))
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ms = monomials(self);
        if ms.is_empty() {
            return write!(f, "0");
        }
        for (i, (c, b)) in ms.iter().enumerate() {
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { "-" } else { "+" })?;
            }
            write!(f, "{}", mono_text(c, b))?;
        }
        Ok(())
    }
}

impl fmt::Display for OTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", sigma_text(self.shift, &self.var))
    }
}

fn op_brackets(op: &LaurentOperator) -> String {
    format!("[{op}]")
}

const IMPLIES: u8 = 1;
const OR: u8 = 2;
const AND: u8 = 3;
const NOT: u8 = 4;

fn is_relational(f: &Formula) -> bool {
    matches!(
        f,
        Formula::Eq(_) | Formula::Lt(_) | Formula::OrderEq(..) | Formula::OrderLt(..)
    )
}

fn write_prec(f: &Formula, ctx: u8, out: &mut String) {
    let wrap = |own: u8, out: &mut String, body: &dyn Fn(&mut String)| {
        if ctx > own {
            out.push('(');
            body(out);
            out.push(')');
        } else {
            body(out);
        }
    };
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Eq(t) => out.push_str(&relation(t, "=")),
        Formula::Lt(t) => out.push_str(&relation(t, "<")),
        Formula::OrderEq(a, b) => out.push_str(&format!("{a} = {b}")),
        Formula::OrderLt(a, b) => out.push_str(&format!("{a} < {b}")),
        Formula::U(i, t) => out.push_str(&format!("U{i}({t})")),
        Formula::K(op, t) => out.push_str(&format!("K{}({t})", op_brackets(op))),
        Formula::R(op, t) => out.push_str(&format!("R{}({t})", op_brackets(op))),
        Formula::Not(a) => {
            out.push('!');
            if is_relational(a) {
                out.push('(');
                write_prec(a, 0, out);
                out.push(')');
            } else {
                write_prec(a, NOT + 1, out);
            }
        }
        Formula::And(v) => wrap(AND, out, &|out| {
            for (i, g) in v.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                write_prec(g, AND + 1, out);
            }
        }),
        Formula::Or(v) => wrap(OR, out, &|out| {
            for (i, g) in v.iter().enumerate() {
                if i > 0 {
                    out.push_str(" | ");
                }
                write_prec(g, OR + 1, out);
            }
        }),
        Formula::Implies(a, b) => wrap(IMPLIES, out, &|out| {
            write_prec(a, IMPLIES + 1, out);
            out.push_str(" -> ");
            write_prec(b, IMPLIES, out);
        }),
        Formula::Exists(x, b) | Formula::Forall(x, b) => wrap(0, out, &|out| {
            let q = if matches!(f, Formula::Exists(..)) { "E" } else { "A" };
            out.push_str(&format!("{q} {x}. "));
            write_prec(b, 0, out);
        }),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_prec(self, 0, &mut s);
        f.write_str(&s)
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse, ProjKind, Vocabulary};
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn printing() {
        let f = parse("E x. (s(x) = x + x)", Vocabulary::Group).unwrap();
        assert_eq!(f.to_string(), "E x. s(x) = 2*x");
        let f = parse("A x. (0 < x -> x < s(x))", Vocabulary::Group).unwrap();
        assert_eq!(f.to_string(), "A x. 0 < x -> x < s(x)");
        let f = parse("s(x) < y + y", Vocabulary::Group).unwrap();
        assert_eq!(f.to_string(), "s(x) < 2*y");
        let f = parse("!(x = y) & E z. z < x", Vocabulary::Group).unwrap();
        assert_eq!(f.to_string(), "!(x = y) & (E z. z < x)");
    }

    fn arb_op() -> impl Strategy<Value = LaurentOperator> {
        proptest::collection::vec((-2i32..3, -3i64..4), 1..3).prop_map(|ts| {
            let mut o = LaurentOperator::zero();
            for (e, c) in ts {
                o.add_term(e, BigInt::from(c));
            }
            o
        })
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let var = prop_oneof![Just("x"), Just("y"), Just("z1")];
        let proj = proptest::option::of((prop_oneof![Just(ProjKind::K), Just(ProjKind::R)], arb_op()));
        proptest::collection::vec((var, arb_op(), proj), 0..3).prop_map(|ms| {
            let mut t = Term::zero();
            for (v, op, p) in ms {
                let mut m = Term::scaled_var(v, op);
                if let Some((k, l)) = p {
                    if !l.is_zero() {
                        m = m.project(k, &l);
                    }
                }
                t = t.add(&m);
            }
            t
        })
    }

    fn arb_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            arb_term().prop_map(Formula::Eq),
            arb_term().prop_map(Formula::Lt),
            (0usize..3, arb_term()).prop_map(|(i, t)| Formula::U(i, t)),
            (arb_op(), arb_term()).prop_filter_map("nonzero", |(l, t)| (!l.is_zero()).then(|| Formula::K(l, t))),
            Just(Formula::True),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                inner.clone().prop_map(|f| Formula::Not(Box::new(f))),
                proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
                proptest::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (prop_oneof![Just("x"), Just("w")], inner.clone()).prop_map(|(v, f)| Formula::exists(v, f)),
                (prop_oneof![Just("y"), Just("w")], inner).prop_map(|(v, f)| Formula::forall(v, f)),
            ]
        })
    }

    proptest! {
        #[test]
        fn round_trip(f in arb_formula()) {
            let text = f.to_string();
            let back = parse(&text, Vocabulary::GradedStar(2)).unwrap();
            prop_assert_eq!(&back, &f, "{}", text);
            prop_assert_eq!(back.to_string(), text);
        }
    }
}
