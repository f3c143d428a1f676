use num_bigint::BigInt;
use num_traits::Zero;

use super::{Formula, OTerm, ProjKind, Term, Vocabulary};
use crate::error::{Error, Result};
use crate::operator::LaurentOperator;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    /// Raw text between `[` and `]`.
    Op(String),
    LParen,
    RParen,
    Plus,
    Minus,
    Star,
    Caret,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Bang,
    Amp,
    Bar,
    Arrow,
    Dot,
    End,
}

fn syntax(offset: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        offset,
        message: message.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let b = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let two = |s: &[u8]| b.len() >= i + 2 && &b[i..i + 2] == s;
        let tok = if c.is_ascii_alphabetic() || c == b'_' {
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                i += 1;
            }
            out.push((Tok::Ident(text[start..i].to_string()), start));
            continue;
        } else if c.is_ascii_digit() {
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Int(text[start..i].parse().unwrap()), start));
            continue;
        } else if c == b'[' {
            let close = text[i..]
                .find(']')
                .ok_or_else(|| syntax(i, "unclosed '['"))?;
            let inner = text[i + 1..i + close].to_string();
            i += close + 1;
            out.push((Tok::Op(inner), start));
            continue;
        } else if two(b"->") {
            i += 2;
            Tok::Arrow
        } else if two(b"!=") {
            i += 2;
            Tok::Ne
        } else if two(b"<=") {
            i += 2;
            Tok::Le
        } else if two(b">=") {
            i += 2;
            Tok::Ge
        } else {
            i += 1;
            match c {
                b'(' => Tok::LParen,
                b')' => Tok::RParen,
                b'+' => Tok::Plus,
                b'-' => Tok::Minus,
                b'*' => Tok::Star,
                b'^' => Tok::Caret,
                b'=' => Tok::Eq,
                b'<' => Tok::Lt,
                b'>' => Tok::Gt,
                b'!' => Tok::Bang,
                b'&' => Tok::Amp,
                b'|' => Tok::Bar,
                b'.' => Tok::Dot,
                _ => return Err(syntax(start, format!("unexpected character '{}'", c as char))),
            }
        };
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

const RESERVED: &[&str] = &["s", "k", "r", "E", "A", "U", "K", "R", "true", "false"];

fn is_u_ident(s: &str) -> Option<usize> {
    let rest = s.strip_prefix('U')?;
    if rest.is_empty() || !rest.bytes().all(|c| c.is_ascii_digit()) {
        return None;
    }
    rest.parse().ok()
}

fn is_var_name(s: &str) -> bool {
    !RESERVED.contains(&s) && is_u_ident(s).is_none()
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vocab: Vocabulary,
    _text: &'a str,
}

/// Parses a formula in the given vocabulary.
pub fn parse(text: &str, vocab: Vocabulary) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        vocab,
        _text: text,
    };
    let f = p.formula()?;
    match p.peek() {
        Tok::End => Ok(f),
        _ => Err(syntax(p.offset(), "unexpected trailing input")),
    }
}

/// Parses a single term (group vocabulary with projections allowed).
pub fn parse_term(text: &str, vocab: Vocabulary) -> Result<Term> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        vocab,
        _text: text,
    };
    let t = p.term()?;
    match p.peek() {
        Tok::End => Ok(t),
        _ => Err(syntax(p.offset(), "unexpected trailing input")),
    }
}

enum RelTok {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<()> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(syntax(self.offset(), format!("expected {what}")))
        }
    }

    fn vocab_err(&self, m: &str) -> Error {
        Error::Vocabulary(format!("{m} at offset {}", self.offset()))
    }

    fn formula(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conjunction()?];
        while *self.peek() == Tok::Bar {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        })
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::Not(Box::new(self.unary()?)))
            }
            Tok::Ident(q) if (q == "E" || q == "A") => {
                self.bump();
                let var = match self.bump() {
                    Tok::Ident(v) if is_var_name(&v) => v,
                    _ => return Err(syntax(self.toks[self.pos - 1].1, "expected variable")),
                };
                self.expect(Tok::Dot, "'.'")?;
                let body = Box::new(self.formula()?);
                Ok(if q == "E" {
                    Formula::Exists(var, body)
                } else {
                    Formula::Forall(var, body)
                })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Ident(w) if w == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Ident(w) if w == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(w) if (w == "K" || w == "R") && matches!(self.peek_at(1), Tok::Op(_)) => {
                if !matches!(self.vocab, Vocabulary::GradedStar(_)) {
                    return Err(self.vocab_err(&format!("{w}[..] needs the starred graded vocabulary")));
                }
                self.bump();
                let op = self.op()?;
                self.expect(Tok::LParen, "'('")?;
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(if w == "K" { Formula::K(op, t) } else { Formula::R(op, t) })
            }
            Tok::Ident(w) if w == "U" || is_u_ident(&w).is_some() => {
                let at = self.offset();
                self.bump();
                let idx = match is_u_ident(&w) {
                    Some(i) => i,
                    None => match self.bump() {
                        Tok::Int(n) => n.try_into().map_err(|_| syntax(at, "index too large"))?,
                        _ => return Err(syntax(self.toks[self.pos - 1].1, "expected index")),
                    },
                };
                let max = match self.vocab {
                    Vocabulary::Graded(n) | Vocabulary::GradedStar(n) => n,
                    _ => return Err(Error::Vocabulary(format!("U{idx} at offset {at} needs a graded vocabulary"))),
                };
                if idx > max {
                    return Err(Error::Vocabulary(format!("U{idx} at offset {at} exceeds arity {max}")));
                }
                self.expect(Tok::LParen, "'('")?;
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Formula::U(idx, t))
            }
            Tok::LParen => {
                let save = self.pos;
                match self.atom() {
                    Ok(f) => Ok(f),
                    Err(e1) => {
                        let far1 = self.pos;
                        self.pos = save;
                        self.bump();
                        let inner = self.formula().and_then(|f| {
                            self.expect(Tok::RParen, "')'")?;
                            Ok(f)
                        });
                        match inner {
                            Ok(f) => Ok(f),
                            Err(e2) => {
                                if matches!(e1, Error::Vocabulary(_)) {
                                    return Err(e1);
                                }
                                let off = |e: &Error| match e {
                                    Error::Syntax { offset, .. } => *offset,
                                    _ => usize::MAX,
                                };
                                let _ = far1;
                                Err(if off(&e1) >= off(&e2) { e1 } else { e2 })
                            }
                        }
                    }
                }
            }
            _ => self.atom(),
        }
    }

    fn rel(&mut self) -> Result<RelTok> {
        let r = match self.peek() {
            Tok::Eq => RelTok::Eq,
            Tok::Ne => RelTok::Ne,
            Tok::Lt => RelTok::Lt,
            Tok::Le => RelTok::Le,
            Tok::Gt => RelTok::Gt,
            Tok::Ge => RelTok::Ge,
            _ => return Err(syntax(self.offset(), "expected relation")),
        };
        self.bump();
        Ok(r)
    }

    fn atom(&mut self) -> Result<Formula> {
        if self.vocab == Vocabulary::Order {
            let a = self.oterm()?;
            if matches!(self.peek(), Tok::Plus | Tok::Minus | Tok::Star) {
                return Err(self.vocab_err("arithmetic is not part of the order vocabulary"));
            }
            let r = self.rel()?;
            let b = self.oterm()?;
            return Ok(match r {
                RelTok::Eq => Formula::OrderEq(a, b),
                RelTok::Ne => Formula::Not(Box::new(Formula::OrderEq(a, b))),
                RelTok::Lt => Formula::OrderLt(a, b),
                RelTok::Gt => Formula::OrderLt(b, a),
                RelTok::Le => Formula::Not(Box::new(Formula::OrderLt(b, a))),
                RelTok::Ge => Formula::Not(Box::new(Formula::OrderLt(a, b))),
            });
        }
        let a = self.term()?;
        let r = self.rel()?;
        let b = self.term()?;
        Ok(match r {
            RelTok::Eq => Formula::Eq(a.sub(&b)),
            RelTok::Ne => Formula::Not(Box::new(Formula::Eq(a.sub(&b)))),
            RelTok::Lt => Formula::Lt(a.sub(&b)),
            RelTok::Gt => Formula::Lt(b.sub(&a)),
            RelTok::Le => Formula::Not(Box::new(Formula::Lt(b.sub(&a)))),
            RelTok::Ge => Formula::Not(Box::new(Formula::Lt(a.sub(&b)))),
        })
    }

    fn op(&mut self) -> Result<LaurentOperator> {
        let at = self.offset();
        match self.bump() {
            Tok::Op(text) => LaurentOperator::parse(&text).map_err(|e| match e {
                Error::Syntax { offset, message } => syntax(at + 1 + offset, message),
                e => e,
            }),
            _ => Err(syntax(at, "expected '[operator]'")),
        }
    }

    /// `x` or `s^k(x)` nested, for the order language.
    fn oterm(&mut self) -> Result<OTerm> {
        match self.peek().clone() {
            Tok::Ident(w) if w == "s" => {
                self.bump();
                let k = self.sigma_exponent()?;
                self.expect(Tok::LParen, "'('")?;
                let inner = self.oterm()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(OTerm::new(&inner.var, inner.shift + k))
            }
            Tok::Ident(w) if is_var_name(&w) => {
                self.bump();
                Ok(OTerm::new(&w, 0))
            }
            Tok::LParen => {
                self.bump();
                let t = self.oterm()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            Tok::Int(_) | Tok::Plus | Tok::Minus => {
                Err(self.vocab_err("arithmetic is not part of the order vocabulary"))
            }
            _ => Err(syntax(self.offset(), "expected term")),
        }
    }

    fn sigma_exponent(&mut self) -> Result<i32> {
        if *self.peek() != Tok::Caret {
            return Ok(1);
        }
        self.bump();
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let at = self.offset();
        match self.bump() {
            Tok::Int(n) => {
                let k: i32 = n.try_into().map_err(|_| syntax(at, "exponent too large"))?;
                Ok(if neg { -k } else { k })
            }
            _ => Err(syntax(at, "expected exponent")),
        }
    }

    fn term(&mut self) -> Result<Term> {
        let mut acc = self.unary_term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(&self.unary_term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(&self.unary_term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary_term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Minus => {
                self.bump();
                Ok(self.unary_term()?.neg())
            }
            Tok::Int(n) => {
                let at = self.offset();
                self.bump();
                if *self.peek() == Tok::Star {
                    self.bump();
                    Ok(self.unary_term()?.scale_big(&n))
                } else if n.is_zero() {
                    Ok(Term::zero())
                } else {
                    Err(syntax(at, "only the constant 0 is allowed"))
                }
            }
            _ => self.primary_term(),
        }
    }

    fn primary_term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Ident(w) if w == "s" => {
                self.bump();
                let k = self.sigma_exponent()?;
                self.expect(Tok::LParen, "'('")?;
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t.apply(&LaurentOperator::sigma(k)))
            }
            Tok::Ident(w) if (w == "k" || w == "r") && matches!(self.peek_at(1), Tok::Op(_)) => {
                if !matches!(self.vocab, Vocabulary::GradedStar(_)) {
                    return Err(self.vocab_err(&format!("{w}[..] needs the starred graded vocabulary")));
                }
                self.bump();
                let op = self.op()?;
                self.expect(Tok::LParen, "'('")?;
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                let kind = if w == "k" { ProjKind::K } else { ProjKind::R };
                Ok(t.project(kind, &op))
            }
            Tok::Ident(w) if is_var_name(&w) => {
                self.bump();
                Ok(Term::var(&w))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            Tok::Ident(w) => Err(syntax(self.offset(), format!("'{w}' is reserved"))),
            _ => Err(syntax(self.offset(), "expected term")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(text: &str) -> Formula {
        parse(text, Vocabulary::Group).unwrap()
    }

    #[test]
    fn grammar_examples() {
        let f = g("E x. (s(x) = x + x)");
        let body = Formula::Eq(Term::scaled_var("x", LaurentOperator::from_coeffs(&[-2, 1])));
        assert_eq!(f, Formula::exists("x", body));

        let f = g("A x. (0 < x -> x < s(x))");
        match f {
            Formula::Forall(v, b) => {
                assert_eq!(v, "x");
                assert!(matches!(*b, Formula::Implies(..)));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn incomplete_atom_offset() {
        match parse("x <", Vocabulary::Group) {
            Err(Error::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vocabulary_errors() {
        assert!(matches!(parse("U1(x) & x = x", Vocabulary::Group), Err(Error::Vocabulary(_))));
        assert!(matches!(parse("U3(x)", Vocabulary::Graded(2)), Err(Error::Vocabulary(_))));
        assert!(matches!(parse("k[s - 2](x) = 0", Vocabulary::Graded(2)), Err(Error::Vocabulary(_))));
        assert!(matches!(parse("x + y < z", Vocabulary::Order), Err(Error::Vocabulary(_))));
        assert!(parse("K[s - 2](x)", Vocabulary::GradedStar(2)).is_ok());
    }

    #[test]
    fn parenthesized_terms_and_formulas() {
        assert_eq!(g("(x + y) = z"), Formula::Eq(Term::var("x").add(&Term::var("y")).sub(&Term::var("z"))));
        assert_eq!(g("(x = y)"), g("x = y"));
        assert!(matches!(g("(x = y | y < x) & x = x"), Formula::And(_)));
    }

    #[test]
    fn order_terms() {
        let f = parse("s^3(x) < s(s(y))", Vocabulary::Order).unwrap();
        assert_eq!(f, Formula::OrderLt(OTerm::new("x", 3), OTerm::new("y", 2)));
    }

    #[test]
    fn sugar() {
        assert_eq!(g("x != y"), Formula::Not(Box::new(g("x = y"))));
        assert_eq!(g("x > y"), g("y < x"));
        assert_eq!(g("x >= y"), Formula::Not(Box::new(g("x < y"))));
    }

    #[test]
    fn quantifier_scope_is_maximal() {
        let f = g("E x. x = y & x < z");
        match f {
            Formula::Exists(_, b) => assert!(matches!(*b, Formula::And(_))),
            other => panic!("{other:?}"),
        }
    }
}
