//! Dense linear orders with a monotone automorphism.
//!
//! Quantifier elimination for DLO with `s` increasing, decreasing or the
//! identity, the block-pattern theories, and the split-cut counter over
//! words of archimedean class behaviors.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::{dnf_clauses, free_vars, nnf, simplify, Formula, Literal, OTerm};

/// Behavior of `s` assumed by [`qe_dlo`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `s` is the identity.
    Plain,
    /// `x < s(x)` for all `x`.
    Increasing,
    /// `s(x) < x` for all `x`.
    Decreasing,
}

impl FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Mode::Plain),
            "increasing" | "inc" => Ok(Mode::Increasing),
            "decreasing" | "dec" => Ok(Mode::Decreasing),
            other => Err(Error::Input(format!("unknown mode {other:?}"))),
        }
    }
}

/// `a = b` (`lt = false`) or `a < b`, with same-variable atoms decided by the
/// mode and the left shift moved to the right.
pub fn order_atom(a: &OTerm, b: &OTerm, lt: bool, mode: Mode) -> Formula {
    let (sa, sb) = match mode {
        Mode::Plain => (0, 0),
        _ => (a.shift, b.shift),
    };
    if a.var == b.var {
        let d = sb - sa;
        let truth = match (lt, mode) {
            (false, _) => d == 0 || mode == Mode::Plain,
            (true, Mode::Plain) => false,
            (true, Mode::Increasing) => d > 0,
            (true, Mode::Decreasing) => d < 0,
        };
        return if truth { Formula::True } else { Formula::False };
    }
    let l = OTerm::new(&a.var, 0);
    let r = OTerm::new(&b.var, sb - sa);
    if lt {
        Formula::OrderLt(l, r)
    } else if l.var <= r.var {
        Formula::OrderEq(l, r)
    } else {
        Formula::OrderEq(OTerm::new(&b.var, 0), OTerm::new(&a.var, sa - sb))
    }
}

fn normalize(f: &Formula, mode: Mode) -> Result<Formula> {
    Ok(match f {
        Formula::OrderEq(a, b) => order_atom(a, b, false, mode),
        Formula::OrderLt(a, b) => order_atom(a, b, true, mode),
        Formula::True | Formula::False => f.clone(),
        Formula::Not(a) => Formula::not(normalize(a, mode)?),
        Formula::And(v) => Formula::and(v.iter().map(|g| normalize(g, mode)).collect::<Result<_>>()?),
        Formula::Or(v) => Formula::or(v.iter().map(|g| normalize(g, mode)).collect::<Result<_>>()?),
        Formula::Implies(a, b) => Formula::implies(normalize(a, mode)?, normalize(b, mode)?),
        Formula::Exists(x, b) => Formula::exists(x, normalize(b, mode)?),
        Formula::Forall(x, b) => Formula::forall(x, normalize(b, mode)?),
        other => return Err(Error::UnsupportedVocabulary(format!("{other}"))),
    })
}

/// `!(a < b)` becomes `b < a | a = b`.
fn expand_negated_lt(f: &Formula, mode: Mode) -> Formula {
    match f {
        Formula::Not(g) => match &**g {
            Formula::OrderLt(a, b) => Formula::or(vec![
                order_atom(b, a, true, mode),
                order_atom(a, b, false, mode),
            ]),
            _ => f.clone(),
        },
        Formula::And(v) => Formula::and(v.iter().map(|g| expand_negated_lt(g, mode)).collect()),
        Formula::Or(v) => Formula::or(v.iter().map(|g| expand_negated_lt(g, mode)).collect()),
        other => other.clone(),
    }
}

/// One literal on `x` after normalization.
enum Bound {
    Eq(OTerm),
    Lower(OTerm),
    Upper(OTerm),
    Ne,
}

fn classify(l: &Literal, x: &str) -> Bound {
    // `s^k(x) rel t` is `x rel s^-k(t)`
    let other = |a: &OTerm, b: &OTerm| {
        if a.var == x {
            shifted(b, -a.shift)
        } else {
            shifted(a, -b.shift)
        }
    };
    match (&l.atom, l.positive) {
        (Formula::OrderEq(a, b), true) => Bound::Eq(other(a, b)),
        (Formula::OrderEq(..), false) => Bound::Ne,
        (Formula::OrderLt(a, b), true) => {
            if a.var == x {
                Bound::Upper(other(a, b))
            } else {
                Bound::Lower(other(a, b))
            }
        }
        _ => unreachable!("negated order literals are expanded first"),
    }
}

fn shifted(t: &OTerm, k: i32) -> OTerm {
    OTerm::new(&t.var, t.shift + k)
}

/// Replaces `x` with `t`.
fn subst_literal(l: &Literal, x: &str, t: &OTerm, mode: Mode) -> Formula {
    let fix = |o: &OTerm| if o.var == x { shifted(t, o.shift) } else { o.clone() };
    let atom = match &l.atom {
        Formula::OrderEq(a, b) => order_atom(&fix(a), &fix(b), false, mode),
        Formula::OrderLt(a, b) => order_atom(&fix(a), &fix(b), true, mode),
        other => other.clone(),
    };
    if l.positive {
        atom
    } else {
        Formula::not(atom)
    }
}

fn eliminate_clause(x: &str, clause: &[Literal], mode: Mode) -> Formula {
    let (on, off): (Vec<&Literal>, Vec<&Literal>) =
        clause.iter().partition(|l| free_vars(&l.atom).contains(x));
    let mut parts: Vec<Formula> = off.iter().map(|l| l.to_formula()).collect();
    let bounds: Vec<Bound> = on.iter().map(|l| classify(l, x)).collect();
    if let Some(p) = bounds.iter().position(|b| matches!(b, Bound::Eq(_))) {
        let Bound::Eq(t) = &bounds[p] else { unreachable!() };
        for (i, l) in on.iter().enumerate() {
            if i != p {
                parts.push(subst_literal(l, x, t, mode));
            }
        }
    } else {
        for lo in &bounds {
            let Bound::Lower(a) = lo else { continue };
            for hi in &bounds {
                let Bound::Upper(b) = hi else { continue };
                parts.push(order_atom(a, b, true, mode));
            }
        }
    }
    Formula::and(parts)
}

fn eliminate(x: &str, body: &Formula, mode: Mode) -> Result<Formula> {
    let prepared = expand_negated_lt(&nnf(body), mode);
    let mut out = Vec::new();
    for clause in dnf_clauses(&prepared)? {
        let f = eliminate_clause(x, &clause, mode);
        if !out.contains(&f) {
            out.push(f);
        }
    }
    Ok(simplify(&Formula::or(out)))
}

fn qe_inner(f: &Formula, mode: Mode) -> Result<Formula> {
    Ok(match f {
        Formula::Exists(x, b) => eliminate(x, &qe_inner(b, mode)?, mode)?,
        Formula::Forall(x, b) => {
            Formula::not(eliminate(x, &Formula::not(qe_inner(b, mode)?), mode)?)
        }
        Formula::Not(a) => Formula::not(qe_inner(a, mode)?),
        Formula::And(v) => Formula::and(v.iter().map(|g| qe_inner(g, mode)).collect::<Result<_>>()?),
        Formula::Or(v) => Formula::or(v.iter().map(|g| qe_inner(g, mode)).collect::<Result<_>>()?),
        Formula::Implies(a, b) => Formula::implies(qe_inner(a, mode)?, qe_inner(b, mode)?),
        other => other.clone(),
    })
}

/// Quantifier-free equivalent of `f` in DLO with `s` behaving per `mode`.
pub fn qe_dlo(f: &Formula, mode: Mode) -> Result<Formula> {
    let n = normalize(f, mode)?;
    Ok(simplify(&qe_inner(&n, mode)?))
}

pub fn decide_block_sentence(f: &Formula, mode: Mode) -> Result<bool> {
    let fv = free_vars(f);
    if !fv.is_empty() {
        return Err(Error::FreeVariables(fv.into_iter().collect()));
    }
    match qe_dlo(f, mode)? {
        Formula::True => Ok(true),
        Formula::False => Ok(false),
        other => Err(Error::Input(format!("residual formula {other}"))),
    }
}

/// One block of a complete extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Block {
    /// A fixed point of `s`.
    C1,
    /// A dense set of fixed points without endpoints.
    Cempty,
    I,
    D,
}

impl Block {
    pub const ALL: [Block; 4] = [Block::C1, Block::Cempty, Block::I, Block::D];

    pub fn base(self) -> ClassLetter {
        match self {
            Block::C1 | Block::Cempty => ClassLetter::C,
            Block::I => ClassLetter::I,
            Block::D => ClassLetter::D,
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Block::C1 => "C1",
            Block::Cempty => "C0",
            Block::I => "I",
            Block::D => "D",
        })
    }
}

impl FromStr for Block {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "C1" => Ok(Block::C1),
            "C0" | "Cempty" | "Ce" => Ok(Block::Cempty),
            "I" => Ok(Block::I),
            "D" => Ok(Block::D),
            other => Err(Error::InvalidPattern(format!("unknown block {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockPattern {
    pub word: Vec<Block>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternIssue {
    Empty,
    /// Letters `index` and `index + 1` share a base type.
    SameBase { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternReport {
    pub ok: bool,
    pub issues: Vec<PatternIssue>,
}

impl BlockPattern {
    pub fn new(word: Vec<Block>) -> Self {
        BlockPattern { word }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn checked(self) -> Result<Self> {
        let r = validate_pattern(&self);
        if r.ok {
            Ok(self)
        } else {
            Err(Error::InvalidPattern(format!("{self}: {:?}", r.issues)))
        }
    }
}

/// Comma or space separated letters, e.g. `I,C1,D`.
impl FromStr for BlockPattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let word = s
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<_>>()?;
        Ok(BlockPattern { word })
    }
}

impl fmt::Display for BlockPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.word.iter().map(|b| b.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

pub fn validate_pattern(p: &BlockPattern) -> PatternReport {
    let mut issues = Vec::new();
    if p.word.is_empty() {
        issues.push(PatternIssue::Empty);
    }
    for (i, w) in p.word.windows(2).enumerate() {
        if w[0].base() == w[1].base() {
            issues.push(PatternIssue::SameBase { index: i });
        }
    }
    PatternReport {
        ok: issues.is_empty(),
        issues,
    }
}

/// Number of valid patterns with exactly `n` letters.
pub fn count_patterns(n: usize) -> BigUint {
    if n == 0 {
        return BigUint::zero();
    }
    // words ending in C, I, D
    let (mut c, mut i, mut d) = (BigUint::from(2u32), BigUint::one(), BigUint::one());
    for _ in 1..n {
        let nc = (&i + &d) * 2u32;
        let ni = &c + &d;
        let nd = &c + &i;
        (c, i, d) = (nc, ni, nd);
    }
    c + i + d
}

/// All valid patterns with `n` letters, in lexicographic order.
pub fn enumerate_patterns(n: usize) -> Vec<BlockPattern> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &out {
            for b in Block::ALL {
                if w.last().map_or(true, |l: &Block| l.base() != b.base()) {
                    let mut v = w.clone();
                    v.push(b);
                    next.push(v);
                }
            }
        }
        out = next;
    }
    if n == 0 {
        return Vec::new();
    }
    out.into_iter().map(BlockPattern::new).collect()
}

fn v(name: &str) -> OTerm {
    OTerm::new(name, 0)
}

fn s_of(name: &str) -> OTerm {
    OTerm::new(name, 1)
}

/// The one-variable formula describing how `s` acts on `name`.
pub fn behavior(letter: ClassLetter, name: &str) -> Formula {
    match letter {
        ClassLetter::C => Formula::OrderEq(s_of(name), v(name)),
        ClassLetter::I => Formula::OrderLt(v(name), s_of(name)),
        ClassLetter::D => Formula::OrderLt(s_of(name), v(name)),
    }
}

fn le(a: &str, b: &str) -> Formula {
    Formula::or(vec![Formula::OrderLt(v(a), v(b)), Formula::OrderEq(v(a), v(b))])
}

/// `a < b` and every point strictly between shares the behavior of both ends.
pub fn r_relation(a: &str, b: &str) -> Formula {
    let e = "e";
    let same = ClassLetter::ALL
        .iter()
        .map(|&l| Formula::and(vec![behavior(l, a), behavior(l, e), behavior(l, b)]))
        .collect();
    // implied by the rest in a dense order; keeps finite samples honest
    let ends = ClassLetter::ALL
        .iter()
        .map(|&l| Formula::and(vec![behavior(l, a), behavior(l, b)]))
        .collect();
    Formula::and(vec![
        Formula::OrderLt(v(a), v(b)),
        Formula::or(ends),
        Formula::forall(
            e,
            Formula::implies(
                Formula::and(vec![Formula::OrderLt(v(a), v(e)), Formula::OrderLt(v(e), v(b))]),
                Formula::or(same),
            ),
        ),
    ])
}

/// Reflexive and symmetric closure of [`r_relation`].
pub fn approx(a: &str, b: &str) -> Formula {
    Formula::or(vec![
        Formula::OrderEq(v(a), v(b)),
        r_relation(a, b),
        r_relation(b, a),
    ])
}

fn ys(k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("y{i}")).collect()
}

/// `y1 < ... < yk <= x`
fn chain(names: &[String], x: &str) -> Formula {
    let mut parts: Vec<Formula> = names
        .windows(2)
        .map(|w| Formula::OrderLt(v(&w[0]), v(&w[1])))
        .collect();
    parts.push(le(names.last().expect("nonempty chain"), x));
    Formula::and(parts)
}

fn pairs(names: &[String], f: impl Fn(&str, &str) -> Formula) -> Vec<Formula> {
    let mut out = Vec::new();
    for i in 0..names.len() {
        for j in i + 1..names.len() {
            out.push(f(&names[i], &names[j]));
        }
    }
    out
}

/// "`x` is in the `k`th block" in a theory with `n` blocks.
pub fn block_membership_formula(k: usize, n: usize) -> Result<Formula> {
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    if n == 1 {
        return Ok(Formula::OrderEq(v("x"), v("x")));
    }
    let below = ys(k);
    let mut at_least = vec![chain(&below, "x")];
    at_least.extend(pairs(&below, |a, b| Formula::not(approx(a, b))));
    let above = ys(k + 1);
    let at_most = Formula::implies(chain(&above, "x"), Formula::or(pairs(&above, approx)));
    Ok(Formula::and(vec![
        Formula::exists_many(&below, Formula::and(at_least)),
        Formula::forall_many(&above, at_most),
    ]))
}

fn block_at(k: usize, n: usize, var: &str) -> Result<Formula> {
    let f = block_membership_formula(k, n)?;
    Ok(if var == "x" {
        f
    } else {
        crate::formula::substitute_order(&f, "x", &v(var))
    })
}

/// "there are exactly `n` blocks"
pub fn block_count_formula(n: usize) -> Result<Formula> {
    let every = (1..=n).map(|k| block_at(k, n, "x")).collect::<Result<Vec<_>>>()?;
    Ok(Formula::and(vec![
        Formula::forall("x", Formula::or(every)),
        Formula::exists("x", block_at(n, n, "x")?),
    ]))
}

/// Axioms of the complete theory described by a pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct PatternAxioms {
    pub order: Vec<Formula>,
    pub automorphism: Vec<Formula>,
    pub block_count: Formula,
    pub behavior: Vec<Formula>,
    /// Singleton or endpoint-free, per constant block.
    pub constant_blocks: Vec<Formula>,
}

impl PatternAxioms {
    /// Nonempty groups, in order.
    pub fn parts(&self) -> Vec<Vec<Formula>> {
        let all = [
            self.order.clone(),
            self.automorphism.clone(),
            vec![self.block_count.clone()],
            self.behavior.clone(),
            self.constant_blocks.clone(),
        ];
        all.into_iter().filter(|p| !p.is_empty()).collect()
    }

    pub fn all(&self) -> Vec<Formula> {
        self.parts().concat()
    }
}

pub fn pattern_axioms(p: &BlockPattern) -> Result<PatternAxioms> {
    let p = p.clone().checked()?;
    let n = p.len();
    let (x, y, z) = (v("x"), v("y"), v("z"));
    let lt = |a: &OTerm, b: &OTerm| Formula::OrderLt(a.clone(), b.clone());
    let mut order = vec![
        Formula::forall("x", Formula::not(lt(&x, &x))),
        Formula::forall_many(
            &ys_named(&["x", "y", "z"]),
            Formula::implies(Formula::and(vec![lt(&x, &y), lt(&y, &z)]), lt(&x, &z)),
        ),
        Formula::forall_many(
            &ys_named(&["x", "y"]),
            Formula::or(vec![lt(&x, &y), Formula::OrderEq(x.clone(), y.clone()), lt(&y, &x)]),
        ),
        Formula::forall_many(
            &ys_named(&["x", "y"]),
            Formula::implies(
                lt(&x, &y),
                Formula::exists("z", Formula::and(vec![lt(&x, &z), lt(&z, &y)])),
            ),
        ),
    ];
    // a singleton block at either end is an endpoint
    if p.word[0] != Block::C1 {
        order.push(Formula::forall("x", Formula::exists("y", lt(&y, &x))));
    }
    if p.word[n - 1] != Block::C1 {
        order.push(Formula::forall("x", Formula::exists("y", lt(&x, &y))));
    }
    let automorphism = vec![
        Formula::forall_many(
            &ys_named(&["x", "y"]),
            Formula::implies(lt(&x, &y), lt(&s_of("x"), &s_of("y"))),
        ),
        Formula::forall("y", Formula::exists("x", Formula::OrderEq(s_of("x"), y.clone()))),
    ];
    let mut behavior_ax = Vec::new();
    let mut constant = Vec::new();
    for (i, b) in p.word.iter().enumerate() {
        let k = i + 1;
        let bx = block_at(k, n, "x")?;
        behavior_ax.push(Formula::forall(
            "x",
            Formula::implies(bx.clone(), behavior(b.base(), "x")),
        ));
        match b {
            Block::C1 => constant.push(Formula::forall_many(
                &ys_named(&["x", "y"]),
                Formula::implies(
                    Formula::and(vec![bx.clone(), block_at(k, n, "y")?]),
                    Formula::OrderEq(x.clone(), y.clone()),
                ),
            )),
            Block::Cempty => constant.push(Formula::forall(
                "x",
                Formula::implies(
                    bx.clone(),
                    Formula::exists_many(
                        &ys_named(&["y", "z"]),
                        Formula::and(vec![
                            block_at(k, n, "y")?,
                            block_at(k, n, "z")?,
                            lt(&y, &x),
                            lt(&x, &z),
                        ]),
                    ),
                ),
            )),
            _ => {}
        }
    }
    Ok(PatternAxioms {
        order,
        automorphism,
        block_count: block_count_formula(n)?,
        behavior: behavior_ax,
        constant_blocks: constant,
    })
}

fn ys_named(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

/// Behavior of `s` on one archimedean class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLetter {
    C,
    I,
    D,
}

impl ClassLetter {
    pub const ALL: [ClassLetter; 3] = [ClassLetter::C, ClassLetter::I, ClassLetter::D];
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassWord {
    pub word: Vec<ClassLetter>,
}

impl FromStr for ClassWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let word = s
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                'C' => Ok(ClassLetter::C),
                'I' => Ok(ClassLetter::I),
                'D' => Ok(ClassLetter::D),
                other => Err(Error::Input(format!("unknown class letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if word.is_empty() {
            return Err(Error::Input("empty class word".into()));
        }
        Ok(ClassWord { word })
    }
}

impl fmt::Display for ClassWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.word {
            write!(f, "{l:?}")?;
        }
        Ok(())
    }
}

/// Split cuts by the formula holding below the cut.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitCounts {
    /// `x < s(x)`
    pub increasing: usize,
    /// `x = s(x)`
    pub fixed: usize,
    /// `s(x) < x`
    pub decreasing: usize,
    pub total: usize,
}

impl SplitCounts {
    pub fn get(&self, l: ClassLetter) -> usize {
        match l {
            ClassLetter::C => self.fixed,
            ClassLetter::I => self.increasing,
            ClassLetter::D => self.decreasing,
        }
    }
}

pub fn count_split_cuts(w: &ClassWord) -> SplitCounts {
    let mut c = SplitCounts::default();
    for pair in w.word.windows(2) {
        if pair[0] == pair[1] {
            continue;
        }
        match pair[0] {
            ClassLetter::C => c.fixed += 1,
            ClassLetter::I => c.increasing += 1,
            ClassLetter::D => c.decreasing += 1,
        }
        c.total += 1;
    }
    c
}

/// A rational model of a pattern: block `j` is the interval `(j, j + 1)`, or
/// the point `j + 1/2` for a singleton. On `(j, j + 1)`, with `t = x - j`,
/// `s` is `t -> 2t/(1 + t)` for I and its inverse `t -> t/(2 - t)` for D.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockModel {
    pub pattern: BlockPattern,
}

impl BlockModel {
    pub fn new(pattern: BlockPattern) -> Self {
        BlockModel { pattern }
    }

    pub fn block_of(&self, x: &BigRational) -> usize {
        let j = x.floor().to_integer();
        let j: usize = j.try_into().expect("point inside the model");
        j.min(self.pattern.len() - 1)
    }

    fn step(&self, x: &BigRational, forward: bool) -> BigRational {
        let j = self.block_of(x);
        let base = BigRational::from_integer(j.into());
        let t = x - &base;
        let one = BigRational::one();
        let two = &one + &one;
        let up = |t: &BigRational| &two * t / (&one + t);
        let down = |t: &BigRational| t / (&two - t);
        let nt = match (self.pattern.word[j], forward) {
            (Block::I, true) | (Block::D, false) => up(&t),
            (Block::I, false) | (Block::D, true) => down(&t),
            _ => t,
        };
        base + nt
    }

    pub fn apply(&self, x: &BigRational, k: i32) -> BigRational {
        let mut y = x.clone();
        for _ in 0..k.unsigned_abs() {
            y = self.step(&y, k > 0);
        }
        y
    }

    /// `per` points inside each block (one for singletons).
    pub fn sample(&self, per: usize) -> Vec<BigRational> {
        let mut out = Vec::new();
        for (j, b) in self.pattern.word.iter().enumerate() {
            let base = BigRational::from_integer(j.into());
            if *b == Block::C1 {
                out.push(base + BigRational::new(1.into(), 2.into()));
            } else {
                for m in 1..=per {
                    out.push(&base + BigRational::new(m.into(), (per + 1).into()));
                }
            }
        }
        out
    }

    pub fn eval(
        &self,
        f: &Formula,
        env: &crate::concrete::Env<BigRational>,
        domain: &[BigRational],
    ) -> bool {
        crate::concrete::eval_generic(f, env, domain, &|a, e| match a {
            Formula::True => true,
            Formula::False => false,
            Formula::OrderEq(p, q) => self.apply(&e[&p.var], p.shift) == self.apply(&e[&q.var], q.shift),
            Formula::OrderLt(p, q) => self.apply(&e[&p.var], p.shift) < self.apply(&e[&q.var], q.shift),
            other => panic!("not an order atom: {other}"),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::concrete::{Env, ShiftModel};
    use crate::formula::{parse, quantifier_rank, Vocabulary};
    use proptest::prelude::*;

    fn o(s: &str) -> Formula {
        parse(s, Vocabulary::Order).unwrap()
    }

    fn r(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn qe_examples() {
        assert_eq!(qe_dlo(&o("E x. a < x & x < s(a)"), Mode::Increasing).unwrap(), Formula::True);
        assert_eq!(qe_dlo(&o("E x. b < x & x < a"), Mode::Plain).unwrap(), o("b < a"));
        assert_eq!(qe_dlo(&o("s^3(x) < s^5(x)"), Mode::Increasing).unwrap(), Formula::True);
        assert_eq!(qe_dlo(&o("s^3(x) < s^5(x)"), Mode::Decreasing).unwrap(), Formula::False);
        assert_eq!(qe_dlo(&o("E x. s(x) = y & x < z"), Mode::Increasing).unwrap(), o("y < s(z)"));
    }

    #[test]
    fn decide_examples() {
        assert!(decide_block_sentence(&o("A x. x < s(x)"), Mode::Increasing).unwrap());
        assert!(!decide_block_sentence(&o("E x. s(x) = x"), Mode::Increasing).unwrap());
        assert!(decide_block_sentence(&o("E x. E y. x < y"), Mode::Plain).unwrap());
        assert!(decide_block_sentence(&o("A x. E y. y < x & x < s(y)"), Mode::Increasing).unwrap());
        assert!(!decide_block_sentence(&o("A x. E y. s(y) < x & x < y"), Mode::Increasing).unwrap());
        assert!(matches!(
            decide_block_sentence(&o("x < y"), Mode::Plain),
            Err(Error::FreeVariables(_))
        ));
    }

    #[test]
    fn rejects_group_atoms() {
        let f = parse("x + y < 0", Vocabulary::Group).unwrap();
        assert!(matches!(qe_dlo(&f, Mode::Plain), Err(Error::UnsupportedVocabulary(_))));
    }

    #[test]
    fn pattern_counts() {
        let c: Vec<u32> = (1..=3).map(|n| count_patterns(n).try_into().unwrap()).collect();
        assert_eq!(c, vec![4, 10, 26]);
        for n in 1..=6 {
            assert_eq!(count_patterns(n), BigUint::from(enumerate_patterns(n).len()));
        }
    }

    #[test]
    fn pattern_validation() {
        let ok: BlockPattern = "I,C1,D".parse().unwrap();
        assert!(validate_pattern(&ok).ok);
        let bad: BlockPattern = "I,I".parse().unwrap();
        assert!(matches!(pattern_axioms(&bad), Err(Error::InvalidPattern(_))));
        let bad: BlockPattern = "C1,C0".parse().unwrap();
        assert_eq!(validate_pattern(&bad).issues, vec![PatternIssue::SameBase { index: 0 }]);
    }

    #[test]
    fn axioms_shape() {
        let one = pattern_axioms(&"I".parse().unwrap()).unwrap();
        assert!(one.behavior[0] == o("A x. (x = x -> x < s(x))"));
        assert_eq!(one.order.len(), 6);
        let two = pattern_axioms(&"I,D".parse().unwrap()).unwrap();
        assert_eq!(two.parts().len(), 4);
        assert_eq!(two.behavior.len(), 2);
    }

    #[test]
    fn membership_shape() {
        assert_eq!(block_membership_formula(1, 1).unwrap(), o("x = x"));
        assert!(quantifier_rank(&block_membership_formula(2, 3).unwrap()) >= 2);
        assert!(matches!(
            block_membership_formula(4, 3),
            Err(Error::IndexOutOfRange { index: 4, max: 3 })
        ));
    }

    #[test]
    fn membership_partitions_sampled_model() {
        for w in ["I,C1,D", "D,C0,I", "C1,I"] {
            let p: BlockPattern = w.parse().unwrap();
            let m = BlockModel::new(p.clone());
            let dom = m.sample(2);
            let n = p.len();
            let fs: Vec<Formula> = (1..=n).map(|k| block_membership_formula(k, n).unwrap()).collect();
            for x in &dom {
                let mut env = Env::new();
                env.insert("x".to_string(), x.clone());
                let hits: Vec<usize> = (0..n).filter(|&k| m.eval(&fs[k], &env, &dom)).collect();
                assert_eq!(hits, vec![m.block_of(x)], "{w} at {x}");
            }
        }
    }

    #[test]
    fn axioms_hold_in_sampled_model() {
        let p: BlockPattern = "I,C1,D".parse().unwrap();
        let m = BlockModel::new(p.clone());
        let dom = m.sample(2);
        let ax = pattern_axioms(&p).unwrap();
        for f in ax.behavior.iter().chain(&ax.constant_blocks) {
            assert!(m.eval(f, &Env::new(), &dom), "{f}");
        }
        assert!(m.eval(&ax.block_count, &Env::new(), &dom));
        assert!(!m.eval(&block_count_formula(2).unwrap(), &Env::new(), &dom));
    }

    #[test]
    fn block_model_shapes() {
        let m = BlockModel::new("I,D".parse().unwrap());
        let x = r(1, 2);
        assert!(m.apply(&x, 1) > x);
        assert_eq!(m.apply(&m.apply(&x, 3), -3), x);
        let y = r(3, 2);
        assert!(m.apply(&y, 1) < y);
    }

    #[test]
    fn split_examples() {
        let c = count_split_cuts(&"IDI".parse().unwrap());
        assert_eq!((c.increasing, c.decreasing, c.fixed, c.total), (1, 1, 0, 2));
        assert_eq!(count_split_cuts(&"II".parse().unwrap()), SplitCounts::default());
        assert_eq!(count_split_cuts(&"CIDC".parse().unwrap()).total, 3);
        assert!("".parse::<ClassWord>().is_err());
    }

    fn atom() -> impl Strategy<Value = String> {
        let t = (prop::sample::select(vec!["x", "y", "a", "b"]), -2i32..3)
            .prop_map(|(v, k)| if k == 0 { v.to_string() } else { format!("s^{k}({v})") });
        (t.clone(), prop::sample::select(vec!["<", "=", "!=", "<="]), t)
            .prop_map(|(l, op, r)| format!("{l} {op} {r}"))
    }

    proptest! {
        #[test]
        fn negation_flips_decision(
            atoms in prop::collection::vec(atom(), 1..4),
            mode in prop::sample::select(vec![Mode::Plain, Mode::Increasing, Mode::Decreasing]),
        ) {
            let body = atoms.join(" & ");
            let f = o(&format!("A a. E x. A b. E y. {body}"));
            let d = decide_block_sentence(&f, mode).unwrap();
            let nd = decide_block_sentence(&Formula::not(f), mode).unwrap();
            prop_assert_eq!(d, !nd);
        }

        #[test]
        fn qe_agrees_with_shift_model(
            atoms in prop::collection::vec(atom(), 1..4),
            a in -6i64..6, b in -6i64..6,
        ) {
            let f = o(&format!("E x. {}", atoms.join(" & ")));
            let q = qe_dlo(&f, Mode::Increasing).unwrap();
            let m = ShiftModel::new(1);
            let mut env = Env::new();
            env.insert("a".to_string(), r(a, 1));
            env.insert("b".to_string(), r(b, 1));
            env.insert("y".to_string(), r(a + b, 2));
            // x ranges over a grid fine enough to separate the shifted values
            let dom: Vec<BigRational> = (-80..=80).map(|i| r(i, 8)).collect();
            let sampled = m.eval(&f, &env, &dom);
            if sampled {
                prop_assert!(m.eval(&q, &env, &dom), "{} gave {}", f, q);
            }
        }
    }
}
