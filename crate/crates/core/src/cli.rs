//! Command-line front end. `run` does all the work and returns the exit code
//! together with a text and a JSON rendering of the result, so the binary
//! only has to print.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::divmodag;
use crate::dlo::{self, BlockPattern, ClassWord, Mode};
use crate::error::{Error, Result};
use crate::formula::{parse, unpack, Formula, Vocabulary};
use crate::nsum::{self, Dullness, NSumSpec};
use crate::omega::{self, McVerdict, OmegaSumSpec};
use crate::operator::LaurentOperator;
use crate::quotient::{translate, QuotientContext};
use crate::species::{op_sign, separating_point, AlgebraicPoint, Species};

#[derive(Debug, Parser)]
#[command(name = "modag", version, about = "Decision procedures for ordered groups and orders with an automorphism")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

/// Which structure a formula is read in.
#[derive(Debug, Clone, Args)]
pub struct Structure {
    /// A single div-MODAG of this species, e.g. `=2` or `>s^2-2@1,3/2`.
    #[arg(long, allow_hyphen_values = true)]
    pub species: Option<String>,
    /// Dense order with an automorphism: plain, increasing or decreasing.
    #[arg(long)]
    pub mode: Option<Mode>,
    /// One coordinate of an n-sum; repeat for each coordinate.
    #[arg(long = "coord", allow_hyphen_values = true)]
    pub coords: Vec<String>,
    /// An n-sum as a JSON list of species, inline or in a file.
    #[arg(long)]
    pub sum: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct Formulas {
    /// The formula text.
    #[arg(long, short)]
    pub formula: Vec<String>,
    /// A file with one formula per line; blank lines and `#` comments skipped.
    #[arg(long)]
    pub file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eliminate quantifiers.
    Qe {
        #[command(flatten)]
        on: Structure,
        #[command(flatten)]
        input: Formulas,
    },
    /// Decide sentences; exit 0 when all are true, 1 otherwise.
    Decide {
        #[command(flatten)]
        on: Structure,
        #[command(flatten)]
        input: Formulas,
    },
    /// Model completeness of an omega-sum.
    OmegaMc {
        #[arg(long)]
        spec: PathBuf,
    },
    /// Con/Inc/Dec index sets of an omega-sum at a point.
    Classify {
        #[arg(long)]
        spec: PathBuf,
        /// A rational, or `poly @ lo, hi`.
        #[arg(long)]
        rho: String,
    },
    /// The resolved tail axiom of an operator on a model complete omega-sum.
    TailAxiom {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        op: String,
    },
    /// Near, class and successor formulas at a point.
    Obstruction {
        #[arg(long)]
        rho: String,
    },
    /// The gamma* image of a conjunction of atoms across a cut.
    GammaStar {
        /// Conjunction of atoms such as `y1 - y2 = x1`, separated by `&`.
        #[arg(long)]
        atoms: String,
        /// Variables below the cut, comma separated.
        #[arg(long, default_value = "")]
        below: String,
        /// Variables above the cut, comma separated.
        #[arg(long)]
        above: String,
    },
    /// Block patterns: counting, enumeration, validation and axioms.
    Patterns {
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        enumerate: Option<usize>,
        /// A pattern such as `I,C1,D`.
        #[arg(long)]
        validate: Option<String>,
        #[arg(long)]
        axioms: Option<String>,
        /// `k,n`: the formula for "x lies in block k of n".
        #[arg(long)]
        membership: Option<String>,
    },
    /// Count split cuts of a word over C, I, D.
    SplitCuts {
        #[arg(long)]
        word: String,
    },
    /// Translate a sentence about G/H into one about G.
    Quotient {
        /// Formula in one free variable defining H.
        #[arg(long)]
        phi: String,
        #[arg(long, short)]
        formula: String,
    },
    /// Representative-sequence formula of a reduced n-sum.
    RepSeq {
        #[command(flatten)]
        on: Structure,
        /// Also print the definitions of U_alpha.
        #[arg(long)]
        alpha: Option<usize>,
    },
    /// Check a species, an n-sum or an omega-sum.
    Validate {
        #[command(flatten)]
        on: Structure,
        #[arg(long)]
        spec: Option<PathBuf>,
    },
    /// Sign of an operator on positive elements of a species.
    Sign {
        #[arg(long, allow_hyphen_values = true)]
        op: String,
        #[arg(long, allow_hyphen_values = true)]
        species: String,
    },
    /// Simplest point strictly between two species.
    Separate {
        #[arg(allow_hyphen_values = true)]
        a: String,
        #[arg(allow_hyphen_values = true)]
        b: String,
    },
    /// Reduced form and dullness of an n-sum, with an optional K/R split of a formula.
    Sum {
        #[command(flatten)]
        on: Structure,
        #[arg(long, short)]
        formula: Option<String>,
    },
    /// Unpack an atom into a conjunction of unpacked atoms.
    Unpack {
        #[arg(long, short)]
        formula: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome { code: 0, text, json }
    }

    fn verdict(v: bool, text: String, json: Value) -> Self {
        Outcome { code: if v { 0 } else { 1 }, text, json }
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            serde_json::to_string_pretty(&self.json).unwrap()
        } else {
            self.text.clone()
        }
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn from_json<T: serde::de::DeserializeOwned>(path: &PathBuf) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

enum Target {
    Single(Species),
    Order(Mode),
    Sum(NSumSpec),
}

fn sum_of(on: &Structure) -> Result<Option<NSumSpec>> {
    if let Some(p) = &on.sum {
        if p.trim_start().starts_with('[') {
            return serde_json::from_str(p).map(Some).map_err(|e| Error::Input(format!("--sum: {e}")));
        }
        return Ok(Some(from_json(&PathBuf::from(p))?));
    }
    if on.coords.is_empty() {
        return Ok(None);
    }
    let coords = on.coords.iter().map(|c| c.parse()).collect::<Result<Vec<Species>>>()?;
    Ok(Some(NSumSpec::new(coords)))
}

fn target(on: &Structure) -> Result<Target> {
    let sum = sum_of(on)?;
    let given = on.species.is_some() as u8 + on.mode.is_some() as u8 + sum.is_some() as u8;
    if given != 1 {
        return Err(Error::Input(
            "give exactly one of --species, --mode, --coord/--sum".into(),
        ));
    }
    Ok(match (&on.species, on.mode, sum) {
        (Some(s), _, _) => Target::Single(s.parse()?),
        (_, Some(m), _) => Target::Order(m),
        (_, _, Some(g)) => Target::Sum(g),
        _ => unreachable!(),
    })
}

impl Target {
    fn vocabulary(&self) -> Vocabulary {
        match self {
            Target::Single(_) => Vocabulary::Group,
            Target::Order(_) => Vocabulary::Order,
            Target::Sum(g) => Vocabulary::GradedStar(g.n()),
        }
    }

    fn qe(&self, f: &Formula) -> Result<Formula> {
        match self {
            Target::Single(s) => divmodag::qe(f, s),
            Target::Order(m) => dlo::qe_dlo(f, *m),
            Target::Sum(g) => nsum::qe_nsum(f, g),
        }
    }

    fn decide(&self, f: &Formula) -> Result<bool> {
        match self {
            Target::Single(s) => divmodag::decide_sentence(f, s),
            Target::Order(m) => dlo::decide_block_sentence(f, *m),
            Target::Sum(g) => nsum::decide_nsum(f, g),
        }
    }
}

fn formulas(input: &Formulas) -> Result<Vec<String>> {
    let mut out = input.formula.clone();
    if let Some(p) = &input.file {
        out.extend(
            read(p)?
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from),
        );
    }
    if out.is_empty() {
        return Err(Error::Input("no formula given".into()));
    }
    Ok(out)
}

fn point(text: &str) -> Result<AlgebraicPoint> {
    text.parse()
}

fn lines(v: &[String]) -> String {
    v.join("\n")
}

/// Reads `a + b = c`, `a - b = c`, `s(a) = b`, `a = b`, `a < b`, `a = 0`.
fn unpacked_atom(text: &str, var: &mut dyn FnMut(&str) -> Result<usize>) -> Result<crate::formula::UnpackedAtom> {
    use crate::formula::UnpackedAtom as A;
    let bad = || Error::Input(format!("not an unpacked atom: {text:?}"));
    let t: String = text.split_whitespace().collect();
    if let Some((l, r)) = t.split_once('<') {
        return Ok(A::Lt(var(l)?, var(r)?));
    }
    let (l, r) = t.split_once('=').ok_or_else(bad)?;
    if let Some(inner) = l.strip_prefix("s(").and_then(|u| u.strip_suffix(')')) {
        return Ok(A::Sigma(var(inner)?, var(r)?));
    }
    if let Some((a, b)) = l.split_once('+') {
        return Ok(A::Add(var(a)?, var(b)?, var(r)?));
    }
    if let Some((a, b)) = l.split_once('-') {
        return Ok(A::Sub(var(a)?, var(b)?, var(r)?));
    }
    if r == "0" {
        return Ok(A::Zero(var(l)?));
    }
    Ok(A::Eq(var(l)?, var(r)?))
}

fn split_names(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|v| !v.is_empty()).map(String::from).collect()
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Qe { on, input } => {
            let t = target(on)?;
            let mut text = Vec::new();
            let mut recs = Vec::new();
            for src in formulas(input)? {
                let f = parse(&src, t.vocabulary())?;
                let out = t.qe(&f)?.to_string();
                text.push(out.clone());
                recs.push(json!({"input": src, "output": out}));
            }
            Ok(Outcome::ok(lines(&text), json!({"results": recs})))
        }
        Command::Decide { on, input } => {
            let t = target(on)?;
            let mut all = true;
            let mut text = Vec::new();
            let mut recs = Vec::new();
            for src in formulas(input)? {
                let v = t.decide(&parse(&src, t.vocabulary())?)?;
                all &= v;
                text.push(v.to_string());
                recs.push(json!({"input": src, "verdict": v}));
            }
            Ok(Outcome::verdict(all, lines(&text), json!({"verdict": all, "results": recs})))
        }
        Command::OmegaMc { spec } => {
            let g: OmegaSumSpec = from_json(spec)?;
            let at_inf = g.type_at_infinity().map(|s| s.to_string());
            Ok(match omega::is_model_complete(&g)? {
                McVerdict::Mc => Outcome::verdict(
                    true,
                    format!("MC, type at infinity {}", at_inf.clone().unwrap_or_default()),
                    json!({"verdict": "MC", "type_at_infinity": at_inf}),
                ),
                McVerdict::NotMc { witness, lemma } => Outcome::verdict(
                    false,
                    format!("NotMC, witness rho={witness}, Lemma: {lemma:?}"),
                    json!({"verdict": "NotMC", "witness": witness.to_string(), "lemma": lemma}),
                ),
            })
        }
        Command::Classify { spec, rho } => {
            let g: OmegaSumSpec = from_json(spec)?;
            let c = omega::classify_rho(&g, &point(rho)?)?;
            let text = format!("con: {}\ninc: {}\ndec: {}", c.con, c.inc, c.dec);
            Ok(Outcome::ok(text, serde_json::to_value(&c).unwrap()))
        }
        Command::TailAxiom { spec, op } => {
            let g: OmegaSumSpec = from_json(spec)?;
            let t = omega::tail_axioms(&g, &LaurentOperator::parse(op)?)?;
            let sign = format!("{:?}", t.sign).to_lowercase();
            Ok(Outcome::ok(
                format!("N={} sign={sign}\n{}", t.n, t.formula),
                json!({"n": t.n, "sign": sign, "formula": t.formula.to_string()}),
            ))
        }
        Command::Obstruction { rho } => {
            let o = omega::obstruction_formulas(&point(rho)?)?;
            let named = [
                ("near(x)", &o.near),
                ("b in [a]", &o.class),
                ("next(x, y)", &o.next),
                ("phi(x, a)", &o.phi),
                ("gt(x)", &o.gt),
                ("b in [a]>", &o.class_gt),
                ("next>(x, y)", &o.next_gt),
                ("phi>(x, a)", &o.phi_gt),
            ];
            let text = named.iter().map(|(n, f)| format!("{n}: {f}")).collect::<Vec<_>>();
            let rec: serde_json::Map<String, Value> =
                named.iter().map(|(n, f)| (n.to_string(), json!(f.to_string()))).collect();
            Ok(Outcome::ok(lines(&text), Value::Object(rec)))
        }
        Command::GammaStar { atoms, below, above } => {
            let below_names = split_names(below);
            let above_names = split_names(above);
            let mut names: Vec<String> = below_names.clone();
            names.extend(above_names.iter().cloned());
            let mut var = |v: &str| {
                names
                    .iter()
                    .position(|n| n == v)
                    .ok_or_else(|| Error::Input(format!("unknown variable {v}")))
            };
            let conj = atoms
                .split('&')
                .map(|a| unpacked_atom(a, &mut var))
                .collect::<Result<Vec<_>>>()?;
            let lo: BTreeSet<usize> = (0..below_names.len()).collect();
            let hi: Vec<usize> = (below_names.len()..below_names.len() + above_names.len()).collect();
            let f = omega::gamma_star(&conj, &lo, &hi)?;
            let map: Vec<String> = above_names
                .iter()
                .enumerate()
                .map(|(i, y)| format!("{} = {y}", omega::w_name(i)))
                .collect();
            Ok(Outcome::ok(
                format!("{f}\n({})", map.join(", ")),
                json!({"formula": f.to_string(), "w": map}),
            ))
        }
        Command::Patterns { count, enumerate, validate, axioms, membership } => {
            let mut text = Vec::new();
            let mut rec = serde_json::Map::new();
            let mut code = 0;
            if let Some(n) = count {
                let c = dlo::count_patterns(*n).to_string();
                text.push(format!("count({n}) = {c}"));
                rec.insert("count".into(), json!(c));
            }
            if let Some(n) = enumerate {
                let all: Vec<String> = dlo::enumerate_patterns(*n).iter().map(|p| p.to_string()).collect();
                text.extend(all.iter().cloned());
                rec.insert("patterns".into(), json!(all));
            }
            if let Some(p) = validate {
                let r = dlo::validate_pattern(&p.parse::<BlockPattern>()?);
                let issues: Vec<String> = r.issues.iter().map(|i| format!("{i:?}")).collect();
                text.push(if r.ok { "valid".into() } else { format!("invalid: {}", issues.join(", ")) });
                rec.insert("valid".into(), json!(r.ok));
                rec.insert("issues".into(), json!(issues));
                if !r.ok {
                    code = 1;
                }
            }
            if let Some(p) = axioms {
                let ax = dlo::pattern_axioms(&p.parse::<BlockPattern>()?.checked()?)?;
                let all: Vec<String> = ax.all().iter().map(|f| f.to_string()).collect();
                text.extend(all.iter().cloned());
                rec.insert("axioms".into(), json!(all));
            }
            if let Some(kn) = membership {
                let v: Vec<usize> = kn
                    .split(',')
                    .map(|s| s.trim().parse().map_err(|_| Error::Input(format!("bad k,n: {kn}"))))
                    .collect::<Result<_>>()?;
                let [k, n] = v[..] else {
                    return Err(Error::Input(format!("bad k,n: {kn}")));
                };
                let f = dlo::block_membership_formula(k, n)?.to_string();
                text.push(f.clone());
                rec.insert("membership".into(), json!(f));
            }
            if rec.is_empty() {
                return Err(Error::Input("nothing to do; see --help".into()));
            }
            Ok(Outcome { code, text: lines(&text), json: Value::Object(rec) })
        }
        Command::SplitCuts { word } => {
            let c = dlo::count_split_cuts(&word.parse::<ClassWord>()?);
            Ok(Outcome::ok(
                format!("I={} C={} D={}\nsplit={}", c.increasing, c.fixed, c.decreasing, c.total),
                serde_json::to_value(c).unwrap(),
            ))
        }
        Command::Quotient { phi, formula } => {
            let ctx = QuotientContext::new(parse(phi, Vocabulary::GradedStar(usize::MAX))?)?;
            let f = translate(&parse(formula, Vocabulary::Group)?, &ctx)?.to_string();
            Ok(Outcome::ok(f.clone(), json!({"formula": f})))
        }
        Command::RepSeq { on, alpha } => {
            let g = sum_of(on)?.ok_or_else(|| Error::Input("give --coord or --sum".into()))?;
            let (plan, theta) = nsum::representative_theta(&g)?;
            let mut text = vec![theta.to_string()];
            let mut rec = json!({"plan": plan, "theta": theta.to_string()});
            if let Some(a) = alpha {
                let (ex, un) = nsum::u_alpha_defs(*a, &g)?;
                text.push(format!("U{a}(x) <-> {ex}"));
                text.push(format!("U{a}(x) <-> {un}"));
                rec["exists"] = json!(ex.to_string());
                rec["forall"] = json!(un.to_string());
            }
            Ok(Outcome::ok(lines(&text), rec))
        }
        Command::Validate { on, spec } => {
            let mut problems = Vec::new();
            if let Some(p) = spec {
                let g: OmegaSumSpec = from_json(p)?;
                if let Err(e) = g.check() {
                    problems.push(e.to_string());
                }
            } else if let Some(s) = &on.species {
                let r = s.parse::<Species>()?.validate();
                problems.extend(r.issues.iter().map(|i| i.to_string()));
            } else if let Some(g) = sum_of(on)? {
                for (i, s) in g.coords.iter().enumerate() {
                    problems.extend(s.validate().issues.iter().map(|e| format!("coordinate {i}: {e}")));
                }
                if let Err(e) = g.require_reduced() {
                    problems.push(e.to_string());
                }
            } else {
                return Err(Error::Input("nothing to validate".into()));
            }
            let ok = problems.is_empty();
            let text = if ok { "ok".to_string() } else { lines(&problems) };
            Ok(Outcome {
                code: if ok { 0 } else { 2 },
                text,
                json: json!({"ok": ok, "issues": problems}),
            })
        }
        Command::Sign { op, species } => {
            let s = op_sign(&LaurentOperator::parse(op)?, &species.parse()?)?;
            let t = format!("{s:?}").to_lowercase();
            Ok(Outcome::ok(t.clone(), json!({"sign": t})))
        }
        Command::Separate { a, b } => {
            let p = separating_point(&a.parse()?, &b.parse()?)?.to_string();
            Ok(Outcome::ok(p.clone(), json!({"separator": p})))
        }
        Command::Sum { on, formula } => {
            let g = sum_of(on)?.ok_or_else(|| Error::Input("give --coord or --sum".into()))?;
            g.check()?;
            let reduced = nsum::reduce_spec(&g);
            let dull = match nsum::is_dull(&reduced) {
                Dullness::Dull => None,
                Dullness::NotDull { witness } => Some(witness.to_string()),
            };
            let mut text = vec![
                format!("reduced: {reduced}"),
                match &dull {
                    None => "dull".to_string(),
                    Some(w) => format!("not dull, witness {w}"),
                },
            ];
            let mut rec = json!({"reduced": reduced.to_string(), "dull": dull.is_none(), "witness": dull});
            if let Some(src) = formula {
                let f = parse(src, Vocabulary::GradedStar(reduced.n()))?;
                let split = match nsum::SplitData::for_spec(&reduced)? {
                    Some(sd) => nsum::kr_split(&f, &sd, &reduced)?,
                    None => f,
                };
                text.push(split.to_string());
                rec["split"] = json!(split.to_string());
            }
            Ok(Outcome::ok(lines(&text), rec))
        }
        Command::Unpack { formula } => {
            let f = parse(formula, Vocabulary::Group)?;
            let ctx: Vec<String> = crate::formula::free_vars(&f).into_iter().collect();
            let u = unpack(&f, &ctx)?;
            let atoms: Vec<String> = u.atoms.iter().map(|a| a.display(&u.vars)).collect();
            Ok(Outcome::ok(atoms.join(" & "), json!({"vars": u.vars, "atoms": atoms})))
        }
    }
}
