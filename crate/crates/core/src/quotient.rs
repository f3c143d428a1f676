//! Translating sentences about `G/H` into sentences about `G`, for a convex
//! `s`-closed subgroup `H` defined by a formula in one free variable.

use crate::error::{Error, Result};
use crate::formula::{free_vars, substitute, Formula, Term};
use crate::operator::LaurentOperator;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientContext {
    phi_h: Formula,
    var: String,
}

impl QuotientContext {
    pub fn new(phi_h: Formula) -> Result<Self> {
        let fv = free_vars(&phi_h);
        if fv.len() != 1 {
            return Err(Error::Input(format!(
                "subgroup formula needs exactly one free variable, found {}",
                fv.len()
            )));
        }
        let var = fv.into_iter().next().unwrap();
        Ok(QuotientContext { phi_h, var })
    }

    pub fn phi_h(&self) -> &Formula {
        &self.phi_h
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    /// `phi_H(t)`
    pub fn holds_at(&self, t: &Term) -> Formula {
        substitute(&self.phi_h, &self.var, t)
    }
}

fn oterm(o: &crate::formula::OTerm) -> Term {
    Term::scaled_var(&o.var, LaurentOperator::sigma(o.shift))
}

/// `psi` over `G/H` as a formula over `G` with the same free variables.
pub fn translate(psi: &Formula, ctx: &QuotientContext) -> Result<Formula> {
    let tr = |f: &Formula| translate(f, ctx);
    Ok(match psi {
        Formula::True | Formula::False => psi.clone(),
        // `t = 0` and `t < 0` compare `t1 = t - t2` with `t2`, so the
        // difference `t2 - t1` is `-t`
        Formula::Eq(t) => ctx.holds_at(&t.neg()),
        Formula::Lt(t) => Formula::and(vec![
            psi.clone(),
            Formula::not(ctx.holds_at(&t.neg())),
        ]),
        Formula::OrderEq(a, b) => ctx.holds_at(&oterm(b).sub(&oterm(a))),
        Formula::OrderLt(a, b) => {
            let d = oterm(b).sub(&oterm(a));
            Formula::and(vec![Formula::Lt(d.neg()), Formula::not(ctx.holds_at(&d))])
        }
        Formula::U(..) | Formula::K(..) | Formula::R(..) => {
            return Err(Error::UnsupportedVocabulary(psi.to_string()))
        }
        Formula::Not(a) => Formula::Not(Box::new(tr(a)?)),
        Formula::And(v) => Formula::And(v.iter().map(tr).collect::<Result<_>>()?),
        Formula::Or(v) => Formula::Or(v.iter().map(tr).collect::<Result<_>>()?),
        Formula::Implies(a, b) => Formula::Implies(Box::new(tr(a)?), Box::new(tr(b)?)),
        Formula::Exists(y, b) => Formula::Exists(y.clone(), Box::new(tr(b)?)),
        Formula::Forall(y, b) => Formula::Forall(y.clone(), Box::new(tr(b)?)),
    })
}
