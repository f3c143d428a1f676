pub mod cli;
pub mod concrete;
pub mod divmodag;
pub mod dlo;
pub mod error;
pub mod formula;
pub mod operator;
pub mod poly;
pub mod quotient;
pub mod nsum;
pub mod omega;
pub mod species;

pub use error::{Error, Result};
pub use formula::{Formula, Term, Vocabulary};
pub use operator::{LaurentOperator, Sign};
pub use species::{op_sign, separating_point, species_equiv, AlgRel, AlgebraicPoint, Species};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/operators.md")]
    mod operators {}
    #[doc = include_str!("../../../book/src/formulas.md")]
    mod formulas {}
    #[doc = include_str!("../../../book/src/divmodag.md")]
    mod divmodag {}
    #[doc = include_str!("../../../book/src/dlo.md")]
    mod dlo {}
    #[doc = include_str!("../../../book/src/nsum.md")]
    mod nsum {}
    #[doc = include_str!("../../../book/src/omega.md")]
    mod omega {}
    #[doc = include_str!("../../../book/src/quotient.md")]
    mod quotient {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
