use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("insufficient precision: interval data exhausted before the sign resolved")]
    InsufficientPrecision,
    #[error("invalid species: {0}")]
    InvalidSpecies(String),
    #[error("species are equivalent; no separator exists")]
    NoSeparator,
    #[error("cannot separate species with the available precision")]
    Unresolvable,
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("vocabulary error: {0}")]
    Vocabulary(String),
    #[error("formula contains quantifiers")]
    QuantifierPresent,
    #[error("formula is not quantifier-free")]
    NotQuantifierFree,
    #[error("constraint set is not a conjunction of literals")]
    NotConjunctive,
    #[error("formula has free variables: {}", .0.join(", "))]
    FreeVariables(Vec<String>),
    #[error("unsupported vocabulary: {0}")]
    UnsupportedVocabulary(String),
    #[error("invalid block pattern: {0}")]
    InvalidPattern(String),
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("sum is not reduced: coordinates {0} and {1} are equivalent")]
    NotReduced(usize, usize),
    #[error("invalid algebraic point: {0}")]
    InvalidRho(String),
    #[error("omega-sum is not model complete")]
    NotModelComplete,
    #[error("tail sign is not eventually constant")]
    AmbiguousTail,
    #[error("operator must be nonzero")]
    ZeroOperator,
    #[error("atom mixes the two sides of the cut: {0}")]
    UnsplittableAtom(String),
    #[error("invalid input: {0}")]
    Input(String),
}
