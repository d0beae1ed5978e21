use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid lattice path matroid: {0}")]
    InvalidLpm(String),

    #[error("ground sets differ: {0} vs {1}")]
    GroundSetMismatch(usize, usize),

    #[error("element {element} is not in {which}")]
    NotAMember { element: usize, which: &'static str },

    #[error("upper/lower sets are not nested or the differences have unequal sizes")]
    NotNested,

    #[error("{what} = {value} is outside the supported range {min}..={max}")]
    OutOfRange {
        what: &'static str,
        value: usize,
        min: usize,
        max: usize,
    },

    #[error("elements {0} and {1} are not comparable")]
    Incomparable(usize, usize),

    #[error("{what} exceeds the budget ({size} > {budget})")]
    BudgetExceeded {
        what: &'static str,
        size: usize,
        budget: usize,
    },

    #[error(
        "facets do not all have the same size (facet {index} has {found}, expected {expected})"
    )]
    NotPure {
        index: usize,
        found: usize,
        expected: usize,
    },

    #[error("permutation sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),

    #[error("not a permutation: {0}")]
    InvalidPermutation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed poset data: {0}")]
    MalformedPoset(String),

    #[error("cover relation disagrees with the transitive reduction of the quotient order: {0}")]
    CoverMismatch(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
