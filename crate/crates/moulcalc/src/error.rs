//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("letters do not form a semigroup (abstract symbols cannot be added)")]
    NoSemigroup,
    #[error("norm of the empty word is undefined")]
    EmptyWord,
    #[error("moulds are defined over different alphabets")]
    AlphabetMismatch,
    #[error("degree vectors of different dimensions: {0} and {1}")]
    DimensionMismatch(usize, usize),
    #[error("mould is not invertible for the product (value on the empty word is 0)")]
    NotInvertible,
    #[error("composition undefined: right factor does not vanish on the empty word")]
    CompositionUndefined,
    #[error("mould is not invertible for composition: zero on length-1 word {0}")]
    NotCompInvertible(String),
    #[error("series argument is not nilpotent: {0}")]
    NonNilpotent(&'static str),
    #[error("weight map is not additive on words {0} and {1}")]
    NotAdditive(String, String),
    #[error("map is not a morphism on words {0} and {1}")]
    NotMorphism(String, String),
    #[error("pole at word {0}")]
    PoleAtWord(String),
    #[error("word {word} exceeds the mould length bound {bound}")]
    BeyondBound { word: String, bound: usize },
    #[error("sampling failed after {0} retries (collision or pole at every draw)")]
    SampleCollision(usize),
    #[error("no multiplicative parameter for letter {0}")]
    NoMultiplier(String),
    #[error("letter {0} has no decomposition into nonnegative parts")]
    Undecomposable(String),
    #[error("precondition failed: {0}")]
    Precondition(&'static str),
    #[error("degree vector {0:?} is not admissible")]
    InadmissibleDegree(Vec<i64>),
    #[error("object is not in prepared form: {0}")]
    NotPrepared(String),
    #[error("object is not local: {0}")]
    NotLocal(String),
    #[error("resonant word {0}")]
    Resonant(String),
    #[error("letter {0} has no operator part")]
    UnknownLetter(String),
    #[error("requested size {0} exceeds the cap {1}")]
    CapExceeded(usize, usize),
    #[error("unknown mould name {0}")]
    UnknownMould(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
