use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("sequence is empty")]
    EmptySequence,

    #[error("symbol {symbol} outside alphabet 1..={ns}")]
    SymbolOutOfRange { symbol: u32, ns: u32 },

    #[error("histogram has no nonzero count")]
    EmptyHistogram,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("expected length {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("alphabet mismatch: expected {expected}, got {actual}")]
    AlphabetMismatch { expected: u32, actual: u32 },

    #[error("rank {rank} outside [0, {bound})")]
    RankOutOfRange { rank: BigUint, bound: BigUint },

    /// The number of type classes exceeds the configured budget, so the
    /// exact index cannot be built at this scale.
    #[error("{types} type classes exceed the budget of {budget}")]
    BudgetExceeded { types: BigUint, budget: u64 },

    #[error("sequence has shaped rank {rank}, outside the image of size {image}")]
    NotInShapedSet { rank: BigUint, image: BigUint },

    #[error("symbol {0} has no codeword")]
    MissingSymbol(u32),

    #[error("bit string cannot be decoded: {0}")]
    Decode(String),

    #[error("scale guard: {0}")]
    ScaleGuard(String),

    #[error("round trip failed at trial {trial}: sequence not equal to the initial sequence")]
    RoundTrip { trial: u64 },

    #[error("index cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable variant name, used on diagnostic output.
    pub fn name(&self) -> &'static str {
        match self {
            Error::EmptySequence => "EmptySequence",
            Error::SymbolOutOfRange { .. } => "SymbolOutOfRange",
            Error::EmptyHistogram => "EmptyHistogram",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::AlphabetMismatch { .. } => "AlphabetMismatch",
            Error::RankOutOfRange { .. } => "RankOutOfRange",
            Error::BudgetExceeded { .. } => "BudgetExceeded",
            Error::NotInShapedSet { .. } => "NotInShapedSet",
            Error::MissingSymbol(_) => "MissingSymbol",
            Error::Decode(_) => "Decode",
            Error::ScaleGuard(_) => "ScaleGuard",
            Error::RoundTrip { .. } => "RoundTrip",
            Error::Cache(_) => "Cache",
            Error::Io(_) => "Io",
        }
    }
}
