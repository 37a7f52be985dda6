//! Set shaping without a correspondence table.
//!
//! The transform maps every sequence of length `N` over `ns` symbols to a
//! distinct sequence of length `N + K` drawn from the `ns^N` longer sequences
//! with the lowest empirical coding limit. It is computed by enumerative
//! coding: the input's lexicographic rank is reinterpreted as a rank in an
//! entropy-ordered enumeration of the longer sequences.
//!
//! ```
//! use sst_core::{shape, unshape, Sequence, ShapingParams};
//!
//! let params = ShapingParams::new(3, 2);
//! let x = Sequence::parse("1 2", 3).unwrap();
//! let y = shape(&x, params).unwrap();
//! assert_eq!(y.to_string(), "2 2 2");
//! assert_eq!(unshape(&y, params).unwrap(), x);
//! ```

pub mod error;
pub mod experiment;
pub mod huffman;
pub mod oracle;
pub mod ranking;
pub mod seqcore;
pub mod shaping;
pub mod typespace;
mod wide;

pub use error::{Error, Result};
pub use experiment::{
    run_experiment, run_trial, run_with_shaper, ExperimentConfig, ExperimentReport, ExperimentRun,
    TrialRecord,
};
pub use huffman::{build_code, decode, encode, self_encoded_length, BitString, CodeBook};
pub use oracle::{build_table, exhaustive_stats, verify_bijection, CorrespondenceTable, ExhaustiveStats};
pub use ranking::{rank_in_type, rank_lex, rank_shaped, unrank_in_type, unrank_lex, unrank_shaped, Rank};
pub use seqcore::{coding_limit, empirical_histogram, type_coding_limit, Histogram, Sequence};
pub use shaping::{shape, unshape, Shaper, ShapingParams};
pub use typespace::{
    enumerate_types, type_class_size, IndexCache, ShapedIndex, DEFAULT_BUDGET,
};
