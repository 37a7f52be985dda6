//! Sequences over a 1-based alphabet, their empirical histograms, and the
//! coding limit `Lc(x) = -Σ log2 p(x_i)` with `p` the in-sequence frequency.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported alphabet.
pub const MAX_ALPHABET: u32 = 1 << 16;

/// A finite string of symbols in `1..=ns`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence {
    symbols: Vec<u32>,
    ns: u32,
}

impl Sequence {
    pub fn new(symbols: Vec<u32>, ns: u32) -> Result<Self> {
        check_alphabet(ns)?;
        if let Some(&bad) = symbols.iter().find(|&&s| s == 0 || s > ns) {
            return Err(Error::SymbolOutOfRange { symbol: bad, ns });
        }
        Ok(Sequence { symbols, ns })
    }

    /// Builds a sequence without validating symbols. Callers guarantee the
    /// alphabet invariant.
    pub(crate) fn from_raw(symbols: Vec<u32>, ns: u32) -> Self {
        debug_assert!(symbols.iter().all(|&s| s >= 1 && s <= ns));
        Sequence { symbols, ns }
    }

    /// Constant sequence of `symbol` repeated `len` times.
    pub fn constant(symbol: u32, len: usize, ns: u32) -> Result<Self> {
        Sequence::new(vec![symbol; len], ns)
    }

    /// Parses whitespace-separated 1-based integers (newlines allowed).
    pub fn parse(text: &str, ns: u32) -> Result<Self> {
        let symbols = text
            .split_whitespace()
            .map(|tok| {
                u32::from_str(tok)
                    .map_err(|_| Error::InvalidParameter(format!("bad symbol token {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Sequence::new(symbols, ns)
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn ns(&self) -> u32 {
        self.ns
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn into_symbols(self) -> Vec<u32> {
        self.symbols
    }
}

impl fmt::Display for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.symbols.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

pub(crate) fn check_alphabet(ns: u32) -> Result<()> {
    if ns == 0 || ns > MAX_ALPHABET {
        return Err(Error::InvalidParameter(format!(
            "alphabet size {ns} outside 1..={MAX_ALPHABET}"
        )));
    }
    Ok(())
}

/// Per-symbol occurrence counts; `counts[s - 1]` is the count of symbol `s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Histogram {
    counts: Vec<usize>,
}

impl Histogram {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        let ns = u32::try_from(counts.len()).unwrap_or(u32::MAX);
        check_alphabet(ns)?;
        Ok(Histogram { counts })
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn ns(&self) -> u32 {
        self.counts.len() as u32
    }

    /// Sequence length `n`.
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Number of symbols with a nonzero count.
    pub fn support(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// The lexicographically smallest arrangement: symbols in ascending order.
    pub fn sorted_sequence(&self) -> Sequence {
        let mut symbols = Vec::with_capacity(self.total());
        for (i, &c) in self.counts.iter().enumerate() {
            symbols.extend(std::iter::repeat_n(i as u32 + 1, c));
        }
        Sequence::from_raw(symbols, self.ns())
    }
}

impl fmt::Display for Histogram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

pub fn empirical_histogram(seq: &Sequence) -> Result<Histogram> {
    if seq.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut counts = vec![0usize; seq.ns() as usize];
    for &s in seq.symbols() {
        counts[s as usize - 1] += 1;
    }
    Ok(Histogram { counts })
}

/// Coding limit of a sequence in bits.
pub fn coding_limit(seq: &Sequence) -> Result<f64> {
    type_coding_limit(&empirical_histogram(seq)?)
}

/// Coding limit shared by every sequence with this histogram:
/// `-Σ c_i log2(c_i / n)` over nonzero counts.
pub fn type_coding_limit(hist: &Histogram) -> Result<f64> {
    let n = hist.total();
    if n == 0 {
        return Err(Error::EmptyHistogram);
    }
    Ok(coding_limit_of_counts(hist.counts(), n))
}

pub(crate) fn coding_limit_of_counts(counts: &[usize], n: usize) -> f64 {
    let n = n as f64;
    let mut bits = 0.0;
    for &c in counts.iter().filter(|&&c| c > 0) {
        let c = c as f64;
        bits -= c * (c / n).log2();
    }
    // -0.0 for constant sequences
    bits + 0.0
}
