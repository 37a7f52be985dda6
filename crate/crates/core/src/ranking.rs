//! Exact bijections between sequences and big-integer ranks.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::seqcore::{check_alphabet, empirical_histogram, Histogram, Sequence};
use crate::typespace::{type_class_size, ShapedIndex};

/// Arbitrary-precision rank.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rank(pub BigUint);

impl Rank {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn into_inner(self) -> BigUint {
        self.0
    }
}

impl From<BigUint> for Rank {
    fn from(v: BigUint) -> Self {
        Rank(v)
    }
}

impl From<u64> for Rank {
    fn from(v: u64) -> Self {
        Rank(BigUint::from(v))
    }
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Base-`ns` value of the digits `symbol - 1`, most significant first.
pub fn rank_lex(seq: &Sequence) -> Rank {
    let ns = seq.ns();
    let mut acc = BigUint::zero();
    // fold digits into u64 chunks to keep the bigint work per chunk
    let per_chunk = chunk_digits(ns);
    for chunk in seq.symbols().chunks(per_chunk) {
        let mut part = 0u64;
        let mut scale = 1u64;
        for &s in chunk {
            part = part * ns as u64 + (s - 1) as u64;
            scale *= ns as u64;
        }
        acc = acc * scale + part;
    }
    Rank(acc)
}

/// How many base-`ns` digits fit in a u64 chunk.
fn chunk_digits(ns: u32) -> usize {
    if ns <= 1 {
        return 64;
    }
    let mut k = 0;
    let mut v: u64 = 1;
    while let Some(next) = v.checked_mul(ns as u64) {
        v = next;
        k += 1;
    }
    k
}

pub fn unrank_lex(rank: &Rank, n: usize, ns: u32) -> Result<Sequence> {
    check_alphabet(ns)?;
    let bound = BigUint::from(ns).pow(n as u32);
    if rank.0 >= bound {
        return Err(Error::RankOutOfRange {
            rank: rank.0.clone(),
            bound,
        });
    }
    let mut digits = rank.0.to_radix_le(ns.max(2));
    if ns == 1 {
        digits.clear();
    }
    let mut symbols = vec![1u32; n];
    for (slot, d) in symbols.iter_mut().rev().zip(digits) {
        *slot = d as u32 + 1;
    }
    Ok(Sequence::from_raw(symbols, ns))
}

/// Lexicographic rank of `seq` among the arrangements of its histogram.
pub fn rank_in_type(seq: &Sequence) -> Rank {
    if seq.is_empty() {
        return Rank::default();
    }
    let hist = empirical_histogram(seq).expect("non-empty");
    let mut counts = hist.counts().to_vec();
    // arrangements of the remaining suffix
    let mut remaining_size = type_class_size(&hist);
    let mut remaining = seq.len();
    let mut rank = BigUint::zero();
    for &s in seq.symbols() {
        let idx = s as usize - 1;
        let smaller: usize = counts[..idx].iter().sum();
        if smaller > 0 {
            rank += &remaining_size * smaller / remaining;
        }
        remaining_size = remaining_size * counts[idx] / remaining;
        counts[idx] -= 1;
        remaining -= 1;
    }
    debug_assert!(remaining_size.is_one());
    Rank(rank)
}

pub fn unrank_in_type(rank: &Rank, hist: &Histogram) -> Result<Sequence> {
    let size = type_class_size(hist);
    if rank.0 >= size {
        return Err(Error::RankOutOfRange {
            rank: rank.0.clone(),
            bound: size,
        });
    }
    Ok(unrank_in_type_unchecked(rank.0.clone(), hist, size))
}

/// `size` must be the class size of `hist` and `rank < size`.
fn unrank_in_type_unchecked(mut rank: BigUint, hist: &Histogram, mut size: BigUint) -> Sequence {
    let mut counts = hist.counts().to_vec();
    let mut remaining = hist.total();
    let mut symbols = Vec::with_capacity(remaining);
    while remaining > 0 {
        for (idx, c) in counts.iter_mut().enumerate() {
            if *c == 0 {
                continue;
            }
            let block = &size * *c / remaining;
            if rank < block {
                symbols.push(idx as u32 + 1);
                *c -= 1;
                size = block;
                break;
            }
            rank -= block;
        }
        remaining -= 1;
    }
    Sequence::from_raw(symbols, hist.ns())
}

fn check_against_index(seq: &Sequence, index: &ShapedIndex) -> Result<()> {
    if seq.len() != index.n() {
        return Err(Error::LengthMismatch {
            expected: index.n(),
            actual: seq.len(),
        });
    }
    if seq.ns() != index.ns() {
        return Err(Error::AlphabetMismatch {
            expected: index.ns(),
            actual: seq.ns(),
        });
    }
    Ok(())
}

/// Rank of `seq` in the shaping order of all sequences of its length.
pub fn rank_shaped(seq: &Sequence, index: &ShapedIndex) -> Result<Rank> {
    check_against_index(seq, index)?;
    let hist = empirical_histogram(seq)?;
    let pos = index.position_of(&hist)?;
    Ok(Rank(index.cumulative_before(pos) + rank_in_type(seq).0))
}

pub fn unrank_shaped(rank: &Rank, index: &ShapedIndex) -> Result<Sequence> {
    let (pos, offset) = index.locate(&rank.0)?;
    let hist = index.histogram(pos);
    let size = index.class_size(pos);
    Ok(unrank_in_type_unchecked(offset, &hist, size))
}
