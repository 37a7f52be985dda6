//! Deterministic canonical Huffman codes built from integer symbol counts.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};
use crate::seqcore::{empirical_histogram, Histogram, Sequence};

/// A string of bits, most significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new() -> Self {
        BitString::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    pub fn extend(&mut self, other: &BitString) {
        self.0.extend_from_slice(&other.0);
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        BitString(bits)
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(Error::InvalidParameter(format!("bad bit {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(BitString)
    }
}

/// Prefix-free code for the symbols with nonzero count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeBook {
    ns: u32,
    /// `(symbol, codeword)` sorted by symbol
    codes: Vec<(u32, BitString)>,
}

impl CodeBook {
    pub fn ns(&self) -> u32 {
        self.ns
    }

    pub fn get(&self, symbol: u32) -> Option<&BitString> {
        self.codes
            .binary_search_by_key(&symbol, |(s, _)| *s)
            .ok()
            .map(|i| &self.codes[i].1)
    }

    /// `(symbol, codeword)` pairs in symbol order.
    pub fn iter(&self) -> impl Iterator<Item = (u32, &BitString)> {
        self.codes.iter().map(|(s, c)| (*s, c))
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    /// Bits needed to encode any sequence with this histogram.
    pub fn encoded_len(&self, hist: &Histogram) -> Result<u64> {
        let mut bits = 0u64;
        for (i, &c) in hist.counts().iter().enumerate().filter(|(_, &c)| c > 0) {
            let symbol = i as u32 + 1;
            let code = self.get(symbol).ok_or(Error::MissingSymbol(symbol))?;
            bits += c as u64 * code.len() as u64;
        }
        Ok(bits)
    }

    /// Exact check of `Σ 2^-len = 1`.
    pub fn satisfies_kraft_equality(&self) -> bool {
        let Some(max) = self.codes.iter().map(|(_, c)| c.len()).max() else {
            return false;
        };
        let sum: BigUint = self
            .codes
            .iter()
            .map(|(_, c)| BigUint::one() << (max - c.len()))
            .sum();
        sum == BigUint::one() << max
    }

    pub fn is_prefix_free(&self) -> bool {
        let mut words: Vec<&[bool]> = self.codes.iter().map(|(_, c)| c.bits()).collect();
        words.sort();
        // a prefix sorts immediately before some word it prefixes
        words.windows(2).all(|w| !w[1].starts_with(w[0]))
    }
}

/// Canonical Huffman code for the nonzero counts of `hist`.
///
/// Nodes are merged smallest `(weight, smallest contained symbol)` first;
/// codewords are then assigned in `(length, symbol)` order. A lone symbol
/// gets the one-bit codeword `0`.
pub fn build_code(hist: &Histogram) -> Result<CodeBook> {
    let lengths = code_lengths(hist)?;
    Ok(CodeBook {
        ns: hist.ns(),
        codes: canonical_codes(&lengths),
    })
}

/// `(symbol, code length)` for every symbol with a nonzero count.
fn code_lengths(hist: &Histogram) -> Result<Vec<(u32, usize)>> {
    let present: Vec<(u32, u64)> = hist
        .counts()
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| (i as u32 + 1, c as u64))
        .collect();
    match present.len() {
        0 => return Err(Error::EmptyHistogram),
        1 => return Ok(vec![(present[0].0, 1)]),
        _ => {}
    }

    // leaves are nodes 0..k; internal nodes are appended
    let mut parent: Vec<usize> = vec![usize::MAX; present.len()];
    let mut heap: BinaryHeap<Reverse<(u64, u32, usize)>> = present
        .iter()
        .enumerate()
        .map(|(node, &(symbol, count))| Reverse((count, symbol, node)))
        .collect();
    while heap.len() > 1 {
        let Reverse((w1, s1, a)) = heap.pop().expect("len > 1");
        let Reverse((w2, s2, b)) = heap.pop().expect("len > 1");
        let node = parent.len();
        parent.push(usize::MAX);
        parent[a] = node;
        parent[b] = node;
        heap.push(Reverse((w1 + w2, s1.min(s2), node)));
    }

    // parents always have larger ids, so depths resolve from the root down
    let mut depth = vec![0usize; parent.len()];
    for node in (0..parent.len()).rev() {
        if parent[node] != usize::MAX {
            depth[node] = depth[parent[node]] + 1;
        }
    }
    Ok(present
        .iter()
        .enumerate()
        .map(|(node, &(symbol, _))| (symbol, depth[node]))
        .collect())
}

fn canonical_codes(lengths: &[(u32, usize)]) -> Vec<(u32, BitString)> {
    let mut by_length = lengths.to_vec();
    by_length.sort_by_key(|&(symbol, len)| (len, symbol));
    let mut codes = Vec::with_capacity(by_length.len());
    let mut word: Vec<bool> = Vec::new();
    for (i, &(symbol, len)) in by_length.iter().enumerate() {
        if i == 0 {
            word = vec![false; len];
        } else {
            increment(&mut word);
            word.resize(len, false);
        }
        codes.push((symbol, BitString(word.clone())));
    }
    codes.sort_by_key(|(symbol, _)| *symbol);
    codes
}

fn increment(word: &mut [bool]) {
    for bit in word.iter_mut().rev() {
        if *bit {
            *bit = false;
        } else {
            *bit = true;
            return;
        }
    }
    unreachable!("canonical code space exhausted");
}

pub fn encode(seq: &Sequence, code: &CodeBook) -> Result<BitString> {
    let mut out = BitString::new();
    for &s in seq.symbols() {
        out.extend(code.get(s).ok_or(Error::MissingSymbol(s))?);
    }
    Ok(out)
}

pub fn decode(bits: &BitString, code: &CodeBook) -> Result<Sequence> {
    let trie = DecodeTrie::new(code);
    let mut symbols = Vec::new();
    let mut node = 0usize;
    for (i, &bit) in bits.bits().iter().enumerate() {
        match trie.step(node, bit) {
            Step::Symbol(s) => {
                symbols.push(s);
                node = 0;
            }
            Step::Inner(next) => node = next,
            Step::Dead => {
                return Err(Error::Decode(format!("no codeword matches at bit {i}")));
            }
        }
    }
    if node != 0 {
        return Err(Error::Decode("dangling bits at end of input".into()));
    }
    Sequence::new(symbols, code.ns())
}

enum Step {
    Symbol(u32),
    Inner(usize),
    Dead,
}

#[derive(Clone, Copy)]
enum Link {
    None,
    Inner(usize),
    Leaf(u32),
}

struct DecodeTrie {
    nodes: Vec<[Link; 2]>,
}

impl DecodeTrie {
    fn new(code: &CodeBook) -> Self {
        let mut nodes = vec![[Link::None; 2]];
        for (symbol, word) in code.iter() {
            let bits = word.bits();
            let mut node = 0;
            for (i, &bit) in bits.iter().enumerate() {
                let b = bit as usize;
                if i + 1 == bits.len() {
                    nodes[node][b] = Link::Leaf(symbol);
                } else {
                    node = match nodes[node][b] {
                        Link::Inner(next) => next,
                        _ => {
                            nodes.push([Link::None; 2]);
                            let next = nodes.len() - 1;
                            nodes[node][b] = Link::Inner(next);
                            next
                        }
                    };
                }
            }
        }
        DecodeTrie { nodes }
    }

    fn step(&self, node: usize, bit: bool) -> Step {
        match self.nodes[node][bit as usize] {
            Link::None => Step::Dead,
            Link::Inner(next) => Step::Inner(next),
            Link::Leaf(s) => Step::Symbol(s),
        }
    }
}

/// Length in bits of `seq` encoded with the Huffman code of its own histogram.
pub fn self_encoded_length(seq: &Sequence) -> Result<u64> {
    let code = build_code(&empirical_histogram(seq)?)?;
    Ok(encode(seq, &code)?.len() as u64)
}
