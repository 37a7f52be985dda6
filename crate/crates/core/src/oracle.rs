//! Brute-force ground truth for small alphabets and lengths.
//!
//! [`build_table`] materializes the explicit correspondence table by sorting
//! raw sequences, without going through type classes or the shaped index, so
//! agreement with [`Shaper`] is independent evidence that the table-free
//! transform is right.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::io::Write;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::huffman::build_code;
use crate::seqcore::{check_alphabet, coding_limit, Sequence};
use crate::shaping::{Shaper, ShapingParams};
use crate::typespace::{IndexCache, ShapedIndex};

/// Largest `ns^N` the oracle will enumerate.
pub const MAX_INPUTS: u64 = 1_000_000;
/// Largest `ns^(N+K)` the oracle will sort.
pub const MAX_OUTPUTS: u64 = 10_000_000;
/// Largest `ns^N` for [`exhaustive_stats`].
pub const MAX_STATS_INPUTS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrespondenceTable {
    pub ns: u32,
    pub n: usize,
    pub k: usize,
    /// `(x, y)` with `x` in lexicographic order.
    pub rows: Vec<(Sequence, Sequence)>,
}

impl CorrespondenceTable {
    /// Writes one `x,y` line per row, symbols space-separated.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "x,y")?;
        for (x, y) in &self.rows {
            writeln!(out, "{x},{y}")?;
        }
        Ok(())
    }
}

fn checked_power(ns: u32, len: usize, limit: u64, what: &str) -> Result<u64> {
    let count = BigUint::from(ns).pow(len as u32);
    match count.to_u64() {
        Some(c) if c <= limit => Ok(c),
        _ => Err(Error::ScaleGuard(format!(
            "{what}: {ns}^{len} = {count} exceeds {limit}"
        ))),
    }
}

fn check_params(ns: u32, n: usize, k: usize) -> Result<()> {
    check_alphabet(ns)?;
    if ns < 2 || n == 0 || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "need ns >= 2, N >= 1, K >= 1 (got ns={ns}, N={n}, K={k})"
        )));
    }
    Ok(())
}

/// Every sequence of length `len` over `ns` symbols, lexicographically.
fn all_sequences(ns: u32, len: usize) -> impl Iterator<Item = Vec<u32>> {
    let mut current = Some(vec![1u32; len]);
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let next = current.as_mut().expect("checked above");
        match next.iter().rposition(|&s| s < ns) {
            Some(i) => {
                next[i] += 1;
                next[i + 1..].fill(1);
            }
            None => current = None,
        }
        Some(out)
    })
}

struct SortKey {
    weight: BigUint,
    counts: Vec<usize>,
    symbols: Vec<u32>,
}

impl SortKey {
    fn new(symbols: Vec<u32>, ns: u32) -> Self {
        let mut counts = vec![0usize; ns as usize];
        for &s in &symbols {
            counts[s as usize - 1] += 1;
        }
        let mut weight = BigUint::one();
        for &c in &counts {
            for _ in 0..c {
                weight *= c;
            }
        }
        SortKey {
            weight,
            counts,
            symbols,
        }
    }

    fn cmp(&self, other: &Self) -> Ordering {
        other
            .weight
            .cmp(&self.weight)
            .then_with(|| other.counts.cmp(&self.counts))
            .then_with(|| self.symbols.cmp(&other.symbols))
    }
}

/// The explicit table pairing `X^N` in lexicographic order with the first
/// `ns^N` sequences of length `N + K` in shaping order.
pub fn build_table(ns: u32, n: usize, k: usize) -> Result<CorrespondenceTable> {
    check_params(ns, n, k)?;
    let inputs = checked_power(ns, n, MAX_INPUTS, "inputs")?;
    checked_power(ns, n + k, MAX_OUTPUTS, "outputs")?;

    let mut keys: Vec<SortKey> = all_sequences(ns, n + k)
        .map(|s| SortKey::new(s, ns))
        .collect();
    keys.sort_by(SortKey::cmp);
    keys.truncate(inputs as usize);

    let rows = all_sequences(ns, n)
        .zip(keys)
        .map(|(x, key)| {
            (
                Sequence::from_raw(x, ns),
                Sequence::from_raw(key.symbols, ns),
            )
        })
        .collect();
    Ok(CorrespondenceTable { ns, n, k, rows })
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BijectionReport {
    pub rows: usize,
    /// Rows where `shape(x) != y`.
    pub shape_mismatches: usize,
    /// Rows where `unshape(y) != x`.
    pub unshape_mismatches: usize,
    /// Sequences of length `N + K` outside the table.
    pub non_image_checked: usize,
    /// Non-image sequences that `unshape` failed to reject with
    /// `NotInShapedSet`.
    pub non_image_accepted: usize,
    /// First disagreement, for diagnostics.
    pub first_failure: Option<String>,
}

impl BijectionReport {
    pub fn passed(&self) -> bool {
        self.rows > 0
            && self.shape_mismatches == 0
            && self.unshape_mismatches == 0
            && self.non_image_accepted == 0
    }
}

/// Checks the table-free transform against [`build_table`] on every row and
/// checks that every sequence outside the table is rejected.
pub fn verify_bijection(ns: u32, n: usize, k: usize) -> Result<BijectionReport> {
    let table = build_table(ns, n, k)?;
    let params = ShapingParams::new(ns, n).with_k(k);
    let shaper = Shaper::new(params, &IndexCache::new())?;
    Ok(verify_against(&table, &shaper))
}

pub fn verify_against(table: &CorrespondenceTable, shaper: &Shaper) -> BijectionReport {
    let mut report = BijectionReport {
        rows: table.rows.len(),
        ..Default::default()
    };
    let note = |msg: String, report: &mut BijectionReport| {
        report.first_failure.get_or_insert(msg);
    };
    for (x, y) in &table.rows {
        match shaper.shape(x) {
            Ok(got) if &got == y => {}
            other => {
                report.shape_mismatches += 1;
                note(format!("shape({x}) = {other:?}, table has {y}"), &mut report);
            }
        }
        match shaper.unshape(y) {
            Ok(got) if &got == x => {}
            other => {
                report.unshape_mismatches += 1;
                note(format!("unshape({y}) = {other:?}, table has {x}"), &mut report);
            }
        }
    }
    let image: HashSet<&[u32]> = table.rows.iter().map(|(_, y)| y.symbols()).collect();
    for symbols in all_sequences(table.ns, table.n + table.k) {
        if image.contains(symbols.as_slice()) {
            continue;
        }
        report.non_image_checked += 1;
        let z = Sequence::from_raw(symbols, table.ns);
        match shaper.unshape(&z) {
            Err(Error::NotInShapedSet { .. }) => {}
            other => {
                report.non_image_accepted += 1;
                note(format!("unshape({z}) = {other:?}, expected NotInShapedSet"), &mut report);
            }
        }
    }
    report
}

/// Exact statistics over all of `X^N` with uniform weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExhaustiveStats {
    pub ns: u32,
    pub n: usize,
    pub k: usize,
    pub inputs: u64,
    /// Mean `Lc(x)` over `X^N`.
    pub mean_lc_x: f64,
    /// Mean `Lc(y)` over the image `Y^(N+K)`.
    pub mean_lc_y: f64,
    /// Mean self-encoded Huffman length over the image.
    pub mean_code_len_y: f64,
    /// Inputs whose shaped sequence encodes strictly below `Lc(x)`.
    pub successes: u64,
    pub success_fraction: f64,
}

impl ExhaustiveStats {
    pub fn delta(&self) -> f64 {
        self.mean_lc_y - self.mean_lc_x
    }
}

/// Exact means and success fraction over every input, computed by walking the
/// shaped order alongside the lexicographic order of `X^N`.
///
/// Image sequences of one type share `Lc` and Huffman length, so only the type
/// of each `f(x)` is needed; `x` itself is visited explicitly.
pub fn exhaustive_stats(ns: u32, n: usize, k: usize, budget: u64) -> Result<ExhaustiveStats> {
    check_params(ns, n, k)?;
    let inputs = checked_power(ns, n, MAX_STATS_INPUTS, "inputs")?;
    let index = ShapedIndex::build(n + k, ns, budget)?;
    Ok(stats_with_index(ns, n, k, inputs, &index))
}

fn stats_with_index(ns: u32, n: usize, k: usize, inputs: u64, index: &ShapedIndex) -> ExhaustiveStats {
    let mut sum_x = 0.0;
    let mut sum_y = 0.0;
    let mut sum_code = 0.0;
    let mut successes = 0u64;

    let mut pos = 0usize;
    let mut left_in_class = 0u64;
    let (mut type_lc, mut type_code) = (0.0, 0u64);
    let cap = BigUint::from(inputs);

    for x in all_sequences(ns, n) {
        while left_in_class == 0 {
            let hist = index.histogram(pos);
            let size = index.class_size(pos).min(cap.clone());
            left_in_class = size.to_u64().expect("bounded by inputs");
            type_lc = crate::seqcore::type_coding_limit(&hist).expect("non-empty");
            type_code = build_code(&hist)
                .and_then(|c| c.encoded_len(&hist))
                .expect("non-empty");
            pos += 1;
        }
        left_in_class -= 1;

        let lc_x = coding_limit(&Sequence::from_raw(x, ns)).expect("non-empty");
        sum_x += lc_x;
        sum_y += type_lc;
        sum_code += type_code as f64;
        successes += ((type_code as f64) < lc_x) as u64;
    }

    let count = inputs as f64;
    ExhaustiveStats {
        ns,
        n,
        k,
        inputs,
        mean_lc_x: sum_x / count,
        mean_lc_y: sum_y / count,
        mean_code_len_y: sum_code / count,
        successes,
        success_fraction: successes as f64 / count,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::huffman::self_encoded_length;
    use crate::typespace::DEFAULT_BUDGET;

    fn seq(text: &str, ns: u32) -> Sequence {
        Sequence::parse(text, ns).unwrap()
    }

    #[test]
    fn table_examples() {
        let t = build_table(3, 2, 1).unwrap();
        assert_eq!(t.rows.len(), 9);
        assert_eq!(t.rows[0], (seq("1 1", 3), seq("1 1 1", 3)));
        assert!(t.rows.iter().all(|(_, y)| {
            let mut s = y.symbols().to_vec();
            s.sort();
            s != [1, 2, 3]
        }));
        let t = build_table(2, 3, 1).unwrap();
        assert_eq!(t.rows.len(), 8);
        let distinct: HashSet<_> = t.rows.iter().map(|(_, y)| y.clone()).collect();
        assert_eq!(distinct.len(), 8);
    }

    #[test]
    fn y_column_is_monotone_in_shaping_order() {
        let t = build_table(4, 3, 1).unwrap();
        let keys: Vec<SortKey> = t
            .rows
            .iter()
            .map(|(_, y)| SortKey::new(y.symbols().to_vec(), 4))
            .collect();
        assert!(keys.windows(2).all(|w| w[0].cmp(&w[1]) == Ordering::Less));
    }

    #[test]
    fn scale_guards() {
        assert!(matches!(build_table(10, 7, 1), Err(Error::ScaleGuard(_))));
        assert!(matches!(build_table(3, 13, 2), Err(Error::ScaleGuard(_))));
        assert!(matches!(
            exhaustive_stats(10, 8, 1, DEFAULT_BUDGET),
            Err(Error::ScaleGuard(_))
        ));
        assert!(build_table(1, 3, 1).is_err());
    }

    #[test]
    fn verify_small_grid() {
        for (ns, n, k) in [(3, 2, 1), (4, 4, 1), (2, 6, 1), (3, 3, 2)] {
            let report = verify_bijection(ns, n, k).unwrap();
            assert!(report.passed(), "{ns},{n},{k}: {report:?}");
            assert_eq!(report.rows as u64, (ns as u64).pow(n as u32));
            assert_eq!(
                (report.rows + report.non_image_checked) as u64,
                (ns as u64).pow((n + k) as u32)
            );
        }
    }

    #[test]
    fn verify_detects_a_wrong_table() {
        let mut table = build_table(3, 2, 1).unwrap();
        let y1 = table.rows[1].1.clone();
        table.rows[1].1 = std::mem::replace(&mut table.rows[2].1, y1);
        let shaper = Shaper::new(ShapingParams::new(3, 2), &IndexCache::new()).unwrap();
        let report = verify_against(&table, &shaper);
        assert!(!report.passed());
        assert_eq!(report.shape_mismatches, 2);
        assert!(report.first_failure.is_some());
    }

    /// The same statistics straight from the explicit table.
    fn stats_from_table(t: &CorrespondenceTable) -> (f64, f64, f64) {
        let count = t.rows.len() as f64;
        let (mut sx, mut sy, mut wins) = (0.0, 0.0, 0.0);
        for (x, y) in &t.rows {
            let lc_x = coding_limit(x).unwrap();
            sx += lc_x;
            sy += coding_limit(y).unwrap();
            if (self_encoded_length(y).unwrap() as f64) < lc_x {
                wins += 1.0;
            }
        }
        (sx / count, sy / count, wins / count)
    }

    #[test]
    fn stats_match_table_statistics() {
        for (ns, n, k) in [(3, 2, 1), (3, 4, 1), (4, 3, 1), (2, 7, 2), (5, 3, 1)] {
            let stats = exhaustive_stats(ns, n, k, DEFAULT_BUDGET).unwrap();
            let (mx, my, frac) = stats_from_table(&build_table(ns, n, k).unwrap());
            assert!((stats.mean_lc_x - mx).abs() < 1e-9);
            assert!((stats.mean_lc_y - my).abs() < 1e-9);
            assert!((stats.success_fraction - frac).abs() < 1e-12);
        }
    }

    #[test]
    fn stats_examples() {
        let s = exhaustive_stats(3, 2, 1, DEFAULT_BUDGET).unwrap();
        assert!((s.mean_lc_x - 4.0 / 3.0).abs() < 1e-12);
        assert!((s.mean_lc_y - 1.836592).abs() < 1e-6);
        assert!((s.delta() - 0.503259).abs() < 1e-6);

        for ns in 2..6 {
            let s = exhaustive_stats(ns, 1, 1, DEFAULT_BUDGET).unwrap();
            assert_eq!(s.mean_lc_x, 0.0);
            assert_eq!(s.successes, 0);
        }
    }

    #[test]
    fn csv_dump() {
        let mut out = Vec::new();
        build_table(2, 1, 1).unwrap().write_csv(&mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "x,y\n1,1 1\n2,2 2\n");
    }
}
