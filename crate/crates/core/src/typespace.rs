//! Type classes of length-`n` strings over `ns` symbols and the shaped index.
//!
//! Types are ordered by the exact weight key `W = Π c_i^c_i` descending, which
//! for a fixed length is the same as the coding limit ascending, since
//! `Lc = n log2 n - log2 W`. Equal weights are broken by histogram in
//! descending lexicographic order. The [`ShapedIndex`] stores that order
//! together with the big-integer prefix sums of class sizes, so a shaped rank
//! is located by binary search.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seqcore::{check_alphabet, Histogram};
use crate::wide::{self, WideTable};

/// Default cap on the number of type classes an index may hold.
pub const DEFAULT_BUDGET: u64 = 20_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "SST_BUDGET";

/// Rough ceiling on index memory; larger builds fail with a scale guard error.
const INDEX_MEMORY_LIMIT: u128 = 4 << 30;

/// Budget from `SST_BUDGET`, falling back to [`DEFAULT_BUDGET`].
pub fn budget_from_env() -> Result<u64> {
    match std::env::var(BUDGET_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParameter(format!("{BUDGET_ENV}={v:?} is not an integer"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

/// `C(n + ns - 1, ns - 1)`, the number of compositions of `n` into `ns` parts.
pub fn type_count(n: usize, ns: u32) -> BigUint {
    binomial_big(n + ns as usize - 1, ns as usize - 1)
}

fn binomial_big(m: usize, k: usize) -> BigUint {
    if k > m {
        return BigUint::zero();
    }
    let k = k.min(m - k);
    let mut acc = BigUint::one();
    for i in 1..=k {
        acc *= m - k + i;
        acc /= i;
    }
    acc
}

/// Binomial known to fit in `u64` (guaranteed by the budget check).
fn binomial_u64(m: usize, k: usize) -> u64 {
    if k > m {
        return 0;
    }
    let k = k.min(m - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (m - k + i) as u128 / i as u128;
    }
    u64::try_from(acc).expect("binomial exceeds u64")
}

/// Iterator over all compositions of `n` into `ns` parts, in descending
/// lexicographic order: `(n,0,..,0)` first, `(0,..,0,n)` last.
#[derive(Debug, Clone)]
pub struct Compositions {
    current: Option<Vec<usize>>,
}

impl Iterator for Compositions {
    type Item = Histogram;

    fn next(&mut self) -> Option<Histogram> {
        let counts = self.current.as_mut()?;
        let out = counts.clone();
        if !advance_composition(counts) {
            self.current = None;
        }
        Some(Histogram::new(out).expect("alphabet checked"))
    }
}

/// Steps to the next composition in descending lexicographic order.
fn advance_composition(counts: &mut [usize]) -> bool {
    let last = counts.len() - 1;
    let Some(i) = (0..last).rev().find(|&i| counts[i] > 0) else {
        return false;
    };
    let tail: usize = counts[i + 1..].iter().sum();
    counts[i] -= 1;
    counts[i + 1] = tail + 1;
    for c in &mut counts[i + 2..] {
        *c = 0;
    }
    true
}

pub fn enumerate_types(n: usize, ns: u32) -> Result<Compositions> {
    check_alphabet(ns)?;
    if n == 0 {
        return Err(Error::InvalidParameter("length must be positive".into()));
    }
    let mut first = vec![0; ns as usize];
    first[0] = n;
    Ok(Compositions {
        current: Some(first),
    })
}

/// Position of `hist` among the compositions of its total, in the order of
/// [`enumerate_types`].
pub fn composition_rank(hist: &Histogram) -> u64 {
    let counts = hist.counts();
    let ns = counts.len();
    let mut remaining = hist.total();
    let mut rank = 0u64;
    for (i, &c) in counts.iter().enumerate().take(ns - 1) {
        let parts_left = ns - i;
        if remaining > c {
            // compositions of `remaining` into `parts_left` parts whose first part exceeds c
            rank += binomial_u64(remaining - c + parts_left - 2, parts_left - 1);
        }
        remaining -= c;
    }
    rank
}

/// Inverse of [`composition_rank`].
pub fn composition_unrank(mut rank: u64, n: usize, ns: u32) -> Histogram {
    let ns = ns as usize;
    let mut counts = vec![0usize; ns];
    let mut remaining = n;
    for (i, slot) in counts.iter_mut().enumerate().take(ns - 1) {
        let parts_after = ns - i - 1;
        let mut v = remaining;
        loop {
            // compositions of the rest into `parts_after` parts
            let block = binomial_u64(remaining - v + parts_after - 1, parts_after - 1);
            if rank < block {
                break;
            }
            rank -= block;
            v -= 1;
        }
        *slot = v;
        remaining -= v;
    }
    counts[ns - 1] = remaining;
    Histogram::new(counts).expect("alphabet checked")
}

/// Multinomial coefficient `n! / Π c_i!`, the number of sequences of a type.
pub fn type_class_size(hist: &Histogram) -> BigUint {
    let mut size = BigUint::one();
    let mut m = 0usize;
    for &c in hist.counts() {
        for j in 1..=c {
            m += 1;
            size *= m;
            size /= j;
        }
    }
    size
}

/// Exact ordering key `W = Π c_i^c_i` over nonzero counts.
pub fn weight_key(hist: &Histogram) -> BigUint {
    hist.counts()
        .iter()
        .filter(|&&c| c > 0)
        .fold(BigUint::one(), |acc, &c| acc * BigUint::from(c).pow(c as u32))
}

/// The shaping order on types of equal length: `Less` means `a` comes first.
pub fn shaping_cmp(a: &Histogram, b: &Histogram) -> Ordering {
    weight_key(b)
        .cmp(&weight_key(a))
        .then_with(|| b.counts().cmp(a.counts()))
}

/// Entropy-ordered table of every type of length `n` over `ns` symbols.
///
/// Entry `p` of the index is the `p`-th type in shaping order; sequences of
/// that type occupy shaped ranks `cumulative(p) .. cumulative(p + 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapedIndex {
    n: usize,
    ns: u32,
    /// shaping position -> composition rank
    order: Vec<u32>,
    /// composition rank -> shaping position
    position: Vec<u32>,
    /// `len() + 1` exclusive prefix sums of class sizes
    cumulative: WideTable,
}

impl ShapedIndex {
    pub fn build(n: usize, ns: u32, budget: u64) -> Result<Self> {
        check_alphabet(ns)?;
        if n == 0 {
            return Err(Error::InvalidParameter("length must be positive".into()));
        }
        let types = type_count(n, ns);
        if types > BigUint::from(budget) {
            return Err(Error::BudgetExceeded { types, budget });
        }
        let count = types
            .to_u32()
            .ok_or_else(|| Error::ScaleGuard(format!("{types} types exceed 32-bit indexing")))?
            as usize;

        let total = BigUint::from(ns).pow(n as u32);
        let size_width = wide::limbs_for(&total);
        let key_width = wide::limbs_for(&BigUint::from(n).pow(n as u32));
        let bytes = count as u128 * (8 + 8 * (2 * size_width + key_width) as u128);
        if bytes > INDEX_MEMORY_LIMIT {
            return Err(Error::ScaleGuard(format!(
                "index for n={n}, ns={ns} needs about {} MiB",
                bytes >> 20
            )));
        }

        let (keys, sizes) = type_tables(n, ns as usize, count, key_width, size_width);

        let mut order: Vec<u32> = (0..count as u32).collect();
        order.par_sort_unstable_by(|&a, &b| {
            wide::cmp(keys.get(b as usize), keys.get(a as usize)).then(a.cmp(&b))
        });
        drop(keys);

        let mut position = vec![0u32; count];
        for (p, &id) in order.iter().enumerate() {
            position[id as usize] = p as u32;
        }

        let mut cumulative = WideTable::with_capacity(size_width, count + 1);
        let mut running = vec![0u64; size_width];
        cumulative.push(&running);
        for &id in &order {
            wide::add_assign(&mut running, sizes.get(id as usize));
            cumulative.push(&running);
        }
        debug_assert_eq!(wide::to_biguint(&running), total);

        Ok(ShapedIndex {
            n,
            ns,
            order,
            position,
            cumulative,
        })
    }

    /// Sequence length covered by this index.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ns(&self) -> u32 {
        self.ns
    }

    /// Number of types.
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `ns^n`, the sum of all class sizes.
    pub fn total(&self) -> BigUint {
        wide::to_biguint(self.cumulative.get(self.len()))
    }

    pub fn histogram(&self, pos: usize) -> Histogram {
        composition_unrank(self.order[pos] as u64, self.n, self.ns)
    }

    /// Number of sequences whose type precedes entry `pos`.
    pub fn cumulative_before(&self, pos: usize) -> BigUint {
        wide::to_biguint(self.cumulative.get(pos))
    }

    pub fn class_size(&self, pos: usize) -> BigUint {
        self.cumulative_before(pos + 1) - self.cumulative_before(pos)
    }

    /// Shaping position of a type of this index's length and alphabet.
    pub fn position_of(&self, hist: &Histogram) -> Result<usize> {
        if hist.ns() != self.ns {
            return Err(Error::AlphabetMismatch {
                expected: self.ns,
                actual: hist.ns(),
            });
        }
        if hist.total() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: hist.total(),
            });
        }
        Ok(self.position[composition_rank(hist) as usize] as usize)
    }

    /// Finds the entry containing shaped rank `rank` and the offset of `rank`
    /// within that type class.
    pub fn locate(&self, rank: &BigUint) -> Result<(usize, BigUint)> {
        let target = wide::from_biguint(rank, self.cumulative.width())
            .filter(|t| wide::cmp(t, self.cumulative.get(self.len())) == Ordering::Less)
            .ok_or_else(|| Error::RankOutOfRange {
                rank: rank.clone(),
                bound: self.total(),
            })?;
        // first boundary strictly above the rank, minus one
        let (mut lo, mut hi) = (0usize, self.len());
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if wide::cmp(self.cumulative.get(mid + 1), &target) == Ordering::Greater {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        let offset = rank - self.cumulative_before(lo);
        Ok((lo, offset))
    }

    /// `(histogram, class size)` pairs in shaping order.
    pub fn entries(&self) -> impl Iterator<Item = (Histogram, BigUint)> + '_ {
        (0..self.len()).map(|p| (self.histogram(p), self.class_size(p)))
    }

    /// Serializes the index in a versioned little-endian binary format.
    pub fn write_cache<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(CACHE_MAGIC)?;
        out.write_all(&CACHE_VERSION.to_le_bytes())?;
        out.write_all(&(self.n as u64).to_le_bytes())?;
        out.write_all(&self.ns.to_le_bytes())?;
        out.write_all(&(self.len() as u64).to_le_bytes())?;
        out.write_all(&(self.cumulative.width() as u32).to_le_bytes())?;
        for &id in &self.order {
            out.write_all(&id.to_le_bytes())?;
        }
        for &limb in self.cumulative.raw() {
            out.write_all(&limb.to_le_bytes())?;
        }
        out.flush()?;
        Ok(())
    }

    /// Reads an index written by [`ShapedIndex::write_cache`], checking that
    /// it is internally consistent.
    pub fn read_cache<R: Read>(mut input: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        input.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Cache("bad magic".into()));
        }
        let version = read_u32(&mut input)?;
        if version != CACHE_VERSION {
            return Err(Error::Cache(format!("unsupported version {version}")));
        }
        let n = read_u64(&mut input)? as usize;
        let ns = read_u32(&mut input)?;
        let count = read_u64(&mut input)? as usize;
        let width = read_u32(&mut input)? as usize;
        check_alphabet(ns).map_err(|e| Error::Cache(e.to_string()))?;
        if n == 0 || BigUint::from(count) != type_count(n, ns) {
            return Err(Error::Cache("type count does not match header".into()));
        }
        let total = BigUint::from(ns).pow(n as u32);
        if width != wide::limbs_for(&total) {
            return Err(Error::Cache("limb width does not match header".into()));
        }

        let mut order = Vec::with_capacity(count);
        let mut position = vec![u32::MAX; count];
        for p in 0..count {
            let id = read_u32(&mut input)?;
            let slot = position
                .get_mut(id as usize)
                .filter(|s| **s == u32::MAX)
                .ok_or_else(|| Error::Cache("order is not a permutation".into()))?;
            *slot = p as u32;
            order.push(id);
        }
        let mut limbs = vec![0u64; width * (count + 1)];
        for limb in limbs.iter_mut() {
            *limb = read_u64(&mut input)?;
        }
        let cumulative = WideTable::from_limbs(width, limbs);
        let monotone = (0..count)
            .all(|p| wide::cmp(cumulative.get(p), cumulative.get(p + 1)) == Ordering::Less);
        if !monotone
            || !wide::to_biguint(cumulative.get(0)).is_zero()
            || wide::to_biguint(cumulative.get(count)) != total
        {
            return Err(Error::Cache("prefix sums are inconsistent".into()));
        }
        Ok(ShapedIndex {
            n,
            ns,
            order,
            position,
            cumulative,
        })
    }
}

const CACHE_MAGIC: &[u8; 8] = b"SSTIDX\0\0";
const CACHE_VERSION: u32 = 1;

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

/// Weight keys and class sizes for every composition, indexed by composition
/// rank.
fn type_tables(
    n: usize,
    ns: usize,
    count: usize,
    key_width: usize,
    size_width: usize,
) -> (WideTable, WideTable) {
    // c^c as a single factor while it fits in a u64
    let self_powers: Vec<Option<u64>> = (0..=n)
        .map(|c| (c as u64).checked_pow(c as u32))
        .collect();
    let pascal = PascalRows::new(n);

    let mut keys = WideTable::with_capacity(key_width, count);
    let mut sizes = WideTable::with_capacity(size_width, count);
    let mut key = vec![0u64; key_width];
    let mut size = vec![0u64; size_width];
    let mut counts = vec![0usize; ns];
    counts[0] = n;
    loop {
        key.fill(0);
        key[0] = 1;
        for &c in counts.iter().filter(|&&c| c > 1) {
            match self_powers[c] {
                Some(p) => wide::mul_small(&mut key, p),
                None => (0..c).for_each(|_| wide::mul_small(&mut key, c as u64)),
            }
        }
        keys.push(&key);

        match &pascal {
            Some(rows) => {
                size.fill(0);
                size[0] = 1;
                let mut m = 0;
                for &c in &counts {
                    m += c;
                    if c > 0 && c < m {
                        wide::mul_small(&mut size, rows.get(m, c));
                    }
                }
                sizes.push(&size);
            }
            None => {
                let hist = Histogram::new(counts.clone()).expect("alphabet checked");
                let big = wide::from_biguint(&type_class_size(&hist), size_width)
                    .expect("class size bounded by ns^n");
                sizes.push(&big);
            }
        }

        if !advance_composition(&mut counts) {
            break;
        }
    }
    debug_assert_eq!(keys.len(), count);
    (keys, sizes)
}

/// Binomials `C(m, k)` for `m <= n`, available when all of them fit in a u64.
struct PascalRows {
    rows: Vec<Vec<u64>>,
}

impl PascalRows {
    fn new(n: usize) -> Option<Self> {
        if n > 67 {
            return None;
        }
        let mut rows: Vec<Vec<u64>> = vec![vec![1]];
        for m in 1..=n {
            let prev = &rows[m - 1];
            let mut row = vec![1u64; m + 1];
            for k in 1..m {
                row[k] = prev[k - 1].checked_add(prev[k])?;
            }
            rows.push(row);
        }
        Some(PascalRows { rows })
    }

    fn get(&self, m: usize, k: usize) -> u64 {
        self.rows[m][k]
    }
}

/// Process-wide cache of built indexes keyed by `(n, ns)`, optionally backed
/// by a directory of cache files.
#[derive(Debug, Default)]
pub struct IndexCache {
    dir: Option<PathBuf>,
    built: Mutex<HashMap<(usize, u32), Arc<ShapedIndex>>>,
}

impl IndexCache {
    pub fn new() -> Self {
        IndexCache::default()
    }

    /// Cache that also loads and stores index files under `dir`.
    pub fn with_dir(dir: impl Into<PathBuf>) -> Self {
        IndexCache {
            dir: Some(dir.into()),
            built: Mutex::default(),
        }
    }

    pub fn get(&self, n: usize, ns: u32, budget: u64) -> Result<Arc<ShapedIndex>> {
        let types = type_count(n.max(1), ns.max(1));
        if types > BigUint::from(budget) {
            return Err(Error::BudgetExceeded { types, budget });
        }
        let mut built = self.built.lock().expect("index cache poisoned");
        if let Some(index) = built.get(&(n, ns)) {
            return Ok(Arc::clone(index));
        }
        let index = Arc::new(self.load_or_build(n, ns, budget)?);
        built.insert((n, ns), Arc::clone(&index));
        Ok(index)
    }

    fn load_or_build(&self, n: usize, ns: u32, budget: u64) -> Result<ShapedIndex> {
        let Some(dir) = &self.dir else {
            return ShapedIndex::build(n, ns, budget);
        };
        let path = dir.join(format!("shaped-n{n}-ns{ns}.idx"));
        if let Ok(file) = std::fs::File::open(&path) {
            let index = ShapedIndex::read_cache(std::io::BufReader::new(file))?;
            if index.n() == n && index.ns() == ns {
                return Ok(index);
            }
        }
        let index = ShapedIndex::build(n, ns, budget)?;
        std::fs::create_dir_all(dir)?;
        let tmp = path.with_extension("tmp");
        index.write_cache(std::io::BufWriter::new(std::fs::File::create(&tmp)?))?;
        std::fs::rename(tmp, path)?;
        Ok(index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hist(counts: &[usize]) -> Histogram {
        Histogram::new(counts.to_vec()).unwrap()
    }

    #[test]
    fn enumerates_compositions_in_descending_order() {
        let all: Vec<_> = enumerate_types(2, 2).unwrap().collect();
        assert_eq!(all, vec![hist(&[2, 0]), hist(&[1, 1]), hist(&[0, 2])]);
        assert_eq!(enumerate_types(3, 3).unwrap().count(), 10);
        let all: Vec<_> = enumerate_types(4, 4).unwrap().collect();
        assert!(all.windows(2).all(|w| w[0].counts() > w[1].counts()));
        assert_eq!(all.len(), 35);
        assert_eq!(enumerate_types(5, 1).unwrap().collect::<Vec<_>>(), vec![hist(&[5])]);
    }

    #[test]
    fn type_counts() {
        assert_eq!(type_count(2, 2), BigUint::from(3u32));
        assert_eq!(type_count(3, 3), BigUint::from(10u32));
        assert_eq!(type_count(21, 10), BigUint::from(14_307_150u32));
        assert!(enumerate_types(0, 3).is_err());
        assert!(enumerate_types(3, 0).is_err());
    }

    #[test]
    fn composition_rank_matches_enumeration() {
        for (n, ns) in [(1, 1), (3, 3), (5, 4), (6, 2), (4, 6)] {
            for (i, h) in enumerate_types(n, ns).unwrap().enumerate() {
                assert_eq!(composition_rank(&h), i as u64);
                assert_eq!(composition_unrank(i as u64, n, ns), h);
            }
        }
    }

    #[test]
    fn class_sizes() {
        assert_eq!(type_class_size(&hist(&[2, 0])), BigUint::from(1u32));
        assert_eq!(type_class_size(&hist(&[1, 1])), BigUint::from(2u32));
        // 11! / (6! 2!) = 27720
        assert_eq!(type_class_size(&hist(&[6, 2, 1, 1, 1])), BigUint::from(27_720u32));
    }

    #[test]
    fn equal_weight_types_use_lexicographic_tie_break() {
        let a = hist(&[8, 2, 2, 2, 2]);
        let b = hist(&[4, 4, 4, 4, 0]);
        assert_eq!(weight_key(&a), BigUint::one() << 32u32);
        assert_eq!(weight_key(&a), weight_key(&b));
        assert_eq!(shaping_cmp(&a, &b), Ordering::Less);

        let index = ShapedIndex::build(16, 5, DEFAULT_BUDGET).unwrap();
        assert!(index.position_of(&a).unwrap() < index.position_of(&b).unwrap());
    }

    #[test]
    fn small_index_layout() {
        let index = ShapedIndex::build(3, 3, DEFAULT_BUDGET).unwrap();
        let entries: Vec<_> = index.entries().collect();
        assert_eq!(entries.len(), 10);
        assert_eq!(entries[0], (hist(&[3, 0, 0]), BigUint::from(1u32)));
        assert_eq!(entries[1], (hist(&[0, 3, 0]), BigUint::from(1u32)));
        assert_eq!(entries[2], (hist(&[0, 0, 3]), BigUint::from(1u32)));
        assert_eq!(entries[3], (hist(&[2, 1, 0]), BigUint::from(3u32)));
        assert_eq!(entries[9], (hist(&[1, 1, 1]), BigUint::from(6u32)));
        assert_eq!(index.total(), BigUint::from(27u32));
    }

    #[test]
    fn budget_is_enforced() {
        let err = ShapedIndex::build(80, 40, DEFAULT_BUDGET).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { .. }));
        let err = ShapedIndex::build(3, 3, 9).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { budget: 9, .. }));
        assert!(ShapedIndex::build(3, 3, 10).is_ok());
    }

    #[test]
    fn locate_rejects_out_of_range() {
        let index = ShapedIndex::build(3, 3, DEFAULT_BUDGET).unwrap();
        assert_eq!(index.locate(&BigUint::from(26u32)).unwrap(), (9, BigUint::from(5u32)));
        assert_eq!(index.locate(&BigUint::from(3u32)).unwrap(), (3, BigUint::zero()));
        assert!(matches!(
            index.locate(&BigUint::from(27u32)),
            Err(Error::RankOutOfRange { .. })
        ));
        assert!(index.locate(&(BigUint::one() << 200u32)).is_err());
    }

    #[test]
    fn totals_match_power_of_alphabet() {
        for ns in 1..=6u32 {
            for n in 1..=8usize {
                let index = ShapedIndex::build(n, ns, DEFAULT_BUDGET).unwrap();
                assert_eq!(index.total(), BigUint::from(ns).pow(n as u32), "n={n} ns={ns}");
                let sum: BigUint = enumerate_types(n, ns).unwrap().map(|h| type_class_size(&h)).sum();
                assert_eq!(sum, index.total());
            }
        }
    }

    #[test]
    fn index_matches_sorted_comparator() {
        for (n, ns) in [(4, 3), (6, 4), (7, 2), (12, 5)] {
            let index = ShapedIndex::build(n, ns, DEFAULT_BUDGET).unwrap();
            let mut expected: Vec<_> = enumerate_types(n, ns).unwrap().collect();
            expected.sort_by(shaping_cmp);
            let got: Vec<_> = index.entries().map(|(h, _)| h).collect();
            assert_eq!(got, expected);
            for (h, size) in index.entries() {
                assert_eq!(size, type_class_size(&h));
            }
        }
    }

    #[test]
    fn large_length_uses_bigint_class_sizes() {
        // n > 67 takes the arbitrary-precision path for class sizes
        let index = ShapedIndex::build(80, 2, DEFAULT_BUDGET).unwrap();
        assert_eq!(index.total(), BigUint::one() << 80u32);
        assert_eq!(index.histogram(0), hist(&[80, 0]));
        assert_eq!(index.histogram(80), hist(&[40, 40]));
    }

    #[test]
    fn cache_round_trip() {
        let index = ShapedIndex::build(9, 4, DEFAULT_BUDGET).unwrap();
        let mut bytes = Vec::new();
        index.write_cache(&mut bytes).unwrap();
        let back = ShapedIndex::read_cache(bytes.as_slice()).unwrap();
        assert_eq!(back, index);

        let mut corrupt = bytes.clone();
        let last = corrupt.len() - 1;
        corrupt[last] ^= 1;
        assert!(matches!(ShapedIndex::read_cache(corrupt.as_slice()), Err(Error::Cache(_))));
        assert!(ShapedIndex::read_cache(&bytes[..bytes.len() - 3]).is_err());
        assert!(matches!(ShapedIndex::read_cache(&b"NOTANIDX"[..]), Err(Error::Cache(_))));
    }

    #[test]
    fn index_cache_reuses_and_persists() {
        let dir = std::env::temp_dir().join(format!("sst-cache-test-{}", std::process::id()));
        let cache = IndexCache::with_dir(&dir);
        let a = cache.get(7, 3, DEFAULT_BUDGET).unwrap();
        let b = cache.get(7, 3, DEFAULT_BUDGET).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
        let fresh = IndexCache::with_dir(&dir);
        assert_eq!(*fresh.get(7, 3, DEFAULT_BUDGET).unwrap(), *a);
        assert!(matches!(cache.get(80, 40, DEFAULT_BUDGET), Err(Error::BudgetExceeded { .. })));
        std::fs::remove_dir_all(dir).unwrap();
    }

    fn arb_type_pair() -> impl Strategy<Value = (Histogram, Histogram, Histogram)> {
        (1usize..30, 2u32..7).prop_flat_map(|(n, ns)| {
            let count = type_count(n, ns).to_u64().unwrap();
            (0..count, 0..count, 0..count).prop_map(move |(a, b, c)| {
                (
                    composition_unrank(a, n, ns),
                    composition_unrank(b, n, ns),
                    composition_unrank(c, n, ns),
                )
            })
        })
    }

    proptest! {
        #[test]
        fn weight_order_agrees_with_float_lc((a, b, _) in arb_type_pair()) {
            use crate::seqcore::type_coding_limit;
            let (la, lb) = (type_coding_limit(&a).unwrap(), type_coding_limit(&b).unwrap());
            if (la - lb).abs() > 1e-9 {
                prop_assert_eq!(weight_key(&a) > weight_key(&b), la < lb);
            }
            // Lc = n log2 n - log2 W
            let n = a.total() as f64;
            let log_w = a.counts().iter().filter(|&&c| c > 0)
                .map(|&c| c as f64 * (c as f64).log2()).sum::<f64>();
            prop_assert!((la - (n * n.log2() - log_w)).abs() < 1e-6);
        }

        #[test]
        fn comparator_is_strict_total_order((a, b, c) in arb_type_pair()) {
            prop_assert_eq!(shaping_cmp(&a, &a), Ordering::Equal);
            prop_assert_eq!(shaping_cmp(&a, &b), shaping_cmp(&b, &a).reverse());
            if a != b {
                prop_assert_ne!(shaping_cmp(&a, &b), Ordering::Equal);
            }
            if shaping_cmp(&a, &b) == Ordering::Less && shaping_cmp(&b, &c) == Ordering::Less {
                prop_assert_eq!(shaping_cmp(&a, &c), Ordering::Less);
            }
        }
    }
}
