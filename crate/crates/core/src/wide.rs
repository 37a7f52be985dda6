//! Flat storage of many fixed-width unsigned integers.
//!
//! Each value occupies `width` little-endian `u64` limbs. The width is chosen
//! from a known upper bound, so arithmetic here never truncates; overflow past
//! the width is a logic error and panics.

use std::cmp::Ordering;

use num_bigint::BigUint;

/// Number of limbs needed to hold any value `<= bound`.
pub(crate) fn limbs_for(bound: &BigUint) -> usize {
    (bound.bits() as usize).div_ceil(64).max(1)
}

pub(crate) fn mul_small(acc: &mut [u64], m: u64) {
    let mut carry: u128 = 0;
    for limb in acc.iter_mut() {
        let t = (*limb as u128) * (m as u128) + carry;
        *limb = t as u64;
        carry = t >> 64;
    }
    assert!(carry == 0, "fixed-width overflow");
}

pub(crate) fn add_assign(acc: &mut [u64], other: &[u64]) {
    let mut carry = false;
    for (a, &b) in acc.iter_mut().zip(other) {
        let (s1, c1) = a.overflowing_add(b);
        let (s2, c2) = s1.overflowing_add(carry as u64);
        *a = s2;
        carry = c1 || c2;
    }
    assert!(!carry, "fixed-width overflow");
}

pub(crate) fn cmp(a: &[u64], b: &[u64]) -> Ordering {
    debug_assert_eq!(a.len(), b.len());
    a.iter().rev().cmp(b.iter().rev())
}

pub(crate) fn to_biguint(limbs: &[u64]) -> BigUint {
    let mut digits = Vec::with_capacity(limbs.len() * 2);
    for &l in limbs {
        digits.push(l as u32);
        digits.push((l >> 32) as u32);
    }
    BigUint::new(digits)
}

/// Widens `value` to `width` limbs; `None` if it does not fit.
pub(crate) fn from_biguint(value: &BigUint, width: usize) -> Option<Vec<u64>> {
    let mut digits = value.to_u64_digits();
    if digits.len() > width {
        return None;
    }
    digits.resize(width, 0);
    Some(digits)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct WideTable {
    width: usize,
    limbs: Vec<u64>,
}

impl WideTable {
    pub(crate) fn with_capacity(width: usize, rows: usize) -> Self {
        WideTable {
            width,
            limbs: Vec::with_capacity(width * rows),
        }
    }

    pub(crate) fn from_limbs(width: usize, limbs: Vec<u64>) -> Self {
        assert!(width > 0 && limbs.len().is_multiple_of(width));
        WideTable { width, limbs }
    }

    pub(crate) fn width(&self) -> usize {
        self.width
    }

    pub(crate) fn len(&self) -> usize {
        self.limbs.len() / self.width
    }

    pub(crate) fn push(&mut self, value: &[u64]) {
        assert_eq!(value.len(), self.width);
        self.limbs.extend_from_slice(value);
    }

    pub(crate) fn get(&self, i: usize) -> &[u64] {
        &self.limbs[i * self.width..(i + 1) * self.width]
    }

    pub(crate) fn raw(&self) -> &[u64] {
        &self.limbs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn limb_counts() {
        assert_eq!(limbs_for(&BigUint::from(0u32)), 1);
        assert_eq!(limbs_for(&BigUint::from(u64::MAX)), 1);
        assert_eq!(limbs_for(&(BigUint::from(u64::MAX) + 1u32)), 2);
    }

    #[test]
    #[should_panic(expected = "overflow")]
    fn overflow_panics() {
        let mut acc = [u64::MAX];
        mul_small(&mut acc, 2);
    }

    proptest! {
        #[test]
        fn matches_biguint(a in any::<u128>(), b in any::<u64>(), m in any::<u32>()) {
            let width = 4;
            let mut acc = from_biguint(&BigUint::from(a), width).unwrap();
            mul_small(&mut acc, m as u64);
            let other = from_biguint(&BigUint::from(b), width).unwrap();
            add_assign(&mut acc, &other);
            let expected = BigUint::from(a) * m + b;
            prop_assert_eq!(to_biguint(&acc), expected.clone());
            let ord = cmp(&acc, &from_biguint(&BigUint::from(a), width).unwrap());
            prop_assert_eq!(ord, expected.cmp(&BigUint::from(a)));
        }
    }
}
