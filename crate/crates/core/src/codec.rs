//! Lossless integer indexing of lattice points and top-k position sets.
//!
//! Compositions of `ell` into `k` nonnegative parts are ranked in ascending
//! lexicographic order of the count sequence (first count most significant).
//! Position sets use the combinatorial number system over ascending indices.
//! All index arithmetic is arbitrary precision.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the lattice `{b/ell : Σ b = ell}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePoint {
    counts: Vec<u64>,
    ell: u64,
}

impl LatticePoint {
    pub fn new(counts: Vec<u64>, ell: u64) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::Empty);
        }
        if ell == 0 {
            return Err(Error::Domain("lattice denominator must be positive".into()));
        }
        let actual = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .ok_or_else(|| Error::Domain("count sum overflows".into()))?;
        if actual != ell {
            return Err(Error::SumMismatch {
                expected: ell,
                actual,
            });
        }
        Ok(Self { counts, ell })
    }

    #[inline]
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    #[inline]
    pub fn ell(&self) -> u64 {
        self.ell
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.counts.len()
    }

    /// The implied simplex point `b[i] / ell`.
    pub fn to_probabilities(&self) -> Vec<f64> {
        let ell = self.ell as f64;
        self.counts.iter().map(|&c| c as f64 / ell).collect()
    }
}

/// A strictly increasing set of positions in `[0, k)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PositionSet {
    indices: Vec<usize>,
    k: usize,
}

impl PositionSet {
    pub fn new(indices: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= k) {
            return Err(Error::InvalidSubset(format!("position {bad} >= k = {k}")));
        }
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSubset(
                "positions must be distinct and ascending".into(),
            ));
        }
        Ok(Self { indices, k })
    }

    #[inline]
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// An index into a finite enumerated set together with the fixed number of
/// bits needed to address every element of that set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LexIndex {
    pub value: BigUint,
    pub bit_width: u64,
}

impl LexIndex {
    /// Checks `value < cardinality` and derives the bit width.
    pub fn new(value: BigUint, cardinality: &BigUint) -> Result<Self> {
        if &value >= cardinality {
            return Err(Error::IndexOutOfRange {
                cardinality: cardinality.to_string(),
            });
        }
        Ok(Self {
            value,
            bit_width: ceil_log2(cardinality),
        })
    }

    /// Big-endian bytes of the value with no leading zero bytes; zero is the
    /// empty sequence.
    pub fn to_bytes_minimal(&self) -> Vec<u8> {
        if self.value.is_zero() {
            Vec::new()
        } else {
            self.value.to_bytes_be()
        }
    }

    /// Big-endian bytes left-padded to `ceil(bit_width / 8)` bytes.
    pub fn to_bytes_fixed(&self) -> Vec<u8> {
        let width = self.byte_width();
        let raw = self.to_bytes_minimal();
        let mut out = vec![0u8; width - raw.len()];
        out.extend_from_slice(&raw);
        out
    }

    /// Inverse of [`LexIndex::to_bytes_fixed`] for a set of known cardinality.
    pub fn from_bytes_fixed(bytes: &[u8], cardinality: &BigUint) -> Result<Self> {
        let width = byte_width(ceil_log2(cardinality));
        if bytes.len() != width {
            return Err(Error::Payload(format!(
                "expected {width} index bytes, got {}",
                bytes.len()
            )));
        }
        Self::new(BigUint::from_bytes_be(bytes), cardinality)
    }

    #[inline]
    pub fn byte_width(&self) -> usize {
        byte_width(self.bit_width)
    }
}

#[inline]
pub(crate) fn byte_width(bits: u64) -> usize {
    bits.div_ceil(8) as usize
}

/// `⌈log₂ n⌉` for `n ≥ 1` (0 for n ≤ 1).
pub fn ceil_log2(n: &BigUint) -> u64 {
    if n <= &BigUint::one() {
        0
    } else {
        (n - 1u32).bits()
    }
}

/// Exact binomial coefficient `C(n, r)` (zero when `r > n`).
pub fn binomial(n: u64, r: u64) -> BigUint {
    if r > n {
        return BigUint::zero();
    }
    let r = r.min(n - r);
    if let Some(small) = binomial_u128(n, r) {
        return BigUint::from(small);
    }
    let mut acc = BigUint::one();
    for i in 1..=r {
        acc *= n - r + i;
        acc /= i;
    }
    acc
}

/// Machine-word fast path for [`binomial`]; `None` on overflow.
fn binomial_u128(n: u64, r: u64) -> Option<u128> {
    let mut acc: u128 = 1;
    for i in 1..=r {
        // acc * (n - r + i) is divisible by i since acc = C(n - r + i - 1, i - 1)
        acc = acc.checked_mul(u128::from(n - r + i))? / u128::from(i);
    }
    Some(acc)
}

/// `log₂ C(n, r)` via log-gamma.
pub fn log2_binomial(n: u64, r: u64) -> f64 {
    assert!(r <= n, "log2_binomial requires r <= n");
    if r == 0 || r == n {
        return 0.0;
    }
    let (n, r) = (n as f64, r as f64);
    let ln = libm::lgamma(n + 1.0) - libm::lgamma(r + 1.0) - libm::lgamma(n - r + 1.0);
    (ln / std::f64::consts::LN_2).max(0.0)
}

/// `⌈log₂ C(n, r)⌉` from log-gamma, resolved exactly when the estimate falls
/// inside a guard band around an integer.
pub fn ceil_log2_binomial(n: u64, r: u64) -> u64 {
    assert!(r <= n, "ceil_log2_binomial requires r <= n");
    if r == 0 || r == n {
        return 0;
    }
    let x = log2_binomial(n, r);
    // lgamma differences lose roughly eps * lgamma(n + 1) in absolute terms
    let scale = libm::lgamma(n as f64 + 1.0) / std::f64::consts::LN_2;
    let guard = 1e-7 + 64.0 * f64::EPSILON * scale;
    if (x - x.round()).abs() <= guard {
        ceil_log2(&binomial(n, r))
    } else {
        x.ceil() as u64
    }
}

/// Number of compositions of `ell` into `k` nonnegative parts.
pub fn composition_count(k: usize, ell: u64) -> BigUint {
    assert!(k >= 1);
    binomial(ell + k as u64 - 1, k as u64 - 1)
}

/// Bits needed to index every composition of `ell` into `k` parts.
pub fn composition_count_bits(k: usize, ell: u64) -> u64 {
    assert!(k >= 1);
    ceil_log2_binomial(ell + k as u64 - 1, k as u64 - 1)
}

/// Number of `k_top`-subsets of `k` positions.
pub fn subset_count(k: usize, k_top: usize) -> BigUint {
    binomial(k as u64, k_top as u64)
}

/// Bits needed to index every `k_top`-subset of `k` positions.
pub fn subset_count_bits(k: usize, k_top: usize) -> u64 {
    ceil_log2_binomial(k as u64, k_top as u64)
}

/// Compositions of `remaining` into `parts` nonnegative parts.
#[inline]
fn compositions_of(remaining: u64, parts: u64) -> BigUint {
    debug_assert!(parts >= 1);
    binomial(remaining + parts - 1, parts - 1)
}

/// Lexicographic rank of a lattice point among all compositions of its `ell`
/// into `k` parts.
pub fn rank_composition(pt: &LatticePoint) -> LexIndex {
    let k = pt.k() as u64;
    let mut remaining = pt.ell;
    let mut rank = BigUint::zero();
    for (i, &b) in pt.counts.iter().enumerate().take(pt.k() - 1) {
        let parts = k - i as u64;
        if b > 0 {
            // compositions whose i-th count is below b, with earlier counts fixed
            rank += compositions_of(remaining, parts) - compositions_of(remaining - b, parts);
        }
        remaining -= b;
    }
    let cardinality = composition_count(pt.k(), pt.ell);
    LexIndex::new(rank, &cardinality).expect("rank is below cardinality by construction")
}

/// Inverse of [`rank_composition`].
pub fn unrank_composition(index: &BigUint, k: usize, ell: u64) -> Result<LatticePoint> {
    if k == 0 {
        return Err(Error::Empty);
    }
    if ell == 0 {
        return Err(Error::Domain("lattice denominator must be positive".into()));
    }
    let cardinality = composition_count(k, ell);
    if index >= &cardinality {
        return Err(Error::IndexOutOfRange {
            cardinality: cardinality.to_string(),
        });
    }
    let mut residual = index.clone();
    let mut remaining = ell;
    let mut counts = Vec::with_capacity(k);
    for i in 0..k - 1 {
        let parts = (k - i) as u64;
        let total = compositions_of(remaining, parts);
        // below(v) = #compositions with this count < v = total - C(remaining - v + parts - 1, parts - 1);
        // find the largest v in [0, remaining] with below(v) <= residual
        let below = |v: u64| &total - compositions_of(remaining - v, parts);
        let (mut lo, mut hi) = (0u64, remaining);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if below(mid) <= residual {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        residual -= below(lo);
        counts.push(lo);
        remaining -= lo;
    }
    debug_assert!(residual.is_zero());
    counts.push(remaining);
    LatticePoint::new(counts, ell)
}

/// Combinatorial-number-system rank `Σ C(c_i, i + 1)` of an ascending subset.
pub fn rank_subset(set: &PositionSet) -> LexIndex {
    let mut rank = BigUint::zero();
    for (i, &c) in set.indices.iter().enumerate() {
        rank += binomial(c as u64, i as u64 + 1);
    }
    let cardinality = subset_count(set.k, set.len());
    LexIndex::new(rank, &cardinality).expect("rank is below cardinality by construction")
}

/// Inverse of [`rank_subset`].
pub fn unrank_subset(index: &BigUint, k: usize, k_top: usize) -> Result<PositionSet> {
    if k_top > k {
        return Err(Error::InvalidSubset(format!("k_top = {k_top} exceeds k = {k}")));
    }
    let cardinality = subset_count(k, k_top);
    if index >= &cardinality {
        return Err(Error::IndexOutOfRange {
            cardinality: cardinality.to_string(),
        });
    }
    let mut residual = index.clone();
    let mut indices = vec![0usize; k_top];
    let mut upper = k; // exclusive bound for the next element
    for slot in (0..k_top).rev() {
        let r = slot as u64 + 1;
        // largest c < upper with C(c, r) <= residual; c = slot always qualifies
        let (mut lo, mut hi) = (slot, upper - 1);
        while lo < hi {
            let mid = lo + (hi - lo).div_ceil(2);
            if binomial(mid as u64, r) <= residual {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let c = lo;
        residual -= binomial(c as u64, r);
        indices[slot] = c;
        upper = c;
    }
    debug_assert!(residual.is_zero());
    PositionSet::new(indices, k)
}

/// Converts a small index to `u64` if it fits.
pub fn index_to_u64(index: &LexIndex) -> Option<u64> {
    index.value.to_u64()
}
