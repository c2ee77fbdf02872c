//! Source codecs for probability vectors.
//!
//! - UQ: each entry mapped to one of `2^j` equal bins, decoded to bin centres
//!   and renormalized.
//! - LQ: nearest point of the lattice `{b/ell : Σ b = ell}` found by rounding
//!   and correcting the largest/smallest rounding residuals, then ranked.
//! - SLQ: the `k_top` largest entries are renormalized, lattice-quantized in
//!   dimension `k_top`, and sent with the rank of their position set.

use num_bigint::BigUint;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{
    self, byte_width, composition_count, rank_composition, rank_subset, subset_count,
    unrank_composition, unrank_subset, LatticePoint, LexIndex, PositionSet,
};
use crate::error::{Error, Result};
use crate::prob::{normalized_simplex, ProbVector};

/// Largest supported bits per UQ entry; bin centres stay exact in f64.
pub const MAX_UQ_BITS: u32 = 52;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UqEncoding {
    pub bins: Vec<u64>,
    pub bits_per_entry: u32,
}

impl UqEncoding {
    pub fn payload_bits(&self) -> u64 {
        self.bins.len() as u64 * self.bits_per_entry as u64
    }

    /// `k` fields of `j` bits, packed most significant bit first; the last byte
    /// is zero padded.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut writer = BitWriter::default();
        for &bin in &self.bins {
            writer.push(bin, self.bits_per_entry);
        }
        writer.finish()
    }

    pub fn from_bytes(bytes: &[u8], k: usize, bits_per_entry: u32) -> Result<Self> {
        check_uq_bits(bits_per_entry)?;
        let expected = byte_width(k as u64 * bits_per_entry as u64);
        if bytes.len() != expected {
            return Err(Error::Payload(format!(
                "expected {expected} bytes for {k} x {bits_per_entry} bits, got {}",
                bytes.len()
            )));
        }
        let mut reader = BitReader::new(bytes);
        let bins = (0..k).map(|_| reader.take(bits_per_entry)).collect();
        Ok(Self {
            bins,
            bits_per_entry,
        })
    }
}

fn check_uq_bits(j: u32) -> Result<()> {
    if j == 0 || j > MAX_UQ_BITS {
        return Err(Error::Domain(format!(
            "bits per entry must be in 1..={MAX_UQ_BITS}, got {j}"
        )));
    }
    Ok(())
}

/// Maps each `p[i]` to the bin `r` with `p[i] ∈ [r/2^j, (r+1)/2^j)`; the value
/// 1 goes to the top bin.
pub fn uq_encode(p: &ProbVector, bits_per_entry: u32) -> Result<UqEncoding> {
    check_uq_bits(bits_per_entry)?;
    let levels = 1u64 << bits_per_entry;
    let scale = levels as f64;
    let bins = p
        .values()
        .iter()
        .map(|&v| ((v * scale).floor() as u64).min(levels - 1))
        .collect();
    Ok(UqEncoding {
        bins,
        bits_per_entry,
    })
}

/// Reconstructs bin centres `(r + ½)/2^j` and renormalizes them by their sum.
pub fn uq_decode(e: &UqEncoding) -> Result<ProbVector> {
    check_uq_bits(e.bits_per_entry)?;
    let levels = 1u64 << e.bits_per_entry;
    if let Some(i) = e.bins.iter().position(|&r| r >= levels) {
        return Err(Error::Payload(format!("bin {i} exceeds {levels} levels")));
    }
    let scale = levels as f64;
    let centres: Vec<f64> = e.bins.iter().map(|&r| (r as f64 + 0.5) / scale).collect();
    ProbVector::new(&centres, true)
}

/// Intermediate state of lattice rounding, kept for inspection and tests.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeTrace {
    /// `b'[i] = ⌊ell·p[i] + ½⌋`
    pub initial: Vec<u64>,
    /// `Σ b'[i]`
    pub initial_sum: u64,
    /// `ζ[i] = b'[i] − ell·p[i]`
    pub residuals: Vec<f64>,
    /// Indices adjusted by ±1, in the order they were chosen.
    pub adjusted: Vec<usize>,
    pub point: LatticePoint,
}

/// Lattice rounding of a simplex point of any dimension >= 1.
///
/// Ties in the residual are broken towards the lower index in both the
/// decrement and the increment branch.
pub(crate) fn lattice_round(values: &[f64], ell: u64) -> Result<LatticeTrace> {
    if ell == 0 {
        return Err(Error::Domain("lattice denominator must be positive".into()));
    }
    let scale = ell as f64;
    let initial: Vec<u64> = values
        .iter()
        .map(|&v| (scale * v + 0.5).floor() as u64)
        .collect();
    let initial_sum: u64 = initial.iter().sum();
    let residuals: Vec<f64> = initial
        .iter()
        .zip(values)
        .map(|(&b, &v)| b as f64 - scale * v)
        .collect();
    let mut counts = initial.clone();
    let mut adjusted = Vec::new();
    if initial_sum != ell {
        let mut order: Vec<usize> = (0..values.len()).collect();
        if initial_sum > ell {
            let excess = (initial_sum - ell) as usize;
            order.sort_by(|&a, &b| residuals[b].total_cmp(&residuals[a]).then(a.cmp(&b)));
            for &i in order.iter().take(excess) {
                // the largest residuals are positive, so these counts are >= 1
                assert!(counts[i] > 0, "lattice rounding decremented a zero count");
                counts[i] -= 1;
                adjusted.push(i);
            }
        } else {
            let deficit = (ell - initial_sum) as usize;
            order.sort_by(|&a, &b| residuals[a].total_cmp(&residuals[b]).then(a.cmp(&b)));
            for &i in order.iter().take(deficit) {
                counts[i] += 1;
                adjusted.push(i);
            }
        }
    }
    let point = LatticePoint::new(counts, ell)?;
    Ok(LatticeTrace {
        initial,
        initial_sum,
        residuals,
        adjusted,
        point,
    })
}

/// LQ encoder: the lattice point chosen for `p` at denominator `ell`.
pub fn lq_encode(p: &ProbVector, ell: u64) -> Result<LatticePoint> {
    Ok(lattice_round(p.values(), ell)?.point)
}

/// LQ encoder returning every intermediate quantity.
pub fn lq_encode_traced(p: &ProbVector, ell: u64) -> Result<LatticeTrace> {
    lattice_round(p.values(), ell)
}

pub fn lq_decode(pt: &LatticePoint) -> Result<ProbVector> {
    if pt.k() < 2 {
        return Err(Error::TooFewClasses(pt.k()));
    }
    Ok(ProbVector::from_simplex_unchecked(pt.to_probabilities()))
}

/// Ranked LQ payload.
pub fn lq_index(pt: &LatticePoint) -> LexIndex {
    rank_composition(pt)
}

/// Positions of the `k_top` largest entries, ties going to the lower index,
/// returned in ascending order.
pub fn top_positions(values: &[f64], k_top: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    let mut top: Vec<usize> = order.into_iter().take(k_top).collect();
    top.sort_unstable();
    top
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlqEncoding {
    pub positions: PositionSet,
    pub lattice_index: LexIndex,
    pub ell: u64,
    pub k: usize,
    pub k_top: usize,
}

impl SlqEncoding {
    pub fn payload_bits(&self) -> u64 {
        codec::subset_count_bits(self.k, self.k_top)
            + codec::composition_count_bits(self.k_top, self.ell)
    }

    /// Position-set index bytes followed by lattice index bytes, each padded to
    /// the byte width of its own bit width.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = rank_subset(&self.positions).to_bytes_fixed();
        out.extend(self.lattice_index.to_bytes_fixed());
        out
    }

    pub fn from_bytes(bytes: &[u8], k: usize, k_top: usize, ell: u64) -> Result<Self> {
        check_slq_params(k, k_top, ell)?;
        let subsets = subset_count(k, k_top);
        let split = byte_width(codec::ceil_log2(&subsets));
        if bytes.len() < split {
            return Err(Error::Payload("payload shorter than position index".into()));
        }
        let subset_index = LexIndex::from_bytes_fixed(&bytes[..split], &subsets)?;
        let positions = unrank_subset(&subset_index.value, k, k_top)?;
        let lattice_index =
            LexIndex::from_bytes_fixed(&bytes[split..], &composition_count(k_top, ell))?;
        Ok(Self {
            positions,
            lattice_index,
            ell,
            k,
            k_top,
        })
    }
}

fn check_slq_params(k: usize, k_top: usize, ell: u64) -> Result<()> {
    if k_top == 0 || k_top > k {
        return Err(Error::Domain(format!("k_top must be in 1..={k}, got {k_top}")));
    }
    if ell == 0 {
        return Err(Error::Domain("lattice denominator must be positive".into()));
    }
    Ok(())
}

/// The renormalized sparse vector: top entries divided by their sum, zeros
/// elsewhere. Returns the positions and the full-length vector.
pub fn sparse_normalized(p: &ProbVector, k_top: usize) -> Result<(PositionSet, Vec<f64>)> {
    check_slq_params(p.k(), k_top, 1)?;
    let positions = top_positions(p.values(), k_top);
    let kept: Vec<f64> = positions.iter().map(|&i| p.values()[i]).collect();
    let kept = normalized_simplex(&kept, true).map_err(|e| match e {
        Error::ZeroMass => Error::ZeroTopMass,
        other => other,
    })?;
    let mut full = vec![0.0; p.k()];
    for (&i, &v) in positions.iter().zip(&kept) {
        full[i] = v;
    }
    Ok((PositionSet::new(positions, p.k())?, full))
}

pub fn slq_encode(p: &ProbVector, k_top: usize, ell: u64) -> Result<SlqEncoding> {
    check_slq_params(p.k(), k_top, ell)?;
    let (positions, full) = sparse_normalized(p, k_top)?;
    let kept: Vec<f64> = positions.indices().iter().map(|&i| full[i]).collect();
    let point = lattice_round(&kept, ell)?.point;
    Ok(SlqEncoding {
        positions,
        lattice_index: rank_composition(&point),
        ell,
        k: p.k(),
        k_top,
    })
}

pub fn slq_decode(e: &SlqEncoding) -> Result<ProbVector> {
    check_slq_params(e.k, e.k_top, e.ell)?;
    if e.k < 2 {
        return Err(Error::TooFewClasses(e.k));
    }
    if e.positions.k() != e.k {
        return Err(Error::DimensionMismatch(e.positions.k(), e.k));
    }
    if e.positions.len() != e.k_top {
        return Err(Error::InvalidSubset(format!(
            "{} positions for k_top = {}",
            e.positions.len(),
            e.k_top
        )));
    }
    let point = unrank_composition(&e.lattice_index.value, e.k_top, e.ell)?;
    let mut values = vec![0.0; e.k];
    for (&i, v) in e.positions.indices().iter().zip(point.to_probabilities()) {
        values[i] = v;
    }
    Ok(ProbVector::from_simplex_unchecked(values))
}

/// Scheme with its resolved parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "scheme", rename_all = "lowercase")]
pub enum Quantizer {
    Uq { bits_per_entry: u32 },
    Lq { ell: u64 },
    Slq { k_top: usize, ell: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Encoded {
    Uq(UqEncoding),
    Lq(LatticePoint),
    Slq(SlqEncoding),
}

impl Quantizer {
    pub fn encode(&self, p: &ProbVector) -> Result<Encoded> {
        Ok(match *self {
            Quantizer::Uq { bits_per_entry } => Encoded::Uq(uq_encode(p, bits_per_entry)?),
            Quantizer::Lq { ell } => Encoded::Lq(lq_encode(p, ell)?),
            Quantizer::Slq { k_top, ell } => Encoded::Slq(slq_encode(p, k_top, ell)?),
        })
    }

    /// Fixed payload size in bits for dimension `k`.
    pub fn payload_bits(&self, k: usize) -> u64 {
        match *self {
            Quantizer::Uq { bits_per_entry } => k as u64 * bits_per_entry as u64,
            Quantizer::Lq { ell } => codec::composition_count_bits(k, ell),
            Quantizer::Slq { k_top, ell } => {
                codec::subset_count_bits(k, k_top) + codec::composition_count_bits(k_top, ell)
            }
        }
    }

    /// Parses a serialized payload for dimension `k`.
    pub fn decode_bytes(&self, bytes: &[u8], k: usize) -> Result<Encoded> {
        Ok(match *self {
            Quantizer::Uq { bits_per_entry } => {
                Encoded::Uq(UqEncoding::from_bytes(bytes, k, bits_per_entry)?)
            }
            Quantizer::Lq { ell } => {
                let idx = LexIndex::from_bytes_fixed(bytes, &composition_count(k, ell))?;
                Encoded::Lq(unrank_composition(&idx.value, k, ell)?)
            }
            Quantizer::Slq { k_top, ell } => {
                Encoded::Slq(SlqEncoding::from_bytes(bytes, k, k_top, ell)?)
            }
        })
    }

    /// A uniformly random valid payload for dimension `k`.
    pub fn random_payload<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<Encoded> {
        Ok(match *self {
            Quantizer::Uq { bits_per_entry } => {
                check_uq_bits(bits_per_entry)?;
                let levels = 1u64 << bits_per_entry;
                Encoded::Uq(UqEncoding {
                    bins: (0..k).map(|_| rng.random_range(0..levels)).collect(),
                    bits_per_entry,
                })
            }
            Quantizer::Lq { ell } => {
                let idx = random_below(&composition_count(k, ell), rng);
                Encoded::Lq(unrank_composition(&idx, k, ell)?)
            }
            Quantizer::Slq { k_top, ell } => {
                check_slq_params(k, k_top, ell)?;
                let subsets = subset_count(k, k_top);
                let positions = unrank_subset(&random_below(&subsets, rng), k, k_top)?;
                let lattice = composition_count(k_top, ell);
                let lattice_index = LexIndex::new(random_below(&lattice, rng), &lattice)?;
                Encoded::Slq(SlqEncoding {
                    positions,
                    lattice_index,
                    ell,
                    k,
                    k_top,
                })
            }
        })
    }
}

impl Encoded {
    pub fn decode(&self) -> Result<ProbVector> {
        match self {
            Encoded::Uq(e) => uq_decode(e),
            Encoded::Lq(pt) => lq_decode(pt),
            Encoded::Slq(e) => slq_decode(e),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            Encoded::Uq(e) => e.to_bytes(),
            Encoded::Lq(pt) => rank_composition(pt).to_bytes_fixed(),
            Encoded::Slq(e) => e.to_bytes(),
        }
    }
}

/// Uniform integer in `[0, bound)` by rejection on `bits(bound)` random bits.
pub(crate) fn random_below<R: Rng + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(bound > &BigUint::ZERO, "empty range");
    let bits = bound.bits();
    let bytes = byte_width(bits);
    let excess = (bytes as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; bytes];
    loop {
        rng.fill(&mut buf[..]);
        if bytes > 0 && excess > 0 {
            buf[0] &= 0xffu8 >> excess;
        }
        let candidate = BigUint::from_bytes_be(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

#[derive(Default)]
struct BitWriter {
    bytes: Vec<u8>,
    used: u32,
}

impl BitWriter {
    fn push(&mut self, value: u64, width: u32) {
        for shift in (0..width).rev() {
            if self.used % 8 == 0 {
                self.bytes.push(0);
            }
            let bit = ((value >> shift) & 1) as u8;
            let last = self.bytes.last_mut().expect("byte pushed above");
            *last |= bit << (7 - self.used % 8);
            self.used += 1;
        }
    }

    fn finish(self) -> Vec<u8> {
        self.bytes
    }
}

struct BitReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Self { bytes, pos: 0 }
    }

    fn take(&mut self, width: u32) -> u64 {
        let mut value = 0u64;
        for _ in 0..width {
            let bit = (self.bytes[self.pos / 8] >> (7 - self.pos % 8)) & 1;
            value = (value << 1) | bit as u64;
            self.pos += 1;
        }
        value
    }
}
