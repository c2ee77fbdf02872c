//! Probability vectors on the simplex and the divergences used to measure
//! reconstruction distortion.
//!
//! Total variation is the operative distortion everywhere else in the crate;
//! KL and arbitrary f-generators are provided as utilities.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the entry sum when normalization is not requested.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A validated point on the probability simplex with at least two classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbVector {
    values: Vec<f64>,
}

impl ProbVector {
    /// Validates `raw` and builds a simplex point.
    ///
    /// With `normalize` set, entries are divided by their sum. Without it, the
    /// sum must already be within [`NORMALIZATION_TOLERANCE`] of 1 and the
    /// residual is divided out so the stored values sum to 1.
    pub fn new(raw: &[f64], normalize: bool) -> Result<Self> {
        let values = normalized_simplex(raw, normalize)?;
        if values.len() < 2 {
            return Err(Error::TooFewClasses(values.len()));
        }
        Ok(Self { values })
    }

    /// Builds from values already known to lie on the simplex (no copy of checks
    /// beyond debug assertions). Used internally for quantizer outputs.
    pub(crate) fn from_simplex_unchecked(values: Vec<f64>) -> Self {
        debug_assert!(values.len() >= 2);
        debug_assert!(values.iter().all(|v| *v >= 0.0));
        debug_assert!((values.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        Self { values }
    }

    /// The vertex `e_index` of the k-simplex.
    pub fn vertex(k: usize, index: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        if index >= k {
            return Err(Error::Domain(format!("vertex {index} outside dimension {k}")));
        }
        let mut values = vec![0.0; k];
        values[index] = 1.0;
        Ok(Self { values })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::TooFewClasses(k));
        }
        Ok(Self {
            values: vec![1.0 / k as f64; k],
        })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.values.len()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

impl TryFrom<Vec<f64>> for ProbVector {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProbVector::new(&v, false)
    }
}

impl From<ProbVector> for Vec<f64> {
    fn from(p: ProbVector) -> Self {
        p.values
    }
}

impl AsRef<[f64]> for ProbVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Shared validation for simplex points of any dimension >= 1.
pub(crate) fn normalized_simplex(raw: &[f64], normalize: bool) -> Result<Vec<f64>> {
    if raw.is_empty() {
        return Err(Error::Empty);
    }
    for (index, &value) in raw.iter().enumerate() {
        if !value.is_finite() {
            return Err(Error::NonFinite { index });
        }
        if value < 0.0 {
            return Err(Error::NegativeEntry { index, value });
        }
    }
    let sum: f64 = raw.iter().sum();
    if sum <= 0.0 {
        return Err(Error::ZeroMass);
    }
    if !normalize && (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::NotNormalized(sum));
    }
    if sum == 1.0 {
        Ok(raw.to_vec())
    } else {
        Ok(raw.iter().map(|v| v / sum).collect())
    }
}

/// `make_prob_vector` entry point; same as [`ProbVector::new`].
pub fn make_prob_vector(raw: &[f64], normalize: bool) -> Result<ProbVector> {
    ProbVector::new(raw, normalize)
}

fn check_dims(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch(p.len(), q.len()));
    }
    Ok(())
}

/// Half the L1 distance between two slices of equal length, clamped to [0, 1].
pub(crate) fn tv_slices(p: &[f64], q: &[f64]) -> f64 {
    let l1: f64 = p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum();
    (0.5 * l1).min(1.0)
}

/// Total variation distance `½ Σ |p[i] − q[i]|`.
pub fn tv_distance(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    check_dims(&p.values, &q.values)?;
    Ok(tv_slices(&p.values, &q.values))
}

/// A convex generator `f` with `f(1) = 0`, plus the limit of `f(x)/x` as
/// `x → ∞` (needed when `q[i] = 0 < p[i]`). `None` marks an unbounded limit.
#[derive(Clone)]
pub struct Generator {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    slope_at_infinity: Option<f64>,
}

impl Generator {
    pub fn new<F>(name: impl Into<String>, f: F, slope_at_infinity: Option<f64>) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            f: Arc::new(f),
            slope_at_infinity,
        }
    }

    /// `f(x) = ½|x − 1|`.
    pub fn total_variation() -> Self {
        Self::new("total_variation", |x| 0.5 * (x - 1.0).abs(), Some(0.5))
    }

    /// `f(x) = x log₂ x` (KL divergence in bits).
    pub fn kullback_leibler() -> Self {
        Self::new(
            "kullback_leibler",
            |x| if x == 0.0 { 0.0 } else { x * x.log2() },
            None,
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("name", &self.name)
            .field("slope_at_infinity", &self.slope_at_infinity)
            .finish()
    }
}

/// `D_f(p, q) = Σ f(p[i]/q[i]) q[i]`.
///
/// Terms with `p[i] = q[i] = 0` contribute nothing. Terms with `q[i] = 0 < p[i]`
/// contribute `p[i] · lim f(x)/x`, or fail with `SupportMismatch` if that limit
/// is unbounded.
pub fn f_divergence(p: &ProbVector, q: &ProbVector, generator: &Generator) -> Result<f64> {
    check_dims(&p.values, &q.values)?;
    let mut total = 0.0;
    for (index, (&pi, &qi)) in p.values.iter().zip(&q.values).enumerate() {
        if qi > 0.0 {
            total += generator.eval(pi / qi) * qi;
        } else if pi > 0.0 {
            match generator.slope_at_infinity {
                Some(slope) => total += pi * slope,
                None => return Err(Error::SupportMismatch { index, p_val: pi }),
            }
        }
    }
    Ok(total.max(0.0))
}

/// KL divergence in bits.
pub fn kl_divergence(p: &ProbVector, q: &ProbVector) -> Result<f64> {
    f_divergence(p, q, &Generator::kullback_leibler())
}

#[derive(Debug, Clone)]
pub enum DivergenceKind {
    TotalVariation,
    KullbackLeibler,
    GenericF(Generator),
}

/// A divergence value tagged with the measure that produced it.
#[derive(Debug, Clone)]
pub struct Divergence {
    pub kind: DivergenceKind,
    pub value: f64,
}

impl Divergence {
    pub fn compute(kind: DivergenceKind, p: &ProbVector, q: &ProbVector) -> Result<Self> {
        let value = match &kind {
            DivergenceKind::TotalVariation => tv_distance(p, q)?,
            DivergenceKind::KullbackLeibler => kl_divergence(p, q)?,
            DivergenceKind::GenericF(g) => f_divergence(p, q, g)?,
        };
        Ok(Self { kind, value })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pv(v: &[f64]) -> ProbVector {
        ProbVector::new(v, false).unwrap()
    }

    #[test]
    fn construction() {
        assert_eq!(pv(&[0.18, 0.52, 0.3]).values(), &[0.18, 0.52, 0.3]);
        assert_eq!(
            ProbVector::new(&[2.0, 2.0], true).unwrap().values(),
            &[0.5, 0.5]
        );
        for normalize in [false, true] {
            assert!(matches!(
                ProbVector::new(&[1.0, -0.1], normalize),
                Err(Error::NegativeEntry { index: 1, .. })
            ));
        }
        assert_eq!(ProbVector::new(&[0.0, 0.0], true), Err(Error::ZeroMass));
        assert!(matches!(
            ProbVector::new(&[0.5, 0.6], false),
            Err(Error::NotNormalized(_))
        ));
        assert_eq!(ProbVector::new(&[1.0], false), Err(Error::TooFewClasses(1)));
        assert_eq!(ProbVector::new(&[], true), Err(Error::Empty));
        assert!(ProbVector::new(&[f64::NAN, 1.0], true).is_err());
    }

    #[test]
    fn serde_validates() {
        let p: ProbVector = serde_json::from_str("[0.25, 0.75]").unwrap();
        assert_eq!(p.k(), 2);
        assert!(serde_json::from_str::<ProbVector>("[0.25, 0.5]").is_err());
    }

    #[test]
    fn tv_examples() {
        let p = pv(&[0.3, 0.7]);
        assert_eq!(tv_distance(&p, &p).unwrap(), 0.0);
        assert_eq!(tv_distance(&pv(&[1.0, 0.0]), &pv(&[0.0, 1.0])).unwrap(), 1.0);
        let d = tv_distance(&pv(&[0.18, 0.52, 0.3]), &pv(&[0.2, 0.6, 0.2])).unwrap();
        assert!((d - 0.1).abs() < 1e-12);
        assert_eq!(
            tv_distance(&pv(&[0.5, 0.5]), &pv(&[0.2, 0.3, 0.5])),
            Err(Error::DimensionMismatch(2, 3))
        );
    }

    #[test]
    fn f_divergence_examples() {
        let tv = Generator::total_variation();
        let d = f_divergence(&pv(&[0.18, 0.52, 0.3]), &pv(&[0.2, 0.6, 0.2]), &tv).unwrap();
        assert!((d - 0.1).abs() < 1e-12);
        let d = f_divergence(&pv(&[1.0, 0.0]), &pv(&[0.5, 0.5]), &tv).unwrap();
        assert!((d - 0.5).abs() < 1e-12);
        // q has a zero where p does not: TV uses the finite recession slope
        let d = f_divergence(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0]), &tv).unwrap();
        assert!((d - 0.5).abs() < 1e-12);

        let p = pv(&[0.1, 0.2, 0.7]);
        assert_eq!(kl_divergence(&p, &p).unwrap(), 0.0);
        assert!(matches!(
            kl_divergence(&pv(&[0.5, 0.5]), &pv(&[1.0, 0.0])),
            Err(Error::SupportMismatch { index: 1, .. })
        ));
        // zero in p is fine for KL
        let d = kl_divergence(&pv(&[1.0, 0.0]), &pv(&[0.5, 0.5])).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
    }

    #[test]
    fn divergence_kinds() {
        let p = pv(&[0.18, 0.52, 0.3]);
        let q = pv(&[0.2, 0.6, 0.2]);
        let a = Divergence::compute(DivergenceKind::TotalVariation, &p, &q).unwrap();
        let b = Divergence::compute(
            DivergenceKind::GenericF(Generator::total_variation()),
            &p,
            &q,
        )
        .unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
        let kl = Divergence::compute(DivergenceKind::KullbackLeibler, &p, &q).unwrap();
        assert!(kl.value > 0.0);
    }
}
