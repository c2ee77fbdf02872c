//! Monte Carlo check of the expected end-to-end distortion bound
//! `(1 − ε)βs + ε` under a Bernoulli decoding-failure abstraction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::budget::{BudgetFn, Scheme};
use crate::error::{Error, Result};
use crate::optimizer::with_jobs;
use crate::prob::{tv_slices, ProbVector};
use crate::quantize::{top_positions, Quantizer};

/// What the receiver reconstructs when decoding fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorModel {
    /// A uniformly random valid payload.
    #[default]
    UniformLatticePoint,
    /// The simplex vertex farthest in TV from the input.
    AdversarialVertex,
}

impl std::str::FromStr for ErrorModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "uniform-lattice-point" | "uniform" => Ok(ErrorModel::UniformLatticePoint),
            "adversarial-vertex" | "adversarial" => Ok(ErrorModel::AdversarialVertex),
            other => Err(Error::Domain(format!("unknown error model '{other}'"))),
        }
    }
}

/// Distribution of the simulated classifier outputs.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Source {
    /// Uniform on the simplex.
    #[default]
    Flat,
    /// `softmax(c·N(0, I))`.
    Sparse { concentration: f64 },
    /// `k_top` random head positions carrying at least `1 − δ` of the mass.
    TailBounded { k_top: usize, delta: f64 },
}

impl Source {
    pub fn sample<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<ProbVector> {
        match *self {
            Source::Flat => random_simplex(k, rng),
            Source::Sparse { concentration } => random_sparse_simplex(k, concentration, rng),
            Source::TailBounded { k_top, delta } => random_tail_bounded(k, k_top, delta, rng),
        }
    }
}

/// Flat Dirichlet sample from normalised unit-exponential draws.
pub fn random_simplex<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<ProbVector> {
    if k < 2 {
        return Err(Error::TooFewClasses(k));
    }
    let raw: Vec<f64> = (0..k).map(|_| Exp1.sample(rng)).collect();
    ProbVector::new(&raw, true)
}

/// `softmax(c·z)` with standard normal `z`; larger `c` concentrates the mass.
pub fn random_sparse_simplex<R: Rng + ?Sized>(
    k: usize,
    concentration: f64,
    rng: &mut R,
) -> Result<ProbVector> {
    if k < 2 {
        return Err(Error::TooFewClasses(k));
    }
    if !(concentration >= 0.0 && concentration.is_finite()) {
        return Err(Error::Domain(format!("concentration must be >= 0, got {concentration}")));
    }
    let z: Vec<f64> = (0..k)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            concentration * z
        })
        .collect();
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let raw: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    ProbVector::new(&raw, true)
}

/// A flat head on `k_top` random positions and a tail of total mass `U·δ`.
pub fn random_tail_bounded<R: Rng + ?Sized>(
    k: usize,
    k_top: usize,
    delta: f64,
    rng: &mut R,
) -> Result<ProbVector> {
    if k < 2 {
        return Err(Error::TooFewClasses(k));
    }
    if k_top == 0 || k_top > k || !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!(
            "tail-bounded source needs 1 <= k_top <= {k} and 0 <= delta < 1"
        )));
    }
    let tail_mass = if k_top == k { 0.0 } else { delta * rng.random::<f64>() };
    let mut order: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let head: Vec<f64> = (0..k_top).map(|_| Exp1.sample(rng)).collect();
    let tail: Vec<f64> = (k_top..k).map(|_| Exp1.sample(rng)).collect();
    let head_sum: f64 = head.iter().sum();
    let tail_sum: f64 = tail.iter().sum();
    let mut values = vec![0.0; k];
    for (j, &h) in head.iter().enumerate() {
        values[order[j]] = (1.0 - tail_mass) * h / head_sum;
    }
    for (j, &t) in tail.iter().enumerate() {
        values[order[k_top + j]] = tail_mass * t / tail_sum;
    }
    ProbVector::new(&values, true)
}

/// A simulation run. The quantizer is the one the budget prescribes at `beta_s`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub error_model: ErrorModel,
    pub budget: BudgetFn,
    pub beta_s: f64,
    /// Decoding-failure probability.
    pub epsilon: f64,
    pub source: Source,
}

impl SimConfig {
    pub fn quantizer(&self) -> Result<Quantizer> {
        Ok(self.budget.eval(self.beta_s)?.quantizer)
    }

    /// `(1 − ε)βs + ε`.
    pub fn bound(&self) -> f64 {
        (1.0 - self.epsilon) * self.beta_s + self.epsilon
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub empirical_mean_distortion: f64,
    pub std_error: f64,
    pub bound: f64,
    /// Trials whose distortion exceeded 1.
    pub violations: u64,
    pub failures: u64,
    pub max_distortion: f64,
    pub quantizer: Quantizer,
    pub config: SimConfig,
}

impl SimReport {
    /// `mean ≤ bound + 3·std_error`.
    pub fn within_bound(&self) -> bool {
        self.empirical_mean_distortion <= self.bound + 3.0 * self.std_error
    }
}

/// Sum by recursive halving.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// The RNG for one trial: stream `trial` of the ChaCha generator keyed by `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn run_trial<R: Rng>(
    cfg: &SimConfig,
    quantizer: &Quantizer,
    rng: &mut R,
    draw: &(impl Fn(&mut R) -> Result<ProbVector> + ?Sized),
) -> Result<(f64, bool)> {
    let k = cfg.budget.k;
    let p = draw(rng)?;
    if p.k() != k {
        return Err(Error::DimensionMismatch(k, p.k()));
    }
    let encoded = quantizer.encode(&p)?;
    let failed = rng.random::<f64>() < cfg.epsilon;
    let received = if !failed {
        encoded.decode()?.into_inner()
    } else {
        match cfg.error_model {
            ErrorModel::UniformLatticePoint => quantizer.random_payload(k, rng)?.decode()?.into_inner(),
            ErrorModel::AdversarialVertex => {
                let far = top_positions(&p.values().iter().map(|v| -v).collect::<Vec<_>>(), 1)[0];
                ProbVector::vertex(k, far)?.into_inner()
            }
        }
    };
    Ok((tv_slices(p.values(), &received), failed))
}

fn validate(cfg: &SimConfig) -> Result<()> {
    if cfg.trials < 1 {
        return Err(Error::Domain("trials must be >= 1".into()));
    }
    if !(0.0..=1.0).contains(&cfg.epsilon) {
        return Err(Error::Domain(format!("epsilon must be in [0, 1], got {}", cfg.epsilon)));
    }
    if let (Scheme::Slq, Source::TailBounded { delta, .. }) = (cfg.budget.scheme, cfg.source) {
        if delta > cfg.budget.delta {
            return Err(Error::Domain(format!(
                "source tail mass {delta} exceeds the SLQ allowance {}",
                cfg.budget.delta
            )));
        }
    }
    Ok(())
}

/// Runs the configured source through encode, channel and decode.
pub fn simulate_end_to_end(cfg: &SimConfig, jobs: Option<usize>) -> Result<SimReport> {
    let source = cfg.source;
    let k = cfg.budget.k;
    simulate_with_source(cfg, jobs, &move |rng: &mut ChaCha8Rng| source.sample(k, rng))
}

/// As [`simulate_end_to_end`] with a caller-supplied source.
pub fn simulate_with_source(
    cfg: &SimConfig,
    jobs: Option<usize>,
    draw: &(dyn Fn(&mut ChaCha8Rng) -> Result<ProbVector> + Sync),
) -> Result<SimReport> {
    validate(cfg)?;
    let quantizer = cfg.quantizer()?;
    let outcomes = with_jobs(jobs, || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|t| run_trial(cfg, &quantizer, &mut trial_rng(cfg.seed, t), draw))
            .collect::<Result<Vec<_>>>()
    })??;
    let distortions: Vec<f64> = outcomes.iter().map(|o| o.0).collect();
    let n = distortions.len() as f64;
    let mean = pairwise_sum(&distortions) / n;
    let sq: Vec<f64> = distortions.iter().map(|d| (d - mean) * (d - mean)).collect();
    let std_error = if distortions.len() > 1 {
        (pairwise_sum(&sq) / (n - 1.0)).sqrt() / n.sqrt()
    } else {
        0.0
    };
    Ok(SimReport {
        empirical_mean_distortion: mean,
        std_error,
        bound: cfg.bound(),
        violations: distortions.iter().filter(|&&d| d > 1.0).count() as u64,
        failures: outcomes.iter().filter(|o| o.1).count() as u64,
        max_distortion: distortions.iter().copied().fold(0.0, f64::max),
        quantizer,
        config: *cfg,
    })
}
