//! βs and βt sweeps over a fixed budget function and channel.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::hull::{lower_convex_hull, LowerHull};
use super::solve::{epsilon_target, latency_seconds, solve_blocklength, SolveOptions};
use crate::budget::{BitsMode, BudgetFn, Scheme};
use crate::channel::ChannelModel;
use crate::error::{Error, Result};
use crate::quantize::Quantizer;

/// Gap kept between the SLQ grid edge and `δ`.
pub const SLQ_EDGE_OFFSET: f64 = 1e-9;
/// Lower grid edge for schemes without a tail allowance.
pub const DEFAULT_LOWER_EDGE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridMode {
    #[default]
    Uniform,
    Log,
}

impl std::str::FromStr for GridMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" | "linear" => Ok(GridMode::Uniform),
            "log" => Ok(GridMode::Log),
            other => Err(Error::Domain(format!("unknown grid mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub points: usize,
    pub mode: GridMode,
    /// Overrides the scheme's default lower edge.
    pub lower: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            points: 1000,
            mode: GridMode::Uniform,
            lower: None,
        }
    }
}

impl GridSpec {
    /// `points` values on `[lower, βt)`.
    pub fn beta_s_values(&self, beta_t: f64, budget: &BudgetFn) -> Result<Vec<f64>> {
        let lower = self.lower.unwrap_or(match budget.scheme {
            Scheme::Slq => budget.delta + SLQ_EDGE_OFFSET,
            _ => DEFAULT_LOWER_EDGE,
        });
        if self.points == 0 || !(lower > 0.0 && lower < beta_t) {
            return Err(Error::Domain(format!(
                "empty beta_s grid: {} points on [{lower}, {beta_t})",
                self.points
            )));
        }
        let n = self.points as f64;
        Ok((0..self.points)
            .map(|i| {
                let t = i as f64 / n;
                match self.mode {
                    GridMode::Uniform => lower + (beta_t - lower) * t,
                    GridMode::Log => lower * (beta_t / lower).powf(t),
                }
            })
            .collect())
    }
}

/// Everything a sweep needs besides `βt` and the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub budget: BudgetFn,
    pub channel: ChannelModel,
    pub bandwidth_hz: f64,
    pub bits_mode: BitsMode,
    pub solve: SolveOptions,
}

/// One evaluated operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub beta_t: f64,
    pub beta_s: f64,
    pub epsilon_target: f64,
    /// Budget the solver consumed.
    pub bits: f64,
    /// Integer payload size.
    pub payload_bits: u64,
    pub quantizer: Option<Quantizer>,
    pub n: Option<u64>,
    pub n_real: Option<f64>,
    pub latency_s: Option<f64>,
    pub feasible: bool,
    /// Reason the point is infeasible.
    pub note: Option<String>,
}

impl TradeoffPoint {
    fn infeasible(beta_t: f64, beta_s: f64, err: &Error) -> Self {
        Self {
            beta_t,
            beta_s,
            epsilon_target: epsilon_target(beta_t, beta_s).unwrap_or(f64::NAN),
            bits: f64::NAN,
            payload_bits: 0,
            quantizer: None,
            n: None,
            n_real: None,
            latency_s: None,
            feasible: false,
            note: Some(err.to_string()),
        }
    }

    pub fn latency_ms(&self) -> Option<f64> {
        self.latency_s.map(|t| t * 1e3)
    }
}

/// Evaluates one `(βt, βs)` pair.
pub fn evaluate_point(problem: &Problem, beta_t: f64, beta_s: f64) -> Result<TradeoffPoint> {
    let eps = epsilon_target(beta_t, beta_s)?;
    let budget = problem.budget.eval(beta_s)?;
    let bits = budget.bits_for(problem.bits_mode);
    let sol = solve_blocklength(&problem.channel, eps, bits, &problem.solve)?;
    Ok(TradeoffPoint {
        beta_t,
        beta_s,
        epsilon_target: eps,
        bits,
        payload_bits: budget.bits,
        quantizer: Some(budget.quantizer),
        n: Some(sol.n),
        n_real: Some(sol.n_real),
        latency_s: Some(latency_seconds(sol.n, problem.bandwidth_hz)),
        feasible: true,
        note: None,
    })
}

/// Runs `f` on a pool of `jobs` threads, or the global pool when `None`.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j.max(1))
                .build()
                .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// All grid points at one `βt` plus the index of the smallest `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaSweep {
    pub beta_t: f64,
    pub points: Vec<TradeoffPoint>,
    pub argmin: usize,
}

impl BetaSweep {
    pub fn best(&self) -> &TradeoffPoint {
        &self.points[self.argmin]
    }
}

/// Index of the feasible point with the smallest `n` (first on ties).
fn argmin(points: &[TradeoffPoint]) -> Option<usize> {
    let mut best: Option<(u64, usize)> = None;
    for (i, p) in points.iter().enumerate() {
        if let Some(n) = p.n.filter(|_| p.feasible) {
            if best.is_none_or(|(bn, _)| n < bn) {
                best = Some((n, i));
            }
        }
    }
    best.map(|(_, i)| i)
}

fn sweep_points(problem: &Problem, beta_t: f64, grid: &[f64]) -> Vec<TradeoffPoint> {
    grid.par_iter()
        .map(|&bs| {
            evaluate_point(problem, beta_t, bs)
                .unwrap_or_else(|e| TradeoffPoint::infeasible(beta_t, bs, &e))
        })
        .collect()
}

/// Evaluates every grid `βs` at fixed `βt`.
pub fn sweep_beta_s(
    beta_t: f64,
    problem: &Problem,
    grid: &GridSpec,
    jobs: Option<usize>,
) -> Result<BetaSweep> {
    let values = grid.beta_s_values(beta_t, &problem.budget)?;
    let points = with_jobs(jobs, || sweep_points(problem, beta_t, &values))?;
    let argmin = argmin(&points).ok_or_else(|| {
        Error::NoFeasibleN(format!("no feasible beta_s at beta_t={beta_t}"))
    })?;
    Ok(BetaSweep {
        beta_t,
        points,
        argmin,
    })
}

/// Optimal point per `βt` and the lower convex hull of `(βt, T)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffCurve {
    /// One point per input `βt`, the sweep optimum when feasible.
    pub points: Vec<TradeoffPoint>,
    pub hull: LowerHull,
}

impl TradeoffCurve {
    pub fn is_hull_member(&self, i: usize) -> bool {
        self.hull.members.binary_search(&i).is_ok()
    }
}

/// Runs [`sweep_beta_s`] for each `βt`; at least one must be feasible.
pub fn sweep_beta_t(
    beta_ts: &[f64],
    problem: &Problem,
    grid: &GridSpec,
    jobs: Option<usize>,
) -> Result<TradeoffCurve> {
    for &bt in beta_ts {
        if !(bt > 0.0 && bt < 1.0) {
            return Err(Error::Domain(format!("beta_t must be in (0, 1), got {bt}")));
        }
    }
    let mut sorted = beta_ts.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let points = with_jobs(jobs, || -> Result<Vec<TradeoffPoint>> {
        sorted
            .iter()
            .map(|&bt| {
                let values = grid.beta_s_values(bt, &problem.budget)?;
                let pts = sweep_points(problem, bt, &values);
                Ok(match argmin(&pts) {
                    Some(i) => pts[i].clone(),
                    None => {
                        let mut p = pts.into_iter().last().unwrap();
                        p.note = Some(format!("no feasible beta_s at beta_t={bt}"));
                        p.feasible = false;
                        p
                    }
                })
            })
            .collect()
    })??;
    if points.iter().all(|p| !p.feasible) {
        return Err(Error::NoFeasibleN("no feasible beta_t in sweep".into()));
    }
    let xy: Vec<(f64, f64)> = points
        .iter()
        .map(|p| (p.beta_t, p.latency_s.unwrap_or(f64::NAN)))
        .collect();
    let hull = lower_convex_hull(&xy);
    Ok(TradeoffCurve { points, hull })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::db_to_linear;

    fn awgn_problem(budget: BudgetFn) -> Problem {
        Problem {
            budget,
            channel: ChannelModel::awgn(db_to_linear(5.0)).unwrap(),
            bandwidth_hz: 10e3,
            bits_mode: BitsMode::Real,
            solve: SolveOptions::default(),
        }
    }

    #[test]
    fn grid_edges() {
        let g = GridSpec::default();
        let v = g.beta_s_values(0.05, &BudgetFn::lq(10)).unwrap();
        assert_eq!(v.len(), 1000);
        assert_eq!(v[0], 1e-6);
        assert!(*v.last().unwrap() < 0.05);
        let v = g.beta_s_values(0.05, &BudgetFn::slq(10, 3, 1e-5)).unwrap();
        assert_eq!(v[0], 1e-5 + 1e-9);
        let log = GridSpec {
            mode: GridMode::Log,
            ..g
        };
        let v = log.beta_s_values(0.1, &BudgetFn::uq(10)).unwrap();
        assert!(v.windows(2).all(|w| w[1] > w[0]) && *v.last().unwrap() < 0.1);
        assert!(g.beta_s_values(1e-7, &BudgetFn::uq(10)).is_err());
    }

    #[test]
    fn single_point_is_argmin() {
        let grid = GridSpec {
            points: 1,
            ..Default::default()
        };
        let s = sweep_beta_s(0.2, &awgn_problem(BudgetFn::lq(20)), &grid, None).unwrap();
        assert_eq!(s.argmin, 0);
        assert!(s.best().feasible);
    }

    #[test]
    fn all_infeasible() {
        let mut problem = awgn_problem(BudgetFn::lq(20));
        problem.solve.eps_cap = 1e-300;
        let r = sweep_beta_s(0.2, &problem, &GridSpec::default(), None);
        assert!(matches!(r, Err(Error::NoFeasibleN(_))));
        let r = sweep_beta_t(&[0.1, 0.2], &problem, &GridSpec::default(), None);
        assert!(matches!(r, Err(Error::NoFeasibleN(_))));
    }

    #[test]
    fn infeasible_points_are_kept() {
        let mut problem = awgn_problem(BudgetFn::lq(20));
        problem.solve.eps_cap = 0.3;
        let s = sweep_beta_s(0.4, &problem, &GridSpec::default(), None).unwrap();
        assert_eq!(s.points.len(), 1000);
        assert!(!s.points[0].feasible);
        assert!(s.points[0].note.is_some());
        assert!(s.best().feasible);
    }

    #[test]
    fn parallel_matches_sequential() {
        let problem = awgn_problem(BudgetFn::slq(70, 20, 1e-5));
        let grid = GridSpec {
            points: 200,
            ..Default::default()
        };
        let a = sweep_beta_s(0.2, &problem, &grid, Some(1)).unwrap();
        let b = sweep_beta_s(0.2, &problem, &grid, Some(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn last_grid_point_is_slower() {
        let problem = awgn_problem(BudgetFn::lq(70));
        let s = sweep_beta_s(0.2, &problem, &GridSpec::default(), None).unwrap();
        let last = s.points.last().unwrap().latency_s.unwrap();
        assert!(last > s.best().latency_s.unwrap());
    }

    #[test]
    fn curve_hull() {
        let problem = awgn_problem(BudgetFn::lq(30));
        let bts: Vec<f64> = (1..=10).map(|i| 0.04 * i as f64).collect();
        let grid = GridSpec {
            points: 200,
            ..Default::default()
        };
        let c = sweep_beta_t(&bts, &problem, &grid, None).unwrap();
        assert_eq!(c.points.len(), 10);
        assert!(c.hull.is_convex_non_increasing(1e-12));
        assert!(c.is_hull_member(0));
    }
}
