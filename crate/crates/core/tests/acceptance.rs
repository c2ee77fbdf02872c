//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL line
//! each, and exits non-zero if any failed.

use std::time::{Duration, Instant};

use latdist::budget::{budget_lq, budget_slq, budget_uq, uq_bits_per_entry, BudgetFn};
use latdist::channel::{
    db_to_linear, fading_moments, linear_to_db, operational_snr, q_func, q_inv, ChannelModel,
    ChannelSpec, Correction,
};
use latdist::codec::{
    composition_count, index_to_u64, rank_composition, rank_subset, subset_count,
    unrank_composition, unrank_subset,
};
use latdist::optimizer::{
    solve_blocklength, sweep_beta_s, sweep_beta_t, GridSpec, Problem, SolveOptions,
};
use latdist::quantize::{lq_encode, lq_encode_traced, slq_encode, slq_decode, uq_decode, uq_encode};
use latdist::sim::{self, random_simplex, random_sparse_simplex, random_tail_bounded};
use latdist::{tv_distance, ProbVector};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn awgn_problem(budget: BudgetFn, snr: f64, bandwidth_hz: f64) -> Problem {
    Problem {
        budget,
        channel: ChannelModel::awgn(snr).unwrap(),
        bandwidth_hz,
        bits_mode: Default::default(),
        solve: SolveOptions::default(),
    }
}

fn c1_worked_example() -> Check {
    let p = ProbVector::new(&[0.18, 0.52, 0.3], false).map_err(|e| e.to_string())?;
    let t = lq_encode_traced(&p, 5).map_err(|e| e.to_string())?;
    ensure(t.initial == vec![1, 3, 2], || format!("b' = {:?}", t.initial))?;
    let want_zeta = [0.1, 0.4, 0.5];
    ensure(
        t.residuals
            .iter()
            .zip(want_zeta)
            .all(|(z, w)| (z - w).abs() < 1e-12),
        || format!("zeta = {:?}", t.residuals),
    )?;
    let out = t.point.to_probabilities();
    ensure(out == vec![1.0 / 5.0, 3.0 / 5.0, 1.0 / 5.0], || format!("output {out:?}"))?;
    ensure(t.point.counts() == [1, 3, 1], || format!("b = {:?}", t.point.counts()))?;
    Ok(format!("b'={:?} zeta={:?} -> {:?}", t.initial, t.residuals, t.point.counts()))
}

fn c2_bit_budgets() -> Check {
    let (k, beta_s, k_top, delta) = (50, 0.05, 5, 1e-5);
    let slq = budget_slq(k, k_top, delta, beta_s).map_err(|e| e.to_string())?.bits as f64;
    let lq = budget_lq(k, beta_s).map_err(|e| e.to_string())?.bits as f64;
    let uq = budget_uq(k, beta_s).map_err(|e| e.to_string())?;
    let uq_int = (k as u32 * uq_bits_per_entry(k, beta_s).map_err(|e| e.to_string())?) as f64;
    let r_uq = 1.0 - slq / uq;
    let r_uq_int = 1.0 - slq / uq_int;
    let r_lq = 1.0 - slq / lq;
    ensure((0.94..=0.98).contains(&r_uq), || format!("vs UQ {r_uq}"))?;
    ensure((0.94..=0.98).contains(&r_uq_int), || format!("vs integer UQ {r_uq_int}"))?;
    ensure((0.78..=0.82).contains(&r_lq), || format!("vs LQ {r_lq}"))?;
    Ok(format!(
        "J_SLQ={slq} J_LQ={lq} J_UQ={uq:.2}: reduction {r_uq:.4} vs UQ, {r_lq:.4} vs LQ"
    ))
}

fn c3_latency_reductions() -> Check {
    let spec = ChannelSpec::awgn(db_to_linear(5.0), 10e3, 320e3);
    let snr = operational_snr(&spec).map_err(|e| e.to_string())?;
    let beta_ts = [0.05, 0.1, 0.2, 0.3, 0.4];
    let grid = GridSpec::default();
    let mut t = Vec::new();
    for budget in [BudgetFn::uq(100), BudgetFn::lq(100), BudgetFn::slq(100, 5, 1e-5)] {
        let curve = sweep_beta_t(&beta_ts, &awgn_problem(budget, snr, 320e3), &grid, None)
            .map_err(|e| e.to_string())?;
        ensure(curve.hull.is_convex_non_increasing(1e-9), || "hull not convex".into())?;
        t.push(curve.hull.value_at(0.05).ok_or("no hull value at 0.05")?);
    }
    let (uq, lq, slq) = (t[0], t[1], t[2]);
    let r_uq = 1.0 - slq / uq;
    let r_lq = 1.0 - slq / lq;
    ensure((0.94..=0.99).contains(&r_uq), || format!("vs UQ {r_uq}"))?;
    ensure((0.80..=0.90).contains(&r_lq), || format!("vs LQ {r_lq}"))?;
    Ok(format!(
        "T_UQ={:.3} ms T_LQ={:.3} ms T_SLQ={:.3} ms: reduction {r_uq:.4} vs UQ, {r_lq:.4} vs LQ",
        uq * 1e3,
        lq * 1e3,
        slq * 1e3
    ))
}

fn c4_snr_scaling() -> Check {
    let spec = ChannelSpec::awgn(db_to_linear(5.0), 10e3, 320e3);
    let db = linear_to_db(operational_snr(&spec).map_err(|e| e.to_string())?);
    ensure((db + 10.1).abs() <= 0.1, || format!("gamma = {db} dB"))?;
    Ok(format!("gamma = {db:.4} dB"))
}

fn c5_optimal_beta_s() -> Check {
    let snr = db_to_linear(5.0);
    let mut lines = Vec::new();
    for budget in [BudgetFn::uq(70), BudgetFn::lq(70), BudgetFn::slq(70, 20, 1e-5)] {
        let problem = awgn_problem(budget, snr, 10e3);
        let mut argmins = Vec::new();
        for bt in [0.05, 0.2, 0.4] {
            let s = sweep_beta_s(bt, &problem, &GridSpec::default(), None).map_err(|e| e.to_string())?;
            argmins.push(s.best().beta_s);
        }
        let name = budget.scheme.name();
        ensure(argmins.windows(2).all(|w| w[1] > w[0]), || {
            format!("{name} argmins {argmins:?}")
        })?;
        lines.push(format!(
            "{name} [{:.3}, {:.3}, {:.3}]",
            argmins[0], argmins[1], argmins[2]
        ));
    }
    Ok(lines.join("; "))
}

fn hull_check(label: &str, problem: &Problem, beta_ts: &[f64]) -> Result<String, String> {
    let curve = sweep_beta_t(beta_ts, problem, &GridSpec::default(), None)
        .map_err(|e| format!("{label}: {e}"))?;
    ensure(curve.hull.is_convex_non_increasing(1e-9), || {
        format!("{label}: hull {:?}", curve.hull.vertices)
    })?;
    for p in curve.points.iter().filter(|p| p.feasible) {
        let t = p.latency_s.unwrap();
        let h = curve.hull.value_at(p.beta_t).unwrap();
        ensure(h <= t * (1.0 + 1e-12), || {
            format!("{label}: hull {h} above point {t} at {}", p.beta_t)
        })?;
    }
    Ok(format!("{label}: {} vertices", curve.hull.vertices.len()))
}

fn c6_hull_properties() -> Check {
    let beta_ts: Vec<f64> = (1..=20).map(|i| 0.025 * i as f64).collect();
    let awgn_snr = operational_snr(&ChannelSpec::awgn(db_to_linear(5.0), 10e3, 320e3)).unwrap();
    let mut runs = Vec::new();
    for k in [10, 100, 1000] {
        let k_top = (k / 20).max(2);
        for budget in [BudgetFn::uq(k), BudgetFn::lq(k), BudgetFn::slq(k, k_top, 1e-5)] {
            let label = format!("awgn k={k} {}", budget.scheme.name());
            runs.push((label, awgn_problem(budget, awgn_snr, 320e3)));
        }
    }
    let csi = ChannelModel::fading_csi(db_to_linear(1.0), 20).map_err(|e| e.to_string())?;
    let nocsi = ChannelModel::fading_nocsi(db_to_linear(21.0), 20, Correction::default())
        .map_err(|e| e.to_string())?;
    for (family, channel, k, k_top) in [("csi", csi, 100, 16), ("nocsi", nocsi, 1000, 70)] {
        for budget in [BudgetFn::uq(k), BudgetFn::lq(k), BudgetFn::slq(k, k_top, 1e-5)] {
            let label = format!("{family} k={k} {}", budget.scheme.name());
            runs.push((
                label,
                Problem {
                    budget,
                    channel,
                    bandwidth_hz: 10e3,
                    bits_mode: Default::default(),
                    solve: SolveOptions::default(),
                },
            ));
        }
    }
    let mut done = 0;
    for (label, problem) in &runs {
        hull_check(label, problem, &beta_ts)?;
        done += 1;
    }
    Ok(format!("{done} runs convex and non-increasing"))
}

fn c7_conservativeness() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut summary = Vec::new();
    for family in ["awgn", "csi", "nocsi"] {
        let mut checked = 0;
        let mut worst: f64 = 0.0;
        while checked < 1000 {
            let beta_t = rng.random_range(0.01..0.9);
            let beta_s = rng.random_range(0.0..beta_t);
            let eps = (beta_t - beta_s) / (1.0 - beta_s);
            let bits = 10f64.powf(rng.random_range(0.0..4.0));
            let refine = rng.random_bool(0.5);
            let model = match family {
                "awgn" => ChannelModel::awgn(db_to_linear(rng.random_range(-15.0..30.0))),
                "csi" => ChannelModel::fading_csi(
                    db_to_linear(rng.random_range(-10.0..25.0)),
                    rng.random_range(1..60),
                ),
                _ => ChannelModel::fading_nocsi(
                    db_to_linear(rng.random_range(15.0..35.0)),
                    rng.random_range(3..60),
                    Correction::default(),
                ),
            }
            .map_err(|e| e.to_string())?;
            let opts = SolveOptions {
                refine,
                ..Default::default()
            };
            let sol = match solve_blocklength(&model, eps, bits, &opts) {
                Ok(s) => s,
                Err(latdist::Error::EpsilonOutOfRange { .. }) => continue,
                Err(e) => return Err(format!("{family}: {e}")),
            };
            let exact = model.epsilon(sol.n as f64, bits);
            ensure(exact <= eps, || {
                format!("{family}: eps({})={exact} > {eps} (bits {bits})", sol.n)
            })?;
            worst = worst.max(exact / eps);
            checked += 1;
        }
        summary.push(format!("{family} 1000 ok (max eps/target {worst:.4})"));
    }
    Ok(summary.join("; "))
}

/// Lexicographic successor of a composition, `b[0]` most significant.
fn next_composition(b: &mut [u64]) -> bool {
    let k = b.len();
    let mut tail = 0;
    for i in (0..k.saturating_sub(1)).rev() {
        tail += b[i + 1];
        if tail > 0 {
            b[i] += 1;
            for v in &mut b[i + 1..] {
                *v = 0;
            }
            b[k - 1] = tail - 1;
            return true;
        }
    }
    false
}

fn c8_codec_bijection() -> Check {
    let limit = 100_000u64;
    let mut spaces = 0u64;
    let mut points = 0u64;
    for k in 1..=12usize {
        for ell in 1..=60u64 {
            let card = index_to_card(&composition_count(k, ell));
            if card > limit {
                break;
            }
            let mut b = vec![0u64; k];
            b[k - 1] = ell;
            let mut index = 0u64;
            loop {
                let pt = latdist::codec::LatticePoint::new(b.clone(), ell).map_err(|e| e.to_string())?;
                let r = rank_composition(&pt);
                ensure(index_to_u64(&r) == Some(index), || {
                    format!("rank({b:?}) = {} != {index}", r.value)
                })?;
                let back = unrank_composition(&BigUint::from(index), k, ell).map_err(|e| e.to_string())?;
                ensure(back.counts() == b.as_slice(), || format!("unrank({index}) != {b:?}"))?;
                index += 1;
                if !next_composition(&mut b) {
                    break;
                }
            }
            ensure(index == card, || format!("k={k} ell={ell}: {index} of {card}"))?;
            ensure(unrank_composition(&BigUint::from(card), k, ell).is_err(), || {
                format!("k={k} ell={ell}: index {card} accepted")
            })?;
            spaces += 1;
            points += card;
        }
    }
    for k in 1..=40usize {
        for t in 1..=k {
            let card = index_to_card(&subset_count(k, t));
            if card > limit {
                continue;
            }
            let mut prev: Option<Vec<usize>> = None;
            for index in 0..card {
                let set = unrank_subset(&BigUint::from(index), k, t).map_err(|e| e.to_string())?;
                let r = rank_subset(&set);
                ensure(index_to_u64(&r) == Some(index), || format!("subset k={k} t={t} #{index}"))?;
                let cur = set.indices().to_vec();
                // colex order: compare from the largest element down
                if let Some(p) = &prev {
                    ensure(cur.iter().rev().cmp(p.iter().rev()).is_gt(), || {
                        format!("subset order at {index}: {p:?} then {cur:?}")
                    })?;
                }
                prev = Some(cur);
            }
            ensure(unrank_subset(&BigUint::from(card), k, t).is_err(), || {
                format!("k={k} t={t}: index {card} accepted")
            })?;
            spaces += 1;
            points += card;
        }
    }
    Ok(format!("{spaces} spaces, {points} objects round-tripped"))
}

fn index_to_card(n: &BigUint) -> u64 {
    u64::try_from(n).unwrap_or(u64::MAX)
}

fn brute_force_min_tv(p: &[f64], ell: u64) -> f64 {
    let k = p.len();
    let mut b = vec![0u64; k];
    b[k - 1] = ell;
    let mut best = f64::INFINITY;
    loop {
        let tv = 0.5
            * b.iter()
                .zip(p)
                .map(|(&c, &v)| (c as f64 / ell as f64 - v).abs())
                .sum::<f64>();
        best = best.min(tv);
        if !next_composition(&mut b) {
            return best;
        }
    }
}

fn c9_lq_bound_and_optimality() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for i in 0..100_000u64 {
        let k = rng.random_range(2..=200);
        let ell = rng.random_range(1..=2000);
        let p = if i % 2 == 0 {
            random_simplex(k, &mut rng)
        } else {
            random_sparse_simplex(k, rng.random_range(0.5..4.0), &mut rng)
        }
        .map_err(|e| e.to_string())?;
        let q = latdist::quantize::lq_decode(&lq_encode(&p, ell).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let tv = tv_distance(&p, &q).map_err(|e| e.to_string())?;
        let bound = k as f64 / (4.0 * ell as f64);
        ensure(tv <= bound + 1e-12, || format!("k={k} ell={ell}: TV {tv} > {bound}"))?;
        worst = worst.max(tv / bound);
    }
    let mut instances = 0;
    while instances < 1000 {
        let k = rng.random_range(2..=6);
        let ell = rng.random_range(1..=60);
        if index_to_card(&composition_count(k, ell)) > 10_000 {
            continue;
        }
        let p = random_simplex(k, &mut rng).map_err(|e| e.to_string())?;
        let q = latdist::quantize::lq_decode(&lq_encode(&p, ell).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let tv = tv_distance(&p, &q).map_err(|e| e.to_string())?;
        let best = brute_force_min_tv(p.values(), ell);
        ensure(tv <= best + 1e-12, || format!("k={k} ell={ell}: TV {tv} > optimum {best}"))?;
        instances += 1;
    }
    Ok(format!(
        "1e5 draws within k/(4 ell) (max ratio {worst:.4}); 1000 brute-force optima matched"
    ))
}

fn c10_budgeted_bounds() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_uq: f64 = 0.0;
    let mut worst_slq: f64 = 0.0;
    for beta_s in [0.02, 0.05, 0.1] {
        for _ in 0..10_000 {
            let k = rng.random_range(2..=100);
            let j = uq_bits_per_entry(k, beta_s).map_err(|e| e.to_string())?;
            let p = random_simplex(k, &mut rng).map_err(|e| e.to_string())?;
            let q = uq_decode(&uq_encode(&p, j).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let tv = tv_distance(&p, &q).map_err(|e| e.to_string())?;
            ensure(tv <= beta_s, || format!("UQ k={k} j={j}: TV {tv} > {beta_s}"))?;
            worst_uq = worst_uq.max(tv / beta_s);
        }
        for i in 0..10_000 {
            let k = rng.random_range(2..=200);
            let k_top = rng.random_range(1..=k.min(40));
            let delta = if i % 2 == 0 { 1e-5 } else { beta_s * rng.random_range(0.0..0.9) };
            let ell = budget_slq(k, k_top, delta, beta_s).map_err(|e| e.to_string())?.ell;
            let p = random_tail_bounded(k, k_top, delta, &mut rng).map_err(|e| e.to_string())?;
            let q = slq_decode(&slq_encode(&p, k_top, ell).map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let tv = tv_distance(&p, &q).map_err(|e| e.to_string())?;
            ensure(tv <= beta_s, || {
                format!("SLQ k={k} k_top={k_top} delta={delta}: TV {tv} > {beta_s}")
            })?;
            worst_slq = worst_slq.max(tv / beta_s);
        }
    }
    Ok(format!(
        "3x1e4 per scheme; max TV/beta_s: UQ {worst_uq:.4}, SLQ {worst_slq:.4}"
    ))
}

fn c11_monte_carlo() -> Check {
    let ell_budget = BudgetFn::lq(8);
    let mut lines = Vec::new();
    for model in [sim::ErrorModel::UniformLatticePoint, sim::ErrorModel::AdversarialVertex] {
        for eps in [0.0, 0.1, 0.3, 0.49] {
            let cfg = sim::SimConfig {
                trials: 100_000,
                seed: 42,
                error_model: model,
                budget: ell_budget,
                beta_s: 0.1,
                epsilon: eps,
                source: sim::Source::Flat,
            };
            let r = sim::simulate_end_to_end(&cfg, None).map_err(|e| e.to_string())?;
            ensure(r.within_bound(), || {
                format!(
                    "{model:?} eps={eps}: mean {} > bound {} + 3*{}",
                    r.empirical_mean_distortion, r.bound, r.std_error
                )
            })?;
            ensure(r.violations == 0, || format!("{model:?} eps={eps}: {} violations", r.violations))?;
            lines.push(format!("{eps}:{:.4}<={:.4}", r.empirical_mean_distortion, r.bound));
        }
    }
    for budget in [BudgetFn::uq(12), BudgetFn::slq(12, 4, 1e-3)] {
        let cfg = sim::SimConfig {
            trials: 20_000,
            seed: 42,
            error_model: sim::ErrorModel::UniformLatticePoint,
            budget,
            beta_s: 0.05,
            epsilon: 0.3,
            source: sim::Source::TailBounded {
                k_top: 4,
                delta: 1e-3,
            },
        };
        let runs: Vec<String> = [Some(1), Some(2), Some(8), None]
            .into_iter()
            .map(|jobs| {
                sim::simulate_end_to_end(&cfg, jobs)
                    .map(|r| serde_json::to_string(&r).unwrap())
                    .map_err(|e| e.to_string())
            })
            .collect::<Result<_, _>>()?;
        ensure(runs.windows(2).all(|w| w[0] == w[1]), || {
            format!("{} reports differ across jobs", budget.scheme.name())
        })?;
    }
    Ok(format!("LQ k=8 bounds hold ({}); reports identical across jobs", lines.join(" ")))
}

fn c12_numerics() -> Check {
    let mut p = 1e-300;
    let mut worst: f64 = 0.0;
    while p < 1.0 {
        for v in [p, 1.0 - p] {
            if !(v > 0.0 && v < 1.0) {
                continue;
            }
            let back = q_func(q_inv(v).map_err(|e| e.to_string())?);
            let rel = (back - v).abs() / v;
            ensure(rel <= 1e-10, || format!("Q(Q^-1({v})) = {back}"))?;
            worst = worst.max(rel);
        }
        p *= 1.1;
    }
    for i in 0..=4100 {
        let x = -4.0 + i as f64 * 0.01;
        let back = q_inv(q_func(x)).map_err(|e| e.to_string())?;
        ensure((back - x).abs() <= 1e-10, || format!("Q^-1(Q({x})) = {back}"))?;
    }

    // Monte Carlo oracle shared across SNRs
    const SAMPLES: usize = 10_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let z: Vec<f64> = (0..SAMPLES).map(|_| Exp1.sample(&mut rng)).collect();
    let mut lines = Vec::new();
    for snr in [0.1, 1.0, 10.0] {
        let m = fading_moments(snr).map_err(|e| e.to_string())?;
        let n = SAMPLES as f64;
        let logs: Vec<f64> = z.iter().map(|&v| (snr * v).ln_1p()).collect();
        let invs: Vec<f64> = z.iter().map(|&v| 1.0 / (1.0 + snr * v)).collect();
        let mean = |xs: &[f64]| sim::pairwise_sum(xs) / n;
        let mc_log = mean(&logs);
        let mc_inv = mean(&invs);
        let dev2: Vec<f64> = logs.iter().map(|l| (l - mc_log).powi(2)).collect();
        let dev4: Vec<f64> = dev2.iter().map(|d| d * d).collect();
        let inv_dev2: Vec<f64> = invs.iter().map(|v| (v - mc_inv).powi(2)).collect();
        let mc_var = mean(&dev2);
        let se_log = (mc_var / n).sqrt();
        let se_var = ((mean(&dev4) - mc_var * mc_var) / n).sqrt();
        let se_inv = (mean(&inv_dev2) / n).sqrt();
        for (name, quad, mc, se) in [
            ("E[ln(1+gZ)]", m.mean_log, mc_log, se_log),
            ("Var[ln(1+gZ)]", m.var_log, mc_var, se_var),
            ("E[1/(1+gZ)]", m.mean_inv, mc_inv, se_inv),
        ] {
            ensure((quad - mc).abs() <= 3.0 * se, || {
                format!("g={snr} {name}: quadrature {quad} vs MC {mc} (se {se})")
            })?;
        }
        for f in [5u32, 20] {
            let quad = latdist::channel::fading_csi_coeffs(snr, f).map_err(|e| e.to_string())?;
            let mc_disp = mc_var + (1.0 - mc_inv * mc_inv) / f as f64;
            let se = se_var + 2.0 * mc_inv * se_inv / f as f64;
            ensure((quad.dispersion - mc_disp).abs() <= 3.0 * se, || {
                format!("g={snr} F={f}: V_c {} vs MC {mc_disp}", quad.dispersion)
            })?;
        }
        lines.push(format!("g={snr}: C_c {:.6}/{mc_log:.6}", m.mean_log));
    }
    Ok(format!(
        "Q roundtrip max rel err {worst:.1e}; {}",
        lines.join(", ")
    ))
}

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Duration,
    run: fn() -> Check,
}

fn main() {
    let criteria = [
        Criterion { id: 1, name: "worked LQ example", limit: Duration::from_millis(1), run: c1_worked_example },
        Criterion { id: 2, name: "bit-budget reductions", limit: Duration::from_secs(1), run: c2_bit_budgets },
        Criterion { id: 3, name: "latency reductions", limit: Duration::from_secs(30), run: c3_latency_reductions },
        Criterion { id: 4, name: "SNR scaling", limit: Duration::from_secs(1), run: c4_snr_scaling },
        Criterion { id: 5, name: "optimal beta_s monotonicity", limit: Duration::from_secs(60), run: c5_optimal_beta_s },
        Criterion { id: 6, name: "hull properties", limit: Duration::from_secs(120), run: c6_hull_properties },
        Criterion { id: 7, name: "conservative blocklengths", limit: Duration::from_secs(60), run: c7_conservativeness },
        Criterion { id: 8, name: "codec bijection", limit: Duration::from_secs(30), run: c8_codec_bijection },
        Criterion { id: 9, name: "LQ distortion bound", limit: Duration::from_secs(120), run: c9_lq_bound_and_optimality },
        Criterion { id: 10, name: "UQ and SLQ end-to-end bounds", limit: Duration::from_secs(60), run: c10_budgeted_bounds },
        Criterion { id: 11, name: "expected distortion Monte Carlo", limit: Duration::from_secs(120), run: c11_monte_carlo },
        Criterion { id: 12, name: "numerics", limit: Duration::from_secs(120), run: c12_numerics },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if elapsed <= c.limit => (true, d),
            Ok(d) => (false, format!("{d}; took {elapsed:?}, limit {:?}", c.limit)),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {} ({:.3?}): {}",
            c.id,
            if ok { "PASS" } else { "FAIL" },
            c.name,
            elapsed,
            detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
