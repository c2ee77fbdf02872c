//! Dataset loading and `k_top` selection against direct scans.

use latdist::budget::budget_slq;
use latdist::ingest::{
    load_dataset, recommend_ktop, save_dataset, tail_masses, top_mass_curve, DatasetFormat,
    VectorDataset,
};
use latdist::quantize::{slq_decode, slq_encode};
use latdist::{tv_distance, ProbVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Distribution};

fn dirichlet_rows<const K: usize>(n: usize, alpha: f64, seed: u64) -> VectorDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Dirichlet::new([alpha; K]).unwrap();
    let rows = (0..n)
        .map(|_| {
            let v: [f64; K] = dist.sample(&mut rng);
            ProbVector::new(&v, true).unwrap()
        })
        .collect();
    VectorDataset::new(rows, "dirichlet").unwrap()
}

/// Rows with a shuffled power-law profile `i^-s`.
fn power_law_rows(n: usize, k: usize, seed: u64) -> VectorDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n)
        .map(|_| {
            let s = rng.random_range(0.8..2.5);
            let mut w: Vec<f64> = (1..=k).map(|i| (i as f64).powf(-s)).collect();
            for i in (1..k).rev() {
                w.swap(i, rng.random_range(0..=i));
            }
            ProbVector::new(&w, true).unwrap()
        })
        .collect();
    VectorDataset::new(rows, "power-law").unwrap()
}

fn scan_delta_avg(ds: &VectorDataset, k_top: usize) -> f64 {
    let total: f64 = ds
        .vectors()
        .iter()
        .map(|v| {
            let mut s = v.values().to_vec();
            s.sort_by(|a, b| b.total_cmp(a));
            s[k_top..].iter().sum::<f64>()
        })
        .sum();
    total / ds.len() as f64
}

#[test]
fn dirichlet_rows_survive_save_and_load() {
    let ds = dirichlet_rows::<12>(10_000, 0.7, 1);
    let dir = tempfile::tempdir().unwrap();
    for (name, format) in [("rows.jsonl", DatasetFormat::JsonLines), ("rows.csv", DatasetFormat::Delimited)] {
        let path = dir.path().join(name);
        save_dataset(&ds, &path, format).unwrap();
        let back = load_dataset(&path, format).unwrap();
        assert_eq!(back.len(), ds.len());
        // rows are renormalised on load, which may move the last ulp
        for (a, b) in ds.vectors().iter().zip(back.vectors()) {
            for (x, y) in a.values().iter().zip(b.values()) {
                assert!((x - y).abs() <= 4.0 * f64::EPSILON * x, "{x} vs {y}");
            }
        }
    }
}

#[test]
fn power_law_curve_matches_scan() {
    let ds = power_law_rows(500, 40, 2);
    let curve = top_mass_curve(&ds, 1..=40).unwrap();
    for (&t, &d) in curve.k_top.iter().zip(&curve.delta_avg) {
        assert!((d - scan_delta_avg(&ds, t)).abs() < 1e-12, "k_top {t}");
    }
    assert!(curve.delta_avg.windows(2).all(|w| w[1] <= w[0]));

    for target in [0.3, 0.1, 0.05, 0.01, 0.001] {
        let rec = recommend_ktop(&ds, target).unwrap();
        let first = (1..=40).find(|&t| scan_delta_avg(&ds, t) < target).unwrap();
        assert_eq!(rec.k_top, first, "target {target}");
        let tails = tail_masses(&ds, rec.k_top).unwrap();
        let over = tails.iter().filter(|&&t| t > rec.delta_avg + 1e-12).count();
        assert_eq!(rec.violation_fraction, over as f64 / ds.len() as f64);
    }
}

#[test]
fn recommended_k_top_keeps_slq_within_budget() {
    let ds = power_law_rows(2000, 60, 3);
    let beta_s = 0.08;
    let rec = recommend_ktop(&ds, 0.02).unwrap();
    let ell = budget_slq(60, rec.k_top, rec.delta_avg, beta_s).unwrap().ell;
    let tails = tail_masses(&ds, rec.k_top).unwrap();
    let mut distortion = 0.0;
    for (p, &tail) in ds.vectors().iter().zip(&tails) {
        let q = slq_decode(&slq_encode(p, rec.k_top, ell).unwrap()).unwrap();
        let tv = tv_distance(p, &q).unwrap();
        if tail <= rec.delta_avg {
            assert!(tv <= beta_s, "TV {tv} with tail {tail}");
        }
        distortion += tv;
    }
    assert!(distortion / ds.len() as f64 <= beta_s);
}
