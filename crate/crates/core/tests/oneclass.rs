mod common;

use common::auc_pairwise;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use topocon::neural::{train, AdamConfig, AeSpec, BranchedAutoencoder, Matrix, TrainConfig};
use topocon::oneclass::{evaluate_auc, fit, one_vs_all, OneClassModel, OneVsAllConfig};

fn three_blobs(per_class: usize, dim: usize, seed: u64) -> (Matrix, Vec<i64>) {
    let mut r = topocon::rng::seeded(seed);
    let means: Vec<Vec<f64>> = (0..3)
        .map(|_| (0..dim).map(|_| r.random_range(-3.0..3.0)).collect())
        .collect();
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for k in 0..per_class * 3 {
        let c = k % 3;
        let noise: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(&mut r)).collect();
        rows.push(
            means[c]
                .iter()
                .zip(noise)
                .map(|(m, z)| m + 0.5 * z)
                .collect(),
        );
        labels.push(c as i64);
    }
    (Matrix::from_rows(&rows).unwrap(), labels)
}

fn trained_encoder(data: &Matrix, eta: f64) -> BranchedAutoencoder {
    let mut net = BranchedAutoencoder::new(AeSpec::new(vec![data.cols(), 16, 8], 2, 4, 1)).unwrap();
    let cfg = TrainConfig {
        eta,
        batch_size: 50,
        epochs: 40,
        adam: AdamConfig {
            learning_rate: 3e-3,
            ..AdamConfig::default()
        },
        ..TrainConfig::default()
    };
    train(&mut net, data, &cfg, |_| {}).unwrap();
    net
}

#[test]
fn three_blob_one_vs_all() {
    let (x, y) = three_blobs(150, 8, 3);
    let eta = 0.5;
    let net = trained_encoder(&x, eta);
    let cfg = OneVsAllConfig {
        m: 50,
        eta,
        runs: 3,
        seed: 1,
    };
    let report = one_vs_all(&net, &x, &y, None, &cfg).unwrap();
    assert!(report.mean_auc >= 0.9, "{report:?}");
}

fn latent_strategy() -> impl Strategy<Value = (Matrix, usize, usize)> {
    (1usize..4, 1usize..4, 1usize..30).prop_flat_map(|(b, d, m)| {
        prop::collection::vec(-2.0f64..2.0, m * b * d)
            .prop_map(move |v| (Matrix::from_vec(m, b * d, v).unwrap(), b, d))
    })
}

proptest! {
    #[test]
    fn scores_monotone_in_radius_and_bounded(
        (latent, b, d) in latent_strategy(),
        query_seed in any::<u64>(),
        r1 in 0.0f64..4.0,
        r2 in 0.0f64..4.0,
    ) {
        let model = OneClassModel::from_latents(&latent, b, d, r1).unwrap();
        let mut rng = topocon::rng::seeded(query_seed);
        let q: Vec<f64> = (0..b * d).map(|_| rng.random_range(-2.0..2.0)).collect();
        let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
        let s_lo = model.score_latent_with_radius(&q, lo);
        let s_hi = model.score_latent_with_radius(&q, hi);
        prop_assert!(s_lo <= s_hi);
        prop_assert!(s_hi <= b * latent.rows());
        // a stored sample always finds at least itself in every branch
        prop_assert!(model.score_latent(latent.row(0)) >= b);
    }

    #[test]
    fn auc_equals_pair_counting(
        pos in prop::collection::vec(0u8..20, 1..200),
        neg in prop::collection::vec(0u8..20, 1..200),
    ) {
        // small integer range forces many ties
        let pos: Vec<f64> = pos.into_iter().map(f64::from).collect();
        let neg: Vec<f64> = neg.into_iter().map(f64::from).collect();
        prop_assert_eq!(evaluate_auc(&pos, &neg).unwrap(), auc_pairwise(&pos, &neg));
    }

    #[test]
    fn auc_invariant_under_increasing_maps(
        pos in prop::collection::vec(-5.0f64..5.0, 1..60),
        neg in prop::collection::vec(-5.0f64..5.0, 1..60),
    ) {
        let f = |v: &[f64]| v.iter().map(|x| x.exp() * 3.0 + 1.0).collect::<Vec<_>>();
        let g = |v: &[f64]| v.iter().map(|x| x * x * x + 7.0 * x).collect::<Vec<_>>();
        let base = evaluate_auc(&pos, &neg).unwrap();
        prop_assert_eq!(base, evaluate_auc(&f(&pos), &f(&neg)).unwrap());
        prop_assert_eq!(base, evaluate_auc(&g(&pos), &g(&neg)).unwrap());
        prop_assert!((0.0..=1.0).contains(&base));
        // swapping the roles mirrors the AUC
        prop_assert!((evaluate_auc(&neg, &pos).unwrap() - (1.0 - base)).abs() < 1e-12);
    }
}

#[test]
fn fit_matches_precomputed_latents() {
    let (x, _) = three_blobs(10, 4, 0);
    let net = BranchedAutoencoder::new(AeSpec::new(vec![4, 6, 4], 2, 2, 5)).unwrap();
    let a = fit(&net, &x, 1.0).unwrap();
    let b = OneClassModel::from_latents(&net.encode(&x).unwrap(), 2, 2, 1.0).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.sample_count(), 30);
    assert_eq!(
        a.score(&net, &x).unwrap(),
        a.score_latents(&net.encode(&x).unwrap()).unwrap()
    );
    assert!(fit(&net, &Matrix::zeros(3, 5), 1.0).is_err());
}

#[test]
fn small_classes_are_skipped() {
    let (mut x, mut y) = three_blobs(20, 4, 1);
    let extra = Matrix::from_rows(&[vec![9.0; 4], vec![9.5; 4]]).unwrap();
    let mut rows: Vec<Vec<f64>> = (0..x.rows()).map(|r| x.row(r).to_vec()).collect();
    rows.extend((0..2).map(|r| extra.row(r).to_vec()));
    x = Matrix::from_rows(&rows).unwrap();
    y.extend([7, 7]);
    let net = BranchedAutoencoder::new(AeSpec::new(vec![4, 6, 4], 2, 2, 5)).unwrap();
    let cfg = OneVsAllConfig {
        m: 5,
        eta: 1.0,
        runs: 2,
        seed: 0,
    };
    let report = one_vs_all(&net, &x, &y, None, &cfg).unwrap();
    assert_eq!(report.skipped, vec![7]);
    assert_eq!(report.classes.len(), 3);
    assert!(report.classes.iter().all(|c| c.runs.len() == 2));
    assert_eq!(report, one_vs_all(&net, &x, &y, None, &cfg).unwrap());
}

#[test]
fn separate_test_set() {
    let (train_x, train_y) = three_blobs(40, 6, 2);
    let (test_x, test_y) = three_blobs(20, 6, 2);
    let net = trained_encoder(&train_x, 0.5);
    let cfg = OneVsAllConfig {
        m: 30,
        eta: 0.5,
        runs: 1,
        seed: 4,
    };
    let report = one_vs_all(&net, &train_x, &train_y, Some((&test_x, &test_y)), &cfg).unwrap();
    assert_eq!(report.classes.len(), 3);
    assert!(report.mean_auc > 0.5);
}
