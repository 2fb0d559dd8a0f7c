use proptest::prelude::*;
use topocon::gradcheck::{
    central_difference, check_network_gradients, relative_error, NetGradCheckConfig,
};
use topocon::neural::{
    backward_combined, objective, train, Adam, AdamConfig, AeSpec, BranchedAutoencoder, Matrix,
    Mlp, MlpSpec, TrainConfig,
};
use topocon::Norm;

fn blob_data(rows: usize, dim: usize, seed: u64) -> Matrix {
    use rand::Rng;
    let mut r = topocon::rng::seeded(seed);
    let data = (0..rows * dim).map(|_| r.random_range(-1.0..1.0)).collect();
    Matrix::from_vec(rows, dim, data).unwrap()
}

#[test]
fn network_parameter_gradients() {
    for norm in [Norm::L2, Norm::L1] {
        let cfg = NetGradCheckConfig {
            trials: 40,
            norm,
            seed: 5,
            ..NetGradCheckConfig::default()
        };
        let r = check_network_gradients(&cfg).unwrap();
        assert_eq!(r.trials, 40);
        assert!(r.max_rel_error <= 1e-4, "{norm}: {r:?}");
    }
}

#[test]
fn mlp_input_gradient_matches_differences() {
    let net = Mlp::new(MlpSpec::new(vec![3, 5, 4, 2], 9)).unwrap();
    let x = blob_data(4, 3, 1);
    let (_, cache) = net.forward(&x).unwrap();
    assert!(net.kink_margin(&cache) > 1e-4);
    // objective: sum of outputs weighted by a fixed pattern
    let w: Vec<f64> = (0..8).map(|k| (k as f64 - 3.5) / 4.0).collect();
    let dout = Matrix::from_vec(4, 2, w.clone()).unwrap();
    let mut pgrad = vec![0.0; net.params().len()];
    let dx = net.backward(&cache, &dout, &mut pgrad);
    let f = |flat: &[f64]| {
        let y = net
            .predict(&Matrix::from_vec(4, 3, flat.to_vec()).unwrap())
            .unwrap();
        y.as_slice().iter().zip(&w).map(|(a, b)| a * b).sum::<f64>()
    };
    let numeric = central_difference(f, x.as_slice(), 1e-6);
    for (a, n) in dx.as_slice().iter().zip(&numeric) {
        assert!(relative_error(*a, *n) < 1e-7);
    }
}

#[test]
fn head_stays_block_diagonal_after_training() {
    let mut net = BranchedAutoencoder::new(AeSpec::new(vec![6, 8, 6], 3, 2, 4)).unwrap();
    let data = blob_data(40, 6, 2);
    let cfg = TrainConfig {
        batch_size: 10,
        epochs: 5,
        eta: 0.5,
        adam: AdamConfig {
            learning_rate: 1e-2,
            ..AdamConfig::default()
        },
        ..TrainConfig::default()
    };
    let before = net.head.clone();
    train(&mut net, &data, &cfg, |_| {}).unwrap();
    assert_ne!(before, net.head);
    let w = net.head.dense_weights();
    // branch j reads columns 2j..2j+2 of the pre-latent and writes rows 2j..2j+2
    for r in 0..w.rows() {
        for c in 0..w.cols() {
            if r / 2 != c / 2 {
                assert_eq!(w.get(r, c), 0.0, "({r}, {c})");
            }
        }
    }
}

#[test]
fn training_is_deterministic() {
    let data = blob_data(60, 4, 3);
    let cfg = TrainConfig {
        batch_size: 20,
        epochs: 3,
        seed: 17,
        ..TrainConfig::default()
    };
    let run = || {
        let mut net = BranchedAutoencoder::new(AeSpec::new(vec![4, 6, 4], 2, 2, 1)).unwrap();
        let curve = train(&mut net, &data, &cfg, |_| {}).unwrap();
        (net, curve)
    };
    let (na, ca) = run();
    let (nb, cb) = run();
    assert_eq!(na, nb);
    assert_eq!(ca, cb);
    assert_eq!(ca.len(), 9);
}

#[test]
fn training_reduces_the_objective() {
    let data = blob_data(100, 5, 4);
    let mut net = BranchedAutoencoder::new(AeSpec::new(vec![5, 10, 4], 2, 2, 2)).unwrap();
    let cfg = TrainConfig {
        batch_size: 50,
        epochs: 150,
        eta: 0.3,
        adam: AdamConfig {
            learning_rate: 3e-3,
            ..AdamConfig::default()
        },
        ..TrainConfig::default()
    };
    let batch = data.select_rows(&(0..50).collect::<Vec<_>>());
    let before = objective(&net, &batch, &cfg).unwrap().total;
    train(&mut net, &data, &cfg, |_| {}).unwrap();
    let after = objective(&net, &batch, &cfg).unwrap().total;
    assert!(after < 0.8 * before, "{before} -> {after}");
}

#[test]
fn model_file_round_trip() {
    let dir = std::env::temp_dir().join(format!("topocon-model-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("model.json");
    let net = BranchedAutoencoder::new(AeSpec::new(vec![3, 5, 4], 2, 3, 12)).unwrap();
    net.save_json(&path).unwrap();
    let loaded = BranchedAutoencoder::load_json(&path).unwrap();
    assert_eq!(net, loaded);
    let x = blob_data(7, 3, 0);
    assert_eq!(net.encode(&x).unwrap(), loaded.encode(&x).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn adam_first_step_is_signed_learning_rate() {
    let mut p = vec![0.5; 4];
    let g = [2.0, -0.1, 1e3, -7.0];
    let mut adam = Adam::new(AdamConfig::default(), &[4]);
    adam.step(&mut [&mut p], &[&g]);
    for (x, gi) in p.iter().zip(g) {
        // m̂ = g and v̂ = g² after one bias-corrected step
        let want = 0.5 - 1e-3 * gi / (gi.abs() + 1e-8);
        assert!((x - want).abs() < 1e-15);
    }
    assert_eq!(adam.steps_taken(), 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn decoder_gradient_independent_of_lambda(seed in any::<u64>(), lambda in 0.0f64..10.0) {
        let net = BranchedAutoencoder::new(AeSpec::new(vec![3, 4, 4], 2, 2, seed)).unwrap();
        let batch = blob_data(5, 3, seed ^ 1);
        let base = TrainConfig { batch_size: 5, lambda: 0.0, ..TrainConfig::default() };
        let with = TrainConfig { lambda, ..base.clone() };
        let (a, la, _) = backward_combined(&net, &batch, &base).unwrap();
        let (b, lb, _) = backward_combined(&net, &batch, &with).unwrap();
        prop_assert_eq!(a.decoder, b.decoder);
        prop_assert_eq!(la.reconstruction, lb.reconstruction);
        prop_assert!((lb.total - (lb.reconstruction + lambda * lb.connectivity)).abs() < 1e-12);
    }

    #[test]
    fn rows_are_processed_independently(seed in any::<u64>()) {
        let net = Mlp::new(MlpSpec::new(vec![3, 4, 2], seed)).unwrap();
        let x = blob_data(6, 3, seed);
        let full = net.predict(&x).unwrap();
        for r in 0..6 {
            let single = net.predict(&x.select_rows(&[r])).unwrap();
            prop_assert_eq!(single.row(0), full.row(r));
        }
    }
}

fn toy_gaussians(seed: u64) -> Matrix {
    let mut r = topocon::rng::seeded(seed);
    topocon::neural::toy::sample_gaussians(1500, 3, &mut r)
        .unwrap()
        .0
}

fn last_epoch_mean(
    records: &[topocon::neural::IterationRecord],
    f: fn(&topocon::neural::IterationRecord) -> f64,
) -> f64 {
    let last = records.last().unwrap().epoch;
    let tail: Vec<f64> = records.iter().filter(|r| r.epoch == last).map(f).collect();
    tail.iter().sum::<f64>() / tail.len() as f64
}

#[test]
fn large_lambda_halves_the_connectivity_loss() {
    let data = toy_gaussians(8);
    let mut net = BranchedAutoencoder::new(AeSpec::new(vec![2, 20, 20, 4], 2, 2, 5)).unwrap();
    let cfg = TrainConfig {
        lambda: 20.0,
        eta: 2.0,
        batch_size: 50,
        epochs: 60,
        adam: AdamConfig {
            learning_rate: 3e-3,
            ..AdamConfig::default()
        },
        ..TrainConfig::default()
    };
    let records = train(&mut net, &data, &cfg, |_| {}).unwrap();
    let initial = records[0].connectivity;
    let last = last_epoch_mean(&records, |r| r.connectivity);
    assert!(last <= 0.5 * initial, "{initial} -> {last}");
}

#[test]
fn pure_reconstruction_training_lowers_reconstruction() {
    let data = toy_gaussians(9);
    let mut net = BranchedAutoencoder::new(AeSpec::new(vec![2, 20, 4], 2, 2, 6)).unwrap();
    let cfg = TrainConfig {
        lambda: 0.0,
        batch_size: 50,
        epochs: 30,
        ..TrainConfig::default()
    };
    let records = train(&mut net, &data, &cfg, |_| {}).unwrap();
    let initial = records
        .iter()
        .filter(|r| r.epoch == 0)
        .map(|r| r.reconstruction)
        .sum::<f64>()
        / records.iter().filter(|r| r.epoch == 0).count() as f64;
    let last = last_epoch_mean(&records, |r| r.reconstruction);
    assert!(last < initial, "{initial} -> {last}");
}
