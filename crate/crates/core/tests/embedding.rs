// SPDX-License-Identifier: Apache-2.0

use markov_embed::analysis::{dist_test, match_spectra, noisy_pair, predicted_trajectory};
use markov_embed::embedding::*;
use markov_embed::models::{
    generate_dataset, prepare_model, FiniteEnvConfig, ModelConfig, TrajectoryDataset,
};
use markov_embed::qcore::{devectorize, linalg, sample_pure_state, ComplexMatrix, Trajectory};
use markov_embed::{Error, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dataset(trajectories: Vec<Trajectory>) -> TrajectoryDataset {
    TrajectoryDataset {
        system_dim: trajectories[0][0].rows(),
        tau: 1.0,
        trajectories,
        noise_sigma: 0.0,
        metadata: None,
    }
}

/// `ϱ(k+1) = p·ϱ(k) + (1−p)·I/2` from random pure states.
fn depolarizing(count: usize, steps: usize, p: f64, seed: u64) -> TrajectoryDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    let trajs = (0..count)
        .map(|_| {
            let mut rho = sample_pure_state(2, &mut rng).unwrap().projector();
            let mut t = Vec::with_capacity(steps);
            for _ in 0..steps {
                t.push(rho.clone());
                let mut next = rho.scale_real(p);
                next.add_scaled(C64::new(1.0 - p, 0.0), &half);
                rho = next;
            }
            t
        })
        .collect();
    dataset(trajs)
}

fn finite(d_env: usize) -> ModelConfig {
    ModelConfig::FiniteEnv(FiniteEnvConfig { d_env, ..FiniteEnvConfig::default() })
}

fn identity_error(m: &EmbeddingModel) -> f64 {
    m.encoder_decoder_product().max_abs_diff(&ComplexMatrix::identity(m.rank))
}

fn assert_same_spectrum(a: &[C64], b: &[C64], tol: f64) {
    assert_eq!(a.len(), b.len());
    let m = match_spectra(a, b);
    assert!(m.max_distance < tol, "spectra differ by {}", m.max_distance);
}

#[test]
fn depolarizing_map_spectrum() {
    let m = fit(&depolarizing(4, 20, 0.9, 1), 1, &ThresholdConfig::default()).unwrap();
    assert_eq!(m.rank, 4);
    let want = [1.0, 0.9, 0.9, 0.9].map(|x| C64::new(x, 0.0));
    for (got, want) in m.eigenvalues.iter().zip(&want) {
        assert!((got - want).norm() < 1e-8, "{got} vs {want}");
    }
    assert!(identity_error(&m) < 1e-8);

    let single = fit(&depolarizing(1, 20, 0.9, 2), 1, &ThresholdConfig::default()).unwrap();
    assert_eq!(single.rank, 2);
    assert!((single.eigenvalues[0] - C64::new(1.0, 0.0)).norm() < 1e-8);
    assert!((single.eigenvalues[1] - C64::new(0.9, 0.0)).norm() < 1e-8);
}

#[test]
fn stationary_history_predicts_itself() {
    let m = fit(&depolarizing(4, 20, 0.9, 1), 2, &ThresholdConfig::default()).unwrap();
    let half = ComplexMatrix::identity(2).scale_real(0.5);
    let history = vec![half.clone(); 2];
    for n in [1, 3, 50] {
        assert!(m.predict(&history, n, false).unwrap().max_abs_diff(&half) < 1e-8);
    }
}

#[test]
fn finite_env_noiseless_fit() {
    let (ds, test) = generate_dataset(&finite(2), 4, 200, 11).unwrap();
    let m = fit(&ds, 75, &ThresholdConfig::default()).unwrap();
    assert!(m.rank <= natural_rank(2, 2));
    assert_eq!(effective_env_dim(m.rank, 2), 2);
    assert!(identity_error(&m) < 1e-8);
    let reference = linalg::eigenvalues(&prepare_model(&finite(2), 11).unwrap().propagator).unwrap();
    for lambda in &m.eigenvalues {
        let nearest = reference.iter().map(|z| (z - lambda).norm()).fold(f64::INFINITY, f64::min);
        assert!(nearest < 1e-6);
    }
    // one step ahead on training data
    let traj = &ds.trajectories[2];
    for start in [0, 40, 124] {
        let next = m.predict(&traj[start..start + 75], 1, false).unwrap();
        assert!(next.max_abs_diff(&traj[start + 75]) < 1e-8);
    }
    let pred = predicted_trajectory(&m, &test).unwrap();
    assert!(dist_test(&pred, &test, 75).unwrap() < 1e-6);
}

#[test]
fn descending_modulus_order() {
    let (ds, _) = generate_dataset(&finite(3), 4, 200, 5).unwrap();
    let m = fit(&ds, 30, &ThresholdConfig::with_sigma(1e-4)).unwrap();
    for w in m.eigenvalues.windows(2) {
        assert!(w[0].norm() >= w[1].norm() - MODULUS_TIE_TOL);
    }
}

#[test]
fn trajectory_order_does_not_matter() {
    let (ds, _) = generate_dataset(&finite(2), 3, 120, 4).unwrap();
    let (noisy, _) = noisy_pair(&ds, &ds.trajectories[0], 1e-3, 4).unwrap();
    let mut swapped = noisy.clone();
    swapped.trajectories.reverse();
    let cfg = ThresholdConfig::with_sigma(1e-3);
    let a = fit(&noisy, 30, &cfg).unwrap();
    let b = fit(&swapped, 30, &cfg).unwrap();
    assert_eq!(a.rank, b.rank);
    assert_same_spectrum(&a.eigenvalues, &b.eigenvalues, 1e-9);
    let m_bar = |m: &EmbeddingModel| {
        m.decoder.matmul(&ComplexMatrix::from_diag(&m.eigenvalues)).matmul(&m.encoder)
    };
    assert!(m_bar(&a).max_abs_diff(&m_bar(&b)) < 1e-9);
}

#[test]
fn literal_variant_agrees() {
    let (ds, test) = generate_dataset(&finite(2), 4, 100, 9).unwrap();
    let cfg = ThresholdConfig::default();
    let a = fit_with(&ds, 10, &cfg, DmdVariant::Projected).unwrap();
    let b = fit_with(&ds, 10, &cfg, DmdVariant::Literal).unwrap();
    assert_eq!(a.rank, b.rank);
    assert_same_spectrum(&a.eigenvalues, &b.eigenvalues, 1e-8);
    assert!(identity_error(&b) < 1e-8);
    let pa = a.predict(&test[..10], 7, false).unwrap();
    let pb = b.predict(&test[..10], 7, false).unwrap();
    assert!(pa.max_abs_diff(&pb) < 1e-8);
}

#[test]
fn synthetic_linear_embedding_is_recovered() {
    // hidden x(k+1) = A x(k) observed through a fixed linear map
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut gauss = || C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
    let lambdas: Vec<C64> = (0..6)
        .map(|k| C64::from_polar(0.97 - 0.05 * k as f64, 0.3 + 0.4 * k as f64))
        .collect();
    let p = ComplexMatrix::from_fn(6, 6, |_, _| gauss());
    let a = p.matmul(&ComplexMatrix::from_diag(&lambdas)).matmul(&linalg::inverse(&p).unwrap());
    let c = ComplexMatrix::from_fn(4, 6, |_, _| gauss());
    let mut make = |steps: usize| {
        let mut x: Vec<C64> = (0..6).map(|_| gauss()).collect();
        let mut out = Vec::new();
        for _ in 0..steps {
            out.push(devectorize(&c.matvec(&x), 2).unwrap());
            x = a.matvec(&x);
        }
        out
    };
    let trajs: Vec<Trajectory> = (0..3).map(|_| make(40)).collect();
    let held_out = make(40);
    let m = fit(&dataset(trajs), 2, &ThresholdConfig::default()).unwrap();
    assert_eq!(m.rank, 6);
    assert_same_spectrum(&m.eigenvalues, &lambdas, 1e-8);
    let pred = m.predict_trajectory(&held_out[..2], 38, false).unwrap();
    for (p, want) in pred.iter().zip(&held_out[2..]) {
        assert!(p.max_abs_diff(want) < 1e-8);
    }
}

#[test]
fn trajectory_prediction_matches_single_predictions() {
    let (ds, test) = generate_dataset(&finite(2), 4, 120, 3).unwrap();
    let m = fit(&ds, 20, &ThresholdConfig::default()).unwrap();
    let history = &test[..20];
    let traj = m.predict_trajectory(history, 30, false).unwrap();
    assert!(traj[0].max_abs_diff(&m.predict(history, 1, false).unwrap()) < 1e-15);
    for n in [5, 17, 30] {
        assert!(traj[n - 1].max_abs_diff(&m.predict(history, n, false).unwrap()) < 1e-10);
    }
    let projected = m.predict_trajectory(history, 30, true).unwrap();
    for rho in &projected {
        markov_embed::qcore::check_density(rho, 1e-9).unwrap();
    }
    assert!(m.predict(history, 0, false).is_err());
    assert!(m.predict(&test[..19], 1, false).is_err());
}

#[test]
fn exact_rank_denoising_reproduces_clean_data() {
    let (ds, _) = generate_dataset(&finite(2), 4, 150, 2).unwrap();
    let hs = build_shifted_and_stack(&ds.trajectories, 40).unwrap();
    let s = linalg::singular_values(&hs.h).unwrap();
    let eta = optimal_rank(&s, hs.h.rows(), hs.h.cols(), &ThresholdConfig::default()).unwrap();
    let (_, back) = denoise(&hs, eta, false).unwrap();
    for (a, b) in back.iter().flatten().zip(ds.trajectories.iter().flatten()) {
        assert!(a.max_abs_diff(b) < 1e-10);
    }
}

#[test]
fn noisy_prediction_quality() {
    let (ds, test) = generate_dataset(&finite(3), 4, 200, 1).unwrap();
    let (noisy, noisy_test) = noisy_pair(&ds, &test, 1e-3, 1).unwrap();
    let m = fit(&noisy, 75, &ThresholdConfig::with_sigma(1e-3)).unwrap();
    assert!(identity_error(&m) < 1e-8);
    let pred = predicted_trajectory(&m, &noisy_test).unwrap();
    assert!(dist_test(&pred, &test, 75).unwrap() < 0.05);
}

#[test]
fn fit_errors() {
    let ds = depolarizing(2, 10, 0.9, 1);
    assert!(fit(&ds, 10, &ThresholdConfig::default()).is_err());
    assert!(matches!(fit(&ds, 2, &ThresholdConfig::with_sigma(10.0)), Err(Error::NoSignal)));
    let empty = TrajectoryDataset { trajectories: vec![], ..ds };
    assert!(fit(&empty, 2, &ThresholdConfig::default()).is_err());
}

#[test]
fn jordan_block_still_fits() {
    // a 2×2 Jordan block splits into eigenvalues ~√ε apart; the eigenvector
    // matrix stays well inside the accepted conditioning, so the fit succeeds
    let lambda = 0.9;
    let trajs: Vec<Trajectory> = [(1.0, 0.3), (-0.4, 1.0)]
        .iter()
        .map(|&(a, b)| {
            let (mut x0, mut x1) = (C64::new(a, 0.0), C64::new(b, 0.0));
            (0..30)
                .map(|_| {
                    let m = ComplexMatrix::from_vec(2, 2, vec![x0, x1, x0 * 0.5, x1 * 2.0]).unwrap();
                    x0 = x0 * lambda + x1;
                    x1 *= lambda;
                    m
                })
                .collect()
        })
        .collect();
    let m = fit(&dataset(trajs), 1, &ThresholdConfig::default()).unwrap();
    assert_eq!(m.rank, 2);
    for z in &m.eigenvalues {
        assert!((z - C64::new(lambda, 0.0)).norm() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn rank_is_monotone_in_sigma(
        mut values in prop::collection::vec(0.0f64..10.0, 1..40),
        s1 in 0.0f64..1.0,
        s2 in 0.0f64..1.0,
        m in 1usize..200,
        n in 1usize..200,
    ) {
        values.sort_by(|a, b| b.total_cmp(a));
        let (lo, hi) = if s1 <= s2 { (s1, s2) } else { (s2, s1) };
        let r_lo = optimal_rank(&values, m, n, &ThresholdConfig::with_sigma(lo)).unwrap();
        let r_hi = optimal_rank(&values, m, n, &ThresholdConfig::with_sigma(hi)).unwrap();
        prop_assert!(r_hi <= r_lo || lo == 0.0);
        prop_assert!(r_lo <= values.len());
    }

    #[test]
    fn threshold_is_transpose_symmetric(m in 1usize..500, n in 1usize..500, sigma in 1e-6f64..1.0) {
        let cfg = ThresholdConfig::with_sigma(sigma);
        prop_assert_eq!(noise_threshold(1.0, m, n, &cfg), noise_threshold(1.0, n, m, &cfg));
    }

    #[test]
    fn hankel_columns_are_windows(steps in 2usize..12, depth in 1usize..6, seed in 0u64..1000) {
        prop_assume!(depth < steps);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let traj: Vec<ComplexMatrix> = (0..steps)
            .map(|_| ComplexMatrix::from_fn(2, 2, |_, _| C64::new(rng.random(), rng.random())))
            .collect();
        let h = build_hankel(&traj, depth).unwrap();
        prop_assert_eq!(h.shape(), (4 * depth, steps - depth + 1));
        for j in 0..h.cols() {
            for b in 0..depth {
                let block: Vec<C64> = (0..4).map(|i| h[(4 * b + i, j)]).collect();
                prop_assert_eq!(devectorize(&block, 2).unwrap(), traj[j + b].clone());
            }
        }
    }
}
