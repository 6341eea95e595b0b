mod common;

use common::{blobs, separable_one_vs_rest};
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twostream::svm::{
    auto_gamma, chi2_distance, decode_model, encode_model, gram_matrix, kernel_eval, predict,
    read_model, train, write_model, Gamma, KernelSpec, TrainConfig,
};
use twostream::Error;

const SELF_TOL: f64 = 1e-12;
const EIG_FLOOR: f64 = -1e-8;

fn nonneg_vectors(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random::<f64>() }).collect())
        .collect()
}

#[test]
fn chi2_self_similarity_is_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for x in nonneg_vectors(&mut rng, 100, 30) {
        for g in [0.01, 1.0, 37.5] {
            let k = kernel_eval(&x, &x, &KernelSpec::Chi2 { gamma: Gamma::Fixed(g) }).unwrap();
            assert!((k - 1.0).abs() <= SELF_TOL);
        }
    }
    let zero = vec![0.0; 5];
    assert_eq!(chi2_distance(&zero, &zero).unwrap(), 0.0);
}

#[test]
fn chi2_gram_is_positive_semidefinite() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let xs = nonneg_vectors(&mut rng, 50, 24);
    let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
    for spec in [KernelSpec::chi2_auto().resolve(&refs).unwrap(), KernelSpec::Chi2 { gamma: Gamma::Fixed(5.0) }] {
        let k = gram_matrix(&refs, &spec).unwrap();
        let m = DMatrix::from_row_slice(50, 50, &k);
        assert_eq!(m, m.transpose());
        let min = SymmetricEigen::new(m).eigenvalues.min();
        assert!(min >= EIG_FLOOR, "min eigenvalue {min}");
    }
}

#[test]
fn chi2_rejects_negative_input() {
    assert!(matches!(chi2_distance(&[1.0, -0.5], &[1.0, 1.0]), Err(Error::InvalidInput(_))));
    let spec = KernelSpec::Chi2 { gamma: Gamma::Fixed(1.0) };
    assert!(kernel_eval(&[0.1], &[-0.1], &spec).is_err());
    assert!(kernel_eval(&[0.1], &[0.1], &KernelSpec::chi2_auto()).is_err());
    assert!(kernel_eval(&[0.1, 0.2], &[0.1], &KernelSpec::Linear).is_err());
}

#[test]
fn auto_gamma_is_inverse_mean_distance() {
    let xs = [vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
    let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
    // distances: 2, 1, 1 -> mean 4/3
    assert!((auto_gamma(&refs).unwrap() - 0.75).abs() < 1e-15);
    let same = [vec![0.5, 0.5], vec![0.5, 0.5]];
    let refs: Vec<&[f64]> = same.iter().map(Vec::as_slice).collect();
    assert_eq!(auto_gamma(&refs).unwrap(), 1e12);
}

#[test]
fn linear_svm_separates_blobs() {
    let (x, y) = blobs(11, 20);
    for c in ["a", "b", "c"] {
        assert!(separable_one_vs_rest(&x, &y, c), "class {c} not separable");
    }
    let model = train(&x, &y, &TrainConfig::default(), &KernelSpec::Linear).unwrap();
    for (p, l) in x.iter().zip(&y) {
        assert_eq!(&predict(&model, p).unwrap().label, l);
    }
}

#[test]
fn training_is_bitwise_deterministic() {
    let (x, y) = blobs(5, 15);
    let cfg = TrainConfig { seed: 99, ..TrainConfig::default() };
    let k = KernelSpec::chi2_auto();
    let xs: Vec<Vec<f64>> = x.iter().map(|p| p.iter().map(|v| v + 1.0).collect()).collect();
    let a = encode_model(&train(&xs, &y, &cfg, &k).unwrap()).unwrap();
    let b = encode_model(&train(&xs, &y, &cfg, &k).unwrap()).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let c = pool.install(|| encode_model(&train(&xs, &y, &cfg, &k).unwrap()).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn saved_model_predicts_identically() {
    let (x, y) = blobs(8, 10);
    let xs: Vec<Vec<f64>> = x.iter().map(|p| p.iter().map(|v| v + 1.0).collect()).collect();
    let model = train(&xs, &y, &TrainConfig::default(), &KernelSpec::chi2_auto()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.psvm");
    write_model(&model, &path).unwrap();
    let back = read_model(&path).unwrap();
    assert_eq!(back, model);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let q = vec![rng.random_range(0.0..6.0), rng.random_range(0.0..5.0)];
        assert_eq!(predict(&model, &q).unwrap(), predict(&back, &q).unwrap());
    }
}

#[test]
fn malformed_models_rejected() {
    let (x, y) = blobs(8, 4);
    let bytes = encode_model(&train(&x, &y, &TrainConfig::default(), &KernelSpec::Linear).unwrap()).unwrap();
    assert!(matches!(decode_model(&bytes[..bytes.len() - 1]), Err(Error::Format { .. })));
    let mut bad = bytes.clone();
    bad[0] = b'Q';
    assert!(matches!(decode_model(&bad), Err(Error::Format { offset: 0, .. })));
    let mut extra = bytes.clone();
    extra.push(0);
    assert!(decode_model(&extra).is_err());
}

#[test]
fn training_input_validation() {
    let (x, y) = blobs(1, 3);
    let k = KernelSpec::Linear;
    let cfg = TrainConfig::default();
    assert!(train(&x, &vec!["a"; x.len()], &cfg, &k).is_err());
    assert!(train(&x[..2], &y, &cfg, &k).is_err());
    assert!(train(&x, &y, &TrainConfig { c_reg: 0.0, ..cfg }, &k).is_err());
    let model = train(&x, &y, &cfg, &k).unwrap();
    assert!(predict(&model, &[1.0]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chi2_kernel_bounds(
        x in prop::collection::vec(0.0f64..10.0, 1..20),
        g in 0.001f64..10.0,
        seed in any::<u64>(),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let y: Vec<f64> = x.iter().map(|_| rng.random_range(0.0..10.0)).collect();
        let spec = KernelSpec::Chi2 { gamma: Gamma::Fixed(g) };
        let kxy = kernel_eval(&x, &y, &spec).unwrap();
        prop_assert!(kxy > 0.0 && kxy <= 1.0);
        prop_assert_eq!(kxy, kernel_eval(&y, &x, &spec).unwrap());
        prop_assert!(chi2_distance(&x, &y).unwrap() >= 0.0);
    }
}
