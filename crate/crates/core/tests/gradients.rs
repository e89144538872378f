mod common;

use aol_core::predictor::{
    batch_loss, loss_and_gradient, predict, Arch, PredictorSpec, WeightVector,
};
use aol_core::{mse_loss, Trajectory};
use common::{gradient_check, random_batch};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn linear_gradient_matches_finite_differences() {
    let spec = PredictorSpec::new(Arch::Linear).with_horizons(4, 3);
    let worst = gradient_check(&spec, 20, 1);
    assert!(worst < 1e-4, "max relative error {worst}");
}

#[test]
fn recurrent_gradient_matches_finite_differences() {
    let spec = PredictorSpec::new(Arch::Recurrent)
        .with_hidden_size(3)
        .with_horizons(5, 4);
    let worst = gradient_check(&spec, 20, 2);
    assert!(worst < 1e-4, "max relative error {worst}");
}

#[test]
fn linear_single_output_gradient_has_outer_product_form() {
    // One-step toy: t_obs = 2 (one input displacement), t_pred = 1, so the
    // loss is |A f + b - d|^2 and dL/dA = 2 (A f + b - d) f^T, dL/db = 2 (A f + b - d).
    let spec = PredictorSpec::new(Arch::Linear)
        .with_horizons(2, 1)
        .with_coord_scale(1.0);
    // A = [[0.5, 0.0], [0.0, 2.0]], b = [1.0, -1.0]
    let w = WeightVector::new(&spec, vec![0.5, 0.0, 0.0, 2.0, 1.0, -1.0]).unwrap();
    let obs = Trajectory::from_xy(&[(0.0, 0.0), (2.0, 3.0)]).unwrap();
    let target = Trajectory::from_xy(&[(4.0, 4.0)]).unwrap();
    let f = [2.0, 3.0];
    let d = [2.0, 1.0]; // target minus last observed
    let out = [0.5 * f[0] + 1.0, 2.0 * f[1] - 1.0];
    let r = [out[0] - d[0], out[1] - d[1]];
    let expected = [
        2.0 * r[0] * f[0],
        2.0 * r[0] * f[1],
        2.0 * r[1] * f[0],
        2.0 * r[1] * f[1],
        2.0 * r[0],
        2.0 * r[1],
    ];
    let (loss, grad) = loss_and_gradient(&spec, &w, &[(&obs, &target)]).unwrap();
    assert_eq!(loss, r[0] * r[0] + r[1] * r[1]);
    assert_eq!(grad.values(), &expected[..]);
}

#[test]
fn reported_loss_is_scaled_mse_of_prediction() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for arch in [Arch::ConstantVelocity, Arch::Linear, Arch::Recurrent] {
        let spec = PredictorSpec::new(arch).with_hidden_size(6);
        let w = aol_core::predictor::init_weights(&spec, 3).unwrap();
        let owned = random_batch(&mut rng, &spec, 4);
        let batch: Vec<_> = owned.iter().map(|(o, t)| (o, t)).collect();
        let (loss, _) = loss_and_gradient(&spec, &w, &batch).unwrap();
        let s2 = spec.coord_scale * spec.coord_scale;
        let composed: f64 = owned
            .iter()
            .map(|(o, t)| mse_loss(&predict(&spec, &w, o).unwrap(), t).unwrap() * s2)
            .sum::<f64>()
            / owned.len() as f64;
        assert!(
            (loss - composed).abs() <= 1e-10 * composed,
            "{arch}: {loss} vs {composed}"
        );
        assert!((batch_loss(&spec, &w, &batch).unwrap() - composed).abs() <= 1e-12 * composed);
    }
}
