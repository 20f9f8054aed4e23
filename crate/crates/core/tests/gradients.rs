mod common;

use common::*;
use fairmax_core::losses::{adversary_loss, grad_lf_wrt_adv};
use fairmax_core::model::{adversary_scores, predict_scores, AdversaryParams, ModelKind};

#[test]
fn logistic_gradients_match_central_differences() {
    let (c, f) = gradient_check(ModelKind::Logistic, 20, 11);
    assert!(c <= 1e-6, "L_C relative error {c:e}");
    assert!(f <= 1e-6, "L_F relative error {f:e}");
}

#[test]
fn mlp_gradients_match_central_differences() {
    let (c, f) = gradient_check(ModelKind::Mlp, 20, 12);
    assert!(c <= 1e-4, "L_C relative error {c:e}");
    assert!(f <= 1e-4, "L_F relative error {f:e}");
}

#[test]
fn adversary_gradient_matches_central_differences() {
    let mut rng = rng(13);
    for _ in 0..20 {
        let ds = random_dataset(&mut rng, 30, 3);
        let params = random_params(&mut rng, ModelKind::Logistic, 3);
        let scores = predict_scores(&params, ds.features()).unwrap();
        let adv = random_adversary(&mut rng);
        let loss = |u: &[f64]| {
            let a = adversary_scores(&AdversaryParams::new(u[0], u[1]), &scores);
            adversary_loss(&a, ds.sensitive()).unwrap().value
        };
        let fd = central_differences(&[adv.slope(), adv.intercept()], loss);
        let an = grad_lf_wrt_adv(&scores, ds.sensitive(), &adv).unwrap();
        assert!(relative_error(an.values(), &fd) <= 1e-6);
    }
}

/// Newton's method on the two-parameter logistic fit reaches the optimum,
/// where the analytic gradient must vanish.
#[test]
fn adversary_gradient_vanishes_at_optimum() {
    let mut rng = rng(14);
    let ds = random_dataset(&mut rng, 200, 3);
    let params = random_params(&mut rng, ModelKind::Logistic, 3);
    let s = predict_scores(&params, ds.features()).unwrap();
    let z = ds.sensitive();
    let mut u = [0.0f64; 2];
    for _ in 0..50 {
        let (mut g, mut h) = ([0.0; 2], [[0.0; 2]; 2]);
        for (&si, &zi) in s.iter().zip(z) {
            let a = 1.0 / (1.0 + (-(u[0] * si + u[1])).exp());
            let x = [si, 1.0];
            for r in 0..2 {
                g[r] += (a - zi as f64) * x[r];
                for c in 0..2 {
                    h[r][c] += a * (1.0 - a) * x[r] * x[c];
                }
            }
        }
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        u[0] -= (h[1][1] * g[0] - h[0][1] * g[1]) / det;
        u[1] -= (h[0][0] * g[1] - h[1][0] * g[0]) / det;
    }
    let g = grad_lf_wrt_adv(&s, z, &AdversaryParams::new(u[0], u[1])).unwrap();
    assert!(g.norm() <= 1e-6, "{}", g.norm());
}
