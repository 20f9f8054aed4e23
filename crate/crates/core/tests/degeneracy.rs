
use fairmax_core::data::{split, synth_biased};
use fairmax_core::losses::grad_lc_wrt_clf;
use fairmax_core::train::{adversarial_train, gda_normal, plain_minibatch, pretrain_classifier, Alpha, TrainConfig};

fn bits(p: &fairmax_core::ModelParams) -> Vec<u64> {
    p.to_flat().iter().map(|v| v.to_bits()).collect()
}

#[test]
fn zero_lambda_is_plain_minibatch_training() {
    let ds = synth_biased(1200, 0.8, 5, 41).unwrap();
    let sp = split(&ds, 0.3, 41).unwrap();
    for noise_enabled in [false, true] {
        let cfg = TrainConfig {
            lambda: 0.0,
            epochs: 40,
            noise_enabled,
            seed: 41,
            ..TrainConfig::default()
        };
        let adversarial = adversarial_train(&sp, &cfg).unwrap();
        let init = pretrain_classifier(&sp.train, &cfg).unwrap();
        let plain = plain_minibatch(&sp.train, init, &cfg).unwrap();
        assert_eq!(adversarial.snapshots.len(), plain.len());
        for ((a, _), p) in adversarial.snapshots.iter().zip(&plain) {
            assert_eq!(bits(a), bits(p));
        }
    }
}

#[test]
fn zero_alpha_normal_update_is_plain_gradient_descent() {
    let ds = synth_biased(800, 0.8, 4, 42).unwrap();
    let sp = split(&ds, 0.3, 42).unwrap();
    let cfg = TrainConfig {
        alpha: Some(Alpha::Constant(0.0)),
        reg_weight: 0.0,
        epochs: 30,
        seed: 42,
        ..TrainConfig::default()
    };
    let gda = gda_normal(&sp, &cfg).unwrap();
    let mut w = pretrain_classifier(&sp.train, &cfg).unwrap();
    for (snapshot, _) in &gda.snapshots {
        let g = grad_lc_wrt_clf(&w, &sp.train).unwrap();
        w.descend(&g, cfg.eta2).unwrap();
        assert_eq!(bits(snapshot), bits(&w));
    }
}

#[test]
fn zero_epoch_pretraining_keeps_seeded_init() {
    let ds = synth_biased(300, 0.5, 3, 43).unwrap();
    let cfg = TrainConfig {
        pretrain_clf_epochs: 0,
        seed: 43,
        ..TrainConfig::default()
    };
    let a = pretrain_classifier(&ds, &cfg).unwrap();
    let b = pretrain_classifier(&ds, &cfg).unwrap();
    assert_eq!(bits(&a), bits(&b));
    // logistic initialization is all zeros
    assert!(a.to_flat().iter().all(|&v| v == 0.0));
}
