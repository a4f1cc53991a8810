use metadist::moments::{
    approx_error_bound, approx_k, approx_sequence, coeffs, exact_sequence, laplace_integral,
    moment_approx, moment_exact,
};
use metadist::SystemParams;
use proptest::prelude::*;

#[test]
fn exact_moments_form_a_hausdorff_sequence() {
    // Moments of a [0,1] variable are completely monotone.
    for &theta in &[0.1, 1.0, 10.0] {
        let m = exact_sequence(&SystemParams::reference().with_theta(theta), 12, 1e-12).unwrap();
        assert!(m.hausdorff_min_difference(12) >= -1e-12, "theta={theta}");
    }
}

#[test]
fn closed_form_tracks_quadrature_within_the_bound() {
    let params = SystemParams::reference();
    for n in 1..=10 {
        let c = coeffs(&params, n).unwrap();
        let e = moment_exact(&params, n, 1e-12).unwrap();
        let a = moment_approx(&params, n).unwrap();
        let bound = std::f64::consts::PI
            * params.lambda_bs
            * approx_error_bound(c.a_coef, c.b_coef, 5.0).unwrap();
        assert!((e - a).abs() <= bound, "n={n}: {} > {bound}", (e - a).abs());
    }
}

#[test]
fn near_two_path_loss_is_almost_exact() {
    let params = SystemParams::reference().with_noise(1e-4);
    let params = SystemParams {
        gamma_pl: 2.01,
        ..params
    };
    for n in 1..=5 {
        let e = moment_exact(&params, n, 1e-12).unwrap();
        let a = moment_approx(&params, n).unwrap();
        assert!((e - a).abs() < 1e-4, "n={n}: {e} vs {a}");
    }
}

#[test]
fn noise_dominated_regime() {
    // Very weak power: the moment is set almost entirely by the noise term.
    let params = SystemParams::reference().with_power(1e-9);
    let e = moment_exact(&params, 1, 1e-12).unwrap();
    let a = moment_approx(&params, 1).unwrap();
    assert!(e > 0.0 && e < 0.1);
    assert!((e - a).abs() / e < 0.2);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn error_bound_is_sound(
        g in 2.2f64..6.0,
        la in -4.0f64..4.0,
        lb in -4.0f64..4.0,
    ) {
        let (a, b) = (10f64.powf(la), 10f64.powf(lb));
        let i = laplace_integral(a, b, g, 1e-13).unwrap();
        let err = (i - 1.0 / approx_k(a, b, g).unwrap()).abs();
        prop_assert!(err <= approx_error_bound(a, b, g).unwrap() * (1.0 + 1e-9) + 1e-15);
    }

    #[test]
    fn moments_decrease_with_order_and_threshold(theta in 0.01f64..50.0, power_db in -60.0f64..20.0) {
        let p = SystemParams::reference().with_theta(theta).with_power(10f64.powf(power_db / 10.0));
        let m = approx_sequence(&p, 6).unwrap();
        for w in m.values().windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        let higher = moment_approx(&p.with_theta(theta * 1.5), 1).unwrap();
        prop_assert!(higher <= m.get(1).unwrap());
    }
}
