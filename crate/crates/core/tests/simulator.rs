use metadist::moments::moment_exact;
use metadist::sim::{ks_statistic, run_campaign};
use metadist::{FadingMode, SimConfig, SystemParams};

fn config(realizations: usize, seed: u64) -> SimConfig {
    let mut cfg = SimConfig::reference(SystemParams::reference());
    cfg.num_realizations = realizations;
    cfg.rng_seed = seed;
    cfg
}

#[test]
fn empirical_moments_agree_with_quadrature() {
    let emp = run_campaign(&config(3_000, 7)).unwrap();
    let m = emp.moments(2).unwrap();
    for n in 1..=2 {
        let want = moment_exact(&emp.config.params, n as u32, 1e-12).unwrap();
        let z = (m.get(n).unwrap() - want).abs() / emp.moment_std_error(n as i32);
        assert!(z < 3.0, "n={n}: z = {z}");
    }
    assert_eq!(emp.redraws, 0);
}

#[test]
fn doubling_the_region_does_not_move_the_mean() {
    let small = run_campaign(&config(2_000, 3)).unwrap();
    let mut cfg = config(2_000, 3);
    cfg.region_radius *= 2.0;
    let large = run_campaign(&cfg).unwrap();
    let a = small.moments(1).unwrap().get(1).unwrap();
    let b = large.moments(1).unwrap().get(1).unwrap();
    let se = small.moment_std_error(1).hypot(large.moment_std_error(1));
    assert!((a - b).abs() < 4.0 * se, "{a} vs {b}");
}

#[test]
fn independent_seeds_give_the_same_distribution() {
    let a = run_campaign(&config(2_000, 1)).unwrap();
    let b = run_campaign(&config(2_000, 2)).unwrap();
    assert_ne!(a.ccp_samples, b.ccp_samples);
    // 0.1% critical value for n = m = 2000 is about 1.95 sqrt(2/2000).
    let d = ks_statistic(&a.ccp_samples, &b.ccp_samples);
    assert!(d < 1.95 * (2.0f64 / 2000.0).sqrt(), "D = {d}");
}

#[test]
fn sampled_mode_matches_analytic_mode_in_distribution() {
    let mut cfg = config(300, 11);
    cfg.num_channel_draws = 400;
    let analytic = run_campaign(&cfg).unwrap();
    cfg.fading_mode = FadingMode::Sampled;
    let sampled = run_campaign(&cfg).unwrap();
    // Same geometry per realization; fading noise only adds binomial spread.
    let a = analytic.moments(1).unwrap().get(1).unwrap();
    let s = sampled.moments(1).unwrap().get(1).unwrap();
    assert!(
        (a - s).abs() < 4.0 * (0.25f64 / (300.0 * 400.0)).sqrt() + 1e-3,
        "{a} vs {s}"
    );
}

#[test]
fn campaigns_are_reproducible() {
    let a = run_campaign(&config(500, 99)).unwrap();
    let b = run_campaign(&config(500, 99)).unwrap();
    assert_eq!(a, b);
}
