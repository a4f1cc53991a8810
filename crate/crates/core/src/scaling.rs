//! Minimum transmit power that meets P(C > x) ≥ 1 − ε through the
//! second-moment bound P(C ≥ x) ≥ μ₂ − x², with μ₂ from the closed-form
//! approximation. The solution scales as p = c·λ^{−γ/2}.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::{rho_n, SystemParams};
use crate::specfun::gamma;

/// Reliability requirement P(C > x_rel) ≥ 1 − epsilon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QosSpec {
    pub x_rel: f64,
    pub epsilon: f64,
}

impl QosSpec {
    pub fn new(x_rel: f64, epsilon: f64) -> Result<Self> {
        if !(x_rel > 0.0 && x_rel < 1.0) || !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParams(format!(
                "need 0 < x < 1 and 0 < epsilon < 1, got x = {x_rel}, epsilon = {epsilon}"
            )));
        }
        Ok(Self { x_rel, epsilon })
    }

    /// Target second moment 1 − ε + x².
    pub fn target_mu2(&self) -> f64 {
        1.0 - self.epsilon + self.x_rel * self.x_rel
    }
}

/// μ₂ − x²; negative values mean the bound says nothing.
pub fn markov_lower_bound(mu2: f64, x: f64) -> f64 {
    mu2 - x * x
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerRegime {
    /// Power set by the noise term.
    NoiseLimited,
    /// θ = 0 or σ² = 0: the bound holds at any positive power.
    NoiseFree,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinPower {
    pub power_mw: f64,
    /// Scaling constant c in p = c·λ^{−γ/2}.
    pub scale_c: f64,
    pub regime: PowerRegime,
}

/// Smallest power for which the approximate μ₂ reaches 1 − ε + x².
/// `params.power` is ignored.
pub fn min_power(params: &SystemParams, qos: &QosSpec) -> Result<MinPower> {
    params.validate()?;
    let target = qos.target_mu2();
    let rho2 = rho_n(params, 2)?;
    let limit_mu2 = 1.0 / (1.0 + rho2);
    let slack = 1.0 - target * (1.0 + rho2);
    if target > 1.0 || !(slack > 0.0) {
        return Err(Error::InfeasibleQos {
            reason: format!(
                "target mu_2 = 1 - eps + x^2 = {target:.6} is not below the noise-free limit"
            ),
            limit_mu2,
        });
    }
    let g = params.gamma_pl;
    let noise_scale = 2.0 * params.theta * params.noise;
    if noise_scale == 0.0 {
        return Ok(MinPower {
            power_mw: 0.0,
            scale_c: 0.0,
            regime: PowerRegime::NoiseFree,
        });
    }
    let inner = 2.0 * PI * slack / (g * target * noise_scale.powf(2.0 / g)) * gamma(2.0 / g)?;
    let scale_c = inner.powf(-g / 2.0);
    Ok(MinPower {
        power_mw: scale_c * params.lambda_bs.powf(-g / 2.0),
        scale_c,
        regime: PowerRegime::NoiseLimited,
    })
}

/// Least-squares slope of ln y against ln x.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::moment_approx;

    fn scenario(g: f64) -> SystemParams {
        SystemParams::new(1e-3, g, 0.1, 1.0, 1e-10).unwrap()
    }

    #[test]
    fn markov_examples() {
        assert_eq!(markov_lower_bound(1.0, 0.0), 1.0);
        assert!((markov_lower_bound(0.5, 0.6) - 0.14).abs() < 1e-15);
        assert!(markov_lower_bound(0.2, 0.6) < 0.0);
    }

    #[test]
    fn density_doubling_scales_power() {
        let qos = QosSpec::new(0.2, 0.5).unwrap();
        for &g in &[3.0, 4.0, 5.0] {
            let p = scenario(g);
            let p1 = min_power(&p, &qos).unwrap().power_mw;
            let p2 = min_power(&p.with_lambda(2e-3), &qos).unwrap().power_mw;
            assert!((p2 / p1 - 2f64.powf(-g / 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn inversion_hits_target_second_moment() {
        let qos = QosSpec::new(0.2, 0.5).unwrap();
        for &g in &[3.0, 4.0, 5.0] {
            let p = scenario(g);
            let pw = min_power(&p, &qos).unwrap().power_mw;
            let mu2 = moment_approx(&p.with_power(pw), 2).unwrap();
            assert!(
                (mu2 - qos.target_mu2()).abs() < 1e-10 * qos.target_mu2(),
                "g={g}: {mu2}"
            );
            assert!((markov_lower_bound(mu2, qos.x_rel) - (1.0 - qos.epsilon)).abs() < 1e-10);
        }
    }

    #[test]
    fn monotone_in_requirements() {
        let p = scenario(4.0);
        let base = min_power(&p, &QosSpec::new(0.2, 0.5).unwrap())
            .unwrap()
            .power_mw;
        let looser = min_power(&p, &QosSpec::new(0.2, 0.55).unwrap())
            .unwrap()
            .power_mw;
        let stricter = min_power(&p, &QosSpec::new(0.25, 0.5).unwrap())
            .unwrap()
            .power_mw;
        assert!(looser <= base && stricter >= base);
    }

    #[test]
    fn infeasible_and_noise_free() {
        let p = SystemParams::new(1e-3, 4.0, 100.0, 1.0, 1e-10).unwrap();
        let err = min_power(&p, &QosSpec::new(0.9, 0.01).unwrap()).unwrap_err();
        match err {
            Error::InfeasibleQos { limit_mu2, .. } => {
                assert!((limit_mu2 - 1.0 / (1.0 + rho_n(&p, 2).unwrap())).abs() < 1e-15)
            }
            e => panic!("unexpected {e:?}"),
        }
        let quiet = scenario(4.0).with_noise(0.0);
        let r = min_power(&quiet, &QosSpec::new(0.2, 0.5).unwrap()).unwrap();
        assert_eq!(r.regime, PowerRegime::NoiseFree);
        assert_eq!(r.power_mw, 0.0);
    }

    #[test]
    fn qos_validation() {
        assert!(QosSpec::new(0.0, 0.5).is_err());
        assert!(QosSpec::new(0.5, 1.0).is_err());
        assert!(QosSpec::new(0.5, 0.5).is_ok());
    }

    #[test]
    fn slope_of_power_law() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let ys: Vec<f64> = xs.iter().map(|x: &f64| 3.0 * x.powf(-2.5)).collect();
        assert!((log_log_slope(&xs, &ys) + 2.5).abs() < 1e-12);
    }
}
