//! Moments of the conditional coverage probability (CCP) in a downlink
//! Poisson cellular network with Rayleigh fading and nearest-BS association.
//!
//! μ_n = πλ ∫₀^∞ exp(−(A_n z + B_n z^{γ/2})) dz with A_n = πλ(1+ρ_n),
//! B_n = nθσ²/p and 1+ρ_n = ₂F₁(n, −2/γ; 1−2/γ; −θ).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_semi_infinite, QuadOptions, TailBound};
use crate::specfun::{gamma, gauss_2f1};

/// Default highest moment index used for reconstruction.
pub const DEFAULT_MAX_MOMENT: usize = 20;

/// Physical scenario. Powers are linear (mW), density per m².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub lambda_bs: f64,
    pub gamma_pl: f64,
    pub theta: f64,
    pub power: f64,
    pub noise: f64,
}

impl SystemParams {
    pub fn new(lambda_bs: f64, gamma_pl: f64, theta: f64, power: f64, noise: f64) -> Result<Self> {
        let p = Self {
            lambda_bs,
            gamma_pl,
            theta,
            power,
            noise,
        };
        p.validate()?;
        Ok(p)
    }

    /// λ = 1e-3 m⁻², γ = 5, θ = 0 dB, p = 0 dBm, σ² = −100 dBm.
    pub fn reference() -> Self {
        Self {
            lambda_bs: 1e-3,
            gamma_pl: 5.0,
            theta: 1.0,
            power: 1.0,
            noise: 1e-10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParams(what.to_string()));
        if !(self.lambda_bs > 0.0 && self.lambda_bs.is_finite()) {
            return bad("BS density must be positive");
        }
        if !(self.gamma_pl > 2.0 && self.gamma_pl.is_finite()) {
            return bad("path-loss exponent must exceed 2");
        }
        if !(self.theta >= 0.0 && self.theta.is_finite()) {
            return bad("SINR threshold must be nonnegative");
        }
        if !(self.power > 0.0 && self.power.is_finite()) {
            return bad("transmit power must be positive");
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return bad("noise power must be nonnegative");
        }
        Ok(())
    }

    pub fn with_power(self, power: f64) -> Self {
        Self { power, ..self }
    }

    pub fn with_theta(self, theta: f64) -> Self {
        Self { theta, ..self }
    }

    pub fn with_noise(self, noise: f64) -> Self {
        Self { noise, ..self }
    }

    pub fn with_lambda(self, lambda_bs: f64) -> Self {
        Self { lambda_bs, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    ExactQuadrature,
    ClosedForm,
    Empirical,
}

/// μ_0..μ_N of the CCP together with how they were obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    values: Vec<f64>,
    pub method: MomentMethod,
    pub params: Option<SystemParams>,
}

impl MomentSequence {
    /// Builds a sequence from raw values; `values[0]` must be 1.
    pub fn new(
        values: Vec<f64>,
        method: MomentMethod,
        params: Option<SystemParams>,
    ) -> Result<Self> {
        match values.first() {
            None => return Err(Error::InvalidParams("moment sequence is empty".into())),
            Some(&m0) if (m0 - 1.0).abs() > 1e-12 => {
                return Err(Error::InvalidParams(format!("mu_0 must be 1, got {m0}")))
            }
            _ => {}
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!("non-finite moment {v}")));
        }
        Ok(Self {
            values,
            method,
            params,
        })
    }

    /// Moments of Beta(a, b): μ_n = Π_{k<n} (a+k)/(a+b+k).
    pub fn beta(a: f64, b: f64, max_n: usize) -> Self {
        let mut values = Vec::with_capacity(max_n + 1);
        let mut m = 1.0;
        values.push(m);
        for k in 0..max_n {
            let k = k as f64;
            m *= (a + k) / (a + b + k);
            values.push(m);
        }
        Self {
            values,
            method: MomentMethod::ExactQuadrature,
            params: None,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, n: usize) -> Result<f64> {
        self.values
            .get(n)
            .copied()
            .ok_or(Error::InsufficientMoments {
                needed: n,
                available: self.max_order(),
            })
    }

    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    /// Largest violation of the Hausdorff conditions (−1)^k Δ^k μ_n ≥ 0
    /// for k ≤ `max_k`; zero or positive means no violation.
    pub fn hausdorff_min_difference(&self, max_k: usize) -> f64 {
        let mut worst = f64::INFINITY;
        let mut diffs = self.values.clone();
        for _ in 0..=max_k {
            for &d in &diffs {
                worst = worst.min(d);
            }
            if diffs.len() < 2 {
                break;
            }
            // (−1)^{k+1} Δ^{k+1} μ_n = (−1)^k Δ^k μ_n − (−1)^k Δ^k μ_{n+1}
            diffs = diffs.windows(2).map(|w| w[0] - w[1]).collect();
        }
        worst
    }
}

/// A_n, B_n and ρ_n of the moment integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralCoeffs {
    pub a_coef: f64,
    pub b_coef: f64,
    pub rho: f64,
}

/// ρ_n = ₂F₁(n, −2/γ; 1−2/γ; −θ) − 1.
pub fn rho_n(params: &SystemParams, n: u32) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("rho_n requires n >= 1".into()));
    }
    params.validate()?;
    if params.theta == 0.0 {
        return Ok(0.0);
    }
    let delta = 2.0 / params.gamma_pl;
    let f = gauss_2f1(n as f64, -delta, 1.0 - delta, -params.theta)?;
    Ok((f - 1.0).max(0.0))
}

pub fn coeffs(params: &SystemParams, n: u32) -> Result<IntegralCoeffs> {
    let rho = rho_n(params, n)?;
    Ok(IntegralCoeffs {
        a_coef: PI * params.lambda_bs * (1.0 + rho),
        b_coef: n as f64 * params.theta * params.noise / params.power,
        rho,
    })
}

/// μ_n by adaptive quadrature of the moment integral.
pub fn moment_exact(params: &SystemParams, n: u32, tol: f64) -> Result<f64> {
    params.validate()?;
    if n == 0 || params.theta == 0.0 {
        return Ok(1.0);
    }
    let c = coeffs(params, n)?;
    if c.b_coef == 0.0 {
        return Ok(1.0 / (1.0 + c.rho));
    }
    Ok(PI * params.lambda_bs * laplace_integral(c.a_coef, c.b_coef, params.gamma_pl, tol)?)
}

/// I = ∫₀^∞ exp(−(A z + B z^{γ/2})) dz for A > 0, B ≥ 0.
///
/// The integral is taken in t = K z with K from the closed-form
/// approximation. Then e^{−(A z + B z^{γ/2})} ≤ M e^{−t}, which fixes the
/// truncation point and puts the bulk of the mass at t = O(1) whichever
/// term dominates. `tol` applies to the scaled integral K·I.
pub fn laplace_integral(a_coef: f64, b_coef: f64, gamma_pl: f64, tol: f64) -> Result<f64> {
    if !(a_coef > 0.0) || !(b_coef >= 0.0) || !a_coef.is_finite() || !b_coef.is_finite() {
        return Err(Error::Domain(format!(
            "need finite A > 0 and B >= 0, got A = {a_coef}, B = {b_coef}"
        )));
    }
    let envelope = TailBound::new(big_m_constant(gamma_pl)?, 1.0);
    if b_coef == 0.0 {
        return Ok(1.0 / a_coef);
    }
    let k = approx_k(a_coef, b_coef, gamma_pl)?;
    let a_over_k = a_coef / k;
    let half_gamma = gamma_pl / 2.0;
    // B (t/K)^{γ/2} = exp(ln B − (γ/2) ln K + (γ/2) ln t)
    let ln_scale = b_coef.ln() - half_gamma * k.ln();
    let integrand = |t: f64| {
        if t <= 0.0 {
            return 1.0;
        }
        (-a_over_k * t - (ln_scale + half_gamma * t.ln()).exp()).exp()
    };
    let res = integrate_semi_infinite(integrand, envelope, QuadOptions::with_tol(tol))?;
    Ok(res.value / k)
}

/// K = A + γ B^{2/γ} / (2 Γ(2/γ)).
pub fn approx_k(a_coef: f64, b_coef: f64, gamma_pl: f64) -> Result<f64> {
    let delta = 2.0 / gamma_pl;
    Ok(a_coef + gamma_pl * b_coef.powf(delta) / (2.0 * gamma(delta)?))
}

/// Closed-form approximation μ_n ≈ πλ / K_n.
pub fn moment_approx(params: &SystemParams, n: u32) -> Result<f64> {
    params.validate()?;
    if n == 0 || params.theta == 0.0 {
        return Ok(1.0);
    }
    let c = coeffs(params, n)?;
    Ok(PI * params.lambda_bs / approx_k(c.a_coef, c.b_coef, params.gamma_pl)?)
}

/// M = max_{z≥0} e^{−f(z)} = exp(−(1−γ/2) / Γ(2/γ)^{γ/(γ−2)}).
pub fn big_m_constant(gamma_pl: f64) -> Result<f64> {
    if !(gamma_pl > 2.0) {
        return Err(Error::Domain(format!(
            "path-loss exponent must exceed 2, got {gamma_pl}"
        )));
    }
    let min_f = (1.0 - gamma_pl / 2.0) / gamma(2.0 / gamma_pl)?.powf(gamma_pl / (gamma_pl - 2.0));
    Ok((-min_f).exp())
}

/// Upper bound on |I − 1/K| where I = ∫₀^∞ exp(−(Az + Bz^{γ/2})) dz.
pub fn approx_error_bound(a_coef: f64, b_coef: f64, gamma_pl: f64) -> Result<f64> {
    if !(a_coef > 0.0) || !(b_coef >= 0.0) {
        return Err(Error::Domain(format!(
            "need A > 0 and B >= 0, got A = {a_coef}, B = {b_coef}"
        )));
    }
    let m = big_m_constant(gamma_pl)?;
    if b_coef == 0.0 {
        return Ok(0.0);
    }
    let k = approx_k(a_coef, b_coef, gamma_pl)?;
    let ratio = b_coef.powf(2.0 / gamma_pl) / k;
    let bracket =
        ratio / gamma(2.0 / gamma_pl)? + gamma(gamma_pl / 2.0)? * ratio.powf(gamma_pl / 2.0);
    Ok(gamma_pl * m / (2.0 * k) * bracket)
}

/// μ_0..μ_max_n by quadrature.
pub fn exact_sequence(params: &SystemParams, max_n: usize, tol: f64) -> Result<MomentSequence> {
    let values = (0..=max_n as u32)
        .map(|n| moment_exact(params, n, tol))
        .collect::<Result<Vec<_>>>()?;
    MomentSequence::new(values, MomentMethod::ExactQuadrature, Some(*params))
}

/// μ_0..μ_max_n from the closed-form approximation.
pub fn approx_sequence(params: &SystemParams, max_n: usize) -> Result<MomentSequence> {
    let values = (0..=max_n as u32)
        .map(|n| moment_approx(params, n))
        .collect::<Result<Vec<_>>>()?;
    MomentSequence::new(values, MomentMethod::ClosedForm, Some(*params))
}
