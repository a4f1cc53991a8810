//! Reconstruction of a density on [0, 1] from its moments by a truncated
//! Fourier-Jacobi series in shifted Jacobi polynomials.
//!
//! With weight w(x) = (1−x)^α x^β the density is expanded as
//! f(x) = w(x) Σ a_n P_n^{(α,β)}(x), where
//! a_n = h_n⁻¹ Σ_ℓ C(n+α, ℓ) C(n+β, n−ℓ) μ̂_{nℓ} and μ̂_{nℓ} = E[x^ℓ (x−1)^{n−ℓ}].
//! The n = 0 term alone is the Beta(β+1, α+1) density.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::specfun::{binomial, ln_gamma, reg_inc_beta};

/// Truncation order used when none is given.
pub const DEFAULT_ORDER: usize = 10;
/// Orders above this lose enough digits in the alternating sums to warrant a warning.
pub const PRECISION_WARN_ORDER: usize = 12;
pub const MAX_ORDER: usize = 20;

/// Double-double accumulator: value = hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Debug, Default, Clone, Copy)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn two_sum(a: f64, b: f64) -> (f64, f64) {
        let s = a + b;
        let bb = s - a;
        (s, (a - (s - bb)) + (b - bb))
    }

    fn add_dd(&mut self, other: DoubleDouble) {
        let (s, e) = Self::two_sum(self.hi, other.hi);
        let e = e + self.lo + other.lo;
        let (hi, lo) = Self::two_sum(s, e);
        self.hi = hi;
        self.lo = lo;
    }

    /// Adds the exact product a·b.
    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let err = a.mul_add(b, -p);
        self.add_dd(DoubleDouble { hi: p, lo: err });
    }

    /// Adds c·self_other where `other` is itself double-double.
    fn add_scaled(&mut self, c: f64, other: DoubleDouble) {
        self.add_product(c, other.hi);
        self.add_product(c, other.lo);
    }

    fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// Weight exponents and truncation order of the expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JacobiBasis {
    pub alpha: f64,
    pub beta: f64,
    pub order: usize,
}

impl JacobiBasis {
    pub fn new(alpha: f64, beta: f64, order: usize) -> Result<Self> {
        if !(alpha > -1.0) || !(beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "Jacobi parameters must exceed -1, got alpha = {alpha}, beta = {beta}"
            )));
        }
        if order > MAX_ORDER {
            return Err(Error::InvalidParams(format!(
                "truncation order {order} exceeds the cap of {MAX_ORDER}"
            )));
        }
        Ok(Self { alpha, beta, order })
    }

    /// w(x) = (1−x)^α x^β
    pub fn weight(&self, x: f64) -> f64 {
        (1.0 - x).powf(self.alpha) * x.powf(self.beta)
    }
}

/// Chooses (α, β) so that the leading beta term reproduces μ₁ and μ₂,
/// which makes a₁ = a₂ = 0.
pub fn moment_match_basis(mu1: f64, mu2: f64, order: usize) -> Result<JacobiBasis> {
    if !(mu1 > 0.0 && mu1 < 1.0) {
        return Err(Error::DegenerateMoments(format!(
            "mu_1 = {mu1} is not in (0, 1)"
        )));
    }
    let var = mu2 - mu1 * mu1;
    if !(var > 1e-14) {
        return Err(Error::DegenerateMoments(format!(
            "variance mu_2 - mu_1^2 = {var:e} is not positive"
        )));
    }
    if !(mu2 < mu1) {
        return Err(Error::DegenerateMoments(format!(
            "mu_2 = {mu2} must be below mu_1 = {mu1} for a law on [0, 1]"
        )));
    }
    let alpha1 = (mu1 - mu2) * (1.0 - mu1) / var;
    let beta1 = alpha1 * mu1 / (1.0 - mu1);
    JacobiBasis::new(alpha1 - 1.0, beta1 - 1.0, order)
}

/// P_n^{(α,β)}(x) on [0, 1] by the three-term recurrence at t = 2x − 1.
pub fn jacobi_poly(alpha: f64, beta: f64, n: usize, x: f64) -> f64 {
    jacobi_poly_all(alpha, beta, n, x)[n]
}

/// P_0..P_n at a single point.
pub fn jacobi_poly_all(alpha: f64, beta: f64, n: usize, x: f64) -> Vec<f64> {
    let t = 2.0 * x - 1.0;
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    let ab = alpha + beta;
    out.push((alpha + 1.0) + (ab + 2.0) * (t - 1.0) / 2.0);
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + ab;
        let c1 = 2.0 * k * (k + ab) * (s - 2.0);
        let c2 = (s - 1.0) * (alpha * alpha - beta * beta);
        let c3 = (s - 2.0) * (s - 1.0) * s;
        let c4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * s;
        let len = out.len();
        let next = ((c2 + c3 * t) * out[len - 1] - c4 * out[len - 2]) / c1;
        out.push(next);
    }
    out
}

/// h_n = ∫₀¹ (P_n^{(α,β)})² w dx.
pub fn norm_h(alpha: f64, beta: f64, n: usize) -> Result<f64> {
    if !(alpha > -1.0) || !(beta > -1.0) {
        return Err(Error::Domain(format!(
            "need alpha, beta > -1, got {alpha}, {beta}"
        )));
    }
    if n == 0 {
        // Beta function B(β+1, α+1); avoids Γ(α+β+1) at α+β+1 ≤ 0.
        let ln = ln_gamma(alpha + 1.0)? + ln_gamma(beta + 1.0)? - ln_gamma(alpha + beta + 2.0)?;
        return Ok(ln.exp());
    }
    let nf = n as f64;
    let ln = ln_gamma(nf + alpha + 1.0)? + ln_gamma(nf + beta + 1.0)?
        - ln_gamma(nf + 1.0)?
        - ln_gamma(nf + alpha + beta + 1.0)?;
    Ok(ln.exp() / (2.0 * nf + alpha + beta + 1.0))
}

/// μ̂_{nℓ} = Σ_k C(n−ℓ, k) (−1)^k μ_{n−k}.
pub fn modified_moment(moments: &MomentSequence, n: usize, l: usize) -> Result<f64> {
    modified_moment_dd(moments, n, l).map(|d| d.value())
}

fn modified_moment_dd(moments: &MomentSequence, n: usize, l: usize) -> Result<DoubleDouble> {
    if l > n {
        return Err(Error::Domain(format!(
            "modified moment needs l <= n, got n = {n}, l = {l}"
        )));
    }
    if n > moments.max_order() {
        return Err(Error::InsufficientMoments {
            needed: n,
            available: moments.max_order(),
        });
    }
    let mu = moments.values();
    let m = n - l;
    let mut acc = DoubleDouble::default();
    for k in 0..=m {
        // C(m, k) is an exact integer in f64 for m ≤ 20.
        let c = binomial(m as f64, k as u32).round();
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc.add_product(sign * c, mu[n - k]);
    }
    Ok(acc)
}

/// Truncated expansion together with the moments it was built from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReconstructedDistribution {
    pub basis: JacobiBasis,
    pub coefficients: Vec<f64>,
    pub source_moments: MomentSequence,
}

/// Computes a_0..a_N from the moments.
pub fn fourier_jacobi_coeffs(
    moments: &MomentSequence,
    basis: JacobiBasis,
) -> Result<ReconstructedDistribution> {
    if basis.order > moments.max_order() {
        return Err(Error::InsufficientMoments {
            needed: basis.order,
            available: moments.max_order(),
        });
    }
    let (alpha, beta) = (basis.alpha, basis.beta);
    let mut coefficients = Vec::with_capacity(basis.order + 1);
    for n in 0..=basis.order {
        let mut acc = DoubleDouble::default();
        for l in 0..=n {
            let w =
                binomial(n as f64 + alpha, l as u32) * binomial(n as f64 + beta, (n - l) as u32);
            acc.add_scaled(w, modified_moment_dd(moments, n, l)?);
        }
        coefficients.push(acc.value() / norm_h(alpha, beta, n)?);
    }
    Ok(ReconstructedDistribution {
        basis,
        coefficients,
        source_moments: moments.clone(),
    })
}

/// Moment-matched basis followed by the coefficient computation.
pub fn reconstruct(moments: &MomentSequence, order: usize) -> Result<ReconstructedDistribution> {
    let basis = moment_match_basis(moments.get(1)?, moments.get(2)?, order)?;
    fourier_jacobi_coeffs(moments, basis)
}

/// Decay sequence behind the uniform-convergence bound of the series.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// |a_n| e^{αn} for α > 0, |a_n| e^{α} otherwise; n = 1..N.
    pub terms: Vec<f64>,
    pub first_third_mean: f64,
    pub last_third_mean: f64,
    /// Set when the tail of the sequence is not smaller than its head.
    pub non_decay_warning: bool,
}

// Terms below this fraction of |a_0| count as numerically zero.
const DIAGNOSTIC_FLOOR: f64 = 1e-7;

impl ReconstructedDistribution {
    pub fn order(&self) -> usize {
        self.basis.order
    }

    /// Density of the truncated series; may dip below zero near the ends.
    pub fn pdf(&self, x: f64) -> f64 {
        let p = jacobi_poly_all(self.basis.alpha, self.basis.beta, self.order(), x);
        let mut acc = DoubleDouble::default();
        for (a, pn) in self.coefficients.iter().zip(&p) {
            acc.add_product(*a, *pn);
        }
        self.basis.weight(x) * acc.value()
    }

    /// CDF of the truncated series, unclamped.
    pub fn cdf(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!(
                "cdf argument must lie in [0, 1], got {x}"
            )));
        }
        // F(1) = h₀a₀ = μ₀ = 1 exactly; skip the rounding in h₀a₀.
        if x == 1.0 {
            return Ok(1.0);
        }
        let (alpha, beta) = (self.basis.alpha, self.basis.beta);
        let h0 = norm_h(alpha, beta, 0)?;
        let mut acc = DoubleDouble::default();
        acc.add_product(
            h0 * self.coefficients[0],
            reg_inc_beta(x, beta + 1.0, alpha + 1.0)?,
        );
        if self.order() >= 1 && x > 0.0 && x < 1.0 {
            let envelope = (1.0 - x).powf(alpha + 1.0) * x.powf(beta + 1.0);
            let p = jacobi_poly_all(alpha + 1.0, beta + 1.0, self.order() - 1, x);
            for n in 1..=self.order() {
                acc.add_product(-self.coefficients[n] / n as f64 * envelope, p[n - 1]);
            }
        }
        Ok(acc.value())
    }

    /// P(C > x), clamped to [0, 1].
    pub fn reliability(&self, x: f64) -> Result<f64> {
        Ok((1.0 - self.cdf(x)?).clamp(0.0, 1.0))
    }

    /// The order-0 truncation, i.e. the beta distribution with this basis.
    pub fn beta_baseline(&self) -> ReconstructedDistribution {
        ReconstructedDistribution {
            basis: JacobiBasis {
                order: 0,
                ..self.basis
            },
            coefficients: vec![self.coefficients[0]],
            source_moments: self.source_moments.clone(),
        }
    }

    pub fn precision_warning(&self) -> bool {
        self.order() > PRECISION_WARN_ORDER
    }

    pub fn convergence_diagnostic(&self) -> ConvergenceReport {
        convergence_report(&self.coefficients, self.basis.alpha)
    }

    /// Grid points where the CDF decreases by more than `tol` from the
    /// previous grid point.
    pub fn cdf_monotonicity_violations(&self, grid_points: usize, tol: f64) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        let mut prev = self.cdf(0.0)?;
        for i in 1..grid_points {
            let x = i as f64 / (grid_points - 1) as f64;
            let f = self.cdf(x)?;
            if f < prev - tol {
                out.push(x);
            }
            prev = f;
        }
        Ok(out)
    }
}

/// Builds the decay report for coefficients a_0..a_N with weight exponent α.
pub fn convergence_report(coefficients: &[f64], alpha: f64) -> ConvergenceReport {
    let terms: Vec<f64> = coefficients
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, a)| {
            if alpha > 0.0 {
                a.abs() * (alpha * n as f64).exp()
            } else {
                a.abs() * alpha.exp()
            }
        })
        .collect();
    let third = terms.len() / 3;
    if third == 0 {
        return ConvergenceReport {
            terms,
            first_third_mean: 0.0,
            last_third_mean: 0.0,
            non_decay_warning: false,
        };
    }
    let mean = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
    let first = mean(&terms[..third]);
    let last = mean(&terms[terms.len() - third..]);
    let floor = DIAGNOSTIC_FLOOR * coefficients[0].abs().max(1.0);
    ConvergenceReport {
        non_decay_warning: last >= first && last > floor,
        first_third_mean: first,
        last_third_mean: last,
        terms,
    }
}
