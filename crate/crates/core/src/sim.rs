//! Monte Carlo reference for the meta distribution.
//!
//! Base stations form a PPP on a disk around the typical user at the
//! origin. The user is served by the nearest BS; all other BSs interfere.
//! Each realization gets its own ChaCha stream keyed by (seed, index), so a
//! campaign is reproducible for any thread count.

use std::io::{BufRead, Write};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::{MomentMethod, MomentSequence, SystemParams};

/// Upper limit on consecutive empty draws before a campaign gives up.
pub const MAX_REDRAWS_PER_REALIZATION: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingMode {
    /// Closed-form CCP given the geometry.
    Analytic,
    /// Fraction of successful Rayleigh channel draws.
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: SystemParams,
    pub region_radius: f64,
    pub num_realizations: usize,
    pub fading_mode: FadingMode,
    pub num_channel_draws: usize,
    pub rng_seed: u64,
}

impl SimConfig {
    /// 500 m disk, 5,000 realizations, 700 channel draws.
    pub fn reference(params: SystemParams) -> Self {
        Self {
            params,
            region_radius: 500.0,
            num_realizations: 5_000,
            fading_mode: FadingMode::Analytic,
            num_channel_draws: 700,
            rng_seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.region_radius > 0.0 && self.region_radius.is_finite()) {
            return Err(Error::InvalidParams(
                "region radius must be positive".into(),
            ));
        }
        if self.num_realizations == 0 {
            return Err(Error::InvalidParams("need at least one realization".into()));
        }
        if self.num_channel_draws == 0 {
            return Err(Error::InvalidParams(
                "need at least one channel draw".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn dist_sq(&self) -> f64 {
        self.x * self.x + self.y * self.y
    }
}

/// RNG stream for one realization.
pub fn realization_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Homogeneous PPP of intensity `lambda_bs` on the disk of radius `radius`.
pub fn draw_ppp<R: Rng + ?Sized>(lambda_bs: f64, radius: f64, rng: &mut R) -> Vec<Point> {
    let mean = lambda_bs * std::f64::consts::PI * radius * radius;
    let count = if mean > 0.0 {
        Poisson::new(mean)
            .map(|d| d.sample(rng) as usize)
            .unwrap_or(0)
    } else {
        0
    };
    (0..count)
        .map(|_| {
            let r = radius * rng.gen::<f64>().sqrt();
            let phi = std::f64::consts::TAU * rng.gen::<f64>();
            Point {
                x: r * phi.cos(),
                y: r * phi.sin(),
            }
        })
        .collect()
}

// Serving distance^γ and the interferer ratios (r_0/r_i)^γ.
fn geometry(points: &[Point], gamma_pl: f64) -> Result<(f64, Vec<f64>)> {
    let (serving, r0_sq) = points
        .iter()
        .map(Point::dist_sq)
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::EmptyRealization)?;
    let half = gamma_pl / 2.0;
    let ratios = points
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != serving)
        .map(|(_, p)| (r0_sq / p.dist_sq()).powf(half))
        .collect();
    Ok((r0_sq.powf(half), ratios))
}

/// ln C = −θσ²r₀^γ/p − Σ_i ln(1 + θ (r₀/r_i)^γ).
pub fn ln_ccp_analytic(points: &[Point], params: &SystemParams) -> Result<f64> {
    let (r0_pow, ratios) = geometry(points, params.gamma_pl)?;
    let theta = params.theta;
    if theta == 0.0 {
        return Ok(0.0);
    }
    let interference: f64 = ratios.iter().map(|r| (theta * r).ln_1p()).sum();
    Ok(-theta * params.noise * r0_pow / params.power - interference)
}

/// Conditional coverage probability of the typical user given the BS
/// locations, averaged over Rayleigh fading in closed form.
pub fn ccp_analytic(points: &[Point], params: &SystemParams) -> Result<f64> {
    ln_ccp_analytic(points, params).map(f64::exp)
}

/// CCP estimated as the fraction of `num_draws` fading draws with SINR > θ.
pub fn ccp_sampled<R: Rng + ?Sized>(
    points: &[Point],
    params: &SystemParams,
    num_draws: usize,
    rng: &mut R,
) -> Result<f64> {
    let (r0_pow, ratios) = geometry(points, params.gamma_pl)?;
    if params.theta == 0.0 {
        return Ok(1.0);
    }
    // SINR > θ  ⇔  g₀ > θ (Σ g_i (r₀/r_i)^γ + σ² r₀^γ / p)
    let noise_term = params.noise * r0_pow / params.power;
    let mut hits = 0usize;
    for _ in 0..num_draws {
        let g0: f64 = Exp1.sample(rng);
        let interference: f64 = ratios
            .iter()
            .map(|r| {
                let g: f64 = Exp1.sample(rng);
                r * g
            })
            .sum();
        if g0 > params.theta * (interference + noise_term) {
            hits += 1;
        }
    }
    Ok(hits as f64 / num_draws as f64)
}

/// CCP samples from a campaign, one per PPP realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalMeta {
    pub ccp_samples: Vec<f64>,
    pub config: SimConfig,
    /// Empty realizations that were discarded and redrawn.
    pub redraws: u64,
}

/// One CCP sample per realization, computed in parallel.
pub fn run_campaign(config: &SimConfig) -> Result<EmpiricalMeta> {
    config.validate()?;
    let results: Vec<(f64, u64)> = (0..config.num_realizations as u64)
        .into_par_iter()
        .map(|i| one_realization(config, i))
        .collect::<Result<_>>()?;
    let redraws = results.iter().map(|r| r.1).sum();
    Ok(EmpiricalMeta {
        ccp_samples: results.into_iter().map(|r| r.0).collect(),
        config: *config,
        redraws,
    })
}

fn one_realization(config: &SimConfig, index: u64) -> Result<(f64, u64)> {
    let mut rng = realization_rng(config.rng_seed, index);
    let mut redraws = 0;
    let points = loop {
        let pts = draw_ppp(config.params.lambda_bs, config.region_radius, &mut rng);
        if !pts.is_empty() {
            break pts;
        }
        redraws += 1;
        if redraws >= MAX_REDRAWS_PER_REALIZATION {
            return Err(Error::InvalidParams(format!(
                "realization {index}: {redraws} consecutive empty draws; density too low for the region"
            )));
        }
    };
    let c = match config.fading_mode {
        FadingMode::Analytic => ccp_analytic(&points, &config.params)?,
        FadingMode::Sampled => {
            ccp_sampled(&points, &config.params, config.num_channel_draws, &mut rng)?
        }
    };
    Ok((c, redraws))
}

impl EmpiricalMeta {
    /// μ̂_n = mean of c_i^n for n = 0..max_n.
    pub fn moments(&self, max_n: usize) -> Result<MomentSequence> {
        empirical_moments(&self.ccp_samples, max_n, Some(self.config.params))
    }

    /// Fraction of samples strictly above `x`.
    pub fn reliability(&self, x: f64) -> f64 {
        empirical_reliability(&self.ccp_samples, x)
    }

    /// Fraction of samples at or above `x`.
    pub fn reliability_inclusive(&self, x: f64) -> f64 {
        let n = self.ccp_samples.iter().filter(|&&c| c >= x).count();
        n as f64 / self.ccp_samples.len() as f64
    }

    /// Standard error of the sample mean of c^n.
    pub fn moment_std_error(&self, n: i32) -> f64 {
        let m = self.ccp_samples.len() as f64;
        let vals: Vec<f64> = self.ccp_samples.iter().map(|c| c.powi(n)).collect();
        let mean = vals.iter().sum::<f64>() / m;
        let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0).max(1.0);
        (var / m).sqrt()
    }

    /// One sample per line under a `ccp` header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "ccp")?;
        for c in &self.ccp_samples {
            writeln!(out, "{c}")?;
        }
        Ok(())
    }
}

/// Empirical moments of raw CCP samples.
pub fn empirical_moments(
    samples: &[f64],
    max_n: usize,
    params: Option<SystemParams>,
) -> Result<MomentSequence> {
    if samples.is_empty() {
        return Err(Error::InvalidParams("no samples".into()));
    }
    let m = samples.len() as f64;
    let mut sums = vec![0.0; max_n + 1];
    for &c in samples {
        let mut p = 1.0;
        for s in sums.iter_mut() {
            *s += p;
            p *= c;
        }
    }
    let values = sums.into_iter().map(|s| s / m).collect();
    MomentSequence::new(values, MomentMethod::Empirical, params)
}

/// Fraction of samples strictly greater than `x`.
pub fn empirical_reliability(samples: &[f64], x: f64) -> f64 {
    samples.iter().filter(|&&c| c > x).count() as f64 / samples.len() as f64
}

/// Reads samples written by [`EmpiricalMeta::write_csv`]: one value per
/// line, first line a header.
pub fn read_samples_csv<R: BufRead>(input: R) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::InvalidParams(format!("read error: {e}")))?;
        let field = line.split(',').next().unwrap_or("").trim();
        if i == 0 && field.parse::<f64>().is_err() {
            continue;
        }
        if field.is_empty() {
            continue;
        }
        let v: f64 = field.parse().map_err(|_| {
            Error::InvalidParams(format!("line {}: not a number: {field:?}", i + 1))
        })?;
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParams(format!(
                "line {}: CCP sample {v} outside [0, 1]",
                i + 1
            )));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Error::InvalidParams(
            "sample file contains no samples".into(),
        ));
    }
    Ok(out)
}

/// Two-sample Kolmogorov–Smirnov statistic sup |F_a − F_b|.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}
