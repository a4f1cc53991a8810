use std::f64::consts::PI;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, ValueEnum};
use metadist::jacobi::{fourier_jacobi_coeffs, reconstruct, DEFAULT_ORDER};
use metadist::moments::{
    approx_error_bound, approx_sequence, coeffs, exact_sequence, moment_approx, moment_exact,
};
use metadist::scaling::{log_log_slope, min_power};
use metadist::sim::{empirical_moments, empirical_reliability, read_samples_csv, run_campaign};
use metadist::{
    FadingMode, JacobiBasis, MomentMethod, MomentSequence, QosSpec, ReconstructedDistribution,
    SimConfig, SystemParams,
};
use serde_json::json;

use crate::scenario::mw_to_dbm;
use crate::table::{write_json, Table};
use crate::UsageError;

/// Number of moments recorded by `simulate` and used by `compare`.
const SUMMARY_MOMENTS: usize = 10;
/// Grid points with empirical reliability below this are left out of the
/// relative-error comparison.
const MIN_EMPIRICAL_RELIABILITY: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exact,
    Approx,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MomentSource {
    Exact,
    Approx,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisChoice {
    /// Match μ₁ and μ₂ (a₁ = a₂ = 0).
    Match,
    /// Use --alpha and --beta.
    Explicit,
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long, default_value_t = 10)]
    pub n_max: u32,
    #[arg(long, value_enum, default_value_t = Method::Both)]
    pub method: Method,
    /// Quadrature tolerance for the exact moments.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

pub fn moments(scenario: &SystemParams, args: &MomentsArgs) -> anyhow::Result<Table> {
    let mut table = Table::new(match args.method {
        Method::Exact => vec!["n", "mu_exact"],
        Method::Approx => vec!["n", "mu_approx", "error_bound"],
        Method::Both => vec!["n", "mu_exact", "mu_approx", "abs_diff", "error_bound"],
    });
    for n in 0..=args.n_max {
        let bound = if n == 0 {
            0.0
        } else {
            let c = coeffs(scenario, n)?;
            PI * scenario.lambda_bs * approx_error_bound(c.a_coef, c.b_coef, scenario.gamma_pl)?
        };
        let row = match args.method {
            Method::Exact => vec![n as f64, moment_exact(scenario, n, args.tol)?],
            Method::Approx => vec![n as f64, moment_approx(scenario, n)?, bound],
            Method::Both => {
                let e = moment_exact(scenario, n, args.tol)?;
                let a = moment_approx(scenario, n)?;
                vec![n as f64, e, a, (e - a).abs(), bound]
            }
        };
        table.push(row);
    }
    table.metadata = json!({ "scenario": scenario, "quadrature_tol": args.tol });
    Ok(table)
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    /// CSV with a `mu*` column (and optionally `n`), or a `simulate`
    /// summary JSON. Without it the moments come from the scenario.
    #[arg(long)]
    pub moments_file: Option<PathBuf>,
    /// Moment source when no file is given.
    #[arg(long, value_enum, default_value_t = MomentSource::Exact)]
    pub source: MomentSource,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = BasisChoice::Match)]
    pub basis: BasisChoice,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 101)]
    pub grid_points: usize,
}

pub fn reconstruct_cmd(scenario: &SystemParams, args: &ReconstructArgs) -> anyhow::Result<Table> {
    if args.grid_points < 2 {
        bail!(UsageError("--grid-points must be at least 2".into()));
    }
    let moments = match &args.moments_file {
        Some(path) => read_moments_file(path)?,
        None => match args.source {
            MomentSource::Exact => exact_sequence(scenario, args.order, 1e-12)?,
            MomentSource::Approx => approx_sequence(scenario, args.order)?,
            MomentSource::Empirical => {
                bail!(UsageError("empirical moments need --moments-file".into()))
            }
        },
    };
    let dist = match args.basis {
        BasisChoice::Match => reconstruct(&moments, args.order)?,
        BasisChoice::Explicit => {
            let (Some(alpha), Some(beta)) = (args.alpha, args.beta) else {
                bail!(UsageError(
                    "--basis explicit needs --alpha and --beta".into()
                ));
            };
            fourier_jacobi_coeffs(&moments, JacobiBasis::new(alpha, beta, args.order)?)?
        }
    };
    if dist.precision_warning() {
        eprintln!(
            "warning: order {} is beyond the range where double precision is reliable",
            dist.order()
        );
    }
    if dist.convergence_diagnostic().non_decay_warning {
        eprintln!(
            "warning: Fourier-Jacobi coefficients are not decaying; the truncation may be poor"
        );
    }
    let mut table = Table::new(vec!["x", "pdf", "cdf", "reliability"]);
    for i in 0..args.grid_points {
        let x = i as f64 / (args.grid_points - 1) as f64;
        let pdf = if x > 0.0 && x < 1.0 {
            dist.pdf(x)
        } else {
            f64::NAN
        };
        table.push(vec![x, pdf, dist.cdf(x)?, dist.reliability(x)?]);
    }
    table.metadata = json!({
        "basis": dist.basis,
        "coefficients": dist.coefficients,
        "convergence": dist.convergence_diagnostic(),
        "precision_warning": dist.precision_warning(),
        "moments": dist.source_moments.values(),
        "moment_method": dist.source_moments.method,
    });
    Ok(table)
}

/// Reads moments from CSV (`mu*` column, optional `n` column) or from the
/// `empirical_moments` array of a `simulate` summary.
pub fn read_moments_file(path: &Path) -> anyhow::Result<MomentSequence> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "json") {
        let v: serde_json::Value = serde_json::from_reader(BufReader::new(file))
            .with_context(|| format!("parsing {}", path.display()))?;
        let Some(arr) = v.get("empirical_moments").and_then(|a| a.as_array()) else {
            bail!(UsageError(format!(
                "{}: no `empirical_moments` array",
                path.display()
            )));
        };
        let values = arr
            .iter()
            .map(|x| x.as_f64())
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| UsageError("non-numeric moment".into()))?;
        return Ok(MomentSequence::new(values, MomentMethod::Empirical, None)?);
    }
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr.headers()?.clone();
    let mu_col = headers
        .iter()
        .position(|h| h == "mu")
        .or_else(|| headers.iter().position(|h| h.starts_with("mu")))
        .ok_or_else(|| UsageError(format!("{}: no `mu` column", path.display())))?;
    let n_col = headers.iter().position(|h| h == "n");
    let mut values = Vec::new();
    let mut first_n = None;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |col: usize| -> anyhow::Result<f64> {
            let field = rec.get(col).unwrap_or("").trim();
            field
                .parse()
                .map_err(|_| UsageError(format!("row {}: not a number: {field:?}", i + 2)).into())
        };
        if let Some(c) = n_col {
            let n = parse(c)?;
            let expected = first_n.map_or(n, |f: f64| f + i as f64);
            if first_n.is_none() {
                first_n = Some(n);
            }
            if n != expected {
                bail!(UsageError(format!(
                    "row {}: moments must be consecutive in n",
                    i + 2
                )));
            }
        }
        values.push(parse(mu_col)?);
    }
    match first_n {
        Some(1.0) => values.insert(0, 1.0),
        Some(f) if f != 0.0 => bail!(UsageError("moment table must start at n = 0 or 1".into())),
        _ => {}
    }
    let method = match headers.get(mu_col) {
        Some("mu_exact") => MomentMethod::ExactQuadrature,
        Some("mu_approx") => MomentMethod::ClosedForm,
        _ => MomentMethod::Empirical,
    };
    Ok(MomentSequence::new(values, method, None)?)
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 5_000)]
    pub realizations: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Analytic)]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 700)]
    pub channel_draws: usize,
    /// Summary JSON path; defaults to `<out>.summary.json`.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Analytic,
    Sampled,
}

pub fn simulate(
    scenario: &SystemParams,
    radius: f64,
    seed: u64,
    out: &Path,
    args: &SimulateArgs,
) -> anyhow::Result<PathBuf> {
    let config = SimConfig {
        params: *scenario,
        region_radius: radius,
        num_realizations: args.realizations,
        fading_mode: match args.mode {
            ModeArg::Analytic => FadingMode::Analytic,
            ModeArg::Sampled => FadingMode::Sampled,
        },
        num_channel_draws: args.channel_draws,
        rng_seed: seed,
    };
    let emp = run_campaign(&config)?;
    emp.write_csv(std::io::BufWriter::new(
        File::create(out).with_context(|| format!("creating {}", out.display()))?,
    ))?;
    let moments = emp.moments(SUMMARY_MOMENTS)?;
    let grid: Vec<[f64; 2]> = (0..=100)
        .map(|i| {
            let x = i as f64 / 100.0;
            [x, emp.reliability(x)]
        })
        .collect();
    let summary_path = args.summary.clone().unwrap_or_else(|| {
        let mut s = out.as_os_str().to_owned();
        s.push(".summary.json");
        PathBuf::from(s)
    });
    write_json(
        &summary_path,
        &json!({
            "config": config,
            "samples": emp.ccp_samples.len(),
            "redraws": emp.redraws,
            "empirical_moments": moments.values(),
            "moment_std_errors": (1..=SUMMARY_MOMENTS as i32).map(|n| emp.moment_std_error(n)).collect::<Vec<_>>(),
            "reliability_grid": grid,
        }),
    )?;
    Ok(summary_path)
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Samples CSV written by `simulate`.
    #[arg(long)]
    pub samples: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ORDER)]
    pub order: usize,
    /// Moments fed to the expansions; `empirical` uses the samples' own.
    #[arg(long, value_enum, default_value_t = MomentSource::Empirical)]
    pub source: MomentSource,
    #[arg(long, default_value_t = 0.05)]
    pub x_min: f64,
    #[arg(long, default_value_t = 0.95)]
    pub x_max: f64,
    #[arg(long, default_value_t = 91)]
    pub grid_points: usize,
}

/// Reliability of the beta baseline and the full expansion. A sequence
/// with μ₁ = 1 is the point mass at 1, which has no beta fit.
fn model_reliability(moments: &MomentSequence, order: usize) -> anyhow::Result<ModelCurves> {
    if moments.get(1)? >= 1.0 - 1e-15 {
        return Ok(ModelCurves::PointMassAtOne);
    }
    let fj = reconstruct(moments, order)?;
    let beta = fj.beta_baseline();
    Ok(ModelCurves::Expansion {
        fj: Box::new(fj),
        beta: Box::new(beta),
    })
}

enum ModelCurves {
    PointMassAtOne,
    Expansion {
        fj: Box<ReconstructedDistribution>,
        beta: Box<ReconstructedDistribution>,
    },
}

impl ModelCurves {
    fn eval(&self, x: f64) -> anyhow::Result<(f64, f64)> {
        Ok(match self {
            ModelCurves::PointMassAtOne => (1.0, 1.0),
            ModelCurves::Expansion { fj, beta } => (beta.reliability(x)?, fj.reliability(x)?),
        })
    }
}

pub fn compare(scenario: &SystemParams, args: &CompareArgs) -> anyhow::Result<Table> {
    if !(0.0 <= args.x_min && args.x_min < args.x_max && args.x_max < 1.0) || args.grid_points < 2 {
        bail!(UsageError(
            "need 0 <= --x-min < --x-max < 1 and at least 2 grid points".into()
        ));
    }
    let file =
        File::open(&args.samples).with_context(|| format!("opening {}", args.samples.display()))?;
    let samples = read_samples_csv(BufReader::new(file))?;
    let empirical = empirical_moments(&samples, SUMMARY_MOMENTS.max(args.order), None)?;
    let moments = match args.source {
        MomentSource::Exact => exact_sequence(scenario, args.order, 1e-12)?,
        MomentSource::Approx => approx_sequence(scenario, args.order)?,
        MomentSource::Empirical => empirical.clone(),
    };
    let curves = model_reliability(&moments, args.order)?;

    let mut table = Table::new(vec![
        "x",
        "empirical_rel",
        "beta_rel",
        "fj_rel",
        "relerr_beta",
        "relerr_fj",
    ]);
    let step = (args.x_max - args.x_min) / (args.grid_points - 1) as f64;
    for i in 0..args.grid_points {
        // Rounded so grid values print as typed (0.14, not 0.13999…).
        let x = ((args.x_min + step * i as f64) * 1e12).round() / 1e12;
        let e = empirical_reliability(&samples, x);
        if e < MIN_EMPIRICAL_RELIABILITY {
            continue;
        }
        let (b, f) = curves.eval(x)?;
        table.push(vec![x, e, b, f, (b - e).abs() / e, (f - e).abs() / e]);
    }
    let median = |name: &str| table.column(name).map(|v| median_of(&v));
    table.metadata = json!({
        "samples": samples.len(),
        "moment_source": args.source.to_possible_value().map(|v| v.get_name().to_owned()),
        "order": args.order,
        "empirical_moments": &empirical.values()[..=SUMMARY_MOMENTS],
        "median_relerr_beta": median("relerr_beta"),
        "median_relerr_fj": median("relerr_fj"),
        "excluded_below": MIN_EMPIRICAL_RELIABILITY,
    });
    Ok(table)
}

fn median_of(v: &[f64]) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len();
    if m % 2 == 1 {
        s[m / 2]
    } else {
        0.5 * (s[m / 2 - 1] + s[m / 2])
    }
}

#[derive(Debug, Args)]
pub struct PowerArgs {
    /// Reliability level x in P(C > x) ≥ 1 − ε.
    #[arg(long)]
    pub x_rel: f64,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1e-4)]
    pub lambda_min: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub lambda_max: f64,
    #[arg(long, default_value_t = 9)]
    pub lambda_points: usize,
}

pub fn power(scenario: &SystemParams, args: &PowerArgs) -> anyhow::Result<Table> {
    if !(args.lambda_min > 0.0 && args.lambda_min < args.lambda_max) || args.lambda_points < 2 {
        bail!(UsageError(
            "need 0 < --lambda-min < --lambda-max and at least 2 points".into()
        ));
    }
    let qos = QosSpec::new(args.x_rel, args.epsilon)?;
    let ratio = (args.lambda_max / args.lambda_min).ln();
    let lambdas: Vec<f64> = (0..args.lambda_points)
        .map(|i| args.lambda_min * (ratio * i as f64 / (args.lambda_points - 1) as f64).exp())
        .collect();
    let mut table = Table::new(vec!["lambda", "p_mw", "p_dbm"]);
    let mut regime = None;
    let mut scale_c = f64::NAN;
    for &l in &lambdas {
        let r = min_power(&scenario.with_lambda(l), &qos)?;
        regime = Some(r.regime);
        scale_c = r.scale_c;
        table.push(vec![l, r.power_mw, mw_to_dbm(r.power_mw)]);
    }
    let powers = table.column("p_mw").unwrap_or_default();
    let slope = if powers.iter().all(|p| *p > 0.0) {
        log_log_slope(&lambdas, &powers)
    } else {
        f64::NAN
    };
    eprintln!(
        "fitted log-log slope: {slope:.9} (expected {})",
        -scenario.gamma_pl / 2.0
    );
    table.metadata = json!({
        "qos": qos,
        "target_mu2": qos.target_mu2(),
        "fitted_slope": slope,
        "expected_slope": -scenario.gamma_pl / 2.0,
        "scale_c": scale_c,
        "regime": regime,
    });
    Ok(table)
}
