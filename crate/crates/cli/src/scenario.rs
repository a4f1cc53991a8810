use clap::Args;
use metadist::SystemParams;

/// dB → linear ratio. `-inf` maps to 0.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// dBm → mW.
pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Network scenario flags shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// BS density per m².
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub lambda: f64,
    /// Path-loss exponent (> 2).
    #[arg(long, global = true, default_value_t = 5.0)]
    pub gamma: f64,
    /// SINR threshold in dB; `-inf` gives θ = 0.
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub theta_db: f64,
    /// Transmit power in dBm.
    #[arg(long, global = true, default_value_t = 0.0, allow_hyphen_values = true)]
    pub power_dbm: f64,
    /// Noise power in dBm.
    #[arg(long, global = true, default_value_t = -100.0, allow_hyphen_values = true)]
    pub noise_dbm: f64,
}

impl ScenarioArgs {
    pub fn params(&self) -> metadist::Result<SystemParams> {
        SystemParams::new(
            self.lambda,
            self.gamma,
            db_to_linear(self.theta_db),
            dbm_to_mw(self.power_dbm),
            dbm_to_mw(self.noise_dbm),
        )
    }
}
