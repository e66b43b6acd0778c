//! Run configuration: defaults, then a key=value file, then flags.

use std::path::Path;
use std::str::FromStr;

use linext_core::rational;
use linext_core::{BalanceConfig, Caps, VerifyConfig};

use crate::error::CliError;

pub const CONFIG_ENV: &str = "POSET_BALANCE_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(CliError::Usage(format!("unknown format `{other}` (json, csv or text)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub verify: VerifyConfig,
    pub seed: u64,
    pub parallelism: usize,
    /// Output format; each command has its own default.
    pub format: Option<Format>,
    /// Monte Carlo tolerance in standard errors.
    pub tolerance: f64,
}

impl Default for Config {
    fn default() -> Self {
        let parallelism = std::thread::available_parallelism().map_or(1, usize::from);
        Config { verify: VerifyConfig::default(), seed: 0, parallelism, format: None, tolerance: 3.0 }
    }
}

/// Flag values; `None` keeps the file or default value.
#[derive(Debug, Default, Clone, clap::Args)]
pub struct Overrides {
    /// Configuration file of `key = value` lines (default: $POSET_BALANCE_CONFIG)
    #[arg(long, global = true)]
    pub config: Option<std::path::PathBuf>,
    #[arg(long, global = true)]
    pub ideal_cap: Option<usize>,
    #[arg(long, global = true)]
    pub enum_cap: Option<u64>,
    #[arg(long, global = true)]
    pub tau_cap: Option<usize>,
    #[arg(long, global = true)]
    pub delta_k_budget: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads
    #[arg(long, visible_alias = "parallelism", global = true)]
    pub parallel: Option<usize>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Monte Carlo tolerance in standard errors
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
}

impl Config {
    pub fn load(o: &Overrides) -> Result<Config, CliError> {
        let mut c = Config::default();
        let path = o.config.clone().or_else(|| std::env::var_os(CONFIG_ENV).map(Into::into));
        if let Some(path) = path {
            c.apply_file(&path)?;
        }
        let caps = &mut c.verify.caps;
        set(&mut caps.ideal_cap, o.ideal_cap);
        set(&mut caps.enum_cap, o.enum_cap);
        set(&mut c.verify.balance.tau_cap, o.tau_cap);
        set(&mut c.verify.balance.delta_k_budget, o.delta_k_budget);
        set(&mut c.seed, o.seed);
        set(&mut c.parallelism, o.parallel);
        if o.format.is_some() {
            c.format = o.format;
        }
        set(&mut c.tolerance, o.tolerance);
        c.validate()?;
        Ok(c)
    }

    pub fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }

    pub fn caps(&self) -> Caps {
        self.verify.caps
    }

    pub fn balance(&self) -> &BalanceConfig {
        &self.verify.balance
    }

    fn apply_file(&mut self, path: &Path) -> Result<(), CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let table: toml::Table = text
            .parse()
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        for (key, value) in &table {
            self.apply(key, value).map_err(|m| CliError::Usage(format!("{}: `{key}`: {m}", path.display())))?;
        }
        Ok(())
    }

    fn apply(&mut self, key: &str, value: &toml::Value) -> Result<(), String> {
        let int = || -> Result<u64, String> {
            value.as_integer().and_then(|v| u64::try_from(v).ok()).ok_or_else(|| "expected a non-negative integer".into())
        };
        let v = &mut self.verify;
        match key {
            "ideal_cap" => v.caps.ideal_cap = int()? as usize,
            "enum_cap" => v.caps.enum_cap = int()?,
            "tau_cap" => v.balance.tau_cap = int()? as usize,
            "tau_max_n" => v.balance.tau_max_n = int()? as usize,
            "delta_k_budget" => v.balance.delta_k_budget = int()?,
            "fishburn_max_n" => v.fishburn_max_n = int()? as usize,
            "xyz_max_y" => v.xyz_max_y = int()? as usize,
            "gaptau_threshold" => {
                let s = match value {
                    toml::Value::String(s) => s.clone(),
                    toml::Value::Integer(i) => i.to_string(),
                    _ => return Err("expected an integer or a \"p/q\" string".into()),
                };
                v.gaptau_threshold = rational::parse(&s).ok_or("expected a rational")?;
            }
            "seed" => self.seed = int()?,
            "parallelism" => self.parallelism = int()? as usize,
            "format" => {
                self.format = Some(value.as_str().ok_or("expected a string")?.parse().map_err(|e: CliError| e.to_string())?)
            }
            "tolerance" => {
                self.tolerance = value
                    .as_float()
                    .or_else(|| value.as_integer().map(|i| i as f64))
                    .ok_or("expected a number")?
            }
            _ => return Err("unknown key".into()),
        }
        Ok(())
    }

    fn validate(&self) -> Result<(), CliError> {
        let caps = self.caps();
        if caps.ideal_cap == 0 || caps.enum_cap == 0 || self.balance().tau_cap == 0 || self.balance().delta_k_budget == 0 {
            return Err(CliError::Usage("caps must be positive".into()));
        }
        if self.parallelism == 0 {
            return Err(CliError::Usage("parallelism must be at least 1".into()));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(CliError::Usage("tolerance must be positive".into()));
        }
        Ok(())
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}
