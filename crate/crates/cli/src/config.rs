use std::str::FromStr;

use gfn_core::numeric::parse_rational;
use gfn_core::{GfnError, ModelName, Precision, Rat, Result};

/// Minimum working precision accepted by the front end.
pub const MIN_PRECISION_DIGITS: u32 = 32;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Pretty,
    Json,
    Csv,
}

impl FromStr for OutputFormat {
    type Err = GfnError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pretty" => Ok(OutputFormat::Pretty),
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            _ => Err(GfnError::Usage(format!("unknown output format {s:?}"))),
        }
    }
}

/// Settings shared by every suite.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub precision: Precision,
    pub model: Option<ModelName>,
    pub group: Option<String>,
    pub system: Option<String>,
    /// Marginal sample grid; suites fall back to their own default.
    pub s_grid: Option<Vec<Rat>>,
    pub tol: Option<f64>,
    pub points: Option<usize>,
    pub seed: u64,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            precision: Precision::default(),
            model: None,
            group: None,
            system: None,
            s_grid: None,
            tol: None,
            points: None,
            seed: 1,
            format: OutputFormat::Pretty,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.precision.digits() < MIN_PRECISION_DIGITS {
            return Err(GfnError::Usage(format!(
                "precision must be at least {MIN_PRECISION_DIGITS} digits, got {}",
                self.precision.digits()
            )));
        }
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0) {
                return Err(GfnError::Usage(format!(
                    "tolerance must be positive, got {t}"
                )));
            }
        }
        if self.points == Some(0) {
            return Err(GfnError::Usage("--points must be positive".into()));
        }
        Ok(())
    }

    pub fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }

    pub fn points_or(&self, default: usize) -> usize {
        self.points.unwrap_or(default)
    }
}

/// Parses a comma-separated list of rationals or decimals.
pub fn parse_grid(text: &str) -> Result<Vec<Rat>> {
    text.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(parse_rational)
        .collect()
}
