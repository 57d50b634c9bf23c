//! JSON instance configuration and validation.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    ArrivalRates, BatchDistribution, BatchModel, PriceLadder, ProblemInstance, MASS_TOLERANCE,
};

/// Batch-size law as written in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BatchSpec {
    Unit,
    NegativeBinomial { r: f64, p: f64 },
    DiscretizedExponential { mean: f64 },
    Pmf { pmf: Vec<f64> },
}

impl BatchSpec {
    pub fn build(&self) -> Result<BatchDistribution> {
        match self {
            BatchSpec::Unit => Ok(BatchDistribution::unit()),
            BatchSpec::NegativeBinomial { r, p } => BatchDistribution::negative_binomial(*r, *p),
            BatchSpec::DiscretizedExponential { mean } => {
                BatchDistribution::discretized_exponential(*mean)
            }
            BatchSpec::Pmf { pmf } => BatchDistribution::from_pmf(pmf.clone()),
        }
    }

    fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            BatchSpec::Unit => {}
            BatchSpec::NegativeBinomial { r, p } => {
                if !(r.is_finite() && *r > 0.0) {
                    out.push(format!("r must be positive, got {r}"));
                }
                if !(*p > 0.0 && *p <= 1.0) {
                    out.push(format!("p must lie in (0, 1], got {p}"));
                }
            }
            BatchSpec::DiscretizedExponential { mean } => {
                if !(mean.is_finite() && *mean > 0.0) {
                    out.push(format!("mean must be positive, got {mean}"));
                }
            }
            BatchSpec::Pmf { pmf } => {
                for (j, q) in pmf.iter().enumerate() {
                    if !(q.is_finite() && *q >= 0.0) {
                        out.push(format!("pmf[{j}] = {q} is not a probability"));
                    }
                }
                let total: f64 = pmf.iter().sum();
                if total > 1.0 + MASS_TOLERANCE {
                    out.push(format!("pmf sums to {total} > 1"));
                }
            }
        }
        out
    }
}

/// One instance as stored on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    pub prices: Vec<f64>,
    pub rates: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batch: Option<BatchSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub batches: Option<Vec<BatchSpec>>,
    #[serde(rename = "W")]
    pub inventory: i64,
    #[serde(rename = "T")]
    pub horizon: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

/// A violated invariant together with the offending field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl InstanceConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Builds the instance, failing with every violation joined into one message.
    pub fn to_instance(&self) -> Result<ProblemInstance> {
        let violations = validate(self);
        if !violations.is_empty() {
            let joined: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
            return Err(Error::InvalidInstance(joined.join("; ")));
        }
        let batches = match (&self.batch, &self.batches) {
            (_, Some(list)) => BatchModel::PriceDependent(
                list.iter().map(BatchSpec::build).collect::<Result<_>>()?,
            ),
            (Some(b), None) => BatchModel::Homogeneous(b.build()?),
            (None, None) => BatchModel::Homogeneous(BatchDistribution::unit()),
        };
        ProblemInstance::new(
            PriceLadder::new(self.prices.clone())?,
            ArrivalRates::new(self.rates.clone())?,
            batches,
            self.inventory as usize,
            self.horizon,
        )
    }
}

/// Lists every violated invariant of a config; empty means valid.
pub fn validate(config: &InstanceConfig) -> Vec<Violation> {
    let mut out = Vec::new();
    if config.prices.is_empty() {
        out.push(Violation::new("prices", "price ladder is empty"));
    }
    for (i, p) in config.prices.iter().enumerate() {
        if !(p.is_finite() && *p > 0.0) {
            out.push(Violation::new(format!("prices[{i}]"), format!("{p} is not positive")));
        }
    }
    if config.prices.windows(2).any(|w| w[1] > w[0]) {
        out.push(Violation::new("prices", "ladder not non-increasing"));
    }
    if config.rates.is_empty() {
        out.push(Violation::new("rates", "rate vector is empty"));
    }
    for (i, r) in config.rates.iter().enumerate() {
        if !(r.is_finite() && *r > 0.0) {
            out.push(Violation::new(format!("rates[{i}]"), format!("{r} is not positive")));
        }
    }
    if config.rates.len() != config.prices.len() {
        out.push(Violation::new(
            "rates",
            format!(
                "{} rates for {} prices",
                config.rates.len(),
                config.prices.len()
            ),
        ));
    }
    if config.batch.is_some() && config.batches.is_some() {
        out.push(Violation::new("batches", "give either batch or batches, not both"));
    }
    if let Some(b) = &config.batch {
        for msg in b.problems() {
            out.push(Violation::new("batch", msg));
        }
    }
    if let Some(list) = &config.batches {
        if list.len() != config.prices.len() {
            out.push(Violation::new(
                "batches",
                format!("{} batch laws for {} classes", list.len(), config.prices.len()),
            ));
        }
        for (i, b) in list.iter().enumerate() {
            for msg in b.problems() {
                out.push(Violation::new(format!("batches[{i}]"), msg));
            }
        }
    }
    if config.inventory < 0 {
        out.push(Violation::new(
            "W",
            format!("inventory must be >= 0, got {}", config.inventory),
        ));
    }
    if !(config.horizon.is_finite() && config.horizon > 0.0) {
        out.push(Violation::new(
            "T",
            format!("horizon must be positive, got {}", config.horizon),
        ));
    }
    if let Some(delta) = config.delta {
        if !(delta.is_finite() && delta > 0.0) {
            out.push(Violation::new("delta", format!("step must be positive, got {delta}")));
        } else if config.horizon.is_finite() && config.horizon > 0.0 {
            let ratio = config.horizon / delta;
            if (ratio - ratio.round()).abs() > 1e-9 {
                out.push(Violation::new("delta", format!("T / delta = {ratio} is not an integer")));
            }
            let load = delta * config.rates.iter().sum::<f64>();
            if load > 1.0 + MASS_TOLERANCE {
                out.push(Violation::new(
                    "delta",
                    format!("delta * sum(rates) = {load} exceeds 1"),
                ));
            }
        }
    }
    out
}
