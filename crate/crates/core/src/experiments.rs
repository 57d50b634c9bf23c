//! Bundled experiment definitions and their reproduction: policy tables for
//! batch demand, the policy-versus-inventory curve, and the pricing tables.
//!
//! Every experiment reads a JSON definition (the bundled ones are compiled
//! in) and returns flat rows that serialize to JSON and to CSV.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::batch;
use crate::config::{BatchSpec, InstanceConfig};
use crate::dp::{evaluate_switch_times, solve_dp};
use crate::error::{Error, Result};
use crate::model::{delta_for_load, discretize, BatchModel, ProblemInstance};
use crate::pricing::{
    pricing_objective, solve_pricing_approx, solve_pricing_exact, ApproxDenominator,
    DemandFunction, ExactOptions, PricingFrame,
};

/// Names accepted by [`reproduce`].
pub const ARTIFACTS: [&str; 6] = ["table1", "table2", "table3", "table4", "table5", "figure1"];

/// Compiled-in definition for an artifact.
pub fn bundled_config(name: &str) -> Option<&'static str> {
    Some(match name {
        "table1" => include_str!("../configs/table1.json"),
        "table2" => include_str!("../configs/table2.json"),
        "table3" => include_str!("../configs/table3.json"),
        "table4" => include_str!("../configs/table4.json"),
        "table5" => include_str!("../configs/table5.json"),
        "figure1" => include_str!("../configs/figure1.json"),
        "example" => include_str!("../configs/example.json"),
        _ => return None,
    })
}

/// Row type that can be written as one CSV record.
pub trait CsvRow {
    fn header() -> Vec<&'static str>;
    fn record(&self) -> Vec<String>;
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn ladder(p: &[f64]) -> String {
    p.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(" ")
}

fn pct_off(reference: f64, value: f64) -> f64 {
    if reference > 0.0 {
        100.0 * (reference - value) / reference
    } else {
        0.0
    }
}

/// Reference numbers for one policy-table cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReferencePolicyRow {
    #[serde(rename = "W")]
    pub inventory: usize,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub batch: usize,
    pub optimal: f64,
    pub switch: f64,
    #[serde(default)]
    pub equal: Option<f64>,
}

/// Policy comparison across `(W, T)` points and batch laws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyTableConfig {
    /// Prices and rates; `W`, `T` and the batch law are overridden per row.
    pub instance: InstanceConfig,
    pub points: Vec<(usize, f64)>,
    pub batches: Vec<BatchSpec>,
    /// DP step chosen so that `delta * sum(lambda)` is at most this.
    pub dp_load: f64,
    /// Also evaluate DP, switch and equal policies on a unit-step clock.
    #[serde(default)]
    pub unit_step_clock: bool,
    #[serde(default)]
    pub reference: Vec<ReferencePolicyRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyRow {
    #[serde(rename = "W")]
    pub inventory: usize,
    #[serde(rename = "T")]
    pub horizon: f64,
    pub batch: String,
    /// DP optimum on the fine clock.
    pub optimal: f64,
    pub dp_delta: f64,
    pub switch: f64,
    pub switch_pct_off: f64,
    pub equal: f64,
    pub equal_pct_off: f64,
    pub fcfs: f64,
    pub fcfs_pct_off: f64,
    pub switch_times: Vec<f64>,
    /// DP optimum and both switch-over policies on a clock with step 1.
    pub unit_step: Option<(f64, f64, f64)>,
    pub reference_optimal: Option<f64>,
    pub reference_switch: Option<f64>,
    pub reference_equal: Option<f64>,
}

impl CsvRow for PolicyRow {
    fn header() -> Vec<&'static str> {
        vec![
            "W", "T", "batch", "optimal", "dp_delta", "switch", "switch_pct_off", "equal",
            "equal_pct_off", "fcfs", "fcfs_pct_off", "switch_times", "optimal_step1",
            "switch_step1", "equal_step1", "reference_optimal", "reference_switch", "reference_equal",
        ]
    }

    fn record(&self) -> Vec<String> {
        let step = self.unit_step;
        vec![
            self.inventory.to_string(),
            num(self.horizon),
            self.batch.clone(),
            num(self.optimal),
            num(self.dp_delta),
            num(self.switch),
            num(self.switch_pct_off),
            num(self.equal),
            num(self.equal_pct_off),
            num(self.fcfs),
            num(self.fcfs_pct_off),
            ladder(&self.switch_times),
            opt(step.map(|s| s.0)),
            opt(step.map(|s| s.1)),
            opt(step.map(|s| s.2)),
            opt(self.reference_optimal),
            opt(self.reference_switch),
            opt(self.reference_equal),
        ]
    }
}

fn batch_label(spec: &BatchSpec) -> String {
    match spec {
        BatchSpec::Unit => "unit".into(),
        BatchSpec::NegativeBinomial { r, p } => format!("negbin({r},{p})"),
        BatchSpec::DiscretizedExponential { mean } => format!("exp({mean})"),
        BatchSpec::Pmf { .. } => "pmf".into(),
    }
}

fn equal_times(m: usize, horizon: f64) -> Vec<f64> {
    (1..m).map(|k| k as f64 * horizon / m as f64).collect()
}

fn policy_row(
    cfg: &PolicyTableConfig,
    base: &ProblemInstance,
    point: (usize, f64),
    batch_index: usize,
) -> Result<PolicyRow> {
    let (w, horizon) = point;
    let spec = &cfg.batches[batch_index];
    let inst = base
        .with_inventory(w)
        .with_horizon(horizon)?
        .with_batches(BatchModel::Homogeneous(spec.build()?))?;
    let m = inst.classes();
    let delta = delta_for_load(&inst, cfg.dp_load);
    let optimal = solve_dp(&discretize(&inst, delta)?).optimal_value();
    let sol = batch::solve_homogeneous(&inst)?;
    let switch = sol.objective_revenue;
    let equal_t = equal_times(m, horizon);
    let equal = batch::revenue_at_times(&inst, &equal_t)?;
    let fcfs = batch::revenue_at_times(&inst, &vec![0.0; m - 1])?;
    let unit_step = if cfg.unit_step_clock {
        let coarse = discretize(&inst, 1.0)?;
        Some((
            solve_dp(&coarse).optimal_value(),
            evaluate_switch_times(&coarse, sol.switch_times())?,
            evaluate_switch_times(&coarse, &equal_t)?,
        ))
    } else {
        None
    };
    let reference = cfg.reference.iter().find(|p| {
        p.inventory == w && (p.horizon - horizon).abs() < 1e-9 && p.batch == batch_index
    });
    Ok(PolicyRow {
        inventory: w,
        horizon,
        batch: batch_label(spec),
        optimal,
        dp_delta: delta,
        switch,
        switch_pct_off: pct_off(optimal, switch),
        equal,
        equal_pct_off: pct_off(optimal, equal),
        fcfs,
        fcfs_pct_off: pct_off(optimal, fcfs),
        switch_times: sol.switch_times().to_vec(),
        unit_step,
        reference_optimal: reference.map(|p| p.optimal),
        reference_switch: reference.map(|p| p.switch),
        reference_equal: reference.and_then(|p| p.equal),
    })
}

/// Rows for every `(point, batch)` pair, in config order.
pub fn run_policy_table(cfg: &PolicyTableConfig) -> Result<Vec<PolicyRow>> {
    if cfg.batches.is_empty() || cfg.points.is_empty() {
        return Err(Error::InvalidArgument("policy table needs points and batch laws".into()));
    }
    if !(cfg.dp_load > 0.0 && cfg.dp_load <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "dp_load must lie in (0, 1], got {}",
            cfg.dp_load
        )));
    }
    let base = cfg.instance.to_instance()?;
    let jobs: Vec<((usize, f64), usize)> = cfg
        .points
        .iter()
        .flat_map(|p| (0..cfg.batches.len()).map(move |b| (*p, b)))
        .collect();
    jobs.par_iter()
        .map(|(p, b)| policy_row(cfg, &base, *p, *b))
        .collect()
}

/// One pricing case of the optimal-pricing table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PricingCase {
    #[serde(rename = "W")]
    pub inventory: usize,
    pub periods: usize,
    pub p1: f64,
    pub demand: DemandFunction,
    #[serde(default)]
    pub reference_prices: Option<Vec<f64>>,
    #[serde(default)]
    pub reference_objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PricingTableConfig {
    pub rows: Vec<PricingCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PricingRow {
    #[serde(rename = "W")]
    pub inventory: usize,
    pub demand: String,
    pub periods: usize,
    pub prices: Vec<f64>,
    pub objective: f64,
    pub kkt_residual: f64,
    pub reference_prices: Option<Vec<f64>>,
    pub reference_objective: Option<f64>,
}

impl CsvRow for PricingRow {
    fn header() -> Vec<&'static str> {
        vec![
            "W", "demand", "m", "prices", "objective", "kkt_residual", "reference_prices",
            "reference_objective",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.inventory.to_string(),
            self.demand.clone(),
            self.periods.to_string(),
            ladder(&self.prices),
            num(self.objective),
            num(self.kkt_residual),
            self.reference_prices.as_deref().map(ladder).unwrap_or_default(),
            opt(self.reference_objective),
        ]
    }
}

fn demand_label(d: &DemandFunction) -> String {
    let kind = match d.kind {
        crate::pricing::DemandKind::Linear => "linear",
        crate::pricing::DemandKind::Exponential => "exponential",
        crate::pricing::DemandKind::Power => "power",
    };
    format!("{kind}({},{})", d.a, d.b)
}

fn frame(inventory: usize, periods: usize, p1: f64, demand: &DemandFunction) -> Result<PricingFrame> {
    // Re-validate parameters that bypassed the constructor during parsing.
    let checked = DemandFunction::new(demand.kind, demand.a, demand.b)?;
    let checked = match &demand.period_scale {
        Some(s) => checked.with_period_scale(s.clone())?,
        None => checked,
    };
    PricingFrame::new(inventory, periods, p1, checked)
}

/// Exact optimal ladders for each case.
pub fn run_pricing_table(cfg: &PricingTableConfig) -> Result<Vec<PricingRow>> {
    cfg.rows
        .iter()
        .map(|c| {
            let f = frame(c.inventory, c.periods, c.p1, &c.demand)?;
            let sol = solve_pricing_exact(&f, &ExactOptions::default())?;
            Ok(PricingRow {
                inventory: c.inventory,
                demand: demand_label(&c.demand),
                periods: c.periods,
                prices: sol.prices,
                objective: sol.objective,
                kkt_residual: sol.kkt_residual,
                reference_prices: c.reference_prices.clone(),
                reference_objective: c.reference_objective,
            })
        })
        .collect()
}

/// Optimal ladders as inventory changes, for one demand curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InventoryPricingConfig {
    pub periods: usize,
    pub p1: f64,
    pub demand: DemandFunction,
    pub rows: Vec<InventoryPricingCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InventoryPricingCase {
    #[serde(rename = "W")]
    pub inventory: usize,
    #[serde(default)]
    pub reference_prices: Option<Vec<f64>>,
    #[serde(default)]
    pub reference_objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InventoryPricingRow {
    #[serde(rename = "W")]
    pub inventory: usize,
    pub prices: Vec<f64>,
    pub objective: f64,
    /// Periods after the first still priced within 0.005 of `p_1`.
    pub full_price_periods: usize,
    pub reference_prices: Option<Vec<f64>>,
    pub reference_objective: Option<f64>,
}

impl CsvRow for InventoryPricingRow {
    fn header() -> Vec<&'static str> {
        vec!["W", "prices", "objective", "full_price_periods", "reference_prices", "reference_objective"]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.inventory.to_string(),
            ladder(&self.prices),
            num(self.objective),
            self.full_price_periods.to_string(),
            self.reference_prices.as_deref().map(ladder).unwrap_or_default(),
            opt(self.reference_objective),
        ]
    }
}

/// Rows sorted by increasing inventory.
pub fn run_inventory_pricing(cfg: &InventoryPricingConfig) -> Result<Vec<InventoryPricingRow>> {
    let mut rows = cfg
        .rows
        .iter()
        .map(|c| {
            let f = frame(c.inventory, cfg.periods, cfg.p1, &cfg.demand)?;
            let sol = solve_pricing_exact(&f, &ExactOptions::default())?;
            let full_price_periods = sol.prices[1..]
                .iter()
                .filter(|p| **p >= cfg.p1 - 0.005)
                .count();
            Ok(InventoryPricingRow {
                inventory: c.inventory,
                prices: sol.prices,
                objective: sol.objective,
                full_price_periods,
                reference_prices: c.reference_prices.clone(),
                reference_objective: c.reference_objective,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| r.inventory);
    Ok(rows)
}

/// Exact versus approximate versus a fixed alternative ladder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproximationCase {
    #[serde(rename = "W")]
    pub inventory: usize,
    pub periods: usize,
    pub p1: f64,
    pub demand: DemandFunction,
    pub alternative: Vec<f64>,
    #[serde(default)]
    pub reference_exact_objective: Option<f64>,
    #[serde(default)]
    pub reference_approx_prices: Option<Vec<f64>>,
    #[serde(default)]
    pub reference_approx_objective: Option<f64>,
    #[serde(default)]
    pub reference_alternative_objective: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApproximationConfig {
    pub rows: Vec<ApproximationCase>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationRow {
    #[serde(rename = "W")]
    pub inventory: usize,
    pub demand: String,
    pub exact_prices: Vec<f64>,
    pub exact_objective: f64,
    pub approx_prices: Vec<f64>,
    pub approx_objective: f64,
    pub approx_pct_off: f64,
    pub alternative_prices: Vec<f64>,
    pub alternative_objective: f64,
    pub alternative_pct_off: f64,
    pub reference_exact_objective: Option<f64>,
    pub reference_approx_objective: Option<f64>,
    pub reference_alternative_objective: Option<f64>,
}

impl CsvRow for ApproximationRow {
    fn header() -> Vec<&'static str> {
        vec![
            "W", "demand", "exact_prices", "exact_objective", "approx_prices", "approx_objective",
            "approx_pct_off", "alternative_prices", "alternative_objective",
            "alternative_pct_off", "reference_exact_objective", "reference_approx_objective",
            "reference_alternative_objective",
        ]
    }

    fn record(&self) -> Vec<String> {
        vec![
            self.inventory.to_string(),
            self.demand.clone(),
            ladder(&self.exact_prices),
            num(self.exact_objective),
            ladder(&self.approx_prices),
            num(self.approx_objective),
            num(self.approx_pct_off),
            ladder(&self.alternative_prices),
            num(self.alternative_objective),
            num(self.alternative_pct_off),
            opt(self.reference_exact_objective),
            opt(self.reference_approx_objective),
            opt(self.reference_alternative_objective),
        ]
    }
}

pub fn run_approximation_table(cfg: &ApproximationConfig) -> Result<Vec<ApproximationRow>> {
    cfg.rows
        .iter()
        .map(|c| {
            let f = frame(c.inventory, c.periods, c.p1, &c.demand)?;
            let exact = solve_pricing_exact(&f, &ExactOptions::default())?;
            let approx = solve_pricing_approx(&f, ApproxDenominator::Cumulative)?;
            let alternative_objective = pricing_objective(&f, &c.alternative)?;
            Ok(ApproximationRow {
                inventory: c.inventory,
                demand: demand_label(&c.demand),
                approx_pct_off: pct_off(exact.objective, approx.objective),
                alternative_pct_off: pct_off(exact.objective, alternative_objective),
                exact_prices: exact.prices,
                exact_objective: exact.objective,
                approx_prices: approx.prices,
                approx_objective: approx.objective,
                alternative_prices: c.alternative.clone(),
                alternative_objective,
                reference_exact_objective: c.reference_exact_objective,
                reference_approx_objective: c.reference_approx_objective,
                reference_alternative_objective: c.reference_alternative_objective,
            })
        })
        .collect()
}

/// Output of [`reproduce`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Artifact {
    Policies(Vec<PolicyRow>),
    Pricing(Vec<PricingRow>),
    InventoryPricing(Vec<InventoryPricingRow>),
    Approximation(Vec<ApproximationRow>),
}

impl Artifact {
    /// Header and records for CSV output.
    pub fn table(&self) -> (Vec<&'static str>, Vec<Vec<String>>) {
        fn collect<R: CsvRow>(rows: &[R]) -> (Vec<&'static str>, Vec<Vec<String>>) {
            (R::header(), rows.iter().map(CsvRow::record).collect())
        }
        match self {
            Artifact::Policies(r) => collect(r),
            Artifact::Pricing(r) => collect(r),
            Artifact::InventoryPricing(r) => collect(r),
            Artifact::Approximation(r) => collect(r),
        }
    }
}

/// Runs a named artifact from a JSON definition.
pub fn reproduce_from(name: &str, json: &str) -> Result<Artifact> {
    match name {
        "table1" | "table2" | "figure1" => {
            Ok(Artifact::Policies(run_policy_table(&serde_json::from_str(json)?)?))
        }
        "table3" => Ok(Artifact::Pricing(run_pricing_table(&serde_json::from_str(json)?)?)),
        "table4" => Ok(Artifact::InventoryPricing(run_inventory_pricing(
            &serde_json::from_str(json)?,
        )?)),
        "table5" => Ok(Artifact::Approximation(run_approximation_table(
            &serde_json::from_str(json)?,
        )?)),
        other => Err(Error::InvalidArgument(format!(
            "unknown artifact {other:?}; expected one of {}",
            ARTIFACTS.join(", ")
        ))),
    }
}

/// Runs a named artifact from its bundled definition.
pub fn reproduce(name: &str) -> Result<Artifact> {
    let json = bundled_config(name)
        .filter(|_| ARTIFACTS.contains(&name))
        .ok_or_else(|| {
            Error::InvalidArgument(format!(
                "unknown artifact {name:?}; expected one of {}",
                ARTIFACTS.join(", ")
            ))
        })?;
    reproduce_from(name, json)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_configs_parse() {
        for name in ["table1", "table2", "figure1"] {
            let cfg: PolicyTableConfig = serde_json::from_str(bundled_config(name).unwrap()).unwrap();
            cfg.instance.to_instance().unwrap();
            for b in &cfg.batches {
                b.build().unwrap();
            }
        }
        let _: PricingTableConfig = serde_json::from_str(bundled_config("table3").unwrap()).unwrap();
        let _: InventoryPricingConfig =
            serde_json::from_str(bundled_config("table4").unwrap()).unwrap();
        let _: ApproximationConfig = serde_json::from_str(bundled_config("table5").unwrap()).unwrap();
        InstanceConfig::from_json(bundled_config("example").unwrap())
            .unwrap()
            .to_instance()
            .unwrap();
    }

    #[test]
    fn unknown_artifact_is_an_error() {
        assert!(reproduce("table9").is_err());
        assert!(reproduce("example").is_err());
    }

    #[test]
    fn records_match_headers() {
        let row = InventoryPricingRow {
            inventory: 5,
            prices: vec![1.0, 0.5],
            objective: 2.0,
            full_price_periods: 0,
            reference_prices: None,
            reference_objective: None,
        };
        assert_eq!(row.record().len(), InventoryPricingRow::header().len());
        assert_eq!(row.record()[1], "1.0000 0.5000");
    }
}
