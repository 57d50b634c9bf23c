//! Monte Carlo evaluation of admission policies on the continuous-time model.
//!
//! Each replication draws the Poisson order streams of every class on
//! `[0, T]`, merges them by arrival time and replays them against a policy.
//! Replication `r` uses ChaCha8 seeded with `seed` on stream `r`, so results
//! do not depend on how replications are scheduled across threads, and every
//! policy in a comparison sees the same orders.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dp::{accept, ValueTable};
use crate::error::{ensure, Error, Result};
use crate::model::{ProblemInstance, OVERSIZE};
use crate::poisson::sample_poisson;

/// Two-sided 99% normal quantile.
pub const Z99: f64 = 2.576;

/// An admission rule.
#[derive(Debug, Clone)]
pub enum Policy {
    /// Class `k` (1-based) is open after time `t_{k-1}`; holds `t_1..t_{m-1}`.
    SwitchOver(Vec<f64>),
    /// Accept every order that fits.
    Fcfs,
    /// Switch-over with `t_k = k T / m`.
    EqualSpaced,
    /// Optimal decisions of a DP table on a clock with step `delta`.
    DpTable { table: Arc<ValueTable>, delta: f64 },
}

impl Policy {
    /// Checked switch-over policy.
    pub fn switch_over(times: Vec<f64>, horizon: f64) -> Result<Self> {
        ensure(
            times.iter().all(|t| (0.0..=horizon).contains(t)),
            || "switch times must lie in [0, T]".into(),
        )?;
        ensure(
            times.windows(2).all(|w| w[0] <= w[1]),
            || "switch times must be sorted".into(),
        )?;
        Ok(Self::SwitchOver(times))
    }

    pub fn dp_table(table: ValueTable, delta: f64) -> Result<Self> {
        ensure(delta > 0.0 && delta.is_finite(), || "DP step must be positive".into())?;
        Ok(Self::DpTable {
            table: Arc::new(table),
            delta,
        })
    }

    /// Short name used in tables.
    pub fn name(&self) -> &'static str {
        match self {
            Policy::SwitchOver(_) => "switch_over",
            Policy::Fcfs => "fcfs",
            Policy::EqualSpaced => "equal_spaced",
            Policy::DpTable { .. } => "dp_optimal",
        }
    }

    fn check(&self, inst: &ProblemInstance) -> Result<()> {
        let m = inst.classes();
        match self {
            Policy::SwitchOver(times) => ensure(
                times.len() + 1 == m,
                || format!("{} switch times for {m} classes", times.len()),
            ),
            Policy::DpTable { table, .. } => {
                ensure(
                    table.classes() == m,
                    || "DP table was built for a different number of classes".into(),
                )?;
                ensure(
                    table.inventory() >= inst.inventory(),
                    || "DP table covers less inventory than the instance".into(),
                )
            }
            _ => Ok(()),
        }
    }

    /// Decision for a class-`class` order of `size` units at time `time`
    /// with `remaining` units left. Orders that do not fit are always refused.
    pub fn admits(
        &self,
        inst: &ProblemInstance,
        time: f64,
        class: usize,
        size: usize,
        remaining: usize,
    ) -> bool {
        if size > remaining {
            return false;
        }
        match self {
            Policy::Fcfs => true,
            Policy::SwitchOver(times) => class == 0 || time > times[class - 1],
            Policy::EqualSpaced => {
                let m = inst.classes() as f64;
                class == 0 || time > class as f64 * inst.horizon() / m
            }
            Policy::DpTable { table, delta } => {
                let n = ((time / delta).floor() as usize + 1).clamp(1, table.periods());
                accept(table, n, remaining, class, size).unwrap_or(false)
            }
        }
    }
}

/// One order of a sample path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Order {
    pub time: f64,
    pub class: usize,
    /// Requested units, or [`OVERSIZE`] when larger than any inventory.
    pub size: usize,
}

/// Orders of replication `rep`, sorted by arrival time.
pub fn sample_orders(inst: &ProblemInstance, seed: u64, rep: u64) -> Vec<Order> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    let horizon = inst.horizon();
    let mut orders = Vec::new();
    for (class, rate) in inst.rates().rates().iter().enumerate() {
        let batch = inst.class_batch(class);
        let count = sample_poisson(rate * horizon, &mut rng);
        for _ in 0..count {
            let time = horizon * rng.random::<f64>();
            let size = batch.sample(rng.random::<f64>());
            orders.push(Order { time, class, size });
        }
    }
    orders.sort_by(|a, b| a.time.total_cmp(&b.time));
    orders
}

/// Outcome of one policy on one sample path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathOutcome {
    pub revenue: f64,
    pub accepted_units: Vec<usize>,
    /// Units requested per class by orders that could ever fit.
    pub requested_units: Vec<usize>,
}

/// Replays `orders` against `policy`.
pub fn run_path(inst: &ProblemInstance, policy: &Policy, orders: &[Order]) -> PathOutcome {
    let m = inst.classes();
    let prices = inst.prices();
    let mut remaining = inst.inventory();
    let mut revenue = 0.0;
    let mut accepted_units = vec![0; m];
    let mut requested_units = vec![0; m];
    for o in orders {
        if o.size != OVERSIZE {
            requested_units[o.class] += o.size;
        }
        if policy.admits(inst, o.time, o.class, o.size, remaining) {
            remaining -= o.size;
            revenue += prices[o.class] * o.size as f64;
            accepted_units[o.class] += o.size;
        }
    }
    PathOutcome {
        revenue,
        accepted_units,
        requested_units,
    }
}

/// Sum with pairwise splitting, so the result depends only on the order of
/// `xs` and not on how it was produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 8 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Mean and 99% half width of a sample.
pub fn mean_and_half_width(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    let sq: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    let var = if xs.len() > 1 { pairwise_sum(&sq) / (n - 1.0) } else { 0.0 };
    (mean, Z99 * var.sqrt() / n.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimEstimate {
    pub mean: f64,
    /// Half width of the 99% confidence interval.
    pub half_width: f64,
    pub replications: usize,
    /// Fraction of demanded class-`k` units that were supplied: accepted
    /// units over `lambda_k T E[Q]`, or over the requested units of orders
    /// that can fit when the batch mean is undefined.
    pub per_class_acceptance: Vec<f64>,
    pub seed: u64,
}

fn estimate(inst: &ProblemInstance, outcomes: &[PathOutcome], seed: u64) -> SimEstimate {
    let revenues: Vec<f64> = outcomes.iter().map(|o| o.revenue).collect();
    let (mean, half_width) = mean_and_half_width(&revenues);
    let reps = outcomes.len() as f64;
    let per_class_acceptance = (0..inst.classes())
        .map(|k| {
            let accepted: f64 = outcomes.iter().map(|o| o.accepted_units[k] as f64).sum();
            let demanded = match inst.class_batch(k).mean() {
                Some(q) => reps * inst.rates().rates()[k] * inst.horizon() * q,
                None => outcomes.iter().map(|o| o.requested_units[k] as f64).sum(),
            };
            if demanded > 0.0 {
                accepted / demanded
            } else {
                0.0
            }
        })
        .collect();
    SimEstimate {
        mean,
        half_width,
        replications: outcomes.len(),
        per_class_acceptance,
        seed,
    }
}

fn check_reps(replications: usize) -> Result<()> {
    if replications < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 replications, got {replications}"
        )));
    }
    Ok(())
}

/// Expected revenue of `policy` by simulation.
pub fn simulate(
    inst: &ProblemInstance,
    policy: &Policy,
    replications: usize,
    seed: u64,
) -> Result<SimEstimate> {
    check_reps(replications)?;
    policy.check(inst)?;
    let outcomes: Vec<PathOutcome> = (0..replications as u64)
        .into_par_iter()
        .map(|r| run_path(inst, policy, &sample_orders(inst, seed, r)))
        .collect();
    Ok(estimate(inst, &outcomes, seed))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub policy: String,
    pub estimate: SimEstimate,
    /// `100 (best - mean) / best` against the best mean in the comparison.
    pub pct_off_best: f64,
    /// Mean and 99% half width of `best - this` over paired replications.
    pub diff_to_best: f64,
    pub diff_half_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rows: Vec<ComparisonRow>,
    pub best: String,
}

/// Evaluates named policies on common sample paths.
pub fn compare_policies(
    inst: &ProblemInstance,
    policies: &[(String, Policy)],
    replications: usize,
    seed: u64,
) -> Result<Comparison> {
    check_reps(replications)?;
    ensure(!policies.is_empty(), || "no policies to compare".into())?;
    for (_, p) in policies {
        p.check(inst)?;
    }
    let per_rep: Vec<Vec<PathOutcome>> = (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let orders = sample_orders(inst, seed, r);
            policies.iter().map(|(_, p)| run_path(inst, p, &orders)).collect()
        })
        .collect();
    let by_policy: Vec<Vec<PathOutcome>> = (0..policies.len())
        .map(|i| per_rep.iter().map(|rep| rep[i].clone()).collect())
        .collect();
    let estimates: Vec<SimEstimate> = by_policy.iter().map(|o| estimate(inst, o, seed)).collect();
    let best = (0..policies.len())
        .max_by(|a, b| estimates[*a].mean.total_cmp(&estimates[*b].mean))
        .expect("non-empty");
    let best_mean = estimates[best].mean;
    let rows = policies
        .iter()
        .zip(estimates)
        .enumerate()
        .map(|(i, ((name, _), estimate))| {
            let diffs: Vec<f64> = per_rep.iter().map(|rep| rep[best].revenue - rep[i].revenue).collect();
            let (diff_to_best, diff_half_width) = mean_and_half_width(&diffs);
            let pct_off_best = if best_mean > 0.0 {
                100.0 * (best_mean - estimate.mean) / best_mean
            } else {
                0.0
            };
            ComparisonRow {
                policy: name.clone(),
                estimate,
                pct_off_best,
                diff_to_best,
                diff_half_width,
            }
        })
        .collect();
    Ok(Comparison {
        rows,
        best: policies[best].0.clone(),
    })
}
