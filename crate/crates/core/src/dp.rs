//! Finite-horizon dynamic program over (period, remaining inventory).
//!
//! Periods are numbered `1..=T_d`; row `T_d + 1` is the all-zero terminal row.
//! Each period sees at most one order; an order of class `i` and size `j` is
//! either supplied in full (earning `p_i * j`) or rejected. Solving the table
//! costs `O(T_d * W^2 * m)` time and `O(T_d * W)` memory.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::DiscretizedInstance;

/// Optimal expected revenue-to-go `V(n, d)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValueTable {
    periods: usize,
    inventory: usize,
    prices: Vec<f64>,
    values: Vec<f64>,
}

impl ValueTable {
    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn inventory(&self) -> usize {
        self.inventory
    }

    pub fn classes(&self) -> usize {
        self.prices.len()
    }

    /// `V(n, d)` for `1 <= n <= T_d + 1`, `0 <= d <= W`.
    pub fn value(&self, n: usize, d: usize) -> f64 {
        debug_assert!((1..=self.periods + 1).contains(&n) && d <= self.inventory);
        self.values[(n - 1) * (self.inventory + 1) + d]
    }

    pub fn row(&self, n: usize) -> &[f64] {
        let w = self.inventory + 1;
        &self.values[(n - 1) * w..n * w]
    }

    /// `V(1, W)`: the optimal expected revenue from the full inventory.
    pub fn optimal_value(&self) -> f64 {
        self.value(1, self.inventory)
    }

    /// `(n, d, value)` triples in row-major order, for CSV dumps.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let w = self.inventory + 1;
        self.values
            .iter()
            .enumerate()
            .map(move |(idx, v)| (idx / w + 1, idx % w, *v))
    }
}

/// Probability that period `n` leaves inventory `d` untouched whatever the
/// decision: no arrival, a size-0 order, or an order larger than `d`.
fn stay_probabilities(inst: &DiscretizedInstance) -> Vec<f64> {
    let w = inst.inventory();
    (0..=w)
        .map(|d| {
            let mut stay = inst.theta0();
            for i in 0..inst.classes() {
                let row = inst.theta_row(i);
                stay += row[0] + row[d + 1..].iter().sum::<f64>() + inst.overflow(i);
            }
            stay
        })
        .collect()
}

fn backward<F>(inst: &DiscretizedInstance, mut supply: F) -> Vec<f64>
where
    F: FnMut(usize, usize, usize, usize, f64, f64) -> bool,
{
    let w = inst.inventory();
    let periods = inst.periods();
    let stay = stay_probabilities(inst);
    let prices = inst.prices();
    let mut values = vec![0.0; (periods + 1) * (w + 1)];
    for n in (1..=periods).rev() {
        let (head, tail) = values.split_at_mut(n * (w + 1));
        let next = &tail[..w + 1];
        let cur = &mut head[(n - 1) * (w + 1)..];
        for d in 1..=w {
            let hold = next[d];
            let mut v = stay[d] * hold;
            for (i, price) in prices.iter().enumerate() {
                let row = inst.theta_row(i);
                for j in 1..=d {
                    let theta = row[j];
                    if theta == 0.0 {
                        continue;
                    }
                    let sell = price * j as f64 + next[d - j];
                    v += theta * if supply(n, d, i, j, sell, hold) { sell } else { hold };
                }
            }
            cur[d] = v;
        }
    }
    values
}

/// Backward recursion for the optimal value table.
pub fn solve_dp(inst: &DiscretizedInstance) -> ValueTable {
    let values = backward(inst, |_, _, _, _, sell, hold| sell >= hold);
    ValueTable {
        periods: inst.periods(),
        inventory: inst.inventory(),
        prices: inst.prices().to_vec(),
        values,
    }
}

/// Expected revenue of an arbitrary deterministic policy on the discrete clock.
///
/// `supply(n, d, class, size)` decides whether to fill an order that fits.
pub fn evaluate_policy<F>(inst: &DiscretizedInstance, mut supply: F) -> f64
where
    F: FnMut(usize, usize, usize, usize) -> bool,
{
    let values = backward(inst, |n, d, i, j, _, _| supply(n, d, i, j));
    values[inst.inventory()]
}

/// Value of a switch-over policy whose continuous switch times `t_1..t_{m-1}`
/// are mapped onto periods by their midpoints: class `k` is open in period `n`
/// when `(n - 1/2) * delta > t_{k-1}`.
pub fn evaluate_switch_times(inst: &DiscretizedInstance, times: &[f64]) -> Result<f64> {
    if times.len() + 1 != inst.classes() {
        return Err(Error::InvalidArgument(format!(
            "{} switch times for {} classes",
            times.len(),
            inst.classes()
        )));
    }
    let delta = inst.delta();
    Ok(evaluate_policy(inst, |n, _, class, _| {
        class == 0 || (n as f64 - 0.5) * delta > times[class - 1]
    }))
}

/// Relative slack used when comparing revenue-to-go values.
const TIE_TOLERANCE: f64 = 1e-12;

/// Optimal decision for a class-`class` order of size `size` at state `(n, d)`.
/// Ties go to accepting.
pub fn accept(table: &ValueTable, n: usize, d: usize, class: usize, size: usize) -> Result<bool> {
    if n == 0 || n > table.periods || d > table.inventory {
        return Err(Error::InvalidArgument(format!(
            "state (n={n}, d={d}) outside 1..={} x 0..={}",
            table.periods, table.inventory
        )));
    }
    if class >= table.prices.len() {
        return Err(Error::InvalidArgument(format!("no price class {class}")));
    }
    if size > d {
        return Ok(false);
    }
    let hold = table.value(n + 1, d);
    let sell = table.prices[class] * size as f64 + table.value(n + 1, d - size);
    Ok(sell >= hold - TIE_TOLERANCE * hold.abs().max(1.0))
}

/// Kind of departure from the threshold structure of unit-batch tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ThresholdViolationKind {
    /// Accepted in some period but rejected in a later one.
    NotUpSet,
    /// Earliest acceptance period increases with inventory.
    IncreasingInInventory,
    /// A lower-priced class opens before a higher-priced one.
    ClassOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdViolation {
    pub kind: ThresholdViolationKind,
    pub class: usize,
    pub inventory: usize,
    pub period: usize,
}

/// Earliest accepting period per (class, inventory) for unit-batch tables.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdProfile {
    /// `first_accept[k][d]`: smallest `n` at which class `k` is accepted with
    /// `d` units left, `T_d + 1` if never. Entry `d = 0` is always `T_d + 1`.
    pub first_accept: Vec<Vec<usize>>,
    pub violations: Vec<ThresholdViolation>,
}

impl ThresholdProfile {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Reads the period thresholds off a solved unit-batch table and checks that
/// acceptance is an up-set in `n`, monotone in `d` and ordered by class.
pub fn extract_thresholds(
    table: &ValueTable,
    inst: &DiscretizedInstance,
) -> Result<ThresholdProfile> {
    if !inst.is_unit_batch() {
        return Err(Error::Unsupported(
            "threshold extraction needs unit-size orders".into(),
        ));
    }
    let periods = table.periods;
    let w = table.inventory;
    let m = inst.classes();
    let never = periods + 1;
    let mut first_accept = vec![vec![never; w + 1]; m];
    let mut violations = Vec::new();
    for (k, firsts) in first_accept.iter_mut().enumerate() {
        for d in 1..=w {
            let mut first = never;
            for n in 1..=periods {
                let ok = accept(table, n, d, k, 1)?;
                if ok && first == never {
                    first = n;
                } else if !ok && first != never {
                    violations.push(ThresholdViolation {
                        kind: ThresholdViolationKind::NotUpSet,
                        class: k,
                        inventory: d,
                        period: n,
                    });
                }
            }
            firsts[d] = first;
        }
        for d in 2..=w {
            if firsts[d] > firsts[d - 1] {
                violations.push(ThresholdViolation {
                    kind: ThresholdViolationKind::IncreasingInInventory,
                    class: k,
                    inventory: d,
                    period: firsts[d],
                });
            }
        }
    }
    for k in 1..m {
        for d in 1..=w {
            if first_accept[k][d] < first_accept[k - 1][d] {
                violations.push(ThresholdViolation {
                    kind: ThresholdViolationKind::ClassOrder,
                    class: k,
                    inventory: d,
                    period: first_accept[k][d],
                });
            }
        }
    }
    Ok(ThresholdProfile {
        first_accept,
        violations,
    })
}

/// Largest observed departures from the structural properties of the table.
/// All fields are zero when the properties hold exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StructureReport {
    /// Largest positive second difference in `d`.
    pub concavity: f64,
    /// Largest increase of `V(n, d) - V(n, d - 1)` as `n` grows.
    pub submodularity: f64,
    /// Largest decrease of `V(n, d)` in `d`.
    pub monotone_inventory: f64,
    /// Largest increase of `V(n, d)` in `n`.
    pub monotone_time: f64,
}

impl StructureReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.concavity <= tol
            && self.submodularity <= tol
            && self.monotone_inventory <= tol
            && self.monotone_time <= tol
    }
}

pub fn check_structure(table: &ValueTable) -> StructureReport {
    let mut r = StructureReport {
        concavity: 0.0,
        submodularity: 0.0,
        monotone_inventory: 0.0,
        monotone_time: 0.0,
    };
    let w = table.inventory;
    for n in 1..=table.periods + 1 {
        let row = table.row(n);
        for d in 1..=w {
            r.monotone_inventory = r.monotone_inventory.max(row[d - 1] - row[d]);
            if d < w {
                r.concavity = r.concavity.max(row[d + 1] - 2.0 * row[d] + row[d - 1]);
            }
        }
        if n <= table.periods {
            let later = table.row(n + 1);
            for d in 0..=w {
                r.monotone_time = r.monotone_time.max(later[d] - row[d]);
                if d >= 1 {
                    let here = row[d] - row[d - 1];
                    let there = later[d] - later[d - 1];
                    r.submodularity = r.submodularity.max(there - here);
                }
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(periods: usize, inventory: usize, theta: f64) -> DiscretizedInstance {
        let mut row = vec![0.0; inventory + 1];
        row[1] = theta;
        DiscretizedInstance::from_theta(vec![1.0], vec![row], periods).unwrap()
    }

    #[test]
    fn one_and_two_period_values() {
        let t = solve_dp(&single(1, 1, 0.5));
        assert_eq!(t.optimal_value(), 0.5);
        let t = solve_dp(&single(2, 1, 0.5));
        assert!((t.optimal_value() - 0.75).abs() < 1e-15);
        assert!(accept(&t, 1, 1, 0, 1).unwrap());
    }

    #[test]
    fn accept_edges() {
        let inst = DiscretizedInstance::from_theta(
            vec![1.0, 0.5],
            vec![vec![0.0, 0.3, 0.1], vec![0.0, 0.3, 0.1]],
            3,
        )
        .unwrap();
        let t = solve_dp(&inst);
        for d in 1..=2 {
            for j in 1..=d {
                assert!(accept(&t, 3, d, 1, j).unwrap());
            }
        }
        assert!(!accept(&t, 1, 1, 0, 2).unwrap());
        assert!(accept(&t, 0, 1, 0, 1).is_err());
        assert!(accept(&t, 4, 1, 0, 1).is_err());
        assert!(accept(&t, 1, 3, 0, 1).is_err());
    }

    #[test]
    fn table_has_zero_column_and_terminal_row() {
        let inst = DiscretizedInstance::from_theta(
            vec![1.0, 0.5],
            vec![vec![0.0, 0.3, 0.1], vec![0.0, 0.2, 0.2]],
            4,
        )
        .unwrap();
        let t = solve_dp(&inst);
        assert!(t.row(5).iter().all(|v| *v == 0.0));
        assert!((1..=5).all(|n| t.value(n, 0) == 0.0));
        assert_eq!(t.entries().count(), 5 * 3);
    }

    #[test]
    fn single_class_is_always_accepted() {
        let inst = DiscretizedInstance::from_theta(vec![1.0], vec![vec![0.0, 0.6, 0.0, 0.0]], 6)
            .unwrap();
        let t = solve_dp(&inst);
        let p = extract_thresholds(&t, &inst).unwrap();
        assert!(p.is_consistent());
        assert!(p.first_accept[0][1..].iter().all(|n| *n == 1));
    }

    #[test]
    fn batch_instance_refuses_thresholds() {
        let inst = DiscretizedInstance::from_theta(vec![1.0], vec![vec![0.0, 0.3, 0.3]], 2).unwrap();
        let t = solve_dp(&inst);
        assert!(matches!(
            extract_thresholds(&t, &inst),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn policy_evaluation_matches_dp_for_optimal_rule() {
        let inst = DiscretizedInstance::from_theta(
            vec![1.0, 0.4],
            vec![vec![0.0, 0.25, 0.1], vec![0.1, 0.3, 0.15]],
            5,
        )
        .unwrap();
        let t = solve_dp(&inst);
        let v = evaluate_policy(&inst, |n, d, i, j| accept(&t, n, d, i, j).unwrap());
        assert!((v - t.optimal_value()).abs() < 1e-12);
        let fcfs = evaluate_policy(&inst, |_, _, _, _| true);
        assert!(fcfs <= t.optimal_value() + 1e-12);
    }
}
