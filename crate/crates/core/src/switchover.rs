//! Switch-over policies: open the price classes one by one, highest first,
//! and never close them again.
//!
//! A policy is described by switch times `0 = t_0 <= t_1 <= ... <= t_m = T`;
//! during `(t_{l-1}, t_l]` classes `1..=l` are accepted. With
//! `mu_l = sum_{k<=l} Lambda_k y_k`, `y_k = t_k - t_{k-1}`, the expected
//! revenue is `p_11 W - sum_l pi_l G(mu_l)` where `G` is the expected
//! leftover inventory. Choosing the `mu_l` is a separable convex program
//! with one linear constraint, solved here by a multiplier line search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ArrivalRates, PriceLadder, ProblemInstance};
use crate::poisson::{PoissonShortfall, ShortfallCurve};

/// Averaged prices `p_1k` and their successive drops `pi_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedPrices {
    /// `p_1k = sum_{i<=k} lambda_i p_i / Lambda_k`.
    pub p1k: Vec<f64>,
    /// `pi_k = p_1k - p_1,k+1`, with `p_1,m+1 = 0`.
    pub pi: Vec<f64>,
}

pub fn averaged_prices(ladder: &PriceLadder, rates: &ArrivalRates) -> AveragedPrices {
    averaged_from_slices(ladder.prices(), rates.rates())
}

pub(crate) fn averaged_from_slices(prices: &[f64], rates: &[f64]) -> AveragedPrices {
    let mut weighted = 0.0;
    let mut total = 0.0;
    let p1k: Vec<f64> = prices
        .iter()
        .zip(rates)
        .map(|(p, l)| {
            weighted += p * l;
            total += l;
            weighted / total
        })
        .collect();
    let pi = (0..p1k.len())
        .map(|k| {
            let next = p1k.get(k + 1).copied().unwrap_or(0.0);
            // Equal prices can leave a rounding-level drop; treat it as none.
            let drop = p1k[k] - next;
            if drop <= 1e-13 * p1k[k] {
                0.0
            } else {
                drop
            }
        })
        .collect();
    AveragedPrices { p1k, pi }
}

/// Constraint coefficients `c_l = 1/Lambda_l - 1/Lambda_{l+1}`, `1/Lambda_{m+1} = 0`.
pub fn constraint_coefficients(rates: &[f64]) -> Vec<f64> {
    let cum: Vec<f64> = rates
        .iter()
        .scan(0.0, |a, r| {
            *a += r;
            Some(*a)
        })
        .collect();
    (0..cum.len())
        .map(|l| 1.0 / cum[l] - cum.get(l + 1).map_or(0.0, |c| 1.0 / c))
        .collect()
}

/// Optimized switch-over policy together with its multipliers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchOverSolution {
    /// Cumulative means `mu_1 <= ... <= mu_m`.
    pub mu: Vec<f64>,
    /// Segment lengths `y_l = (mu_l - mu_{l-1}) / Lambda_l`.
    pub y: Vec<f64>,
    /// Switch times `t_0 = 0, ..., t_m = T`.
    pub t: Vec<f64>,
    pub eta: f64,
    pub nu: Vec<f64>,
    /// `sum_l pi_l G(mu_l)`.
    pub objective_min: f64,
    /// `p_11 W - objective_min`.
    pub objective_revenue: f64,
    /// `T - sum_l c_l mu_l`; zero when the time constraint binds.
    pub slack: f64,
}

impl SwitchOverSolution {
    /// Interior switch times `t_1..t_{m-1}`.
    pub fn switch_times(&self) -> &[f64] {
        &self.t[1..self.t.len() - 1]
    }
}

/// Minimization objective and the matching revenue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObjectiveValue {
    pub objective: f64,
    pub revenue: f64,
}

fn check_mu(mu: &[f64], m: usize) -> Result<()> {
    if mu.len() != m {
        return Err(Error::InvalidArgument(format!(
            "{} means for {m} classes",
            mu.len()
        )));
    }
    if mu.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidArgument("means must be finite and >= 0".into()));
    }
    if let Some(l) = mu.windows(2).position(|w| w[1] < w[0] - 1e-12 * w[0].max(1.0)) {
        return Err(Error::InvalidArgument(format!(
            "means must be non-decreasing: mu_{} > mu_{}",
            l + 1,
            l + 2
        )));
    }
    Ok(())
}

/// `sum_l pi_l G(mu_l)` for any shortfall curve.
pub fn objective_with<C: ShortfallCurve + ?Sized>(
    prices: &[f64],
    rates: &[f64],
    curve: &C,
    mu: &[f64],
) -> Result<ObjectiveValue> {
    check_mu(mu, prices.len())?;
    let avg = averaged_from_slices(prices, rates);
    let objective: f64 = avg
        .pi
        .iter()
        .zip(mu)
        .map(|(pi, m)| if *pi == 0.0 { 0.0 } else { pi * curve.value(*m) })
        .sum();
    Ok(ObjectiveValue {
        objective,
        revenue: avg.p1k[0] * curve.inventory() as f64 - objective,
    })
}

/// Unit-batch objective `sum_l pi_l H(mu_l)` and revenue.
pub fn objective_unit(inst: &ProblemInstance, mu: &[f64]) -> Result<ObjectiveValue> {
    let curve = PoissonShortfall {
        inventory: inst.inventory() as u64,
    };
    objective_with(inst.prices(), inst.rates().rates(), &curve, mu)
}

/// Cumulative means of the policy with the given interior switch times.
pub fn mu_from_times(rates: &[f64], horizon: f64, times: &[f64]) -> Result<Vec<f64>> {
    let m = rates.len();
    if times.len() + 1 != m {
        return Err(Error::InvalidArgument(format!(
            "{} switch times for {m} classes",
            times.len()
        )));
    }
    let mut prev = 0.0;
    let mut cum_rate = 0.0;
    let mut acc = 0.0;
    let mut mu = Vec::with_capacity(m);
    for (l, rate) in rates.iter().enumerate() {
        let t = if l + 1 < m { times[l] } else { horizon };
        if !(t.is_finite() && t >= prev - 1e-12 && t <= horizon + 1e-12) {
            return Err(Error::InvalidArgument(format!(
                "switch times must be ordered within [0, {horizon}]"
            )));
        }
        cum_rate += rate;
        acc += cum_rate * (t - prev).max(0.0);
        mu.push(acc);
        prev = t.max(prev);
    }
    Ok(mu)
}

/// Revenue of the switch-over policy with fixed interior switch times.
pub fn revenue_at_times_with<C: ShortfallCurve + ?Sized>(
    prices: &[f64],
    rates: &[f64],
    horizon: f64,
    curve: &C,
    times: &[f64],
) -> Result<f64> {
    let mu = mu_from_times(rates, horizon, times)?;
    Ok(objective_with(prices, rates, curve, &mu)?.revenue)
}

/// Unit-batch revenue of fixed switch times.
pub fn revenue_at_times(inst: &ProblemInstance, times: &[f64]) -> Result<f64> {
    let curve = PoissonShortfall {
        inventory: inst.inventory() as u64,
    };
    revenue_at_times_with(inst.prices(), inst.rates().rates(), inst.horizon(), &curve, times)
}

/// Solves `phi(mu) = target` for decreasing `phi` with `phi(0) > target > 0`.
fn invert_decreasing<F: Fn(f64) -> f64>(phi: F, target: f64, scale: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = scale.max(1.0);
    let mut guard = 0;
    while phi(hi) > target && guard < 2000 {
        lo = hi;
        hi *= 2.0;
        guard += 1;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi.max(1.0) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Multiplier line search for `min sum pi_l G(mu_l)` subject to
/// `sum c_l mu_l <= T` and `0 <= mu_1 <= ... <= mu_m`.
///
/// For a given multiplier `eta` each mean solves `-G'(mu_l) = eta c_l / pi_l`,
/// clamped to zero when even `mu_l = 0` gives a smaller slope. The time used
/// decreases in `eta`, so `eta` is bisected until the constraint binds.
/// Classes with `pi_l = 0` (a run of equal top prices) get `mu_l = 0`, which
/// pools them with the next class.
pub fn solve_separable<C: ShortfallCurve + ?Sized>(
    prices: &[f64],
    rates: &[f64],
    horizon: f64,
    curve: &C,
) -> Result<SwitchOverSolution> {
    let m = prices.len();
    if rates.len() != m || m == 0 {
        return Err(Error::InvalidArgument("prices and rates differ in length".into()));
    }
    let avg = averaged_from_slices(prices, rates);
    let c = constraint_coefficients(rates);
    let total_rate: f64 = rates.iter().sum();
    let phi = |mu: f64| -curve.slope(mu);
    let phi0 = phi(0.0);
    let active: Vec<bool> = avg.pi.iter().map(|p| *p > 1e-15 * avg.p1k[0]).collect();

    if !(phi0 > 0.0) || !active.iter().any(|a| *a) {
        // Leftover inventory does not respond to demand: every policy earns
        // the same, so accept everything.
        let mut mu = vec![0.0; m];
        mu[m - 1] = total_rate * horizon;
        return finish(prices, rates, horizon, curve, &avg, &c, mu, 0.0, phi0);
    }

    let ratio: Vec<f64> = (0..m)
        .map(|l| if active[l] { avg.pi[l] * phi0 / c[l] } else { 0.0 })
        .collect();
    let eta_max = ratio.iter().cloned().fold(0.0, f64::max);
    let scale = total_rate * horizon;
    let means_at = |eta: f64| -> Vec<f64> {
        (0..m)
            .map(|l| {
                if !active[l] || ratio[l] <= eta {
                    0.0
                } else {
                    invert_decreasing(phi, eta * c[l] / avg.pi[l], scale)
                }
            })
            .collect()
    };
    let used = |mu: &[f64]| -> f64 { mu.iter().zip(&c).map(|(x, c)| x * c).sum() };

    let mut hi = eta_max;
    let mut lo = 0.5 * eta_max;
    let mut found = false;
    for _ in 0..2000 {
        if used(&means_at(lo)) >= horizon {
            found = true;
            break;
        }
        hi = lo;
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            break;
        }
    }
    if !found {
        // Unconstrained optimum uses less than the horizon.
        let mu = means_at(lo);
        return finish(prices, rates, horizon, curve, &avg, &c, mu, 0.0, phi0);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if used(&means_at(mid)) >= horizon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // `lo` keeps the constraint satisfied from above. The leftover excess can
    // be sizeable when some mean reacts steeply to `eta`; take it off the
    // mean whose stationarity condition is least sensitive to a shift.
    let eta = lo;
    let mut mu = means_at(eta);
    let excess = used(&mu) - horizon;
    if excess > 0.0 {
        let floor = |l: usize| if l > 0 { mu[l - 1] } else { 0.0 };
        let target = (0..m)
            .filter(|l| mu[*l] - excess / c[*l] >= floor(*l) && (*l + 1 == m || mu[*l + 1] >= mu[*l]))
            .min_by(|a, b| {
                let cost = |l: usize| avg.pi[l] * curve.eval(mu[l]).second_derivative.abs() / c[l];
                cost(*a).total_cmp(&cost(*b))
            })
            .unwrap_or(m - 1);
        mu[target] = (mu[target] - excess / c[target]).max(floor(target));
    }
    finish(prices, rates, horizon, curve, &avg, &c, mu, eta, phi0)
}

#[allow(clippy::too_many_arguments)]
fn finish<C: ShortfallCurve + ?Sized>(
    prices: &[f64],
    rates: &[f64],
    horizon: f64,
    curve: &C,
    avg: &AveragedPrices,
    c: &[f64],
    mu: Vec<f64>,
    eta: f64,
    phi0: f64,
) -> Result<SwitchOverSolution> {
    let m = mu.len();
    let cum: Vec<f64> = rates
        .iter()
        .scan(0.0, |a, r| {
            *a += r;
            Some(*a)
        })
        .collect();
    let y: Vec<f64> = (0..m)
        .map(|l| {
            let prev = if l == 0 { 0.0 } else { mu[l - 1] };
            ((mu[l] - prev) / cum[l]).max(0.0)
        })
        .collect();
    let mut t = Vec::with_capacity(m + 1);
    t.push(0.0);
    let mut acc = 0.0;
    for yl in &y[..m - 1] {
        acc += yl;
        t.push(acc.min(horizon));
    }
    t.push(horizon);
    // Multipliers of the ordering constraints over the zero prefix.
    let mut nu = vec![0.0; m];
    if let Some(k) = mu.iter().rposition(|x| *x == 0.0) {
        let mut next = 0.0;
        for j in (0..=k).rev() {
            nu[j] = (next + eta * c[j] - avg.pi[j] * phi0).max(0.0);
            next = nu[j];
        }
    }
    let used: f64 = mu.iter().zip(c).map(|(x, c)| x * c).sum();
    let value = objective_with(prices, rates, curve, &mu)?;
    Ok(SwitchOverSolution {
        mu,
        y,
        t,
        eta,
        nu,
        objective_min: value.objective,
        objective_revenue: value.revenue,
        slack: horizon - used,
    })
}

/// Optimal switch-over policy for unit-size orders.
pub fn solve_unit(inst: &ProblemInstance) -> Result<SwitchOverSolution> {
    if !inst.is_unit_batch() {
        return Err(Error::Unsupported(
            "unit-batch solver given batch demand; use the batch module".into(),
        ));
    }
    let curve = PoissonShortfall {
        inventory: inst.inventory() as u64,
    };
    solve_separable(inst.prices(), inst.rates().rates(), inst.horizon(), &curve)
}

/// Residuals of the first-order optimality system. Each field is a maximum
/// absolute violation; zero means satisfied exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KktReport {
    /// `pi_l (-G'(mu_l)) - eta c_l + nu_l - nu_{l+1}`.
    pub stationarity: f64,
    /// `eta * slack` and `nu_l (mu_l - mu_{l-1})`.
    pub complementarity: f64,
    /// Excess time used and ordering violations.
    pub primal: f64,
    /// Negative multipliers.
    pub dual: f64,
    /// Unused time `T - sum c_l mu_l`.
    pub slack: f64,
}

impl KktReport {
    pub fn max_residual(&self) -> f64 {
        self.stationarity
            .max(self.complementarity)
            .max(self.primal)
            .max(self.dual)
    }
}

pub fn kkt_check_with<C: ShortfallCurve + ?Sized>(
    prices: &[f64],
    rates: &[f64],
    horizon: f64,
    curve: &C,
    sol: &SwitchOverSolution,
) -> KktReport {
    let avg = averaged_from_slices(prices, rates);
    let c = constraint_coefficients(rates);
    let m = prices.len();
    let nu_at = |l: usize| sol.nu.get(l).copied().unwrap_or(0.0);
    let mut stationarity: f64 = 0.0;
    let mut complementarity: f64 = 0.0;
    let mut primal: f64 = 0.0;
    let mut dual: f64 = (-sol.eta).max(0.0);
    for l in 0..m {
        let grad = avg.pi[l] * -curve.slope(sol.mu[l]);
        let r = grad - sol.eta * c[l] + nu_at(l) - nu_at(l + 1);
        stationarity = stationarity.max(r.abs());
        let prev = if l == 0 { 0.0 } else { sol.mu[l - 1] };
        complementarity = complementarity.max((nu_at(l) * (sol.mu[l] - prev)).abs());
        primal = primal.max(prev - sol.mu[l]).max(-sol.mu[l]);
        dual = dual.max(-nu_at(l));
    }
    let used: f64 = sol.mu.iter().zip(&c).map(|(x, c)| x * c).sum();
    let slack = horizon - used;
    complementarity = complementarity.max((sol.eta * slack).abs());
    primal = primal.max(-slack);
    KktReport {
        stationarity,
        complementarity,
        primal,
        dual,
        slack,
    }
}

/// KKT residuals of a unit-batch solution.
pub fn kkt_check(inst: &ProblemInstance, sol: &SwitchOverSolution) -> KktReport {
    let curve = PoissonShortfall {
        inventory: inst.inventory() as u64,
    };
    kkt_check_with(inst.prices(), inst.rates().rates(), inst.horizon(), &curve, sol)
}

/// Expected fraction of class-`k` demanded units that the policy supplies,
/// attributing the units sold in segment `l` to classes by rate share.
pub fn acceptance_rates_with<C: ShortfallCurve + ?Sized>(
    rates: &[f64],
    horizon: f64,
    mean_batch: f64,
    curve: &C,
    mu: &[f64],
) -> Vec<f64> {
    let m = rates.len();
    let mut cum = 0.0;
    let per_segment: Vec<f64> = (0..m)
        .map(|l| {
            cum += rates[l];
            let prev = if l == 0 { 0.0 } else { mu[l - 1] };
            (curve.value(prev) - curve.value(mu[l])) / cum
        })
        .collect();
    (0..m)
        .map(|k| per_segment[k..].iter().sum::<f64>() / (horizon * mean_batch))
        .collect()
}

/// Per-class acceptance rates of a unit-batch solution.
pub fn acceptance_rates(inst: &ProblemInstance, sol: &SwitchOverSolution) -> Result<Vec<f64>> {
    if !inst.is_unit_batch() {
        return Err(Error::Unsupported(
            "use batch::acceptance_rates for batch demand".into(),
        ));
    }
    let curve = PoissonShortfall {
        inventory: inst.inventory() as u64,
    };
    Ok(acceptance_rates_with(
        inst.rates().rates(),
        inst.horizon(),
        1.0,
        &curve,
        &sol.mu,
    ))
}
