//! Markdown pricing: choose a non-increasing price ladder `p_1 >= ... >= p_m`
//! for `m` unit-length selling periods when the order rate depends on price.
//!
//! With `mu_i` the expected number of orders through period `i` and `G` the
//! expected leftover inventory, the revenue is `p_1 W - sum_i r_i G(mu_i)` in
//! the markdown variables `r_i = p_i - p_{i+1}` (`r_m = p_m`), which lie on
//! the simplex `sum r_i = p_1`, `r_i >= 0`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::batch::{expected_remaining, transition_matrix, ExpectedRemaining};
use crate::error::{Error, Result};
use crate::model::BatchDistribution;
use crate::poisson::{PoissonShortfall, ShortfallCurve, ShortfallEval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DemandKind {
    /// `a - b p`, clamped at zero.
    Linear,
    /// `a exp(-b p)`.
    Exponential,
    /// `a p^(-b)`.
    Power,
}

impl std::str::FromStr for DemandKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Self::Linear),
            "exponential" | "exp" => Ok(Self::Exponential),
            "power" => Ok(Self::Power),
            other => Err(Error::InvalidArgument(format!("unknown demand kind {other:?}"))),
        }
    }
}

/// Order rate as a function of price, optionally scaled per period.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DemandFunction {
    pub kind: DemandKind,
    pub a: f64,
    pub b: f64,
    /// Multiplier applied to the rate in each period; absent means 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period_scale: Option<Vec<f64>>,
}

/// Rate and slope at one price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DemandPoint {
    pub rate: f64,
    pub derivative: f64,
    /// False when a linear curve was clamped at zero.
    pub valid: bool,
}

impl DemandFunction {
    pub fn new(kind: DemandKind, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "demand parameters must be positive, got ({a}, {b})"
            )));
        }
        Ok(Self {
            kind,
            a,
            b,
            period_scale: None,
        })
    }

    pub fn with_period_scale(mut self, scale: Vec<f64>) -> Result<Self> {
        if scale.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::InvalidArgument("period scales must be positive".into()));
        }
        self.period_scale = Some(scale);
        Ok(self)
    }

    /// `gamma(p)` and `gamma'(p)` without period scaling.
    pub fn eval(&self, p: f64) -> DemandPoint {
        match self.kind {
            DemandKind::Linear => {
                let rate = self.a - self.b * p;
                if rate >= 0.0 {
                    DemandPoint {
                        rate,
                        derivative: -self.b,
                        valid: true,
                    }
                } else {
                    DemandPoint {
                        rate: 0.0,
                        derivative: 0.0,
                        valid: false,
                    }
                }
            }
            DemandKind::Exponential => {
                let rate = self.a * (-self.b * p).exp();
                DemandPoint {
                    rate,
                    derivative: -self.b * rate,
                    valid: true,
                }
            }
            DemandKind::Power => {
                let rate = self.a * p.powf(-self.b);
                DemandPoint {
                    rate,
                    derivative: -self.b / p * rate,
                    valid: p > 0.0,
                }
            }
        }
    }

    /// Rate and slope in period `i` (0-based).
    pub fn eval_in(&self, period: usize, p: f64) -> DemandPoint {
        let mut d = self.eval(p);
        if let Some(s) = self.period_scale.as_ref().and_then(|s| s.get(period)) {
            d.rate *= s;
            d.derivative *= s;
        }
        d
    }
}

/// Checked demand evaluation.
pub fn demand(f: &DemandFunction, p: f64) -> Result<DemandPoint> {
    if !p.is_finite() || p < 0.0 || (f.kind == DemandKind::Power && p == 0.0) {
        return Err(Error::InvalidArgument(format!(
            "price {p} outside the domain of the demand curve"
        )));
    }
    Ok(f.eval(p))
}

/// Leftover-inventory curve used by the pricing objective.
#[derive(Debug, Clone)]
enum Leftover {
    Unit(PoissonShortfall),
    Batch(ExpectedRemaining),
}

impl Leftover {
    fn eval(&self, mu: f64) -> ShortfallEval {
        match self {
            Leftover::Unit(c) => c.eval(mu),
            Leftover::Batch(c) => c.eval(mu),
        }
    }
}

/// A pricing problem: inventory, number of periods, top price and demand.
#[derive(Debug, Clone)]
pub struct PricingFrame {
    inventory: usize,
    periods: usize,
    p1: f64,
    demand: DemandFunction,
    leftover: Leftover,
}

impl PricingFrame {
    /// Unit-size orders.
    pub fn new(inventory: usize, periods: usize, p1: f64, demand: DemandFunction) -> Result<Self> {
        Self::with_batch(inventory, periods, p1, demand, &BatchDistribution::unit())
    }

    pub fn with_batch(
        inventory: usize,
        periods: usize,
        p1: f64,
        demand: DemandFunction,
        batch: &BatchDistribution,
    ) -> Result<Self> {
        if periods == 0 {
            return Err(Error::InvalidArgument("need at least one period".into()));
        }
        if !(p1.is_finite() && p1 > 0.0) {
            return Err(Error::InvalidArgument(format!("top price must be positive, got {p1}")));
        }
        if let Some(s) = &demand.period_scale {
            if s.len() != periods {
                return Err(Error::InvalidArgument(format!(
                    "{} period scales for {periods} periods",
                    s.len()
                )));
            }
        }
        let leftover = if batch.is_unit() {
            Leftover::Unit(PoissonShortfall {
                inventory: inventory as u64,
            })
        } else {
            Leftover::Batch(expected_remaining(&transition_matrix(batch, inventory)))
        };
        Ok(Self {
            inventory,
            periods,
            p1,
            demand,
            leftover,
        })
    }

    pub fn inventory(&self) -> usize {
        self.inventory
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn demand(&self) -> &DemandFunction {
        &self.demand
    }

    /// Same problem with another top price.
    pub fn with_p1(&self, p1: f64) -> Result<Self> {
        if !(p1.is_finite() && p1 > 0.0) {
            return Err(Error::InvalidArgument(format!("top price must be positive, got {p1}")));
        }
        Ok(Self { p1, ..self.clone() })
    }

    fn mus(&self, prices: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut mu = 0.0;
        let mut slope = 0.0;
        let mut mus = Vec::with_capacity(prices.len());
        let mut slopes = Vec::with_capacity(prices.len());
        for (i, p) in prices.iter().enumerate() {
            let d = self.demand.eval_in(i, *p);
            mu += d.rate;
            slope += d.derivative;
            mus.push(mu);
            slopes.push(slope);
        }
        (mus, slopes)
    }

    /// `sum_i r_i G(mu_i)` for markdowns `r`.
    fn loss(&self, r: &[f64]) -> f64 {
        let prices = prices_from_markdowns(r);
        let (mus, _) = self.mus(&prices);
        r.iter()
            .zip(&mus)
            .map(|(ri, mu)| if *ri == 0.0 { 0.0 } else { ri * self.leftover.eval(*mu).value })
            .sum()
    }

    /// Loss and its gradient `G(mu_j) + sum_i r_i G'(mu_i) Gamma'_{min(i,j)}`,
    /// where `Gamma'_i` is the cumulative rate slope through period `i`.
    fn loss_and_gradient(&self, r: &[f64]) -> (f64, Vec<f64>) {
        let prices = prices_from_markdowns(r);
        let (mus, slopes) = self.mus(&prices);
        let evals: Vec<ShortfallEval> = mus.iter().map(|m| self.leftover.eval(*m)).collect();
        let loss = r.iter().zip(&evals).map(|(ri, e)| ri * e.value).sum();
        let m = r.len();
        // weighted[i] = r_i G'(mu_i); the sum splits at j into a cumulative-slope
        // part for i < j and a fixed slope part for i >= j.
        let weighted: Vec<f64> = r.iter().zip(&evals).map(|(ri, e)| ri * e.derivative).collect();
        let mut tail = vec![0.0; m + 1];
        for i in (0..m).rev() {
            tail[i] = tail[i + 1] + weighted[i];
        }
        let mut head = 0.0;
        let grad = (0..m)
            .map(|j| {
                let g = evals[j].value + head + slopes[j] * tail[j];
                head += weighted[j] * slopes[j];
                g
            })
            .collect();
        (loss, grad)
    }
}

/// `p_i = r_i + ... + r_m`.
pub fn prices_from_markdowns(r: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut p: Vec<f64> = r
        .iter()
        .rev()
        .map(|ri| {
            acc += ri;
            acc
        })
        .collect();
    p.reverse();
    p
}

/// `r_i = p_i - p_{i+1}`, `r_m = p_m`.
pub fn markdowns_from_prices(prices: &[f64]) -> Vec<f64> {
    (0..prices.len())
        .map(|i| prices[i] - prices.get(i + 1).copied().unwrap_or(0.0))
        .collect()
}

/// Revenue `p_1 W - sum_i r_i G(mu_i)` of a full price ladder.
pub fn pricing_objective(frame: &PricingFrame, prices: &[f64]) -> Result<f64> {
    if prices.len() != frame.periods {
        return Err(Error::InvalidArgument(format!(
            "{} prices for {} periods",
            prices.len(),
            frame.periods
        )));
    }
    if (prices[0] - frame.p1).abs() > 1e-12 * frame.p1.max(1.0) {
        return Err(Error::InvalidArgument(format!(
            "first price {} differs from the frame's top price {}",
            prices[0], frame.p1
        )));
    }
    if prices.windows(2).any(|w| w[1] > w[0]) || prices.iter().any(|p| !(*p >= 0.0)) {
        return Err(Error::InvalidArgument("prices must be non-increasing and >= 0".into()));
    }
    if frame.demand.kind == DemandKind::Power && prices.iter().any(|p| *p <= 0.0) {
        return Err(Error::InvalidArgument("power demand needs positive prices".into()));
    }
    let r = markdowns_from_prices(prices);
    Ok(frame.p1 * frame.inventory as f64 - frame.loss(&r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PricingMethod {
    Exact,
    Approximate,
}

impl std::str::FromStr for PricingMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Self::Exact),
            "approx" | "approximate" => Ok(Self::Approximate),
            other => Err(Error::InvalidArgument(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricingSolution {
    pub prices: Vec<f64>,
    pub r: Vec<f64>,
    /// Revenue `p_1 W - sum r_i G(mu_i)`.
    pub objective: f64,
    pub method: PricingMethod,
    /// Largest violation of the first-order conditions on the simplex.
    pub kkt_residual: f64,
    pub eta: f64,
    pub converged: bool,
}

/// Multiplier estimate and first-order residual at `r`.
fn first_order(frame: &PricingFrame, r: &[f64]) -> (f64, f64) {
    let (_, grad) = frame.loss_and_gradient(r);
    let floor = 1e-10 * frame.p1;
    let interior: Vec<f64> = r
        .iter()
        .zip(&grad)
        .filter(|(ri, _)| **ri > floor)
        .map(|(_, g)| *g)
        .collect();
    let eta = interior.iter().sum::<f64>() / interior.len().max(1) as f64;
    let residual = r
        .iter()
        .zip(&grad)
        .map(|(ri, g)| if *ri > floor { (g - eta).abs() } else { (eta - g).max(0.0) })
        .fold(0.0, f64::max);
    (eta, residual)
}

fn solution(frame: &PricingFrame, r: Vec<f64>, method: PricingMethod, converged: bool) -> PricingSolution {
    let prices = prices_from_markdowns(&r);
    let objective = frame.p1 * frame.inventory as f64 - frame.loss(&r);
    let (eta, kkt_residual) = first_order(frame, &r);
    PricingSolution {
        prices,
        r,
        objective,
        method,
        kkt_residual,
        eta,
        converged,
    }
}

/// Euclidean projection onto `{r >= 0, sum r = total}`.
pub fn project_simplex(v: &[f64], total: f64) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut tau = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        acc += x;
        let candidate = (acc - total) / (i + 1) as f64;
        if *x - candidate > 0.0 {
            tau = candidate;
        }
    }
    v.iter().map(|x| (x - tau).max(0.0)).collect()
}

/// Settings for the exact pricing solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactOptions {
    pub starts: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for ExactOptions {
    fn default() -> Self {
        Self {
            starts: 16,
            max_iterations: 2000,
            tolerance: 1e-12,
            seed: 0,
        }
    }
}

/// Smallest last price allowed for power demand, where the rate blows up at 0.
fn price_floor(frame: &PricingFrame) -> f64 {
    match frame.demand.kind {
        DemandKind::Power => 1e-4 * frame.p1,
        _ => 0.0,
    }
}

fn project(frame: &PricingFrame, v: &[f64]) -> Vec<f64> {
    let floor = price_floor(frame);
    if floor == 0.0 {
        return project_simplex(v, frame.p1);
    }
    // Keep p_m = r_m >= floor by projecting the shifted last coordinate.
    let m = v.len();
    let mut shifted = v.to_vec();
    shifted[m - 1] -= floor;
    let mut r = project_simplex(&shifted, frame.p1 - floor);
    r[m - 1] += floor;
    r
}

fn descend(frame: &PricingFrame, start: Vec<f64>, opts: &ExactOptions) -> (Vec<f64>, f64, bool) {
    let mut r = project(frame, &start);
    let (mut f, mut g) = frame.loss_and_gradient(&r);
    let mut step = 1.0 / frame.inventory.max(1) as f64;
    for _ in 0..opts.max_iterations {
        let mut accepted = None;
        let mut s = step;
        for _ in 0..80 {
            let trial: Vec<f64> = r.iter().zip(&g).map(|(ri, gi)| ri - s * gi).collect();
            let trial = project(frame, &trial);
            let decrease: f64 = g.iter().zip(trial.iter().zip(&r)).map(|(gi, (a, b))| gi * (a - b)).sum();
            let ft = frame.loss(&trial);
            if ft <= f + 1e-4 * decrease {
                accepted = Some((trial, ft));
                break;
            }
            s *= 0.5;
        }
        let Some((next, fnext)) = accepted else {
            return (r, f, true);
        };
        let moved = next.iter().zip(&r).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        r = next;
        let improved = f - fnext;
        f = fnext;
        g = frame.loss_and_gradient(&r).1;
        step = (s * 2.0).min(1e6);
        if moved < opts.tolerance * frame.p1 || improved.abs() < 1e-15 * f.abs().max(1.0) {
            return (r, f, true);
        }
    }
    (r, f, false)
}

/// Multi-start projected gradient over the markdown simplex.
pub fn solve_pricing_exact(frame: &PricingFrame, opts: &ExactOptions) -> Result<PricingSolution> {
    let m = frame.periods;
    let p1 = frame.p1;
    if m == 1 {
        return Ok(solution(frame, vec![p1], PricingMethod::Exact, true));
    }
    let mut starts: Vec<Vec<f64>> = vec![vec![p1 / m as f64; m]];
    for ratio in [0.9, 0.7, 0.5] {
        let prices: Vec<f64> = (0..m).map(|i| p1 * f64::powi(ratio, i as i32)).collect();
        starts.push(markdowns_from_prices(&prices));
    }
    for level in [0.8, 0.6] {
        let mut prices = vec![p1 * level; m];
        prices[0] = p1;
        starts.push(markdowns_from_prices(&prices));
    }
    if let Ok(approx) = solve_pricing_approx(frame, ApproxDenominator::Cumulative) {
        starts.push(approx.r);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while starts.len() < opts.starts.max(1) {
        let raw: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let total: f64 = raw.iter().sum();
        starts.push(raw.iter().map(|x| x / total * p1).collect());
    }
    let runs: Vec<(Vec<f64>, f64, bool)> = starts
        .into_par_iter()
        .map(|s| descend(frame, s, opts))
        .collect();
    let (r, _, converged) = runs
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one start");
    Ok(solution(frame, r, PricingMethod::Exact, converged))
}

/// Denominator of the approximate markdown recursion.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxDenominator {
    /// Cumulative slope `gamma'_1 + ... + gamma'_j`.
    #[default]
    Cumulative,
    /// Slope of period `j` alone, `gamma'_j`.
    Marginal,
}

/// Markdowns implied by a first markdown `r1` at top price `top`, or `None`
/// when a price turns non-positive or the recursion degenerates.
fn recurse(frame: &PricingFrame, top: f64, r1: f64, denom: ApproxDenominator) -> Option<Vec<f64>> {
    let m = frame.periods;
    let mut r = vec![r1];
    let mut price = top;
    let first = frame.demand.eval_in(0, price);
    let mut mu = first.rate;
    let mut slope = first.derivative;
    let mut prev_g = frame.leftover.eval(mu).value;
    for j in 1..m {
        price -= r[j - 1];
        if price <= 0.0 {
            return None;
        }
        let d = frame.demand.eval_in(j, price);
        mu += d.rate;
        slope += d.derivative;
        let e = frame.leftover.eval(mu);
        let rate_slope = match denom {
            ApproxDenominator::Cumulative => slope,
            ApproxDenominator::Marginal => d.derivative,
        };
        let den = rate_slope * e.derivative;
        if !(den > 0.0) {
            return None;
        }
        let rj = (prev_g - e.value) / den;
        if !rj.is_finite() {
            return None;
        }
        r.push(rj);
        prev_g = e.value;
    }
    Some(r)
}

fn bracket_roots(
    frame: &PricingFrame,
    top: f64,
    denom: ApproxDenominator,
) -> Vec<Vec<f64>> {
    let excess = |r1: f64| recurse(frame, top, r1, denom).map(|r| r.iter().sum::<f64>() - top);
    let n = 2000;
    let grid: Vec<f64> = (0..=n).map(|i| top * i as f64 / n as f64).collect();
    let vals: Vec<Option<f64>> = grid.iter().map(|x| excess(*x)).collect();
    let mut roots = Vec::new();
    for i in 0..n {
        let (Some(a), Some(b)) = (vals[i], vals[i + 1]) else {
            continue;
        };
        if a == 0.0 {
            roots.push(grid[i]);
            continue;
        }
        if a * b > 0.0 {
            continue;
        }
        let (mut lo, mut hi, mut flo) = (grid[i], grid[i + 1], a);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match excess(mid) {
                Some(v) if v * flo > 0.0 => {
                    lo = mid;
                    flo = v;
                }
                Some(_) => hi = mid,
                None => break,
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    roots
        .into_iter()
        .filter_map(|r1| recurse(frame, top, r1, denom))
        .collect()
}

/// Approximate ladder: drop the coupling term in the first-order conditions,
/// which turns them into a forward recursion for `r_2..r_m` given `r_1`, and
/// search `r_1` so that the markdowns add up to `p_1`.
///
/// When no non-negative `r_1` works, the recursion is rerun with the top
/// price scaled by `C = 10, 20, 40, ...` (up to `10^4`) and the markdowns are
/// divided by `C` afterwards.
pub fn solve_pricing_approx(
    frame: &PricingFrame,
    denom: ApproxDenominator,
) -> Result<PricingSolution> {
    let p1 = frame.p1;
    if frame.periods == 1 {
        return Ok(solution(frame, vec![p1], PricingMethod::Approximate, true));
    }
    let mut scale = 1.0;
    loop {
        let candidates = bracket_roots(frame, scale * p1, denom);
        let best = candidates
            .into_iter()
            .map(|r| {
                let r: Vec<f64> = r.iter().map(|x| (x / scale).max(0.0)).collect();
                let f = frame.loss(&r);
                (r, f)
            })
            .min_by(|a, b| a.1.total_cmp(&b.1));
        if let Some((r, _)) = best {
            let mut sol = solution(frame, r, PricingMethod::Approximate, true);
            // Multiplier from the first optimality equation.
            let (mus, _) = frame.mus(&sol.prices);
            let first = frame.demand.eval_in(0, p1).derivative;
            sol.eta = frame.leftover.eval(mus[0]).value
                + first
                    * sol
                        .r
                        .iter()
                        .zip(&mus)
                        .map(|(ri, mu)| ri * frame.leftover.eval(*mu).derivative)
                        .sum::<f64>();
            return Ok(sol);
        }
        scale = if scale == 1.0 { 10.0 } else { scale * 2.0 };
        if scale > 1e4 {
            return Err(Error::Solver(
                "markdown recursion found no root with r_1 >= 0 for scale factors up to 1e4"
                    .into(),
            ));
        }
    }
}

/// Solves with the frame's top price, by either method.
pub fn solve_pricing(frame: &PricingFrame, method: PricingMethod) -> Result<PricingSolution> {
    match method {
        PricingMethod::Exact => solve_pricing_exact(frame, &ExactOptions::default()),
        PricingMethod::Approximate => solve_pricing_approx(frame, ApproxDenominator::Cumulative),
    }
}

/// Treats the top price as a decision variable: searches `p_1` so that the
/// multiplier of `sum r = p_1` equals `W`, keeping the best root.
pub fn solve_pricing_with_p1(
    frame: &PricingFrame,
    method: PricingMethod,
) -> Result<PricingSolution> {
    let w = frame.inventory as f64;
    let reference = match frame.demand.kind {
        DemandKind::Linear => frame.demand.a / frame.demand.b,
        DemandKind::Exponential => 1.0 / frame.demand.b,
        DemandKind::Power => 1.0,
    };
    let (lo, hi) = match frame.demand.kind {
        DemandKind::Linear => (reference * 1e-3, reference),
        _ => (reference * 1e-2, reference * 1e2),
    };
    let n = 80;
    let grid: Vec<f64> = (0..=n)
        .map(|i| lo * (hi / lo).powf(i as f64 / n as f64))
        .collect();
    let solve_at = |p1: f64| -> Option<PricingSolution> {
        let f = frame.with_p1(p1).ok()?;
        solve_pricing(&f, method).ok()
    };
    let gaps: Vec<Option<f64>> = grid
        .par_iter()
        .map(|p| solve_at(*p).map(|s| s.eta - w))
        .collect();
    let mut best: Option<PricingSolution> = None;
    for i in 0..n {
        let (Some(a), Some(b)) = (gaps[i], gaps[i + 1]) else {
            continue;
        };
        if a * b > 0.0 {
            continue;
        }
        let (mut x0, mut x1, mut f0) = (grid[i], grid[i + 1], a);
        for _ in 0..60 {
            let mid = 0.5 * (x0 + x1);
            let Some(s) = solve_at(mid) else { break };
            let v = s.eta - w;
            if v * f0 > 0.0 {
                x0 = mid;
                f0 = v;
            } else {
                x1 = mid;
            }
            if x1 - x0 < 1e-10 * x1 {
                break;
            }
        }
        if let Some(s) = solve_at(0.5 * (x0 + x1)) {
            if best.as_ref().is_none_or(|b| s.objective > b.objective) {
                best = Some(s);
            }
        }
    }
    best.ok_or_else(|| {
        Error::Solver(format!(
            "no top price in [{lo:.4}, {hi:.4}] makes the multiplier equal W = {w}"
        ))
    })
}
