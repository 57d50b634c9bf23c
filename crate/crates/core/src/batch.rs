//! Batch demand: inventory transition matrices, the expected leftover
//! inventory `G(mu)` after a Poisson(mu) number of orders, and switch-over
//! optimization when orders ask for random quantities.

use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{BatchDistribution, BatchModel, ProblemInstance};
use crate::poisson::{PoissonWindow, ShortfallCurve, ShortfallEval};
use crate::switchover::{
    self, averaged_from_slices, kkt_check_with, solve_separable, KktReport, ObjectiveValue,
    SwitchOverSolution,
};

/// Default Poisson tail mass dropped when mixing matrix powers.
pub const TRUNCATION: f64 = 1e-12;

/// Inventory chain embedded at order arrivals, over states `0..=W`.
///
/// From state `d` an order of size `j <= d` moves the chain to `d - j`; orders
/// of size zero or larger than `d` leave it in place. The matrix is lower
/// triangular, row stochastic, and state 0 is absorbing.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    /// `q[j]` for `j = 1..=W`; index 0 unused.
    q: Vec<f64>,
    diag: Vec<f64>,
}

/// Rate-weighted combination of per-class transition matrices.
pub type MixtureMatrix = TransitionMatrix;

impl TransitionMatrix {
    fn from_sizes(q: Vec<f64>) -> Self {
        let mut diag = Vec::with_capacity(q.len());
        let mut sold = 0.0;
        diag.push(1.0);
        for qj in &q[1..] {
            sold += qj;
            diag.push((1.0 - sold).max(0.0));
        }
        Self { q, diag }
    }

    /// Number of states, `W + 1`.
    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Entry `M[from][to]`.
    pub fn get(&self, from: usize, to: usize) -> f64 {
        if from == to {
            self.diag[from]
        } else if to < from {
            self.q[from - to]
        } else {
            0.0
        }
    }

    /// Dense copy of the matrix.
    pub fn entries(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|r| (0..self.dim()).map(|c| self.get(r, c)).collect())
            .collect()
    }

    /// `out = v M` for a row vector `v` over states.
    pub fn apply_left(&self, v: &[f64], out: &mut [f64]) {
        let n = self.dim();
        for c in 0..n {
            let mut acc = v[c] * self.diag[c];
            for j in 1..n - c {
                acc += v[c + j] * self.q[j];
            }
            out[c] = acc;
        }
    }

    /// Probability that an order at state `d` can be filled, `sum_{1<=j<=d} q_j`.
    fn fill_probability(&self, d: usize) -> f64 {
        1.0 - self.diag[d]
    }

    /// Convex combination `sum_i w_i M_i` of matrices with the same size.
    pub fn combine(weights: &[f64], parts: &[&TransitionMatrix]) -> Result<Self> {
        if weights.len() != parts.len() || parts.is_empty() {
            return Err(Error::InvalidArgument("one weight per matrix".into()));
        }
        let n = parts[0].dim();
        if parts.iter().any(|p| p.dim() != n) {
            return Err(Error::InvalidArgument("matrices differ in size".into()));
        }
        let mut q = vec![0.0; n];
        for (w, part) in weights.iter().zip(parts) {
            for (j, qj) in part.q.iter().enumerate().skip(1) {
                q[j] += w * qj;
            }
        }
        Ok(Self::from_sizes(q))
    }
}

/// Transition matrix of the inventory chain for one batch law.
pub fn transition_matrix(batch: &BatchDistribution, inventory: usize) -> TransitionMatrix {
    let mut q = vec![0.0; inventory + 1];
    for (j, slot) in q.iter_mut().enumerate().skip(1) {
        *slot = batch.prob(j);
    }
    TransitionMatrix::from_sizes(q)
}

fn expected_level(dist: &[f64]) -> f64 {
    dist.iter().enumerate().map(|(d, p)| d as f64 * p).sum()
}

/// Pushes the distribution `dist` through a Poisson(mu) number of steps of `m`.
fn poisson_mix(m: &TransitionMatrix, mu: f64, dist: &[f64], eps: f64) -> Vec<f64> {
    if mu == 0.0 {
        return dist.to_vec();
    }
    let window = PoissonWindow::new(mu, eps);
    let mut out = vec![0.0; dist.len()];
    let mut cur = dist.to_vec();
    let mut next = vec![0.0; dist.len()];
    for k in 0..=window.hi() {
        if k >= window.lo {
            let p = window.probs[k - window.lo];
            for (o, c) in out.iter_mut().zip(&cur) {
                *o += p * c;
            }
        }
        if k < window.hi() {
            m.apply_left(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
    }
    out
}

#[derive(Debug)]
struct RemainingCache {
    dist: Vec<f64>,
    levels: Vec<f64>,
    frozen: bool,
}

/// `G(mu) = E[leftover inventory]` starting from `W` units after a Poisson(mu)
/// number of orders, computed as `sum_k P[N = k] a_k` with
/// `a_k = e_W^T M^k w`. The sequence `a_k` is extended lazily and cached.
#[derive(Debug)]
pub struct ExpectedRemaining {
    matrix: TransitionMatrix,
    inventory: usize,
    eps: f64,
    cache: Mutex<RemainingCache>,
}

impl Clone for ExpectedRemaining {
    fn clone(&self) -> Self {
        let cache = self.cache.lock().expect("cache lock");
        Self {
            matrix: self.matrix.clone(),
            inventory: self.inventory,
            eps: self.eps,
            cache: Mutex::new(RemainingCache {
                dist: cache.dist.clone(),
                levels: cache.levels.clone(),
                frozen: cache.frozen,
            }),
        }
    }
}

impl ExpectedRemaining {
    pub fn new(matrix: TransitionMatrix) -> Self {
        Self::with_truncation(matrix, TRUNCATION)
    }

    /// Uses Poisson tail mass `eps` instead of the default.
    pub fn with_truncation(matrix: TransitionMatrix, eps: f64) -> Self {
        let inventory = matrix.dim() - 1;
        let mut dist = vec![0.0; inventory + 1];
        dist[inventory] = 1.0;
        Self {
            matrix,
            inventory,
            eps,
            cache: Mutex::new(RemainingCache {
                dist,
                levels: vec![inventory as f64],
                frozen: false,
            }),
        }
    }

    pub fn matrix(&self) -> &TransitionMatrix {
        &self.matrix
    }

    /// `a_0..=a_last` (extended with the limit once the chain stops moving).
    fn levels(&self, last: usize) -> Vec<f64> {
        let mut cache = self.cache.lock().expect("cache lock");
        let mut scratch = vec![0.0; self.inventory + 1];
        while cache.levels.len() <= last && !cache.frozen {
            self.matrix.apply_left(&cache.dist, &mut scratch);
            std::mem::swap(&mut cache.dist, &mut scratch);
            let level = expected_level(&cache.dist);
            cache.levels.push(level);
            let live: f64 = cache
                .dist
                .iter()
                .enumerate()
                .map(|(d, p)| p * self.matrix.fill_probability(d))
                .sum();
            if live * (self.inventory as f64).max(1.0) < 1e-17 {
                cache.frozen = true;
            }
        }
        let mut out: Vec<f64> = cache.levels.iter().take(last + 1).copied().collect();
        let tail = *out.last().expect("levels start non-empty");
        out.resize(last + 1, tail);
        out
    }
}

impl ShortfallCurve for ExpectedRemaining {
    fn inventory(&self) -> u64 {
        self.inventory as u64
    }

    fn eval(&self, mu: f64) -> ShortfallEval {
        let window = PoissonWindow::new(mu, self.eps);
        let a = self.levels(window.hi() + 2);
        let mut value = 0.0;
        let mut derivative = 0.0;
        let mut second = 0.0;
        for (k, p) in window.iter() {
            value += p * a[k];
            derivative += p * (a[k + 1] - a[k]);
            second += p * (a[k + 2] - 2.0 * a[k + 1] + a[k]);
        }
        ShortfallEval {
            value: value.clamp(0.0, self.inventory as f64),
            derivative: derivative.min(0.0),
            second_derivative: second,
        }
    }

    fn slope(&self, mu: f64) -> f64 {
        let window = PoissonWindow::new(mu, self.eps);
        let a = self.levels(window.hi() + 1);
        window
            .iter()
            .map(|(k, p)| p * (a[k + 1] - a[k]))
            .sum::<f64>()
            .min(0.0)
    }
}

/// `G` for a transition matrix, starting from its top state.
pub fn expected_remaining(matrix: &TransitionMatrix) -> ExpectedRemaining {
    ExpectedRemaining::new(matrix.clone())
}

fn shared_curve(inst: &ProblemInstance) -> Result<ExpectedRemaining> {
    let batch = inst.homogeneous_batch().ok_or_else(|| {
        Error::Unsupported(
            "class-specific batch laws need solve_price_dependent".into(),
        )
    })?;
    Ok(expected_remaining(&transition_matrix(batch, inst.inventory())))
}

/// Optimal switch-over policy when all classes share one batch law.
pub fn solve_homogeneous(inst: &ProblemInstance) -> Result<SwitchOverSolution> {
    let curve = shared_curve(inst)?;
    solve_separable(inst.prices(), inst.rates().rates(), inst.horizon(), &curve)
}

/// KKT residuals of a homogeneous-batch solution.
pub fn kkt_check(inst: &ProblemInstance, sol: &SwitchOverSolution) -> Result<KktReport> {
    let curve = shared_curve(inst)?;
    Ok(kkt_check_with(
        inst.prices(),
        inst.rates().rates(),
        inst.horizon(),
        &curve,
        sol,
    ))
}

/// Revenue of fixed switch times under a shared batch law.
pub fn revenue_at_times(inst: &ProblemInstance, times: &[f64]) -> Result<f64> {
    let curve = shared_curve(inst)?;
    switchover::revenue_at_times_with(
        inst.prices(),
        inst.rates().rates(),
        inst.horizon(),
        &curve,
        times,
    )
}

/// Per-class fraction of demanded units supplied, for a shared batch law.
pub fn acceptance_rates(inst: &ProblemInstance, sol: &SwitchOverSolution) -> Result<Vec<f64>> {
    let batch = inst.homogeneous_batch().ok_or_else(|| {
        Error::Unsupported("acceptance rates need a shared batch law".into())
    })?;
    let mean = batch.mean().ok_or_else(|| {
        Error::Unsupported("batch law has mass beyond its support; mean undefined".into())
    })?;
    if mean <= 0.0 {
        return Err(Error::Unsupported("batch law has zero mean".into()));
    }
    let curve = expected_remaining(&transition_matrix(batch, inst.inventory()));
    Ok(switchover::acceptance_rates_with(
        inst.rates().rates(),
        inst.horizon(),
        mean,
        &curve,
        &sol.mu,
    ))
}

/// `Gamma_l = sum_{j<=l} (lambda_j / Lambda_l) M_j` for `l = 1..=m`.
pub fn mixture_matrices(inst: &ProblemInstance) -> Vec<MixtureMatrix> {
    let w = inst.inventory();
    let per_class: Vec<TransitionMatrix> = (0..inst.classes())
        .map(|i| transition_matrix(inst.class_batch(i), w))
        .collect();
    let rates = inst.rates().rates();
    let mut cum = 0.0;
    (0..inst.classes())
        .map(|l| {
            cum += rates[l];
            let weights: Vec<f64> = rates[..=l].iter().map(|r| r / cum).collect();
            let parts: Vec<&TransitionMatrix> = per_class[..=l].iter().collect();
            TransitionMatrix::combine(&weights, &parts).expect("matching sizes")
        })
        .collect()
}

/// How consecutive segments are chained when the classes have different
/// batch laws.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProductForm {
    /// Segment `k` applies `Gamma_k` a Poisson(`Lambda_k y_k`) number of times,
    /// in time order.
    #[default]
    Ordered,
    /// A single Poisson(`mu_l`) mixture of the averaged matrix
    /// `sum_k (Lambda_k y_k / mu_l) Gamma_k`; equals the ordered form only
    /// when the matrices commute.
    ExpOfSum,
}

fn check_segments(y: &[f64], m: usize, horizon: f64) -> Result<()> {
    if y.len() != m {
        return Err(Error::InvalidArgument(format!(
            "{} segment lengths for {m} classes",
            y.len()
        )));
    }
    if y.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidArgument("segment lengths must be >= 0".into()));
    }
    let total: f64 = y.iter().sum();
    if total > horizon * (1.0 + 1e-12) + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "segments total {total} exceeds the horizon {horizon}"
        )));
    }
    Ok(())
}

/// Leftover means `G_l(y)` for `l = 1..=m`.
fn remaining_by_segment(
    gammas: &[MixtureMatrix],
    cum_rates: &[f64],
    y: &[f64],
    form: ProductForm,
    eps: f64,
) -> Vec<f64> {
    let dim = gammas[0].dim();
    let mut start = vec![0.0; dim];
    start[dim - 1] = 1.0;
    match form {
        ProductForm::Ordered => {
            let mut dist = start;
            gammas
                .iter()
                .zip(cum_rates)
                .zip(y)
                .map(|((g, rate), yk)| {
                    dist = poisson_mix(g, rate * yk, &dist, eps);
                    expected_level(&dist)
                })
                .collect()
        }
        ProductForm::ExpOfSum => {
            let mut mu = 0.0;
            (0..gammas.len())
                .map(|l| {
                    mu += cum_rates[l] * y[l];
                    if mu == 0.0 {
                        return (dim - 1) as f64;
                    }
                    let weights: Vec<f64> =
                        (0..=l).map(|k| cum_rates[k] * y[k] / mu).collect();
                    let parts: Vec<&TransitionMatrix> = gammas[..=l].iter().collect();
                    let avg = TransitionMatrix::combine(&weights, &parts).expect("sizes");
                    expected_level(&poisson_mix(&avg, mu, &start, eps))
                })
                .collect()
        }
    }
}

/// Objective `sum_l pi_l G_l(y)` of segment lengths under class-specific batch laws.
pub fn objective_price_dependent(
    inst: &ProblemInstance,
    y: &[f64],
    form: ProductForm,
) -> Result<ObjectiveValue> {
    check_segments(y, inst.classes(), inst.horizon())?;
    let eval = PriceDependentObjective::new(inst, form);
    Ok(eval.value(y))
}

/// Expected revenue of segment lengths `y` with class-specific batch laws,
/// counting each accepted order at its own price.
///
/// The segment objective above credits the units sold while classes `1..=l`
/// are open at the rate-weighted average price, which is exact only when the
/// classes share one batch law. Here every arrival in segment `l` is
/// weighted by `P[N_l > k]` and earns the expected accepted revenue
/// `sum_i (lambda_i / Lambda_l) p_i sum_{j <= d} j P[Q_i = j]` at the
/// current inventory `d`.
pub fn exact_revenue_price_dependent(inst: &ProblemInstance, y: &[f64]) -> Result<f64> {
    let m = inst.classes();
    check_segments(y, m, inst.horizon())?;
    let w = inst.inventory();
    let gammas = mixture_matrices(inst);
    let rates = inst.rates().rates();
    let prices = inst.prices();
    // Expected revenue of one class-i order at inventory d.
    let per_order: Vec<Vec<f64>> = (0..m)
        .map(|i| {
            let batch = inst.class_batch(i);
            let mut acc = 0.0;
            (0..=w)
                .map(|d| {
                    acc += d as f64 * batch.prob(d);
                    prices[i] * acc
                })
                .collect()
        })
        .collect();
    let mut dist = vec![0.0; w + 1];
    dist[w] = 1.0;
    let mut revenue = 0.0;
    let mut cum = 0.0;
    for l in 0..m {
        cum += rates[l];
        let mu = cum * y[l];
        if mu == 0.0 {
            continue;
        }
        let reward: Vec<f64> = (0..=w)
            .map(|d| (0..=l).map(|i| rates[i] / cum * per_order[i][d]).sum())
            .collect();
        let window = PoissonWindow::new(mu, TRUNCATION);
        let mut cur = dist.clone();
        let mut next = vec![0.0; w + 1];
        let mut below = 0.0;
        for k in 0..=window.hi() {
            if k >= window.lo {
                below += window.probs[k - window.lo];
            }
            let tail = (1.0 - below).max(0.0);
            if k >= window.lo && tail <= TRUNCATION * 1e-3 {
                break;
            }
            revenue += tail * cur.iter().zip(&reward).map(|(p, r)| p * r).sum::<f64>();
            gammas[l].apply_left(&cur, &mut next);
            std::mem::swap(&mut cur, &mut next);
        }
        dist = poisson_mix(&gammas[l], mu, &dist, TRUNCATION);
    }
    Ok(revenue)
}

struct PriceDependentObjective {
    gammas: Vec<MixtureMatrix>,
    cum_rates: Vec<f64>,
    pi: Vec<f64>,
    top: f64,
    inventory: f64,
    form: ProductForm,
}

impl PriceDependentObjective {
    fn new(inst: &ProblemInstance, form: ProductForm) -> Self {
        let avg = averaged_from_slices(inst.prices(), inst.rates().rates());
        Self {
            gammas: mixture_matrices(inst),
            cum_rates: inst.rates().cumulative(),
            pi: avg.pi,
            top: avg.p1k[0],
            inventory: inst.inventory() as f64,
            form,
        }
    }

    fn value(&self, y: &[f64]) -> ObjectiveValue {
        let g = remaining_by_segment(&self.gammas, &self.cum_rates, y, self.form, TRUNCATION);
        let objective: f64 = self.pi.iter().zip(&g).map(|(p, g)| p * g).sum();
        ObjectiveValue {
            objective,
            revenue: self.top * self.inventory - objective,
        }
    }

    fn objective(&self, y: &[f64]) -> f64 {
        self.value(y).objective
    }

    /// Central differences, one-sided at the `y >= 0` boundary.
    fn gradient(&self, y: &[f64]) -> Vec<f64> {
        (0..y.len())
            .map(|k| {
                let h = 1e-5 * y[k].max(1.0);
                let mut up = y.to_vec();
                up[k] += h;
                if y[k] >= h {
                    let mut down = y.to_vec();
                    down[k] -= h;
                    (self.objective(&up) - self.objective(&down)) / (2.0 * h)
                } else {
                    (self.objective(&up) - self.objective(y)) / h
                }
            })
            .collect()
    }
}

/// Euclidean projection onto `{y >= 0, sum y <= T}`.
pub fn project_segments(y: &[f64], horizon: f64) -> Vec<f64> {
    let clamped: Vec<f64> = y.iter().map(|v| v.max(0.0)).collect();
    if clamped.iter().sum::<f64>() <= horizon {
        return clamped;
    }
    // Simplex projection: find the shift tau with sum (y - tau)^+ = T.
    let mut sorted = y.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut acc = 0.0;
    let mut tau = 0.0;
    for (i, v) in sorted.iter().enumerate() {
        acc += v;
        let candidate = (acc - horizon) / (i + 1) as f64;
        if *v - candidate > 0.0 {
            tau = candidate;
        }
    }
    y.iter().map(|v| (v - tau).max(0.0)).collect()
}

/// Settings for the price-dependent solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceDependentOptions {
    pub starts: usize,
    pub max_iterations: usize,
    /// Stop when the projected-gradient step moves less than this.
    pub tolerance: f64,
    pub form: ProductForm,
    pub seed: u64,
    /// Extra starting point, e.g. a previous solution.
    pub warm_start: Option<Vec<f64>>,
}

impl Default for PriceDependentOptions {
    fn default() -> Self {
        Self {
            starts: 8,
            max_iterations: 300,
            tolerance: 1e-9,
            form: ProductForm::Ordered,
            seed: 0,
            warm_start: None,
        }
    }
}

/// Result of the price-dependent search.
///
/// `solution.eta` and `solution.nu` are multipliers for `sum y <= T` and
/// `y >= 0` in segment-length units, estimated from the final gradient.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceDependentSolution {
    pub solution: SwitchOverSolution,
    pub converged: bool,
    /// Largest first-order residual at the returned point.
    pub residual: f64,
    pub starts: usize,
}

fn descend(
    f: &PriceDependentObjective,
    start: Vec<f64>,
    horizon: f64,
    opts: &PriceDependentOptions,
) -> (Vec<f64>, f64, bool) {
    let mut y = project_segments(&start, horizon);
    let mut fy = f.objective(&y);
    let mut step = horizon.max(1.0);
    for _ in 0..opts.max_iterations {
        let g = f.gradient(&y);
        let mut accepted = None;
        let mut s = step;
        for _ in 0..60 {
            let trial: Vec<f64> = y.iter().zip(&g).map(|(v, gk)| v - s * gk).collect();
            let trial = project_segments(&trial, horizon);
            let decrease: f64 = g.iter().zip(trial.iter().zip(&y)).map(|(gk, (a, b))| gk * (a - b)).sum();
            let ft = f.objective(&trial);
            if ft <= fy + 1e-4 * decrease {
                accepted = Some((trial, ft));
                break;
            }
            s *= 0.5;
        }
        let Some((next, fnext)) = accepted else {
            return (y, fy, true);
        };
        let moved = next
            .iter()
            .zip(&y)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        y = next;
        fy = fnext;
        step = (s * 2.0).min(horizon.max(1.0) * 1e3);
        if moved < opts.tolerance {
            return (y, fy, true);
        }
    }
    (y, fy, false)
}

/// Multi-start projected gradient descent over segment lengths for
/// class-specific batch laws.
pub fn solve_price_dependent(
    inst: &ProblemInstance,
    opts: &PriceDependentOptions,
) -> Result<PriceDependentSolution> {
    let m = inst.classes();
    let horizon = inst.horizon();
    let f = PriceDependentObjective::new(inst, opts.form);
    if m == 1 {
        let y = vec![horizon];
        let solution = assemble(inst, &f, y, 0.0, vec![0.0]);
        return Ok(PriceDependentSolution {
            solution,
            converged: true,
            residual: 0.0,
            starts: 1,
        });
    }
    let mut starts: Vec<Vec<f64>> = vec![vec![horizon / m as f64; m]];
    if let Some(w) = &opts.warm_start {
        check_segments(w, m, horizon * (1.0 + 1e-9))?;
        starts.push(w.clone());
    }
    if let Ok(pooled) = pooled_warm_start(inst) {
        starts.push(pooled);
    }
    let mut last = vec![0.0; m];
    last[m - 1] = horizon;
    starts.push(last);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    while starts.len() < opts.starts.max(1) {
        let raw: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let total: f64 = raw.iter().sum();
        starts.push(raw.iter().map(|v| v / total * horizon).collect());
    }
    let runs: Vec<(Vec<f64>, f64, bool)> = starts
        .par_iter()
        .map(|s| descend(&f, s.clone(), horizon, opts))
        .collect();
    let (y, _, converged) = runs
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one start");
    let g = f.gradient(&y);
    let interior: Vec<f64> = y
        .iter()
        .zip(&g)
        .filter(|(v, _)| **v > 1e-9)
        .map(|(_, gk)| -gk)
        .collect();
    let eta = (interior.iter().sum::<f64>() / interior.len().max(1) as f64).max(0.0);
    let nu: Vec<f64> = g.iter().map(|gk| (gk + eta).max(0.0)).collect();
    let residual = y
        .iter()
        .zip(&g)
        .map(|(v, gk)| {
            let stat = gk + eta;
            if *v > 1e-9 {
                stat.abs()
            } else {
                (-stat).max(0.0)
            }
        })
        .fold(0.0, f64::max);
    let solution = assemble(inst, &f, y, eta, nu);
    Ok(PriceDependentSolution {
        solution,
        converged,
        residual,
        starts: starts.len(),
    })
}

/// Homogeneous solution for the rate-weighted pooled batch law.
fn pooled_warm_start(inst: &ProblemInstance) -> Result<Vec<f64>> {
    let rates = inst.rates().rates();
    let total = inst.rates().total();
    let weights: Vec<f64> = rates.iter().map(|r| r / total).collect();
    let parts: Vec<&BatchDistribution> = (0..inst.classes()).map(|i| inst.class_batch(i)).collect();
    let pooled = BatchDistribution::mixture(&weights, &parts)?;
    let shared = inst.with_batches(BatchModel::Homogeneous(pooled))?;
    Ok(solve_homogeneous(&shared)?.y)
}

fn assemble(
    inst: &ProblemInstance,
    f: &PriceDependentObjective,
    y: Vec<f64>,
    eta: f64,
    nu: Vec<f64>,
) -> SwitchOverSolution {
    let horizon = inst.horizon();
    let cum = inst.rates().cumulative();
    let mut mu = Vec::with_capacity(y.len());
    let mut t = vec![0.0];
    let mut acc_mu = 0.0;
    let mut acc_t = 0.0;
    for (yk, rate) in y.iter().zip(&cum) {
        acc_mu += rate * yk;
        acc_t += yk;
        mu.push(acc_mu);
        t.push(acc_t.min(horizon));
    }
    let value = f.value(&y);
    let used: f64 = y.iter().sum();
    SwitchOverSolution {
        mu,
        y,
        t,
        eta,
        nu,
        objective_min: value.objective,
        objective_revenue: value.revenue,
        slack: horizon - used,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ArrivalRates, PriceLadder};
    use crate::poisson::shortfall;

    #[test]
    fn unit_matrix_rows() {
        let m = transition_matrix(&BatchDistribution::unit(), 2);
        assert_eq!(
            m.entries(),
            vec![vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]]
        );
    }

    #[test]
    fn oversize_only_gives_identity() {
        let b = BatchDistribution::from_pmf(vec![0.0, 0.0, 0.0, 0.0, 1.0]).unwrap();
        let m = transition_matrix(&b, 3);
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(m.get(r, c), if r == c { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn rows_are_stochastic() {
        let b = BatchDistribution::discretized_exponential(12.0).unwrap();
        let m = transition_matrix(&b, 5);
        for (r, row) in m.entries().iter().enumerate() {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for c in 0..r {
                assert_eq!(row[c], b.prob(r - c));
            }
        }
    }

    #[test]
    fn unit_batch_recovers_poisson_shortfall() {
        let g = expected_remaining(&transition_matrix(&BatchDistribution::unit(), 30));
        for mu in [0.0, 0.5, 5.0, 50.0] {
            let e = g.eval(mu);
            let h = shortfall(30, mu);
            assert!((e.value - h.value).abs() < 1e-10, "mu={mu}");
            assert!((e.derivative - h.derivative).abs() < 1e-10);
            assert!((e.second_derivative - h.second_derivative).abs() < 1e-10);
        }
    }

    #[test]
    fn mixture_of_identical_matrices() {
        let b = BatchDistribution::negative_binomial(4.0, 0.33).unwrap();
        let inst = ProblemInstance::new(
            PriceLadder::new(vec![1.0, 0.8, 0.6]).unwrap(),
            ArrivalRates::new(vec![0.2, 0.3, 0.5]).unwrap(),
            BatchModel::PriceDependent(vec![b.clone(), b.clone(), b.clone()]),
            10,
            5.0,
        )
        .unwrap();
        let gammas = mixture_matrices(&inst);
        let m1 = transition_matrix(&b, 10);
        for g in &gammas {
            for r in 0..11 {
                for c in 0..11 {
                    assert!((g.get(r, c) - m1.get(r, c)).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn simplex_projection() {
        let p = project_segments(&[3.0, -1.0, 2.0], 10.0);
        assert_eq!(p, vec![3.0, 0.0, 2.0]);
        let p = project_segments(&[6.0, 6.0, 0.0], 10.0);
        assert!((p[0] - 5.0).abs() < 1e-12 && (p[1] - 5.0).abs() < 1e-12 && p[2] == 0.0);
        let p = project_segments(&[20.0, 1.0], 10.0);
        assert_eq!(p, vec![10.0, 0.0]);
    }

    #[test]
    fn single_class_takes_whole_horizon() {
        let inst = ProblemInstance::new(
            PriceLadder::new(vec![1.0]).unwrap(),
            ArrivalRates::new(vec![0.5]).unwrap(),
            BatchModel::PriceDependent(vec![BatchDistribution::negative_binomial(2.0, 0.5).unwrap()]),
            6,
            4.0,
        )
        .unwrap();
        let sol = solve_price_dependent(&inst, &PriceDependentOptions::default()).unwrap();
        assert_eq!(sol.solution.y, vec![4.0]);
    }
}
