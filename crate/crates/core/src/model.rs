//! Problem-definition types shared by the solvers and the simulator.
//!
//! A [`ProblemInstance`] is the continuous-time model: `m` price classes with
//! independent Poisson order streams, a batch-size law per class, `W` units
//! of inventory and a horizon `T`. A [`DiscretizedInstance`] is the
//! period-by-period model consumed by the dynamic program, with at most one
//! order per period.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mass tolerance used when checking that probability vectors sum to one.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Sentinel batch size for an order that exceeds any inventory level.
pub const OVERSIZE: usize = usize::MAX;

/// Per-unit prices `p_1 >= p_2 >= ... >= p_m > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PriceLadder {
    prices: Vec<f64>,
}

impl PriceLadder {
    pub fn new(prices: Vec<f64>) -> Result<Self> {
        if prices.is_empty() {
            return Err(Error::InvalidInstance("price ladder is empty".into()));
        }
        if let Some((i, p)) = prices
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p > 0.0))
        {
            return Err(Error::InvalidInstance(format!(
                "price {} = {p} is not a positive number",
                i + 1
            )));
        }
        if let Some(i) = prices.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidInstance(format!(
                "ladder not non-increasing at class {}: {} < {}",
                i + 2,
                prices[i],
                prices[i + 1]
            )));
        }
        Ok(Self { prices })
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn top(&self) -> f64 {
        self.prices[0]
    }
}

impl TryFrom<Vec<f64>> for PriceLadder {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PriceLadder> for Vec<f64> {
    fn from(l: PriceLadder) -> Self {
        l.prices
    }
}

/// Poisson order rates `lambda_i > 0`, one per price class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ArrivalRates {
    rates: Vec<f64>,
}

impl ArrivalRates {
    pub fn new(rates: Vec<f64>) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::InvalidInstance("rate vector is empty".into()));
        }
        if let Some((i, r)) = rates
            .iter()
            .enumerate()
            .find(|(_, r)| !(r.is_finite() && **r > 0.0))
        {
            return Err(Error::InvalidInstance(format!(
                "rate {} = {r} is not a positive number",
                i + 1
            )));
        }
        Ok(Self { rates })
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    /// Cumulative rates `Lambda_l = lambda_1 + ... + lambda_l`.
    pub fn cumulative(&self) -> Vec<f64> {
        self.rates
            .iter()
            .scan(0.0, |acc, r| {
                *acc += r;
                Some(*acc)
            })
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.rates.iter().sum()
    }
}

impl TryFrom<Vec<f64>> for ArrivalRates {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ArrivalRates> for Vec<f64> {
    fn from(r: ArrivalRates) -> Self {
        r.rates
    }
}

/// Batch-size law over sizes `0, 1, 2, ...` with an explicit overflow bucket.
///
/// The overflow bucket holds mass for sizes beyond the stored support; such an
/// order exceeds any inventory level and is always rejected in full.
#[derive(Debug, Clone, PartialEq)]
pub struct BatchDistribution {
    pmf: Vec<f64>,
    overflow: f64,
    cdf: Vec<f64>,
}

impl BatchDistribution {
    fn build(pmf: Vec<f64>, overflow: f64) -> Self {
        let cdf = pmf
            .iter()
            .scan(0.0, |acc, q| {
                *acc += q;
                Some(*acc)
            })
            .collect();
        Self { pmf, overflow, cdf }
    }

    /// Every order asks for exactly one unit.
    pub fn unit() -> Self {
        Self::build(vec![0.0, 1.0], 0.0)
    }

    /// Explicit pmf indexed by batch size; missing mass goes to overflow.
    pub fn from_pmf(pmf: Vec<f64>) -> Result<Self> {
        if let Some((j, q)) = pmf
            .iter()
            .enumerate()
            .find(|(_, q)| !(q.is_finite() && **q >= 0.0))
        {
            return Err(Error::InvalidInstance(format!(
                "batch pmf entry {j} = {q} is not a probability"
            )));
        }
        let total: f64 = pmf.iter().sum();
        if total > 1.0 + MASS_TOLERANCE {
            return Err(Error::InvalidInstance(format!(
                "batch pmf sums to {total} > 1"
            )));
        }
        Ok(Self::build(pmf, (1.0 - total).max(0.0)))
    }

    /// `P[Q = k] = C(k+r-1, r-1) p^r (1-p)^k` for `k = 0, 1, ...`.
    pub fn negative_binomial(r: f64, p: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0 && p > 0.0 && p <= 1.0) {
            return Err(Error::InvalidInstance(format!(
                "negative binomial needs r > 0 and 0 < p <= 1, got ({r}, {p})"
            )));
        }
        let mean = r * (1.0 - p) / p;
        let mut pmf = Vec::new();
        let mut term = p.powf(r);
        let mut k = 0usize;
        loop {
            pmf.push(term);
            term *= (k as f64 + r) / (k as f64 + 1.0) * (1.0 - p);
            k += 1;
            if (k as f64 > mean && term < 1e-20) || k >= 1_000_000 {
                break;
            }
        }
        Self::from_tail_truncated(pmf)
    }

    /// Discretized exponential: `P[Q = n] = e^{-g n} - e^{-g (n+1)}`, `g = 1/mean`,
    /// where `mean` is the mean of the underlying continuous exponential.
    pub fn discretized_exponential(mean: f64) -> Result<Self> {
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "discretized exponential needs mean > 0, got {mean}"
            )));
        }
        let g = 1.0 / mean;
        let head = -(-g).exp_m1();
        let mut pmf = Vec::new();
        let mut n = 0usize;
        loop {
            let surv = (-g * n as f64).exp();
            pmf.push(surv * head);
            n += 1;
            if surv < 1e-20 || n >= 1_000_000 {
                break;
            }
        }
        Self::from_tail_truncated(pmf)
    }

    fn from_tail_truncated(pmf: Vec<f64>) -> Result<Self> {
        let total: f64 = pmf.iter().sum();
        if total > 1.0 + MASS_TOLERANCE {
            return Err(Error::InvalidInstance(format!(
                "batch pmf sums to {total} > 1"
            )));
        }
        Ok(Self::build(pmf, (1.0 - total).max(0.0)))
    }

    /// Rate-weighted mixture `sum_i w_i q^(i)`; weights must sum to one.
    pub fn mixture(weights: &[f64], parts: &[&BatchDistribution]) -> Result<Self> {
        if weights.len() != parts.len() || parts.is_empty() {
            return Err(Error::InvalidArgument(
                "mixture needs one weight per component".into(),
            ));
        }
        let wsum: f64 = weights.iter().sum();
        if (wsum - 1.0).abs() > 1e-9 || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "mixture weights must be a probability vector, sum = {wsum}"
            )));
        }
        let len = parts.iter().map(|p| p.pmf.len()).max().unwrap_or(0);
        let mut pmf = vec![0.0; len];
        let mut overflow = 0.0;
        for (w, part) in weights.iter().zip(parts) {
            for (j, q) in part.pmf.iter().enumerate() {
                pmf[j] += w * q;
            }
            overflow += w * part.overflow;
        }
        Ok(Self::build(pmf, overflow))
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    /// `P[Q = j]`.
    pub fn prob(&self, j: usize) -> f64 {
        self.pmf.get(j).copied().unwrap_or(0.0)
    }

    pub fn overflow(&self) -> f64 {
        self.overflow
    }

    /// `P[Q > d]`, overflow included.
    pub fn mass_above(&self, d: usize) -> f64 {
        let tail: f64 = self.pmf.iter().skip(d + 1).sum();
        tail + self.overflow
    }

    /// Mean batch size, undefined when the overflow bucket carries mass.
    pub fn mean(&self) -> Option<f64> {
        if self.overflow > MASS_TOLERANCE {
            return None;
        }
        Some(
            self.pmf
                .iter()
                .enumerate()
                .map(|(j, q)| j as f64 * q)
                .sum(),
        )
    }

    pub fn is_unit(&self) -> bool {
        self.prob(1) >= 1.0 - MASS_TOLERANCE
    }

    /// Inversion sampling from a uniform `u` in `[0, 1)`; overflow maps to [`OVERSIZE`].
    pub fn sample(&self, u: f64) -> usize {
        let idx = self.cdf.partition_point(|c| *c <= u);
        if idx < self.pmf.len() {
            idx
        } else {
            OVERSIZE
        }
    }
}

/// Batch laws of an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum BatchModel {
    /// One law shared by all price classes.
    Homogeneous(BatchDistribution),
    /// One law per price class.
    PriceDependent(Vec<BatchDistribution>),
}

/// The continuous-time stochastic knapsack.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    ladder: PriceLadder,
    rates: ArrivalRates,
    batches: BatchModel,
    inventory: usize,
    horizon: f64,
}

impl ProblemInstance {
    pub fn new(
        ladder: PriceLadder,
        rates: ArrivalRates,
        batches: BatchModel,
        inventory: usize,
        horizon: f64,
    ) -> Result<Self> {
        if ladder.len() != rates.len() {
            return Err(Error::InvalidInstance(format!(
                "{} prices but {} rates",
                ladder.len(),
                rates.len()
            )));
        }
        if let BatchModel::PriceDependent(list) = &batches {
            if list.len() != ladder.len() {
                return Err(Error::InvalidInstance(format!(
                    "{} per-class batch laws for {} classes",
                    list.len(),
                    ladder.len()
                )));
            }
        }
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::InvalidInstance(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        Ok(Self {
            ladder,
            rates,
            batches,
            inventory,
            horizon,
        })
    }

    /// Unit-batch instance from plain vectors.
    pub fn unit(prices: Vec<f64>, rates: Vec<f64>, inventory: usize, horizon: f64) -> Result<Self> {
        Self::new(
            PriceLadder::new(prices)?,
            ArrivalRates::new(rates)?,
            BatchModel::Homogeneous(BatchDistribution::unit()),
            inventory,
            horizon,
        )
    }

    pub fn ladder(&self) -> &PriceLadder {
        &self.ladder
    }

    pub fn prices(&self) -> &[f64] {
        self.ladder.prices()
    }

    pub fn rates(&self) -> &ArrivalRates {
        &self.rates
    }

    pub fn batches(&self) -> &BatchModel {
        &self.batches
    }

    pub fn inventory(&self) -> usize {
        self.inventory
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn classes(&self) -> usize {
        self.ladder.len()
    }

    pub fn class_batch(&self, class: usize) -> &BatchDistribution {
        match &self.batches {
            BatchModel::Homogeneous(b) => b,
            BatchModel::PriceDependent(list) => &list[class],
        }
    }

    /// The shared batch law, if all classes have the same one.
    pub fn homogeneous_batch(&self) -> Option<&BatchDistribution> {
        match &self.batches {
            BatchModel::Homogeneous(b) => Some(b),
            BatchModel::PriceDependent(list) => {
                let first = &list[0];
                list.iter().all(|b| b == first).then_some(first)
            }
        }
    }

    pub fn is_unit_batch(&self) -> bool {
        (0..self.classes()).all(|i| self.class_batch(i).is_unit())
    }

    pub fn with_inventory(&self, inventory: usize) -> Self {
        Self {
            inventory,
            ..self.clone()
        }
    }

    pub fn with_horizon(&self, horizon: f64) -> Result<Self> {
        Self::new(
            self.ladder.clone(),
            self.rates.clone(),
            self.batches.clone(),
            self.inventory,
            horizon,
        )
    }

    pub fn with_batches(&self, batches: BatchModel) -> Result<Self> {
        Self::new(
            self.ladder.clone(),
            self.rates.clone(),
            batches,
            self.inventory,
            self.horizon,
        )
    }
}

/// Period-by-period model: `theta[i][j] = P[class i, size j]` for `j = 0..=W`,
/// with oversize mass per class kept separately.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscretizedInstance {
    prices: Vec<f64>,
    theta: Vec<Vec<f64>>,
    overflow: Vec<f64>,
    theta0: f64,
    periods: usize,
    inventory: usize,
    delta: f64,
}

impl DiscretizedInstance {
    /// Builds a discrete instance directly from joint probabilities.
    ///
    /// `theta[i]` is indexed by batch size `0..=W`; the no-arrival probability
    /// is whatever mass remains.
    pub fn from_theta(prices: Vec<f64>, theta: Vec<Vec<f64>>, periods: usize) -> Result<Self> {
        let ladder = PriceLadder::new(prices)?;
        if theta.len() != ladder.len() {
            return Err(Error::InvalidInstance(format!(
                "{} theta rows for {} classes",
                theta.len(),
                ladder.len()
            )));
        }
        let width = theta[0].len();
        if width == 0 || theta.iter().any(|row| row.len() != width) {
            return Err(Error::InvalidInstance(
                "theta rows must share the length W + 1".into(),
            ));
        }
        if theta.iter().flatten().any(|t| !(t.is_finite() && *t >= 0.0)) {
            return Err(Error::InvalidInstance("theta entries must be >= 0".into()));
        }
        let total: f64 = theta.iter().flatten().sum();
        if total > 1.0 + MASS_TOLERANCE {
            return Err(Error::InvalidInstance(format!(
                "arrival probabilities sum to {total} > 1"
            )));
        }
        if periods == 0 {
            return Err(Error::InvalidInstance("need at least one period".into()));
        }
        let m = theta.len();
        Ok(Self {
            prices: ladder.prices,
            theta,
            overflow: vec![0.0; m],
            theta0: (1.0 - total).max(0.0),
            periods,
            inventory: width - 1,
            delta: 1.0,
        })
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn classes(&self) -> usize {
        self.prices.len()
    }

    pub fn periods(&self) -> usize {
        self.periods
    }

    pub fn inventory(&self) -> usize {
        self.inventory
    }

    /// Period length in continuous time.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// `theta_ij` for `j <= W`.
    pub fn theta(&self, class: usize, size: usize) -> f64 {
        self.theta[class].get(size).copied().unwrap_or(0.0)
    }

    pub fn theta_row(&self, class: usize) -> &[f64] {
        &self.theta[class]
    }

    /// Mass of class-`i` orders larger than `W`.
    pub fn overflow(&self, class: usize) -> f64 {
        self.overflow[class]
    }

    /// Total probability that a class-`i` order arrives in a period.
    pub fn class_mass(&self, class: usize) -> f64 {
        self.theta[class].iter().sum::<f64>() + self.overflow[class]
    }

    pub fn is_unit_batch(&self) -> bool {
        if self.inventory == 0 {
            return true;
        }
        (0..self.classes()).all(|i| {
            let off: f64 = self.theta[i]
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != 1)
                .map(|(_, t)| t)
                .sum::<f64>()
                + self.overflow[i];
            off <= 1e-15
        })
    }
}

/// Largest step with `delta * sum(lambda) <= 0.2` that divides the horizon.
pub fn default_delta(instance: &ProblemInstance) -> f64 {
    delta_for_load(instance, 0.2)
}

/// Largest step with `delta * sum(lambda) <= load` that divides the horizon.
pub fn delta_for_load(instance: &ProblemInstance, load: f64) -> f64 {
    let t = instance.horizon();
    let n = (t * instance.rates().total() / load - 1e-9).ceil().max(1.0);
    t / n
}

/// Discretizes the Poisson model into periods of length `delta`, at most one
/// order per period: `theta_ij = lambda_i * delta * P[Q_i = j]`.
pub fn discretize(instance: &ProblemInstance, delta: f64) -> Result<DiscretizedInstance> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(Error::Discretization(format!(
            "step must be positive, got {delta}"
        )));
    }
    let load = delta * instance.rates().total();
    if load > 1.0 + MASS_TOLERANCE {
        return Err(Error::Discretization(format!(
            "delta * sum(lambda) = {load} > 1 leaves negative no-arrival probability"
        )));
    }
    let ratio = instance.horizon() / delta;
    let periods = ratio.round();
    if (ratio - periods).abs() > 1e-9 || periods < 1.0 {
        return Err(Error::Discretization(format!(
            "T / delta = {ratio} is not a positive integer"
        )));
    }
    let w = instance.inventory();
    let mut theta = Vec::with_capacity(instance.classes());
    let mut overflow = Vec::with_capacity(instance.classes());
    for (i, rate) in instance.rates().rates().iter().enumerate() {
        let batch = instance.class_batch(i);
        let scale = rate * delta;
        theta.push((0..=w).map(|j| scale * batch.prob(j)).collect());
        overflow.push(scale * batch.mass_above(w));
    }
    Ok(DiscretizedInstance {
        prices: instance.prices().to_vec(),
        theta,
        overflow,
        theta0: (1.0 - load).max(0.0),
        periods: periods as usize,
        inventory: w,
        delta,
    })
}
