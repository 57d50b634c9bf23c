//! Poisson kernels: pmf, cdf, the expected-shortfall function
//! `H(mu) = E[W - N(mu)]^+` with its derivatives, and a seeded sampler.

use std::f64::consts::PI;
use std::sync::OnceLock;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Above this mean the pmf is evaluated in log space.
const LOG_SPACE_MEAN: f64 = 700.0;

const LN_FACT_TABLE: usize = 1024;

fn ln_fact_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(LN_FACT_TABLE);
        let mut acc = 0.0f64;
        t.push(0.0);
        for k in 1..LN_FACT_TABLE {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`: exact table for small `n`, Stirling series beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < LN_FACT_TABLE {
        return ln_fact_table()[n as usize];
    }
    let x = n as f64 + 1.0;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    (x - 0.5) * x.ln() - x
        + 0.5 * (2.0 * PI).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// `P[N(mu) = k]`.
pub fn pmf(k: u64, mu: f64) -> f64 {
    if mu == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (k as f64 * mu.ln() - mu - ln_factorial(k)).exp()
}

/// `F_n(mu) = P[N(mu) <= n]`.
pub fn cdf(n: u64, mu: f64) -> f64 {
    debug_assert!(mu >= 0.0);
    if mu == 0.0 {
        return 1.0;
    }
    if mu <= LOG_SPACE_MEAN {
        let mut term = (-mu).exp();
        let mut sum = term;
        for k in 1..=n {
            term *= mu / k as f64;
            sum += term;
            if k as f64 > mu && term < 1e-18 * sum {
                break;
            }
        }
        return sum.min(1.0);
    }
    if n as f64 >= mu {
        // Upper tail above n; terms shrink geometrically from the start.
        let mut k = n + 1;
        let mut term = pmf(k, mu);
        let mut tail = term;
        while term > 0.0 && term >= 1e-18 * tail {
            term *= mu / (k + 1) as f64;
            k += 1;
            tail += term;
        }
        return (1.0 - tail).clamp(0.0, 1.0);
    }
    // Below the mode the terms decay geometrically going down from n.
    let mut k = n;
    let mut term = pmf(k, mu);
    let mut sum = term;
    while k > 0 && term > 0.0 && term >= 1e-18 * sum {
        term *= k as f64 / mu;
        k -= 1;
        sum += term;
    }
    sum.min(1.0)
}

/// Checked variant of [`cdf`] that rejects negative or non-finite inputs.
pub fn poisson_cdf(n: i64, mu: f64) -> Result<f64> {
    ensure(n >= 0, || format!("cdf index must be >= 0, got {n}"))?;
    ensure(mu.is_finite() && mu >= 0.0, || {
        format!("Poisson mean must be >= 0, got {mu}")
    })?;
    Ok(cdf(n as u64, mu))
}

/// Window `[lo, lo + len)` of Poisson(mu) support holding all but `eps` of the
/// mass, with the pmf values over it.
#[derive(Debug, Clone)]
pub struct PoissonWindow {
    pub lo: usize,
    pub probs: Vec<f64>,
}

impl PoissonWindow {
    pub fn new(mu: f64, eps: f64) -> Self {
        if mu == 0.0 {
            return Self {
                lo: 0,
                probs: vec![1.0],
            };
        }
        let mode = mu.floor() as u64;
        let peak = pmf(mode, mu);
        let mut upper = Vec::new();
        let mut k = mode;
        let mut term = peak;
        loop {
            let ratio = mu / (k as f64 + 1.0);
            if ratio < 1.0 && term * ratio / (1.0 - ratio) <= eps / 2.0 {
                break;
            }
            term *= ratio;
            k += 1;
            upper.push(term);
        }
        let mut lower = Vec::new();
        let mut k = mode;
        let mut term = peak;
        while k > 0 {
            let ratio = k as f64 / mu;
            if ratio < 1.0 && term * ratio / (1.0 - ratio) <= eps / 2.0 {
                break;
            }
            term *= ratio;
            k -= 1;
            lower.push(term);
        }
        let lo = k as usize;
        let mut probs: Vec<f64> = lower.into_iter().rev().collect();
        probs.push(peak);
        probs.extend(upper);
        Self { lo, probs }
    }

    /// `(k, P[N = k])` pairs across the window.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.probs.iter().enumerate().map(|(i, p)| (self.lo + i, *p))
    }

    pub fn hi(&self) -> usize {
        self.lo + self.probs.len() - 1
    }
}

/// `H`, `H'` and `H''` at one mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShortfallEval {
    pub value: f64,
    pub derivative: f64,
    pub second_derivative: f64,
}

/// `H(mu) = W F_W(mu) - mu F_{W-1}(mu)` with `H' = -F_{W-1}` and `H'' = f_{W-1}`.
pub fn shortfall(inventory: u64, mu: f64) -> ShortfallEval {
    debug_assert!(mu >= 0.0);
    if inventory == 0 {
        return ShortfallEval {
            value: 0.0,
            derivative: 0.0,
            second_derivative: 0.0,
        };
    }
    let w = inventory as f64;
    let f_prev = cdf(inventory - 1, mu);
    let f_w = (f_prev + pmf(inventory, mu)).min(1.0);
    let value = (w * f_w - mu * f_prev).clamp(0.0, w);
    ShortfallEval {
        value,
        derivative: -f_prev,
        second_derivative: pmf(inventory - 1, mu),
    }
}

/// Ratio of `E[a - N(a)]^+` to its large-`a` approximation `sqrt(a / 2 pi)`.
pub fn shortfall_asymptotic_ratio(a: u64) -> Result<f64> {
    ensure(a > 0, || "asymptotic ratio needs a > 0".into())?;
    let a_f = a as f64;
    Ok(shortfall(a, a_f).value / (a_f / (2.0 * PI)).sqrt())
}

/// A decreasing convex function of the cumulative arrival mean, such as the
/// expected leftover inventory. The switch-over solvers only need this view.
pub trait ShortfallCurve {
    /// Starting inventory, i.e. the value at zero.
    fn inventory(&self) -> u64;
    fn eval(&self, mu: f64) -> ShortfallEval;

    fn value(&self, mu: f64) -> f64 {
        self.eval(mu).value
    }

    fn slope(&self, mu: f64) -> f64 {
        self.eval(mu).derivative
    }
}

/// The unit-batch curve `H` for a fixed inventory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PoissonShortfall {
    pub inventory: u64,
}

impl ShortfallCurve for PoissonShortfall {
    fn inventory(&self) -> u64 {
        self.inventory
    }

    fn eval(&self, mu: f64) -> ShortfallEval {
        shortfall(self.inventory, mu)
    }

    fn slope(&self, mu: f64) -> f64 {
        if self.inventory == 0 {
            0.0
        } else {
            -cdf(self.inventory - 1, mu)
        }
    }
}

/// Draws a Poisson(mu) count: sequential inversion for `mu <= 10`, PTRS
/// transformed rejection above.
pub fn sample_poisson<R: Rng + ?Sized>(mu: f64, rng: &mut R) -> u64 {
    if mu <= 0.0 {
        return 0;
    }
    if mu <= 10.0 {
        let u: f64 = rng.random();
        let mut k = 0u64;
        let mut p = (-mu).exp();
        let mut s = p;
        while u > s && k < 1000 {
            k += 1;
            p *= mu / k as f64;
            s += p;
        }
        return k;
    }
    let slam = mu.sqrt();
    let loglam = mu.ln();
    let b = 0.931 + 2.53 * slam;
    let a = -0.059 + 0.02483 * b;
    let invalpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mu + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + invalpha.ln() - (a / (us * us) + b).ln();
        let rhs = -mu + k * loglam - ln_factorial(k as u64);
        if lhs <= rhs {
            return k as u64;
        }
    }
}
