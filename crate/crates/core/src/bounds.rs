//! Analytic revenue bounds for unit-size orders: a perfect-information upper
//! bound on any admission policy and a lower bound on the best switch-over
//! policy, plus a scaling study of the gap between them.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ProblemInstance;
use crate::poisson::shortfall;
use crate::switchover::{averaged_prices, solve_unit};

/// Relative slack when comparing cumulative demand with inventory, so that
/// `Lambda_k T == W` up to rounding counts as "demand fits".
const FIT_TOLERANCE: f64 = 1e-9;

/// Inventory relative to expected demand over the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Even the top class alone expects more orders than there are units.
    Scarce,
    /// The top `k` classes fit but the top `k + 1` do not.
    Balanced,
    /// All expected demand fits.
    Abundant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundPair {
    pub upper: f64,
    pub lower: f64,
    /// Number of classes whose whole expected demand fits (0 when scarce).
    pub k: usize,
    /// Time the marginal class `k + 1` would need to use up the remainder.
    pub t: f64,
    pub regime: Regime,
}

struct Split {
    regime: Regime,
    k: usize,
    t: f64,
}

fn split(inst: &ProblemInstance) -> Split {
    let w = inst.inventory() as f64;
    let horizon = inst.horizon();
    let rates = inst.rates().rates();
    let cum = inst.rates().cumulative();
    let fits = |l: usize| cum[l] * horizon <= w * (1.0 + FIT_TOLERANCE) + FIT_TOLERANCE;
    let m = rates.len();
    if !fits(0) {
        return Split {
            regime: Regime::Scarce,
            k: 0,
            t: w / rates[0],
        };
    }
    if fits(m - 1) {
        return Split {
            regime: Regime::Abundant,
            k: m,
            t: horizon,
        };
    }
    let k = (0..m).take_while(|l| fits(*l)).count();
    let t = ((w - cum[k - 1] * horizon) / rates[k]).clamp(0.0, horizon);
    Split {
        regime: Regime::Balanced,
        k,
        t,
    }
}

fn require_unit(inst: &ProblemInstance) -> Result<()> {
    if inst.is_unit_batch() {
        Ok(())
    } else {
        Err(Error::Unsupported(
            "revenue bounds are derived for unit-size orders only".into(),
        ))
    }
}

/// Perfect-information bound: no policy earns more in expectation.
pub fn upper_bound(inst: &ProblemInstance) -> Result<BoundPair> {
    require_unit(inst)?;
    let s = split(inst);
    let prices = inst.prices();
    let rates = inst.rates().rates();
    let w = inst.inventory() as f64;
    let horizon = inst.horizon();
    let upper = match s.regime {
        Regime::Scarce => prices[0] * w,
        Regime::Abundant => prices.iter().zip(rates).map(|(p, l)| p * l).sum::<f64>() * horizon,
        Regime::Balanced => {
            let full: f64 = prices[..s.k].iter().zip(rates).map(|(p, l)| p * l).sum();
            full * horizon + rates[s.k] * prices[s.k] * s.t
        }
    };
    let lower = lower_value(inst, &s);
    Ok(BoundPair {
        upper,
        lower,
        k: s.k,
        t: s.t,
        regime: s.regime,
    })
}

fn lower_value(inst: &ProblemInstance, s: &Split) -> f64 {
    let avg = averaged_prices(inst.ladder(), inst.rates());
    let w = inst.inventory() as u64;
    let wf = w as f64;
    let horizon = inst.horizon();
    let cum = inst.rates().cumulative();
    let rates = inst.rates().rates();
    let m = rates.len();
    match s.regime {
        Regime::Scarce => avg.p1k[0] * (wf - shortfall(w, wf).value),
        Regime::Abundant => avg.p1k[m - 1] * (wf - shortfall(w, cum[m - 1] * horizon).value),
        Regime::Balanced => {
            let k = s.k;
            let (top, next) = (avg.p1k[k - 1], avg.p1k[k]);
            let early = cum[k - 1] * (horizon - s.t);
            let all = cum[k - 1] * horizon + rates[k] * s.t;
            top * wf - (top - next) * shortfall(w, early).value - next * shortfall(w, all).value
        }
    }
}

/// Revenue guaranteed by a simple switch-over policy: the top `k` classes
/// throughout and class `k + 1` during the last `t` time units.
pub fn lower_bound(inst: &ProblemInstance) -> Result<f64> {
    require_unit(inst)?;
    Ok(lower_value(inst, &split(inst)))
}

/// Both bounds for one instance.
pub fn bounds(inst: &ProblemInstance) -> Result<BoundPair> {
    upper_bound(inst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub inventory: usize,
    pub horizon: f64,
    pub upper: f64,
    pub lower: f64,
    /// Revenue of the optimized switch-over policy.
    pub switch: f64,
    /// `(upper - switch) / upper`.
    pub rel_gap: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapStudy {
    pub rows: Vec<GapRow>,
    /// Least-squares slope of `ln(upper - switch)` against `ln W`.
    pub absolute_slope: Option<f64>,
    /// Least-squares slope of `ln rel_gap` against `ln W`.
    pub relative_slope: Option<f64>,
}

/// Least-squares slope of `y` on `x`, `None` with fewer than two points.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Bounds and optimized switch-over revenue across `(W, T)` pairs of one
/// price/rate family; slopes use the rows with a positive gap.
pub fn gap_study(base: &ProblemInstance, pairs: &[(usize, f64)]) -> Result<GapStudy> {
    require_unit(base)?;
    let rows: Vec<GapRow> = pairs
        .par_iter()
        .map(|(w, t)| {
            let inst = base.with_inventory(*w).with_horizon(*t)?;
            let b = upper_bound(&inst)?;
            let switch = solve_unit(&inst)?.objective_revenue;
            Ok(GapRow {
                inventory: *w,
                horizon: *t,
                upper: b.upper,
                lower: b.lower,
                switch,
                rel_gap: if b.upper > 0.0 { (b.upper - switch) / b.upper } else { 0.0 },
                regime: b.regime,
            })
        })
        .collect::<Result<_>>()?;
    let usable: Vec<&GapRow> = rows
        .iter()
        .filter(|r| r.inventory > 0 && r.upper - r.switch > 0.0)
        .collect();
    let absolute: Vec<(f64, f64)> = usable
        .iter()
        .map(|r| ((r.inventory as f64).ln(), (r.upper - r.switch).ln()))
        .collect();
    let relative: Vec<(f64, f64)> = usable
        .iter()
        .map(|r| ((r.inventory as f64).ln(), r.rel_gap.ln()))
        .collect();
    Ok(GapStudy {
        absolute_slope: fit_slope(&absolute),
        relative_slope: fit_slope(&relative),
        rows,
    })
}
