//! Revenue bounds against the DP, the simulator and the scaling study.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stochastic_knapsack::bounds::{bounds, gap_study, lower_bound, upper_bound, Regime};
use stochastic_knapsack::dp::solve_dp;
use stochastic_knapsack::model::{delta_for_load, discretize, BatchDistribution, BatchModel, ProblemInstance};
use stochastic_knapsack::sim::{simulate, Policy};
use stochastic_knapsack::switchover::solve_unit;

fn example(w: usize, t: f64) -> ProblemInstance {
    ProblemInstance::unit(vec![1.0, 0.8, 0.65, 0.45], vec![0.2, 0.3, 0.1, 0.4], w, t).unwrap()
}

fn random_instance(rng: &mut ChaCha8Rng) -> ProblemInstance {
    let m = rng.random_range(1..=4);
    let mut prices: Vec<f64> = (0..m).map(|_| rng.random_range(0.1..1.0)).collect();
    prices.sort_by(|a, b| b.total_cmp(a));
    let rates: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
    let w = rng.random_range(1..=25);
    let t = rng.random_range(2.0..20.0);
    ProblemInstance::unit(prices, rates, w, t).unwrap()
}

#[test]
fn dp_optimum_lies_between_the_bounds() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let inst = random_instance(&mut rng);
        let b = bounds(&inst).unwrap();
        let dp = solve_dp(&discretize(&inst, delta_for_load(&inst, 0.05)).unwrap()).optimal_value();
        // Discretization error of the fine clock.
        let slack = 5e-3 * b.upper.max(1.0);
        assert!(b.lower <= dp + slack, "{inst:?}: lower {} > dp {dp}", b.lower);
        assert!(dp <= b.upper + slack, "{inst:?}: dp {dp} > upper {}", b.upper);
        worst = worst.max(b.lower - dp).max(dp - b.upper);
    }
    assert!(worst <= 0.05);
}

#[test]
fn simulated_switch_over_lies_between_the_bounds() {
    for w in [3, 9, 12, 15, 25] {
        let inst = example(w, 20.0);
        let b = bounds(&inst).unwrap();
        let sol = solve_unit(&inst).unwrap();
        let est = simulate(&inst, &Policy::SwitchOver(sol.switch_times().to_vec()), 20_000, 3).unwrap();
        assert!(b.lower <= est.mean + est.half_width, "W={w}");
        assert!(est.mean - est.half_width <= b.upper, "W={w}");
    }
}

#[test]
fn regimes_follow_inventory() {
    assert_eq!(upper_bound(&example(2, 20.0)).unwrap().regime, Regime::Scarce);
    assert_eq!(upper_bound(&example(15, 20.0)).unwrap().regime, Regime::Balanced);
    assert_eq!(upper_bound(&example(30, 20.0)).unwrap().regime, Regime::Abundant);
}

#[test]
fn lower_bound_converges_to_full_demand_revenue() {
    let values: Vec<f64> = [25, 40, 80, 200, 1000]
        .iter()
        .map(|w| lower_bound(&example(*w, 20.0)).unwrap())
        .collect();
    for w in values.windows(2) {
        assert!(w[1] >= w[0] - 1e-12);
    }
    assert!((values[4] - 13.7).abs() < 1e-9);
}

#[test]
fn gap_grows_like_square_root_and_shrinks_relatively() {
    let base = example(15, 20.0);
    let pairs: Vec<(usize, f64)> =
        [25usize, 50, 100, 200, 400].iter().map(|w| (*w, *w as f64 * 4.0 / 3.0)).collect();
    let study = gap_study(&base, &pairs).unwrap();
    let slope = study.absolute_slope.unwrap();
    assert!((0.35..=0.65).contains(&slope), "slope {slope}");
    for w in study.rows.windows(2) {
        assert!(w[1].rel_gap < w[0].rel_gap);
    }
    for r in &study.rows {
        assert!(r.lower <= r.switch + 1e-9 && r.switch <= r.upper + 1e-9);
    }
}

#[test]
fn batch_instances_are_refused() {
    let inst = example(10, 20.0)
        .with_batches(BatchModel::Homogeneous(BatchDistribution::negative_binomial(4.0, 0.33).unwrap()))
        .unwrap();
    assert!(bounds(&inst).is_err());
    assert!(lower_bound(&inst).is_err());
}
