//! Switch-over solver against grid search, structural properties and the
//! simulator.

use proptest::prelude::*;
use stochastic_knapsack::model::ProblemInstance;
use stochastic_knapsack::poisson::shortfall;
use stochastic_knapsack::sim::{simulate, Policy};
use stochastic_knapsack::switchover::{
    acceptance_rates, averaged_prices, constraint_coefficients, kkt_check, revenue_at_times,
    solve_unit,
};

fn example(w: usize) -> ProblemInstance {
    ProblemInstance::unit(vec![1.0, 0.8, 0.65, 0.45], vec![0.2, 0.3, 0.1, 0.4], w, 20.0).unwrap()
}

/// Best revenue over sorted switch times on a grid of step `h`.
fn grid_best(inst: &ProblemInstance, h: f64) -> f64 {
    let horizon = inst.horizon();
    let steps = (horizon / h).round() as usize;
    let at = |k: usize| (k as f64 * h).min(horizon);
    match inst.classes() {
        1 => revenue_at_times(inst, &[]).unwrap(),
        2 => (0..=steps)
            .map(|a| revenue_at_times(inst, &[at(a)]).unwrap())
            .fold(f64::NEG_INFINITY, f64::max),
        3 => (0..=steps)
            .flat_map(|a| (a..=steps).map(move |b| (a, b)))
            .map(|(a, b)| revenue_at_times(inst, &[at(a), at(b)]).unwrap())
            .fold(f64::NEG_INFINITY, f64::max),
        m => panic!("grid search for {m} classes not supported"),
    }
}

#[test]
fn matches_grid_search_for_two_and_three_classes() {
    let cases = [
        ProblemInstance::unit(vec![1.0, 0.8, 0.65], vec![0.2, 0.3, 0.1], 5, 20.0).unwrap(),
        ProblemInstance::unit(vec![1.0, 0.8, 0.45], vec![0.2, 0.3, 0.4], 8, 20.0).unwrap(),
        ProblemInstance::unit(vec![1.0, 0.5], vec![1.0, 2.0], 6, 5.0).unwrap(),
        ProblemInstance::unit(vec![2.0, 1.0, 0.4], vec![0.5, 0.5, 1.5], 10, 8.0).unwrap(),
    ];
    for inst in &cases {
        let sol = solve_unit(inst).unwrap();
        let grid = grid_best(inst, 0.05);
        assert!(sol.objective_revenue >= grid - 1e-9, "{} < {grid}", sol.objective_revenue);
        assert!(sol.objective_revenue - grid <= 1e-3, "{} vs {grid}", sol.objective_revenue);
    }
}

#[test]
fn four_class_example_beats_nearby_switch_times() {
    let inst = example(12);
    let sol = solve_unit(&inst).unwrap();
    let t = sol.switch_times().to_vec();
    for k in 0..3 {
        for delta in [-0.05, 0.05] {
            let mut moved = t.clone();
            moved[k] = (moved[k] + delta).clamp(0.0, 20.0);
            moved.sort_by(f64::total_cmp);
            assert!(revenue_at_times(&inst, &moved).unwrap() <= sol.objective_revenue + 1e-12);
        }
    }
}

#[test]
fn kkt_residuals_are_tiny() {
    for w in [1, 3, 7, 12, 15, 19, 25, 60] {
        let sol = solve_unit(&example(w)).unwrap();
        let report = kkt_check(&example(w), &sol);
        assert!(report.max_residual() <= 1e-8, "W={w}: {report:?}");
    }
}

#[test]
fn single_class_is_a_shortfall() {
    let inst = ProblemInstance::unit(vec![1.5], vec![0.7], 9, 10.0).unwrap();
    let sol = solve_unit(&inst).unwrap();
    assert!((sol.mu[0] - 7.0).abs() < 1e-12);
    let expect = 1.5 * (9.0 - shortfall(9, 7.0).value);
    assert!((sol.objective_revenue - expect).abs() < 1e-10);
}

#[test]
fn analytic_revenue_and_acceptance_match_simulation() {
    let inst = example(12);
    let sol = solve_unit(&inst).unwrap();
    let policy = Policy::switch_over(sol.switch_times().to_vec(), 20.0).unwrap();
    let est = simulate(&inst, &policy, 100_000, 21).unwrap();
    assert!(
        (est.mean - sol.objective_revenue).abs() <= est.half_width,
        "{} vs {est:?}",
        sol.objective_revenue
    );
    let alpha = acceptance_rates(&inst, &sol).unwrap();
    for (k, a) in alpha.iter().enumerate() {
        // Binomial-style band on the per-class fraction.
        let band = 2.576 * (a * (1.0 - a) / (100_000.0 * 0.2 * 20.0)).sqrt() + 2e-3;
        assert!((est.per_class_acceptance[k] - a).abs() <= band, "class {k}: {} vs {a}", est.per_class_acceptance[k]);
    }
}

fn random_instance() -> impl Strategy<Value = ProblemInstance> {
    (1usize..6)
        .prop_flat_map(|m| {
            (
                prop::collection::vec(0.05f64..2.0, m),
                prop::collection::vec(0.01f64..3.0, m),
                0usize..60,
                0.5f64..40.0,
            )
        })
        .prop_map(|(mut p, l, w, t)| {
            p.sort_by(|a, b| b.total_cmp(a));
            ProblemInstance::unit(p, l, w, t).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// The time cost per unit of averaged price drop shrinks along the ladder.
    #[test]
    fn cost_ratio_is_non_increasing(inst in random_instance()) {
        let avg = averaged_prices(inst.ladder(), inst.rates());
        let c = constraint_coefficients(inst.rates().rates());
        let ratios: Vec<f64> = (0..inst.classes())
            .filter(|l| avg.pi[*l] > 0.0)
            .map(|l| c[l] / avg.pi[l])
            .collect();
        for w in ratios.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{ratios:?}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn solution_is_ordered_feasible_and_stationary(inst in random_instance()) {
        let sol = solve_unit(&inst).unwrap();
        for w in sol.mu.windows(2) {
            prop_assert!(w[1] >= w[0]);
        }
        prop_assert!(sol.y.iter().all(|y| *y >= 0.0));
        prop_assert!(sol.y.iter().sum::<f64>() <= inst.horizon() * (1.0 + 1e-12));
        prop_assert!(kkt_check(&inst, &sol).max_residual() <= 1e-8);
        let bound = inst.prices()[0] * inst.inventory() as f64;
        prop_assert!(sol.objective_revenue <= bound + 1e-9);
    }
}
