//! Simulator invariants and cross-checks.

use proptest::prelude::*;
use stochastic_knapsack::dp::solve_dp;
use stochastic_knapsack::model::{
    delta_for_load, discretize, ArrivalRates, BatchDistribution, BatchModel, PriceLadder,
    ProblemInstance,
};
use stochastic_knapsack::sim::{compare_policies, run_path, sample_orders, simulate, Policy};
use stochastic_knapsack::switchover::solve_unit;

fn example(w: usize) -> ProblemInstance {
    ProblemInstance::unit(vec![1.0, 0.8, 0.65, 0.45], vec![0.2, 0.3, 0.1, 0.4], w, 20.0).unwrap()
}

fn batch_example(w: usize) -> ProblemInstance {
    example(w)
        .with_batches(BatchModel::Homogeneous(BatchDistribution::negative_binomial(4.0, 0.33).unwrap()))
        .unwrap()
}

#[test]
fn half_width_shrinks_with_replications() {
    let inst = example(12);
    let a = simulate(&inst, &Policy::Fcfs, 20_000, 1).unwrap();
    let b = simulate(&inst, &Policy::Fcfs, 40_000, 1).unwrap();
    let ratio = b.half_width / a.half_width;
    let expect = 1.0 / 2f64.sqrt();
    assert!((ratio / expect - 1.0).abs() < 0.2, "ratio {ratio}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let inst = batch_example(40);
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let a = single.install(|| simulate(&inst, &Policy::EqualSpaced, 3_000, 17).unwrap());
    let b = simulate(&inst, &Policy::EqualSpaced, 3_000, 17).unwrap();
    assert_eq!(a, b);
}

#[test]
fn dp_policy_beats_heuristics() {
    let inst = batch_example(40);
    let delta = delta_for_load(&inst, 0.05);
    let table = solve_dp(&discretize(&inst, delta).unwrap());
    let dp_value = table.optimal_value();
    let sol = stochastic_knapsack::batch::solve_homogeneous(&inst).unwrap();
    let policies = vec![
        ("dp".to_string(), Policy::dp_table(table, delta).unwrap()),
        ("switch".to_string(), Policy::SwitchOver(sol.switch_times().to_vec())),
        ("equal".to_string(), Policy::EqualSpaced),
        ("fcfs".to_string(), Policy::Fcfs),
    ];
    let cmp = compare_policies(&inst, &policies, 40_000, 5).unwrap();
    let dp = &cmp.rows[0];
    for row in &cmp.rows[1..] {
        // Paired differences: the DP policy is not worse beyond noise.
        let diff = dp.estimate.mean - row.estimate.mean;
        assert!(diff >= -dp.diff_half_width.max(row.diff_half_width), "{}: {diff}", row.policy);
    }
    assert!((dp.estimate.mean - dp_value).abs() <= dp.estimate.half_width + 0.02 * dp_value);
}

#[test]
fn simulated_switch_over_matches_analytic_revenue() {
    let inst = example(9);
    let sol = solve_unit(&inst).unwrap();
    let est = simulate(&inst, &Policy::SwitchOver(sol.switch_times().to_vec()), 100_000, 77).unwrap();
    assert!((est.mean - sol.objective_revenue).abs() <= est.half_width);
}

#[test]
fn comparison_reports_the_best_policy() {
    let inst = example(30);
    let policies = vec![
        ("equal".to_string(), Policy::EqualSpaced),
        ("fcfs".to_string(), Policy::Fcfs),
    ];
    let cmp = compare_policies(&inst, &policies, 5_000, 2).unwrap();
    // With ample stock everything should be sold to whoever asks.
    assert_eq!(cmp.best, "fcfs");
    assert_eq!(cmp.rows[1].pct_off_best, 0.0);
    assert!(cmp.rows[0].pct_off_best > 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn paths_respect_inventory(seed in 0u64..10_000, w in 0usize..40, t1 in 0.0f64..20.0) {
        let inst = ProblemInstance::new(
            PriceLadder::new(vec![1.0, 0.5]).unwrap(),
            ArrivalRates::new(vec![0.6, 1.1]).unwrap(),
            BatchModel::PriceDependent(vec![
                BatchDistribution::discretized_exponential(12.0).unwrap(),
                BatchDistribution::negative_binomial(8.0, 0.5).unwrap(),
            ]),
            w,
            20.0,
        ).unwrap();
        let orders = sample_orders(&inst, seed, 0);
        prop_assert!(orders.windows(2).all(|o| o[0].time <= o[1].time));
        for policy in [Policy::Fcfs, Policy::SwitchOver(vec![t1]), Policy::EqualSpaced] {
            let out = run_path(&inst, &policy, &orders);
            let sold: usize = out.accepted_units.iter().sum();
            prop_assert!(sold <= w);
            prop_assert!(out.revenue <= w as f64 + 1e-9);
        }
    }
}
