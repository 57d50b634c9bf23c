//! Pricing solvers against grid oracles and reference tables.

use stochastic_knapsack::model::BatchDistribution;
use stochastic_knapsack::poisson::shortfall;
use stochastic_knapsack::pricing::{
    pricing_objective, solve_pricing, solve_pricing_approx, solve_pricing_exact,
    solve_pricing_with_p1, ApproxDenominator, DemandFunction, DemandKind, ExactOptions,
    PricingFrame, PricingMethod,
};

fn frame(kind: DemandKind, a: f64, b: f64, w: usize, m: usize) -> PricingFrame {
    PricingFrame::new(w, m, 1.0, DemandFunction::new(kind, a, b).unwrap()).unwrap()
}

#[test]
fn two_period_exact_beats_markdown_grid() {
    for (kind, a, b) in [
        (DemandKind::Linear, 15.0, 14.0),
        (DemandKind::Exponential, 15.0, 2.0),
        (DemandKind::Power, 2.0, 1.5),
    ] {
        for w in [5, 20, 40] {
            let f = frame(kind, a, b, w, 2);
            let sol = solve_pricing_exact(&f, &ExactOptions::default()).unwrap();
            let floor = if kind == DemandKind::Power { 0.005 } else { 0.0 };
            let grid = (0..=200)
                .map(|i| (1.0 - 0.005 * i as f64).max(floor))
                .map(|p2| pricing_objective(&f, &[1.0, p2]).unwrap())
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(sol.objective >= grid - 1e-3, "{kind:?} W={w}: {} < {grid}", sol.objective);
        }
    }
}

#[test]
fn exact_solution_satisfies_first_order_conditions() {
    let f = frame(DemandKind::Exponential, 15.0, 2.0, 30, 8);
    let sol = solve_pricing_exact(&f, &ExactOptions::default()).unwrap();
    assert!(sol.converged);
    assert!(sol.kkt_residual < 1e-5, "{}", sol.kkt_residual);
    assert!((sol.r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!(sol.prices.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn table_three_rows_are_reproduced() {
    let rows = [
        (DemandKind::Linear, 40.0, 37.33, 22.94, [1.0, 0.63, 0.61]),
        (DemandKind::Exponential, 40.0, 2.0, 19.95, [1.0, 0.55, 0.54]),
        (DemandKind::Power, 5.33, 1.5, 20.10, [1.0, 0.52, 0.44]),
    ];
    for (kind, a, b, obj, prices) in rows {
        let sol = solve_pricing_exact(&frame(kind, a, b, 40, 3), &ExactOptions::default()).unwrap();
        assert!((sol.objective - obj).abs() / obj < 0.01, "{kind:?}: {}", sol.objective);
        for (p, q) in sol.prices.iter().zip(prices) {
            assert!((p - q).abs() < 0.01, "{kind:?}: {:?}", sol.prices);
        }
    }
}

#[test]
fn approximation_tracks_exact_within_reported_gaps() {
    for (kind, a, b) in [
        (DemandKind::Linear, 40.0, 37.33),
        (DemandKind::Exponential, 40.0, 2.0),
        (DemandKind::Power, 5.33, 1.5),
    ] {
        let f = frame(kind, a, b, 40, 3);
        let exact = solve_pricing_exact(&f, &ExactOptions::default()).unwrap();
        let approx = solve_pricing_approx(&f, ApproxDenominator::Cumulative).unwrap();
        assert!(approx.objective <= exact.objective + 1e-9);
        assert!((exact.objective - approx.objective) / exact.objective < 0.06);
    }
}

#[test]
fn marginal_denominator_is_available() {
    let f = frame(DemandKind::Linear, 40.0, 37.33, 40, 3);
    let sol = solve_pricing_approx(&f, ApproxDenominator::Marginal).unwrap();
    assert!((sol.r.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    assert!(sol.prices.windows(2).all(|w| w[1] <= w[0] + 1e-12));
}

#[test]
fn flat_ladder_matches_closed_form() {
    let f = frame(DemandKind::Exponential, 15.0, 2.0, 50, 8);
    let v = pricing_objective(&f, &[1.0, 0.52, 0.52, 0.52, 0.52, 0.52, 0.52, 0.52]).unwrap();
    let mu1 = 15.0 * (-2.0f64).exp();
    let mu = mu1 + 7.0 * 15.0 * (-1.04f64).exp();
    let expect = 50.0 - 0.48 * shortfall(50, mu1).value - 0.52 * shortfall(50, mu).value;
    assert!((v - expect).abs() < 1e-12);
    assert!((v - 21.28).abs() < 0.05);
}

#[test]
fn unit_batch_frame_equals_default_frame() {
    let d = DemandFunction::new(DemandKind::Exponential, 15.0, 2.0).unwrap();
    let a = PricingFrame::new(20, 3, 1.0, d.clone()).unwrap();
    let b = PricingFrame::with_batch(20, 3, 1.0, d, &BatchDistribution::unit()).unwrap();
    let p = [1.0, 0.7, 0.5];
    assert_eq!(pricing_objective(&a, &p).unwrap(), pricing_objective(&b, &p).unwrap());
}

#[test]
fn larger_orders_sell_more_at_the_same_prices() {
    let d = DemandFunction::new(DemandKind::Exponential, 15.0, 2.0).unwrap();
    let unit = PricingFrame::new(20, 3, 1.0, d.clone()).unwrap();
    let batch =
        PricingFrame::with_batch(20, 3, 1.0, d, &BatchDistribution::from_pmf(vec![0.0, 0.5, 0.5]).unwrap())
            .unwrap();
    let sol = solve_pricing(&batch, PricingMethod::Exact).unwrap();
    assert!(sol.objective.is_finite());
    let p = [1.0, 0.8, 0.6];
    // Same order rate, larger orders: more units sold up to the stock.
    assert!(pricing_objective(&batch, &p).unwrap() > pricing_objective(&unit, &p).unwrap());
}

#[test]
fn period_scale_multiplies_rates() {
    let d = DemandFunction::new(DemandKind::Exponential, 15.0, 2.0).unwrap();
    let scaled = d.clone().with_period_scale(vec![2.0, 2.0, 2.0]).unwrap();
    let twice = DemandFunction::new(DemandKind::Exponential, 30.0, 2.0).unwrap();
    let p = [1.0, 0.7, 0.5];
    let a = pricing_objective(&PricingFrame::new(20, 3, 1.0, scaled).unwrap(), &p).unwrap();
    let b = pricing_objective(&PricingFrame::new(20, 3, 1.0, twice).unwrap(), &p).unwrap();
    assert!((a - b).abs() < 1e-12);
    assert!(PricingFrame::new(20, 3, 1.0, d.with_period_scale(vec![1.0]).unwrap()).is_err());
}

#[test]
fn single_period_free_price_matches_scan() {
    // One period, linear demand: revenue p (W - H_W(a - b p)).
    let d = DemandFunction::new(DemandKind::Linear, 10.0, 4.0).unwrap();
    let base = PricingFrame::new(12, 1, 1.0, d).unwrap();
    let sol = solve_pricing_with_p1(&base, PricingMethod::Exact).unwrap();
    let (best_p, best_v) = (1..25_000)
        .map(|i| 1e-4 * i as f64)
        .map(|p| (p, p * (12.0 - shortfall(12, (10.0 - 4.0 * p).max(0.0)).value)))
        .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    assert!((sol.prices[0] - best_p).abs() < 1e-3, "{} vs {best_p}", sol.prices[0]);
    assert!((sol.objective - best_v).abs() < 1e-6);
    assert!((sol.eta - 12.0).abs() < 1e-6);
}

#[test]
fn free_top_price_is_a_fixed_point() {
    let f = frame(DemandKind::Exponential, 40.0, 2.0, 40, 3);
    let free = solve_pricing_with_p1(&f, PricingMethod::Exact).unwrap();
    let fixed = solve_pricing_exact(&f.with_p1(free.prices[0]).unwrap(), &ExactOptions::default()).unwrap();
    for (a, b) in free.prices.iter().zip(&fixed.prices) {
        assert!((a - b).abs() < 1e-4);
    }
    // Freeing p_1 can only help.
    let at_one = solve_pricing_exact(&f, &ExactOptions::default()).unwrap();
    assert!(free.objective >= at_one.objective - 1e-9);
}

#[test]
fn ample_stock_pushes_prices_to_the_monopoly_price() {
    // With far more stock than demand, each period is priced at argmax p a e^{-bp} = 1/b.
    let f = frame(DemandKind::Exponential, 15.0, 2.0, 400, 3);
    let sol = solve_pricing_with_p1(&f, PricingMethod::Exact).unwrap();
    for p in &sol.prices {
        assert!((p - 0.5).abs() < 1e-3, "{:?}", sol.prices);
    }
}

#[test]
fn invalid_ladders_are_rejected() {
    let f = frame(DemandKind::Power, 2.0, 1.5, 10, 3);
    assert!(pricing_objective(&f, &[1.0, 0.0, 0.0]).is_err());
    assert!(pricing_objective(&f, &[0.9, 0.5, 0.4]).is_err());
    assert!(pricing_objective(&f, &[1.0, 0.5]).is_err());
    assert!(DemandFunction::new(DemandKind::Linear, -1.0, 1.0).is_err());
}
