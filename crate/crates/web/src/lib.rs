//! Browser bindings. Each export takes plain numbers and returns a JSON
//! string for the page in `www/` to plot.

use fairshare_core::config::{
    BudgetRule, BuyersSection, MarketSection, OutputSection, SamplingMode, ScenarioConfig, SellersSection,
    UtilityDistribution,
};
use fairshare_core::dynamics::{horizon_optimal_price, price_grid_to, run_scenario, ParticipationModel, PricingStrategy};
use fairshare_core::seller::{price_flat_from, profit_at, PriceDecision, PricingBuyer, PricingProblem};
use fairshare_core::UtilityFunction;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const CURVE_SAMPLES: usize = 400;

/// Seller profit against price for one new dataset in an otherwise empty
/// market, with the optimal breakpoint price.
pub fn profit_curve_value(utilities: &[f64], budgets: &[f64], cost: f64) -> Result<Value, String> {
    if utilities.len() != budgets.len() {
        return Err(format!("{} utilities but {} budgets", utilities.len(), budgets.len()));
    }
    let problem = PricingProblem {
        old_prices: vec![],
        buyers: utilities
            .iter()
            .zip(budgets)
            .enumerate()
            .map(|(k, (&u, &b))| PricingBuyer {
                buyer_id: format!("buyer-{k}"),
                utility: UtilityFunction::additive(vec![u]),
                budget: b,
            })
            .collect(),
        cost,
    };
    let responses = problem.responses().map_err(|e| e.to_string())?;
    let (decision, breakpoints) = price_flat_from(&responses, cost);
    let top = responses.iter().map(|r| r.mwp()).fold(0.0, f64::max) * 1.2 + 1e-9;
    let samples: Vec<Value> = (0..=CURVE_SAMPLES)
        .map(|i| {
            let p = top * i as f64 / CURVE_SAMPLES as f64;
            let point = profit_at(&responses, p, cost);
            json!([p, point.profit])
        })
        .collect();
    let best = match decision {
        PriceDecision::Priced { price, profit, buyers } => json!({ "price": price, "profit": profit, "buyers": buyers }),
        PriceDecision::NoProfitablePrice => Value::Null,
    };
    Ok(json!({
        "best": best,
        "mwp": responses.iter().map(|r| r.mwp()).collect::<Vec<_>>(),
        "breakpoints": breakpoints.points.iter().map(|p| json!([p.price, p.profit])).collect::<Vec<_>>(),
        "samples": samples,
    }))
}

/// Best constant price for every horizon `1..=max_horizon`.
pub fn horizon_prices_value(u: f64, b: f64, delta: f64, step: f64, max_horizon: usize) -> Result<Value, String> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(format!("discount must lie in (0, 1), got {delta}"));
    }
    let grid = price_grid_to(u.min(b), step).map_err(|e| e.to_string())?;
    let rows = (1..=max_horizon)
        .map(|t| {
            horizon_optimal_price(u, b, delta, &ParticipationModel::Ratio, t, &grid)
                .map(|r| json!({ "horizon": t, "price": r.price, "value": r.value }))
                .map_err(|e| e.to_string())
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Value::Array(rows))
}

/// Active sellers and mean seller profit per step for a two-buyer,
/// ten-seller market under the named strategy.
pub fn attrition_value(strategy: &str, param: f64, seed: u64, horizon: usize, expected: bool) -> Result<Value, String> {
    let strategy = match strategy {
        "fairshare" => PricingStrategy::Fairshare,
        "reduced" => PricingStrategy::Reduced { c: param },
        "random" => PricingStrategy::RandomBelowFair { seed: None },
        "exploitative" => PricingStrategy::Exploitative { fraction: param },
        other => return Err(format!("unknown strategy `{other}`")),
    };
    let config = ScenarioConfig {
        market: MarketSection {
            horizon,
            discount: 0.98,
            seed,
            mode: if expected { SamplingMode::Expected } else { SamplingMode::Stochastic },
        },
        buyers: BuyersSection {
            count: 2,
            budgets: vec![
                BudgetRule::Fraction { low: 0.95, high: 1.0 },
                BudgetRule::Fraction { low: 0.90, high: 0.95 },
            ],
        },
        sellers: SellersSection { count: 10, cost: 0.0 },
        strategy,
        participation: ParticipationModel::Ratio,
        valuation: UtilityDistribution::default(),
        output: OutputSection::default(),
    };
    let trace = run_scenario(&config).map_err(|e| e.to_string())?;
    let active: Vec<f64> = trace.steps.iter().map(|s| s.active_sellers).collect();
    let profit: Vec<f64> = trace
        .steps
        .iter()
        .map(|s| s.sellers.iter().map(|x| x.cumulative_profit).sum::<f64>() / s.sellers.len().max(1) as f64)
        .collect();
    let utility: Vec<f64> = trace.steps.iter().map(|s| s.buyers.iter().map(|b| b.cumulative_utility).sum()).collect();
    Ok(json!({ "active": active, "profit": profit, "utility": utility }))
}

fn to_js(v: Result<Value, String>) -> Result<String, JsError> {
    v.map(|v| v.to_string()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn profit_curve(utilities: &[f64], budgets: &[f64], cost: f64) -> Result<String, JsError> {
    to_js(profit_curve_value(utilities, budgets, cost))
}

#[wasm_bindgen]
pub fn horizon_prices(u: f64, b: f64, delta: f64, step: f64, max_horizon: usize) -> Result<String, JsError> {
    to_js(horizon_prices_value(u, b, delta, step, max_horizon))
}

#[wasm_bindgen]
pub fn attrition(strategy: &str, param: f64, seed: u32, horizon: usize, expected: bool) -> Result<String, JsError> {
    to_js(attrition_value(strategy, param, seed as u64, horizon, expected))
}
