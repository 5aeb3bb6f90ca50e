//! The repeated market: every step each active seller lists a fresh dataset
//! in shuffled order, pricing against what is already listed, then every
//! buyer purchases once all listings are in.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ParticipationState, PricingStrategy};
use crate::buyer::solve_purchase;
use crate::config::{SamplingMode, ScenarioConfig};
use crate::error::Result;
use crate::market::{Money, UtilityFunction};
use crate::seller::{price_flat, PriceDecision, PricingBuyer, PricingProblem};

/// Relative price shading used when buyers decide, so that a buyer who is
/// exactly indifferent at a seller's fairshare price completes the sale the
/// seller priced for. Payments use the posted price.
const INDIFFERENCE_SHADE: f64 = 1e-9;

/// Independent random streams of one scenario.
#[derive(Debug, Clone)]
pub struct ScenarioRng {
    /// Utilities, budgets and arrival order.
    market: ChaCha8Rng,
    /// Stochastic exits.
    exits: ChaCha8Rng,
    /// Random pricing strategies.
    strategy: ChaCha8Rng,
}

impl ScenarioRng {
    pub fn new(seed: u64, strategy: &PricingStrategy) -> Self {
        let stream = |seed: u64, id: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(id);
            rng
        };
        let strategy_seed = match strategy {
            PricingStrategy::RandomBelowFair { seed: Some(s) } => *s,
            _ => seed,
        };
        ScenarioRng { market: stream(seed, 0), exits: stream(seed, 1), strategy: stream(strategy_seed, 2) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicsState {
    /// Steps completed so far.
    pub time: usize,
    pub sellers: Vec<ParticipationState>,
    pub buyer_ids: Vec<String>,
    pub seller_profit: Vec<Money>,
    /// `sum_t delta^t g_t` per buyer.
    pub buyer_utility: Vec<Money>,
}

impl DynamicsState {
    pub fn new(config: &ScenarioConfig) -> Self {
        let m = config.sellers.count;
        let n = config.buyers.count;
        DynamicsState {
            time: 0,
            sellers: (0..m).map(|j| ParticipationState::new(seller_id(j))).collect(),
            buyer_ids: (0..n).map(buyer_id).collect(),
            seller_profit: vec![0.0; m],
            buyer_utility: vec![0.0; n],
        }
    }

    /// Realized active sellers, or their expected number in expected mode.
    pub fn active_sellers(&self, mode: SamplingMode) -> f64 {
        match mode {
            SamplingMode::Stochastic => self.sellers.iter().filter(|s| s.active).count() as f64,
            SamplingMode::Expected => {
                self.sellers.iter().filter(|s| s.active).map(|s| s.survival_product).sum()
            }
        }
    }
}

pub fn seller_id(j: usize) -> String {
    format!("seller-{j}")
}

pub fn buyer_id(k: usize) -> String {
    format!("buyer-{k}")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellerStep {
    /// Whether the seller was in the market at the start of the step.
    pub present: bool,
    /// Whether it listed a dataset (it withholds when no price is profitable).
    pub listed: bool,
    pub fair_price: Option<Money>,
    pub posted_price: Option<Money>,
    pub sales: usize,
    /// Revenue minus cost, weighted by survival probability in expected mode.
    pub profit: Money,
    pub participation: f64,
    pub survival: f64,
    pub active: bool,
    pub cumulative_profit: Money,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuyerStep {
    pub budget: Money,
    pub spend: Money,
    pub purchases: usize,
    /// Net utility of the step, weighted by seller survival in expected mode.
    pub net_utility: Money,
    pub cumulative_utility: Money,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    /// 1-based.
    pub step: usize,
    /// Active (or expected active) sellers at the start of the step.
    pub active_sellers: f64,
    /// Seller indices in arrival order.
    pub order: Vec<usize>,
    pub sellers: Vec<SellerStep>,
    pub buyers: Vec<BuyerStep>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub seller_ids: Vec<String>,
    pub buyer_ids: Vec<String>,
    pub steps: Vec<StepRecord>,
}

/// Plays one step from `state`.
pub fn step_market(
    config: &ScenarioConfig,
    state: &DynamicsState,
    rng: &mut ScenarioRng,
) -> Result<(DynamicsState, StepRecord)> {
    let m = config.sellers.count;
    let n = config.buyers.count;
    let mode = config.market.mode;
    let strategy = &config.strategy;
    let participation = &config.participation;
    let cost = config.sellers.cost;
    let discount = config.market.discount.powi(state.time as i32);
    let active_sellers = state.active_sellers(mode);

    // Every draw below happens regardless of who is still active, so runs
    // that differ only in strategy see the same datasets and budgets.
    let mut utilities = vec![vec![0.0; n]; m];
    for row in &mut utilities {
        for u in row.iter_mut() {
            *u = config.valuation.draw(&mut rng.market)?;
        }
    }
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(&mut rng.market);
    order.retain(|&j| state.sellers[j].active);

    let budgets: Vec<Money> = (0..n)
        .map(|k| {
            let total: Money = order.iter().map(|&j| utilities[j][k]).sum();
            config.buyers.budget_rule(k).draw(total, &mut rng.market)
        })
        .collect();

    // Sequential listing.
    let mut listed: Vec<usize> = Vec::with_capacity(order.len());
    let mut prices: Vec<Money> = Vec::with_capacity(order.len());
    let mut fair = vec![None; m];
    for &j in &order {
        let problem = PricingProblem {
            old_prices: prices.clone(),
            buyers: (0..n)
                .map(|k| {
                    let mut values: Vec<Money> = listed.iter().map(|&i| utilities[i][k]).collect();
                    values.push(utilities[j][k]);
                    PricingBuyer {
                        buyer_id: state.buyer_ids[k].clone(),
                        utility: UtilityFunction::additive(values),
                        budget: budgets[k],
                    }
                })
                .collect(),
            cost,
        };
        if let PriceDecision::Priced { price: p_star, .. } = price_flat(&problem)?.0 {
            let mean_utility = utilities[j].iter().sum::<Money>() / n as f64;
            let posted = strategy.post(p_star, mean_utility, &mut rng.strategy);
            fair[j] = Some(p_star);
            listed.push(j);
            prices.push(posted);
        }
    }

    // Purchases.
    let weight = |j: usize| match mode {
        SamplingMode::Stochastic => 1.0,
        SamplingMode::Expected => state.sellers[j].survival_product,
    };
    let shaded: Vec<Money> = prices.iter().map(|p| p * (1.0 - INDIFFERENCE_SHADE)).collect();
    let mut sales = vec![0usize; m];
    let mut next = state.clone();
    let mut buyers = Vec::with_capacity(n);
    for k in 0..n {
        let u = UtilityFunction::additive(listed.iter().map(|&j| utilities[j][k]).collect::<Vec<_>>());
        let decision = solve_purchase(&u, &shaded, budgets[k])?;
        let mut spend = 0.0;
        let mut net = 0.0;
        for (i, &j) in listed.iter().enumerate() {
            if decision.selection[i] {
                sales[j] += 1;
                spend += prices[i];
                net += weight(j) * (utilities[j][k] - prices[i]);
            }
        }
        next.buyer_utility[k] += discount * net;
        buyers.push(BuyerStep {
            budget: budgets[k],
            spend,
            purchases: decision.count(),
            net_utility: net,
            cumulative_utility: next.buyer_utility[k],
        });
    }

    // Profits and participation.
    let exit_draws: Vec<f64> = (0..m).map(|_| rand::Rng::random(&mut rng.exits)).collect();
    let step = state.time + 1;
    let mut sellers = Vec::with_capacity(m);
    for j in 0..m {
        let present = state.sellers[j].active;
        let slot = listed.iter().position(|&i| i == j);
        let mut profit = 0.0;
        let mut pi = 1.0;
        if let Some(i) = slot {
            profit = weight(j) * (prices[i] * sales[j] as f64 - cost);
            pi = participation.pi(prices[i], fair[j].expect("listed sellers have a fair price"));
            let s = &mut next.sellers[j];
            s.apply(pi);
            let leaves = match mode {
                SamplingMode::Stochastic => exit_draws[j] >= pi,
                SamplingMode::Expected => s.survival_product == 0.0,
            };
            if leaves {
                s.exit(step);
            }
        }
        next.seller_profit[j] += profit;
        sellers.push(SellerStep {
            present,
            listed: slot.is_some(),
            fair_price: fair[j],
            posted_price: slot.map(|i| prices[i]),
            sales: sales[j],
            profit,
            participation: pi,
            survival: next.sellers[j].survival_product,
            active: next.sellers[j].active,
            cumulative_profit: next.seller_profit[j],
        });
    }
    next.time = step;
    let record = StepRecord { step, active_sellers, order: listed, sellers, buyers };
    Ok((next, record))
}

/// Runs the configured scenario for its full horizon.
pub fn run_scenario(config: &ScenarioConfig) -> Result<SimulationTrace> {
    config.validate()?;
    let mut rng = ScenarioRng::new(config.market.seed, &config.strategy);
    let mut state = DynamicsState::new(config);
    let mut trace = SimulationTrace {
        seller_ids: state.sellers.iter().map(|s| s.seller_id.clone()).collect(),
        buyer_ids: state.buyer_ids.clone(),
        steps: Vec::with_capacity(config.market.horizon),
    };
    for _ in 0..config.market.horizon {
        let (next, record) = step_market(config, &state, &mut rng)?;
        trace.steps.push(record);
        state = next;
    }
    Ok(trace)
}
