//! Flat-rate pricing for an arriving dataset.
//!
//! Seller profit `r(p) = p * #{buyers purchasing at p} - c` is piecewise
//! linear in `p` with drops at each buyer's maximum willingness to pay, so
//! the optimum over the positive reals sits on one of those breakpoints.

use serde::{Deserialize, Serialize};

use crate::buyer::{prior_decision, Arrival, BuyerResponse};
use crate::error::{Error, Result};
use crate::market::{Money, UtilityFunction};

/// One buyer as seen by an arriving seller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricingBuyer {
    pub buyer_id: String,
    /// Utility over the already-listed datasets followed by the new one.
    pub utility: UtilityFunction,
    pub budget: Money,
}

/// The market just before a new dataset is listed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricingProblem {
    pub old_prices: Vec<Money>,
    pub buyers: Vec<PricingBuyer>,
    /// Creation cost of the new dataset.
    pub cost: Money,
}

impl PricingProblem {
    pub fn new_index(&self) -> usize {
        self.old_prices.len()
    }

    /// Each buyer's prior optimum and response to the new dataset.
    pub fn responses(&self) -> Result<Vec<BuyerResponse>> {
        if self.buyers.is_empty() {
            return Err(Error::EmptyMarket);
        }
        if !(self.cost >= 0.0 && self.cost.is_finite()) {
            return Err(Error::param(format!("cost must be finite and >= 0, got {}", self.cost)));
        }
        let j = self.new_index();
        let mut prices = self.old_prices.clone();
        prices.push(0.0);
        self.buyers
            .iter()
            .map(|b| {
                if b.utility.len() != j + 1 {
                    return Err(Error::Dimension { expected: j + 1, found: b.utility.len() });
                }
                let prior = prior_decision(&b.utility, &prices, b.budget, j)?;
                BuyerResponse::new(&Arrival {
                    utility: &b.utility,
                    prices: &prices,
                    budget: b.budget,
                    prior: &prior,
                    new_index: j,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub price: Money,
    pub buyers: usize,
    pub profit: Money,
}

/// Seller profit at each candidate price, ascending by price.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ProfitCurve {
    pub points: Vec<CurvePoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PriceDecision {
    Priced { price: Money, profit: Money, buyers: usize },
    /// No candidate sells to anyone at a positive price without a loss.
    NoProfitablePrice,
}

impl PriceDecision {
    pub fn price(&self) -> Option<Money> {
        match self {
            PriceDecision::Priced { price, .. } => Some(*price),
            PriceDecision::NoProfitablePrice => None,
        }
    }
}

/// Profit at `price` with every buyer's purchase decision re-evaluated.
pub fn profit_at(responses: &[BuyerResponse], price: Money, cost: Money) -> CurvePoint {
    let buyers = responses.iter().filter(|r| r.purchases_at(price)).count();
    CurvePoint { price, buyers, profit: price * buyers as f64 - cost }
}

fn evaluate(responses: &[BuyerResponse], mut candidates: Vec<Money>, cost: Money) -> (PriceDecision, ProfitCurve) {
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let curve = ProfitCurve {
        points: candidates.iter().map(|&p| profit_at(responses, p, cost)).collect(),
    };
    let mut best: Option<CurvePoint> = None;
    for point in &curve.points {
        if point.buyers == 0 || point.price <= 0.0 || point.profit < 0.0 {
            continue;
        }
        // ascending scan with strict improvement keeps the lowest price on ties
        if best.is_none_or(|b| point.profit > b.profit) {
            best = Some(*point);
        }
    }
    let decision = match best {
        Some(p) => PriceDecision::Priced { price: p.price, profit: p.profit, buyers: p.buyers },
        None => PriceDecision::NoProfitablePrice,
    };
    (decision, curve)
}

/// Profit-maximizing price among `{0} ∪ {MWP_k}`.
pub fn price_flat(problem: &PricingProblem) -> Result<(PriceDecision, ProfitCurve)> {
    let responses = problem.responses()?;
    Ok(price_flat_from(&responses, problem.cost))
}

pub fn price_flat_from(responses: &[BuyerResponse], cost: Money) -> (PriceDecision, ProfitCurve) {
    let mut candidates = vec![0.0];
    candidates.extend(responses.iter().map(BuyerResponse::mwp));
    evaluate(responses, candidates, cost)
}

/// Profit-maximizing price on a fixed candidate grid.
pub fn price_grid(problem: &PricingProblem, candidates: &[Money]) -> Result<(PriceDecision, ProfitCurve)> {
    if candidates.is_empty() {
        return Err(Error::param("candidate price grid is empty"));
    }
    if let Some(p) = candidates.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
        return Err(Error::param(format!("candidate prices must be finite and >= 0, got {p}")));
    }
    let responses = problem.responses()?;
    Ok(evaluate(&responses, candidates.to_vec(), problem.cost))
}

/// The candidate grid used for LLM-scale valuation experiments.
pub const DEFAULT_PRICE_GRID: [Money; 5] = [0.5, 0.625, 0.75, 0.875, 1.0];
