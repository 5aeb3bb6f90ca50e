//! Royalty pricing: the seller charges a rate on the bundle's realized utility.
//!
//! With the additive rate function `f(a, x) = sum_j x_j a_j`, a buyer pays
//! `f(a, x) * u(x)` for bundle `x` and keeps `(1 - f(a, x)) * u(x)`. Each
//! buyer has a cap on the total rate it accepts.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::{from_mask, insert_zero_bit, Money, PurchaseDecision, UtilityFunction, MAX_EXHAUSTIVE};

/// Margin taken off an open supremum (the strict utility-gain condition).
pub const OPEN_BOUND_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoyaltyBuyer {
    pub buyer_id: String,
    /// Utility over the already-listed datasets followed by the new one.
    pub utility: UtilityFunction,
    /// Largest total rate the buyer accepts.
    pub cap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoyaltyProblem {
    pub old_rates: Vec<f64>,
    pub buyers: Vec<RoyaltyBuyer>,
    pub cost: Money,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RateDecision {
    Rated { rate: f64, revenue: Money, profit: Money },
    NoProfitableRate,
}

impl RateDecision {
    pub fn rate(&self) -> Option<f64> {
        match self {
            RateDecision::Rated { rate, .. } => Some(*rate),
            RateDecision::NoProfitableRate => None,
        }
    }
}

/// Total rate `f(a, x)` of a bundle under the additive rate function.
pub fn total_rate(rates: &[f64], selection: &[bool]) -> f64 {
    rates.iter().zip(selection).filter(|(_, &s)| s).fold(0.0, |acc, (a, _)| acc + a)
}

fn rate_mask(rates: &[f64], mask: usize) -> f64 {
    let mut acc = 0.0;
    for (j, a) in rates.iter().enumerate() {
        if mask >> j & 1 == 1 {
            acc += a;
        }
    }
    acc
}

fn check_rate(name: &str, a: f64) -> Result<()> {
    if !(0.0..1.0).contains(&a) {
        return Err(Error::param(format!("{name} must lie in [0, 1), got {a}")));
    }
    Ok(())
}

/// Optimal bundle under royalty pricing. `total_spend` holds the bundle's total rate.
pub fn solve_fractional(u: &UtilityFunction, rates: &[f64], cap: f64) -> Result<PurchaseDecision> {
    let n = u.len();
    if rates.len() != n {
        return Err(Error::Dimension { expected: n, found: rates.len() });
    }
    if n > MAX_EXHAUSTIVE {
        return Err(Error::Size { n, max: MAX_EXHAUSTIVE });
    }
    check_rate("rate cap", cap)?;
    for &a in rates {
        check_rate("rate", a)?;
    }
    let mut best = PurchaseDecision::empty(n);
    for rank in 0..1usize << n {
        let mask = (0..n).filter(|&j| rank >> (n - 1 - j) & 1 == 1).fold(0, |m, j| m | 1 << j);
        let f = rate_mask(rates, mask);
        if f > cap {
            continue;
        }
        let g = (1.0 - f) * u.value_mask(mask);
        if g > best.net_utility {
            best = PurchaseDecision { selection: from_mask(mask, n), total_spend: f, net_utility: g };
        }
    }
    Ok(best)
}

/// Bundle that stays attractive after adding the new dataset at rate zero.
#[derive(Debug, Clone, Copy)]
struct GainBundle {
    utility_with_new: Money,
    old_rate: f64,
    /// Largest new-dataset rate at which the buyer still takes this bundle.
    max_rate: f64,
}

#[derive(Debug, Clone)]
struct RoyaltyResponse {
    bundles: Vec<GainBundle>,
}

impl RoyaltyResponse {
    fn new(buyer: &RoyaltyBuyer, old_rates: &[f64]) -> Result<Self> {
        let n = old_rates.len();
        if buyer.utility.len() != n + 1 {
            return Err(Error::Dimension { expected: n + 1, found: buyer.utility.len() });
        }
        check_rate("rate cap", buyer.cap)?;
        let reduced = buyer.utility.without(n)?;
        let prior = solve_fractional(&reduced, old_rates, buyer.cap)?;
        let prior_net = prior.net_utility;

        let mut bundles = Vec::new();
        for m in 0..1usize << n {
            let mask = insert_zero_bit(m, n);
            let f = rate_mask(old_rates, mask);
            if f > buyer.cap || (1.0 - f) * buyer.utility.value_mask(mask) < 0.0 {
                continue;
            }
            let utility_with_new = buyer.utility.value_mask(mask | 1 << n);
            if (1.0 - f) * utility_with_new <= prior_net {
                continue;
            }
            // (1 - f - a) u_new > prior_net  <=>  a < 1 - f - prior_net / u_new
            let gain_sup = 1.0 - f - prior_net / utility_with_new;
            let cap_sup = buyer.cap - f;
            let max_rate = (gain_sup - OPEN_BOUND_MARGIN).min(cap_sup).min(1.0 - OPEN_BOUND_MARGIN);
            bundles.push(GainBundle { utility_with_new, old_rate: f, max_rate });
        }
        Ok(RoyaltyResponse { bundles })
    }

    /// Rates just below the points where the buyer switches between two
    /// gaining bundles; past such a point it moves to the bundle with the
    /// smaller utility, so revenue drops.
    fn switch_rates(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for (i, a) in self.bundles.iter().enumerate() {
            for b in &self.bundles[i + 1..] {
                let du = a.utility_with_new - b.utility_with_new;
                if du == 0.0 {
                    continue;
                }
                let cross = ((1.0 - a.old_rate) * a.utility_with_new - (1.0 - b.old_rate) * b.utility_with_new) / du;
                let rate = cross - OPEN_BOUND_MARGIN;
                if rate > 0.0 && rate <= a.max_rate.min(b.max_rate) {
                    out.push(rate);
                }
            }
        }
        out
    }

    /// Royalty paid to the new seller at `rate`, or `None` if the buyer passes.
    fn payment(&self, rate: f64) -> Option<Money> {
        let mut chosen: Option<(Money, Money)> = None;
        for b in self.bundles.iter().filter(|b| rate <= b.max_rate) {
            let keep = (1.0 - b.old_rate - rate) * b.utility_with_new;
            if chosen.is_none_or(|(best, _)| keep > best) {
                chosen = Some((keep, rate * b.utility_with_new));
            }
        }
        chosen.map(|(_, pay)| pay)
    }
}

/// Revenue-maximizing royalty rate for the new dataset.
///
/// Candidates are, for every buyer and every bundle that gains from the new
/// dataset, the largest rate at which the buyer still takes that bundle, plus
/// the rates just before the buyer switches between two such bundles.
pub fn price_royalty(problem: &RoyaltyProblem) -> Result<RateDecision> {
    Ok(price_royalty_curve(problem)?.0)
}

/// [`price_royalty`] together with revenue at every candidate rate.
pub fn price_royalty_curve(problem: &RoyaltyProblem) -> Result<(RateDecision, Vec<(f64, Money)>)> {
    if problem.buyers.is_empty() {
        return Err(Error::EmptyMarket);
    }
    for &a in &problem.old_rates {
        check_rate("rate", a)?;
    }
    let responses = problem
        .buyers
        .iter()
        .map(|b| RoyaltyResponse::new(b, &problem.old_rates))
        .collect::<Result<Vec<_>>>()?;

    let mut candidates: Vec<f64> = responses
        .iter()
        .flat_map(|r| r.bundles.iter().map(|b| b.max_rate).chain(r.switch_rates()))
        .filter(|&a| a > 0.0)
        .collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let mut curve = Vec::with_capacity(candidates.len());
    let mut best = RateDecision::NoProfitableRate;
    for rate in candidates {
        let revenue: Money = responses.iter().filter_map(|r| r.payment(rate)).sum();
        curve.push((rate, revenue));
        let profit = revenue - problem.cost;
        if revenue <= 0.0 || profit < 0.0 {
            continue;
        }
        let better = match best {
            RateDecision::Rated { profit: p, .. } => profit > p,
            RateDecision::NoProfitableRate => true,
        };
        if better {
            best = RateDecision::Rated { rate, revenue, profit };
        }
    }
    Ok((best, curve))
}
