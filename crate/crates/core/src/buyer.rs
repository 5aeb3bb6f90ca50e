//! Buyer purchasing problem and the purchase test for a newly listed dataset.
//!
//! [`solve_purchase`] maximizes `g(x) = u(x) - x^T p` subject to
//! `x^T p <= budget` and `g(x) >= 0`. Additive utilities use depth-first
//! branch-and-bound; tabulated utilities are enumerated.
//!
//! When a dataset `j` arrives, [`BuyerResponse`] caches every bundle that
//! was feasible before the arrival so that purchase checks at many candidate
//! prices stay cheap.

use crate::error::{Error, Result};
use crate::market::{
    from_mask, insert_zero_bit, spend_mask, to_mask, Money, PurchaseDecision, UtilityFunction,
    MAX_EXHAUSTIVE,
};

/// Branch-and-bound only discards a subtree whose bound is below the
/// incumbent by more than this relative margin, so exact ties survive.
const BOUND_SLACK: f64 = 1e-9;

fn check_inputs(u: &UtilityFunction, prices: &[Money], budget: Money) -> Result<()> {
    if prices.len() != u.len() {
        return Err(Error::Dimension { expected: u.len(), found: prices.len() });
    }
    if !(budget >= 0.0 && budget.is_finite()) {
        return Err(Error::param(format!("budget must be finite and >= 0, got {budget}")));
    }
    if let Some(p) = prices.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
        return Err(Error::param(format!("prices must be finite and >= 0, got {p}")));
    }
    Ok(())
}

/// Optimal bundle for one buyer.
///
/// Among bundles with equal net utility the lexicographically smallest
/// selection vector wins (`false < true`, index 0 most significant). The
/// empty bundle is always feasible, so a decision always exists.
pub fn solve_purchase(u: &UtilityFunction, prices: &[Money], budget: Money) -> Result<PurchaseDecision> {
    check_inputs(u, prices, budget)?;
    match u {
        UtilityFunction::Additive(values) => Ok(branch_and_bound(values, prices, budget)),
        UtilityFunction::Tabulated(_) => {
            let n = u.len();
            if n > MAX_EXHAUSTIVE {
                return Err(Error::Size { n, max: MAX_EXHAUSTIVE });
            }
            Ok(enumerate(u, prices, budget))
        }
    }
}

fn branch_and_bound(values: &[Money], prices: &[Money], budget: Money) -> PurchaseDecision {
    let n = values.len();
    let mut suffix_gain = vec![0.0; n + 1];
    for j in (0..n).rev() {
        suffix_gain[j] = suffix_gain[j + 1] + (values[j] - prices[j]).max(0.0);
    }
    let mut search = Search {
        values,
        prices,
        budget,
        suffix_gain,
        current: vec![false; n],
        best: PurchaseDecision::empty(n),
    };
    search.descend(0, 0.0, 0.0);
    search.best
}

struct Search<'a> {
    values: &'a [Money],
    prices: &'a [Money],
    budget: Money,
    suffix_gain: Vec<Money>,
    current: Vec<bool>,
    best: PurchaseDecision,
}

impl Search<'_> {
    // Sums accumulate in index order, matching `net_utility` bit for bit.
    fn descend(&mut self, j: usize, utility: Money, spent: Money) {
        let g = utility - spent;
        if j == self.values.len() {
            if g > self.best.net_utility {
                self.best = PurchaseDecision {
                    selection: self.current.clone(),
                    total_spend: spent,
                    net_utility: g,
                };
            }
            return;
        }
        let incumbent = self.best.net_utility;
        if g + self.suffix_gain[j] < incumbent - BOUND_SLACK * (1.0 + incumbent.abs()) {
            return;
        }
        // x_j = 0 before x_j = 1 visits leaves in lexicographic order
        self.descend(j + 1, utility, spent);
        let with_j = spent + self.prices[j];
        if with_j <= self.budget {
            self.current[j] = true;
            self.descend(j + 1, utility + self.values[j], with_j);
            self.current[j] = false;
        }
    }
}

fn enumerate(u: &UtilityFunction, prices: &[Money], budget: Money) -> PurchaseDecision {
    let n = u.len();
    let mut best = PurchaseDecision::empty(n);
    for rank in 0..1usize << n {
        // rank's most significant bit is selection index 0
        let mask = (0..n).filter(|&j| rank >> (n - 1 - j) & 1 == 1).fold(0, |m, j| m | 1 << j);
        let spent = spend_mask(mask, prices);
        if spent > budget {
            continue;
        }
        let g = u.value_mask(mask) - spent;
        if g > best.net_utility {
            best = PurchaseDecision { selection: from_mask(mask, n), total_spend: spent, net_utility: g };
        }
    }
    best
}

/// A dataset arriving at index `new_index` of a market whose other
/// listings are already priced.
#[derive(Debug, Clone, Copy)]
pub struct Arrival<'a> {
    /// Utility over all listings including the new one.
    pub utility: &'a UtilityFunction,
    /// Prices over all listings; the entry at `new_index` is ignored.
    pub prices: &'a [Money],
    pub budget: Money,
    /// Optimal decision for the market without the new listing.
    pub prior: &'a PurchaseDecision,
    pub new_index: usize,
}

/// Optimal decision before dataset `new_index` was listed, expressed over
/// the full index range (the new entry is unselected).
pub fn prior_decision(
    u: &UtilityFunction,
    prices: &[Money],
    budget: Money,
    new_index: usize,
) -> Result<PurchaseDecision> {
    check_inputs(u, prices, budget)?;
    let reduced = u.without(new_index)?;
    let mut old_prices = prices.to_vec();
    old_prices.remove(new_index);
    let mut decision = solve_purchase(&reduced, &old_prices, budget)?;
    decision.selection.insert(new_index, false);
    Ok(decision)
}

#[derive(Debug, Clone, Copy)]
struct OldBundle {
    /// `u(x + e_j)`
    utility_with_new: Money,
    /// `x^T p` over the old listings
    spend: Money,
}

/// A buyer's reaction to one arriving dataset.
#[derive(Debug, Clone)]
pub struct BuyerResponse {
    bundles: Vec<OldBundle>,
    prior_net: Money,
    surplus: Money,
    budget: Money,
    mwp: Money,
}

impl BuyerResponse {
    pub fn new(arrival: &Arrival<'_>) -> Result<Self> {
        let Arrival { utility, prices, budget, prior, new_index } = *arrival;
        let n = utility.len();
        if new_index >= n {
            return Err(Error::Dimension { expected: n, found: new_index + 1 });
        }
        if prior.selection.len() != n {
            return Err(Error::Dimension { expected: n, found: prior.selection.len() });
        }
        if prior.selection[new_index] {
            return Err(Error::param("prior decision already contains the new dataset"));
        }
        if n - 1 > MAX_EXHAUSTIVE {
            return Err(Error::Size { n: n - 1, max: MAX_EXHAUSTIVE });
        }
        let mut old_prices = prices.to_vec();
        old_prices[new_index] = 0.0;
        check_inputs(utility, &old_prices, budget)?;

        let prior_mask = to_mask(&prior.selection);
        let prior_spend = spend_mask(prior_mask, &old_prices);
        let prior_net = utility.value_mask(prior_mask) - prior_spend;
        let surplus = budget - prior_spend;

        let mut bundles = Vec::new();
        let mut mwp: Money = 0.0;
        for m in 0..1usize << (n - 1) {
            let mask = insert_zero_bit(m, new_index);
            let spend = spend_mask(mask, &old_prices);
            if spend > budget || utility.value_mask(mask) - spend < 0.0 {
                continue;
            }
            let bundle = OldBundle { utility_with_new: utility.value_mask(mask | 1 << new_index), spend };
            let marginal = bundle.utility_with_new - spend - prior_net;
            mwp = mwp.max(marginal.max(0.0).min(surplus));
            bundles.push(bundle);
        }
        Ok(BuyerResponse { bundles, prior_net, surplus, budget, mwp })
    }

    /// Maximum willingness to pay for the new dataset.
    pub fn mwp(&self) -> Money {
        self.mwp
    }

    /// Net utility of the prior optimum.
    pub fn prior_net_utility(&self) -> Money {
        self.prior_net
    }

    /// Budget left over by the prior optimum.
    pub fn budget_surplus(&self) -> Money {
        self.surplus
    }

    /// Purchase test at price `price`: some previously feasible bundle plus
    /// the new dataset strictly beats the prior optimum, fits the budget, and
    /// the price is covered by the prior optimum's budget surplus.
    pub fn will_purchase(&self, price: Money) -> bool {
        if price > self.surplus {
            return false;
        }
        self.bundles.iter().any(|b| {
            let cost = b.spend + price;
            b.utility_with_new - cost > self.prior_net && cost <= self.budget
        })
    }

    /// Purchase indicator used for seller revenue: [`Self::will_purchase`],
    /// plus a sale when the price sits exactly at a positive MWP.
    pub fn purchases_at(&self, price: Money) -> bool {
        self.will_purchase(price) || (self.mwp > 0.0 && price <= self.mwp)
    }
}

/// Whether the buyer described by `arrival` buys the new dataset at `price`.
pub fn will_purchase(arrival: &Arrival<'_>, price: Money) -> Result<bool> {
    if !(price >= 0.0 && price.is_finite()) {
        return Err(Error::param(format!("price must be finite and >= 0, got {price}")));
    }
    Ok(BuyerResponse::new(arrival)?.will_purchase(price))
}

/// `max_x min{ du(x)^+, db }` over bundles feasible before the arrival, where
/// `du(x)` is the net-utility gain of adding the new dataset for free to `x`
/// and `db` is the prior optimum's budget surplus.
pub fn max_willingness_to_pay(arrival: &Arrival<'_>) -> Result<Money> {
    Ok(BuyerResponse::new(arrival)?.mwp())
}
