//! Domain types shared by the solvers and the dynamics engine.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::outcome::OutcomeMapping;
use crate::valuation::ValuationSource;

/// A single unnamed currency unit.
pub type Money = f64;

/// Largest dataset count for which set functions are tabulated or enumerated.
pub const MAX_EXHAUSTIVE: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetListing {
    pub dataset_id: String,
    pub seller_id: String,
    pub cost: Money,
    pub price: Option<Money>,
    /// Utility of this dataset alone, keyed by buyer id.
    pub per_buyer_utility: BTreeMap<String, Money>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuyerProfile {
    pub buyer_id: String,
    pub budget: Money,
    pub mapping: OutcomeMapping,
    pub valuation_source: ValuationSource,
}

/// A buyer's bundle choice over the current listings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurchaseDecision {
    pub selection: Vec<bool>,
    pub total_spend: Money,
    pub net_utility: Money,
}

impl PurchaseDecision {
    pub fn empty(len: usize) -> Self {
        PurchaseDecision {
            selection: vec![false; len],
            total_spend: 0.0,
            net_utility: 0.0,
        }
    }

    pub fn count(&self) -> usize {
        self.selection.iter().filter(|&&s| s).count()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.selection.get(j).copied().unwrap_or(false)
    }
}

/// Bundle utility `u(x)`.
///
/// The additive form sums per-dataset utilities. The tabulated form stores
/// an explicit value for every subset, indexed by bitmask (bit `j` set when
/// dataset `j` is selected), and is limited to [`MAX_EXHAUSTIVE`] datasets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum UtilityFunction {
    Additive(Vec<Money>),
    Tabulated(TabulatedUtility),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedUtility {
    len: usize,
    values: Vec<Money>,
}

impl TabulatedUtility {
    pub fn new(len: usize, values: Vec<Money>) -> Result<Self> {
        if len > MAX_EXHAUSTIVE {
            return Err(Error::Size { n: len, max: MAX_EXHAUSTIVE });
        }
        if values.len() != 1 << len {
            return Err(Error::Dimension { expected: 1 << len, found: values.len() });
        }
        if values[0] != 0.0 {
            return Err(Error::param("tabulated utility of the empty bundle must be 0"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("tabulated utilities must be finite"));
        }
        Ok(TabulatedUtility { len, values })
    }

    pub fn values(&self) -> &[Money] {
        &self.values
    }
}

impl UtilityFunction {
    pub fn additive(values: impl Into<Vec<Money>>) -> Self {
        UtilityFunction::Additive(values.into())
    }

    pub fn tabulated(len: usize, values: Vec<Money>) -> Result<Self> {
        TabulatedUtility::new(len, values).map(UtilityFunction::Tabulated)
    }

    pub fn len(&self) -> usize {
        match self {
            UtilityFunction::Additive(v) => v.len(),
            UtilityFunction::Tabulated(t) => t.len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_additive(&self) -> bool {
        matches!(self, UtilityFunction::Additive(_))
    }

    /// `u(x)` for a selection vector.
    pub fn value(&self, selection: &[bool]) -> Result<Money> {
        check_len(self.len(), selection.len())?;
        Ok(match self {
            UtilityFunction::Additive(v) => v
                .iter()
                .zip(selection)
                .filter(|(_, &s)| s)
                .fold(0.0, |acc, (u, _)| acc + u),
            UtilityFunction::Tabulated(t) => t.values[to_mask(selection)],
        })
    }

    /// `u(x)` for a bitmask; summation order matches [`Self::value`].
    pub(crate) fn value_mask(&self, mask: usize) -> Money {
        match self {
            UtilityFunction::Additive(v) => {
                let mut acc = 0.0;
                for (j, u) in v.iter().enumerate() {
                    if mask >> j & 1 == 1 {
                        acc += u;
                    }
                }
                acc
            }
            UtilityFunction::Tabulated(t) => t.values[mask],
        }
    }

    /// Same utility with dataset `j` removed; later indices shift down.
    pub fn without(&self, j: usize) -> Result<UtilityFunction> {
        let n = self.len();
        if j >= n {
            return Err(Error::Dimension { expected: n, found: j + 1 });
        }
        Ok(match self {
            UtilityFunction::Additive(v) => {
                let mut v = v.clone();
                v.remove(j);
                UtilityFunction::Additive(v)
            }
            UtilityFunction::Tabulated(t) => {
                let values = (0..1usize << (n - 1))
                    .map(|mask| t.values[insert_zero_bit(mask, j)])
                    .collect();
                UtilityFunction::Tabulated(TabulatedUtility { len: n - 1, values })
            }
        })
    }

    /// Explicit subset table of this utility.
    pub fn to_tabulated(&self) -> Result<UtilityFunction> {
        let n = self.len();
        if n > MAX_EXHAUSTIVE {
            return Err(Error::Size { n, max: MAX_EXHAUSTIVE });
        }
        let values = (0..1usize << n).map(|m| self.value_mask(m)).collect();
        UtilityFunction::tabulated(n, values)
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension { expected, found });
    }
    Ok(())
}

pub(crate) fn to_mask(selection: &[bool]) -> usize {
    selection
        .iter()
        .enumerate()
        .filter(|(_, &s)| s)
        .fold(0, |m, (j, _)| m | 1 << j)
}

pub(crate) fn from_mask(mask: usize, len: usize) -> Vec<bool> {
    (0..len).map(|j| mask >> j & 1 == 1).collect()
}

/// Spreads `mask` so that bit position `j` is zero.
pub(crate) fn insert_zero_bit(mask: usize, j: usize) -> usize {
    let low = mask & ((1 << j) - 1);
    let high = (mask >> j) << (j + 1);
    high | low
}

/// `x^T p`, summed in index order.
pub fn spend(selection: &[bool], prices: &[Money]) -> Result<Money> {
    check_len(prices.len(), selection.len())?;
    Ok(selection
        .iter()
        .zip(prices)
        .filter(|(&s, _)| s)
        .fold(0.0, |acc, (_, p)| acc + p))
}

pub(crate) fn spend_mask(mask: usize, prices: &[Money]) -> Money {
    let mut acc = 0.0;
    for (j, p) in prices.iter().enumerate() {
        if mask >> j & 1 == 1 {
            acc += p;
        }
    }
    acc
}

/// Net utility `g(x) = u(x) - x^T p`.
pub fn net_utility(u: &UtilityFunction, selection: &[bool], prices: &[Money]) -> Result<Money> {
    check_len(u.len(), prices.len())?;
    Ok(u.value(selection)? - spend(selection, prices)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    pub time: usize,
    pub listings: Vec<DatasetListing>,
    pub buyers: Vec<BuyerProfile>,
    pub price_vector: Vec<Option<Money>>,
}

impl MarketState {
    /// Builds a state whose price vector mirrors the listings' posted prices.
    pub fn new(time: usize, listings: Vec<DatasetListing>, buyers: Vec<BuyerProfile>) -> Self {
        let price_vector = listings.iter().map(|l| l.price).collect();
        MarketState { time, listings, buyers, price_vector }
    }

    pub fn prices(&self) -> Result<Vec<Money>> {
        check_len(self.listings.len(), self.price_vector.len())?;
        self.price_vector
            .iter()
            .zip(&self.listings)
            .map(|(p, l)| p.ok_or_else(|| Error::UnsetPrice(l.dataset_id.clone())))
            .collect()
    }

    /// Additive utility of `buyer_id` over the listings; absent entries count as zero.
    pub fn utility_for(&self, buyer_id: &str) -> UtilityFunction {
        UtilityFunction::Additive(
            self.listings
                .iter()
                .map(|l| l.per_buyer_utility.get(buyer_id).copied().unwrap_or(0.0))
                .collect(),
        )
    }

    pub fn net_utility(&self, buyer_id: &str, selection: &[bool]) -> Result<Money> {
        let prices = self.prices()?;
        net_utility(&self.utility_for(buyer_id), selection, &prices)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    PriceVectorLength { listings: usize, prices: usize },
    UnsetPrice { dataset_id: String },
    NegativePrice { dataset_id: String, price: Money },
    NegativeCost { dataset_id: String, cost: Money },
    InvalidUtility { dataset_id: String, buyer_id: String, utility: Money },
    InvalidBudget { buyer_id: String, budget: Money },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::PriceVectorLength { listings, prices } => {
                write!(f, "price vector has {prices} entries for {listings} listings")
            }
            Violation::UnsetPrice { dataset_id } => write!(f, "listing {dataset_id} has no price"),
            Violation::NegativePrice { dataset_id, price } => {
                write!(f, "listing {dataset_id} has negative price {price}")
            }
            Violation::NegativeCost { dataset_id, cost } => {
                write!(f, "listing {dataset_id} has negative cost {cost}")
            }
            Violation::InvalidUtility { dataset_id, buyer_id, utility } => {
                write!(f, "listing {dataset_id} has invalid utility {utility} for buyer {buyer_id}")
            }
            Violation::InvalidBudget { buyer_id, budget } => {
                write!(f, "buyer {buyer_id} has invalid budget {budget}")
            }
        }
    }
}

/// Every invariant breach in `state`; an empty list means the state is valid.
pub fn validate_market(state: &MarketState) -> Vec<Violation> {
    let mut out = Vec::new();
    if state.price_vector.len() != state.listings.len() {
        out.push(Violation::PriceVectorLength {
            listings: state.listings.len(),
            prices: state.price_vector.len(),
        });
    }
    for (j, listing) in state.listings.iter().enumerate() {
        let id = &listing.dataset_id;
        if !(listing.cost >= 0.0 && listing.cost.is_finite()) {
            out.push(Violation::NegativeCost { dataset_id: id.clone(), cost: listing.cost });
        }
        match state.price_vector.get(j).copied().flatten() {
            None => out.push(Violation::UnsetPrice { dataset_id: id.clone() }),
            Some(p) if !(p >= 0.0 && p.is_finite()) => {
                out.push(Violation::NegativePrice { dataset_id: id.clone(), price: p })
            }
            Some(_) => {}
        }
        for (buyer_id, &u) in &listing.per_buyer_utility {
            if !(u >= 0.0 && u.is_finite()) {
                out.push(Violation::InvalidUtility {
                    dataset_id: id.clone(),
                    buyer_id: buyer_id.clone(),
                    utility: u,
                });
            }
        }
    }
    for buyer in &state.buyers {
        if !(buyer.budget >= 0.0 && buyer.budget.is_finite()) {
            out.push(Violation::InvalidBudget {
                buyer_id: buyer.buyer_id.clone(),
                budget: buyer.budget,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn listing(id: &str, price: Option<f64>) -> DatasetListing {
        DatasetListing {
            dataset_id: id.into(),
            seller_id: format!("s-{id}"),
            cost: 0.0,
            price,
            per_buyer_utility: [("b1".to_string(), 1.0), ("b2".to_string(), 2.0)].into(),
        }
    }

    fn buyer(id: &str, budget: f64) -> BuyerProfile {
        BuyerProfile {
            buyer_id: id.into(),
            budget,
            mapping: OutcomeMapping::Linear { gamma: 1.0, beta: 0.0 },
            valuation_source: ValuationSource::Constant,
        }
    }

    #[test]
    fn net_utility_examples() {
        let u = UtilityFunction::additive(vec![3.0, 2.0]);
        assert_eq!(net_utility(&u, &[true, false], &[1.0, 1.5]).unwrap(), 2.0);
        assert_eq!(net_utility(&u, &[true, true], &[1.0, 1.5]).unwrap(), 2.5);
        assert_eq!(net_utility(&u, &[false, false], &[7.0, 9.0]).unwrap(), 0.0);
    }

    #[test]
    fn net_utility_rejects_length_mismatch() {
        let u = UtilityFunction::additive(vec![3.0, 2.0]);
        assert!(matches!(
            net_utility(&u, &[true], &[1.0, 1.5]),
            Err(Error::Dimension { expected: 2, found: 1 })
        ));
        assert!(matches!(
            net_utility(&u, &[true, false], &[1.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn unset_price_is_an_error_when_evaluating() {
        let state = MarketState::new(0, vec![listing("d1", Some(1.0)), listing("d2", None)], vec![]);
        match state.net_utility("b1", &[true, false]) {
            Err(Error::UnsetPrice(id)) => assert_eq!(id, "d2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn validate_well_formed_state() {
        let state = MarketState::new(
            0,
            vec![listing("d1", Some(1.0)), listing("d2", Some(0.5))],
            vec![buyer("b1", 3.0), buyer("b2", 1.0)],
        );
        assert!(validate_market(&state).is_empty());
    }

    #[test]
    fn validate_reports_unset_price_and_bad_budget() {
        let state = MarketState::new(
            0,
            vec![listing("d1", Some(1.0)), listing("d2", None)],
            vec![buyer("b1", 3.0)],
        );
        assert_eq!(
            validate_market(&state),
            vec![Violation::UnsetPrice { dataset_id: "d2".into() }]
        );

        let state = MarketState::new(0, vec![listing("d1", Some(1.0))], vec![buyer("b1", -1.0)]);
        assert_eq!(
            validate_market(&state),
            vec![Violation::InvalidBudget { buyer_id: "b1".into(), budget: -1.0 }]
        );
    }

    #[test]
    fn validate_reports_length_mismatch() {
        let mut state = MarketState::new(0, vec![listing("d1", Some(1.0))], vec![]);
        state.price_vector.push(Some(2.0));
        assert_eq!(
            validate_market(&state),
            vec![Violation::PriceVectorLength { listings: 1, prices: 2 }]
        );
    }

    #[test]
    fn tabulated_rejects_nonzero_empty_bundle() {
        assert!(UtilityFunction::tabulated(1, vec![0.5, 1.0]).is_err());
        assert!(UtilityFunction::tabulated(2, vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn removing_an_item_from_a_table() {
        // u over 3 items, bit j = item j
        let table: Vec<f64> = (0..8).map(|m| m as f64).collect();
        let mut table = table;
        table[0] = 0.0;
        let u = UtilityFunction::tabulated(3, table).unwrap();
        let r = u.without(1).unwrap();
        // remaining items are old 0 and old 2
        assert_eq!(r.value(&[true, false]).unwrap(), 1.0);
        assert_eq!(r.value(&[false, true]).unwrap(), 4.0);
        assert_eq!(r.value(&[true, true]).unwrap(), 5.0);
    }

    #[test]
    fn additive_and_tabulated_agree_exhaustively() {
        for n in 0..=10usize {
            let values: Vec<f64> = (0..n).map(|j| 0.25 + j as f64 * 0.37).collect();
            let add = UtilityFunction::additive(values.clone());
            let tab = add.to_tabulated().unwrap();
            for mask in 0..1usize << n {
                let sel = from_mask(mask, n);
                let direct: f64 = values.iter().zip(&sel).filter(|(_, &s)| s).map(|(v, _)| v).sum();
                assert_eq!(add.value(&sel).unwrap(), tab.value(&sel).unwrap());
                assert!((add.value(&sel).unwrap() - direct).abs() < 1e-12);
            }
        }
    }
}
