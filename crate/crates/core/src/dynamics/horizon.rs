//! Single buyer-seller analysis of the repeated game with a stationary
//! utility `u` and budget `b`.

use serde::{Deserialize, Serialize};

use super::ParticipationModel;
use crate::error::{Error, Result};
use crate::market::Money;

/// `min{u, b}`: the fairshare price when one buyer faces one seller.
pub fn fairshare_price_single(u: Money, b: Money) -> Money {
    u.min(b)
}

/// `0, step, 2 step, ...` up to `p_star`, whose last point is exactly `p_star`.
pub fn price_grid_to(p_star: Money, step: f64) -> Result<Vec<Money>> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::param(format!("grid step must be positive, got {step}")));
    }
    if !(p_star >= 0.0 && p_star.is_finite()) {
        return Err(Error::param(format!("fairshare price must be finite and >= 0, got {p_star}")));
    }
    let n = (p_star / step).round() as usize;
    let mut grid: Vec<Money> = (0..=n).map(|i| i as f64 * step).filter(|&p| p < p_star).collect();
    grid.push(p_star);
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonPolicyResult {
    pub horizon: usize,
    pub price: Money,
    /// Expected discounted buyer utility over the horizon at `price`.
    pub value: f64,
}

/// `sum_{t<T} delta^t pi^t (u - p)` for a constant price `p`.
pub fn constant_price_value(u: Money, p: Money, p_star: Money, delta: f64, participation: &ParticipationModel, horizon: usize) -> f64 {
    let pi = participation.pi(p, p_star);
    let mut weight = 1.0;
    let mut total = 0.0;
    for _ in 0..horizon {
        total += weight * (u - p);
        weight *= delta * pi;
    }
    total
}

/// Best constant price on `grid` for a horizon of `horizon` periods; ties go to the higher price.
pub fn horizon_optimal_price(
    u: Money,
    b: Money,
    delta: f64,
    participation: &ParticipationModel,
    horizon: usize,
    grid: &[Money],
) -> Result<HorizonPolicyResult> {
    if grid.is_empty() {
        return Err(Error::param("price grid is empty"));
    }
    let p_star = fairshare_price_single(u, b);
    if let Some(p) = grid.iter().find(|&&p| !(0.0..=p_star).contains(&p)) {
        return Err(Error::param(format!("grid price {p} lies outside [0, {p_star}]")));
    }
    let mut best: Option<HorizonPolicyResult> = None;
    for &price in grid {
        let value = constant_price_value(u, price, p_star, delta, participation, horizon);
        let better = match best {
            None => true,
            Some(b) => value > b.value || (value == b.value && price > b.price),
        };
        if better {
            best = Some(HorizonPolicyResult { horizon, price, value });
        }
    }
    Ok(best.expect("grid is non-empty"))
}

/// Partial sums `S_T = sum_{t<=T} delta^t [(u_t - p*_t) - P_t (u_t - p_t)]`
/// for `T = 0..=cap`, with `P_0 = 1` and `P_{t+1} = P_t pi(p_t, p*_t)`.
pub fn threshold_partial_sums(
    u: &[Money],
    p_star: &[Money],
    prices: &[Money],
    participation: &ParticipationModel,
    delta: f64,
    cap: usize,
) -> Result<Vec<f64>> {
    for (name, s) in [("utility", u), ("fairshare price", p_star), ("price", prices)] {
        if s.len() <= cap {
            return Err(Error::param(format!("{name} sequence has {} entries, need {}", s.len(), cap + 1)));
        }
    }
    let mut sums = Vec::with_capacity(cap + 1);
    let (mut total, mut discount, mut survival) = (0.0, 1.0, 1.0);
    for t in 0..=cap {
        total += discount * ((u[t] - p_star[t]) - survival * (u[t] - prices[t]));
        sums.push(total);
        discount *= delta;
        survival *= participation.pi(prices[t], p_star[t]);
    }
    Ok(sums)
}

/// Largest `T <= cap` whose partial sum is `<= 0`, or `-1` if none is.
pub fn tradeoff_threshold(
    u: &[Money],
    p_star: &[Money],
    prices: &[Money],
    participation: &ParticipationModel,
    delta: f64,
    cap: usize,
) -> Result<i64> {
    let sums = threshold_partial_sums(u, p_star, prices, participation, delta, cap)?;
    Ok(sums.iter().rposition(|&s| s <= 0.0).map_or(-1, |t| t as i64))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    /// `P_T = prod pi_t`
    pub survival: f64,
    /// `S_T = sum (1 - pi_t)`
    pub shortfall: f64,
    /// Whether `P_T <= exp(-S_T)` within `1e-12`.
    pub holds: bool,
    /// `P_1, ..., P_T`
    pub trajectory: Vec<f64>,
}

/// Survival probability of a seller facing `prices` against `p_star` and the
/// `exp(-S)` bound on it.
pub fn participation_bound_check(
    prices: &[Money],
    p_star: &[Money],
    participation: &ParticipationModel,
) -> Result<BoundCheck> {
    if prices.len() != p_star.len() {
        return Err(Error::Dimension { expected: p_star.len(), found: prices.len() });
    }
    let mut survival = 1.0;
    let mut shortfall = 0.0;
    let mut trajectory = Vec::with_capacity(prices.len());
    for (&p, &ps) in prices.iter().zip(p_star) {
        if p > ps {
            return Err(Error::param(format!("price {p} exceeds fairshare price {ps}")));
        }
        let pi = participation.pi(p, ps);
        survival *= pi;
        shortfall += 1.0 - pi;
        trajectory.push(survival);
    }
    Ok(BoundCheck { survival, shortfall, holds: survival <= (-shortfall).exp() + 1e-12, trajectory })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AssumptionViolation {
    /// `pi(0, p*) != 0` or `pi(p*, p*) != 1`.
    Boundary { at_ratio: f64, expected: f64, found: f64 },
    NotIncreasing,
    /// `delta < 1 / (1 + L min(u - p*))`.
    Discount { delta: f64, bound: f64 },
    Inputs(String),
}

impl std::fmt::Display for AssumptionViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AssumptionViolation::Boundary { at_ratio, expected, found } => {
                write!(f, "participation at price ratio {at_ratio} is {found}, expected {expected}")
            }
            AssumptionViolation::NotIncreasing => write!(f, "participation is not strictly increasing in price"),
            AssumptionViolation::Discount { delta, bound } => {
                write!(f, "discount factor {delta} is below the required {bound}")
            }
            AssumptionViolation::Inputs(msg) => write!(f, "{msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionReport {
    pub lipschitz: f64,
    pub min_gap: f64,
    pub delta_bound: f64,
    pub violations: Vec<AssumptionViolation>,
}

impl AssumptionReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the participation curve's boundary values and monotonicity and
/// the discount condition `delta >= 1 / (1 + L min_t (u_t - p*_t))` for the
/// per-period utilities and budgets given.
pub fn check_assumptions(
    participation: &ParticipationModel,
    utilities: &[Money],
    budgets: &[Money],
    delta: f64,
) -> AssumptionReport {
    let mut violations = Vec::new();
    for (r, expected) in [(0.0, 0.0), (1.0, 1.0)] {
        let found = participation.at_ratio(r);
        if found != expected {
            violations.push(AssumptionViolation::Boundary { at_ratio: r, expected, found });
        }
    }
    if let ParticipationModel::Tabulated { points } = participation {
        if points.windows(2).any(|w| w[1][0] <= w[0][0] || w[1][1] <= w[0][1]) {
            violations.push(AssumptionViolation::NotIncreasing);
        }
    }
    if !(delta > 0.0 && delta < 1.0) {
        violations.push(AssumptionViolation::Inputs(format!("discount factor {delta} is outside (0, 1)")));
    }
    if utilities.is_empty() || utilities.len() != budgets.len() {
        violations.push(AssumptionViolation::Inputs(format!(
            "need equal, non-empty utility and budget sequences, got {} and {}",
            utilities.len(),
            budgets.len()
        )));
        return AssumptionReport { lipschitz: f64::NAN, min_gap: f64::NAN, delta_bound: f64::NAN, violations };
    }
    let p_star: Vec<Money> = utilities.iter().zip(budgets).map(|(&u, &b)| fairshare_price_single(u, b)).collect();
    let max_p_star = p_star.iter().copied().fold(0.0, f64::max);
    let min_gap = utilities.iter().zip(&p_star).map(|(u, p)| u - p).fold(f64::INFINITY, f64::min);
    let lipschitz = if max_p_star > 0.0 { participation.lipschitz_lower(max_p_star) } else { 0.0 };
    let delta_bound = 1.0 / (1.0 + lipschitz * min_gap);
    if delta.partial_cmp(&delta_bound).is_none_or(|o| o.is_lt()) || min_gap <= 0.0 {
        violations.push(AssumptionViolation::Discount { delta, bound: delta_bound });
    }
    AssumptionReport { lipschitz, min_gap, delta_bound, violations }
}
