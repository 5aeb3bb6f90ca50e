use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market::Money;

/// Probability that a seller stays in the market after posting `price`
/// when its fairshare price was `p_star`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ParticipationModel {
    /// `pi = p / p*`.
    Ratio,
    /// Piecewise-linear curve over the price ratio `p / p*`, as `[ratio, pi]` points.
    Tabulated { points: Vec<[f64; 2]> },
}

impl ParticipationModel {
    /// Shape checks done at load time: ratios strictly increasing and
    /// covering `[0, 1]`, probabilities in `[0, 1]` and strictly increasing.
    /// Boundary values are left to [`super::check_assumptions`].
    pub fn validate(&self) -> Result<()> {
        let ParticipationModel::Tabulated { points } = self else { return Ok(()) };
        if points.len() < 2 {
            return Err(Error::config("participation curve needs at least two points"));
        }
        let first = points[0][0];
        let last = points[points.len() - 1][0];
        if first != 0.0 || last != 1.0 {
            return Err(Error::config(format!(
                "participation curve must span price ratios 0 to 1, got {first} to {last}"
            )));
        }
        for &[x, y] in points {
            if !x.is_finite() || !(0.0..=1.0).contains(&y) {
                return Err(Error::config(format!("participation point ({x}, {y}) is out of range")));
            }
        }
        for w in points.windows(2) {
            if w[1][0] <= w[0][0] {
                return Err(Error::config("participation curve ratios must be strictly increasing"));
            }
            if w[1][1] <= w[0][1] {
                return Err(Error::config(format!(
                    "participation curve is not strictly increasing between ratios {} and {}",
                    w[0][0], w[1][0]
                )));
            }
        }
        Ok(())
    }

    /// Participation at price ratio `r = p / p*`, with `r` clamped to `[0, 1]`.
    pub fn at_ratio(&self, r: f64) -> f64 {
        let r = r.clamp(0.0, 1.0);
        match self {
            ParticipationModel::Ratio => r,
            ParticipationModel::Tabulated { points } => {
                let i = points.partition_point(|p| p[0] <= r);
                if i == 0 {
                    return points[0][1];
                }
                if i == points.len() {
                    return points[i - 1][1];
                }
                let ([x0, y0], [x1, y1]) = (points[i - 1], points[i]);
                y0 + (y1 - y0) * (r - x0) / (x1 - x0)
            }
        }
    }

    /// `pi(price, p_star)`. A seller with no positive fairshare price is never pushed out.
    pub fn pi(&self, price: Money, p_star: Money) -> f64 {
        if p_star <= 0.0 {
            return 1.0;
        }
        // division keeps pi(p*, p*) exactly at the curve's end point
        self.at_ratio(price / p_star)
    }

    /// Lower Lipschitz constant in absolute price units, given the largest
    /// fairshare price in play.
    pub fn lipschitz_lower(&self, max_p_star: Money) -> f64 {
        let slope = match self {
            ParticipationModel::Ratio => 1.0,
            ParticipationModel::Tabulated { points } => points
                .windows(2)
                .map(|w| (w[1][1] - w[0][1]) / (w[1][0] - w[0][0]))
                .fold(f64::INFINITY, f64::min),
        };
        slope / max_p_star
    }
}

/// Survival of one seller across the repeated game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticipationState {
    pub seller_id: String,
    /// `P_t`, the product of participation probabilities so far.
    pub survival_product: f64,
    pub active: bool,
    pub exit_time: Option<usize>,
}

impl ParticipationState {
    pub fn new(seller_id: impl Into<String>) -> Self {
        ParticipationState { seller_id: seller_id.into(), survival_product: 1.0, active: true, exit_time: None }
    }

    pub(crate) fn apply(&mut self, pi: f64) {
        self.survival_product *= pi;
    }

    pub(crate) fn exit(&mut self, step: usize) {
        if self.active {
            self.active = false;
            self.exit_time = Some(step);
        }
    }
}
