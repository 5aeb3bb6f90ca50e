//! Seeded instance generators and brute-force oracles shared by the
//! integration tests and the acceptance suite.
#![allow(dead_code)]

use fairshare_core::dynamics::{participation_bound_check, BoundCheck, ParticipationModel};
use fairshare_core::royalty::{solve_fractional, RoyaltyBuyer, RoyaltyProblem};
use fairshare_core::seller::{PricingBuyer, PricingProblem};
use fairshare_core::UtilityFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sum_in_order(values: &[f64], mask: usize) -> f64 {
    let mut acc = 0.0;
    for (j, v) in values.iter().enumerate() {
        if mask >> j & 1 == 1 {
            acc += v;
        }
    }
    acc
}

fn selection(mask: usize, n: usize) -> Vec<bool> {
    (0..n).map(|j| mask >> j & 1 == 1).collect()
}

/// Random utility over `n` datasets: additive, or (when `tabulated`) an
/// additive base with pairwise complement/substitute noise.
pub fn random_utility(rng: &mut ChaCha8Rng, n: usize, tabulated: bool) -> UtilityFunction {
    let base: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.0)).collect();
    if !tabulated {
        return UtilityFunction::additive(base);
    }
    let mut values = vec![0.0; 1 << n];
    for (mask, v) in values.iter_mut().enumerate().skip(1) {
        let noise = rng.random_range(-0.3..0.3) * (mask.count_ones() as f64 - 1.0);
        *v = (sum_in_order(&base, mask) + noise).max(0.0);
    }
    UtilityFunction::tabulated(n, values).unwrap()
}

pub fn random_prices(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..2.0)).collect()
}

/// Best net utility over every bundle that fits the budget.
pub fn exhaustive_best(u: &UtilityFunction, prices: &[f64], budget: f64) -> f64 {
    let n = u.len();
    (0..1usize << n)
        .filter(|&m| sum_in_order(prices, m) <= budget)
        .map(|m| u.value(&selection(m, n)).unwrap() - sum_in_order(prices, m))
        .fold(0.0, f64::max)
}

/// Lexicographically smallest optimal bundle over the old listings, as a
/// mask, together with its net utility and spend.
fn prior_optimum(u: &UtilityFunction, old_prices: &[f64], budget: f64) -> (usize, f64, f64) {
    let n = old_prices.len();
    let full = |m: usize| selection(m, n + 1);
    let mut masks: Vec<usize> = (0..1usize << n).collect();
    // lexicographic order on selection vectors with index 0 most significant
    masks.sort_by_key(|&m| (0..n).map(|j| m >> j & 1).collect::<Vec<_>>());
    let mut best = (0usize, 0.0, 0.0);
    for m in masks {
        let spend = sum_in_order(old_prices, m);
        if spend > budget {
            continue;
        }
        let g = u.value(&full(m)).unwrap() - spend;
        if g > best.1 {
            best = (m, g, spend);
        }
    }
    best
}

/// Brute-force maximum willingness to pay for the dataset appended last.
pub fn oracle_mwp(u: &UtilityFunction, old_prices: &[f64], budget: f64) -> f64 {
    let n = old_prices.len();
    let (_, prior_net, prior_spend) = prior_optimum(u, old_prices, budget);
    let surplus = budget - prior_spend;
    let mut mwp: f64 = 0.0;
    for m in 0..1usize << n {
        let spend = sum_in_order(old_prices, m);
        let g_old = u.value(&selection(m, n + 1)).unwrap() - spend;
        if spend > budget || g_old < 0.0 {
            continue;
        }
        let gain = u.value(&selection(m | 1 << n, n + 1)).unwrap() - spend - prior_net;
        mwp = mwp.max(gain.max(0.0).min(surplus));
    }
    mwp
}

/// Whether the buyer strictly gains from buying the new dataset at `price`
/// with some previously feasible bundle, within budget and within the prior
/// optimum's surplus.
pub fn oracle_buys(u: &UtilityFunction, old_prices: &[f64], budget: f64, price: f64) -> bool {
    let n = old_prices.len();
    let (_, prior_net, prior_spend) = prior_optimum(u, old_prices, budget);
    if price > budget - prior_spend {
        return false;
    }
    (0..1usize << n).any(|m| {
        let spend = sum_in_order(old_prices, m);
        let old_ok = spend <= budget && u.value(&selection(m, n + 1)).unwrap() - spend >= 0.0;
        let with_new = u.value(&selection(m | 1 << n, n + 1)).unwrap() - spend - price;
        old_ok && with_new > prior_net && spend + price <= budget
    })
}

/// Random market of `m` buyers facing `n` listed datasets plus a new one.
pub fn pricing_instance(rng: &mut ChaCha8Rng, m: usize, n: usize) -> PricingProblem {
    let old_prices = random_prices(rng, n);
    let buyers = (0..m)
        .map(|k| PricingBuyer {
            buyer_id: format!("b{k}"),
            utility: random_utility(rng, n + 1, false),
            budget: rng.random_range(0.0..=old_prices.iter().sum::<f64>() + 2.0),
        })
        .collect();
    PricingProblem { old_prices, buyers, cost: rng.random_range(0.0..1.0) }
}

/// Seller profit at `price` with buyers deciding by [`oracle_buys`].
pub fn oracle_profit(problem: &PricingProblem, price: f64) -> f64 {
    let sold = problem
        .buyers
        .iter()
        .filter(|b| oracle_buys(&b.utility, &problem.old_prices, b.budget, price))
        .count();
    price * sold as f64 - problem.cost
}

pub fn royalty_instance(rng: &mut ChaCha8Rng, m: usize, n: usize) -> RoyaltyProblem {
    let old_rates: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.3)).collect();
    let buyers = (0..m)
        .map(|k| RoyaltyBuyer {
            buyer_id: format!("b{k}"),
            utility: random_utility(rng, n + 1, false),
            cap: rng.random_range(0.1..0.95),
        })
        .collect();
    RoyaltyProblem { old_rates, buyers, cost: 0.0 }
}

/// Royalty revenue at `rate` with every buyer re-solving its full problem.
pub fn oracle_royalty_revenue(problem: &RoyaltyProblem, rate: f64) -> f64 {
    let n = problem.old_rates.len();
    let mut rates = problem.old_rates.clone();
    rates.push(rate);
    problem
        .buyers
        .iter()
        .map(|b| {
            let d = solve_fractional(&b.utility, &rates, b.cap).unwrap();
            if d.selection[n] {
                rate * b.utility.value(&d.selection).unwrap()
            } else {
                0.0
            }
        })
        .sum()
}

/// Best royalty revenue found by scanning a grid and bisecting every
/// downward jump to its left limit.
pub fn bisection_best_revenue(problem: &RoyaltyProblem) -> f64 {
    const STEPS: usize = 4000;
    let top = 1.0 - 1e-9;
    let rev = |a: f64| oracle_royalty_revenue(problem, a);
    let first = top / STEPS as f64;
    let mut prev = (first, rev(first));
    let mut best = prev.1;
    for i in 2..=STEPS {
        let a = top * i as f64 / STEPS as f64;
        let r = rev(a);
        best = best.max(r);
        if r < prev.1 - 1e-12 {
            // revenue is `a * K` on each piece; find where the slope K ends
            let slope = prev.1 / prev.0;
            let (mut lo, mut hi) = (prev.0, a);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if (rev(mid) - slope * mid).abs() <= 1e-9 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            best = best.max(rev(lo));
        }
        prev = (a, r);
    }
    best
}

/// Random below-fair price sequence: `p*` in `[0.5, 2]`, price ratio in `[0, 1]`.
pub fn exploitative_sequence(rng: &mut ChaCha8Rng, len: usize) -> (Vec<f64>, Vec<f64>) {
    let p_star: Vec<f64> = (0..len).map(|_| rng.random_range(0.5..2.0)).collect();
    let prices = p_star.iter().map(|p| p * rng.random_range(0.0..=1.0)).collect();
    (prices, p_star)
}

pub fn bound_check(prices: &[f64], p_star: &[f64]) -> BoundCheck {
    participation_bound_check(prices, p_star, &ParticipationModel::Ratio).unwrap()
}
