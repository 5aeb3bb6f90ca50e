//! Repeated-game dynamics: participation attrition, pricing strategies,
//! the multi-seller scenario runner and single-pair horizon analysis.

mod horizon;
mod participation;
mod scenario;
mod strategy;

pub use horizon::{
    check_assumptions, constant_price_value, fairshare_price_single, horizon_optimal_price,
    participation_bound_check, price_grid_to, threshold_partial_sums, tradeoff_threshold, AssumptionReport,
    AssumptionViolation, BoundCheck, HorizonPolicyResult,
};
pub use participation::{ParticipationModel, ParticipationState};
pub use scenario::{
    buyer_id, run_scenario, seller_id, step_market, BuyerStep, DynamicsState, ScenarioRng, SellerStep,
    SimulationTrace, StepRecord,
};
pub use strategy::PricingStrategy;
