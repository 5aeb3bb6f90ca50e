use anyhow::{bail, Context};
use clap::Args;
use fairshare_core::dynamics::{
    check_assumptions as check, horizon_optimal_price, price_grid_to, threshold_partial_sums, tradeoff_threshold,
    ParticipationModel,
};

use crate::failure::Failure;

#[derive(Debug, Args)]
pub struct ParticipationArg {
    /// Tabulated participation curve as `ratio:pi` pairs, e.g. `0:0,0.5:0.2,1:1`.
    /// Without it participation is the price ratio `p / p*`.
    #[arg(long)]
    curve: Option<String>,
}

impl ParticipationArg {
    pub fn model(&self) -> anyhow::Result<ParticipationModel> {
        let Some(curve) = &self.curve else { return Ok(ParticipationModel::Ratio) };
        let points = curve
            .split(',')
            .map(|pair| {
                let (x, y) = pair.split_once(':').with_context(|| format!("curve point `{pair}` is not ratio:pi"))?;
                Ok([x.trim().parse()?, y.trim().parse()?])
            })
            .collect::<anyhow::Result<Vec<[f64; 2]>>>()?;
        let model = ParticipationModel::Tabulated { points };
        model.validate()?;
        Ok(model)
    }
}

#[derive(Debug, Args)]
pub struct AssumptionArgs {
    /// Per-period utilities.
    #[arg(long, value_delimiter = ',', required = true)]
    utilities: Vec<f64>,
    /// Per-period budgets.
    #[arg(long, value_delimiter = ',', required = true)]
    budgets: Vec<f64>,
    #[arg(long)]
    delta: f64,
    #[command(flatten)]
    participation: ParticipationArg,
}

pub fn check_assumptions(args: &AssumptionArgs) -> Result<(), Failure> {
    let report = check(&args.participation.model()?, &args.utilities, &args.budgets, args.delta);
    println!("lipschitz {}", report.lipschitz);
    println!("min_gap {}", report.min_gap);
    println!("delta_bound {}", report.delta_bound);
    if report.ok() {
        println!("ok");
    }
    for v in &report.violations {
        println!("violation: {v}");
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct BellmanArgs {
    #[arg(long)]
    u: f64,
    #[arg(long)]
    b: f64,
    #[arg(long)]
    delta: f64,
    /// Spacing of the constant-price grid on `[0, p*]`.
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    /// Report horizons 1 through this value.
    #[arg(long, default_value_t = 10)]
    max_horizon: usize,
    #[command(flatten)]
    participation: ParticipationArg,
}

pub fn bellman(args: &BellmanArgs) -> Result<(), Failure> {
    if !(args.delta > 0.0 && args.delta < 1.0) {
        return Err(anyhow::anyhow!("delta must lie in (0, 1), got {}", args.delta).into());
    }
    let model = args.participation.model()?;
    let grid = price_grid_to(args.u.min(args.b), args.step)?;
    println!("horizon,price,value");
    for t in 1..=args.max_horizon {
        let r = horizon_optimal_price(args.u, args.b, args.delta, &model, t, &grid)?;
        println!("{},{},{}", r.horizon, r.price, r.value);
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct ThresholdArgs {
    #[arg(long)]
    u: f64,
    #[arg(long)]
    p_star: f64,
    /// Constant exploitative price.
    #[arg(long)]
    price: f64,
    #[arg(long)]
    delta: f64,
    #[arg(long, default_value_t = 200)]
    cap: usize,
    /// Also print every partial sum.
    #[arg(long)]
    sums: bool,
    #[command(flatten)]
    participation: ParticipationArg,
}

pub fn threshold_for(
    u: f64,
    p_star: f64,
    price: f64,
    delta: f64,
    cap: usize,
    model: &ParticipationModel,
) -> anyhow::Result<(i64, Vec<f64>)> {
    if price > p_star {
        bail!("exploitative price {price} exceeds the fairshare price {p_star}");
    }
    let n = cap + 1;
    let (u, p_star, prices) = (vec![u; n], vec![p_star; n], vec![price; n]);
    let t = tradeoff_threshold(&u, &p_star, &prices, model, delta, cap)?;
    Ok((t, threshold_partial_sums(&u, &p_star, &prices, model, delta, cap)?))
}

pub fn threshold(args: &ThresholdArgs) -> Result<(), Failure> {
    let model = args.participation.model()?;
    let (t, sums) = threshold_for(args.u, args.p_star, args.price, args.delta, args.cap, &model)?;
    println!("t* {t}");
    if args.sums {
        println!("T,partial_sum");
        for (i, s) in sums.iter().enumerate() {
            println!("{i},{s}");
        }
    }
    Ok(())
}
