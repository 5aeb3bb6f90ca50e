use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use clap::Subcommand;
use fairshare_core::analysis::{compare_strategies, spearman, summarize, summarize_batch, Summary};
use fairshare_core::config::{default_checkpoints, ScenarioConfig};
use fairshare_core::trace::{parse_trace, TraceLine};
use fairshare_core::valuation::{parse_scores, ValuationScore};

use crate::failure::{read_input, write_file, Failure, Tag};
use crate::simulate::CONFIG_COPY;
use crate::single::{threshold_for, ParticipationArg};

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Spearman correlation between two score files, matched on dataset and buyer.
    Spearman {
        #[arg(long)]
        x: PathBuf,
        #[arg(long)]
        y: PathBuf,
    },
    /// Summary table of one trace, or the mean over several (e.g. one per seed).
    Summarize {
        #[arg(long = "trace", required = true)]
        traces: Vec<PathBuf>,
        /// CSV to write; stdout if absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Strategy ordering at checkpoint steps across `simulate` output directories.
    CompareStrategies {
        #[arg(long = "run", required = true)]
        runs: Vec<PathBuf>,
        #[arg(long, value_delimiter = ',')]
        checkpoints: Option<Vec<usize>>,
    },
    /// Trade-off threshold for each discount factor.
    ThresholdSweep {
        #[arg(long)]
        u: f64,
        #[arg(long)]
        p_star: f64,
        #[arg(long)]
        price: f64,
        #[arg(long, value_delimiter = ',', required = true)]
        deltas: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        cap: usize,
        #[command(flatten)]
        participation: ParticipationArg,
    },
}

pub fn write_summary_csv(out: &mut dyn Write, summary: &Summary) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["kind", "entity_id", "step", "metric", "value"])?;
    for r in &summary.rows {
        w.write_record([r.kind.as_str(), &r.entity_id, &r.step.to_string(), &r.metric, &r.value.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn read_scores(path: &Path) -> Result<Vec<ValuationScore>, Failure> {
    parse_scores(&read_input(path)?).input(path.display())
}

fn read_trace_file(path: &Path) -> Result<Vec<TraceLine>, Failure> {
    parse_trace(&read_input(path)?).input(path.display())
}

pub fn run(command: &AnalyzeCommand) -> Result<(), Failure> {
    match command {
        AnalyzeCommand::Spearman { x, y } => {
            let xs = read_scores(x)?;
            let ys: HashMap<(String, String), f64> =
                read_scores(y)?.into_iter().map(|s| ((s.dataset_id, s.buyer_id), s.raw)).collect();
            if xs.len() != ys.len() {
                return Err(anyhow!("score files have {} and {} records", xs.len(), ys.len()).into());
            }
            let mut a = Vec::with_capacity(xs.len());
            let mut b = Vec::with_capacity(xs.len());
            for s in xs {
                let Some(&v) = ys.get(&(s.dataset_id.clone(), s.buyer_id.clone())) else {
                    return Err(anyhow!("{} has no score for {} / {}", y.display(), s.dataset_id, s.buyer_id).into());
                };
                a.push(s.raw);
                b.push(v);
            }
            println!("{}", spearman(&a, &b)?);
        }
        AnalyzeCommand::Summarize { traces, out } => {
            let summaries =
                traces.iter().map(|t| Ok(summarize(&read_trace_file(t)?))).collect::<Result<Vec<_>, Failure>>()?;
            let summary = summarize_batch(&summaries)?;
            match out {
                Some(path) => write_file(path, |w| write_summary_csv(w, &summary))?,
                None => write_summary_csv(&mut std::io::stdout().lock(), &summary).output("cannot write to stdout")?,
            }
        }
        AnalyzeCommand::CompareStrategies { runs, checkpoints } => {
            let loaded = runs
                .iter()
                .map(|dir| {
                    let config_path = dir.join(CONFIG_COPY);
                    let config = ScenarioConfig::from_toml_str(&read_input(&config_path)?).input(config_path.display())?;
                    let lines = read_trace_file(&dir.join(&config.output.trace))?;
                    Ok((config, lines))
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let checkpoints = checkpoints.clone().unwrap_or_else(default_checkpoints);
            let report = compare_strategies(&loaded, &checkpoints)?;
            println!("step,metric,ordering,values");
            for r in &report.rankings {
                let ordering: Vec<String> = r.ranking.iter().map(|g| g.join(" = ")).collect();
                let values: Vec<String> = r.values.iter().map(|(l, v)| format!("{l}={v}")).collect();
                println!("{},{},{},{}", r.step, r.metric.as_str(), ordering.join(" > "), values.join(" "));
            }
            if report.rankings.is_empty() {
                eprintln!("no checkpoint within the traces' horizon");
            }
        }
        AnalyzeCommand::ThresholdSweep { u, p_star, price, deltas, cap, participation } => {
            let model = participation.model()?;
            println!("delta,t_star");
            for &delta in deltas {
                if !(delta > 0.0 && delta < 1.0) {
                    return Err(anyhow!("delta must lie in (0, 1), got {delta}").into());
                }
                let (t, _) = threshold_for(*u, *p_star, *price, delta, *cap, &model)?;
                println!("{delta},{t}");
            }
        }
    }
    Ok(())
}
