use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use fairshare_core::analysis::summarize;
use fairshare_core::config::ScenarioConfig;
use fairshare_core::dynamics::run_scenario;
use fairshare_core::trace::{flatten, write_trace, EntityKind, MARKET_ID};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analyze::write_summary_csv;
use crate::failure::{read_input, write_file, Failure, Tag};

pub const CONFIG_COPY: &str = "config.toml";
pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    /// SHA-256 of the stored `config.toml`.
    pub config_digest: String,
    pub seed: u64,
    pub version: String,
    /// Seconds since the Unix epoch.
    pub started_at: f64,
    pub finished_at: f64,
    pub outputs: Outputs,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outputs {
    pub config: String,
    pub trace: String,
    pub summary: String,
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn run(config_path: &Path, out: &Path, seed: Option<u64>) -> Result<(), Failure> {
    let started_at = now();
    let text = read_input(config_path)?;
    let mut config = ScenarioConfig::from_toml_str(&text).input(config_path.display())?;
    // keep the stored config equal to what actually ran
    let stored = match seed {
        Some(s) if s != config.market.seed => {
            config.market.seed = s;
            config.to_toml_string()?
        }
        _ => text,
    };
    let trace = run_scenario(&config)?;
    let lines = flatten(&trace);
    let summary = summarize(&lines);

    std::fs::create_dir_all(out).output(format!("cannot create {}", out.display()))?;
    write_file(&out.join(CONFIG_COPY), |w| Ok(w.write_all(stored.as_bytes())?))?;
    write_file(&out.join(&config.output.trace), |w| Ok(write_trace(w, &lines)?))?;
    write_file(&out.join(&config.output.summary), |w| write_summary_csv(w, &summary))?;
    let manifest = RunManifest {
        config_digest: digest(stored.as_bytes()),
        seed: config.market.seed,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started_at,
        finished_at: now(),
        outputs: Outputs {
            config: CONFIG_COPY.to_string(),
            trace: config.output.trace.clone(),
            summary: config.output.summary.clone(),
        },
    };
    write_file(&out.join(MANIFEST), |w| {
        serde_json::to_writer_pretty(&mut *w, &manifest)?;
        Ok(writeln!(w)?)
    })?;

    let horizon = config.market.horizon;
    let profit = summary.get(EntityKind::Market, MARKET_ID, horizon, "mean_cumulative_profit").unwrap_or(0.0);
    println!(
        "{horizon} steps, {} sellers, {} buyers, strategy {}; mean seller profit {profit:.6}",
        config.sellers.count,
        config.buyers.count,
        config.strategy.label()
    );
    println!("wrote {}", out.display());
    Ok(())
}
