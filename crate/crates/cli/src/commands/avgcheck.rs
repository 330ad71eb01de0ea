use std::path::PathBuf;

use anyhow::Result;
use changing_oracle::harness::{changing_oracles, check_averaging, Strategy};
use changing_oracle::{ItemSet, PhaseSchedule};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{config, need, output_path, resolve, ItemList};
use crate::output::write_report;

pub const TOL: f64 = 1e-9;

config! {
    pub struct AvgcheckConfig {
        /// Number of items (at most 5).
        n_items: usize,
        /// Random base strategies (default 50).
        strategies: usize,
        /// Seed (default 0).
        seed: u64,
        /// Ancilla dimension (default 1).
        ancilla: usize,
        /// Queries to the first oracle (default 1).
        k_first: usize,
        /// Queries to the second oracle (default 1).
        j_second: usize,
        /// First-oracle winning items (default 0).
        winning_tilde: ItemList,
        /// Second-oracle winning items, also the target (default 0,1).
        winning: ItemList,
        /// Report path (default: stdout).
        output: PathBuf,
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Flat JSON config; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub keys: AvgcheckConfig,
}

#[derive(Debug, Serialize)]
struct Entry {
    index: usize,
    mean_success: f64,
    max_deviation: f64,
}

#[derive(Debug, Serialize)]
struct Report {
    n_items: usize,
    ancilla: usize,
    schedule: PhaseSchedule,
    seed: u64,
    permutations: usize,
    max_deviation: f64,
    tol: f64,
    pass: bool,
    strategies: Vec<Entry>,
}

pub fn run(args: Args) -> Result<bool> {
    let cfg = resolve(args.config.as_deref(), args.keys)?;
    let n_items = need(&cfg.n_items, "n_items")?;
    let count = cfg.strategies.unwrap_or(50);
    let seed = cfg.seed.unwrap_or(0);
    let ancilla = cfg.ancilla.unwrap_or(1);
    let schedule = PhaseSchedule::new(cfg.k_first.unwrap_or(1), cfg.j_second.unwrap_or(1));
    let first = ItemSet::new(cfg.winning_tilde.clone().unwrap_or(ItemList(vec![0])).0);
    let second = ItemSet::new(cfg.winning.clone().unwrap_or(ItemList(vec![0, 1])).0);
    first.check_within(n_items)?;
    second.check_within(n_items)?;
    let oracles = changing_oracles(&first, &second, schedule);

    let entries = (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let base = Strategy::<f64>::random(&mut rng, n_items, ancilla, schedule.total())?;
            let r = check_averaging(base, &oracles, &second)?;
            Ok(Entry { index: i, mean_success: r.mean_success, max_deviation: r.max_deviation })
        })
        .collect::<changing_oracle::Result<Vec<_>>>()?;
    let max_deviation = entries.iter().map(|e| e.max_deviation).fold(0.0, f64::max);
    let report = Report {
        n_items,
        ancilla,
        schedule,
        seed,
        permutations: (1..=n_items).product(),
        max_deviation,
        tol: TOL,
        pass: max_deviation <= TOL,
        strategies: entries,
    };
    write_report(output_path(&cfg.output), &report)?;
    Ok(report.pass)
}
