use std::path::PathBuf;

use anyhow::{bail, Result};
use changing_oracle::harness::{certify_strategy, BoundReport, Strategy};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{config, need, output_path, resolve};
use crate::output::{num, write_csv, write_summary};

pub const TOL: f64 = 1e-9;

config! {
    pub struct BoundsConfig {
        /// Smallest number of items (default 1).
        n_min: usize,
        /// Largest number of items.
        n_max: usize,
        /// Largest number of marked items.
        win_max: usize,
        /// Largest number of queries.
        j_max: usize,
        /// Random strategies per (N, n, J) besides Grover (default 0).
        strategies: usize,
        /// Seed for the random strategies (default 0).
        seed: u64,
        /// Ancilla dimension of the random strategies (default 1).
        ancilla: usize,
        /// Skip instances with J·ν > π/2 (default false).
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        window_only: bool,
        /// CSV path (default: stdout).
        output: PathBuf,
        /// JSON summary path (default: stderr).
        summary: PathBuf,
    }
}

#[derive(Debug, clap::Args)]
pub struct Args {
    /// Flat JSON config; flags override its keys.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub keys: BoundsConfig,
}

struct Job {
    n_items: usize,
    n_winning: usize,
    queries: usize,
    /// `None` for Grover, otherwise the index of the random strategy and its RNG stream.
    random: Option<(usize, u64)>,
}

#[derive(Debug, Serialize)]
struct Summary {
    rows: usize,
    lower_violations: usize,
    upper_violations: usize,
    upper_violations_in_window: usize,
    grover_unsaturated_in_window: usize,
    seed: u64,
}

fn evaluate(job: &Job, seed: u64, ancilla: usize) -> changing_oracle::Result<BoundReport> {
    let strategy = match job.random {
        None => Strategy::<f64>::grover(job.n_items, job.queries)?,
        Some((_, stream)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(stream);
            Strategy::<f64>::random(&mut rng, job.n_items, ancilla, job.queries)?
        }
    };
    certify_strategy(&strategy, job.n_winning)
}

pub fn run(args: Args) -> Result<bool> {
    let cfg = resolve(args.config.as_deref(), args.keys)?;
    let n_min = cfg.n_min.unwrap_or(1).max(1);
    let n_max = need(&cfg.n_max, "n_max")?;
    let win_max = need(&cfg.win_max, "win_max")?;
    let j_max = need(&cfg.j_max, "j_max")?;
    let strategies = cfg.strategies.unwrap_or(0);
    let seed = cfg.seed.unwrap_or(0);
    let ancilla = cfg.ancilla.unwrap_or(1);
    let window_only = cfg.window_only.unwrap_or(false);
    if n_min > n_max {
        bail!("n_min = {n_min} exceeds n_max = {n_max}");
    }

    let mut jobs = Vec::new();
    let mut stream = 0u64;
    for n_items in n_min..=n_max {
        for n_winning in 0..=win_max.min(n_items) {
            let nu = (n_winning as f64 / n_items as f64).sqrt().asin();
            for queries in 0..=j_max {
                if window_only && queries as f64 * nu > std::f64::consts::FRAC_PI_2 + 1e-12 {
                    continue;
                }
                jobs.push(Job { n_items, n_winning, queries, random: None });
                for i in 0..strategies {
                    jobs.push(Job { n_items, n_winning, queries, random: Some((i, stream)) });
                    stream += 1;
                }
            }
        }
    }
    let reports = jobs
        .par_iter()
        .map(|job| evaluate(job, seed, ancilla))
        .collect::<changing_oracle::Result<Vec<_>>>()?;

    let mut summary = Summary {
        rows: reports.len(),
        lower_violations: 0,
        upper_violations: 0,
        upper_violations_in_window: 0,
        grover_unsaturated_in_window: 0,
        seed,
    };
    let mut rows = Vec::with_capacity(reports.len());
    for (job, r) in jobs.iter().zip(&reports) {
        let (lower, upper) = (r.lower_holds(TOL), r.upper_holds(TOL));
        summary.lower_violations += usize::from(!lower);
        summary.upper_violations += usize::from(!upper);
        summary.upper_violations_in_window += usize::from(!upper && r.in_window);
        if job.random.is_none() && r.in_window && !r.saturated_rhs {
            summary.grover_unsaturated_in_window += 1;
        }
        let label = match job.random {
            None => "grover".to_string(),
            Some((i, _)) => format!("random-{i}"),
        };
        rows.push(vec![
            r.n_items.to_string(),
            r.n_winning.to_string(),
            r.queries.to_string(),
            label,
            r.oracles.to_string(),
            num(r.p),
            num(r.lhs),
            num(r.middle),
            num(r.rhs),
            r.in_window.to_string(),
            lower.to_string(),
            upper.to_string(),
            r.saturated_lhs.to_string(),
            r.saturated_rhs.to_string(),
        ]);
    }
    write_csv(
        output_path(&cfg.output),
        "bounds/v1",
        &[
            "n_items",
            "n_winning",
            "queries",
            "strategy",
            "oracles",
            "p",
            "lhs",
            "distance_sum",
            "rhs",
            "in_window",
            "lower_holds",
            "upper_holds",
            "saturated_lhs",
            "saturated_rhs",
        ],
        &rows,
    )?;
    write_summary(output_path(&cfg.summary), &summary)?;
    Ok(summary.lower_violations == 0 && summary.upper_violations == 0 && summary.grover_unsaturated_in_window == 0)
}
