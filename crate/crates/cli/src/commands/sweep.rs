use std::path::PathBuf;

use anyhow::Result;
use changing_oracle::analytic::{alpha_after, base_angles, predict};
use changing_oracle::sweep::sweep_grid;
use changing_oracle::{ClassSizes, PhaseSchedule};
use serde::Serialize;

use crate::config::{config, need, output_path, resolve, Overlay};
use crate::output::{all_pass, num, write_csv, write_summary, Check};

config! {
    pub struct SweepConfig {
        n_a: u64,
        n_minus: u64,
        n_plus: u64,
        n_ell: u64,
        /// Largest first-phase length.
        k_max: usize,
        /// Largest second-phase length.
        j_max: usize,
        /// Preset: n_a=5, n_minus=10, n_plus=5, n_ell=5000, k_max=10, j_max=40.
        #[arg(num_args = 0..=1, default_missing_value = "true")]
        figure2: bool,
        /// Wide CSV path (k rows, j columns).
        wide: PathBuf,
        /// Long CSV path (k, j, p); stdout when neither output is given.
        long: PathBuf,
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
    pub keys: SweepConfig,
}

fn figure2_preset() -> SweepConfig {
    SweepConfig {
        n_a: Some(5),
        n_minus: Some(10),
        n_plus: Some(5),
        n_ell: Some(5000),
        k_max: Some(10),
        j_max: Some(40),
        ..SweepConfig::default()
    }
}

#[derive(Debug, Serialize)]
struct BestEntry {
    j: usize,
    k: usize,
    p: f64,
}

#[derive(Debug, Serialize)]
struct Summary {
    sizes: ClassSizes,
    k_max: usize,
    j_max: usize,
    best: BestEntry,
    /// Best first-phase length for each second-phase length.
    best_first_phase: Vec<BestEntry>,
    checks: Vec<Check>,
}

pub fn run(args: Args) -> Result<bool> {
    let mut cfg = resolve(args.config.as_deref(), args.keys)?;
    if cfg.figure2 == Some(true) {
        cfg = figure2_preset().overlay(cfg);
    }
    let sizes = ClassSizes::new(
        need(&cfg.n_a, "n_a")?,
        need(&cfg.n_minus, "n_minus")?,
        need(&cfg.n_plus, "n_plus")?,
        need(&cfg.n_ell, "n_ell")?,
    )?;
    let k_max = need(&cfg.k_max, "k_max")?;
    let j_max = need(&cfg.j_max, "j_max")?;
    let grid = sweep_grid::<f64>(sizes, k_max, j_max)?;

    let (nu_tilde, _) = base_angles::<f64>(&sizes);
    let mut worst = 0.0f64;
    for k in (0..=k_max).filter(|&k| alpha_after(k, nu_tilde).in_window) {
        for j in 0..=j_max {
            let (_, report) = predict::<f64>(&sizes, PhaseSchedule::new(k, j))?;
            worst = worst.max((grid.get(k, j) - report.p_final).abs());
        }
    }
    let checks = vec![Check::new("sweep vs closed form (first phase in window)", worst, 1e-9)];

    let wide_path = output_path(&cfg.wide);
    let long_path = output_path(&cfg.long);
    if cfg.wide.is_some() {
        let mut header = vec!["k".to_string()];
        header.extend((0..=j_max).map(|j| format!("j{j}")));
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows: Vec<Vec<String>> = grid
            .values
            .iter()
            .enumerate()
            .map(|(k, row)| std::iter::once(k.to_string()).chain(row.iter().map(|&p| num(p))).collect())
            .collect();
        write_csv(wide_path, "sweep-wide/v1", &header, &rows)?;
    }
    if cfg.long.is_some() || cfg.wide.is_none() {
        let rows: Vec<Vec<String>> = grid
            .values
            .iter()
            .enumerate()
            .flat_map(|(k, row)| row.iter().enumerate().map(move |(j, &p)| vec![k.to_string(), j.to_string(), num(p)]))
            .collect();
        write_csv(long_path, "sweep-long/v1", &["k", "j", "p"], &rows)?;
    }

    let (bk, bj, bp) = grid.best();
    let summary = Summary {
        sizes,
        k_max,
        j_max,
        best: BestEntry { j: bj, k: bk, p: bp },
        best_first_phase: (0..=j_max)
            .map(|j| {
                let (k, p) = grid.best_in_column(j);
                BestEntry { j, k, p }
            })
            .collect(),
        checks,
    };
    write_summary(output_path(&cfg.summary), &summary)?;
    Ok(all_pass(&summary.checks))
}
