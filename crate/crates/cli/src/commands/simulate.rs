use std::path::PathBuf;

use anyhow::{bail, Result};
use changing_oracle::analytic::predict;
use changing_oracle::full::run_grover_schedule;
use changing_oracle::reduced::{run_schedule, TraceRow};
use changing_oracle::{AngleSet, ClassSizes, Error, ItemSet, PhaseSchedule, SuccessReport};
use serde::Serialize;

use crate::config::{config, need, output_path, resolve, ItemList};
use crate::output::{all_pass, num, write_csv, write_summary, Check};

config! {
    pub struct SimulateConfig {
        /// Items winning for both oracles.
        n_a: u64,
        /// Items winning only for the first oracle.
        n_minus: u64,
        /// Items winning only for the second oracle.
        n_plus: u64,
        /// Items winning for neither oracle.
        n_ell: u64,
        /// Universe size for explicit-set mode.
        n_items: usize,
        /// First-oracle winning items (explicit-set mode).
        winning_tilde: ItemList,
        /// Second-oracle winning items (explicit-set mode).
        winning: ItemList,
        /// Queries to the first oracle.
        k_first: usize,
        /// Queries to the second oracle.
        j_second: usize,
        /// Trajectory CSV path (default: stdout).
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
    pub keys: SimulateConfig,
}

pub const TOL_ANALYTIC: f64 = 1e-9;
pub const TOL_DENSE: f64 = 1e-10;

#[derive(Debug, Serialize)]
struct Summary {
    mode: &'static str,
    sizes: ClassSizes,
    schedule: PhaseSchedule,
    /// Reduced-simulator success after the full schedule.
    p_final: f64,
    p_full: Option<f64>,
    full_delta: Option<f64>,
    /// Angles measured on the simulated phase-boundary state.
    measured_angles: AngleSet<f64>,
    analytic_angles: Option<AngleSet<f64>>,
    analytic: Option<SuccessReport<f64>>,
    checks: Vec<Check>,
}

enum Instance {
    Sizes(ClassSizes),
    Explicit { n_items: usize, first: ItemSet, second: ItemSet },
}

fn instance(cfg: &SimulateConfig) -> Result<Instance> {
    let by_size = [cfg.n_a, cfg.n_minus, cfg.n_plus, cfg.n_ell].iter().any(Option::is_some);
    let explicit = cfg.n_items.is_some() || cfg.winning_tilde.is_some() || cfg.winning.is_some();
    match (by_size, explicit) {
        (true, true) => bail!("give either class sizes (n_a, n_minus, n_plus, n_ell) or explicit sets, not both"),
        (false, false) => bail!("missing required key `n_a` (or explicit-set keys `n_items`, `winning_tilde`, `winning`)"),
        (true, false) => Ok(Instance::Sizes(ClassSizes::new(
            need(&cfg.n_a, "n_a")?,
            need(&cfg.n_minus, "n_minus")?,
            need(&cfg.n_plus, "n_plus")?,
            need(&cfg.n_ell, "n_ell")?,
        )?)),
        (false, true) => Ok(Instance::Explicit {
            n_items: need(&cfg.n_items, "n_items")?,
            first: ItemSet::new(need(&cfg.winning_tilde, "winning_tilde")?.0),
            second: ItemSet::new(need(&cfg.winning, "winning")?.0),
        }),
    }
}

pub fn trajectory_rows(rows: &[TraceRow<f64>], full: Option<&[TraceRow<f64>]>) -> Vec<Vec<String>> {
    rows.iter()
        .enumerate()
        .skip(1)
        .map(|(i, r)| {
            let oracle = match r.oracle {
                Some(changing_oracle::Oracle::First) => "first",
                Some(changing_oracle::Oracle::Second) => "second",
                None => "none",
            };
            let mut row = vec![r.step.to_string(), oracle.to_string(), num(r.p_first), num(r.p_second)];
            if let Some(full) = full {
                row.push(num(full[i].p_first));
                row.push(num(full[i].p_second));
            }
            row
        })
        .collect()
}

pub fn run(args: Args) -> Result<bool> {
    let cfg = resolve(args.config.as_deref(), args.keys)?;
    let schedule = PhaseSchedule::new(need(&cfg.k_first, "k_first")?, need(&cfg.j_second, "j_second")?);
    let (sizes, explicit) = match instance(&cfg)? {
        Instance::Sizes(s) => (s, None),
        Instance::Explicit { n_items, first, second } => {
            (ClassSizes::from_sets(&first, &second, n_items)?, Some((n_items, first, second)))
        }
    };

    let traj = run_schedule::<f64>(sizes, schedule);
    let rows = traj.probabilities();
    let p_final = traj.final_probability();
    let mut measured = traj.boundary().measure_decomposition();
    measured.delta = 2.0 * schedule.j_second as f64 * measured.nu;

    let mut checks = Vec::new();
    let (analytic_angles, analytic) = match predict::<f64>(&sizes, schedule) {
        Ok((angles, report)) => {
            checks.push(Check::new("reduced vs closed-form final success", (p_final - report.p_final).abs(), TOL_ANALYTIC));
            (Some(angles), Some(report))
        }
        Err(Error::AngleOutOfWindow { .. }) => (None, None),
        Err(e) => return Err(e.into()),
    };

    let full = match &explicit {
        Some((n_items, first, second)) => Some(run_grover_schedule::<f64>(*n_items, first, second, schedule)?),
        None => None,
    };
    let full_delta = full.as_ref().map(|f| {
        f.rows
            .iter()
            .zip(&rows)
            .map(|(a, b)| (a.p_first - b.p_first).abs().max((a.p_second - b.p_second).abs()))
            .fold(0.0, f64::max)
    });
    if let Some(delta) = full_delta {
        checks.push(Check::new("dense vs reduced trajectory", delta, TOL_DENSE));
    }

    let (schema, header): (&str, &[&str]) = if full.is_some() {
        ("trajectory-explicit/v1", &["step", "oracle", "p_first", "p_second", "p_first_full", "p_second_full"])
    } else {
        ("trajectory/v1", &["step", "oracle", "p_first", "p_second"])
    };
    let csv = trajectory_rows(&rows, full.as_ref().map(|f| f.rows.as_slice()));
    write_csv(output_path(&cfg.output), schema, header, &csv)?;

    let summary = Summary {
        mode: if explicit.is_some() { "explicit" } else { "sizes" },
        sizes,
        schedule,
        p_final,
        p_full: full.as_ref().map(|f| f.final_probability()),
        full_delta,
        measured_angles: measured,
        analytic_angles,
        analytic,
        checks,
    };
    write_summary(output_path(&cfg.summary), &summary)?;
    Ok(all_pass(&summary.checks))
}
