//! Success over a grid of phase lengths, and the choice of when to switch oracles.

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{alpha_after, base_angles, boundary_decomposition};
use crate::error::{Error, Result};
use crate::reduced::run_schedule;
use crate::scalar::{sin2, Real};
use crate::types::{ClassSizes, PhaseSchedule};

/// Largest number of grid entries a sweep will compute.
pub const SWEEP_CAP: usize = 1_000_000;

/// `p_final` for every `(k, j)` with `k ≤ k_max`, `j ≤ j_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepGrid<T> {
    pub sizes: ClassSizes,
    pub k_max: usize,
    pub j_max: usize,
    /// `values[k][j]`
    pub values: Vec<Vec<T>>,
}

impl<T: Real> SweepGrid<T> {
    pub fn get(&self, k: usize, j: usize) -> T {
        self.values[k][j]
    }

    /// `(k, p)` maximising column `j`; ties go to the smaller `k`.
    pub fn best_in_column(&self, j: usize) -> (usize, T) {
        let mut best = 0;
        for k in 1..=self.k_max {
            if self.values[k][j] > self.values[best][j] {
                best = k;
            }
        }
        (best, self.values[best][j])
    }

    /// Best `(k, j, p)` over the whole grid; ties go to the fewest total queries, then the
    /// smaller `k`.
    pub fn best(&self) -> (usize, usize, T) {
        let mut best = (0, 0, self.values[0][0]);
        for (k, row) in self.values.iter().enumerate() {
            for (j, &p) in row.iter().enumerate() {
                let better = p > best.2 || (p == best.2 && k + j < best.0 + best.1);
                if better {
                    best = (k, j, p);
                }
            }
        }
        best
    }
}

/// Simulates every schedule with the reduced simulator. A single run with first phase `k`
/// and second phase `j_max` yields the whole row `j = 0..=j_max`.
pub fn sweep_grid<T: Real>(sizes: ClassSizes, k_max: usize, j_max: usize) -> Result<SweepGrid<T>> {
    let entries = (k_max + 1).saturating_mul(j_max + 1);
    if entries > SWEEP_CAP {
        return Err(Error::InvalidGrid(format!("{entries} entries exceed the cap of {SWEEP_CAP}")));
    }
    let values = (0..=k_max)
        .into_par_iter()
        .map(|k| {
            let traj = run_schedule::<T>(sizes, PhaseSchedule::new(k, j_max));
            traj.rows[k..].iter().map(|(row, _)| row.p_second).collect()
        })
        .collect();
    Ok(SweepGrid { sizes, k_max, j_max, values })
}

/// First-phase length in `0..=k_max` maximising final success for a fixed `j`, with that
/// success; ties go to the smaller `k`.
pub fn best_first_phase<T: Real>(sizes: ClassSizes, j: usize, k_max: usize) -> Result<(usize, T)> {
    let grid = sweep_grid::<T>(sizes, k_max, j)?;
    Ok(grid.best_in_column(j))
}

/// Whether the first oracle's progress is already worth less than continuing from the
/// symmetric part: `sin²χ < sin²(2jν + φ)` with `φ` the boundary angle after `k` first-oracle
/// iterations.
pub fn switch_criterion<T: Real>(sizes: ClassSizes, k: usize, j: usize) -> Result<bool> {
    let (nu_tilde, _) = base_angles::<T>(&sizes);
    let alpha = alpha_after(k, nu_tilde);
    let angles = boundary_decomposition(alpha.value, &sizes)?;
    let rotated = angles.phi + T::count(2 * j as u64) * angles.nu;
    Ok(sin2(angles.chi) < sin2(rotated))
}

/// Largest `j` with `2jν + ν ≤ π/2`, i.e. `⌊π/(4ν) − 1/2⌋`.
pub fn second_phase_window(sizes: &ClassSizes) -> usize {
    let (_, nu) = base_angles::<f64>(sizes);
    if nu <= 0.0 {
        return usize::MAX;
    }
    (std::f64::consts::PI / (4.0 * nu) - 0.5 + 1e-12).floor().max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    fn figure2() -> ClassSizes {
        ClassSizes::new(5, 10, 5, 5000).unwrap()
    }

    #[test]
    fn grid_matches_direct_runs() {
        let sizes = figure2();
        let grid = sweep_grid::<f64>(sizes, 4, 6).unwrap();
        for k in 0..=4 {
            for j in 0..=6 {
                let direct = run_schedule::<f64>(sizes, PhaseSchedule::new(k, j)).final_probability();
                assert!((grid.get(k, j) - direct).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn grid_cap() {
        assert!(matches!(sweep_grid::<f64>(figure2(), 1000, 1000), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn first_column() {
        let grid = sweep_grid::<f64>(figure2(), 10, 0).unwrap();
        assert!((grid.get(0, 0) - 10.0 / 5020.0).abs() < 1e-15);
        assert!(grid.get(0, 0) < grid.get(5, 0) && grid.get(5, 0) < grid.get(10, 0));
    }

    #[test]
    fn best_first_phase_examples() {
        assert_eq!(best_first_phase::<f64>(figure2(), 0, 10).unwrap().0, 10);
        assert_eq!(best_first_phase::<f64>(figure2(), 17, 10).unwrap().0, 0);
        assert_eq!(best_first_phase::<f64>(figure2(), 5, 0).unwrap().0, 0);
        let containment = ClassSizes::new(10, 0, 20, 5000).unwrap();
        assert_eq!(best_first_phase::<f64>(containment, 0, 10).unwrap().0, 10);
    }

    #[test]
    fn ties_prefer_fewer_first_queries() {
        // nothing to find: every entry is zero
        let empty = ClassSizes::new(0, 0, 0, 16).unwrap();
        assert_eq!(best_first_phase::<f64>(empty, 3, 5).unwrap(), (0, 0.0));
    }

    #[test]
    fn window_of_second_phase() {
        assert_eq!(second_phase_window(&figure2()), 17);
        assert_eq!(second_phase_window(&ClassSizes::new(0, 0, 1, 3).unwrap()), 1);
    }

    #[test]
    fn switch_criterion_examples() {
        assert!(switch_criterion::<f64>(figure2(), 10, 17).unwrap());
        assert!(!switch_criterion::<f64>(ClassSizes::new(10, 0, 20, 5000).unwrap(), 10, 17).unwrap());
        assert!(!switch_criterion::<f64>(figure2(), 0, 0).unwrap());
        assert!(switch_criterion::<f64>(figure2(), 20, 0).is_err());
    }
}
