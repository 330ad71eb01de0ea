//! Dense `N`-amplitude simulator over explicit winning sets.
//!
//! This is the brute-force reference for the reduced simulator and the closed forms. The
//! Grover fast path applies the diffusion as inversion about the mean, `O(N)` per step.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{norm_sqr, CMatrix};
use crate::reduced::{norm_tolerance, TraceRow};
use crate::scalar::{c, Real};
use crate::types::{ClassSizes, ItemSet, Oracle, PhaseSchedule};

/// Largest `N` for oracle + reflection trajectories.
pub const GROVER_CAP: usize = 4096;
/// Largest dimension for arbitrary dense unitaries.
pub const UNITARY_CAP: usize = 256;
/// Largest `N` when the system is tensored with the `N!`-dimensional averaging register.
pub const AVERAGED_CAP: usize = 5;

const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct FullState<T> {
    amplitudes: Vec<Complex<T>>,
    winning_tilde: ItemSet,
    winning: ItemSet,
    first_mask: Vec<bool>,
    second_mask: Vec<bool>,
}

impl<T: Real> FullState<T> {
    /// Uniform superposition over `n_items` items.
    pub fn uniform(n_items: usize, winning_tilde: ItemSet, winning: ItemSet) -> Result<Self> {
        if n_items == 0 {
            return Err(Error::EmptyUniverse);
        }
        if n_items > GROVER_CAP {
            return Err(Error::DenseCapExceeded { n: n_items, cap: GROVER_CAP });
        }
        let amp = c(T::one() / T::count(n_items as u64).sqrt());
        Self::build(vec![amp; n_items], winning_tilde, winning)
    }

    /// State with explicit amplitudes; must be normalised.
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>, winning_tilde: ItemSet, winning: ItemSet) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::EmptyUniverse);
        }
        let norm = norm_sqr(&amplitudes);
        if (norm - T::one()).abs() > norm_tolerance::<T>() {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        Self::build(amplitudes, winning_tilde, winning)
    }

    fn build(amplitudes: Vec<Complex<T>>, winning_tilde: ItemSet, winning: ItemSet) -> Result<Self> {
        let n = amplitudes.len();
        let first_mask = winning_tilde.mask(n)?;
        let second_mask = winning.mask(n)?;
        Ok(FullState { amplitudes, winning_tilde, winning, first_mask, second_mask })
    }

    pub fn n_items(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn winning_set(&self, oracle: Oracle) -> &ItemSet {
        match oracle {
            Oracle::First => &self.winning_tilde,
            Oracle::Second => &self.winning,
        }
    }

    pub fn class_sizes(&self) -> Result<ClassSizes> {
        ClassSizes::from_sets(&self.winning_tilde, &self.winning, self.n_items())
    }

    fn mask(&self, oracle: Oracle) -> &[bool] {
        match oracle {
            Oracle::First => &self.first_mask,
            Oracle::Second => &self.second_mask,
        }
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr(&self.amplitudes)
    }

    /// `O|x⟩ = (−1)^{f(x)}|x⟩`
    pub fn apply_phase_oracle(mut self, oracle: Oracle) -> Self {
        self.phase_oracle_in_place(oracle);
        self
    }

    fn phase_oracle_in_place(&mut self, oracle: Oracle) {
        let mask = match oracle {
            Oracle::First => &self.first_mask,
            Oracle::Second => &self.second_mask,
        };
        for (amp, &marked) in self.amplitudes.iter_mut().zip(mask) {
            if marked {
                *amp = -*amp;
            }
        }
    }

    /// `1 − 2|u⟩⟨u|` with `u` uniform, applied as `ψ_x ← ψ_x − 2·mean(ψ)`.
    pub fn apply_uniform_diffusion(mut self) -> Self {
        self.diffusion_in_place();
        self
    }

    fn diffusion_in_place(&mut self) {
        let n = T::count(self.amplitudes.len() as u64);
        let sum = self.amplitudes.iter().fold(c(T::zero()), |acc, a| acc + a);
        let shift = sum * (T::lit(2.0) / n);
        for amp in self.amplitudes.iter_mut() {
            *amp = *amp - shift;
        }
    }

    /// One Grover iteration with the given oracle.
    pub fn grover_step(mut self, oracle: Oracle) -> Self {
        self.phase_oracle_in_place(oracle);
        self.diffusion_in_place();
        self
    }

    /// Dense matrix–vector product with a unitary of matching dimension.
    pub fn apply_unitary(self, u: &CMatrix<T>) -> Result<Self> {
        if self.n_items() > UNITARY_CAP {
            return Err(Error::DenseCapExceeded { n: self.n_items(), cap: UNITARY_CAP });
        }
        if u.dim() != self.n_items() {
            return Err(Error::DimensionMismatch { expected: self.n_items(), found: u.dim() });
        }
        u.check_unitary(T::lit(UNITARY_TOL))?;
        let amplitudes = u.matvec(&self.amplitudes)?;
        Ok(FullState { amplitudes, ..self })
    }

    /// `Tr(P_W |ψ⟩⟨ψ|)` for the oracle's winning set.
    pub fn success_probability(&self, oracle: Oracle) -> T {
        self.amplitudes
            .iter()
            .zip(self.mask(oracle))
            .filter(|(_, &m)| m)
            .fold(T::zero(), |acc, (a, _)| acc + a.norm_sqr())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FullTrajectory<T> {
    /// `rows[k]` describes the state after `k` queries.
    pub rows: Vec<TraceRow<T>>,
    pub final_state: FullState<T>,
}

impl<T: Real> FullTrajectory<T> {
    pub fn final_probability(&self) -> T {
        self.rows[self.rows.len() - 1].p_second
    }
}

/// Dense counterpart of [`crate::reduced::run_schedule`].
pub fn run_grover_schedule<T: Real>(
    n_items: usize,
    winning_tilde: &ItemSet,
    winning: &ItemSet,
    schedule: PhaseSchedule,
) -> Result<FullTrajectory<T>> {
    let mut state = FullState::<T>::uniform(n_items, winning_tilde.clone(), winning.clone())?;
    let mut rows = Vec::with_capacity(schedule.total() + 1);
    let row = |step, oracle, s: &FullState<T>| TraceRow {
        step,
        oracle,
        p_first: s.success_probability(Oracle::First),
        p_second: s.success_probability(Oracle::Second),
    };
    rows.push(row(0, None, &state));
    for step in 1..=schedule.total() {
        let oracle = schedule.oracle_at(step);
        state.phase_oracle_in_place(oracle);
        state.diffusion_in_place();
        rows.push(row(step, Some(oracle), &state));
    }
    Ok(FullTrajectory { rows, final_state: state })
}
