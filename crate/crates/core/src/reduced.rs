//! Two-phase Grover dynamics restricted to the four-dimensional class-symmetric subspace.
//!
//! A state is stored as one amplitude per class (`a`, `-`, `+`, `ℓ`), each multiplying the
//! normalised uniform superposition over that class. Phase oracles and the reflection about
//! the uniform state both leave this subspace invariant, so the evolution is exact for any
//! `N` representable as a `u64`.

use num_complex::Complex;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{c, Real};
use crate::types::{AngleSet, ClassSizes, Oracle, PhaseSchedule};

/// Class order used for the four amplitudes.
pub const CLASS_NAMES: [&str; 4] = ["a", "minus", "plus", "ell"];

/// First-oracle sign pattern: flips `a` and `-`.
const FIRST_SIGNS: [bool; 4] = [true, true, false, false];
/// Second-oracle sign pattern: flips `a` and `+`.
const SECOND_SIGNS: [bool; 4] = [true, false, true, false];

fn flips(oracle: Oracle) -> [bool; 4] {
    match oracle {
        Oracle::First => FIRST_SIGNS,
        Oracle::Second => SECOND_SIGNS,
    }
}

/// Norm tolerance: 1e-12, relaxed to a few ulps for single precision.
pub(crate) fn norm_tolerance<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(64.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedState<T> {
    amps: [Complex<T>; 4],
    sizes: ClassSizes,
}

/// Overlaps of a reduced state with the symmetric (`w_s`, `ℓ_s`) and perpendicular
/// (`w_⊥`, `ℓ_⊥`) directions of the second oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Components<T> {
    pub sym_winning: Complex<T>,
    pub sym_losing: Complex<T>,
    pub perp_winning: Complex<T>,
    pub perp_losing: Complex<T>,
}

impl<T: Real> Components<T> {
    /// `|P_S ψ|² = cos²ε`
    pub fn symmetric_weight(&self) -> T {
        self.sym_winning.norm_sqr() + self.sym_losing.norm_sqr()
    }

    /// `|(1 − P_S) ψ|² = sin²ε`
    pub fn perpendicular_weight(&self) -> T {
        self.perp_winning.norm_sqr() + self.perp_losing.norm_sqr()
    }
}

impl<T: Real> ReducedState<T> {
    /// Uniform superposition over all `N` items.
    pub fn init_uniform(sizes: ClassSizes) -> Self {
        let total = T::count(sizes.total());
        let counts = class_counts(&sizes);
        let amps = counts.map(|n| c((T::count(n) / total).sqrt()));
        ReducedState { amps, sizes }
    }

    /// Builds a state from explicit class amplitudes.
    pub fn from_amplitudes(sizes: ClassSizes, amps: [Complex<T>; 4]) -> Result<Self> {
        for (n, a) in class_counts(&sizes).iter().zip(amps.iter()) {
            if *n == 0 && a.norm_sqr() != T::zero() {
                return Err(Error::DegenerateGeometry("non-zero amplitude on an empty class"));
            }
        }
        let state = ReducedState { amps, sizes };
        let norm = state.norm_sqr();
        if (norm - T::one()).abs() > norm_tolerance::<T>() {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        Ok(state)
    }

    /// Real-amplitude state `sin φ0 |w⟩ + cos φ0 |ℓ⟩` for the given oracle's classes.
    pub fn with_success_angle(sizes: ClassSizes, oracle: Oracle, phi0: T) -> Result<Self> {
        let counts = class_counts(&sizes);
        let marks = flips(oracle);
        let winning = T::count(sizes.winning_count(oracle));
        let losing = T::count(sizes.total() - sizes.winning_count(oracle));
        let (s, co) = (phi0.sin(), phi0.cos());
        let mut amps = [c(T::zero()); 4];
        for i in 0..4 {
            if counts[i] == 0 {
                continue;
            }
            let share = T::count(counts[i]);
            amps[i] = if marks[i] { c(s * (share / winning).sqrt()) } else { c(co * (share / losing).sqrt()) };
        }
        ReducedState::from_amplitudes(sizes, amps)
    }

    pub fn sizes(&self) -> ClassSizes {
        self.sizes
    }

    pub fn amplitudes(&self) -> [Complex<T>; 4] {
        self.amps
    }

    /// Amplitude carried by one item of class `class` (0..4 in [`CLASS_NAMES`] order).
    pub fn per_item_amplitude(&self, class: usize) -> Complex<T> {
        let n = class_counts(&self.sizes)[class];
        if n == 0 {
            Complex::new(T::zero(), T::zero())
        } else {
            self.amps[class] / T::count(n).sqrt()
        }
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().fold(T::zero(), |acc, a| acc + a.norm_sqr())
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .fold(c(T::zero()), |acc, (a, b)| acc + a.conj() * b)
    }

    /// Phase oracle: sign flip on the classes the oracle marks.
    pub fn apply_oracle(mut self, oracle: Oracle) -> Self {
        for (amp, flip) in self.amps.iter_mut().zip(flips(oracle)) {
            if flip {
                *amp = -*amp;
            }
        }
        self
    }

    /// Reflection `1 − 2|pivot⟩⟨pivot|`.
    pub fn apply_diffusion(self, pivot: &Self) -> Result<Self> {
        if pivot.sizes != self.sizes {
            return Err(Error::SizesMismatch);
        }
        let norm = pivot.norm_sqr();
        if (norm - T::one()).abs() > norm_tolerance::<T>() {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        Ok(self.reflect_unchecked(pivot))
    }

    fn reflect_unchecked(mut self, pivot: &Self) -> Self {
        let overlap = pivot.inner(&self) * T::lit(2.0);
        for (amp, p) in self.amps.iter_mut().zip(pivot.amps.iter()) {
            *amp = *amp - overlap * p;
        }
        self
    }

    /// One Grover iteration `(1 − 2|ψ0⟩⟨ψ0|)·O` with `ψ0` the uniform state.
    pub fn grover_step(self, oracle: Oracle) -> Self {
        let pivot = ReducedState::init_uniform(self.sizes);
        self.apply_oracle(oracle).reflect_unchecked(&pivot)
    }

    /// Probability of measuring an item the given oracle marks.
    pub fn success_probability(&self, oracle: Oracle) -> T {
        self.amps
            .iter()
            .zip(flips(oracle))
            .filter(|(_, marked)| *marked)
            .fold(T::zero(), |acc, (a, _)| acc + a.norm_sqr())
    }

    /// Overlaps with `w_s`, `ℓ_s`, `w_⊥`, `ℓ_⊥` of the second oracle.
    pub fn components(&self) -> Components<T> {
        let [a, m, p, l] = self.amps;
        let [na, nm, np, nl] = class_counts(&self.sizes).map(|n| T::count(n).sqrt());
        let win = na * na + np * np;
        let lose = nm * nm + nl * nl;
        let zero = c(T::zero());
        let (sym_winning, perp_winning) = if win > T::zero() {
            let w = win.sqrt();
            ((a * na + p * np) / w, (a * np - p * na) / w)
        } else {
            (zero, zero)
        };
        let (sym_losing, perp_losing) = if lose > T::zero() {
            let w = lose.sqrt();
            ((m * nm + l * nl) / w, (m * nl - l * nm) / w)
        } else {
            (zero, zero)
        };
        Components { sym_winning, sym_losing, perp_winning, perp_losing }
    }

    /// Empirical angles of this state relative to the second oracle.
    ///
    /// `φ` is taken from the magnitudes of the symmetric overlaps, so it lies in
    /// `[0, π/2]` regardless of global phase. `χ` defaults to `π/2` when the perpendicular
    /// component vanishes.
    pub fn measure_decomposition(&self) -> AngleSet<T> {
        let comps = self.components();
        let half_pi = T::FRAC_PI_2();
        let phi = comps.sym_winning.norm().atan2(comps.sym_losing.norm());
        let perp = comps.perpendicular_weight();
        let epsilon = perp.min(T::one()).sqrt().asin();
        let tiny = T::epsilon() * T::epsilon() * T::lit(64.0);
        let chi = if perp <= tiny {
            half_pi
        } else {
            (comps.perp_winning.norm_sqr() / perp).min(T::one()).sqrt().asin()
        };
        let alpha = self.success_probability(Oracle::First).min(T::one()).sqrt().asin();
        let [_, _, p, l] = self.amps;
        let losing_tilde = p.norm_sqr() + l.norm_sqr();
        let beta = if losing_tilde > tiny {
            (p.norm_sqr() / losing_tilde).min(T::one()).sqrt().asin()
        } else {
            crate::analytic::beta_angle(&self.sizes)
        };
        let (nu_tilde, nu) = crate::analytic::base_angles::<T>(&self.sizes);
        AngleSet { nu_tilde, nu, alpha, beta, phi, epsilon, chi, delta: T::zero() }
    }
}

pub(crate) fn class_counts(sizes: &ClassSizes) -> [u64; 4] {
    [sizes.n_a, sizes.n_minus, sizes.n_plus, sizes.n_ell]
}

/// One recorded point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow<T> {
    /// Number of oracle queries performed so far.
    pub step: usize,
    /// Oracle used for the query that produced this row (`None` for the initial state).
    pub oracle: Option<Oracle>,
    /// Success probability with respect to the first oracle.
    pub p_first: T,
    /// Success probability with respect to the second oracle.
    pub p_second: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTrajectory<T> {
    pub sizes: ClassSizes,
    pub schedule: PhaseSchedule,
    /// `rows[k]` holds the state after `k` queries; `rows[0]` is the uniform state.
    pub rows: Vec<(TraceRow<T>, ReducedState<T>)>,
}

impl<T: Real> ReducedTrajectory<T> {
    pub fn initial(&self) -> &ReducedState<T> {
        &self.rows[0].1
    }

    /// State at the phase boundary (after all first-oracle queries).
    pub fn boundary(&self) -> &ReducedState<T> {
        &self.rows[self.schedule.k_first].1
    }

    pub fn final_state(&self) -> &ReducedState<T> {
        &self.rows[self.rows.len() - 1].1
    }

    /// Rows after each query, excluding the initial state.
    pub fn steps(&self) -> impl Iterator<Item = &TraceRow<T>> {
        self.rows.iter().skip(1).map(|(row, _)| row)
    }

    pub fn probabilities(&self) -> Vec<TraceRow<T>> {
        self.rows.iter().map(|(row, _)| *row).collect()
    }

    /// Second-oracle success at the end of the schedule.
    pub fn final_probability(&self) -> T {
        self.rows[self.rows.len() - 1].0.p_second
    }
}

fn trace_row<T: Real>(step: usize, oracle: Option<Oracle>, state: &ReducedState<T>) -> TraceRow<T> {
    TraceRow {
        step,
        oracle,
        p_first: state.success_probability(Oracle::First),
        p_second: state.success_probability(Oracle::Second),
    }
}

/// Runs `k_first` Grover iterations with the first oracle, then `j_second` with the
/// second, always reflecting about the initial uniform state.
pub fn run_schedule<T: Real>(sizes: ClassSizes, schedule: PhaseSchedule) -> ReducedTrajectory<T> {
    let pivot = ReducedState::<T>::init_uniform(sizes);
    let mut state = pivot;
    let mut rows = Vec::with_capacity(schedule.total() + 1);
    rows.push((trace_row(0, None, &state), state));
    for step in 1..=schedule.total() {
        let oracle = schedule.oracle_at(step);
        state = state.apply_oracle(oracle).reflect_unchecked(&pivot);
        rows.push((trace_row(step, Some(oracle), &state), state));
    }
    ReducedTrajectory { sizes, schedule, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, SQRT_2};

    fn sizes(a: u64, m: u64, p: u64, l: u64) -> ClassSizes {
        ClassSizes::new(a, m, p, l).unwrap()
    }

    fn re(state: &ReducedState<f64>) -> [f64; 4] {
        state.amplitudes().map(|a| a.re)
    }

    fn close(a: [f64; 4], b: [f64; 4], tol: f64) -> bool {
        a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() < tol)
    }

    #[test]
    fn uniform_initial_states() {
        let s = ReducedState::<f64>::init_uniform(sizes(1, 0, 1, 2));
        assert!(close(re(&s), [0.5, 0.0, 0.5, SQRT_2 / 2.0], 1e-15));
        let s = ReducedState::<f64>::init_uniform(sizes(0, 0, 0, 5));
        assert_eq!(re(&s), [0.0, 0.0, 0.0, 1.0]);
        let s = ReducedState::<f64>::init_uniform(sizes(5, 10, 5, 5000));
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn oracle_sign_flips() {
        let all_losing = ReducedState::<f64>::init_uniform(sizes(0, 0, 0, 5));
        assert_eq!(all_losing.apply_oracle(Oracle::Second), all_losing);

        let s = ReducedState::<f64>::init_uniform(sizes(1, 0, 1, 2));
        assert_eq!(s.apply_oracle(Oracle::First).apply_oracle(Oracle::First), s);
        assert!(close(re(&s.apply_oracle(Oracle::First)), [-0.5, 0.0, 0.5, SQRT_2 / 2.0], 1e-15));
    }

    #[test]
    fn diffusion_is_a_reflection() {
        let sz = sizes(1, 2, 3, 4);
        let pivot = ReducedState::<f64>::init_uniform(sz);
        let reflected = pivot.apply_diffusion(&pivot).unwrap();
        assert!(close(re(&reflected), re(&pivot).map(|x| -x), 1e-15));

        // a vector orthogonal to the uniform pivot inside the class space
        let amps = [0.2f64.sqrt(), -(0.1f64.sqrt()), 0.0, 0.0];
        let norm: f64 = amps.iter().map(|x| x * x).sum::<f64>().sqrt();
        let orth = ReducedState::from_amplitudes(sz, amps.map(|x| c(x / norm))).unwrap();
        assert!(orth.inner(&pivot).norm() < 1e-15);
        let out = orth.apply_diffusion(&pivot).unwrap();
        assert!(close(re(&out), re(&orth), 1e-15));
    }

    #[test]
    fn diffusion_rejects_unnormalized_pivot() {
        let sz = sizes(1, 0, 0, 3);
        let s = ReducedState::<f64>::init_uniform(sz);
        let mut bad = s;
        bad.amps[3] = c(2.0);
        assert!(matches!(s.apply_diffusion(&bad), Err(Error::NotNormalized(_))));
        let other = ReducedState::<f64>::init_uniform(sizes(1, 0, 0, 4));
        assert_eq!(s.apply_diffusion(&other), Err(Error::SizesMismatch));
    }

    #[test]
    fn single_query_on_four_items_finds_the_target() {
        let t = run_schedule::<f64>(sizes(1, 0, 0, 3), PhaseSchedule::new(0, 1));
        assert!((t.final_probability() - 1.0).abs() < 1e-15);
        let t = run_schedule::<f64>(sizes(1, 0, 0, 3), PhaseSchedule::new(1, 0));
        assert!((t.final_probability() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_schedule_is_a_uniform_guess() {
        let sz = sizes(2, 1, 3, 10);
        let t = run_schedule::<f64>(sz, PhaseSchedule::new(0, 0));
        assert_eq!(t.rows.len(), 1);
        assert!((t.final_probability() - 5.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn second_phase_only_follows_the_rotation_formula() {
        let sz = sizes(3, 0, 4, 200);
        let nu = (7.0f64 / 207.0).sqrt().asin();
        let t = run_schedule::<f64>(sz, PhaseSchedule::new(0, 12));
        for row in t.steps() {
            let expect = ((2 * row.step + 1) as f64 * nu).sin().powi(2);
            assert!((row.p_second - expect).abs() < 1e-12, "step {}", row.step);
        }
    }

    #[test]
    fn decomposition_of_uniform_state() {
        let s = ReducedState::<f64>::init_uniform(sizes(5, 10, 5, 5000));
        let angles = s.measure_decomposition();
        assert!(angles.epsilon.abs() < 1e-12);
        let (_, nu) = crate::analytic::base_angles::<f64>(&s.sizes());
        assert!((angles.phi - nu).abs() < 1e-12);
    }

    #[test]
    fn containment_perpendicular_part_is_winning() {
        let t = run_schedule::<f64>(sizes(3, 0, 7, 90), PhaseSchedule::new(2, 0));
        let angles = t.boundary().measure_decomposition();
        assert!(angles.epsilon > 1e-3);
        assert_eq!(angles.chi, FRAC_PI_2);
    }

    #[test]
    fn success_angle_state() {
        let sz = sizes(1, 0, 0, 3);
        let s = ReducedState::<f64>::with_success_angle(sz, Oracle::Second, 0.3).unwrap();
        assert!((s.success_probability(Oracle::Second) - 0.3f64.sin().powi(2)).abs() < 1e-15);
    }

    #[test]
    fn single_precision_runs() {
        let t = run_schedule::<f32>(sizes(1, 0, 0, 63), PhaseSchedule::new(0, 3));
        let expect = (7.0f32 * (1.0f32 / 8.0).asin()).sin().powi(2);
        assert!((t.final_probability() - expect).abs() < 1e-5);
    }
}
