//! Brute-force certification of the optimality statements behind two-phase Grover search.
//!
//! * Averaged strategies: a strategy conditioned on an `N!`-dimensional permutation label
//!   register succeeds with the same probability under every relabelling of the items,
//!   namely the relabelling-average of the original strategy.
//! * Query lower bounds: for `J` queries to oracles marking `n` of `N` items,
//!   `2D − 2D√(p·n/N) − 2D√((1−p)(1−n/N)) ≤ Σ_y ‖φ_J − φ_J^y‖² ≤ 4D·sin²(Jν)` with
//!   `D = C(N, n)`; Grover iterations saturate both sides.
//! * Grover success equals `sin²((2k+1)ν)` throughout the no-over-rotation window.

use itertools::Itertools;
use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::{base_angles, grover_reference_probability};
use crate::error::{Error, Result};
use crate::full::{run_grover_schedule, AVERAGED_CAP, GROVER_CAP, UNITARY_CAP};
use crate::linalg::{distance_sqr, norm_sqr, random_state, CMatrix};
use crate::reduced::{norm_tolerance, run_schedule};
use crate::scalar::{c, sin2, Real};
use crate::types::{ClassSizes, ItemSet, PhaseSchedule};

/// Tolerance for the saturation flags of [`BoundReport`].
pub const SATURATION_TOL: f64 = 1e-9;
/// Largest number of oracles enumerated by the distance sum.
pub const ORACLE_CAP: u128 = 100_000;

/// A permutation of `{0..n-1}`, acting on basis states as `|x⟩ ↦ |σ(x)⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        (0..n).permutations(n).map(Permutation).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, x: usize) -> usize {
        self.0[x]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &s) in self.0.iter().enumerate() {
            inv[s] = i;
        }
        Permutation(inv)
    }

    /// `σ(S)`
    pub fn image(&self, set: &ItemSet) -> ItemSet {
        set.iter().map(|x| self.apply(x)).collect()
    }
}

/// A query strategy `T = ({U_k}, |ψ(0)⟩)` on the system register (dimension `N`) tensored
/// with an ancilla (dimension `B`). Basis index of `|a⟩|b⟩` is `a·B + b`.
///
/// Each query applies the phase oracle to the system register and then the next unitary.
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy<T> {
    n_items: usize,
    ancilla_dim: usize,
    initial: Vec<Complex<T>>,
    unitaries: Vec<CMatrix<T>>,
}

impl<T: Real> Strategy<T> {
    pub fn new(n_items: usize, ancilla_dim: usize, initial: Vec<Complex<T>>, unitaries: Vec<CMatrix<T>>) -> Result<Self> {
        if n_items == 0 || ancilla_dim == 0 {
            return Err(Error::EmptyUniverse);
        }
        let dim = n_items * ancilla_dim;
        if dim > UNITARY_CAP {
            return Err(Error::DenseCapExceeded { n: dim, cap: UNITARY_CAP });
        }
        if initial.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: initial.len() });
        }
        let norm = norm_sqr(&initial);
        if (norm - T::one()).abs() > norm_tolerance::<T>() {
            return Err(Error::NotNormalized(norm.as_f64()));
        }
        for u in &unitaries {
            if u.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: u.dim() });
            }
            u.check_unitary(T::lit(1e-10))?;
        }
        Ok(Strategy { n_items, ancilla_dim, initial, unitaries })
    }

    /// Grover iterations: uniform start, every unitary the reflection about it.
    pub fn grover(n_items: usize, queries: usize) -> Result<Self> {
        let uniform = vec![c(T::one() / T::count(n_items as u64).sqrt()); n_items];
        let reflection = CMatrix::reflection_about(&uniform);
        Strategy::new(n_items, 1, uniform, vec![reflection; queries])
    }

    /// Uniform start and identity unitaries: never uses the oracle's answers.
    pub fn idle(n_items: usize, queries: usize) -> Result<Self> {
        let uniform = vec![c(T::one() / T::count(n_items as u64).sqrt()); n_items];
        Strategy::new(n_items, 1, uniform, vec![CMatrix::identity(n_items); queries])
    }

    /// Random initial state and Haar-random unitaries.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, n_items: usize, ancilla_dim: usize, queries: usize) -> Result<Self>
    where
        StandardNormal: Distribution<T>,
    {
        let dim = n_items * ancilla_dim;
        let initial = random_state(rng, dim);
        let unitaries = (0..queries).map(|_| CMatrix::random_unitary(rng, dim)).collect();
        Strategy::new(n_items, ancilla_dim, initial, unitaries)
    }

    pub fn n_items(&self) -> usize {
        self.n_items
    }

    pub fn ancilla_dim(&self) -> usize {
        self.ancilla_dim
    }

    pub fn dim(&self) -> usize {
        self.n_items * self.ancilla_dim
    }

    pub fn queries(&self) -> usize {
        self.unitaries.len()
    }

    pub fn initial(&self) -> &[Complex<T>] {
        &self.initial
    }

    pub fn unitaries(&self) -> &[CMatrix<T>] {
        &self.unitaries
    }

    /// Final state after querying `oracles[k]` before unitary `k`. An empty set is the
    /// empty (identity) oracle.
    pub fn run(&self, oracles: &[ItemSet]) -> Result<Vec<Complex<T>>> {
        run_register(&self.initial, &self.unitaries, oracles, self.n_items, self.ancilla_dim, 1)
    }

    /// Probability that measuring the system register yields an item of `target`.
    pub fn success(&self, state: &[Complex<T>], target: &ItemSet) -> Result<T> {
        register_success(state, target, self.n_items, self.ancilla_dim, 1)
    }

    /// `p_T(σ)`: success when every oracle and the target are relabelled by `σ`.
    pub fn permuted_success(&self, oracles: &[ItemSet], target: &ItemSet, sigma: &Permutation) -> Result<T> {
        check_sigma(sigma, self.n_items)?;
        let permuted: Vec<ItemSet> = oracles.iter().map(|o| sigma.image(o)).collect();
        let state = self.run(&permuted)?;
        self.success(&state, &sigma.image(target))
    }

    /// `p̄_T`: average of [`Self::permuted_success`] over all `N!` relabellings.
    pub fn mean_success(&self, oracles: &[ItemSet], target: &ItemSet) -> Result<T> {
        let perms = Permutation::all(self.n_items);
        let mut acc = T::zero();
        for sigma in &perms {
            acc = acc + self.permuted_success(oracles, target, sigma)?;
        }
        Ok(acc / T::count(perms.len() as u64))
    }
}

fn check_sigma(sigma: &Permutation, n_items: usize) -> Result<()> {
    if sigma.len() != n_items {
        return Err(Error::DimensionMismatch { expected: n_items, found: sigma.len() });
    }
    Ok(())
}

/// Index layout `γ·(N·B) + a·B + b`; `labels` is the number of `γ` blocks.
fn run_register<T: Real>(
    initial: &[Complex<T>],
    unitaries: &[CMatrix<T>],
    oracles: &[ItemSet],
    n_items: usize,
    ancilla_dim: usize,
    labels: usize,
) -> Result<Vec<Complex<T>>> {
    if oracles.len() != unitaries.len() {
        return Err(Error::DimensionMismatch { expected: unitaries.len(), found: oracles.len() });
    }
    let mut state = initial.to_vec();
    for (oracle, u) in oracles.iter().zip(unitaries) {
        oracle.check_within(n_items)?;
        for gamma in 0..labels {
            for a in oracle.iter() {
                let base = (gamma * n_items + a) * ancilla_dim;
                for amp in &mut state[base..base + ancilla_dim] {
                    *amp = -*amp;
                }
            }
        }
        state = u.matvec(&state)?;
    }
    Ok(state)
}

fn register_success<T: Real>(
    state: &[Complex<T>],
    target: &ItemSet,
    n_items: usize,
    ancilla_dim: usize,
    labels: usize,
) -> Result<T> {
    target.check_within(n_items)?;
    let mut p = T::zero();
    for gamma in 0..labels {
        for a in target.iter() {
            let base = (gamma * n_items + a) * ancilla_dim;
            p = p + norm_sqr(&state[base..base + ancilla_dim]);
        }
    }
    Ok(p)
}

/// The averaged strategy `T̄` of a base strategy, materialised on the enlarged register
/// `A ⊗ B ⊗ C` with `dim C = N!`: initial state `N!^{-1/2} Σ_γ σ_γ†|ψ(0)⟩|γ⟩` and unitaries
/// `Σ_γ σ_γ† U_k σ_γ ⊗ |γ⟩⟨γ|`.
#[derive(Debug, Clone)]
pub struct PermutationStrategy<T> {
    base: Strategy<T>,
    labels: Vec<Permutation>,
    initial: Vec<Complex<T>>,
    unitaries: Vec<CMatrix<T>>,
}

impl<T: Real> PermutationStrategy<T> {
    pub fn averaged(base: Strategy<T>) -> Result<Self> {
        let n = base.n_items;
        if n > AVERAGED_CAP {
            return Err(Error::DenseCapExceeded { n, cap: AVERAGED_CAP });
        }
        let labels = Permutation::all(n);
        let block = base.dim();
        let dim = block * labels.len();
        let bdim = base.ancilla_dim;
        let scale = T::one() / T::count(labels.len() as u64).sqrt();
        // block index (a, b) ↦ (σ(a), b)
        let lift = |sigma: &Permutation, i: usize| sigma.apply(i / bdim) * bdim + i % bdim;

        let mut initial = vec![c(T::zero()); dim];
        for (gamma, sigma) in labels.iter().enumerate() {
            for i in 0..block {
                initial[gamma * block + i] = base.initial[lift(sigma, i)] * scale;
            }
        }
        let unitaries = base
            .unitaries
            .iter()
            .map(|u| {
                let mut m = CMatrix::zeros(dim);
                for (gamma, sigma) in labels.iter().enumerate() {
                    let off = gamma * block;
                    for i in 0..block {
                        for j in 0..block {
                            m.set(off + i, off + j, u.get(lift(sigma, i), lift(sigma, j)));
                        }
                    }
                }
                m
            })
            .collect();
        Ok(PermutationStrategy { base, labels, initial, unitaries })
    }

    pub fn base(&self) -> &Strategy<T> {
        &self.base
    }

    /// `N·B·N!`
    pub fn register_dim(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &[Complex<T>] {
        &self.initial
    }

    pub fn unitaries(&self) -> &[CMatrix<T>] {
        &self.unitaries
    }

    /// `p_T̄(σ)`: success of the averaged strategy when the oracles and the target are
    /// relabelled by `σ`.
    pub fn average_strategy_success(&self, oracles: &[ItemSet], target: &ItemSet, sigma: &Permutation) -> Result<T> {
        let n = self.base.n_items;
        check_sigma(sigma, n)?;
        let permuted: Vec<ItemSet> = oracles.iter().map(|o| sigma.image(o)).collect();
        let labels = self.labels.len();
        let state = run_register(&self.initial, &self.unitaries, &permuted, n, self.base.ancilla_dim, labels)?;
        register_success(&state, &sigma.image(target), n, self.base.ancilla_dim, labels)
    }
}

/// Outcome of the averaged-strategy check for one base strategy.
#[derive(Debug, Clone, Serialize)]
pub struct AveragingReport {
    pub n_items: usize,
    pub queries: usize,
    /// `p̄_T` by enumeration of the base strategy over all relabellings.
    pub mean_success: f64,
    /// `p_T̄(σ)` for every `σ`, in lexicographic order.
    pub averaged_success: Vec<f64>,
    /// `max_σ |p_T̄(σ) − p̄_T|`
    pub max_deviation: f64,
}

/// Compares the averaged strategy against the relabelling average of its base.
pub fn check_averaging<T: Real>(base: Strategy<T>, oracles: &[ItemSet], target: &ItemSet) -> Result<AveragingReport> {
    let mean = base.mean_success(oracles, target)?;
    let n_items = base.n_items;
    let queries = base.queries();
    let averaged = PermutationStrategy::averaged(base)?;
    let per_sigma = Permutation::all(n_items)
        .iter()
        .map(|sigma| averaged.average_strategy_success(oracles, target, sigma))
        .collect::<Result<Vec<T>>>()?;
    let max_deviation = per_sigma.iter().fold(T::zero(), |acc, p| acc.max((*p - mean).abs()));
    Ok(AveragingReport {
        n_items,
        queries,
        mean_success: mean.as_f64(),
        averaged_success: per_sigma.iter().map(|p| p.as_f64()).collect(),
        max_deviation: max_deviation.as_f64(),
    })
}

/// Oracle sequence with `k_first` queries to `winning_tilde` followed by `j_second` to
/// `winning`.
pub fn changing_oracles(winning_tilde: &ItemSet, winning: &ItemSet, schedule: PhaseSchedule) -> Vec<ItemSet> {
    (1..=schedule.total())
        .map(|k| if k <= schedule.k_first { winning_tilde.clone() } else { winning.clone() })
        .collect()
}

/// `C(n, k)` as `u128`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Distance sum and average success over all `D = C(N, n)` oracles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceSum<T> {
    /// `Σ_y ‖φ_J − φ_J^y‖²`
    pub sum: T,
    /// Computational-basis success of `φ_J^y`, averaged over `y`.
    pub mean_success: T,
    pub oracles: u128,
}

/// Evolves the strategy once with the empty oracle (`φ_J`) and once per `n`-item oracle
/// (`φ_J^y`), using identical unitaries and sign conventions for both.
pub fn zalka_distance_sum<T: Real>(strategy: &Strategy<T>, n_winning: usize) -> Result<DistanceSum<T>> {
    let n_items = strategy.n_items;
    if n_winning > n_items {
        return Err(Error::ItemOutOfRange { item: n_winning, universe: n_items });
    }
    let d = binomial(n_items as u64, n_winning as u64);
    if d > ORACLE_CAP {
        return Err(Error::EnumerationCapExceeded { what: "oracle count", count: d, cap: ORACLE_CAP });
    }
    let queries = strategy.queries();
    let empty = strategy.run(&vec![ItemSet::empty(); queries])?;
    let oracles: Vec<ItemSet> = (0..n_items).combinations(n_winning).map(ItemSet::new).collect();
    let per_oracle = oracles
        .par_iter()
        .map(|y| {
            let marked = strategy.run(&vec![y.clone(); queries])?;
            Ok((distance_sqr(&empty, &marked), strategy.success(&marked, y)?))
        })
        .collect::<Result<Vec<(T, T)>>>()?;
    let (sum, success) = per_oracle
        .iter()
        .fold((T::zero(), T::zero()), |(s, p), (ds, dp)| (s + *ds, p + *dp));
    let count = T::count(oracles.len() as u64);
    Ok(DistanceSum { sum, mean_success: success / count, oracles: d })
}

/// Both sides of the lower-bound chain for one `(N, n, J)` instance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub n_items: usize,
    pub n_winning: usize,
    /// `D = C(N, n)`
    pub oracles: u128,
    pub queries: usize,
    pub p: f64,
    pub lhs: f64,
    pub middle: f64,
    pub rhs: f64,
    /// `Jν ≤ π/2`
    pub in_window: bool,
    pub saturated_lhs: bool,
    pub saturated_rhs: bool,
}

impl BoundReport {
    pub fn lower_holds(&self, tol: f64) -> bool {
        self.lhs <= self.middle + tol
    }

    pub fn upper_holds(&self, tol: f64) -> bool {
        self.middle <= self.rhs + tol
    }

    pub fn chain_holds(&self, tol: f64) -> bool {
        self.lower_holds(tol) && self.upper_holds(tol)
    }
}

/// `lhs = 2D − 2D√(p·n/N) − 2D√((1−p)(1−n/N))` and `rhs = 4D·sin²(Jν)` around a measured
/// distance sum `middle`.
pub fn zalka_bounds<T: Real>(p: T, middle: T, n_items: usize, n_winning: usize, queries: usize) -> Result<BoundReport> {
    let p = crate::types::clamp_probability(p)?;
    let d = binomial(n_items as u64, n_winning as u64);
    let dd = T::lit(d as f64);
    let two = T::lit(2.0);
    let frac = T::count(n_winning as u64) / T::count(n_items as u64);
    let lhs = two * dd - two * dd * (p * frac).sqrt() - two * dd * ((T::one() - p) * (T::one() - frac)).sqrt();
    let nu = frac.sqrt().asin();
    let j = T::count(queries as u64);
    let rhs = T::lit(4.0) * dd * sin2(j * nu);
    let tol = T::lit(SATURATION_TOL);
    Ok(BoundReport {
        n_items,
        n_winning,
        oracles: d,
        queries,
        p: p.as_f64(),
        lhs: lhs.as_f64(),
        middle: middle.as_f64(),
        rhs: rhs.as_f64(),
        in_window: j * nu <= T::FRAC_PI_2() + T::lit(1e-12),
        saturated_lhs: (lhs - middle).abs() <= tol,
        saturated_rhs: (rhs - middle).abs() <= tol,
    })
}

/// Distance sum plus both bounds for one strategy.
pub fn certify_strategy<T: Real>(strategy: &Strategy<T>, n_winning: usize) -> Result<BoundReport> {
    let ds = zalka_distance_sum(strategy, n_winning)?;
    zalka_bounds(ds.mean_success, ds.sum, strategy.n_items, n_winning, strategy.queries())
}

/// One row of the single-oracle Grover window scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WindowRow {
    pub k: usize,
    pub simulated: f64,
    pub closed_form: f64,
    /// `(2k+1)ν ≤ π/2`
    pub in_window: bool,
}

/// Simulated single-oracle Grover success against `sin²((2k+1)ν)` for `k = 0..=k_max`.
/// Uses the dense simulator when `N` fits, the reduced one otherwise.
pub fn lemma2_window_scan<T: Real>(n_items: usize, n_winning: usize, k_max: usize) -> Result<Vec<WindowRow>> {
    if n_winning > n_items {
        return Err(Error::ItemOutOfRange { item: n_winning, universe: n_items });
    }
    let sizes = ClassSizes::new(0, 0, n_winning as u64, (n_items - n_winning) as u64)?;
    let schedule = PhaseSchedule::new(0, k_max);
    let simulated: Vec<T> = if n_items <= GROVER_CAP {
        let winning = ItemSet::new(0..n_winning);
        run_grover_schedule::<T>(n_items, &ItemSet::empty(), &winning, schedule)?
            .rows
            .iter()
            .map(|r| r.p_second)
            .collect()
    } else {
        run_schedule::<T>(sizes, schedule).rows.iter().map(|(r, _)| r.p_second).collect()
    };
    let (_, nu) = base_angles::<T>(&sizes);
    Ok(simulated
        .iter()
        .enumerate()
        .map(|(k, p)| {
            let reference = grover_reference_probability(k, nu);
            WindowRow { k, simulated: p.as_f64(), closed_form: reference.value.as_f64(), in_window: reference.in_window }
        })
        .collect())
}

/// Largest `k` with `(2k+1)ν ≤ π/2`.
pub fn window_end(n_items: usize, n_winning: usize) -> usize {
    if n_winning == 0 {
        return usize::MAX;
    }
    let nu = (n_winning as f64 / n_items as f64).sqrt().asin();
    let k = ((std::f64::consts::FRAC_PI_2 / nu - 1.0) / 2.0 + 1e-12).floor();
    k.max(0.0) as usize
}
