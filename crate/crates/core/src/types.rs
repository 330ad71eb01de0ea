//! Partition, schedule and report types shared by every module.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Selects one of the two phase oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Oracle {
    /// The oracle available during the first phase (winning set `W̃`).
    First,
    /// The oracle available during the second phase (winning set `W`).
    Second,
}

/// Sorted, duplicate-free list of item indices.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ItemSet(Vec<usize>);

impl ItemSet {
    pub fn new(items: impl IntoIterator<Item = usize>) -> Self {
        let mut v: Vec<usize> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        ItemSet(v)
    }

    pub fn empty() -> Self {
        ItemSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: usize) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Fails with the first item not below `universe`.
    pub fn check_within(&self, universe: usize) -> Result<()> {
        match self.0.last() {
            Some(&item) if item >= universe => Err(Error::ItemOutOfRange { item, universe }),
            _ => Ok(()),
        }
    }

    /// Membership mask of length `universe`.
    pub fn mask(&self, universe: usize) -> Result<Vec<bool>> {
        self.check_within(universe)?;
        let mut mask = vec![false; universe];
        for i in self.iter() {
            mask[i] = true;
        }
        Ok(mask)
    }
}

impl FromIterator<usize> for ItemSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        ItemSet::new(iter)
    }
}

impl<const K: usize> From<[usize; K]> for ItemSet {
    fn from(items: [usize; K]) -> Self {
        ItemSet::new(items)
    }
}

/// Sizes of the four classes `W̃∩W`, `W̃∩L`, `L̃∩W`, `L̃∩L`.
///
/// These four counts determine the two-phase Grover dynamics completely.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassSizes {
    /// Items winning for both oracles.
    pub n_a: u64,
    /// Items winning only for the first oracle.
    pub n_minus: u64,
    /// Items winning only for the second oracle.
    pub n_plus: u64,
    /// Items losing for both oracles.
    pub n_ell: u64,
}

impl ClassSizes {
    pub fn new(n_a: u64, n_minus: u64, n_plus: u64, n_ell: u64) -> Result<Self> {
        let sizes = ClassSizes { n_a, n_minus, n_plus, n_ell };
        if sizes.total() == 0 {
            return Err(Error::EmptyUniverse);
        }
        Ok(sizes)
    }

    /// Counts the four intersections of two winning sets over `{0..universe_size-1}`.
    pub fn from_sets(winning_tilde: &ItemSet, winning: &ItemSet, universe_size: usize) -> Result<Self> {
        if universe_size == 0 {
            return Err(Error::EmptyUniverse);
        }
        winning_tilde.check_within(universe_size)?;
        winning.check_within(universe_size)?;
        let n_a = winning_tilde.iter().filter(|&i| winning.contains(i)).count() as u64;
        let n_minus = winning_tilde.len() as u64 - n_a;
        let n_plus = winning.len() as u64 - n_a;
        let n_ell = universe_size as u64 - n_a - n_minus - n_plus;
        ClassSizes::new(n_a, n_minus, n_plus, n_ell)
    }

    /// Canonical explicit sets realising these sizes: items are laid out class by class
    /// in the order `a`, `-`, `+`, `ℓ`.
    pub fn synthetic_sets(&self) -> (ItemSet, ItemSet) {
        let a = self.n_a as usize;
        let minus = self.n_minus as usize;
        let plus = self.n_plus as usize;
        let tilde = ItemSet::new(0..a + minus);
        let winning = ItemSet::new((0..a).chain(a + minus..a + minus + plus));
        (tilde, winning)
    }

    /// `N`
    pub fn total(&self) -> u64 {
        self.n_a + self.n_minus + self.n_plus + self.n_ell
    }

    /// `ñ = |W̃|`
    pub fn n_tilde(&self) -> u64 {
        self.n_a + self.n_minus
    }

    /// `n = |W|`
    pub fn n_winning(&self) -> u64 {
        self.n_a + self.n_plus
    }

    /// Size of the winning set of the given oracle.
    pub fn winning_count(&self, oracle: Oracle) -> u64 {
        match oracle {
            Oracle::First => self.n_tilde(),
            Oracle::Second => self.n_winning(),
        }
    }

    /// `W̃ ⊆ W`
    pub fn containment(&self) -> bool {
        self.n_minus == 0
    }

    /// Raising the first-oracle probability uniformly also raises the second-oracle
    /// probability iff `n_a·n_ℓ > n_+·n_-`.
    pub fn large_overlap(&self) -> bool {
        (self.n_a as u128) * (self.n_ell as u128) > (self.n_plus as u128) * (self.n_minus as u128)
    }

    /// Second-oracle success probability after the per-item probabilities on `W̃` are
    /// multiplied by `scale_w` and those on `L̃` are renormalised by the complementary
    /// factor `(N − scale_w·ñ)/(n_ℓ + n_+)`.
    pub fn overlap_probability_shift<T: Real>(&self, scale_w: T) -> Result<T> {
        let total = T::count(self.total());
        let n_tilde = T::count(self.n_tilde());
        let losing_tilde = self.n_ell + self.n_plus;
        let max = if self.n_tilde() == 0 { T::infinity() } else { total / n_tilde };
        if scale_w.is_nan() || scale_w < T::zero() || scale_w > max {
            return Err(Error::ScaleOutOfRange { scale: scale_w.as_f64(), max: max.as_f64() });
        }
        if losing_tilde == 0 {
            // No complementary class to absorb the rescaling: only the identity is admissible.
            if scale_w != T::one() {
                return Err(Error::ScaleOutOfRange { scale: scale_w.as_f64(), max: 1.0 });
            }
            return Ok(T::count(self.n_a) / total);
        }
        let overlap = (self.n_a as i128) * (self.n_ell as i128) - (self.n_plus as i128) * (self.n_minus as i128);
        let overlap = T::from_i128(overlap).expect("overlap representable");
        let denom = T::count(losing_tilde);
        let p = T::count(self.n_plus) / denom + scale_w * overlap / (total * denom);
        clamp_probability(p)
    }
}

/// Query budget for the two phases.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PhaseSchedule {
    /// Queries to the first oracle.
    pub k_first: usize,
    /// Queries to the second oracle.
    pub j_second: usize,
}

impl PhaseSchedule {
    pub fn new(k_first: usize, j_second: usize) -> Self {
        PhaseSchedule { k_first, j_second }
    }

    pub fn total(&self) -> usize {
        self.k_first + self.j_second
    }

    /// Oracle queried at 1-based step `step`.
    pub fn oracle_at(&self, step: usize) -> Oracle {
        if step <= self.k_first {
            Oracle::First
        } else {
            Oracle::Second
        }
    }
}

/// Every angle describing one two-phase run, in radians.
///
/// `epsilon` is the magnitude of the perpendicular component; its sign along `w_⊥` is
/// reported separately by the reduced simulator.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AngleSet<T> {
    pub nu_tilde: T,
    pub nu: T,
    pub alpha: T,
    pub beta: T,
    pub phi: T,
    pub epsilon: T,
    pub chi: T,
    pub delta: T,
}

/// Success probabilities of one two-phase run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SuccessReport<T> {
    /// Second-oracle success at the phase boundary.
    pub p_first: T,
    /// Second-oracle success after the full schedule.
    pub p_final: T,
    /// Success of the symmetric part, `sin²(φ+Δ)`.
    pub p_sym: T,
    /// Success of the perpendicular part, `sin²χ`.
    pub p_perp: T,
    /// `1 − (1 − p_first)·cos²(φ+Δ)/cos²φ`
    pub upper_bound: T,
    /// `1 − sin²ε·cos²χ`
    pub ceiling: T,
}

pub(crate) const PROBABILITY_SLACK: f64 = 1e-12;

/// Clamps rounding excursions of at most 1e-12 into `[0, 1]`; larger ones are errors.
pub fn clamp_probability<T: Real>(p: T) -> Result<T> {
    let slack = T::lit(PROBABILITY_SLACK);
    if p.is_nan() || p < -slack || p > T::one() + slack {
        return Err(Error::ProbabilityOutOfRange(p.as_f64()));
    }
    Ok(p.max(T::zero()).min(T::one()))
}
