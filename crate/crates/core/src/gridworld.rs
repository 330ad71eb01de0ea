//! Deterministic grid worlds compiled into changing-oracle search instances.
//!
//! An agent acts for a fixed number of steps. A sequence is rewarded when the agent visits
//! the goal at or before its last step (the goal is absorbing). Searching length-`m`
//! sequences and then length-`M` sequences becomes a search over the length-`M` space with
//! `W̃` = sequences whose length-`m` prefix is rewarded and `W` = rewarded sequences, so
//! `W̃ ⊆ W` always.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::analytic::predict;
use crate::error::{Error, Result};
use crate::full::{run_grover_schedule, GROVER_CAP};
use crate::reduced::{run_schedule, TraceRow};
use crate::scalar::Real;
use crate::types::{ClassSizes, ItemSet, PhaseSchedule, SuccessReport};

/// Largest number of length-`M` sequences [`GridWorld::compile`] will enumerate.
pub const SEQUENCE_CAP: u128 = 10_000_000;
/// Agreement required between simulators and the closed form in [`end_to_end`].
pub const AGREEMENT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
}

impl Action {
    pub const ALL: [Action; 4] = [Action::Up, Action::Down, Action::Left, Action::Right];

    pub fn symbol(self) -> char {
        match self {
            Action::Up => 'U',
            Action::Down => 'D',
            Action::Left => 'L',
            Action::Right => 'R',
        }
    }

    pub fn from_symbol(c: char) -> Result<Self> {
        match c {
            'U' => Ok(Action::Up),
            'D' => Ok(Action::Down),
            'L' => Ok(Action::Left),
            'R' => Ok(Action::Right),
            other => Err(Error::UnknownAction(other)),
        }
    }

    fn delta(self) -> (isize, isize) {
        match self {
            Action::Up => (0, -1),
            Action::Down => (0, 1),
            Action::Left => (-1, 0),
            Action::Right => (1, 0),
        }
    }
}

/// Column `x`, row `y`; `(0, 0)` is the top-left cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub fn new(x: usize, y: usize) -> Self {
        Cell { x, y }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridWorld {
    width: usize,
    height: usize,
    walls: BTreeSet<Cell>,
    start: Cell,
    goal: Cell,
    actions: Vec<Action>,
    m: usize,
    big_m: usize,
}

impl GridWorld {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        width: usize,
        height: usize,
        walls: impl IntoIterator<Item = Cell>,
        start: Cell,
        goal: Cell,
        actions: Vec<Action>,
        m: usize,
        big_m: usize,
    ) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidGrid("grid has no cells".into()));
        }
        let walls: BTreeSet<Cell> = walls.into_iter().collect();
        for (name, cell) in [("start", start), ("goal", goal)] {
            if cell.x >= width || cell.y >= height {
                return Err(Error::InvalidGrid(format!("{name} {cell:?} lies outside the grid")));
            }
            if walls.contains(&cell) {
                return Err(Error::InvalidGrid(format!("{name} {cell:?} is a wall")));
            }
        }
        if actions.is_empty() {
            return Err(Error::InvalidGrid("no actions".into()));
        }
        let distinct: BTreeSet<Action> = actions.iter().copied().collect();
        if distinct.len() != actions.len() {
            return Err(Error::InvalidGrid("repeated action".into()));
        }
        if m > big_m {
            return Err(Error::InvalidGrid(format!("m = {m} exceeds M = {big_m}")));
        }
        Ok(GridWorld { width, height, walls, start, goal, actions, m, big_m })
    }

    /// Open grid with the four default actions.
    pub fn open(width: usize, height: usize, start: Cell, goal: Cell, m: usize, big_m: usize) -> Result<Self> {
        GridWorld::new(width, height, [], start, goal, Action::ALL.to_vec(), m, big_m)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn start(&self) -> Cell {
        self.start
    }

    pub fn goal(&self) -> Cell {
        self.goal
    }

    pub fn actions(&self) -> &[Action] {
        &self.actions
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn big_m(&self) -> usize {
        self.big_m
    }

    /// Same world with different episode lengths.
    pub fn with_lengths(&self, m: usize, big_m: usize) -> Result<Self> {
        GridWorld::new(self.width, self.height, self.walls.clone(), self.start, self.goal, self.actions.clone(), m, big_m)
    }

    /// Moves off the grid or into a wall leave the agent in place.
    pub fn step(&self, from: Cell, action: Action) -> Cell {
        let (dx, dy) = action.delta();
        let (x, y) = (from.x as isize + dx, from.y as isize + dy);
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return from;
        }
        let to = Cell::new(x as usize, y as usize);
        if self.walls.contains(&to) {
            from
        } else {
            to
        }
    }

    /// Whether the agent visits the goal at or before the end of `sequence`.
    pub fn is_rewarded(&self, sequence: &[Action]) -> Result<bool> {
        if sequence.len() > self.big_m {
            return Err(Error::SequenceTooLong { len: sequence.len(), max: self.big_m });
        }
        let mut at = self.start;
        if at == self.goal {
            return Ok(true);
        }
        for &a in sequence {
            if !self.actions.contains(&a) {
                return Err(Error::UnknownAction(a.symbol()));
            }
            at = self.step(at, a);
            if at == self.goal {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// [`Self::is_rewarded`] on a string of action symbols.
    pub fn is_rewarded_str(&self, sequence: &str) -> Result<bool> {
        let actions = sequence.chars().map(|c| self.parse_action(c)).collect::<Result<Vec<_>>>()?;
        self.is_rewarded(&actions)
    }

    fn parse_action(&self, c: char) -> Result<Action> {
        match Action::from_symbol(c) {
            Ok(a) if self.actions.contains(&a) => Ok(a),
            _ => Err(Error::UnknownAction(c)),
        }
    }

    /// `|A|^M`
    pub fn sequence_count(&self) -> Option<u128> {
        (self.actions.len() as u128).checked_pow(u32::try_from(self.big_m).ok()?)
    }

    /// Enumerates all length-`M` sequences. Sequence `i` spells `i` in base `|A|`, most
    /// significant digit first, with digit `d` meaning `actions[d]`.
    pub fn compile(&self) -> Result<CompiledInstance> {
        let count = self.sequence_count().unwrap_or(u128::MAX);
        if count > SEQUENCE_CAP {
            return Err(Error::EnumerationCapExceeded { what: "action sequences", count, cap: SEQUENCE_CAP });
        }
        let explicit = count <= GROVER_CAP as u128;
        let home = self.start == self.goal;
        let blocks: Vec<Tally> = if self.big_m == 0 {
            let mut tally = Tally::default();
            self.walk(self.start, 0, 0, home, false, explicit, &mut tally);
            vec![tally]
        } else {
            // one block per first action
            let prefix_hit = self.m == 0 && home;
            (0..self.actions.len())
                .into_par_iter()
                .map(|d| {
                    let mut tally = Tally::default();
                    let at = self.step(self.start, self.actions[d]);
                    self.walk(at, 1, d, home || at == self.goal, prefix_hit, explicit, &mut tally);
                    tally
                })
                .collect()
        };
        let mut total = Tally::default();
        for b in blocks {
            total.merge(b);
        }
        if total.counts[1] > 0 {
            return Err(Error::PrefixContainmentViolated { count: total.counts[1] });
        }
        let [n_a, n_minus, n_plus, n_ell] = total.counts;
        let sizes = ClassSizes::new(n_a, n_minus, n_plus, n_ell)?;
        let sets = explicit.then(|| (ItemSet::new(total.first), ItemSet::new(total.second)));
        Ok(CompiledInstance { sizes, m: self.m, big_m: self.big_m, n_items: sizes.total(), sets })
    }

    /// `reached`: goal visited within the first `depth` steps; `prefix_hit`: visited within
    /// the first `min(depth, m)` steps, final once `depth ≥ m`.
    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        at: Cell,
        depth: usize,
        index: usize,
        reached: bool,
        prefix_hit: bool,
        explicit: bool,
        tally: &mut Tally,
    ) {
        let prefix_hit = if depth == self.m { reached } else { prefix_hit };
        if depth == self.big_m {
            tally.record(index, prefix_hit, reached, explicit);
            return;
        }
        for (d, &a) in self.actions.iter().enumerate() {
            let next = self.step(at, a);
            let child = index * self.actions.len() + d;
            self.walk(next, depth + 1, child, reached || next == self.goal, prefix_hit, explicit, tally);
        }
    }
}

#[derive(Default)]
struct Tally {
    /// class counts in the order a, minus, plus, ell
    counts: [u64; 4],
    first: Vec<usize>,
    second: Vec<usize>,
}

impl Tally {
    fn record(&mut self, index: usize, first: bool, second: bool, explicit: bool) {
        let class = match (first, second) {
            (true, true) => 0,
            (true, false) => 1,
            (false, true) => 2,
            (false, false) => 3,
        };
        self.counts[class] += 1;
        if explicit {
            if first {
                self.first.push(index);
            }
            if second {
                self.second.push(index);
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        for (c, o) in self.counts.iter_mut().zip(other.counts) {
            *c += o;
        }
        self.first.extend(other.first);
        self.second.extend(other.second);
    }
}

/// Class sizes of a compiled grid world, plus the explicit winning sets when the
/// sequence space is small enough for the dense simulator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompiledInstance {
    pub sizes: ClassSizes,
    pub m: usize,
    #[serde(rename = "M")]
    pub big_m: usize,
    #[serde(rename = "N")]
    pub n_items: u64,
    #[serde(skip)]
    pub sets: Option<(ItemSet, ItemSet)>,
}

/// Result of running a compiled grid world through every available route.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EndToEnd<T> {
    pub instance: CompiledInstance,
    pub schedule: PhaseSchedule,
    /// Reduced-simulator trajectory, including the initial state.
    pub trajectory: Vec<TraceRow<T>>,
    pub reduced: T,
    /// Dense-simulator success when explicit sets are available.
    pub full: Option<T>,
    /// Closed-form report when the first phase stays within the angle window.
    pub analytic: Option<SuccessReport<T>>,
    /// Largest pairwise disagreement among the available routes.
    pub max_delta: T,
}

/// Compiles the world, runs the schedule on every available route and checks that they
/// agree within [`AGREEMENT_TOL`].
pub fn end_to_end<T: Real>(env: &GridWorld, schedule: PhaseSchedule) -> Result<EndToEnd<T>> {
    let instance = env.compile()?;
    let traj = run_schedule::<T>(instance.sizes, schedule);
    let reduced = traj.final_probability();
    let full = match &instance.sets {
        Some((first, second)) => {
            let full = run_grover_schedule::<T>(instance.n_items as usize, first, second, schedule)?;
            let mut worst = T::zero();
            for (row, (reduced_row, _)) in full.rows.iter().zip(&traj.rows) {
                worst = worst
                    .max((row.p_first - reduced_row.p_first).abs())
                    .max((row.p_second - reduced_row.p_second).abs());
            }
            check("dense vs reduced trajectory", worst)?;
            Some(full.final_probability())
        }
        None => None,
    };
    let analytic = match predict::<T>(&instance.sizes, schedule) {
        Ok((_, report)) => Some(report),
        Err(Error::AngleOutOfWindow { .. }) => None,
        Err(e) => return Err(e),
    };
    let values: Vec<T> = [Some(reduced), full, analytic.map(|r| r.p_final)].into_iter().flatten().collect();
    let mut max_delta = T::zero();
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            max_delta = max_delta.max((*a - *b).abs());
        }
    }
    check("end-to-end agreement", max_delta)?;
    Ok(EndToEnd { instance, schedule, trajectory: traj.probabilities(), reduced, full, analytic, max_delta })
}

fn check<T: Real>(what: &'static str, delta: T) -> Result<()> {
    if delta.as_f64() > AGREEMENT_TOL {
        return Err(Error::CrossCheck { what, delta: delta.as_f64(), tol: AGREEMENT_TOL });
    }
    Ok(())
}

/// Map files: `key = value` header lines for `m`, `M` and optionally `actions` (e.g.
/// `actions = UR`), then grid rows of `.` free, `#` wall, `S` start, `G` goal. Lines
/// starting with `;` or `//` are comments; blank lines are ignored.
impl FromStr for GridWorld {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        let mut m = None;
        let mut big_m = None;
        let mut actions = None;
        let mut rows: Vec<(usize, &str)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with(';') || line.starts_with("//") {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                if !rows.is_empty() {
                    return Err(parse_err(line_no, "header line after grid rows".into()));
                }
                // header values may carry a trailing `;` comment
                let value = value.split(';').next().unwrap_or_default().trim();
                match key.trim() {
                    "m" => m = Some(value.parse::<usize>().map_err(|e| parse_err(line_no, format!("m: {e}")))?),
                    "M" => big_m = Some(value.parse::<usize>().map_err(|e| parse_err(line_no, format!("M: {e}")))?),
                    "actions" => {
                        let parsed = value
                            .chars()
                            .filter(|c| !c.is_whitespace() && *c != ',')
                            .map(Action::from_symbol)
                            .collect::<Result<Vec<_>>>()
                            .map_err(|e| parse_err(line_no, e.to_string()))?;
                        actions = Some(parsed);
                    }
                    other => return Err(parse_err(line_no, format!("unknown header key `{other}`"))),
                }
            } else {
                rows.push((line_no, line));
            }
        }
        let last_line = text.lines().count().max(1);
        let m = m.ok_or_else(|| parse_err(last_line, "missing header `m`".into()))?;
        let big_m = big_m.ok_or_else(|| parse_err(last_line, "missing header `M`".into()))?;
        if rows.is_empty() {
            return Err(parse_err(last_line, "no grid rows".into()));
        }
        let width = rows[0].1.chars().count();
        let mut walls = Vec::new();
        let (mut start, mut goal) = (None, None);
        for (y, (line_no, row)) in rows.iter().enumerate() {
            if row.chars().count() != width {
                return Err(parse_err(*line_no, format!("row has {} cells, expected {width}", row.chars().count())));
            }
            for (x, ch) in row.chars().enumerate() {
                let cell = Cell::new(x, y);
                let slot = match ch {
                    '.' => None,
                    '#' => {
                        walls.push(cell);
                        None
                    }
                    'S' => Some((&mut start, "start")),
                    'G' => Some((&mut goal, "goal")),
                    other => return Err(parse_err(*line_no, format!("unexpected character `{other}`"))),
                };
                if let Some((slot, name)) = slot {
                    if slot.is_some() {
                        return Err(parse_err(*line_no, format!("second {name} cell")));
                    }
                    *slot = Some(cell);
                }
            }
        }
        let start = start.ok_or_else(|| parse_err(last_line, "no start cell `S`".into()))?;
        let goal = goal.ok_or_else(|| parse_err(last_line, "no goal cell `G`".into()))?;
        let actions = actions.unwrap_or_else(|| Action::ALL.to_vec());
        GridWorld::new(width, rows.len(), walls, start, goal, actions, m, big_m)
            .map_err(|e| parse_err(rows[0].0, e.to_string()))
    }
}

impl fmt::Display for GridWorld {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "m = {}", self.m)?;
        writeln!(f, "M = {}", self.big_m)?;
        let symbols: String = self.actions.iter().map(|a| a.symbol()).collect();
        writeln!(f, "actions = {symbols}")?;
        for y in 0..self.height {
            let row: String = (0..self.width)
                .map(|x| {
                    let cell = Cell::new(x, y);
                    if cell == self.start {
                        'S'
                    } else if cell == self.goal {
                        'G'
                    } else if self.walls.contains(&cell) {
                        '#'
                    } else {
                        '.'
                    }
                })
                .collect();
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    fn square(m: usize, big_m: usize) -> GridWorld {
        GridWorld::open(2, 2, Cell::new(0, 0), Cell::new(1, 1), m, big_m).unwrap()
    }

    #[test]
    fn reward_examples() {
        let corridor = GridWorld::open(2, 1, Cell::new(0, 0), Cell::new(1, 0), 1, 5).unwrap();
        assert!(corridor.is_rewarded_str("R").unwrap());
        assert!(!corridor.is_rewarded_str("L").unwrap());
        assert!(!corridor.is_rewarded_str("").unwrap());
        assert!(corridor.is_rewarded_str("LRLLL").unwrap());
        assert!(matches!(corridor.is_rewarded_str("RRRRRR"), Err(Error::SequenceTooLong { .. })));
        assert!(matches!(corridor.is_rewarded_str("X"), Err(Error::UnknownAction('X'))));
    }

    #[test]
    fn walls_bump() {
        let env: GridWorld = "m = 1\nM = 3\nS#G\n...\n".parse().unwrap();
        assert!(!env.is_rewarded_str("R").unwrap());
        assert!(env.is_rewarded_str("DRRU").is_err());
        assert!(!env.is_rewarded_str("DRR").unwrap());
        let longer = env.with_lengths(1, 4).unwrap();
        assert!(longer.is_rewarded_str("DRRU").unwrap());
    }

    #[test]
    fn two_by_two_counts() {
        let inst = square(2, 3).compile().unwrap();
        assert_eq!(inst.sizes, ClassSizes::new(8, 0, 8, 48).unwrap());
        assert_eq!(inst.n_items, 64);
        let (first, second) = inst.sets.unwrap();
        assert_eq!(first.len(), 8);
        assert_eq!(second.len(), 16);
        assert!(first.iter().all(|i| second.contains(i)));
    }

    #[test]
    fn explicit_sets_match_direct_evaluation() {
        let env = square(2, 3);
        let (first, second) = env.compile().unwrap().sets.unwrap();
        for (i, seq) in (0..3).map(|_| Action::ALL).multi_cartesian_product().enumerate() {
            assert_eq!(second.contains(i), env.is_rewarded(&seq).unwrap());
            assert_eq!(first.contains(i), env.is_rewarded(&seq[..2]).unwrap());
        }
    }

    #[test]
    fn degenerate_lengths() {
        let inst = square(3, 3).compile().unwrap();
        assert_eq!((inst.sizes.n_minus, inst.sizes.n_plus), (0, 0));
        let inst = square(0, 2).compile().unwrap();
        assert_eq!(inst.sizes.n_tilde(), 0);
        let inst = square(0, 0).compile().unwrap();
        assert_eq!(inst.sizes, ClassSizes::new(0, 0, 0, 1).unwrap());
        let home = GridWorld::open(2, 2, Cell::new(0, 0), Cell::new(0, 0), 0, 2).unwrap();
        assert_eq!(home.compile().unwrap().sizes, ClassSizes::new(16, 0, 0, 0).unwrap());
    }

    #[test]
    fn unreachable_goal() {
        let env: GridWorld = "m = 1\nM = 3\nS#\n#G\n".parse().unwrap();
        let inst = env.compile().unwrap();
        assert_eq!(inst.sizes.n_ell, 64);
        let out = end_to_end::<f64>(&env, PhaseSchedule::new(2, 3)).unwrap();
        assert!(out.trajectory.iter().all(|r| r.p_second == 0.0));
    }

    #[test]
    fn enumeration_cap() {
        let env = GridWorld::open(3, 3, Cell::new(0, 0), Cell::new(2, 2), 5, 12).unwrap();
        assert!(matches!(env.compile(), Err(Error::EnumerationCapExceeded { .. })));
    }

    #[test]
    fn end_to_end_square() {
        let out = end_to_end::<f64>(&square(2, 3), PhaseSchedule::new(1, 1)).unwrap();
        let full = out.full.unwrap();
        assert!((out.reduced - full).abs() < 1e-10);
        assert!(out.max_delta < 1e-9);
    }

    #[test]
    fn parser_errors_carry_lines() {
        let e = "m = 1\nM = 2\nS.\n.X\n".parse::<GridWorld>().unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e:?}");
        let e = "m = 1\nM = 2\nS.G\n..\n".parse::<GridWorld>().unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }), "{e:?}");
        let e = "m = x\nM = 2\nSG\n".parse::<GridWorld>().unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }), "{e:?}");
        let e = "M = 2\nSG\n".parse::<GridWorld>().unwrap_err();
        assert!(matches!(e, Error::Parse { .. }));
        let e = "m = 3\nM = 2\nSG\n".parse::<GridWorld>().unwrap_err();
        assert!(matches!(e, Error::Parse { line: 3, .. }), "{e:?}");
    }

    #[test]
    fn display_round_trips() {
        let env: GridWorld = "; maze\nm = 2 ; short\nM = 4\nactions = RD  ; no U, L\nS.#\n..G\n".parse().unwrap();
        assert_eq!((env.m(), env.big_m()), (2, 4));
        assert_eq!(env.actions(), &[Action::Right, Action::Down]);
        let again: GridWorld = env.to_string().parse().unwrap();
        assert_eq!(env, again);
    }
}
