//! Depth-first, best-first branch-and-bound over the increasing-index
//! combination tree.
//!
//! A path from the root to level `L` picks antennas `k_1 < k_2 < ... < k_L`.
//! At level `a` only indices `a ..= Nt - L + a` can appear, so every node can
//! still be completed to a full subset. A scenario supplies the per-node
//! increment `delta`, a per-level constant `Z_a` with `delta <= Z_a` for any
//! candidate at level `a`, and a state update. The adjusted objective
//! `c~ = parent c~ + delta - Z_level` is then non-increasing along every
//! path, so a node whose score does not beat the best complete path so far
//! cannot lead to a better leaf and is pruned together with its (lower
//! scored) younger siblings.
//!
//! A node counts as visited when its score is evaluated. An unpruned
//! traversal therefore visits every node of the tree.

use std::ops::RangeInclusive;

use crate::error::{Error, Result};

/// Slack allowed on `delta <= Z` and on monotonicity checks.
pub const BOUND_TOLERANCE: f64 = 1e-9;

/// `Nt` antennas, choose `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchTreeShape {
    n_total: usize,
    subset_size: usize,
}

impl SearchTreeShape {
    pub fn new(n_total: usize, subset_size: usize) -> Result<Self> {
        if subset_size == 0 || subset_size > n_total {
            return Err(Error::Problem(format!(
                "cannot select L = {subset_size} of Nt = {n_total} antennas"
            )));
        }
        Ok(SearchTreeShape {
            n_total,
            subset_size,
        })
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn subset_size(&self) -> usize {
        self.subset_size
    }

    /// Indices that may appear at `level` (1-based): `level ..= Nt - L + level`.
    pub fn level_candidates(&self, level: usize) -> Result<RangeInclusive<usize>> {
        if level == 0 || level > self.subset_size {
            return Err(Error::Problem(format!(
                "level {level} outside 1..={}",
                self.subset_size
            )));
        }
        Ok(level..=self.n_total - self.subset_size + level)
    }

    /// Children of a node at depth `depth` whose last index is `last`
    /// (`last = 0` at the root). Empty when no completion exists.
    pub fn child_candidates(&self, last: usize, depth: usize) -> RangeInclusive<usize> {
        debug_assert!(depth < self.subset_size);
        last + 1..=self.n_total - self.subset_size + depth + 1
    }

    /// Number of nodes at `level`: `C(Nt - L + level, level)`.
    pub fn level_node_count(&self, level: usize) -> u128 {
        binomial(self.n_total - self.subset_size + level, level)
    }

    /// Nodes below the root, i.e. what a traversal without pruning visits.
    pub fn tree_node_count(&self) -> u128 {
        (1..=self.subset_size)
            .map(|a| self.level_node_count(a))
            .fold(0u128, u128::saturating_add)
    }

    /// `C(Nt, L)`.
    pub fn subset_count(&self) -> u128 {
        binomial(self.n_total, self.subset_size)
    }
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i as u128 + 1),
            None => return u128::MAX,
        }
    }
    acc
}

/// Scenario-specific part of the search.
pub trait ScenarioDriver {
    type State: Clone;

    fn shape(&self) -> SearchTreeShape;

    /// State at the root (nothing selected).
    fn root(&self) -> Self::State;

    /// `Z_level` for `level` in `1..=L`.
    fn level_bound(&self, level: usize) -> f64;

    /// Adjusted objective `c~` carried by `state`.
    fn adjusted_objective(&self, state: &Self::State) -> f64;

    /// Increment from adding antenna `k` (1-based) to `state`.
    fn delta(&self, state: &Self::State, k: usize) -> f64;

    /// State after adding antenna `k`.
    fn advance(&self, state: &Self::State, k: usize) -> Result<Self::State>;
}

/// Engine knobs.
#[derive(Clone, Debug, Default)]
pub struct BabConfig {
    /// A child is expanded only when `score > bound + prune_margin`.
    pub prune_margin: f64,
    /// Seed the incumbent with this complete path instead of `-inf`.
    pub initial_incumbent: Option<Vec<usize>>,
}

/// A scored node.
#[derive(Clone, Copy, Debug)]
pub struct ScoreEvent<'a> {
    /// Path to the parent.
    pub prefix: &'a [usize],
    pub candidate: usize,
    pub level: usize,
    pub parent_adjusted: f64,
    pub delta: f64,
    pub level_bound: f64,
    pub score: f64,
}

/// Siblings skipped because the first of them failed the bound.
#[derive(Clone, Copy, Debug)]
pub struct PruneEvent<'a> {
    pub prefix: &'a [usize],
    pub level: usize,
    /// `(index, score)` in descending score order.
    pub skipped: &'a [(usize, f64)],
    pub bound: f64,
}

/// Hooks for instrumentation; every method defaults to a no-op.
pub trait SearchObserver {
    fn on_score(&mut self, _event: &ScoreEvent<'_>) {}
    fn on_prune(&mut self, _event: &PruneEvent<'_>) {}
    fn on_incumbent(&mut self, _path: &[usize], _bound: f64) {}
}

impl SearchObserver for () {}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    /// Selected indices, 1-based ascending.
    pub path: Vec<usize>,
    /// Adjusted objective of `path`.
    pub adjusted: f64,
    pub visited: u64,
}

/// Adjusted objective of a complete path, by replaying the state updates.
pub fn path_adjusted_objective<D: ScenarioDriver>(driver: &D, path: &[usize]) -> Result<f64> {
    let shape = driver.shape();
    if path.len() != shape.subset_size() {
        return Err(Error::Selection(format!(
            "path has {} indices, expected {}",
            path.len(),
            shape.subset_size()
        )));
    }
    crate::channel::validate_indices(path, shape.n_total())?;
    let mut state = driver.root();
    for &k in path {
        state = driver.advance(&state, k)?;
    }
    Ok(driver.adjusted_objective(&state))
}

struct Search<'d, 'o, D: ScenarioDriver, O: SearchObserver> {
    driver: &'d D,
    observer: &'o mut O,
    shape: SearchTreeShape,
    margin: f64,
    bound: f64,
    best: Vec<usize>,
    visited: u64,
}

impl<D: ScenarioDriver, O: SearchObserver> Search<'_, '_, D, O> {
    fn score_children(&mut self, state: &D::State, path: &[usize]) -> Result<Vec<(usize, f64)>> {
        let depth = path.len();
        let level = depth + 1;
        let last = path.last().copied().unwrap_or(0);
        let base = self.driver.adjusted_objective(state);
        let z = self.driver.level_bound(level);
        let mut scored = Vec::new();
        for k in self.shape.child_candidates(last, depth) {
            let delta = self.driver.delta(state, k);
            let score = base + delta - z;
            if !score.is_finite() {
                return Err(Error::Numerical(format!(
                    "score of antenna {k} at level {level} is {score}"
                )));
            }
            debug_assert!(
                delta <= z + BOUND_TOLERANCE,
                "increment {delta} exceeds level bound {z} at level {level}"
            );
            self.observer.on_score(&ScoreEvent {
                prefix: path,
                candidate: k,
                level,
                parent_adjusted: base,
                delta,
                level_bound: z,
                score,
            });
            scored.push((k, score));
        }
        self.visited += scored.len() as u64;
        Ok(scored)
    }

    fn expand(&mut self, state: &D::State, path: &mut Vec<usize>) -> Result<()> {
        let mut scored = self.score_children(state, path)?;
        if path.len() + 1 == self.shape.subset_size() {
            // Leaves: take the best in one batch, lowest index on ties.
            let mut best: Option<(usize, f64)> = None;
            for &(k, s) in &scored {
                if best.is_none_or(|(_, b)| s > b) {
                    best = Some((k, s));
                }
            }
            if let Some((k, s)) = best {
                if s > self.bound {
                    self.bound = s;
                    self.best.clear();
                    self.best.extend_from_slice(path);
                    self.best.push(k);
                    self.observer.on_incumbent(&self.best, s);
                }
            }
            return Ok(());
        }

        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        for i in 0..scored.len() {
            let (k, score) = scored[i];
            if score > self.bound + self.margin {
                let child = self.driver.advance(state, k)?;
                path.push(k);
                self.expand(&child, path)?;
                path.pop();
            } else {
                self.observer.on_prune(&PruneEvent {
                    prefix: path,
                    level: path.len() + 1,
                    skipped: &scored[i..],
                    bound: self.bound,
                });
                break;
            }
        }
        Ok(())
    }
}

/// Run the search to completion and return the best complete path.
pub fn run_bab<D: ScenarioDriver, O: SearchObserver>(
    driver: &D,
    config: &BabConfig,
    observer: &mut O,
) -> Result<SearchOutcome> {
    let shape = driver.shape();
    let (bound, best) = match &config.initial_incumbent {
        Some(path) => (path_adjusted_objective(driver, path)?, path.clone()),
        None => (f64::NEG_INFINITY, Vec::new()),
    };
    let mut search = Search {
        driver,
        observer,
        shape,
        margin: config.prune_margin,
        bound,
        best,
        visited: 0,
    };
    let root = driver.root();
    let mut path = Vec::with_capacity(shape.subset_size());
    search.expand(&root, &mut path)?;
    Ok(SearchOutcome {
        path: search.best,
        adjusted: search.bound,
        visited: search.visited,
    })
}
