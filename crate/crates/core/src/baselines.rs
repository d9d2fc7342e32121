//! Reference methods: exhaustive search and the norm-based heuristic.

use crate::capacity::link_capacity;
use crate::channel::{select_columns, ChannelMatrix};
use crate::error::{Error, Result};
use crate::search::SearchTreeShape;
use crate::selection::{Scenario, SelectionProblem, SelectionResult};

/// Default ceiling on `C(Nt, L)` for [`exhaustive_select`].
pub const DEFAULT_ES_CAP: u128 = 10_000_000;

/// Lexicographic enumeration of the `L`-subsets of `1..=Nt`.
#[derive(Clone, Debug)]
pub struct SubsetEnumerator {
    n_total: usize,
    current: Vec<usize>,
    done: bool,
}

impl SubsetEnumerator {
    pub fn new(shape: SearchTreeShape) -> Self {
        SubsetEnumerator {
            n_total: shape.n_total(),
            current: (1..=shape.subset_size()).collect(),
            done: false,
        }
    }
}

impl Iterator for SubsetEnumerator {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.current.clone();
        let l = self.current.len();
        // Rightmost position that can still move up.
        match (0..l)
            .rev()
            .find(|&i| self.current[i] < self.n_total - (l - 1 - i))
        {
            Some(i) => {
                self.current[i] += 1;
                for j in i + 1..l {
                    self.current[j] = self.current[j - 1] + 1;
                }
            }
            None => self.done = true,
        }
        Some(out)
    }
}

fn objective_of(problem: &SelectionProblem<'_>, indices: &[usize]) -> Result<f64> {
    let cm = link_capacity(&select_columns(problem.hm, indices)?, problem.rho_m)?;
    match (problem.scenario, problem.he, problem.rho_e) {
        (Scenario::Csie, Some(he), Some(rho_e)) => {
            Ok(cm - link_capacity(&select_columns(he, indices)?, rho_e)?)
        }
        (Scenario::Csie, ..) => Err(Error::Config("CSIE needs the eavesdropper channel".into())),
        (Scenario::Ncsie, ..) => Ok(cm),
    }
}

/// Evaluate every subset; return the lexicographically first maximizer.
///
/// The reported node count is the size of the whole search tree.
pub fn exhaustive_select(problem: &SelectionProblem<'_>, cap: u128) -> Result<SelectionResult> {
    let shape = problem.shape();
    let subsets = shape.subset_count();
    if subsets > cap {
        return Err(Error::Budget { subsets, cap });
    }
    let mut best: Option<(Vec<usize>, f64)> = None;
    for subset in SubsetEnumerator::new(shape) {
        let value = objective_of(problem, &subset)?;
        if best.as_ref().is_none_or(|(_, b)| value > *b) {
            best = Some((subset, value));
        }
    }
    let (indices, objective) = best.expect("at least one subset");
    let secrecy_capacity = match problem.scenario {
        Scenario::Csie => Some(objective.max(0.0)),
        Scenario::Ncsie => problem.evaluate(&indices)?.secrecy_capacity,
    };
    Ok(SelectionResult {
        indices,
        objective,
        adjusted_objective: f64::NAN,
        secrecy_capacity,
        visited_nodes: u64::try_from(shape.tree_node_count()).unwrap_or(u64::MAX),
    })
}

/// The `L` columns of `hm` with the largest squared norms, ascending.
/// Ties go to the lower index.
pub fn norm_based_select(hm: &ChannelMatrix, l: usize) -> Result<Vec<usize>> {
    SearchTreeShape::new(hm.cols(), l)?;
    let norms = hm.column_norms_sqr();
    let mut order: Vec<usize> = (1..=hm.cols()).collect();
    order.sort_by(|&a, &b| norms[b - 1].total_cmp(&norms[a - 1]).then(a.cmp(&b)));
    order.truncate(l);
    order.sort_unstable();
    Ok(order)
}

/// Norm-based selection scored like the other methods. It looks at `Nt`
/// column norms, so it is charged `Nt` nodes.
pub fn norm_based_result(problem: &SelectionProblem<'_>) -> Result<SelectionResult> {
    let indices = norm_based_select(problem.hm, problem.subset_size)?;
    let value = problem.evaluate(&indices)?;
    Ok(SelectionResult {
        indices,
        objective: value.objective,
        adjusted_objective: f64::NAN,
        secrecy_capacity: value.secrecy_capacity,
        visited_nodes: problem.hm.cols() as u64,
    })
}
