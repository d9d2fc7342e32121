//! Selection without eavesdropper CSI: maximize `log2 det(I + rho H~ H~^†)`.
//!
//! The search state keeps `T = (I + rho H_n H_n^†)^{-1}` for the antennas
//! picked so far and the quadratic forms `phi_k = h_k^† T h_k` of the
//! antennas that can still follow. Adding antenna `K` raises the capacity by
//! `log2(1 + rho phi_K)`, and `T`, `phi` follow by a rank-one downdate:
//!
//! ```text
//! t     = T h_K / sqrt(1/rho + phi_K)
//! T'    = T - t t^†
//! phi_a = phi_a - |h_a^† t|^2        for a > K
//! ```
//!
//! so one node costs `O(Nt * Nr)`.

use num_complex::Complex64;

use crate::capacity::NormalizedSnr;
use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::search::{run_bab, BabConfig, ScenarioDriver, SearchObserver, SearchTreeShape};
use crate::selection::{SelectOptions, SelectionResult};

/// Drift below zero tolerated in a downdated quadratic form before it is
/// treated as a numerical failure.
pub const PHI_DRIFT_TOLERANCE: f64 = 1e-12;

/// Per-level constants `Z_a = log2(1 + rho zeta_a^2)`, `a = 1..=L`.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelBounds {
    /// `zeta_a^2 = max_{k in I_a} ||h_k||^2`.
    pub zeta_sq: Vec<f64>,
    pub z: Vec<f64>,
}

impl LevelBounds {
    /// `Z_level`, 1-based.
    pub fn z(&self, level: usize) -> f64 {
        self.z[level - 1]
    }

    /// `sum_{a=1..=L} Z_a`, the offset between a leaf's adjusted objective
    /// and its capacity.
    pub fn total(&self) -> f64 {
        self.z.iter().sum()
    }
}

pub(crate) fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

/// Max of `values` over every level's candidate set.
pub(crate) fn per_level(
    shape: SearchTreeShape,
    values: &[f64],
    pick: fn(f64, f64) -> f64,
) -> Vec<f64> {
    (1..=shape.subset_size())
        .map(|a| {
            let mut range = shape.level_candidates(a).expect("level in range");
            let first = values[*range.start() - 1];
            range.next();
            range.fold(first, |acc, k| pick(acc, values[k - 1]))
        })
        .collect()
}

pub fn precompute_bounds_ncsie(
    h: &ChannelMatrix,
    rho: NormalizedSnr,
    l: usize,
) -> Result<LevelBounds> {
    let shape = SearchTreeShape::new(h.cols(), l)?;
    let norms = h.column_norms_sqr();
    let zeta_sq = per_level(shape, &norms, f64::max);
    let z = zeta_sq.iter().map(|&q| log2_1p(rho.linear() * q)).collect();
    Ok(LevelBounds { zeta_sq, z })
}

/// `phi - |xi|^2`, clamping tiny negative drift to zero.
pub(crate) fn downdate(phi: f64, xi_sqr: f64, k: usize) -> Result<f64> {
    let v = phi - xi_sqr;
    if v >= 0.0 {
        Ok(v)
    } else if v >= -PHI_DRIFT_TOLERANCE {
        Ok(0.0)
    } else {
        Err(Error::Numerical(format!(
            "quadratic form of antenna {k} drifted to {v:e}"
        )))
    }
}

/// `h^† t`.
pub(crate) fn inner(h: &[Complex64], t: &[Complex64]) -> Complex64 {
    h.iter().zip(t).map(|(a, b)| a.conj() * b).sum()
}

/// One rank-one downdate of `(T, phi)` after picking `k` (1-based).
pub(crate) fn downdate_link(
    columns: &[Vec<Complex64>],
    rho: f64,
    t_mat: &mut SquareMatrix,
    phi: &mut [f64],
    k: usize,
) -> Result<()> {
    let h_k = &columns[k - 1];
    let scale = (1.0 / rho + phi[k - 1]).sqrt();
    let t: Vec<Complex64> = t_mat.matvec(h_k).into_iter().map(|v| v / scale).collect();
    t_mat.sub_outer(&t);
    for a in k..columns.len() {
        phi[a] = downdate(phi[a], inner(&columns[a], &t).norm_sqr(), a + 1)?;
    }
    Ok(())
}

/// Search state at one node.
#[derive(Clone, Debug)]
pub struct NcsieState {
    t: SquareMatrix,
    phi: Vec<f64>,
    c_tilde: f64,
    depth: usize,
}

impl NcsieState {
    /// `(I + rho H_n H_n^†)^{-1}` for the selected columns.
    pub fn t(&self) -> &SquareMatrix {
        &self.t
    }

    /// `phi[k - 1] = h_k^† T h_k`, current for every index above the last pick.
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn c_tilde(&self) -> f64 {
        self.c_tilde
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

/// Search driver for one legitimate channel.
#[derive(Clone, Debug)]
pub struct NcsieDriver {
    shape: SearchTreeShape,
    columns: Vec<Vec<Complex64>>,
    rho: NormalizedSnr,
    bounds: LevelBounds,
}

impl NcsieDriver {
    pub fn new(h: &ChannelMatrix, l: usize, rho: NormalizedSnr) -> Result<Self> {
        let shape = SearchTreeShape::new(h.cols(), l)?;
        Ok(NcsieDriver {
            shape,
            columns: h.columns(),
            rho,
            bounds: precompute_bounds_ncsie(h, rho, l)?,
        })
    }

    pub fn bounds(&self) -> &LevelBounds {
        &self.bounds
    }
}

impl ScenarioDriver for NcsieDriver {
    type State = NcsieState;

    fn shape(&self) -> SearchTreeShape {
        self.shape
    }

    fn root(&self) -> NcsieState {
        let nr = self.columns[0].len();
        NcsieState {
            t: SquareMatrix::identity(nr),
            phi: self
                .columns
                .iter()
                .map(|h| h.iter().map(|z| z.norm_sqr()).sum())
                .collect(),
            c_tilde: 0.0,
            depth: 0,
        }
    }

    fn level_bound(&self, level: usize) -> f64 {
        self.bounds.z(level)
    }

    fn adjusted_objective(&self, state: &NcsieState) -> f64 {
        state.c_tilde
    }

    fn delta(&self, state: &NcsieState, k: usize) -> f64 {
        log2_1p(self.rho.linear() * state.phi[k - 1])
    }

    fn advance(&self, state: &NcsieState, k: usize) -> Result<NcsieState> {
        let level = state.depth + 1;
        let mut next = state.clone();
        next.c_tilde = state.c_tilde + self.delta(state, k) - self.bounds.z(level);
        next.depth = level;
        downdate_link(
            &self.columns,
            self.rho.linear(),
            &mut next.t,
            &mut next.phi,
            k,
        )?;
        Ok(next)
    }
}

/// Optimal `L`-subset for the legitimate link alone.
pub fn select_ncsie(
    h: &ChannelMatrix,
    l: usize,
    rho: NormalizedSnr,
    options: &SelectOptions,
) -> Result<SelectionResult> {
    select_ncsie_observed(h, l, rho, options, &mut ())
}

pub fn select_ncsie_observed<O: SearchObserver>(
    h: &ChannelMatrix,
    l: usize,
    rho: NormalizedSnr,
    options: &SelectOptions,
    observer: &mut O,
) -> Result<SelectionResult> {
    let driver = NcsieDriver::new(h, l, rho)?;
    let config = BabConfig {
        prune_margin: options.prune_margin,
        initial_incumbent: options
            .warm_start
            .then(|| crate::baselines::norm_based_select(h, l))
            .transpose()?,
    };
    let out = run_bab(&driver, &config, observer)?;
    Ok(SelectionResult {
        objective: out.adjusted + driver.bounds.total(),
        adjusted_objective: out.adjusted,
        indices: out.path,
        secrecy_capacity: None,
        visited_nodes: out.visited,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::link_capacity;
    use crate::channel::{generate_rayleigh, select_columns, Seed};

    fn snr(v: f64) -> NormalizedSnr {
        NormalizedSnr::new(v).unwrap()
    }

    #[test]
    fn bounds_follow_level_candidate_sets() {
        // Column squared norms [4, 3, 2, 1].
        let h = ChannelMatrix::from_real(1, 4, &[2.0, 3f64.sqrt(), 2f64.sqrt(), 1.0]).unwrap();
        let b = precompute_bounds_ncsie(&h, snr(1.0), 2).unwrap();
        assert!((b.zeta_sq[0] - 4.0).abs() < 1e-15);
        assert!((b.zeta_sq[1] - 3.0).abs() < 1e-15);
        assert!((b.z[0] - 5f64.log2()).abs() < 1e-15);
        assert!((b.z[1] - 2.0).abs() < 1e-15);

        let zero = ChannelMatrix::zeros(3, 5).unwrap();
        let b = precompute_bounds_ncsie(&zero, snr(7.0), 3).unwrap();
        assert_eq!(b.z, vec![0.0; 3]);
    }

    #[test]
    fn root_delta_is_column_norm() {
        let h = generate_rayleigh(3, 6, Seed(3)).unwrap();
        let d = NcsieDriver::new(&h, 2, snr(2.0)).unwrap();
        let root = d.root();
        for k in 1..=6 {
            let norm: f64 = h.column(k - 1).iter().map(|z| z.norm_sqr()).sum();
            assert!((d.delta(&root, k) - (1.0 + 2.0 * norm).log2()).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_column_is_inert() {
        let mut values = vec![0.0; 8];
        values[0] = 1.0;
        values[4] = -0.5;
        values[6] = 0.25;
        // Column 2 is identically zero.
        let h = ChannelMatrix::from_real(2, 4, &values).unwrap();
        let d = NcsieDriver::new(&h, 2, snr(3.0)).unwrap();
        let root = d.root();
        assert_eq!(d.delta(&root, 2), 0.0);
        let next = d.advance(&root, 2).unwrap();
        assert_eq!(next.t(), root.t());
        assert_eq!(&next.phi()[2..], &root.phi()[2..]);
    }

    #[test]
    fn scalar_channel_picks_strongest() {
        let gains = [0.3, 1.7, 0.2, 1.1, 0.9, 1.4];
        let h = ChannelMatrix::from_real(1, 6, &gains).unwrap();
        for (l, expected) in [(1, vec![2]), (2, vec![2, 6]), (3, vec![2, 4, 6])] {
            let r = select_ncsie(&h, l, snr(2.0), &SelectOptions::default()).unwrap();
            assert_eq!(r.indices, expected);
            let power: f64 = expected.iter().map(|&k| gains[k - 1] * gains[k - 1]).sum();
            assert!((r.objective - (1.0 + 2.0 * power).log2()).abs() < 1e-12);
        }
    }

    #[test]
    fn full_selection() {
        let h = generate_rayleigh(4, 6, Seed(9)).unwrap();
        let r = select_ncsie(&h, 6, snr(1.3), &SelectOptions::default()).unwrap();
        assert_eq!(r.indices, vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(r.visited_nodes, 6);
        assert!((r.objective - link_capacity(&h, snr(1.3)).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn reported_objective_matches_direct_capacity() {
        for seed in 0..20 {
            let h = generate_rayleigh(4, 12, Seed(seed)).unwrap();
            let r = select_ncsie(&h, 3, snr(3.0), &SelectOptions::default()).unwrap();
            let sub = select_columns(&h, &r.indices).unwrap();
            assert!((r.objective - link_capacity(&sub, snr(3.0)).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_infeasible_size() {
        let h = generate_rayleigh(2, 3, Seed(1)).unwrap();
        assert!(matches!(
            select_ncsie(&h, 4, snr(1.0), &SelectOptions::default()),
            Err(Error::Problem(_))
        ));
        assert!(select_ncsie(&h, 0, snr(1.0), &SelectOptions::default()).is_err());
    }

    #[test]
    fn drift_clamp() {
        assert_eq!(downdate(1.0, 1.0 + 5e-13, 1).unwrap(), 0.0);
        assert!(matches!(
            downdate(1.0, 1.0 + 1e-9, 1),
            Err(Error::Numerical(_))
        ));
    }
}
