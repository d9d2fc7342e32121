//! Selection with full eavesdropper CSI: maximize `C_m - C_e`.
//!
//! Both links carry their own `(T, phi)` pair, downdated exactly as in
//! [`crate::ncsie`]. The increment of antenna `k` is
//! `log2(1 + rho_m phi_m,k) - log2(1 + rho_e phi_e,k)`.
//!
//! The eavesdropper term is bounded from below by the quadratic form of
//! `h_e,k` in `(I + rho_e H_e H_e^†)^{-1}`, the inverse with *every* transmit
//! antenna included. Picking more antennas only shrinks `T_e`, so no partial
//! selection can push `phi_e,k` below that value. Hence
//! `Z_a = log2(1 + rho_m zeta_a^2) - log2(1 + rho_e eta_a)` with
//! `eta_a = min_{k in I_a} h_e,k^† (I + rho_e H_e H_e^†)^{-1} h_e,k` bounds
//! every increment at level `a`. `Z_a` may be negative.

use num_complex::Complex64;

use crate::capacity::NormalizedSnr;
use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::linalg::{regularized_gram_inverse, SquareMatrix};
use crate::ncsie::{downdate_link, log2_1p, per_level};
use crate::search::{run_bab, BabConfig, ScenarioDriver, SearchObserver, SearchTreeShape};
use crate::selection::{SelectOptions, SelectionResult};

#[derive(Clone, Debug, PartialEq)]
pub struct CsieLevelBounds {
    pub z: Vec<f64>,
    /// Legitimate-link `zeta_a^2`.
    pub zeta_sq: Vec<f64>,
    /// Eavesdropper `eta_a`.
    pub eta: Vec<f64>,
}

impl CsieLevelBounds {
    pub fn z(&self, level: usize) -> f64 {
        self.z[level - 1]
    }

    pub fn total(&self) -> f64 {
        self.z.iter().sum()
    }
}

/// `h_e,k^† (I + rho_e H_e H_e^†)^{-1} h_e,k` for every column `k`.
pub fn eavesdropper_floor(he: &ChannelMatrix, rho_e: NormalizedSnr) -> Result<Vec<f64>> {
    let full = regularized_gram_inverse(he, rho_e.linear())?;
    Ok(he
        .columns()
        .iter()
        .map(|h| full.quad_form(h).max(0.0))
        .collect())
}

/// `eta_a` for `a = 1..=L`.
pub fn eavesdropper_eta(he: &ChannelMatrix, rho_e: NormalizedSnr, l: usize) -> Result<Vec<f64>> {
    let shape = SearchTreeShape::new(he.cols(), l)?;
    Ok(per_level(shape, &eavesdropper_floor(he, rho_e)?, f64::min))
}

pub fn precompute_bounds_csie(
    hm: &ChannelMatrix,
    he: &ChannelMatrix,
    rho_m: NormalizedSnr,
    rho_e: NormalizedSnr,
    l: usize,
) -> Result<CsieLevelBounds> {
    check_pair(hm, he)?;
    let legit = crate::ncsie::precompute_bounds_ncsie(hm, rho_m, l)?;
    let eta = eavesdropper_eta(he, rho_e, l)?;
    let z = legit
        .z
        .iter()
        .zip(&eta)
        .map(|(zm, &e)| zm - log2_1p(rho_e.linear() * e))
        .collect();
    Ok(CsieLevelBounds {
        z,
        zeta_sq: legit.zeta_sq,
        eta,
    })
}

fn check_pair(hm: &ChannelMatrix, he: &ChannelMatrix) -> Result<()> {
    if hm.cols() != he.cols() {
        return Err(Error::Dimension(format!(
            "legitimate channel has {} transmit antennas, eavesdropper channel has {}",
            hm.cols(),
            he.cols()
        )));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct CsieState {
    t_m: SquareMatrix,
    t_e: SquareMatrix,
    phi_m: Vec<f64>,
    phi_e: Vec<f64>,
    c_tilde: f64,
    depth: usize,
}

impl CsieState {
    pub fn t_m(&self) -> &SquareMatrix {
        &self.t_m
    }

    pub fn t_e(&self) -> &SquareMatrix {
        &self.t_e
    }

    pub fn phi_m(&self) -> &[f64] {
        &self.phi_m
    }

    pub fn phi_e(&self) -> &[f64] {
        &self.phi_e
    }

    pub fn c_tilde(&self) -> f64 {
        self.c_tilde
    }

    pub fn depth(&self) -> usize {
        self.depth
    }
}

#[derive(Clone, Debug)]
pub struct CsieDriver {
    shape: SearchTreeShape,
    hm_cols: Vec<Vec<Complex64>>,
    he_cols: Vec<Vec<Complex64>>,
    rho_m: NormalizedSnr,
    rho_e: NormalizedSnr,
    bounds: CsieLevelBounds,
}

impl CsieDriver {
    pub fn new(
        hm: &ChannelMatrix,
        he: &ChannelMatrix,
        l: usize,
        rho_m: NormalizedSnr,
        rho_e: NormalizedSnr,
    ) -> Result<Self> {
        check_pair(hm, he)?;
        Ok(CsieDriver {
            shape: SearchTreeShape::new(hm.cols(), l)?,
            hm_cols: hm.columns(),
            he_cols: he.columns(),
            rho_m,
            rho_e,
            bounds: precompute_bounds_csie(hm, he, rho_m, rho_e, l)?,
        })
    }

    pub fn bounds(&self) -> &CsieLevelBounds {
        &self.bounds
    }
}

fn norms(cols: &[Vec<Complex64>]) -> Vec<f64> {
    cols.iter()
        .map(|h| h.iter().map(|z| z.norm_sqr()).sum())
        .collect()
}

impl ScenarioDriver for CsieDriver {
    type State = CsieState;

    fn shape(&self) -> SearchTreeShape {
        self.shape
    }

    fn root(&self) -> CsieState {
        CsieState {
            t_m: SquareMatrix::identity(self.hm_cols[0].len()),
            t_e: SquareMatrix::identity(self.he_cols[0].len()),
            phi_m: norms(&self.hm_cols),
            phi_e: norms(&self.he_cols),
            c_tilde: 0.0,
            depth: 0,
        }
    }

    fn level_bound(&self, level: usize) -> f64 {
        self.bounds.z(level)
    }

    fn adjusted_objective(&self, state: &CsieState) -> f64 {
        state.c_tilde
    }

    fn delta(&self, state: &CsieState, k: usize) -> f64 {
        log2_1p(self.rho_m.linear() * state.phi_m[k - 1])
            - log2_1p(self.rho_e.linear() * state.phi_e[k - 1])
    }

    fn advance(&self, state: &CsieState, k: usize) -> Result<CsieState> {
        let level = state.depth + 1;
        let mut next = state.clone();
        next.c_tilde = state.c_tilde + self.delta(state, k) - self.bounds.z(level);
        next.depth = level;
        downdate_link(
            &self.hm_cols,
            self.rho_m.linear(),
            &mut next.t_m,
            &mut next.phi_m,
            k,
        )?;
        downdate_link(
            &self.he_cols,
            self.rho_e.linear(),
            &mut next.t_e,
            &mut next.phi_e,
            k,
        )?;
        Ok(next)
    }
}

/// Optimal `L`-subset for the secrecy difference `C_m - C_e`.
pub fn select_csie(
    hm: &ChannelMatrix,
    he: &ChannelMatrix,
    l: usize,
    rho_m: NormalizedSnr,
    rho_e: NormalizedSnr,
    options: &SelectOptions,
) -> Result<SelectionResult> {
    select_csie_observed(hm, he, l, rho_m, rho_e, options, &mut ())
}

pub fn select_csie_observed<O: SearchObserver>(
    hm: &ChannelMatrix,
    he: &ChannelMatrix,
    l: usize,
    rho_m: NormalizedSnr,
    rho_e: NormalizedSnr,
    options: &SelectOptions,
    observer: &mut O,
) -> Result<SelectionResult> {
    let driver = CsieDriver::new(hm, he, l, rho_m, rho_e)?;
    let config = BabConfig {
        prune_margin: options.prune_margin,
        initial_incumbent: options
            .warm_start
            .then(|| crate::baselines::norm_based_select(hm, l))
            .transpose()?,
    };
    let out = run_bab(&driver, &config, observer)?;
    let objective = out.adjusted + driver.bounds.total();
    Ok(SelectionResult {
        objective,
        adjusted_objective: out.adjusted,
        indices: out.path,
        secrecy_capacity: Some(objective.max(0.0)),
        visited_nodes: out.visited,
    })
}
