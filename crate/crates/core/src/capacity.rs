//! Log-det link capacity and secrecy capacity under uniform power allocation.
//!
//! All capacities are in bits/s/Hz. SNRs are *normalized*: the per-receive
//! antenna SNR already divided by the number of selected transmit antennas.

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;

/// Normalized SNR as a linear power ratio, strictly positive and finite.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct NormalizedSnr(f64);

impl NormalizedSnr {
    pub fn new(linear: f64) -> Result<Self> {
        if linear.is_finite() && linear > 0.0 {
            Ok(NormalizedSnr(linear))
        } else {
            Err(Error::Config(format!(
                "normalized SNR must be positive and finite, got {linear}"
            )))
        }
    }

    pub fn from_db(db: f64) -> Result<Self> {
        if !db.is_finite() {
            return Err(Error::Config(format!("SNR in dB must be finite, got {db}")));
        }
        Self::new(db_to_linear(db))
    }

    pub fn linear(self) -> f64 {
        self.0
    }

    pub fn db(self) -> f64 {
        10.0 * self.0.log10()
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `log2 det(I + rho H H^†)` with the identity sized to the receive side.
pub fn link_capacity(h: &ChannelMatrix, rho: NormalizedSnr) -> Result<f64> {
    let gram = SquareMatrix::regularized_gram(h, rho.linear());
    let c = gram.cholesky()?.log2_det();
    if !c.is_finite() {
        return Err(Error::Numerical(format!("capacity evaluated to {c}")));
    }
    // log2 det >= 0 since every eigenvalue is >= 1; trim rounding below zero.
    Ok(c.max(0.0))
}

/// Secrecy capacity of one selected antenna set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecrecyCapacity {
    pub legitimate: f64,
    pub eavesdropper: f64,
}

impl SecrecyCapacity {
    /// `C_m - C_e`, the quantity the searches maximize.
    pub fn difference(&self) -> f64 {
        self.legitimate - self.eavesdropper
    }

    /// `[C_m - C_e]^+`.
    pub fn clamped(&self) -> f64 {
        self.difference().max(0.0)
    }
}

pub fn secrecy_capacity_direct(
    hm_sub: &ChannelMatrix,
    he_sub: &ChannelMatrix,
    rho_m: NormalizedSnr,
    rho_e: NormalizedSnr,
) -> Result<SecrecyCapacity> {
    if hm_sub.cols() != he_sub.cols() {
        return Err(Error::Dimension(format!(
            "legitimate link has {} antennas, eavesdropper link has {}",
            hm_sub.cols(),
            he_sub.cols()
        )));
    }
    Ok(SecrecyCapacity {
        legitimate: link_capacity(hm_sub, rho_m)?,
        eavesdropper: link_capacity(he_sub, rho_e)?,
    })
}
