//! Problem and result types shared by every selection method.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::capacity::{link_capacity, secrecy_capacity_direct, NormalizedSnr};
use crate::channel::{select_columns, ChannelMatrix};
use crate::error::{Error, Result};
use crate::search::SearchTreeShape;

/// Whether the transmitter knows the eavesdropper channel.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    /// No eavesdropper CSI: maximize the legitimate capacity.
    Ncsie,
    /// Full eavesdropper CSI: maximize `C_m - C_e`.
    Csie,
}

impl Scenario {
    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Ncsie => "ncsie",
            Scenario::Csie => "csie",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ncsie" => Ok(Scenario::Ncsie),
            "csie" => Ok(Scenario::Csie),
            _ => Err(Error::Config(format!("unknown scenario {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct SelectOptions {
    /// Start from the norm-based subset instead of an empty incumbent.
    pub warm_start: bool,
    /// Expand a node only if its score beats the incumbent by more than this.
    pub prune_margin: f64,
}

/// One selection instance.
///
/// An NCSIE problem may still carry the eavesdropper channel so that the
/// secrecy capacity of the chosen subset can be reported; the search never
/// looks at it.
#[derive(Clone, Copy, Debug)]
pub struct SelectionProblem<'a> {
    pub scenario: Scenario,
    pub hm: &'a ChannelMatrix,
    pub he: Option<&'a ChannelMatrix>,
    pub subset_size: usize,
    pub rho_m: NormalizedSnr,
    pub rho_e: Option<NormalizedSnr>,
}

impl<'a> SelectionProblem<'a> {
    pub fn ncsie(hm: &'a ChannelMatrix, subset_size: usize, rho_m: NormalizedSnr) -> Result<Self> {
        SearchTreeShape::new(hm.cols(), subset_size)?;
        Ok(SelectionProblem {
            scenario: Scenario::Ncsie,
            hm,
            he: None,
            subset_size,
            rho_m,
            rho_e: None,
        })
    }

    pub fn csie(
        hm: &'a ChannelMatrix,
        he: &'a ChannelMatrix,
        subset_size: usize,
        rho_m: NormalizedSnr,
        rho_e: NormalizedSnr,
    ) -> Result<Self> {
        Self::ncsie(hm, subset_size, rho_m)?
            .with_eavesdropper(he, rho_e)
            .map(|p| SelectionProblem {
                scenario: Scenario::Csie,
                ..p
            })
    }

    /// Build for either scenario; `he`/`rho_e` are required for CSIE.
    pub fn new(
        scenario: Scenario,
        hm: &'a ChannelMatrix,
        he: Option<&'a ChannelMatrix>,
        subset_size: usize,
        rho_m: NormalizedSnr,
        rho_e: Option<NormalizedSnr>,
    ) -> Result<Self> {
        let base = Self::ncsie(hm, subset_size, rho_m)?;
        let base = match (he, rho_e) {
            (Some(he), Some(rho_e)) => base.with_eavesdropper(he, rho_e)?,
            (None, _) if scenario == Scenario::Ncsie => base,
            _ => {
                return Err(Error::Config(
                    "CSIE needs both the eavesdropper channel and its SNR".into(),
                ))
            }
        };
        Ok(SelectionProblem { scenario, ..base })
    }

    /// Attach the eavesdropper link for reporting.
    pub fn with_eavesdropper(self, he: &'a ChannelMatrix, rho_e: NormalizedSnr) -> Result<Self> {
        if he.cols() != self.hm.cols() {
            return Err(Error::Dimension(format!(
                "legitimate channel has {} transmit antennas, eavesdropper channel has {}",
                self.hm.cols(),
                he.cols()
            )));
        }
        Ok(SelectionProblem {
            he: Some(he),
            rho_e: Some(rho_e),
            ..self
        })
    }

    pub fn shape(&self) -> SearchTreeShape {
        SearchTreeShape::new(self.hm.cols(), self.subset_size).expect("validated on construction")
    }

    /// Direct (log-det) evaluation of a subset.
    pub fn evaluate(&self, indices: &[usize]) -> Result<SubsetValue> {
        if indices.len() != self.subset_size {
            return Err(Error::Selection(format!(
                "subset has {} antennas, expected {}",
                indices.len(),
                self.subset_size
            )));
        }
        let hm_sub = select_columns(self.hm, indices)?;
        let secrecy = match (self.he, self.rho_e) {
            (Some(he), Some(rho_e)) => Some(secrecy_capacity_direct(
                &hm_sub,
                &select_columns(he, indices)?,
                self.rho_m,
                rho_e,
            )?),
            _ => None,
        };
        let objective = match (self.scenario, secrecy) {
            (Scenario::Csie, Some(s)) => s.difference(),
            (_, Some(s)) => s.legitimate,
            (_, None) => link_capacity(&hm_sub, self.rho_m)?,
        };
        Ok(SubsetValue {
            objective,
            secrecy_capacity: secrecy.map(|s| s.clamped()),
        })
    }

    pub fn select(&self, options: &SelectOptions) -> Result<SelectionResult> {
        let mut result = match (self.scenario, self.he, self.rho_e) {
            (Scenario::Csie, Some(he), Some(rho_e)) => {
                crate::csie::select_csie(self.hm, he, self.subset_size, self.rho_m, rho_e, options)?
            }
            (Scenario::Csie, ..) => {
                return Err(Error::Config("CSIE needs the eavesdropper channel".into()))
            }
            (Scenario::Ncsie, ..) => {
                crate::ncsie::select_ncsie(self.hm, self.subset_size, self.rho_m, options)?
            }
        };
        if result.secrecy_capacity.is_none() && self.he.is_some() {
            result.secrecy_capacity = self.evaluate(&result.indices)?.secrecy_capacity;
        }
        Ok(result)
    }
}

/// Direct evaluation of one subset.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubsetValue {
    /// `C_m` for NCSIE, `C_m - C_e` (unclamped) for CSIE.
    pub objective: f64,
    /// `[C_m - C_e]^+` when the eavesdropper link is known.
    pub secrecy_capacity: Option<f64>,
}

/// What a selection method returns.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    /// Chosen antennas, 1-based ascending.
    pub indices: Vec<usize>,
    /// Scenario objective of `indices`, unclamped.
    pub objective: f64,
    /// Objective minus the per-level constants (search methods only).
    pub adjusted_objective: f64,
    /// Clamped secrecy capacity, when the eavesdropper link is known.
    pub secrecy_capacity: Option<f64>,
    pub visited_nodes: u64,
}
