//! Branch-and-bound transmit antenna selection for MIMO wiretap channels.
//!
//! A transmitter with `Nt` antennas picks `L` of them to talk to a receiver
//! with `Nr` antennas while an eavesdropper with `Ne` antennas listens. Two
//! cases are covered:
//!
//! * [`Scenario::Ncsie`]: the eavesdropper channel is unknown, so the
//!   legitimate capacity is maximized.
//! * [`Scenario::Csie`]: both channels are known and `C_m - C_e` is maximized.
//!
//! [`SelectionProblem::select`] runs the exact branch-and-bound search.
//! [`baselines`] holds exhaustive search and the norm-based heuristic, and
//! [`experiments`] drives Monte Carlo sweeps over all of them.
//!
//! ```
//! use mimome_tas::{generate_rayleigh, NormalizedSnr, Seed, SelectOptions, SelectionProblem};
//!
//! let hm = generate_rayleigh(4, 12, Seed(1)).unwrap();
//! let he = generate_rayleigh(4, 12, Seed(2)).unwrap();
//! let rho_m = NormalizedSnr::from_db(9.0).unwrap();
//! let rho_e = NormalizedSnr::from_db(1.0).unwrap();
//! let problem = SelectionProblem::csie(&hm, &he, 3, rho_m, rho_e).unwrap();
//! let best = problem.select(&SelectOptions::default()).unwrap();
//! assert_eq!(best.indices.len(), 3);
//! ```

pub mod baselines;
pub mod capacity;
pub mod channel;
pub mod cli;
pub mod csie;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod ncsie;
pub mod search;
pub mod selection;

pub use baselines::{exhaustive_select, norm_based_result, norm_based_select, DEFAULT_ES_CAP};
pub use capacity::{
    db_to_linear, link_capacity, secrecy_capacity_direct, NormalizedSnr, SecrecyCapacity,
};
pub use channel::{generate_rayleigh, select_columns, ChannelMatrix, MatrixFormat, Seed};
pub use csie::{precompute_bounds_csie, select_csie, CsieDriver};
pub use error::{Error, Result};
pub use ncsie::{precompute_bounds_ncsie, select_ncsie, NcsieDriver};
pub use search::{run_bab, BabConfig, ScenarioDriver, SearchObserver, SearchTreeShape};
pub use selection::{Scenario, SelectOptions, SelectionProblem, SelectionResult};
