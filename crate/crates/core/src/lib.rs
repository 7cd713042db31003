//! Outage probability of an `L`-branch maximum-ratio-combining receiver.
//!
//! The combined SNR is the sum of independent branch SNRs, each following a
//! Nakagami-m, Rice or Hoyt law. Its CDF at a threshold is the outage
//! probability, approximated here with the Lugannani–Rice saddlepoint
//! formula (and a simpler lower-tail variant) built from the branch
//! cumulant generating functions. Exact and Monte Carlo references are
//! provided for checking.
//!
//! ```
//! use saddle_outage::{BranchSpec, ChannelEnsemble, spa_cdf};
//!
//! let branch = BranchSpec::nakagami(2.0, 3.162).unwrap();
//! let ens = ChannelEnsemble::iid(branch, 2).unwrap();
//! let p = spa_cdf(&ens, 0.5).unwrap();
//! assert!(p.value > 0.0 && p.value < 1e-2);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod fading;
pub mod numerics;
pub mod oracles;
pub mod saddlepoint;

pub use error::{Error, Result};
pub use fading::{BranchSpec, CgfJet, Family};
pub use oracles::{exact_nakagami_iid_cdf, monte_carlo_cdf, McConfig, McEstimate};
pub use saddlepoint::{
    outage_probability, solve, spa_cdf, spa_cdf_simplified, CdfEstimate, CdfMethod,
    ChannelEnsemble, OutageMethod, SaddlepointSolution, SolveMethod,
};
