//! Minimization under a cardinality lower bound, and load balancing.
//!
//! Both procedures grow a solution out of small low-ratio pieces found by
//! minimizing `f(T) - α·w(T ∩ S)` against a random sample `S`, then bound the
//! union with subadditivity.

mod slb;
mod sml;

pub use slb::{slb_decide, slb_simple, slb_solve, PartitionMethod, PartitionResult, SlbInstance};
pub use sml::{sml_decide, SmlInstance, SmlResult};

use thiserror::Error;

use crate::oracle::OracleError;
use crate::sfm::SfmError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A guarantee that holds for every monotone submodular input was violated,
    /// so the input is not what its flags claim.
    #[error("postcondition violated: {0}")]
    Postcondition(String),
    #[error(transparent)]
    Sfm(#[from] SfmError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}
