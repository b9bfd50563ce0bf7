//! Concrete submodular functions: natural families used in experiments and
//! the adversarial hard pairs whose members agree on almost every set.

mod families;
mod hard;
mod two_partition;

pub use families::{Coverage, GraphCut, Modular, PartitionMatroid};
pub use hard::{F1, F2, F3, F4, F5, F6, HardPairF1F2, HardPairF3F4, HardPairF5F6};
pub use two_partition::{random_monotone_table, TwoPartitionTable};
pub(crate) use two_partition::representative as two_partition_representative;

use rand::seq::index;
use rand::Rng;
use thiserror::Error;

use crate::oracle::{OracleError, SubsetMask};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ZooError {
    #[error("{family}: {constraint}")]
    InvalidParameter {
        family: &'static str,
        constraint: String,
    },
    #[error("two-partition grid is not submodular at cell ({k}, {l}): {condition}")]
    NotSubmodular {
        k: usize,
        l: usize,
        condition: &'static str,
    },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

pub(crate) fn invalid(family: &'static str, constraint: impl Into<String>) -> ZooError {
    ZooError::InvalidParameter { family, constraint: constraint.into() }
}

/// A uniformly random `k`-subset of `{0, .., n-1}`.
pub fn random_subset<R: Rng + ?Sized>(rng: &mut R, n: usize, k: usize) -> SubsetMask {
    SubsetMask::from_indices(n, index::sample(rng, n, k).into_iter())
        .expect("sampled indices are in range")
}
