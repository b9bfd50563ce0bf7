//! Submodular optimization and learning in the value-oracle model.

pub mod approx;
pub mod cli;
pub mod cut;
pub mod decision;
pub mod oracle;
pub mod partition;
pub mod sfm;
pub mod verify;
pub mod zoo;
