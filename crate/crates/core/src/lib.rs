//! Clustering dynamics of wireless sensor networks viewed as an evolving
//! complex network.
//!
//! - [`meanfield`]: closed-form predictions of the growth model.
//! - [`evolve`]: stochastic simulator of the growth model.
//! - [`geoproto`]: random geometric deployments and three localized
//!   topology-control protocols (Simple Tree, A3, CDS Rule K).
//! - [`harness`]: table reproduction, sweeps, polynomial fits and reports.

// Negated float comparisons are used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolve;
pub mod geoproto;
pub mod harness;
pub mod meanfield;
pub mod stats;

pub use error::{Error, Result};
