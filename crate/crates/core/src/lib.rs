//! Coherence of single-mode bosonic states measured against the
//! overcomplete coherent-state basis, and the negativity of regular
//! Glauber-Sudarshan P densities.
//!
//! The pipeline for a pure state is:
//!
//! 1. build the state on a truncated Fock space ([`fock`]);
//! 2. peel off coherent components greedily, each chosen as a global maximizer
//!    of `|<alpha|psi>|` ([`husimi`], [`gram_schmidt`]);
//! 3. evaluate a finite-dimensional coherence measure on the orthogonalized
//!    weights and push the number of terms until the value settles ([`alpha`]).
//!
//! [`pdist`] covers the P-function side: negativity of regular P densities and
//! the linear-optical transforms (displacement, phase rotation, beam splitter
//! with a classical ancilla) under which it must not increase.

// `!(x > 0.0)` is used on purpose so NaN lands in the rejecting branch
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod alpha;
pub mod cli;
pub mod config;
pub mod error;
pub mod fock;
pub mod gram_schmidt;
pub mod husimi;
pub mod measures;
pub mod pdist;
mod simplex;
pub mod verify;

pub use alpha::{alpha_coherence, coherence_curve, CoherenceReport, ConvergenceSchedule, Family, Status};
pub use config::RunConfig;
pub use error::{Error, Result};
pub use fock::{CoherentLabel, FockDensity, FockVector, Truncation};
pub use husimi::{MaximizerSet, SearchConfig};
pub use measures::Measure;
pub use pdist::{NegativityReport, PDensity, Quadrature};
