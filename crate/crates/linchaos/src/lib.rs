//! Finite-horizon numerical lab for linear chaos on sequence spaces.
//!
//! The crate turns the asymptotic vocabulary of linear dynamics into
//! certified finite computations:
//!
//! - [`natdensity`]: natural and Banach densities of subsets of N, with
//!   explicit estimation ladders and convergence gaps.
//! - [`seqspace`]: sparse l^p / c0 vectors with log-domain norms and a
//!   certified truncation tail.
//! - [`shiftops`]: weighted backward shifts, orbit trajectories, and
//!   boundedness probes.
//! - [`orbitstats`]: visit sets and the single-orbit chaos ingredients
//!   (irregular, distributionally near zero / unbounded, mean irregular).
//! - [`chaoscls`]: pair profiles F / F* / BF / BF*, the DC and reiterative
//!   DC classifiers, the implication lattice, and the c(T) estimator.
//! - [`constructions`]: the visit-set extraction from an irregular orbit
//!   and the dense irregular-manifold selection, with verified margins.
//! - [`lab`]: the reproducible experiment registry behind the CLI.

pub mod chaoscls;
pub mod constructions;
pub mod lab;
pub mod logdomain;
pub mod natdensity;
pub mod orbitstats;
pub mod seqspace;
pub mod shiftops;

pub use chaoscls::{ChaosClass, ChaosVerdict};
pub use natdensity::{DensityEstimate, IndexSet};
pub use seqspace::{SeqVector, SpaceTag};
pub use shiftops::{OrbitRecord, ShiftOperator};
