//! Exact and sampled statistics of the uniform linear extension of a finite
//! poset, with checkers for the inequalities and open problems around
//! balance constants.
//!
//! The counting backbone is the lattice of order ideals ([`lattice`]); all
//! exact quantities are arbitrary-precision rationals.

#![allow(clippy::needless_range_loop)]

pub mod balance;
pub mod canon;
pub mod engine;
pub mod error;
pub mod families;
pub mod format;
pub mod geometry;
pub mod lattice;
pub mod poset;
pub mod rational;
pub mod report;
pub mod sampler;
pub mod set;
pub mod verifier;

pub use balance::{balance_report, BalanceConfig, BalanceReport, FractionalMatching};
pub use canon::{canonical_form, canonical_labeling, from_canonical_form, CanonicalForm};
pub use engine::{exact_stats, Caps, ExtensionStats};
pub use error::{Error, Result};
pub use families::FamilySpec;
pub use geometry::{geometry_report, GeometryReport};
pub use lattice::IdealLattice;
pub use poset::Poset;
pub use rational::Rational;
pub use report::{CheckReport, Severity, Status};
pub use sampler::{Estimate, PolytopePoint};
pub use set::ElementSet;
pub use verifier::{sweep, Check, VerifyConfig};
