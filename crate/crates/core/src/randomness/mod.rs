//! Randomness tests: blind and auditor constructions, exact verification of
//! the mass bounds, the level sandwich between the two constructions, and
//! finite-horizon deficiency evidence.
//!
//! Nothing here decides randomness of an infinite sequence. Reports are
//! monotone evidence up to a fixed horizon.

mod deficiency;
mod family;
mod verify;

use thiserror::Error;

use crate::prefix::PrefixError;

pub use deficiency::{deficiency_profile, hippocratic_evidence, DeficiencyProfile, Evidence, ProfileRow};
pub use family::{approx_digest, build_blind_test, build_measure_test, table_tag, Provenance, TestFamily};
pub use verify::{
    level_masses, sandwich_check, verify_test, LevelBound, LevelCheck, SandwichReport, SandwichSide,
    SandwichWitness, VerificationReport,
};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("horizons differ: {0} vs {1}")]
    HorizonMismatch(usize, usize),
    #[error("level counts differ: {0} vs {1}")]
    LevelCountMismatch(u64, u64),
    #[error("bound table must be positive and strictly decreasing")]
    BoundNotDecreasing,
    #[error("family file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Prefix(#[from] PrefixError),
}
