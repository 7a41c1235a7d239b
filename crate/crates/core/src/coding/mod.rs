//! Integer headers, Shannon-Fano-Elias codebooks, and the level-indexed
//! forward code.

mod gamma;
mod levelled;
mod sfe;

use thiserror::Error;

use crate::bits::BitString;
use crate::dyadic::{ArithError, Dyadic};

pub use gamma::{elias_gamma, elias_gamma_decode, gamma_len};
pub(crate) use gamma::{read_gamma, GammaRead};
pub use levelled::{forward_codebook, forward_length_bound, BoundViolation, LevelledCode};
pub use sfe::{sfe_build, sfe_decode, Codebook, CodebookEntry};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodingError {
    #[error("the gamma code is undefined for 0")]
    GammaZero,
    #[error("truncated gamma header")]
    GammaTruncated,
    #[error("gamma value exceeds 64 bits")]
    GammaOverflow,
    #[error("weight of {0} must be positive")]
    NonPositiveWeight(BitString),
    #[error("symbol {0} appears twice")]
    DuplicateSymbol(BitString),
    #[error("weights sum to {total} > 1")]
    KraftViolation { total: Dyadic },
    #[error("level {level}: scaled weights sum to {total} > 1; either (f, c) or the test property of this level is wrong")]
    LevelKraftViolation { level: u64, total: Dyadic },
    #[error("level {level}: f({symbol}) + c < {level}, scaled weight exceeds 1")]
    ScaledMassAboveOne { level: u64, symbol: BitString },
    #[error("test levels start at 1")]
    LevelZero,
    #[error("no codeword matches")]
    NoMatch,
    #[error("pair ({level}, {symbol}) is not in the code")]
    AbsentPair { level: u64, symbol: BitString },
    #[error(transparent)]
    Arith(#[from] ArithError),
}
