//! Level-indexed codes: `gamma(n) ++ SFE_n(x)`.
//!
//! For a test with prefix-free levels `U'_n` and a log-approximation
//! `(f, c)`, level `n` is coded with weights `q_n(x) = 2^(n - f(x) - c)`.
//! Whenever `P(U'_n) < 2^-n` and `P(x) > 2^-(f(x)+c)`, these weights sum
//! to less than 1. The resulting codeword length is exactly
//! `f(x) - n + 2·floor(log n) + c + 2`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::approx::LogApproximation;
use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::measure::Measure;
use crate::prefix::PrefixFreeSet;

use super::gamma::{elias_gamma, gamma_len, read_gamma, GammaRead};
use super::sfe::{sfe_build, Codebook};
use super::CodingError;

#[derive(Debug, Clone)]
pub struct LevelledCode {
    levels: BTreeMap<u64, Codebook>,
    /// The additive constant in the length bound, `c + 2`.
    bound_constant: u64,
}

/// `f(x) - n + 2·floor(log n) + k`, saturating at zero.
pub fn forward_length_bound(f: u64, n: u64, k: u64) -> u64 {
    (f + 2 * n.ilog2() as u64 + k).saturating_sub(n)
}

/// Build the per-level SFE codebooks for the test levels, in the order the
/// iterator yields them. Levels above `n_max` are ignored.
pub fn forward_codebook<'a, I>(
    levels: I,
    la: &LogApproximation,
    n_max: u64,
) -> Result<LevelledCode, CodingError>
where
    I: IntoIterator<Item = (u64, &'a PrefixFreeSet)>,
{
    let mut out = BTreeMap::new();
    for (n, set) in levels {
        if n == 0 {
            return Err(CodingError::LevelZero);
        }
        if n > n_max {
            continue;
        }
        let mut items = Vec::with_capacity(set.len());
        for x in set {
            let e = la.f(x) + la.c();
            if e < n {
                return Err(CodingError::ScaledMassAboveOne {
                    level: n,
                    symbol: x.clone(),
                });
            }
            items.push((x.clone(), Dyadic::pow2_neg(e - n)));
        }
        let book = sfe_build(&items).map_err(|e| match e {
            CodingError::KraftViolation { total } => CodingError::LevelKraftViolation { level: n, total },
            other => other,
        })?;
        out.insert(n, book);
    }
    Ok(LevelledCode {
        levels: out,
        bound_constant: la.c() + 2,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundViolation {
    pub level: u64,
    pub symbol: BitString,
    pub length: u64,
    pub bound: u64,
}

impl LevelledCode {
    pub fn levels(&self) -> impl Iterator<Item = (u64, &Codebook)> {
        self.levels.iter().map(|(&n, b)| (n, b))
    }

    pub fn level(&self, n: u64) -> Option<&Codebook> {
        self.levels.get(&n)
    }

    pub fn bound_constant(&self) -> u64 {
        self.bound_constant
    }

    /// All `(n, x)` pairs, level-major, shortlex within a level.
    pub fn pairs(&self) -> impl Iterator<Item = (u64, &BitString)> {
        self.levels
            .iter()
            .flat_map(|(&n, b)| b.entries().iter().map(move |e| (n, &e.symbol)))
    }

    pub fn encode_pair(&self, n: u64, x: &BitString) -> Result<BitString, CodingError> {
        let absent = || CodingError::AbsentPair {
            level: n,
            symbol: x.clone(),
        };
        let cw = self.levels.get(&n).and_then(|b| b.codeword(x)).ok_or_else(absent)?;
        Ok(elias_gamma(n)?.concat(cw))
    }

    /// Decode one `(n, x)` from the start of `bits`, returning the bits consumed.
    pub fn decode_pair(&self, bits: &BitString) -> Result<(u64, BitString, usize), CodingError> {
        let (n, header) = match read_gamma(bits, 0) {
            GammaRead::Value(n, used) => (n, used),
            GammaRead::Overflow(_) => return Err(CodingError::GammaOverflow),
            GammaRead::Truncated => return Err(CodingError::GammaTruncated),
        };
        let book = self.levels.get(&n).ok_or(CodingError::NoMatch)?;
        let (x, used) = book.decode_at(bits, header)?;
        Ok((n, x, header + used))
    }

    /// Entries whose full codeword exceeds `f(x) - n + 2·floor(log n) + c + 2`.
    pub fn bound_violations(&self, la: &LogApproximation) -> Vec<BoundViolation> {
        self.check(|x| la.f(x))
    }

    /// Auditor-side form with `ceil(-log P(x))` in place of `f(x)`.
    pub fn measure_bound_violations(&self, measure: &dyn Measure) -> Vec<BoundViolation> {
        self.check(|x| {
            measure
                .mass(x)
                .neg_log_bounds()
                .map(|b| b.ceil_neg_log)
                .unwrap_or(0)
        })
    }

    fn check(&self, reference: impl Fn(&BitString) -> u64) -> Vec<BoundViolation> {
        let mut out = Vec::new();
        for (&n, book) in &self.levels {
            for e in book.entries() {
                let length = (gamma_len(n) + e.codeword.len()) as u64;
                let bound = forward_length_bound(reference(&e.symbol), n, self.bound_constant);
                if length > bound {
                    out.push(BoundViolation {
                        level: n,
                        symbol: e.symbol.clone(),
                        length,
                        bound,
                    });
                }
            }
        }
        out
    }

    /// Per level: a header line `level <n> total <a/2^b> bound-constant <k>`
    /// followed by `x q codeword` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (&n, book) in &self.levels {
            writeln!(
                s,
                "level {n} total {} bound-constant {}",
                book.total(),
                self.bound_constant
            )
            .unwrap();
            for e in book.entries() {
                writeln!(s, "{} {} {}", e.symbol, e.weight, e.codeword).unwrap();
            }
        }
        s
    }
}
