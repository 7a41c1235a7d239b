//! Shannon-Fano-Elias codebooks over exact dyadic weights.
//!
//! Entry `i` with weight `q_i` gets the first `ceil(-log q_i) + 1` bits of
//! the binary expansion of the midpoint `Σ_{j<i} q_j + q_i / 2`. When the
//! weights sum to at most 1 the codewords are prefix-free: each midpoint
//! truncated to that many bits still lies inside its own weight interval,
//! together with the whole cylinder of the codeword.

use std::collections::HashMap;

use crate::bits::BitString;
use crate::dyadic::Dyadic;

use super::CodingError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodebookEntry {
    pub symbol: BitString,
    pub weight: Dyadic,
    pub codeword: BitString,
}

#[derive(Debug, Clone, Default)]
pub struct Codebook {
    entries: Vec<CodebookEntry>,
    total: Dyadic,
    by_codeword: HashMap<BitString, usize>,
    by_symbol: HashMap<BitString, usize>,
    lengths: Vec<usize>,
}

/// `ℓ`-bit big-endian rendering of `floor(v · 2^ℓ)` for `0 <= v < 1`.
fn expansion_bits(v: &Dyadic, len: usize) -> BitString {
    let scaled = v.floor_scaled(len as u64);
    BitString::from_bits((0..len as u64).rev().map(|i| scaled.bit(i)))
}

pub fn sfe_build(items: &[(BitString, Dyadic)]) -> Result<Codebook, CodingError> {
    let mut total = Dyadic::zero();
    for (x, q) in items {
        if q.is_zero() {
            return Err(CodingError::NonPositiveWeight(x.clone()));
        }
        total = &total + q;
    }
    if total > Dyadic::one() {
        return Err(CodingError::KraftViolation { total });
    }

    let mut book = Codebook {
        total,
        ..Codebook::default()
    };
    let mut cumulative = Dyadic::zero();
    for (x, q) in items {
        let len = q.neg_log_bounds()?.ceil_neg_log as usize + 1;
        let midpoint = &cumulative + &q.half();
        let codeword = expansion_bits(&midpoint, len);
        cumulative = &cumulative + q;

        let idx = book.entries.len();
        if book.by_symbol.insert(x.clone(), idx).is_some() {
            return Err(CodingError::DuplicateSymbol(x.clone()));
        }
        book.by_codeword.insert(codeword.clone(), idx);
        book.entries.push(CodebookEntry {
            symbol: x.clone(),
            weight: q.clone(),
            codeword,
        });
    }
    book.lengths = {
        let mut l: Vec<usize> = book.entries.iter().map(|e| e.codeword.len()).collect();
        l.sort_unstable();
        l.dedup();
        l
    };
    Ok(book)
}

impl Codebook {
    pub fn entries(&self) -> &[CodebookEntry] {
        &self.entries
    }

    pub fn total(&self) -> &Dyadic {
        &self.total
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn codeword(&self, symbol: &BitString) -> Option<&BitString> {
        self.by_symbol.get(symbol).map(|&i| &self.entries[i].codeword)
    }

    /// Decode the codeword at the start of `bits`: `(symbol, bits consumed)`.
    pub fn decode(&self, bits: &BitString) -> Result<(BitString, usize), CodingError> {
        self.decode_at(bits, 0)
    }

    pub(crate) fn decode_at(
        &self,
        bits: &BitString,
        offset: usize,
    ) -> Result<(BitString, usize), CodingError> {
        let rest = bits.len().saturating_sub(offset);
        for &len in &self.lengths {
            if len > rest {
                break;
            }
            let candidate = BitString::from_bits((offset..offset + len).map(|i| bits.get(i).unwrap()));
            if let Some(&i) = self.by_codeword.get(&candidate) {
                return Ok((self.entries[i].symbol.clone(), len));
            }
        }
        Err(CodingError::NoMatch)
    }
}

pub fn sfe_decode(book: &Codebook, bits: &BitString) -> Result<(BitString, usize), CodingError> {
    book.decode(bits)
}
