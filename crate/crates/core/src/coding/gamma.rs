//! Elias-gamma: `floor(log2 n)` zeros followed by the binary form of `n`.

use crate::bits::BitString;

use super::CodingError;

pub fn gamma_len(n: u64) -> usize {
    assert!(n >= 1, "gamma code undefined for 0");
    2 * n.ilog2() as usize + 1
}

pub fn elias_gamma(n: u64) -> Result<BitString, CodingError> {
    if n == 0 {
        return Err(CodingError::GammaZero);
    }
    let width = n.ilog2() as usize + 1;
    let mut out = BitString::repeat(false, width - 1);
    out.append(&BitString::from_u64(n, width));
    Ok(out)
}

/// Outcome of reading a gamma code at some offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum GammaRead {
    /// Value and number of bits consumed.
    Value(u64, usize),
    /// The code is well-formed but its value does not fit in 64 bits.
    Overflow(usize),
    Truncated,
}

pub(crate) fn read_gamma(bits: &BitString, pos: usize) -> GammaRead {
    let mut zeros = 0;
    loop {
        match bits.get(pos + zeros) {
            None => return GammaRead::Truncated,
            Some(true) => break,
            Some(false) => zeros += 1,
        }
    }
    let total = 2 * zeros + 1;
    if pos + total > bits.len() {
        return GammaRead::Truncated;
    }
    if zeros >= 64 {
        return GammaRead::Overflow(total);
    }
    let mut v = 0u64;
    for i in 0..=zeros {
        v = (v << 1) | bits.get(pos + zeros + i).unwrap() as u64;
    }
    GammaRead::Value(v, total)
}

/// Decode a gamma code at the start of `bits`: `(n, bits consumed)`.
pub fn elias_gamma_decode(bits: &BitString) -> Result<(u64, usize), CodingError> {
    match read_gamma(bits, 0) {
        GammaRead::Value(n, used) => Ok((n, used)),
        GammaRead::Overflow(_) => Err(CodingError::GammaOverflow),
        GammaRead::Truncated => Err(CodingError::GammaTruncated),
    }
}
