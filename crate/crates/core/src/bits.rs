//! Finite binary strings.
//!
//! Bits are packed little-endian inside `u64` words (bit `i` of the string
//! lives at bit `i % 64` of word `i / 64`). Bits past `len` are always zero,
//! so the derived `Eq` and `Hash` are structural.
//!
//! Ordering is shortlex: shorter strings first, equal lengths compared
//! lexicographically with `0 < 1`. Every set, codebook and report in the
//! crate iterates in this order.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use smallvec::SmallVec;
use thiserror::Error;

const WORD: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("invalid bit string {input:?}: expected characters 0/1 or \"-\" for the empty string")]
pub struct ParseBitStringError {
    input: String,
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: SmallVec<[u64; 1]>,
}

impl BitString {
    /// The empty string.
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Self {
            len: 0,
            words: SmallVec::with_capacity(bits.div_ceil(WORD)),
        }
    }

    /// `len` copies of `bit`.
    pub fn repeat(bit: bool, len: usize) -> Self {
        let mut s = Self::with_capacity(len);
        for _ in 0..len {
            s.push(bit);
        }
        s
    }

    /// The `len`-bit big-endian rendering of `value` (most significant bit
    /// first). Bits of `value` above `len` are ignored.
    pub fn from_u64(value: u64, len: usize) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 bits");
        let mut s = Self::with_capacity(len);
        for i in (0..len).rev() {
            s.push((value >> i) & 1 == 1);
        }
        s
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut s = Self::new();
        s.extend(bits);
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        (i < self.len).then(|| (self.words[i / WORD] >> (i % WORD)) & 1 == 1)
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / WORD] |= 1 << (self.len % WORD);
        }
        self.len += 1;
    }

    pub fn pop(&mut self) -> Option<bool> {
        if self.len == 0 {
            return None;
        }
        self.len -= 1;
        let w = self.len / WORD;
        let bit = (self.words[w] >> (self.len % WORD)) & 1 == 1;
        self.words[w] &= !(1 << (self.len % WORD));
        if self.len.is_multiple_of(WORD) {
            self.words.pop();
        }
        Some(bit)
    }

    pub fn append(&mut self, other: &BitString) {
        for b in other.iter() {
            self.push(b);
        }
    }

    /// `a · b`.
    pub fn concat(&self, other: &BitString) -> BitString {
        let mut out = Self::with_capacity(self.len + other.len);
        out.append(self);
        out.append(other);
        out
    }

    /// `self · bit`.
    pub fn child(&self, bit: bool) -> BitString {
        let mut out = self.clone();
        out.push(bit);
        out
    }

    /// The first `k` bits; the whole string when `k >= len`.
    pub fn prefix(&self, k: usize) -> BitString {
        let k = k.min(self.len);
        let n_words = k.div_ceil(WORD);
        let mut words: SmallVec<[u64; 1]> = self.words[..n_words].into();
        if !k.is_multiple_of(WORD) {
            words[n_words - 1] &= (1u64 << (k % WORD)) - 1;
        }
        BitString { len: k, words }
    }

    /// `self ⊑ other`: `self` is a (not necessarily proper) prefix of `other`.
    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        if self.len > other.len {
            return false;
        }
        let full = self.len / WORD;
        if self.words[..full] != other.words[..full] {
            return false;
        }
        let rem = self.len % WORD;
        if rem == 0 {
            return true;
        }
        let mask = (1u64 << rem) - 1;
        self.words[full] == other.words[full] & mask
    }

    /// Prefix-comparable: one of the two cylinders contains the other.
    pub fn is_comparable(&self, other: &BitString) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = bool> + ExactSizeIterator + '_ {
        (0..self.len).map(move |i| (self.words[i / WORD] >> (i % WORD)) & 1 == 1)
    }

    /// All prefixes from `ε` up to and including `self`.
    pub fn prefixes(&self) -> impl Iterator<Item = BitString> + '_ {
        (0..=self.len).map(move |k| self.prefix(k))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_zeros(&self) -> usize {
        self.len - self.count_ones()
    }

    /// Big-endian value of the string, when it fits in 64 bits.
    pub fn to_u64(&self) -> Option<u64> {
        (self.len <= WORD).then(|| self.iter().fold(0u64, |acc, b| (acc << 1) | b as u64))
    }

    /// All strings of length exactly `len`, in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < WORD, "enumerating strings of length {len} is not supported");
        (0..(1u64 << len)).map(move |v| BitString::from_u64(v, len))
    }

    /// All strings of length `<= max_len`, in shortlex order.
    pub fn all_up_to(max_len: usize) -> impl Iterator<Item = BitString> {
        (0..=max_len).flat_map(BitString::all_of_length)
    }
}

impl Extend<bool> for BitString {
    fn extend<I: IntoIterator<Item = bool>>(&mut self, iter: I) {
        for b in iter {
            self.push(b);
        }
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len.cmp(&other.len).then_with(|| {
            // Lexicographic on equal lengths: reversing each word puts bit 0
            // in the most significant position. Padding is zero on both sides.
            self.words
                .iter()
                .zip(other.words.iter())
                .map(|(a, b)| a.reverse_bits().cmp(&b.reverse_bits()))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Bits as `0`/`1` characters; the empty string renders as `-`.
impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("-");
        }
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        f.write_str(&s)
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

impl FromStr for BitString {
    type Err = ParseBitStringError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "-" || s.is_empty() {
            return Ok(BitString::new());
        }
        let mut out = BitString::with_capacity(s.len());
        for ch in s.chars() {
            match ch {
                '0' => out.push(false),
                '1' => out.push(true),
                _ => {
                    return Err(ParseBitStringError {
                        input: s.to_string(),
                    })
                }
            }
        }
        Ok(out)
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
