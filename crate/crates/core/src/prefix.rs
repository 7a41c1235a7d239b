//! Prefix-free sets, cover-preserving conversion, and exact cover masses.
//!
//! A set is prefix-free when its cylinders are pairwise disjoint. The mass
//! of its cover is then just the sum of element masses.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::bits::{BitString, ParseBitStringError};
use crate::dyadic::Dyadic;
use crate::measure::Measure;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PrefixError {
    #[error("{0} and {1} overlap: the set is not prefix-free")]
    Overlap(BitString, BitString),
    #[error("line {line}: {source}")]
    Parse {
        line: usize,
        source: ParseBitStringError,
    },
}

/// Quadratic-free check: every strict prefix of every element is looked up
/// among the elements.
pub fn find_overlap<'a, I>(strings: I) -> Option<(BitString, BitString)>
where
    I: IntoIterator<Item = &'a BitString>,
{
    let set: HashSet<&BitString> = strings.into_iter().collect();
    let mut sorted: Vec<&&BitString> = set.iter().collect();
    sorted.sort();
    for x in sorted {
        for k in 0..x.len() {
            let p = x.prefix(k);
            if set.contains(&p) {
                return Some((p, (*x).clone()));
            }
        }
    }
    None
}

pub fn is_prefix_free<'a, I>(strings: I) -> bool
where
    I: IntoIterator<Item = &'a BitString>,
{
    find_overlap(strings).is_none()
}

fn strict_prefixes(x: &BitString) -> impl Iterator<Item = BitString> + '_ {
    (0..x.len()).map(move |k| x.prefix(k))
}

/// A finite prefix-free set, iterated in shortlex order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixFreeSet {
    elements: BTreeSet<BitString>,
    /// Strict prefixes of elements: nodes with an element strictly below.
    interior: HashSet<BitString>,
}

impl PrefixFreeSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `{ε}`: the whole space.
    pub fn full() -> Self {
        Self::from_prefix_free_unchecked([BitString::new()])
    }

    pub fn new<I: IntoIterator<Item = BitString>>(strings: I) -> Result<Self, PrefixError> {
        let elements: BTreeSet<BitString> = strings.into_iter().collect();
        if let Some((a, b)) = find_overlap(&elements) {
            return Err(PrefixError::Overlap(a, b));
        }
        Ok(Self::from_sorted(elements))
    }

    fn from_prefix_free_unchecked<I: IntoIterator<Item = BitString>>(strings: I) -> Self {
        Self::from_sorted(strings.into_iter().collect())
    }

    fn from_sorted(elements: BTreeSet<BitString>) -> Self {
        let interior = elements.iter().flat_map(strict_prefixes).collect();
        PrefixFreeSet { elements, interior }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &BitString> {
        self.elements.iter()
    }

    pub fn contains(&self, x: &BitString) -> bool {
        self.elements.contains(x)
    }

    /// The element that is a prefix of `x`, if any (unique by prefix-freeness).
    pub fn prefix_of(&self, x: &BitString) -> Option<&BitString> {
        x.prefixes().find_map(|p| self.elements.get(&p))
    }

    /// `Δ(x) ⊆ cover(self)`.
    pub fn covers(&self, x: &BitString) -> bool {
        if self.prefix_of(x).is_some() {
            return true;
        }
        self.covers_below(x)
    }

    // x has no element among its prefixes.
    fn covers_below(&self, x: &BitString) -> bool {
        if !self.interior.contains(x) {
            return false;
        }
        [false, true].iter().all(|&b| {
            let c = x.child(b);
            self.elements.contains(&c) || self.covers_below(&c)
        })
    }

    /// `Δ(x) ∩ cover(self) ≠ ∅`: some element is comparable with `x`.
    pub fn intersects(&self, x: &BitString) -> Option<&BitString> {
        if let Some(p) = self.prefix_of(x) {
            return Some(p);
        }
        if self.interior.contains(x) {
            return self.elements.iter().find(|e| x.is_prefix_of(e));
        }
        None
    }

    /// `cover(self) ⊆ cover(other)`; otherwise the first element of `self`
    /// (shortlex) whose cylinder is not inside `other`.
    pub fn cover_subset_witness(&self, other: &PrefixFreeSet) -> Option<&BitString> {
        self.elements.iter().find(|x| !other.covers(x))
    }

    pub fn cover_subset(&self, other: &PrefixFreeSet) -> bool {
        self.cover_subset_witness(other).is_none()
    }

    /// One element per line, shortlex; `-` stands for the empty string.
    pub fn to_lines(&self) -> String {
        let mut s = String::new();
        for x in &self.elements {
            s.push_str(&x.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_lines(text: &str) -> Result<Self, PrefixError> {
        let mut v = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            v.push(line.parse().map_err(|source| PrefixError::Parse {
                line: i + 1,
                source,
            })?);
        }
        Self::new(v)
    }
}

impl<'a> IntoIterator for &'a PrefixFreeSet {
    type Item = &'a BitString;
    type IntoIter = std::collections::btree_set::Iter<'a, BitString>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// The prefix-minimal elements of `strings`; the cover is unchanged.
pub fn minimal_cover<I: IntoIterator<Item = BitString>>(strings: I) -> PrefixFreeSet {
    let sorted: BTreeSet<BitString> = strings.into_iter().collect();
    let mut kept: BTreeSet<BitString> = BTreeSet::new();
    // shortlex visits every prefix before its extensions
    for x in sorted {
        if !strict_prefixes(&x).any(|p| kept.contains(&p)) {
            kept.insert(x);
        }
    }
    PrefixFreeSet::from_sorted(kept)
}

/// `P(cover(s)) = Σ_{x ∈ s} P(x)`.
pub fn cover_mass(s: &PrefixFreeSet, measure: &dyn Measure) -> Dyadic {
    s.iter().map(|x| measure.mass(x)).sum()
}

/// Sum of masses over an arbitrary collection, refusing overlapping input.
pub fn checked_cover_mass<'a, I>(strings: I, measure: &dyn Measure) -> Result<Dyadic, PrefixError>
where
    I: IntoIterator<Item = &'a BitString> + Clone,
{
    if let Some((a, b)) = find_overlap(strings.clone()) {
        return Err(PrefixError::Overlap(a, b));
    }
    Ok(strings.into_iter().map(|x| measure.mass(x)).sum())
}

/// Incremental prefix-free conversion of an enumerated set.
///
/// Each inserted string contributes the maximal sub-cylinders of its own
/// cylinder not already covered. Nothing previously accepted is retracted.
#[derive(Debug, Clone, Default)]
pub struct StreamingCover {
    accepted: BTreeSet<BitString>,
    interior: HashSet<BitString>,
}

impl StreamingCover {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn accepted(&self) -> PrefixFreeSet {
        PrefixFreeSet::from_sorted(self.accepted.clone())
    }

    pub fn accepted_len(&self) -> usize {
        self.accepted.len()
    }

    /// Insert `x`, returning the newly accepted strings in shortlex order.
    pub fn insert(&mut self, x: &BitString) -> Vec<BitString> {
        if x.prefixes().any(|p| self.accepted.contains(&p)) {
            return Vec::new();
        }
        let mut emitted = Vec::new();
        self.gaps(x.clone(), &mut emitted);
        for e in &emitted {
            self.interior.extend(strict_prefixes(e));
            self.accepted.insert(e.clone());
        }
        emitted.sort();
        emitted
    }

    // node has no accepted prefix
    fn gaps(&self, node: BitString, out: &mut Vec<BitString>) {
        if self.accepted.contains(&node) {
            return;
        }
        if !self.interior.contains(&node) {
            out.push(node);
            return;
        }
        self.gaps(node.child(false), out);
        self.gaps(node.child(true), out);
    }
}
