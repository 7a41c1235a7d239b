#![allow(dead_code)]

use std::sync::OnceLock;

use hippo_lab_core::{enumerate_km, BitString, ComplexityTable, EnumerationBudget};
use proptest::prelude::*;

pub const ORACLE_DEPTH: usize = 16;

pub fn bs(s: &str) -> BitString {
    s.parse().unwrap()
}

/// Leaf indicator of the cover of `strings` at `depth`: entry `v` is true
/// when the depth-`depth` string with value `v` extends some element.
pub fn indicator<'a, I>(strings: I, depth: usize) -> Vec<bool>
where
    I: IntoIterator<Item = &'a BitString>,
{
    let mut out = vec![false; 1 << depth];
    for s in strings {
        assert!(s.len() <= depth);
        let shift = depth - s.len();
        let base = (s.to_u64().unwrap() as usize) << shift;
        for slot in &mut out[base..base + (1 << shift)] {
            *slot = true;
        }
    }
    out
}

pub fn table(b: u32) -> &'static ComplexityTable {
    static T14: OnceLock<ComplexityTable> = OnceLock::new();
    static T10: OnceLock<ComplexityTable> = OnceLock::new();
    let cell = match b {
        14 => &T14,
        10 => &T10,
        _ => panic!("no cached table for B={b}"),
    };
    cell.get_or_init(|| enumerate_km(EnumerationBudget::new(b, 32).unwrap()))
}

pub fn arb_bits(max_len: usize) -> impl Strategy<Value = BitString> {
    prop::collection::vec(any::<bool>(), 0..=max_len).prop_map(BitString::from_bits)
}

pub fn arb_set(max_len: usize, max_size: usize) -> impl Strategy<Value = Vec<BitString>> {
    prop::collection::vec(arb_bits(max_len), 0..=max_size)
}
