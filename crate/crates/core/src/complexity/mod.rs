//! Resource-bounded monotone complexity relative to the reference machine.
//!
//! `Km_B(x)` is the length of the shortest program of length at most `B`
//! whose output extends `x`. It is an upper bound on the true monotone
//! complexity relative to this machine, and it keeps the two properties the
//! test constructions rely on: it is monotone along prefixes, and
//! `Σ_{x∈A} 2^-Km_B(x) <= 1` for every prefix-free `A`.

mod machine;
mod surrogate;

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::bits::BitString;
use crate::dyadic::Dyadic;

pub use machine::{run_machine, MonotoneProgram, MACHINE_VERSION};
pub use surrogate::compressor_surrogate;

/// Largest program length accepted by [`enumerate_km`].
pub const MAX_BUDGET: u32 = 26;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("budget {0} exceeds the enumerable limit {MAX_BUDGET}")]
    BudgetTooLarge(u32),
    #[error("out_cap must be at least 1")]
    ZeroOutCap,
    #[error("table was produced by machine {found:?}, expected {expected:?}")]
    MachineMismatch { found: String, expected: &'static str },
    #[error("table file line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct EnumerationBudget {
    /// Maximum program length in bits.
    pub max_len: u32,
    /// Outputs are truncated to this many bits.
    pub out_cap: usize,
}

impl EnumerationBudget {
    pub fn new(max_len: u32, out_cap: usize) -> Result<Self, TableError> {
        if max_len > MAX_BUDGET {
            return Err(TableError::BudgetTooLarge(max_len));
        }
        if out_cap == 0 {
            return Err(TableError::ZeroOutCap);
        }
        Ok(EnumerationBudget { max_len, out_cap })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityTable {
    budget: EnumerationBudget,
    entries: HashMap<BitString, u32>,
}

fn program(value: u64, len: u32) -> BitString {
    BitString::from_u64(value, len as usize)
}

fn outputs_of_length(len: u32, out_cap: usize) -> Vec<BitString> {
    let count = 1u64 << len;
    if len >= 12 {
        (0..count)
            .into_par_iter()
            .map(|v| run_machine(&program(v, len), out_cap))
            .collect()
    } else {
        (0..count).map(|v| run_machine(&program(v, len), out_cap)).collect()
    }
}

/// Run every program of length `0..=B` and record, for every prefix of every
/// output, the shortest program reaching it.
///
/// Program lengths are processed in increasing order, so the first time a
/// string enters the table its value is final. Inserting an output also
/// inserts all of its prefixes, which lets the walk stop at the first prefix
/// already present.
pub fn enumerate_km(budget: EnumerationBudget) -> ComplexityTable {
    let mut entries: HashMap<BitString, u32> = HashMap::new();
    for len in 0..=budget.max_len {
        for out in outputs_of_length(len, budget.out_cap) {
            let mut y = out;
            loop {
                if entries.contains_key(&y) {
                    break;
                }
                entries.insert(y.clone(), len);
                if y.pop().is_none() {
                    break;
                }
            }
        }
    }
    ComplexityTable { budget, entries }
}

/// For each target, the first program in (length, lexicographic) order whose
/// output extends it.
pub fn minimal_programs(budget: EnumerationBudget, targets: &[BitString]) -> Vec<Option<BitString>> {
    let mut found: Vec<Option<BitString>> = vec![None; targets.len()];
    let mut remaining = targets.len();
    for len in 0..=budget.max_len {
        if remaining == 0 {
            break;
        }
        for v in 0..(1u64 << len) {
            let p = program(v, len);
            let out = run_machine(&p, budget.out_cap);
            for (t, slot) in targets.iter().zip(found.iter_mut()) {
                if slot.is_none() && t.is_prefix_of(&out) {
                    *slot = Some(p.clone());
                    remaining -= 1;
                }
            }
        }
    }
    found
}

impl ComplexityTable {
    pub fn budget(&self) -> EnumerationBudget {
        self.budget
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `Km_B(x)`, or `None` when no program within budget reaches `x`.
    pub fn km_upper(&self, x: &BitString) -> Option<u32> {
        self.entries.get(x).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BitString, u32)> {
        self.entries.iter().map(|(x, &k)| (x, k))
    }

    /// `Σ 2^-Km_B(x)` over `strings`; absent entries contribute nothing.
    pub fn kraft_sum<'a, I: IntoIterator<Item = &'a BitString>>(&self, strings: I) -> Dyadic {
        strings
            .into_iter()
            .filter_map(|x| self.km_upper(x))
            .map(|k| Dyadic::pow2_neg(k as u64))
            .sum()
    }

    /// Pointwise minimum of two tables built under the same `out_cap`.
    pub fn merge_min(&mut self, other: &ComplexityTable) {
        for (x, &k) in &other.entries {
            self.entries
                .entry(x.clone())
                .and_modify(|v| *v = (*v).min(k))
                .or_insert(k);
        }
        self.budget.max_len = self.budget.max_len.max(other.budget.max_len);
    }

    /// Header lines, then `x km` per entry in shortlex order.
    pub fn to_text(&self) -> String {
        let mut sorted: Vec<(&BitString, u32)> = self.iter().collect();
        sorted.sort();
        let mut s = String::with_capacity(sorted.len() * 16);
        writeln!(s, "# hippo-lab km table").unwrap();
        writeln!(s, "machine {MACHINE_VERSION}").unwrap();
        writeln!(s, "budget {}", self.budget.max_len).unwrap();
        writeln!(s, "out_cap {}", self.budget.out_cap).unwrap();
        writeln!(s, "entries {}", sorted.len()).unwrap();
        for (x, k) in sorted {
            writeln!(s, "{x} {k}").unwrap();
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, TableError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.starts_with('#'));
        let mut header = |key: &str| -> Result<String, TableError> {
            let (i, line) = lines.next().ok_or(TableError::Parse {
                line: 0,
                reason: format!("missing {key} header"),
            })?;
            line.strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .map(str::to_string)
                .ok_or_else(|| TableError::Parse {
                    line: i + 1,
                    reason: format!("expected `{key} ...`"),
                })
        };
        let machine = header("machine")?;
        if machine != MACHINE_VERSION {
            return Err(TableError::MachineMismatch {
                found: machine,
                expected: MACHINE_VERSION,
            });
        }
        let num = |s: String, line: usize| {
            s.parse::<u64>().map_err(|e| TableError::Parse {
                line,
                reason: e.to_string(),
            })
        };
        let max_len = num(header("budget")?, 3)? as u32;
        let out_cap = num(header("out_cap")?, 4)? as usize;
        let count = num(header("entries")?, 5)? as usize;
        let mut entries = HashMap::with_capacity(count);
        for (i, line) in lines {
            let bad = |reason: String| TableError::Parse { line: i + 1, reason };
            let (x, k) = line.split_once(' ').ok_or_else(|| bad("expected `x km`".into()))?;
            let x: BitString = x.parse().map_err(|e: crate::bits::ParseBitStringError| bad(e.to_string()))?;
            let k: u32 = k.parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?;
            entries.insert(x, k);
        }
        if entries.len() != count {
            return Err(TableError::Parse {
                line: 0,
                reason: format!("header announces {count} entries, found {}", entries.len()),
            });
        }
        Ok(ComplexityTable {
            budget: EnumerationBudget { max_len, out_cap },
            entries,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn budget(b: u32) -> EnumerationBudget {
        EnumerationBudget::new(b, 32).unwrap()
    }

    #[test]
    fn empty_string_costs_nothing() {
        let t = enumerate_km(budget(4));
        assert_eq!(t.km_upper(&BitString::new()), Some(0));
    }

    #[test]
    fn literal_witness_bounds_km() {
        let t = enumerate_km(budget(6));
        assert!(t.km_upper(&bs("10")).unwrap() <= 6);
        // "0" + gamma(1) + "1" reaches "1" in three bits; nothing shorter does
        assert_eq!(t.km_upper(&bs("1")), Some(3));
    }

    #[test]
    fn more_budget_never_hurts() {
        let small = enumerate_km(budget(4));
        let big = enumerate_km(budget(10));
        let x = bs("0000000000");
        assert_eq!(small.km_upper(&x), None);
        assert!(big.km_upper(&x).is_some());
        for (y, k) in small.iter() {
            assert!(big.km_upper(y).unwrap() <= k);
        }
    }

    #[test]
    fn prefix_monotone() {
        let t = enumerate_km(budget(10));
        for (x, k) in t.iter() {
            for p in x.prefixes() {
                assert!(t.km_upper(&p).unwrap() <= k);
            }
        }
    }

    #[test]
    fn agrees_with_minimal_program_scan() {
        let b = budget(9);
        let t = enumerate_km(b);
        let targets: Vec<BitString> = BitString::all_up_to(5).collect();
        let progs = minimal_programs(b, &targets);
        for (x, p) in targets.iter().zip(progs) {
            assert_eq!(t.km_upper(x), p.map(|p| p.len() as u32), "{x}");
        }
    }

    #[test]
    fn text_roundtrip() {
        let t = enumerate_km(budget(7));
        let back = ComplexityTable::from_text(&t.to_text()).unwrap();
        assert_eq!(back, t);
        let tampered = t.to_text().replace(MACHINE_VERSION, "other/0");
        assert!(matches!(
            ComplexityTable::from_text(&tampered),
            Err(TableError::MachineMismatch { .. })
        ));
    }

    #[test]
    fn merge_is_pointwise_min() {
        let mut a = enumerate_km(budget(5));
        let b = enumerate_km(budget(8));
        a.merge_min(&b);
        assert_eq!(a, b);
    }

    #[test]
    fn budget_limits() {
        assert!(EnumerationBudget::new(MAX_BUDGET + 1, 8).is_err());
        assert!(EnumerationBudget::new(4, 0).is_err());
    }
}
