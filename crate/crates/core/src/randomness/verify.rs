use std::collections::BTreeMap;

use serde::Serialize;

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::measure::Measure;
use crate::prefix::cover_mass;

use super::{FamilyError, TestFamily};

/// Per-level upper bound on the cover mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelBound {
    /// `2^-(scale·n)`; `scale = 1` is the standard `2^-n`.
    PowTwo { scale: u64 },
    /// Explicit strictly decreasing values for levels `1, 2, ...`.
    Table(Vec<Dyadic>),
}

impl LevelBound {
    pub fn standard() -> Self {
        LevelBound::PowTwo { scale: 1 }
    }

    pub fn table(values: Vec<Dyadic>) -> Result<Self, FamilyError> {
        if values.iter().any(Dyadic::is_zero) || values.windows(2).any(|w| w[1] >= w[0]) {
            return Err(FamilyError::BoundNotDecreasing);
        }
        Ok(LevelBound::Table(values))
    }

    pub fn at(&self, n: u64) -> Option<Dyadic> {
        match self {
            LevelBound::PowTwo { scale } => Some(Dyadic::pow2_neg(scale * n)),
            LevelBound::Table(v) => v.get(n.checked_sub(1)? as usize).cloned(),
        }
    }

    pub fn kind(&self) -> String {
        match self {
            LevelBound::PowTwo { scale: 1 } => "2^-n".into(),
            LevelBound::PowTwo { scale } => format!("2^-{scale}n"),
            LevelBound::Table(_) => "computable-decreasing table".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LevelCheck {
    pub n: u64,
    pub size: usize,
    pub mass: Dyadic,
    /// `None` when the bound table has no entry for this level.
    pub bound: Option<Dyadic>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub bound_kind: String,
    pub levels: Vec<LevelCheck>,
    pub nesting_pass: bool,
    pub nesting_witness: Option<(u64, BitString)>,
    pub pass: bool,
}

/// Exact check of `P(cover(level n)) < bound(n)` for every level, plus nesting.
pub fn verify_test(family: &TestFamily, measure: &dyn Measure, bound: &LevelBound) -> VerificationReport {
    let levels: Vec<LevelCheck> = family
        .levels()
        .map(|(n, set)| {
            let mass = cover_mass(set, measure);
            let b = bound.at(n);
            let pass = b.as_ref().is_some_and(|b| mass < *b);
            LevelCheck {
                n,
                size: set.len(),
                mass,
                bound: b,
                pass,
            }
        })
        .collect();
    let nesting_witness = family.nesting_violation();
    let nesting_pass = nesting_witness.is_none();
    let pass = nesting_pass && levels.iter().all(|l| l.pass);
    VerificationReport {
        bound_kind: bound.kind(),
        levels,
        nesting_pass,
        nesting_witness,
        pass,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SandwichSide {
    /// `cover(V_n) ⊄ cover(U_n)`.
    BlindNotInMeasure,
    /// `cover(U_n) ⊄ cover(V_{n-c})`.
    MeasureNotInShiftedBlind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SandwichWitness {
    pub n: u64,
    pub x: BitString,
    pub side: SandwichSide,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    pub c: u64,
    pub holds: bool,
    pub witness: Option<SandwichWitness>,
}

/// `cover(V_n) ⊆ cover(U_n) ⊆ cover(V_{n-c})` for every level, with
/// `V_m` for `m < 1` taken as the whole space.
pub fn sandwich_check(blind: &TestFamily, measure_test: &TestFamily, c: u64) -> Result<SandwichReport, FamilyError> {
    if blind.horizon() != measure_test.horizon() {
        return Err(FamilyError::HorizonMismatch(blind.horizon(), measure_test.horizon()));
    }
    if blind.n_max() != measure_test.n_max() {
        return Err(FamilyError::LevelCountMismatch(blind.n_max(), measure_test.n_max()));
    }
    let empty = Default::default();
    for n in 1..=blind.n_max() {
        let v = blind.level(n as i64).unwrap_or(&empty);
        let u = measure_test.level(n as i64).unwrap_or(&empty);
        if let Some(x) = v.cover_subset_witness(u) {
            return Ok(SandwichReport {
                c,
                holds: false,
                witness: Some(SandwichWitness {
                    n,
                    x: x.clone(),
                    side: SandwichSide::BlindNotInMeasure,
                }),
            });
        }
        let shifted = n as i64 - c as i64;
        if shifted >= 1 {
            let vs = blind.level(shifted).unwrap_or(&empty);
            if let Some(x) = u.cover_subset_witness(vs) {
                return Ok(SandwichReport {
                    c,
                    holds: false,
                    witness: Some(SandwichWitness {
                        n,
                        x: x.clone(),
                        side: SandwichSide::MeasureNotInShiftedBlind,
                    }),
                });
            }
        }
    }
    Ok(SandwichReport {
        c,
        holds: true,
        witness: None,
    })
}

/// Per-level cover masses keyed by level, for plotting and summaries.
pub fn level_masses(family: &TestFamily, measure: &dyn Measure) -> BTreeMap<u64, Dyadic> {
    family.levels().map(|(n, s)| (n, cover_mass(s, measure))).collect()
}
