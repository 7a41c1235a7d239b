//! Nested test families and their two constructions.
//!
//! The blind construction sees only a [`LogApproximation`] and a complexity
//! table; its signature has no measure parameter. The auditor construction
//! reads the measure directly.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::approx::LogApproximation;
use crate::bits::BitString;
use crate::complexity::{ComplexityTable, MACHINE_VERSION};
use crate::measure::{tree_masses, Measure};
use crate::prefix::{minimal_cover, PrefixFreeSet};

use super::FamilyError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// Built from `(f, c)` alone; `digest` identifies the serialized pair.
    Blind { rule: String, c: u64, digest: String },
    /// Built with access to the named measure.
    Measure { id: String },
    External,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Blind { rule, c, digest } => write!(f, "blind {rule} c={c} digest={digest}"),
            Provenance::Measure { id } => write!(f, "measure {id}"),
            Provenance::External => f.write_str("external"),
        }
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "external" {
            return Ok(Provenance::External);
        }
        if let Some(id) = s.strip_prefix("measure ") {
            return Ok(Provenance::Measure { id: id.to_string() });
        }
        if let Some(rest) = s.strip_prefix("blind ") {
            let parts: Vec<&str> = rest.split(' ').collect();
            if let [rule, c, digest] = parts[..] {
                let c = c
                    .strip_prefix("c=")
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| format!("bad constant {c:?}"))?;
                let digest = digest
                    .strip_prefix("digest=")
                    .ok_or_else(|| format!("bad digest {digest:?}"))?;
                return Ok(Provenance::Blind {
                    rule: rule.to_string(),
                    c,
                    digest: digest.to_string(),
                });
            }
        }
        Err(format!("unrecognised provenance {s:?}"))
    }
}

/// Short digest of the serialized approximation.
pub fn approx_digest(la: &LogApproximation) -> String {
    let h = Sha256::digest(la.to_toml().as_bytes());
    hex::encode(&h[..8])
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestFamily {
    levels: BTreeMap<u64, PrefixFreeSet>,
    horizon: usize,
    n_max: u64,
    provenance: Provenance,
    /// Machine and budget of the complexity table used, if any.
    table_tag: String,
}

pub fn table_tag(table: &ComplexityTable) -> String {
    let b = table.budget();
    format!("{MACHINE_VERSION} B={} out_cap={}", b.max_len, b.out_cap)
}

fn from_candidates(
    mut raw: BTreeMap<u64, Vec<BitString>>,
    n_max: u64,
    horizon: usize,
    provenance: Provenance,
    table: &ComplexityTable,
) -> TestFamily {
    let levels = (1..=n_max)
        .map(|n| (n, minimal_cover(raw.remove(&n).unwrap_or_default())))
        .collect();
    TestFamily {
        levels,
        horizon,
        n_max,
        provenance,
        table_tag: table_tag(table),
    }
}

/// Level `n` is the minimal cover of `{x : |x| <= horizon, Km_B(x) < f(x) - n}`.
/// Strings with no program in budget never enter.
pub fn build_blind_test(
    la: &LogApproximation,
    table: &ComplexityTable,
    n_max: u64,
    horizon: usize,
) -> TestFamily {
    let mut raw: BTreeMap<u64, Vec<BitString>> = BTreeMap::new();
    for x in BitString::all_up_to(horizon) {
        let Some(km) = table.km_upper(&x) else { continue };
        let f = la.f(&x);
        for n in 1..=n_max {
            if km as u64 + n < f {
                raw.entry(n).or_default().push(x.clone());
            } else {
                break;
            }
        }
    }
    let provenance = Provenance::Blind {
        rule: la.describe_rule(),
        c: la.c(),
        digest: approx_digest(la),
    };
    from_candidates(raw, n_max, horizon, provenance, table)
}

/// Level `n` is the minimal cover of
/// `{x : |x| <= horizon, P(x) < 2^-(Km_B(x) + n)}`.
pub fn build_measure_test(
    measure: &dyn Measure,
    table: &ComplexityTable,
    n_max: u64,
    horizon: usize,
) -> TestFamily {
    let masses = tree_masses(measure, horizon);
    let mut raw: BTreeMap<u64, Vec<BitString>> = BTreeMap::new();
    for (len, level) in masses.iter().enumerate() {
        for (v, mass) in level.iter().enumerate() {
            let x = BitString::from_u64(v as u64, len);
            let Some(km) = table.km_upper(&x) else { continue };
            for n in 1..=n_max {
                if mass.cmp_pow2(km as u64 + n).is_lt() {
                    raw.entry(n).or_default().push(x.clone());
                } else {
                    break;
                }
            }
        }
    }
    let provenance = Provenance::Measure {
        id: measure.spec().id(),
    };
    from_candidates(raw, n_max, horizon, provenance, table)
}

impl TestFamily {
    /// A family from explicit levels `1..=levels.len()`.
    pub fn external(levels: Vec<PrefixFreeSet>, horizon: usize) -> Self {
        let n_max = levels.len() as u64;
        TestFamily {
            levels: (1..).zip(levels).collect(),
            horizon,
            n_max,
            provenance: Provenance::External,
            table_tag: "none".into(),
        }
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn n_max(&self) -> u64 {
        self.n_max
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn table_tag(&self) -> &str {
        &self.table_tag
    }

    /// Level `n`; indices below 1 denote the whole space.
    pub fn level(&self, n: i64) -> Option<&PrefixFreeSet> {
        if n < 1 {
            return None;
        }
        self.levels.get(&(n as u64))
    }

    pub fn levels(&self) -> impl Iterator<Item = (u64, &PrefixFreeSet)> {
        self.levels.iter().map(|(&n, s)| (n, s))
    }

    /// First `(n, x)` with `x ∈ level n+1` not covered by level `n`.
    pub fn nesting_violation(&self) -> Option<(u64, BitString)> {
        self.levels
            .iter()
            .zip(self.levels.iter().skip(1))
            .find_map(|((_, outer), (&n, inner))| {
                inner.cover_subset_witness(outer).map(|x| (n, x.clone()))
            })
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "# hippo-lab test family").unwrap();
        writeln!(s, "provenance {}", self.provenance).unwrap();
        writeln!(s, "horizon {}", self.horizon).unwrap();
        writeln!(s, "n_max {}", self.n_max).unwrap();
        writeln!(s, "table {}", self.table_tag).unwrap();
        for (n, set) in &self.levels {
            writeln!(s, "level {n} {}", set.len()).unwrap();
            s.push_str(&set.to_lines());
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, FamilyError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
            .peekable();
        let mut header = |key: &str| -> Result<(usize, String), FamilyError> {
            let (i, line) = lines.next().ok_or_else(|| FamilyError::Parse {
                line: 0,
                reason: format!("missing {key} header"),
            })?;
            let v = line
                .strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .ok_or_else(|| FamilyError::Parse {
                    line: i + 1,
                    reason: format!("expected `{key} ...`"),
                })?;
            Ok((i + 1, v.to_string()))
        };
        let (pl, prov) = header("provenance")?;
        let provenance = prov
            .parse()
            .map_err(|reason| FamilyError::Parse { line: pl, reason })?;
        let int = |(line, v): (usize, String)| {
            v.parse::<u64>().map_err(|e| FamilyError::Parse {
                line,
                reason: e.to_string(),
            })
        };
        let horizon = int(header("horizon")?)? as usize;
        let n_max = int(header("n_max")?)?;
        let (_, table_tag) = header("table")?;

        let mut levels = BTreeMap::new();
        let mut current: Option<(u64, usize, usize, Vec<BitString>)> = None;
        let finish = |cur: Option<(u64, usize, usize, Vec<BitString>)>,
                      levels: &mut BTreeMap<u64, PrefixFreeSet>|
         -> Result<(), FamilyError> {
            if let Some((n, line, count, items)) = cur {
                if items.len() != count {
                    return Err(FamilyError::Parse {
                        line,
                        reason: format!("level {n} announces {count} strings, found {}", items.len()),
                    });
                }
                levels.insert(n, PrefixFreeSet::new(items)?);
            }
            Ok(())
        };
        for (i, line) in lines {
            if let Some(rest) = line.strip_prefix("level ") {
                finish(current.take(), &mut levels)?;
                let (n, count) = rest
                    .split_once(' ')
                    .and_then(|(n, c)| Some((n.parse().ok()?, c.parse().ok()?)))
                    .ok_or_else(|| FamilyError::Parse {
                        line: i + 1,
                        reason: "expected `level <n> <count>`".into(),
                    })?;
                current = Some((n, i + 1, count, Vec::new()));
            } else {
                let x: BitString = line.trim().parse().map_err(|e: crate::bits::ParseBitStringError| {
                    FamilyError::Parse {
                        line: i + 1,
                        reason: e.to_string(),
                    }
                })?;
                match current.as_mut() {
                    Some((_, _, _, items)) => items.push(x),
                    None => {
                        return Err(FamilyError::Parse {
                            line: i + 1,
                            reason: "string before first level header".into(),
                        })
                    }
                }
            }
        }
        finish(current, &mut levels)?;
        Ok(TestFamily {
            levels,
            horizon,
            n_max,
            provenance,
            table_tag,
        })
    }
}
