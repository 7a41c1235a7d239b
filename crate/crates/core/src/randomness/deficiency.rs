use serde::Serialize;

use crate::bits::BitString;
use crate::complexity::ComplexityTable;
use crate::dyadic::{Dyadic, LogBounds};
use crate::measure::Measure;

use super::TestFamily;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub prefix: BitString,
    pub mass: Dyadic,
    pub neg_log: LogBounds,
    /// `None`: no program within budget; the row carries no evidence.
    pub km: Option<u32>,
    /// `[floor(-log P) - Km_B, ceil(-log P) - Km_B]`.
    pub deficiency: Option<(i64, i64)>,
    /// Largest `n >= 0` with `P(x) < 2^-(Km_B(x) + n)`; 0 when none.
    pub deepest_level: Option<u64>,
    /// Running maxima of the interval ends over the prefixes so far.
    pub running_max: Option<(i64, i64)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeficiencyProfile {
    pub rows: Vec<ProfileRow>,
}

impl DeficiencyProfile {
    /// Finite-horizon estimate of `sup -log P(x) - Km(x)` along the
    /// sequence (interval ends).
    pub fn sup_estimate(&self) -> Option<(i64, i64)> {
        self.rows.last().and_then(|r| r.running_max)
    }

    /// Running maximum of the lower deficiency bound, per prefix length.
    pub fn running_max_lower(&self) -> Vec<Option<i64>> {
        self.rows.iter().map(|r| r.running_max.map(|m| m.0)).collect()
    }
}

fn deepest_level(mass: &Dyadic, bounds: &LogBounds, km: u32) -> u64 {
    // P < 2^-m  <=>  m < ceil(-log P)  (m integer)
    let n = bounds.ceil_neg_log as i64 - km as i64 - 1;
    if n < 1 {
        return 0;
    }
    debug_assert!(mass.cmp_pow2(km as u64 + n as u64).is_lt());
    n as u64
}

/// Deficiency record for every prefix of `x`, from `ε` to `x` itself.
pub fn deficiency_profile(x: &BitString, measure: &dyn Measure, table: &ComplexityTable) -> DeficiencyProfile {
    let mut rows = Vec::with_capacity(x.len() + 1);
    let mut prefix = BitString::with_capacity(x.len());
    let mut mass = Dyadic::one();
    let mut running: Option<(i64, i64)> = None;
    for i in 0..=x.len() {
        if i > 0 {
            let bit = x.get(i - 1).unwrap();
            let q = measure.prob_one(&prefix);
            let cond = if bit { q } else { q.complement().expect("conditionals lie in (0,1)") };
            mass = &mass * &cond;
            prefix.push(bit);
        }
        let neg_log = mass.neg_log_bounds().expect("cylinder masses lie in (0,1]");
        let km = table.km_upper(&prefix);
        let deficiency = km.map(|k| {
            (
                neg_log.floor_neg_log as i64 - k as i64,
                neg_log.ceil_neg_log as i64 - k as i64,
            )
        });
        if let Some((lo, hi)) = deficiency {
            running = Some(match running {
                Some((a, b)) => (a.max(lo), b.max(hi)),
                None => (lo, hi),
            });
        }
        rows.push(ProfileRow {
            prefix: prefix.clone(),
            mass: mass.clone(),
            neg_log,
            km,
            deficiency,
            deepest_level: km.map(|k| deepest_level(&mass, &neg_log, k)),
            running_max: running,
        });
    }
    DeficiencyProfile { rows }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Evidence {
    /// Deepest level whose cover meets `Δ(x)`; 0 when none does.
    pub level: u64,
    pub witness: Option<BitString>,
}

/// Deepest level of `family` whose cover intersects the cylinder of `x`.
pub fn hippocratic_evidence(x: &BitString, family: &TestFamily) -> Evidence {
    for (n, set) in family.levels().collect::<Vec<_>>().into_iter().rev() {
        if let Some(w) = set.intersects(x) {
            return Evidence {
                level: n,
                witness: Some(w.clone()),
            };
        }
    }
    Evidence {
        level: 0,
        witness: None,
    }
}
