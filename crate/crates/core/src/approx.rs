//! Log-approximations `(f, c)` with `f(x) < -log P(x) < f(x) + c`.
//!
//! A [`LogApproximation`] carries only a computable rule `f` and the
//! constant `c`. It holds no reference to any measure: this is the sole
//! information blind test construction receives.
//!
//! The sandwich is required for nonempty strings only. At the root
//! `-log P(ε) = 0`, which no natural-number `f(ε)` can undercut strictly,
//! so `f(ε)` is ignored and the root mass is pinned to exactly 1.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::dyadic::Dyadic;
use crate::measure::{tree_masses, Measure};

#[derive(Debug, Error)]
pub enum ApproxError {
    #[error("unknown f-rule {0:?}")]
    UnknownRule(String),
    #[error("missing parameter {0:?}")]
    MissingParam(&'static str),
    #[error("parameter {name:?}: {reason}")]
    BadParam { name: &'static str, reason: String },
    #[error("the constant c must be positive")]
    NonPositiveC,
    #[error("approximation file: {0}")]
    Toml(#[from] toml::de::Error),
}

/// A computable rule `f: strings -> naturals`.
pub trait ApproxRule: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn eval(&self, x: &BitString) -> u64;

    fn spec(&self) -> RuleSpec;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSpec {
    pub rule: String,
    #[serde(flatten)]
    pub params: toml::Table,
}

impl RuleSpec {
    fn new(rule: &str) -> Self {
        RuleSpec {
            rule: rule.to_string(),
            params: toml::Table::new(),
        }
    }

    fn int_param(&self, name: &'static str) -> Result<u64, ApproxError> {
        let v = self
            .params
            .get(name)
            .ok_or(ApproxError::MissingParam(name))?
            .as_integer()
            .ok_or_else(|| ApproxError::BadParam {
                name,
                reason: "expected an integer".into(),
            })?;
        u64::try_from(v).map_err(|_| ApproxError::BadParam {
            name,
            reason: "expected a nonnegative integer".into(),
        })
    }
}

/// `f(x) = max(|x| - k, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LengthMinus {
    k: u64,
}

impl LengthMinus {
    pub const NAME: &'static str = "length-minus";

    pub fn new(k: u64) -> Self {
        LengthMinus { k }
    }

    pub fn from_spec(spec: &RuleSpec) -> Result<Self, ApproxError> {
        Ok(LengthMinus::new(spec.int_param("k")?))
    }
}

impl ApproxRule for LengthMinus {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn eval(&self, x: &BitString) -> u64 {
        (x.len() as u64).saturating_sub(self.k)
    }

    fn spec(&self) -> RuleSpec {
        let mut s = RuleSpec::new(Self::NAME);
        s.params.insert("k".into(), (self.k as i64).into());
        s
    }
}

/// Explicit values for every string of length `<= depth`, listed in
/// shortlex order. Deeper strings extend their depth-`depth` prefix by one
/// per extra bit: `f(x) = f(x[..depth]) + |x| - depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableToDepth {
    depth: usize,
    values: Vec<u64>,
}

fn shortlex_index(x: &BitString) -> usize {
    (1usize << x.len()) - 1 + x.to_u64().expect("table depth below 64") as usize
}

impl TableToDepth {
    pub const NAME: &'static str = "table-to-depth";

    pub fn new(depth: usize, values: Vec<u64>) -> Result<Self, ApproxError> {
        if depth >= 32 {
            return Err(ApproxError::BadParam {
                name: "depth",
                reason: "depth must be below 32".into(),
            });
        }
        let expected = (1usize << (depth + 1)) - 1;
        if values.len() != expected {
            return Err(ApproxError::BadParam {
                name: "values",
                reason: format!("expected {expected} values, got {}", values.len()),
            });
        }
        Ok(TableToDepth { depth, values })
    }

    /// Tabulate another rule to `depth`.
    pub fn tabulate(rule: &dyn ApproxRule, depth: usize) -> Self {
        let values = BitString::all_up_to(depth).map(|x| rule.eval(&x)).collect();
        TableToDepth { depth, values }
    }

    /// Replace the value at one node (`|x| <= depth`).
    pub fn with_override(mut self, x: &BitString, value: u64) -> Self {
        assert!(x.len() <= self.depth, "override beyond table depth");
        self.values[shortlex_index(x)] = value;
        self
    }

    pub fn from_spec(spec: &RuleSpec) -> Result<Self, ApproxError> {
        let depth = spec.int_param("depth")? as usize;
        let bad = |reason: &str| ApproxError::BadParam {
            name: "values",
            reason: reason.to_string(),
        };
        let values = spec
            .params
            .get("values")
            .ok_or(ApproxError::MissingParam("values"))?
            .as_array()
            .ok_or_else(|| bad("expected an array"))?
            .iter()
            .map(|v| {
                v.as_integer()
                    .and_then(|i| u64::try_from(i).ok())
                    .ok_or_else(|| bad("expected nonnegative integers"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        TableToDepth::new(depth, values)
    }
}

impl ApproxRule for TableToDepth {
    fn name(&self) -> &'static str {
        Self::NAME
    }

    fn eval(&self, x: &BitString) -> u64 {
        if x.len() <= self.depth {
            self.values[shortlex_index(x)]
        } else {
            let head = x.prefix(self.depth);
            self.values[shortlex_index(&head)] + (x.len() - self.depth) as u64
        }
    }

    fn spec(&self) -> RuleSpec {
        let mut s = RuleSpec::new(Self::NAME);
        s.params.insert("depth".into(), (self.depth as i64).into());
        s.params.insert(
            "values".into(),
            toml::Value::Array(self.values.iter().map(|&v| (v as i64).into()).collect()),
        );
        s
    }
}

pub type RuleBuilder =
    Box<dyn Fn(&RuleSpec) -> Result<Arc<dyn ApproxRule>, ApproxError> + Send + Sync>;

/// The f-rule catalogue, by name.
pub struct RuleRegistry {
    builders: BTreeMap<&'static str, RuleBuilder>,
}

impl RuleRegistry {
    pub fn empty() -> Self {
        RuleRegistry {
            builders: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, name: &'static str, builder: RuleBuilder) {
        self.builders.insert(name, builder);
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.builders.keys().copied()
    }

    pub fn build(&self, spec: &RuleSpec) -> Result<Arc<dyn ApproxRule>, ApproxError> {
        let b = self
            .builders
            .get(spec.rule.as_str())
            .ok_or_else(|| ApproxError::UnknownRule(spec.rule.clone()))?;
        b(spec)
    }
}

impl Default for RuleRegistry {
    fn default() -> Self {
        let mut r = RuleRegistry::empty();
        r.register(
            LengthMinus::NAME,
            Box::new(|s| Ok(Arc::new(LengthMinus::from_spec(s)?))),
        );
        r.register(
            TableToDepth::NAME,
            Box::new(|s| Ok(Arc::new(TableToDepth::from_spec(s)?))),
        );
        r
    }
}

/// On-disk form: `c = <int>` plus an `[f]` table naming the rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApproxSpec {
    pub c: u64,
    pub f: RuleSpec,
}

#[derive(Clone)]
pub struct LogApproximation {
    rule: Arc<dyn ApproxRule>,
    c: u64,
}

impl fmt::Debug for LogApproximation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogApproximation({}, c={})", self.describe_rule(), self.c)
    }
}

impl LogApproximation {
    pub fn new(rule: impl ApproxRule + 'static, c: u64) -> Result<Self, ApproxError> {
        Self::from_arc(Arc::new(rule), c)
    }

    pub fn from_arc(rule: Arc<dyn ApproxRule>, c: u64) -> Result<Self, ApproxError> {
        if c == 0 {
            return Err(ApproxError::NonPositiveC);
        }
        Ok(LogApproximation { rule, c })
    }

    pub fn f(&self, x: &BitString) -> u64 {
        self.rule.eval(x)
    }

    pub fn c(&self) -> u64 {
        self.c
    }

    pub fn rule(&self) -> &dyn ApproxRule {
        self.rule.as_ref()
    }

    /// Short human-readable rule name; tables are abbreviated.
    pub fn describe_rule(&self) -> String {
        let spec = self.rule.spec();
        match spec.rule.as_str() {
            LengthMinus::NAME => format!("length-minus-{}", spec.params["k"]),
            TableToDepth::NAME => format!("table-to-depth-{}", spec.params["depth"]),
            other => other.to_string(),
        }
    }

    pub fn to_spec(&self) -> ApproxSpec {
        ApproxSpec {
            c: self.c,
            f: self.rule.spec(),
        }
    }

    pub fn from_spec(spec: &ApproxSpec, registry: &RuleRegistry) -> Result<Self, ApproxError> {
        Self::from_arc(registry.build(&spec.f)?, spec.c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&self.to_spec()).expect("approximation spec is always representable")
    }

    pub fn from_toml(text: &str, registry: &RuleRegistry) -> Result<Self, ApproxError> {
        let spec: ApproxSpec = toml::from_str(text)?;
        Self::from_spec(&spec, registry)
    }
}

/// First node `x` (shortlex, `1 <= |x| <= depth`) where
/// `2^-(f(x)+c) < P(x) < 2^-f(x)` fails.
pub fn first_violation(
    measure: &dyn Measure,
    la: &LogApproximation,
    depth: usize,
) -> Option<BitString> {
    let levels = tree_masses(measure, depth);
    for (len, level) in levels.iter().enumerate().skip(1) {
        for (v, mass) in level.iter().enumerate() {
            let x = BitString::from_u64(v as u64, len);
            let f = la.f(&x);
            let below = mass.cmp_pow2(f) == Ordering::Less;
            let above = mass.cmp_pow2(f + la.c()) == Ordering::Greater;
            if !(below && above) {
                return Some(x);
            }
        }
    }
    None
}

/// Strict sandwich on every nonempty node of length `<= depth`.
pub fn validate_log_approx(measure: &dyn Measure, la: &LogApproximation, depth: usize) -> bool {
    first_violation(measure, la, depth).is_none()
}

/// A dyadic interval with explicit open/closed ends.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Dyadic,
    pub lo_closed: bool,
    pub hi: Dyadic,
    pub hi_closed: bool,
}

impl Interval {
    pub fn open(lo: Dyadic, hi: Dyadic) -> Self {
        Interval {
            lo,
            lo_closed: false,
            hi,
            hi_closed: false,
        }
    }

    pub fn point(v: Dyadic) -> Self {
        Interval {
            lo: v.clone(),
            lo_closed: true,
            hi: v,
            hi_closed: true,
        }
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Less => false,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Greater => true,
        }
    }

    pub fn contains(&self, v: &Dyadic) -> bool {
        let lo_ok = match v.cmp(&self.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Less => false,
        };
        let hi_ok = match v.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        lo_ok && hi_ok
    }

    /// Minkowski sum.
    pub fn sum(&self, other: &Interval) -> Interval {
        Interval {
            lo: &self.lo + &other.lo,
            lo_closed: self.lo_closed && other.lo_closed,
            hi: &self.hi + &other.hi,
            hi_closed: self.hi_closed && other.hi_closed,
        }
    }

    pub fn intersect(&self, other: &Interval) -> Interval {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval {
            lo,
            lo_closed,
            hi,
            hi_closed,
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Feasibility {
    FeasibleToDepth,
    Infeasible,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeasibilityReport {
    pub depth: usize,
    pub verdict: Feasibility,
    pub violating_node: Option<BitString>,
    /// Propagated interval of admissible masses per node, for every node
    /// processed before the verdict was reached.
    pub intervals: BTreeMap<BitString, Interval>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.verdict == Feasibility::FeasibleToDepth
    }
}

fn node_constraint(la: &LogApproximation, x: &BitString) -> Interval {
    if x.is_empty() {
        return Interval::point(Dyadic::one());
    }
    let f = la.f(x);
    Interval::open(Dyadic::pow2_neg(f + la.c()), Dyadic::pow2_neg(f))
}

/// Does any measure satisfy `(f, c)` on all nodes up to `depth`?
///
/// Bottom-up propagation: leaves get their own constraint, and an interior
/// node gets its constraint intersected with the sum of its children's
/// propagated intervals. The verdict is infeasible exactly when some
/// intersection is empty.
pub fn feasibility_check(la: &LogApproximation, depth: usize) -> FeasibilityReport {
    let mut intervals = BTreeMap::new();
    let mut below: Vec<Interval> = Vec::new();
    for len in (0..=depth).rev() {
        let mut current = Vec::with_capacity(1 << len);
        for v in 0..(1u64 << len) {
            let x = BitString::from_u64(v, len);
            let mut iv = node_constraint(la, &x);
            if len < depth {
                let children = below[2 * v as usize].sum(&below[2 * v as usize + 1]);
                iv = iv.intersect(&children);
            }
            let empty = iv.is_empty();
            intervals.insert(x.clone(), iv.clone());
            if empty {
                return FeasibilityReport {
                    depth,
                    verdict: Feasibility::Infeasible,
                    violating_node: Some(x),
                    intervals,
                };
            }
            current.push(iv);
        }
        below = current;
    }
    FeasibilityReport {
        depth,
        verdict: Feasibility::FeasibleToDepth,
        violating_node: None,
        intervals,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{hidden_seed, Bernoulli};

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    struct Const(u64);

    impl fmt::Debug for Const {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            write!(f, "Const({})", self.0)
        }
    }

    impl ApproxRule for Const {
        fn name(&self) -> &'static str {
            "const"
        }
        fn eval(&self, _: &BitString) -> u64 {
            self.0
        }
        fn spec(&self) -> RuleSpec {
            RuleSpec::new("const")
        }
    }

    #[test]
    fn validate_examples() {
        let fair = Bernoulli::fair();
        let la = LogApproximation::new(LengthMinus::new(1), 2).unwrap();
        assert!(validate_log_approx(&fair, &la, 8));
        // f(x) = |x|, c = 1: -log P = f exactly, strictness fails at depth 1
        let tight = LogApproximation::new(LengthMinus::new(0), 1).unwrap();
        assert!(!validate_log_approx(&fair, &tight, 1));
        assert_eq!(first_violation(&fair, &tight, 1), Some(bs("0")));
        let (m, la) = hidden_seed(b"x".to_vec());
        assert!(validate_log_approx(&m, &la, 10));
    }

    #[test]
    fn feasibility_examples() {
        let la = LogApproximation::new(LengthMinus::new(1), 2).unwrap();
        let r = feasibility_check(&la, 8);
        assert!(r.is_feasible());
        assert_eq!(r.intervals.len(), (1 << 9) - 1);

        // children each above 1/2 force the root above 1
        let zero = LogApproximation::new(Const(0), 1).unwrap();
        let r = feasibility_check(&zero, 1);
        assert_eq!(r.verdict, Feasibility::Infeasible);
        assert_eq!(r.violating_node, Some(BitString::new()));

        let r = feasibility_check(&zero, 0);
        assert!(r.is_feasible());
    }

    #[test]
    fn feasible_interval_contains_witness_masses() {
        let fair = Bernoulli::fair();
        let la = LogApproximation::new(LengthMinus::new(1), 2).unwrap();
        let r = feasibility_check(&la, 6);
        for (x, iv) in &r.intervals {
            assert!(iv.contains(&fair.mass(x)), "{x}: {iv}");
        }
    }

    #[test]
    fn boundary_touching_intervals_are_empty() {
        // (1/4, 1/2) + (1/4, 1/2) = (1/2, 1); meeting [1, 1] is empty
        let a = Interval::open(Dyadic::pow2_neg(2), Dyadic::pow2_neg(1));
        let s = a.sum(&a);
        assert!(s.intersect(&Interval::point(Dyadic::one())).is_empty());
        let closed = Interval::point(Dyadic::pow2_neg(1));
        assert!(!closed.is_empty());
    }

    #[test]
    fn rule_specs_roundtrip_through_registry() {
        let reg = RuleRegistry::default();
        let table = TableToDepth::tabulate(&LengthMinus::new(1), 4).with_override(&bs("01"), 7);
        for la in [
            LogApproximation::new(LengthMinus::new(3), 2).unwrap(),
            LogApproximation::new(table, 5).unwrap(),
        ] {
            let back = LogApproximation::from_toml(&la.to_toml(), &reg).unwrap();
            assert_eq!(back.c(), la.c());
            for x in BitString::all_up_to(7) {
                assert_eq!(back.f(&x), la.f(&x));
            }
            assert_eq!(back.to_toml(), la.to_toml());
        }
    }

    #[test]
    fn table_extends_past_depth() {
        let t = TableToDepth::tabulate(&LengthMinus::new(1), 3).with_override(&bs("010"), 9);
        assert_eq!(t.eval(&bs("010")), 9);
        assert_eq!(t.eval(&bs("01011")), 11);
        assert_eq!(t.eval(&bs("11111")), 4);
        assert!(TableToDepth::new(2, vec![0; 6]).is_err());
    }

    #[test]
    fn rejects_bad_specs() {
        let reg = RuleRegistry::default();
        assert!(matches!(
            LogApproximation::from_toml("c = 2\n[f]\nrule = \"oracle\"\n", &reg),
            Err(ApproxError::UnknownRule(_))
        ));
        assert!(matches!(
            LogApproximation::from_toml("c = 0\n[f]\nrule = \"length-minus\"\nk = 1\n", &reg),
            Err(ApproxError::NonPositiveC)
        ));
    }
}
