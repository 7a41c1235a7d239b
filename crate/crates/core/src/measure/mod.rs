//! Measures on the binary tree.
//!
//! A measure is given by its conditional probabilities: [`Measure::prob_one`]
//! returns `P(next bit = 1 | prefix)` as an exact dyadic, and cylinder masses
//! are products of conditionals. Nothing is tabulated, so masses are
//! available at any depth.
//!
//! Concrete kinds are registered by name in a [`MeasureRegistry`] and built
//! from a [`MeasureSpec`] (a `kind` plus a parameter table), which is also
//! the on-disk measure file format.

mod bernoulli;
mod hidden_seed;
mod markov;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bits::BitString;
use crate::dyadic::{ArithError, Dyadic};

pub use bernoulli::Bernoulli;
pub use hidden_seed::{hidden_seed, HiddenSeedMeasure};
pub use markov::Markov;

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("unknown measure kind {0:?}")]
    UnknownKind(String),
    #[error("missing parameter {0:?}")]
    MissingParam(&'static str),
    #[error("parameter {name:?}: {reason}")]
    BadParam { name: &'static str, reason: String },
    #[error("probability {0} must lie strictly between 0 and 1")]
    Degenerate(Dyadic),
    #[error("transition row {row} sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: Dyadic },
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("measure file: {0}")]
    Toml(#[from] toml::de::Error),
}

/// Serialized form of a measure: `kind` plus kind-specific parameters.
/// Dyadic parameters are written as `"a/2^b"` strings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSpec {
    pub kind: String,
    #[serde(flatten)]
    pub params: toml::Table,
}

impl MeasureSpec {
    pub fn new(kind: impl Into<String>) -> Self {
        MeasureSpec {
            kind: kind.into(),
            params: toml::Table::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<toml::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }

    pub fn from_toml(text: &str) -> Result<Self, MeasureError> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("measure spec is always representable")
    }

    pub fn str_param(&self, name: &'static str) -> Result<&str, MeasureError> {
        self.params
            .get(name)
            .ok_or(MeasureError::MissingParam(name))?
            .as_str()
            .ok_or_else(|| MeasureError::BadParam {
                name,
                reason: "expected a string".into(),
            })
    }

    pub fn dyadic_param(&self, name: &'static str) -> Result<Dyadic, MeasureError> {
        let s = self.str_param(name)?;
        s.parse().map_err(|e: ArithError| MeasureError::BadParam {
            name,
            reason: e.to_string(),
        })
    }

    /// One-line identifier used in report provenance.
    pub fn id(&self) -> String {
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={}", v.to_string().replace('"', "")))
            .collect();
        format!("{}({})", self.kind, params.join(","))
    }
}

pub trait Measure: Send + Sync + fmt::Debug {
    fn kind(&self) -> &'static str;

    /// `P(x·1) / P(x)` for the given prefix `x`.
    fn prob_one(&self, prefix: &BitString) -> Dyadic;

    fn spec(&self) -> MeasureSpec;

    /// `P(Δ(x))`.
    fn mass(&self, x: &BitString) -> Dyadic {
        let mut prefix = BitString::with_capacity(x.len());
        let mut mass = Dyadic::one();
        for bit in x.iter() {
            let q = self.prob_one(&prefix);
            let cond = if bit {
                q
            } else {
                q.complement().expect("conditionals lie in (0,1)")
            };
            mass = &mass * &cond;
            prefix.push(bit);
        }
        mass
    }
}

/// Masses of every node up to `depth`: `levels[l][v]` is the mass of the
/// length-`l` string whose big-endian value is `v`.
pub fn tree_masses(measure: &dyn Measure, depth: usize) -> Vec<Vec<Dyadic>> {
    let mut levels = vec![vec![Dyadic::one()]];
    for len in 0..depth {
        let parent = &levels[len];
        let mut next = Vec::with_capacity(parent.len() * 2);
        for (v, m) in parent.iter().enumerate() {
            let x = BitString::from_u64(v as u64, len);
            let q = measure.prob_one(&x);
            let q0 = q.complement().expect("conditionals lie in (0,1)");
            next.push(m * &q0);
            next.push(m * &q);
        }
        levels.push(next);
    }
    levels
}

/// Exact sampling of a length-`len` prefix: at each step draw `b` uniform
/// bits `r` for the conditional `a/2^b` and emit `1` iff `r < a`.
pub fn sample<R: RngCore + ?Sized>(measure: &dyn Measure, len: usize, rng: &mut R) -> BitString {
    let mut out = BitString::with_capacity(len);
    for _ in 0..len {
        let q = measure.prob_one(&out);
        let r = uniform_bits(rng, q.exponent());
        out.push(&r < q.numerator());
    }
    out
}

fn uniform_bits<R: RngCore + ?Sized>(rng: &mut R, bits: u64) -> BigUint {
    let words = bits.div_ceil(32) as usize;
    let digits: Vec<u32> = (0..words).map(|_| rng.next_u32()).collect();
    BigUint::new(digits) >> (words as u64 * 32 - bits)
}

pub type MeasureBuilder =
    Box<dyn Fn(&MeasureSpec) -> Result<Box<dyn Measure>, MeasureError> + Send + Sync>;

/// Measure kinds by name.
pub struct MeasureRegistry {
    builders: BTreeMap<&'static str, MeasureBuilder>,
}

impl MeasureRegistry {
    pub fn empty() -> Self {
        MeasureRegistry {
            builders: BTreeMap::new(),
        }
    }

    pub fn register(&mut self, kind: &'static str, builder: MeasureBuilder) {
        self.builders.insert(kind, builder);
    }

    pub fn kinds(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.builders.keys().copied()
    }

    pub fn build(&self, spec: &MeasureSpec) -> Result<Box<dyn Measure>, MeasureError> {
        let builder = self
            .builders
            .get(spec.kind.as_str())
            .ok_or_else(|| MeasureError::UnknownKind(spec.kind.clone()))?;
        builder(spec)
    }
}

impl Default for MeasureRegistry {
    fn default() -> Self {
        let mut r = MeasureRegistry::empty();
        r.register(
            Bernoulli::KIND,
            Box::new(|s| Ok(Box::new(Bernoulli::from_spec(s)?))),
        );
        r.register(Markov::KIND, Box::new(|s| Ok(Box::new(Markov::from_spec(s)?))));
        r.register(
            HiddenSeedMeasure::KIND,
            Box::new(|s| Ok(Box::new(HiddenSeedMeasure::from_spec(s)?))),
        );
        r
    }
}

fn check_open_unit(p: &Dyadic) -> Result<(), MeasureError> {
    if p.is_zero() || *p >= Dyadic::one() {
        return Err(MeasureError::Degenerate(p.clone()));
    }
    Ok(())
}
