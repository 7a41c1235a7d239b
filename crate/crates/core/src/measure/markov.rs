use crate::bits::BitString;
use crate::dyadic::Dyadic;

use super::{check_open_unit, Measure, MeasureError, MeasureSpec};

/// First-order binary Markov chain.
///
/// `initial` is `P(first bit = 1)`; `transition[a][b]` is
/// `P(next = b | previous = a)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Markov {
    initial: Dyadic,
    transition: [[Dyadic; 2]; 2],
}

impl Markov {
    pub const KIND: &'static str = "markov";

    pub fn new(initial: Dyadic, transition: [[Dyadic; 2]; 2]) -> Result<Self, MeasureError> {
        check_open_unit(&initial)?;
        for (row, entries) in transition.iter().enumerate() {
            for e in entries {
                check_open_unit(e)?;
            }
            let sum = &entries[0] + &entries[1];
            if sum != Dyadic::one() {
                return Err(MeasureError::NotStochastic { row, sum });
            }
        }
        Ok(Markov {
            initial,
            transition,
        })
    }

    pub fn from_spec(spec: &MeasureSpec) -> Result<Self, MeasureError> {
        let initial = spec.dyadic_param("initial")?;
        let bad = |reason: &str| MeasureError::BadParam {
            name: "transition",
            reason: reason.to_string(),
        };
        let rows = spec
            .params
            .get("transition")
            .ok_or(MeasureError::MissingParam("transition"))?
            .as_array()
            .ok_or_else(|| bad("expected a 2x2 array"))?;
        if rows.len() != 2 {
            return Err(bad("expected two rows"));
        }
        let mut table: [[Dyadic; 2]; 2] = Default::default();
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("expected two columns"))?;
            for (c, cell) in row.iter().enumerate() {
                let s = cell.as_str().ok_or_else(|| bad("entries are \"a/2^b\" strings"))?;
                table[r][c] = s.parse().map_err(|e: crate::dyadic::ArithError| bad(&e.to_string()))?;
            }
        }
        Markov::new(initial, table)
    }
}

impl Measure for Markov {
    fn kind(&self) -> &'static str {
        Self::KIND
    }

    fn prob_one(&self, prefix: &BitString) -> Dyadic {
        match prefix.len() {
            0 => self.initial.clone(),
            n => self.transition[prefix.get(n - 1).unwrap() as usize][1].clone(),
        }
    }

    fn spec(&self) -> MeasureSpec {
        let rows: Vec<toml::Value> = self
            .transition
            .iter()
            .map(|r| toml::Value::Array(r.iter().map(|d| d.to_string().into()).collect()))
            .collect();
        MeasureSpec::new(Self::KIND)
            .with("initial", self.initial.to_string())
            .with("transition", toml::Value::Array(rows))
    }
}
