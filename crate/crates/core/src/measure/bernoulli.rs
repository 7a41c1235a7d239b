use crate::bits::BitString;
use crate::dyadic::Dyadic;

use super::{check_open_unit, Measure, MeasureError, MeasureSpec};

/// I.i.d. bits with `P(1) = p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bernoulli {
    p: Dyadic,
    q: Dyadic,
}

impl Bernoulli {
    pub const KIND: &'static str = "bernoulli";

    pub fn new(p: Dyadic) -> Result<Self, MeasureError> {
        check_open_unit(&p)?;
        let q = p.complement()?;
        Ok(Bernoulli { p, q })
    }

    pub fn fair() -> Self {
        Bernoulli::new(Dyadic::pow2_neg(1)).expect("1/2 is a valid parameter")
    }

    pub fn from_spec(spec: &MeasureSpec) -> Result<Self, MeasureError> {
        Bernoulli::new(spec.dyadic_param("p")?)
    }

    pub fn p(&self) -> &Dyadic {
        &self.p
    }
}

impl Measure for Bernoulli {
    fn kind(&self) -> &'static str {
        Self::KIND
    }

    fn prob_one(&self, _prefix: &BitString) -> Dyadic {
        self.p.clone()
    }

    fn spec(&self) -> MeasureSpec {
        MeasureSpec::new(Self::KIND).with("p", self.p.to_string())
    }

    fn mass(&self, x: &BitString) -> Dyadic {
        let ones = x.count_ones();
        let zeros = x.len() - ones;
        let mut m = Dyadic::one();
        for _ in 0..ones {
            m = &m * &self.p;
        }
        for _ in 0..zeros {
            m = &m * &self.q;
        }
        m
    }
}
