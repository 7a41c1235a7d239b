use sha2::{Digest, Sha256};

use crate::approx::{LengthMinus, LogApproximation};
use crate::bits::BitString;
use crate::dyadic::Dyadic;

use super::{Measure, MeasureError, MeasureSpec};

/// Product measure whose depth-`i` conditional is
/// `P(1) = 1/2 + s_i · 2^-(i+2)` with signs `s_i ∈ {+1, -1}` drawn from a
/// SHA-256 stream over the seed.
///
/// The perturbations decay geometrically, so `-log P(x)` stays within
/// `|x| ± 2`: `∏(1 + 2^-k) < 2.39` and `∏(1 - 2^-k) > 0.28` over `k >= 1`.
/// Hence `f(x) = max(|x| - 2, 0)` with `c = 4` brackets it strictly for
/// every nonempty `x`.
#[derive(Clone, PartialEq, Eq)]
pub struct HiddenSeedMeasure {
    seed: Vec<u8>,
}

impl std::fmt::Debug for HiddenSeedMeasure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("HiddenSeedMeasure { seed: <hidden> }")
    }
}

impl HiddenSeedMeasure {
    pub const KIND: &'static str = "hidden-seed";

    pub fn new(seed: impl Into<Vec<u8>>) -> Self {
        HiddenSeedMeasure { seed: seed.into() }
    }

    pub fn from_spec(spec: &MeasureSpec) -> Result<Self, MeasureError> {
        let hex_seed = spec.str_param("seed")?;
        let seed = hex::decode(hex_seed).map_err(|e| MeasureError::BadParam {
            name: "seed",
            reason: e.to_string(),
        })?;
        Ok(HiddenSeedMeasure::new(seed))
    }

    /// `true` for `s_i = +1`.
    fn sign(&self, depth: usize) -> bool {
        let block = (depth / 256) as u64;
        let mut h = Sha256::new();
        h.update(&self.seed);
        h.update(block.to_le_bytes());
        let digest = h.finalize();
        let bit = depth % 256;
        (digest[bit / 8] >> (bit % 8)) & 1 == 1
    }
}

impl Measure for HiddenSeedMeasure {
    fn kind(&self) -> &'static str {
        Self::KIND
    }

    fn prob_one(&self, prefix: &BitString) -> Dyadic {
        let i = prefix.len() as u64;
        // (2^(i+1) ± 1) / 2^(i+2)
        let half = num_bigint::BigUint::from(1u32) << (i + 1);
        let num = if self.sign(prefix.len()) {
            half + 1u32
        } else {
            half - 1u32
        };
        Dyadic::new(num, i + 2)
    }

    fn spec(&self) -> MeasureSpec {
        MeasureSpec::new(Self::KIND).with("seed", hex::encode(&self.seed))
    }
}

/// The hidden-seed measure together with its log-approximation
/// `(max(|x| - 2, 0), 4)`. Only the second component may be handed to
/// blind test construction.
pub fn hidden_seed(seed: impl Into<Vec<u8>>) -> (HiddenSeedMeasure, LogApproximation) {
    let la = LogApproximation::new(LengthMinus::new(2), 4).expect("c = 4 is positive");
    (HiddenSeedMeasure::new(seed), la)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::approx::validate_log_approx;
    use crate::measure::tree_masses;

    #[test]
    fn normalised() {
        let (m, _) = hidden_seed(b"abc".to_vec());
        assert_eq!(m.mass(&BitString::new()), Dyadic::one());
    }

    #[test]
    fn conditionals_within_quarter_band() {
        let (m, _) = hidden_seed(b"abc".to_vec());
        let lo = Dyadic::pow2_neg(2);
        let hi = "3/2^2".parse::<Dyadic>().unwrap();
        for i in 0..300 {
            let q = m.prob_one(&BitString::repeat(false, i));
            assert!(q >= lo && q <= hi);
            assert_eq!(q.exponent(), i as u64 + 2);
        }
    }

    #[test]
    fn sandwich_holds_on_every_node_to_depth_12() {
        for seed in [&b"abc"[..], b"\x00", b"seed-2", b"\xff\xfe"] {
            let (m, la) = hidden_seed(seed.to_vec());
            let levels = tree_masses(&m, 12);
            for (len, level) in levels.iter().enumerate().skip(1) {
                let f = len as u64 - 2.min(len as u64);
                for mass in level {
                    assert_eq!(mass.cmp_pow2(f + 4), std::cmp::Ordering::Greater);
                    assert_eq!(mass.cmp_pow2(f), std::cmp::Ordering::Less);
                }
            }
            assert!(validate_log_approx(&m, &la, 10));
        }
    }

    #[test]
    fn distinct_seeds_give_distinct_measures() {
        let (a, _) = hidden_seed(b"seed-a".to_vec());
        let (b, _) = hidden_seed(b"seed-b".to_vec());
        let differs = BitString::all_up_to(4).any(|x| a.mass(&x) != b.mass(&x));
        assert!(differs);
    }

    #[test]
    fn debug_does_not_leak_seed() {
        let (m, _) = hidden_seed(b"secret".to_vec());
        assert!(!format!("{m:?}").contains("secret"));
    }
}
