//! An LZ-style compressed-length proxy.
//!
//! Exploratory only: it is not Kraft-admissible and must never feed test
//! construction, which takes a [`ComplexityTable`](super::ComplexityTable)
//! instead.
//!
//! Cost model: a literal bit costs 2 (flag + bit); a back-reference with
//! offset `o` and length `m` (overlap allowed) costs `1 + |gamma(o)| +
//! |gamma(m)|`. The returned value is the cheapest parse, found by dynamic
//! programming, so `surrogate(x·x) <= surrogate(x) + 1 + 2·|gamma(|x|)|`.

use crate::bits::BitString;
use crate::coding::gamma_len;

pub fn compressor_surrogate(x: &BitString) -> u64 {
    let bits: Vec<bool> = x.iter().collect();
    let n = bits.len();
    // best[j]: cheapest encoding of bits[..j]
    let mut best = vec![u64::MAX; n + 1];
    best[0] = 0;
    for i in 0..n {
        if best[i] == u64::MAX {
            continue;
        }
        let lit = best[i] + 2;
        if lit < best[i + 1] {
            best[i + 1] = lit;
        }
        for o in 1..=i {
            let mut m = 0;
            while i + m < n && bits[i + m] == bits[i + m - o] {
                m += 1;
                let cost = best[i] + 1 + (gamma_len(o as u64) + gamma_len(m as u64)) as u64;
                if cost < best[i + m] {
                    best[i + m] = cost;
                }
            }
        }
    }
    best[n]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_free() {
        assert_eq!(compressor_surrogate(&BitString::new()), 0);
    }

    #[test]
    fn long_zero_run_compresses() {
        let z = BitString::repeat(false, 64);
        // literal 0, then one overlapping match (offset 1, length 63)
        assert_eq!(compressor_surrogate(&z), 2 + 1 + 1 + 11);
    }

    #[test]
    fn doubling_costs_at_most_one_back_reference() {
        let corpus = ["1", "0110", "1011001110", "0001011100101110111", "110100100010000"];
        for s in corpus {
            let x: BitString = s.parse().unwrap();
            let xx = x.concat(&x);
            let slack = 1 + 2 * gamma_len(x.len() as u64) as u64;
            assert!(compressor_surrogate(&xx) <= compressor_surrogate(&x) + slack, "{s}");
        }
    }
}
