mod common;

use common::table;
use hippo_lab_core::approx::LengthMinus;
use hippo_lab_core::coding::{
    elias_gamma, elias_gamma_decode, forward_codebook, sfe_build, CodingError, LevelledCode,
};
use hippo_lab_core::measure::{hidden_seed, Bernoulli, Measure};
use hippo_lab_core::prefix::find_overlap;
use hippo_lab_core::{build_measure_test, BitString, Dyadic, LogApproximation};
use proptest::prelude::*;

/// Integer weights over a common denominator `2^e` with total at most one.
fn arb_subdistribution() -> impl Strategy<Value = (Vec<u64>, u64)> {
    (prop::collection::vec(1u64..2000, 1..40), 0u64..4).prop_map(|(ws, slack)| {
        let total: u64 = ws.iter().sum();
        let e = 64 - (total - 1).leading_zeros() as u64 + slack;
        (ws, e)
    })
}

fn ceil_log2_ratio(w: u64, e: u64) -> u64 {
    // smallest l with w · 2^l >= 2^e
    (0..=e).find(|&l| (w as u128) << l >= 1u128 << e).unwrap()
}

fn oracle_codeword(cum: u64, w: u64, e: u64, len: u64) -> BitString {
    // midpoint (2·cum + w) / 2^(e+1), truncated to `len` bits
    let mid = 2 * cum as u128 + w as u128;
    let v = if len > e { mid << (len - e - 1) } else { mid >> (e + 1 - len) };
    BitString::from_u64(v as u64, len as usize)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sfe_lengths_codewords_and_prefix_freeness((ws, e) in arb_subdistribution()) {
        let items: Vec<(BitString, Dyadic)> = ws
            .iter()
            .enumerate()
            .map(|(i, &w)| (BitString::from_u64(i as u64, 8), Dyadic::new(w, e)))
            .collect();
        let book = sfe_build(&items).unwrap();
        let mut cum = 0u64;
        for (entry, &w) in book.entries().iter().zip(&ws) {
            let len = ceil_log2_ratio(w, e) + 1;
            prop_assert_eq!(entry.codeword.len() as u64, len);
            prop_assert_eq!(&entry.codeword, &oracle_codeword(cum, w, e, len));
            cum += w;
        }
        let words: Vec<&BitString> = book.entries().iter().map(|e| &e.codeword).collect();
        for (i, a) in words.iter().enumerate() {
            for b in &words[i + 1..] {
                prop_assert!(!a.is_comparable(b), "{} vs {}", a, b);
            }
        }
        for entry in book.entries() {
            let mut stream = entry.codeword.clone();
            stream.append(&BitString::from_u64(0b1011, 4));
            let (sym, used) = book.decode(&stream).unwrap();
            prop_assert_eq!(&sym, &entry.symbol);
            prop_assert_eq!(used, entry.codeword.len());
        }
    }

    #[test]
    fn gamma_roundtrip_and_length(n in 1u64..u64::MAX) {
        let g = elias_gamma(n).unwrap();
        prop_assert_eq!(g.len() as u32, 2 * n.ilog2() + 1);
        prop_assert_eq!(elias_gamma_decode(&g).unwrap(), (n, g.len()));
    }
}

#[test]
fn sfe_rejects_excess_mass() {
    let items = vec![
        (BitString::from_u64(0, 2), Dyadic::new(3u32, 2)),
        (BitString::from_u64(1, 2), Dyadic::new(1u32, 1)),
    ];
    assert!(matches!(sfe_build(&items), Err(CodingError::KraftViolation { .. })));
}

fn check_code(code: &LevelledCode, la: &LogApproximation, measure: &dyn Measure) {
    assert!(code.bound_violations(la).is_empty());
    assert!(code.measure_bound_violations(measure).is_empty());
    let mut words = Vec::new();
    for (n, x) in code.pairs() {
        let w = code.encode_pair(n, x).unwrap();
        let f = la.f(x);
        let bound = f + 2 * n.ilog2() as u64 + la.c() + 2 - n;
        assert!(w.len() as u64 <= bound, "({n}, {x}): {} > {bound}", w.len());
        assert_eq!(code.decode_pair(&w).unwrap(), (n, x.clone(), w.len()));
        words.push(w);
    }
    assert_eq!(find_overlap(&words), None);
}

#[test]
fn forward_code_on_witness_families() {
    let fair = Bernoulli::fair();
    let la = LogApproximation::new(LengthMinus::new(1), 2).unwrap();
    let (hs, hs_la) = hidden_seed(b"forward".to_vec());
    let cases: [(&dyn Measure, &LogApproximation); 2] = [(&fair, &la), (&hs, &hs_la)];
    for (m, la) in cases {
        let fam = build_measure_test(m, table(14), 6, 14);
        let code = forward_codebook(fam.levels(), la, fam.n_max()).unwrap();
        assert_eq!(code.pairs().count(), fam.levels().map(|(_, s)| s.len()).sum::<usize>());
        assert!(code.pairs().count() > 0);
        check_code(&code, la, m);
    }
}

#[test]
fn forward_names_overfull_level() {
    let la = LogApproximation::new(LengthMinus::new(1), 2).unwrap();
    let all2 = hippo_lab_core::PrefixFreeSet::new(BitString::all_of_length(2)).unwrap();
    let ok = hippo_lab_core::PrefixFreeSet::new(BitString::all_of_length(3)).unwrap();
    // q_n(x) = 2^(n - |x| - 1): four strings of length 2 at level 2 weigh 2
    let err = forward_codebook([(1, &ok), (2, &all2)], &la, 2).unwrap_err();
    assert!(matches!(err, CodingError::LevelKraftViolation { level: 2, .. }), "{err:?}");
}
