use cram_core::codec::{dec, enc, Code, CodeBook, CodeKind, CodeTable, CodecParams, HuffmanTable};
use cram_core::entropy::SymbolHistogram;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn histogram(counts: &[u64]) -> SymbolHistogram {
    let mut h = SymbolHistogram::with_universe(counts.len());
    for (v, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            h.increment(v as u64);
        }
    }
    h
}

fn as_string(c: Code) -> String {
    c.to_bit_string()
}

#[test]
fn enc_matches_enumeration() {
    // Length-ordered enumeration, built by brute force.
    let mut list = vec![String::new()];
    for len in 1..=10 {
        for v in 0..1u32 << len {
            list.push(format!("{v:0len$b}", len = len));
        }
    }
    for (j, want) in list.iter().enumerate() {
        assert_eq!(&as_string(enc(j as u64 + 1).unwrap()), want);
    }
    assert_eq!(dec(2, 0b11), 7);
    assert_eq!(dec(0, 0), 1);
}

#[test]
fn random_tables_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..100 {
        let sigma = rng.gen_range(2..=16);
        let ell = rng.gen_range(1..=3);
        let params = CodecParams::new(sigma, ell).unwrap();
        let u = params.universe() as usize;
        let counts: Vec<u64> = (0..u).map(|_| if rng.gen_bool(0.3) { 0 } else { rng.gen_range(0..50) }).collect();
        let freq = histogram(&counts);
        let kind = if trial % 2 == 0 { CodeKind::Rank } else { CodeKind::Huffman };
        let book = CodeBook::build(kind, &freq, params).unwrap();
        for _ in 0..1000 {
            let b = rng.gen_range(0..u) as u32;
            let code = book.encode(b);
            assert!(code.len <= params.cap_bits());
            assert_eq!(book.decode(code).unwrap(), b);
        }
    }
}

#[test]
fn huffman_prefix_free_exhaustive() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (sigma, ell) in [(2, 1), (4, 4), (16, 4), (256, 2)] {
        let params = CodecParams::new(sigma, ell).unwrap();
        let u = params.universe() as usize;
        let counts: Vec<u64> = (0..u).map(|_| rng.gen_range(0..5u64).pow(3)).collect();
        let t = HuffmanTable::build(&histogram(&counts), params).unwrap();
        let mut codes: Vec<String> = (0..u as u32).map(|b| as_string(t.encode(b))).collect();
        codes.sort();
        for w in codes.windows(2) {
            assert!(!w[1].starts_with(&w[0]), "{} prefixes {}", w[0], w[1]);
        }
        let kraft: f64 = codes.iter().map(|c| 0.5f64.powi(c.len() as i32)).sum();
        assert!(kraft <= 1.0 + 1e-12);
    }
}

proptest! {
    #[test]
    fn rank_cost_identity(counts in prop::collection::vec(0u64..40, 2..64)) {
        let u = counts.len();
        // Smallest (sigma, ell) with sigma^ell >= u: use ell = 1, sigma = u.
        prop_assume!(u <= 256);
        let params = CodecParams::new(u, 1).unwrap();
        let freq = histogram(&counts);
        let t = CodeTable::build(&freq, params).unwrap();
        let raw = params.raw_bits();
        let lhs: u64 = (0..u).map(|b| counts[b] * t.encode(b as u32).len as u64).sum();
        let rhs: u64 = (0..u)
            .map(|b| counts[b] * (1 + (enc(t.rank(b as u32)).unwrap().len).min(raw)) as u64)
            .sum();
        prop_assert_eq!(lhs, rhs);
        // Ranks follow decreasing frequency, ties by value.
        let order = t.block_of_rank();
        for w in order.windows(2) {
            let (a, b) = (w[0] as usize, w[1] as usize);
            prop_assert!(counts[a] > counts[b] || (counts[a] == counts[b] && (a < b || counts[a] == 0)));
        }
        prop_assert_eq!(CodeTable::build(&freq, params).unwrap(), t);
    }

    #[test]
    fn huffman_within_one_bit_of_entropy(counts in prop::collection::vec(1u64..1000, 2..200)) {
        let params = CodecParams::new(counts.len(), 1).unwrap();
        let freq = histogram(&counts);
        let t = HuffmanTable::build(&freq, params).unwrap();
        let total: u64 = counts.iter().sum();
        let avg = counts.iter().enumerate().map(|(b, &c)| c * t.encode(b as u32).len as u64).sum::<u64>() as f64 / total as f64;
        prop_assert!(avg <= freq.h0() + 1.0 + 1e-9, "avg {avg} h0 {}", freq.h0());
    }
}
