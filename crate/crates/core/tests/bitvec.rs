use cram_core::bitvec::{DynBitVec, DynSeq};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn naive_rank(v: &[bool], i: usize) -> usize {
    v[..i].iter().filter(|&&b| b).count()
}

fn naive_select(v: &[bool], j: usize) -> Option<usize> {
    v.iter().enumerate().filter(|(_, &b)| b).nth(j - 1).map(|(i, _)| i)
}

#[test]
fn mixed_ops_match_flat_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut oracle: Vec<bool> = (0..3000).map(|_| rng.gen_bool(0.3)).collect();
    let mut v = DynBitVec::from_bits(oracle.iter().copied());
    for op in 0..100_000 {
        match rng.gen_range(0..6) {
            0 | 1 => {
                let i = rng.gen_range(0..=oracle.len());
                let b = rng.gen_bool(0.4);
                v.insert_bit(i, b).unwrap();
                oracle.insert(i, b);
            }
            2 if !oracle.is_empty() => {
                let i = rng.gen_range(0..oracle.len());
                assert_eq!(v.delete_bit(i).unwrap(), oracle.remove(i));
            }
            3 if !oracle.is_empty() => {
                let i = rng.gen_range(0..oracle.len());
                assert_eq!(v.get(i).unwrap(), oracle[i]);
            }
            4 => {
                let i = rng.gen_range(0..=oracle.len());
                assert_eq!(v.rank1(i).unwrap(), naive_rank(&oracle, i));
            }
            _ => {
                let ones = v.count_ones();
                if ones > 0 {
                    let j = rng.gen_range(1..=ones);
                    assert_eq!(Some(v.select1(j).unwrap()), naive_select(&oracle, j));
                }
            }
        }
        if op % 1000 == 0 {
            v.check_invariants().unwrap();
            let ones = v.count_ones();
            assert_eq!(v.rank1(v.len()).unwrap(), ones);
            for j in (1..=ones).step_by(37) {
                let p = v.select1(j).unwrap();
                assert!(v.get(p).unwrap());
                assert_eq!(v.rank1(p + 1).unwrap(), j);
            }
        }
    }
    assert_eq!(v.iter().collect::<Vec<_>>(), oracle);
}

#[test]
fn height_is_logarithmic() {
    let v = DynBitVec::from_bits((0..1_000_000).map(|i| i % 7 == 0));
    v.check_invariants().unwrap();
    // 512-bit leaves, fanout at least 4.
    let bound = 1 + ((1_000_000f64 / 128.0).log(4.0)).ceil() as usize;
    assert!(v.height() <= bound, "height {} > {bound}", v.height());
}

proptest! {
    #[test]
    fn insert_then_delete_is_identity(
        bits in prop::collection::vec(any::<bool>(), 0..2000),
        pos in any::<prop::sample::Index>(),
        bit in any::<bool>(),
    ) {
        let mut v = DynBitVec::from_bits(bits.iter().copied());
        let i = pos.index(bits.len() + 1);
        v.insert_bit(i, bit).unwrap();
        prop_assert_eq!(v.delete_bit(i).unwrap(), bit);
        prop_assert_eq!(v.iter().collect::<Vec<_>>(), bits);
        prop_assert!(v.check_invariants().is_ok());
    }

    #[test]
    fn select_inverts_rank(bits in prop::collection::vec(any::<bool>(), 1..3000)) {
        let v = DynBitVec::from_bits(bits.iter().copied());
        for j in 1..=v.count_ones() {
            let p = v.select1(j).unwrap();
            prop_assert!(v.get(p).unwrap());
            prop_assert_eq!(v.rank1(p + 1).unwrap(), j);
        }
    }

    #[test]
    fn seq_matches_vec(ops in prop::collection::vec((0u8..3, any::<prop::sample::Index>(), any::<u32>()), 0..1500)) {
        let mut s = DynSeq::new();
        let mut o: Vec<u32> = Vec::new();
        for (kind, idx, val) in ops {
            match kind {
                0 => { let i = idx.index(o.len() + 1); s.insert(i, val).unwrap(); o.insert(i, val); }
                1 if !o.is_empty() => { let i = idx.index(o.len()); prop_assert_eq!(s.remove(i).unwrap(), o.remove(i)); }
                _ if !o.is_empty() => { let i = idx.index(o.len()); s.set(i, val).unwrap(); o[i] = val; }
                _ => {}
            }
        }
        prop_assert_eq!(s.iter().collect::<Vec<_>>(), o);
        prop_assert!(s.check_invariants().is_ok());
    }
}
