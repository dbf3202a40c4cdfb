use cram_core::allocator::{SegmentStore, StoreParams};
use cram_core::BitString;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_bits(rng: &mut impl Rng, len: usize) -> BitString {
    let mut s = BitString::new();
    for _ in 0..len {
        s.push(rng.gen_range(0..2), 1);
    }
    s
}

/// Runs `ops` random reallocs against a plain vector of bit strings.
fn run_against_oracle(b: usize, m: usize, ops: usize, seed: u64, check_every: usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lengths: Vec<usize> = (0..m).map(|_| rng.gen_range(0..=b)).collect();
    let mut store = SegmentStore::new(b, &lengths).unwrap();
    let mut oracle: Vec<BitString> = Vec::with_capacity(m);
    for (i, &l) in lengths.iter().enumerate() {
        let v = random_bits(&mut rng, l);
        store.write(i, &v).unwrap();
        oracle.push(v);
    }
    store.check_invariants().unwrap();
    for op in 0..ops {
        let i = rng.gen_range(0..m);
        let l = if rng.gen_bool(0.1) { 0 } else { rng.gen_range(0..=b) };
        store.realloc(i, l).unwrap();
        let v = random_bits(&mut rng, l);
        store.write(i, &v).unwrap();
        oracle[i] = v;
        assert!(store.live_segments() <= store.segment_bound());
        if check_every > 0 && op % check_every == 0 {
            store.check_invariants().unwrap_or_else(|e| {
                panic!("op {op}: {e}\n{}", store.debug_dump())
            });
            for (j, want) in oracle.iter().enumerate() {
                assert_eq!(&store.read(j).unwrap(), want, "block {j} after op {op}");
            }
        }
    }
    store.check_invariants().unwrap();
    for (j, want) in oracle.iter().enumerate() {
        assert_eq!(&store.read(j).unwrap(), want);
    }
}

#[test]
fn small_blocks_checked_every_op() {
    for seed in 0..20 {
        run_against_oracle(1 + (seed as usize % 9), 1 + (seed as usize * 7) % 40, 2_000, seed, 1);
    }
}

#[test]
fn wide_blocks_crossing_words() {
    run_against_oracle(200, 64, 5_000, 42, 50);
    run_against_oracle(64, 300, 5_000, 43, 100);
}

#[test]
fn address_is_consistent_with_read() {
    let mut store = SegmentStore::new(16, &[4, 9, 16, 0]).unwrap();
    let v = BitString::parse("101100111").unwrap();
    store.write(1, &v).unwrap();
    let loc = store.address(1).unwrap();
    assert_eq!(loc.len, 9);
    assert!(loc.segment < store.live_segments());
    assert!(loc.pos < 16 + store.addr_bits());
    assert_eq!(store.address(3).unwrap().len, 0);
}

#[test]
fn address_width_is_byte_aligned() {
    for (b, m) in [(1, 1), (8, 1000), (4096, 1 << 20), (100, 17)] {
        let p = StoreParams::new(b, m).addr_bits();
        assert_eq!(p % 8, 0);
        assert!((1u128 << p) >= (m as u128) * (b as u128 + 4 * p as u128));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn realloc_preserves_other_blocks(
        b in 1usize..40,
        init in prop::collection::vec(0usize..40, 1..30),
        ops in prop::collection::vec((0usize..30, 0usize..40), 0..200),
    ) {
        let lengths: Vec<usize> = init.iter().map(|&l| l % (b + 1)).collect();
        let m = lengths.len();
        let mut store = SegmentStore::new(b, &lengths).unwrap();
        let mut oracle: Vec<BitString> = Vec::new();
        for (i, &l) in lengths.iter().enumerate() {
            let mut s = BitString::new();
            for k in 0..l { s.push(((i + k) % 3 == 0) as u64, 1); }
            store.write(i, &s).unwrap();
            oracle.push(s);
        }
        for (n, &(i, l)) in ops.iter().enumerate() {
            let (i, l) = (i % m, l % (b + 1));
            store.realloc(i, l).unwrap();
            let mut s = BitString::new();
            for k in 0..l { s.push(((n + k) % 2) as u64, 1); }
            store.write(i, &s).unwrap();
            oracle[i] = s;
            prop_assert!(store.check_invariants().is_ok(), "{}", store.debug_dump());
        }
        for (j, want) in oracle.iter().enumerate() {
            prop_assert_eq!(&store.read(j).unwrap(), want);
        }
    }
}
