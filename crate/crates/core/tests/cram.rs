use cram_core::codec::CodeKind;
use cram_core::cram::{Cram, CramConfig, Pace};
use cram_core::entropy::{blocked_text, SymbolHistogram};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_text(rng: &mut impl Rng, n: usize, sigma: usize) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..sigma) as u8).collect()
}

/// Text with a skewed distribution so that code tables matter.
fn skewed_text(rng: &mut impl Rng, n: usize, sigma: usize) -> Vec<u8> {
    (0..n)
        .map(|_| {
            let r: f64 = rng.gen();
            ((r * r * r) * sigma as f64) as u8
        })
        .collect()
}

fn fuzz(text: Vec<u8>, sigma: usize, config: CramConfig, ops: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut oracle = text.clone();
    let mut c = Cram::build(&text, sigma, config).unwrap();
    let n = oracle.len();
    let ell = c.params().ell;
    for op in 0..ops {
        if rng.gen_bool(0.5) {
            let i = rng.gen_range(0..n);
            let ch = rng.gen_range(0..sigma) as u8;
            c.replace(i, ch).unwrap();
            oracle[i] = ch;
        } else if n >= ell {
            let i = rng.gen_range(0..=n - ell);
            assert_eq!(c.access(i).unwrap(), &oracle[i..i + ell], "op {op}");
        }
        if op % 997 == 0 {
            c.check_invariants().unwrap();
        }
    }
    c.check_invariants().unwrap();
    c.check_store().unwrap();
    assert_eq!(c.to_vec().unwrap(), oracle);
}

#[test]
fn fuzz_small_alphabets() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for (n, sigma) in [(1usize, 2usize), (7, 2), (100, 3), (1000, 4), (5000, 26)] {
        let text = skewed_text(&mut rng, n, sigma);
        fuzz(text, sigma, CramConfig::default(), 20_000, n as u64);
    }
}

#[test]
fn fuzz_bytes_and_epsilons() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for eps in [1.0, 0.5, 0.1, 1.0 / 64.0] {
        let text = skewed_text(&mut rng, 20_000, 256);
        let config = CramConfig { epsilon: eps, ..Default::default() };
        fuzz(text, 256, config, 30_000, 3);
    }
}

#[test]
fn fuzz_other_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let text = skewed_text(&mut rng, 8192, 16);
    for config in [
        CramConfig { code: CodeKind::Huffman, ..Default::default() },
        CramConfig { rotation: false, ..Default::default() },
        CramConfig { pace: Pace::Credit { u: 3 }, code: CodeKind::Huffman, ..Default::default() },
        CramConfig { block_len: Some(3), ..Default::default() },
    ] {
        fuzz(text.clone(), 16, config, 20_000, 4);
    }
}

#[test]
fn repeated_pair_text() {
    let text: Vec<u8> = (0..1 << 16).map(|i| (i % 2) as u8).collect();
    let c = Cram::build(&text, 2, CramConfig::default()).unwrap();
    assert_eq!(c.to_vec().unwrap(), text);
    // Blocks have even length, so every block is the same value and takes
    // the single-bit code.
    assert_eq!(c.params().ell % 2, 0);
    assert_eq!(c.measure().payload, c.params().blocks as u64);
    assert!(c.measure().total() >= c.measure().payload);
}

#[test]
fn build_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let text = skewed_text(&mut rng, 10_000, 50);
    let (mut a, mut b) = (Vec::new(), Vec::new());
    Cram::build(&text, 50, CramConfig::default()).unwrap().save(&mut a).unwrap();
    Cram::build(&text, 50, CramConfig::default()).unwrap().save(&mut b).unwrap();
    assert_eq!(a, b);
}

#[test]
fn snapshot_round_trip_mid_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let text = skewed_text(&mut rng, 5000, 8);
    let mut c = Cram::build(&text, 8, CramConfig::default()).unwrap();
    for _ in 0..777 {
        c.replace(rng.gen_range(0..5000), rng.gen_range(0..8)).unwrap();
    }
    let mut buf = Vec::new();
    c.save(&mut buf).unwrap();
    assert_eq!(&buf[..5], b"CRAM1");
    let mut d = Cram::load(&mut buf.as_slice()).unwrap();
    assert_eq!(d.to_vec().unwrap(), c.to_vec().unwrap());
    assert_eq!(d.phase_progress(), c.phase_progress());
    for _ in 0..2000 {
        let (i, ch) = (rng.gen_range(0..5000), rng.gen_range(0..8));
        c.replace(i, ch).unwrap();
        d.replace(i, ch).unwrap();
    }
    assert_eq!(d.to_vec().unwrap(), c.to_vec().unwrap());
    let (mut x, mut y) = (Vec::new(), Vec::new());
    c.save(&mut x).unwrap();
    d.save(&mut y).unwrap();
    assert_eq!(x, y);
    buf[0] = b'X';
    assert!(Cram::load(&mut buf.as_slice()).is_err());
}

#[test]
fn identity_replace_changes_nothing() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let text = skewed_text(&mut rng, 4096, 4);
    let mut c = Cram::build(&text, 4, CramConfig::default()).unwrap();
    for i in 0..4096 {
        c.replace(i, text[i]).unwrap();
    }
    assert_eq!(c.to_vec().unwrap(), text);
}

#[test]
fn phase_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let text = random_text(&mut rng, 4096, 4);
    let mut c = Cram::build(&text, 4, CramConfig::default()).unwrap();
    let len = c.params().phase_len;
    assert!(len >= c.params().super_blocks);
    for i in 0..len - 1 {
        c.replace(i % 4096, text[i % 4096]).unwrap();
    }
    assert_eq!(c.phase_number(), 1);
    // One replace left: schedule has at most one super-block pending.
    assert!(c.pending_migrations() <= 1);
    c.replace(0, text[0]).unwrap();
    assert_eq!(c.phase_number(), 2);
    assert_eq!(c.phase_progress(), 0);
    for y in 0..c.params().super_blocks {
        assert!(!c.is_migrated(y));
    }
    c.check_invariants().unwrap();
}

#[test]
fn histogram_tracks_text() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let text = skewed_text(&mut rng, 3000, 5);
    let mut oracle = text.clone();
    let mut c = Cram::build(&text, 5, CramConfig::default()).unwrap();
    for op in 0..10_000 {
        let (i, ch) = (rng.gen_range(0..3000), rng.gen_range(0..5));
        c.replace(i, ch).unwrap();
        oracle[i] = ch;
        if op % 1000 == 0 {
            // check_invariants compares against the stored blocks; compare
            // the blocked oracle too.
            c.check_invariants().unwrap();
            let blocks = blocked_text(&oracle, c.params().ell, 5);
            let h = SymbolHistogram::from_symbols(&blocks);
            let stored: Vec<u64> = (0..c.params().blocks).map(|x| c.block(x).unwrap() as u64).collect();
            assert_eq!(SymbolHistogram::from_symbols(&stored), h);
        }
    }
}

#[test]
fn access_errors() {
    let c = Cram::build(&[0, 1, 2, 3, 0, 1], 4, CramConfig::default()).unwrap();
    assert!(c.access(6).is_err());
    assert!(c.get(6).is_err());
    assert!(Cram::build(&[0, 4], 4, CramConfig::default()).is_err());
    let mut c = c;
    assert!(c.replace(0, 4).is_err());
    assert!(c.replace(6, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matches_flat_array(
        sigma in 2usize..12,
        text in prop::collection::vec(0u8..12, 1..400),
        ops in prop::collection::vec((any::<prop::sample::Index>(), 0u8..12), 0..600),
        eps_inv in 1usize..9,
    ) {
        let mut text: Vec<u8> = text.into_iter().map(|c| c % sigma as u8).collect();
        let config = CramConfig { epsilon: 1.0 / eps_inv as f64, ..Default::default() };
        let mut c = Cram::build(&text, sigma, config).unwrap();
        for (idx, ch) in ops {
            let i = idx.index(text.len());
            let ch = ch % sigma as u8;
            c.replace(i, ch).unwrap();
            text[i] = ch;
            prop_assert!(c.check_invariants().is_ok());
        }
        prop_assert_eq!(c.to_vec().unwrap(), text);
    }
}
