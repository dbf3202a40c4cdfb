//! Seeded synthetic corpora and corpus loading.

use std::path::Path;

use anyhow::{Context, Result};
use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The 64 byte values the English-like generator draws from.
pub const ENGLISH_ALPHABET: &[u8; 64] =
    b"etaoinshrdlcumwfgypbvkjxqzETAOINSHRDLCUMWFGYPBVKJXQZ0123456789 .";

pub const DNA_ALPHABET: &[u8; 4] = b"acgt";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Generator {
    English,
    Dna,
}

/// Order-1 Markov text over [`ENGLISH_ALPHABET`]. Every symbol has its own
/// Zipf-shaped successor distribution over a shuffled alphabet, biased
/// towards a shared global ranking so that lower-case letters and the space
/// dominate, as in prose.
pub fn english_like(size: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = ENGLISH_ALPHABET.len();
    let global: Vec<f64> = (0..k).map(|r| 1.0 / (r as f64 + 1.5)).collect();
    let rows: Vec<WeightedIndex<f64>> = (0..k)
        .map(|_| {
            let mut perm: Vec<usize> = (0..k).collect();
            perm.shuffle(&mut rng);
            let mut w = vec![0.0; k];
            for (rank, &s) in perm.iter().enumerate() {
                w[s] = global[s] * (1.0 / (rank as f64 + 1.0)).powf(1.2);
            }
            WeightedIndex::new(w).expect("positive weights")
        })
        .collect();
    let mut out = Vec::with_capacity(size);
    let mut prev = rng.gen_range(0..k);
    for _ in 0..size {
        prev = rows[prev].sample(&mut rng);
        out.push(ENGLISH_ALPHABET[prev]);
    }
    out
}

/// Uniform text over `acgt`.
pub fn dna_like(size: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..size).map(|_| DNA_ALPHABET[rng.gen_range(0..4)]).collect()
}

pub fn generate(kind: Generator, size: usize, seed: u64) -> Vec<u8> {
    match kind {
        Generator::English => english_like(size, seed),
        Generator::Dna => dna_like(size, seed),
    }
}

pub fn load(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).with_context(|| format!("reading corpus {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use cram_core::entropy::{h0, hk};

    #[test]
    fn deterministic() {
        assert_eq!(english_like(1000, 3), english_like(1000, 3));
        assert_ne!(english_like(1000, 3), english_like(1000, 4));
        assert_eq!(dna_like(100, 1), dna_like(100, 1));
    }

    #[test]
    fn english_has_context() {
        let t = english_like(200_000, 1);
        let (h0v, h1v) = (h0(&t), hk(&t, 1).unwrap());
        assert!(h1v < h0v - 0.3, "h0 {h0v} h1 {h1v}");
        assert!(t.iter().all(|c| ENGLISH_ALPHABET.contains(c)));
    }

    #[test]
    fn dna_is_near_two_bits() {
        assert!((h0(&dna_like(1 << 20, 2)) - 2.0).abs() < 0.01);
    }
}
