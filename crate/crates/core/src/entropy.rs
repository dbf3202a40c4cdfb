//! Empirical entropy of strings and block streams.
//!
//! All entropies are in bits. `0 * log 0` is taken as 0. For the k-th order
//! entropy, the first `k` characters of a string have no full context and
//! belong to no context bucket, so the bucket sizes sum to `n - k`.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Occurrence counts of symbols (or block values), densely indexed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolHistogram {
    counts: Vec<u64>,
    total: u64,
}

impl SymbolHistogram {
    pub fn new() -> Self {
        Self::default()
    }

    /// An all-zero histogram over `universe` symbols.
    pub fn with_universe(universe: usize) -> Self {
        Self {
            counts: vec![0; universe],
            total: 0,
        }
    }

    pub fn from_symbols<S: Copy + Into<u64>>(symbols: &[S]) -> Self {
        let mut h = Self::new();
        for &s in symbols {
            h.increment(s.into());
        }
        h
    }

    pub fn increment(&mut self, symbol: u64) {
        let s = symbol as usize;
        if s >= self.counts.len() {
            self.counts.resize(s + 1, 0);
        }
        self.counts[s] += 1;
        self.total += 1;
    }

    /// Removes one occurrence. Fails if the symbol has count zero.
    pub fn decrement(&mut self, symbol: u64) -> Result<()> {
        match self.counts.get_mut(symbol as usize) {
            Some(c) if *c > 0 => {
                *c -= 1;
                self.total -= 1;
                Ok(())
            }
            _ => Err(Error::Argument(format!(
                "histogram underflow for symbol {symbol}"
            ))),
        }
    }

    pub fn count(&self, symbol: u64) -> u64 {
        self.counts.get(symbol as usize).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Length of the dense count array (one past the largest symbol slot).
    pub fn universe(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of symbols with a nonzero count.
    pub fn distinct(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Zeroth-order entropy of the distribution `count / total`, in bits.
    pub fn h0(&self) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        let n = self.total as f64;
        let sum: f64 = self
            .counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let c = c as f64;
                c * c.log2()
            })
            .sum();
        (n.log2() - sum / n).max(0.0)
    }

    pub(crate) fn from_parts(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }
}

/// The strings `T^(s)` of a text, grouped by their length-`k` context `s`.
#[derive(Debug, Clone)]
pub struct ContextPartition {
    k: usize,
    buckets: HashMap<Vec<u64>, SymbolHistogram>,
}

impl ContextPartition {
    pub fn build<S: Copy + Into<u64>>(text: &[S], k: usize) -> Self {
        let mut buckets: HashMap<Vec<u64>, SymbolHistogram> = HashMap::new();
        for i in k..text.len() {
            let ctx: Vec<u64> = text[i - k..i].iter().map(|&s| s.into()).collect();
            buckets.entry(ctx).or_default().increment(text[i].into());
        }
        Self { k, buckets }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn buckets(&self) -> &HashMap<Vec<u64>, SymbolHistogram> {
        &self.buckets
    }

    /// Sum of all bucket sizes (`n - k` for a text of length `n > k`).
    pub fn total(&self) -> u64 {
        self.buckets.values().map(SymbolHistogram::total).sum()
    }

    /// `sum_s |T^(s)| * H0(T^(s))`, i.e. `n * H_k`.
    pub fn weighted_entropy(&self) -> f64 {
        self.buckets
            .values()
            .map(|h| h.total() as f64 * h.h0())
            .sum()
    }
}

/// Zeroth-order empirical entropy in bits per symbol.
pub fn h0<S: Copy + Into<u64>>(text: &[S]) -> f64 {
    SymbolHistogram::from_symbols(text).h0()
}

/// `c * log2(c)` with `0 log 0 = 0`.
fn xlogx(c: u64) -> f64 {
    if c == 0 {
        0.0
    } else {
        let c = c as f64;
        c * c.log2()
    }
}

/// k-th order empirical entropy in bits per symbol.
///
/// Requires `k < text.len()` for nonempty text; `k = 0` is always accepted.
pub fn hk<S: Copy + Into<u64>>(text: &[S], k: usize) -> Result<f64> {
    let n = text.len();
    if k == 0 {
        return Ok(h0(text));
    }
    if k >= n {
        return Err(Error::Argument(format!(
            "context length {k} must be below text length {n}"
        )));
    }
    let key = |i: usize| text[i - k..=i].iter().map(|&s| s.into());
    let mut idx: Vec<usize> = (k..n).collect();
    idx.sort_unstable_by(|&a, &b| key(a).cmp(key(b)));

    // Walk groups of equal context; within a group, equal symbols are adjacent.
    let mut weighted = 0.0;
    let mut g = 0;
    while g < idx.len() {
        let ctx = |i: usize| text[i - k..i].iter().map(|&s| s.into());
        let mut end = g + 1;
        while end < idx.len() && ctx(idx[end]).eq(ctx(idx[g])) {
            end += 1;
        }
        let mut runs = 0.0;
        let mut r = g;
        while r < end {
            let sym: u64 = text[idx[r]].into();
            let mut q = r + 1;
            while q < end && text[idx[q]].into() == sym {
                q += 1;
            }
            runs += xlogx((q - r) as u64);
            r = q;
        }
        weighted += xlogx((end - g) as u64) - runs;
        g = end;
    }
    Ok((weighted / n as f64).max(0.0))
}

/// A single-character edit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edit<S> {
    Delete(usize),
    Insert(usize, S),
    Replace(usize, S),
}

impl<S: Copy> Edit<S> {
    /// Applies the edit to a copy of `text`.
    pub fn apply(&self, text: &[S]) -> Result<Vec<S>> {
        let n = text.len();
        let mut out = text.to_vec();
        match *self {
            Edit::Delete(i) => {
                crate::error::check_index(i, n)?;
                out.remove(i);
            }
            Edit::Insert(i, c) => {
                crate::error::check_index(i, n + 1)?;
                out.insert(i, c);
            }
            Edit::Replace(i, c) => {
                crate::error::check_index(i, n)?;
                out[i] = c;
            }
        }
        Ok(out)
    }
}

/// `|n H0(T) - n' H0(T')|` for the string `T'` obtained by one edit.
pub fn edit_delta_h0<S: Copy + Into<u64>>(text: &[S], edit: Edit<S>) -> Result<f64> {
    let edited = edit.apply(text)?;
    let before = text.len() as f64 * h0(text);
    let after = edited.len() as f64 * h0(&edited);
    Ok((before - after).abs())
}

/// Same as [`edit_delta_h0`] for the k-th order entropy: `|n Hk(T) - n' Hk(T')|`.
pub fn edit_delta_hk<S: Copy + Into<u64>>(text: &[S], edit: Edit<S>, k: usize) -> Result<f64> {
    let edited = edit.apply(text)?;
    let before = text.len() as f64 * hk(text, k)?;
    let after = edited.len() as f64 * hk(&edited, k)?;
    Ok((before - after).abs())
}

/// Upper bound on the change of `n H0` under one edit of a length-`n` string
/// over an alphabet of `sigma` symbols.
pub fn single_edit_bound<S>(edit: &Edit<S>, n: usize, sigma: usize) -> f64 {
    let ls = (sigma as f64).log2();
    match edit {
        Edit::Delete(_) => 4.0 * (n as f64).log2() + 3.0 * ls,
        Edit::Insert(..) => 4.0 * (n as f64 + 1.0).log2() + 4.0 * ls,
        Edit::Replace(..) => 4.0 * (n as f64 + 1.0).log2() + 3.0 * ls,
    }
}

/// Upper bound on the change of `n Hk` under one edit: each of the at most
/// `2k + 1` affected context strings changes by at most the insertion bound.
pub fn context_edit_bound(k: usize, n: usize, sigma: usize) -> f64 {
    (2 * k + 1) as f64 * (4.0 * (n as f64 + 1.0).log2() + 4.0 * (sigma as f64).log2())
}

/// Packs consecutive runs of `ell` symbols into base-`sigma` block values,
/// first symbol most significant. The last block is padded with symbol 0.
pub fn blocked_text<S: Copy + Into<u64>>(text: &[S], ell: usize, sigma: usize) -> Vec<u64> {
    assert!(ell >= 1, "block length must be at least 1");
    let sigma = sigma as u64;
    text.chunks(ell)
        .map(|chunk| {
            let mut v = 0u64;
            for k in 0..ell {
                let c = chunk.get(k).map_or(0, |&s| s.into());
                v = v * sigma + c;
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(s: &str) -> Vec<u8> {
        s.bytes().collect()
    }

    #[test]
    fn h0_examples() {
        assert_eq!(h0(&sym("aaaa")), 0.0);
        assert_eq!(h0(&sym("abab")), 1.0);
        let expect = -(2.0f64 / 3.0) * (2.0f64 / 3.0).log2() - (1.0f64 / 3.0) * (1.0f64 / 3.0).log2();
        assert!((h0(&sym("aab")) - 0.918296).abs() < 1e-6);
        assert!((h0(&sym("aab")) - expect).abs() < 1e-12);
        assert_eq!(h0::<u8>(&[]), 0.0);
    }

    #[test]
    fn hk_examples() {
        let t = sym("abcabc");
        assert_eq!(hk(&t, 0).unwrap(), h0(&t));
        assert_eq!(hk(&sym("abababab"), 1).unwrap(), 0.0);
        assert!(hk(&sym("ab"), 2).is_err());
        assert!(hk(&sym("ab"), 3).is_err());
        assert_eq!(hk::<u8>(&[], 0).unwrap(), 0.0);
    }

    #[test]
    fn hk_matches_partition_definition() {
        let t = sym("mississippi river is a river");
        for k in 0..4 {
            let p = ContextPartition::build(&t, k);
            assert_eq!(p.total(), (t.len() - k) as u64);
            let direct = p.weighted_entropy() / t.len() as f64;
            assert!((hk(&t, k).unwrap() - direct).abs() < 1e-9, "k={k}");
        }
    }

    #[test]
    fn edit_delta_examples() {
        let t = sym("abab");
        let d = edit_delta_h0(&t, Edit::Replace(1, b'a')).unwrap();
        assert!((d - 0.754887).abs() < 1e-6);
        assert_eq!(edit_delta_h0(&sym("aaaa"), Edit::Replace(1, b'a')).unwrap(), 0.0);
        assert!(edit_delta_h0(&t, Edit::Delete(4)).is_err());
        assert!(edit_delta_h0(&t, Edit::Insert(5, b'a')).is_err());
        assert!(edit_delta_h0(&t, Edit::Insert(4, b'a')).is_ok());
    }

    #[test]
    fn blocking() {
        // a = 0, b = 1 over a binary alphabet.
        assert_eq!(blocked_text(&[0u8, 1, 0, 1], 2, 2), vec![1, 1]);
        assert_eq!(blocked_text(&[3u8, 1, 2], 1, 4), vec![3, 1, 2]);
        assert_eq!(blocked_text(&[1u8, 1, 1], 2, 2), vec![3, 2]);
        assert_eq!(blocked_text(&[0u8; 7], 3, 5).len(), 3);
    }

    #[test]
    fn histogram_bookkeeping() {
        let mut h = SymbolHistogram::from_symbols(&[1u8, 1, 3]);
        assert_eq!(h.total(), 3);
        assert_eq!(h.count(1), 2);
        assert_eq!(h.distinct(), 2);
        h.decrement(1).unwrap();
        assert!(h.decrement(0).is_err());
        assert!(h.decrement(9).is_err());
        assert_eq!(h.total(), 2);
        assert_eq!(h.counts().iter().sum::<u64>(), h.total());
    }
}
