//! MSB-first bit addressing over `u64` words.
//!
//! Bit 0 is the most significant bit of word 0, so the byte image of the
//! words (big-endian per word) is an MSB-first bit stream.

#[inline]
fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Reads `n <= 64` bits starting at bit `pos`, returned right-aligned.
#[inline]
pub(crate) fn get_bits(words: &[u64], pos: usize, n: usize) -> u64 {
    debug_assert!(n <= 64);
    if n == 0 {
        return 0;
    }
    let w = pos / 64;
    let o = pos % 64;
    if o + n <= 64 {
        (words[w] >> (64 - o - n)) & low_mask(n)
    } else {
        let first = 64 - o;
        let rest = n - first;
        let hi = words[w] & low_mask(first);
        (hi << rest) | (words[w + 1] >> (64 - rest))
    }
}

/// Writes the low `n <= 64` bits of `value` starting at bit `pos`.
#[inline]
pub(crate) fn set_bits(words: &mut [u64], pos: usize, n: usize, value: u64) {
    debug_assert!(n <= 64);
    if n == 0 {
        return;
    }
    let value = value & low_mask(n);
    let w = pos / 64;
    let o = pos % 64;
    if o + n <= 64 {
        let shift = 64 - o - n;
        let mask = low_mask(n) << shift;
        words[w] = (words[w] & !mask) | (value << shift);
    } else {
        let first = 64 - o;
        let rest = n - first;
        let mask = low_mask(first);
        words[w] = (words[w] & !mask) | (value >> rest);
        let shift = 64 - rest;
        let mask = low_mask(rest) << shift;
        words[w + 1] = (words[w + 1] & !mask) | ((value & low_mask(rest)) << shift);
    }
}

/// Copies `n` bits (any length) between two positions of the same word array.
/// The ranges must not overlap.
pub(crate) fn copy_bits(words: &mut [u64], from: usize, to: usize, n: usize) {
    let mut done = 0;
    while done < n {
        let k = (n - done).min(64);
        let v = get_bits(words, from + done, k);
        set_bits(words, to + done, k, v);
        done += k;
    }
}

/// Smallest `b` with `2^b >= x` (0 for x <= 1).
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// Number of bits needed to write any value in `0..=max`.
pub(crate) fn width_for(max: u64) -> u32 {
    ceil_log2(max.saturating_add(1)).max(1)
}

/// A growable MSB-first bit string.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BitString {
    words: Vec<u64>,
    len: usize,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Parses a string of `'0'`/`'1'` characters; anything else is rejected.
    pub fn parse(s: &str) -> Option<Self> {
        let mut out = Self::new();
        for ch in s.chars() {
            match ch {
                '0' => out.push(0, 1),
                '1' => out.push(1, 1),
                _ => return None,
            }
        }
        Some(out)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Appends the low `n <= 64` bits of `value`, most significant first.
    pub fn push(&mut self, value: u64, n: usize) {
        let need = (self.len + n).div_ceil(64);
        if self.words.len() < need {
            self.words.resize(need, 0);
        }
        set_bits(&mut self.words, self.len, n, value);
        self.len += n;
    }

    /// Reads `n <= 64` bits at `pos`.
    pub fn get(&self, pos: usize, n: usize) -> u64 {
        assert!(pos + n <= self.len, "bit range past end of string");
        get_bits(&self.words, pos, n)
    }

    pub fn bit(&self, pos: usize) -> bool {
        self.get(pos, 1) == 1
    }
}

impl std::fmt::Display for BitString {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}
