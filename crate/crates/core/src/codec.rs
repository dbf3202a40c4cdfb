//! Block codes: frequency-rank codes with a raw escape, and canonical Huffman.
//!
//! Codewords are held as `(len, bits)` with the first bit of the codeword in
//! the most significant position of the `len`-bit value. Rank codes are not
//! prefix-free; every decoder here is handed the exact code length.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::bits::ceil_log2;
use crate::entropy::SymbolHistogram;
use crate::error::{Error, Result};

/// A codeword of `len` bits stored right-aligned in `bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Code {
    pub len: u32,
    pub bits: u64,
}

impl Code {
    pub fn new(len: u32, bits: u64) -> Self {
        debug_assert!(len <= 64);
        debug_assert!(len == 64 || bits >> len == 0);
        Self { len, bits }
    }

    /// The codeword as a `'0'`/`'1'` string.
    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .rev()
            .map(|k| if (self.bits >> k) & 1 == 1 { '1' } else { '0' })
            .collect()
    }
}

/// Alphabet and block geometry shared by every table of one structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodecParams {
    sigma: usize,
    ell: usize,
    char_bits: u32,
    universe: u64,
}

impl CodecParams {
    pub fn new(sigma: usize, ell: usize) -> Result<Self> {
        if !(2..=256).contains(&sigma) {
            return Err(Error::Argument(format!(
                "alphabet size {sigma} not in 2..=256"
            )));
        }
        if ell == 0 {
            return Err(Error::Argument("block length must be at least 1".into()));
        }
        let char_bits = ceil_log2(sigma as u64);
        if ell as u64 * char_bits as u64 > 63 {
            return Err(Error::Argument(format!(
                "blocks of {ell} symbols need more than 63 raw bits"
            )));
        }
        let universe = (sigma as u64)
            .checked_pow(ell as u32)
            .filter(|&u| u <= 1 << 32)
            .ok_or_else(|| Error::Argument(format!("sigma^ell too large ({sigma}^{ell})")))?;
        Ok(Self {
            sigma,
            ell,
            char_bits,
            universe,
        })
    }

    pub fn sigma(&self) -> usize {
        self.sigma
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    /// Number of distinct block values, `sigma^ell`.
    pub fn universe(&self) -> u64 {
        self.universe
    }

    /// Bits of an uncompressed block: `ell * ceil(log2 sigma)`.
    pub fn raw_bits(&self) -> u32 {
        self.ell as u32 * self.char_bits
    }

    /// Longest codeword any table may emit.
    pub fn cap_bits(&self) -> u32 {
        1 + self.raw_bits()
    }
}

/// The `j`-th string of `[ε, 0, 1, 00, 01, 10, 11, 000, ...]` (1-based).
pub fn enc(j: u64) -> Result<Code> {
    if j == 0 {
        return Err(Error::Argument("rank codes start at 1".into()));
    }
    let len = 63 - j.leading_zeros();
    Ok(Code::new(len, j - (1u64 << len)))
}

/// Inverse of [`enc`]: the rank of the `len`-bit string `bits`.
pub fn dec(len: u32, bits: u64) -> u64 {
    (1u64 << len) + bits
}

/// Rank code table: blocks ordered by decreasing frequency (ties by value);
/// rank `j` gets `'0' enc(j)` when short enough, otherwise `'1' raw(block)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeTable {
    params: CodecParams,
    codes: Vec<Code>,
    rank_of: Vec<u32>,
    block_of_rank: Vec<u32>,
}

impl CodeTable {
    /// Builds the table from block frequencies. Blocks absent from `freq`
    /// are ranked after every observed block, in ascending value order.
    pub fn build(freq: &SymbolHistogram, params: CodecParams) -> Result<Self> {
        let universe = params.universe() as usize;
        if freq.universe() > universe && freq.counts()[universe..].iter().any(|&c| c > 0) {
            return Err(Error::Argument(
                "histogram holds block values outside the alphabet".into(),
            ));
        }
        let mut order: Vec<u32> = (0..universe as u64).map(|b| b as u32).collect();
        order.sort_by_key(|&b| (Reverse(freq.count(b as u64)), b));
        Self::from_order(order, params)
    }

    /// Rebuilds a table from its rank order (`block_of_rank`).
    pub fn from_order(block_of_rank: Vec<u32>, params: CodecParams) -> Result<Self> {
        let universe = params.universe() as usize;
        if block_of_rank.len() != universe {
            return Err(Error::Format("rank order has wrong length".into()));
        }
        let raw = params.raw_bits();
        let mut rank_of = vec![u32::MAX; universe];
        let mut codes = vec![Code::default(); universe];
        for (r, &b) in block_of_rank.iter().enumerate() {
            let slot = rank_of
                .get_mut(b as usize)
                .ok_or_else(|| Error::Format(format!("block {b} outside alphabet")))?;
            if *slot != u32::MAX {
                return Err(Error::Format(format!("block {b} ranked twice")));
            }
            *slot = r as u32;
            let e = enc(r as u64 + 1)?;
            codes[b as usize] = if e.len < raw {
                Code::new(1 + e.len, e.bits)
            } else {
                Code::new(1 + raw, (1u64 << raw) | b as u64)
            };
        }
        Ok(Self {
            params,
            codes,
            rank_of,
            block_of_rank,
        })
    }

    pub fn params(&self) -> CodecParams {
        self.params
    }

    /// 1-based rank of a block value.
    pub fn rank(&self, block: u32) -> u64 {
        self.rank_of[block as usize] as u64 + 1
    }

    pub fn block_of_rank(&self) -> &[u32] {
        &self.block_of_rank
    }

    pub fn encode(&self, block: u32) -> Code {
        self.codes[block as usize]
    }

    pub fn decode(&self, code: Code) -> Result<u32> {
        if code.len == 0 {
            return Err(Error::Corrupt("empty codeword".into()));
        }
        let rest = code.len - 1;
        let payload = code.bits & ((1u64 << rest) - 1);
        if code.bits >> rest == 1 {
            if rest != self.params.raw_bits() || payload >= self.params.universe() {
                return Err(Error::Corrupt(format!("bad escape of length {}", code.len)));
            }
            Ok(payload as u32)
        } else {
            let rank = dec(rest, payload);
            self.block_of_rank
                .get(rank as usize - 1)
                .copied()
                .ok_or_else(|| Error::Corrupt(format!("rank {rank} outside table")))
        }
    }
}

/// Canonical Huffman code over every block value, weights `max(freq, 1)`,
/// with code lengths limited to the codec's `cap_bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HuffmanTable {
    params: CodecParams,
    lengths: Vec<u8>,
    codes: Vec<Code>,
    /// Symbols sorted by (length, value).
    sorted: Vec<u32>,
    first_code: Vec<u64>,
    first_index: Vec<u32>,
    count: Vec<u32>,
}

impl HuffmanTable {
    pub fn build(freq: &SymbolHistogram, params: CodecParams) -> Result<Self> {
        let universe = params.universe() as usize;
        let weights: Vec<u64> = (0..universe).map(|b| freq.count(b as u64).max(1)).collect();
        let lengths = limited_huffman_lengths(&weights, params.cap_bits());
        Self::from_lengths(lengths, params)
    }

    /// Rebuilds the canonical code from per-symbol code lengths.
    pub fn from_lengths(lengths: Vec<u8>, params: CodecParams) -> Result<Self> {
        let universe = params.universe() as usize;
        let cap = params.cap_bits() as usize;
        if lengths.len() != universe {
            return Err(Error::Format("length table has wrong size".into()));
        }
        if lengths.iter().any(|&l| l == 0 || l as usize > cap) {
            return Err(Error::Format("code length out of range".into()));
        }
        let kraft: f64 = lengths.iter().map(|&l| (-(l as f64)).exp2()).sum();
        if kraft > 1.0 + 1e-9 {
            return Err(Error::Format("code lengths violate Kraft".into()));
        }
        let mut sorted: Vec<u32> = (0..universe as u32).collect();
        sorted.sort_by_key(|&s| (lengths[s as usize], s));
        let mut count = vec![0u32; cap + 1];
        for &l in &lengths {
            count[l as usize] += 1;
        }
        let mut first_code = vec![0u64; cap + 1];
        let mut first_index = vec![0u32; cap + 1];
        let mut code = 0u64;
        let mut index = 0u32;
        for l in 1..=cap {
            code = (code + count[l - 1] as u64) << 1;
            first_code[l] = code;
            first_index[l] = index;
            index += count[l];
        }
        let mut codes = vec![Code::default(); universe];
        for l in 1..=cap {
            for k in 0..count[l] {
                let s = sorted[(first_index[l] + k) as usize];
                codes[s as usize] = Code::new(l as u32, first_code[l] + k as u64);
            }
        }
        Ok(Self {
            params,
            lengths,
            codes,
            sorted,
            first_code,
            first_index,
            count,
        })
    }

    pub fn params(&self) -> CodecParams {
        self.params
    }

    pub fn lengths(&self) -> &[u8] {
        &self.lengths
    }

    pub fn encode(&self, block: u32) -> Code {
        self.codes[block as usize]
    }

    pub fn decode(&self, code: Code) -> Result<u32> {
        let l = code.len as usize;
        if l == 0 || l >= self.count.len() {
            return Err(Error::Corrupt(format!("no codes of length {l}")));
        }
        let offset = code.bits.wrapping_sub(self.first_code[l]);
        if code.bits < self.first_code[l] || offset >= self.count[l] as u64 {
            return Err(Error::Corrupt("codeword not in table".into()));
        }
        Ok(self.sorted[(self.first_index[l] as u64 + offset) as usize])
    }
}

/// Optimal prefix-code lengths, then rebalanced so no length exceeds `limit`.
/// Requires `2^limit >= weights.len()`.
fn limited_huffman_lengths(weights: &[u64], limit: u32) -> Vec<u8> {
    let n = weights.len();
    assert!(n >= 2, "need at least two symbols");
    assert!(ceil_log2(n as u64) <= limit, "length limit too small");

    // Plain Huffman via a min-heap; ties broken by node id for determinism.
    let mut parent = vec![usize::MAX; 2 * n - 1];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
        weights.iter().enumerate().map(|(i, &w)| Reverse((w, i))).collect();
    let mut next = n;
    while heap.len() > 1 {
        let Reverse((wa, a)) = heap.pop().unwrap();
        let Reverse((wb, b)) = heap.pop().unwrap();
        parent[a] = next;
        parent[b] = next;
        heap.push(Reverse((wa + wb, next)));
        next += 1;
    }
    let root = next - 1;
    let mut depth = vec![0u32; 2 * n - 1];
    for v in (0..root).rev() {
        depth[v] = depth[parent[v]] + 1;
    }
    let max_depth = depth[..n].iter().copied().max().unwrap_or(1) as usize;

    let mut bl_count = vec![0u64; max_depth.max(limit as usize) + 1];
    for &d in &depth[..n] {
        bl_count[d as usize] += 1;
    }
    // Fold overlong codes back under the limit (JPEG Annex K.3 style).
    let limit = limit as usize;
    for i in (limit + 1..bl_count.len()).rev() {
        while bl_count[i] > 0 {
            let mut j = i - 2;
            while bl_count[j] == 0 {
                j -= 1;
            }
            bl_count[i] -= 2;
            bl_count[i - 1] += 1;
            bl_count[j + 1] += 2;
            bl_count[j] -= 1;
        }
    }

    // Heaviest symbols get the shortest lengths.
    let mut by_weight: Vec<usize> = (0..n).collect();
    by_weight.sort_by_key(|&s| (Reverse(weights[s]), s));
    let mut lengths = vec![0u8; n];
    let mut it = by_weight.into_iter();
    for (l, &c) in bl_count.iter().enumerate().skip(1) {
        for _ in 0..c {
            lengths[it.next().unwrap()] = l as u8;
        }
    }
    lengths
}

/// Which kind of block code a structure uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CodeKind {
    /// Frequency-rank codes with raw escape.
    #[default]
    Rank,
    /// Canonical Huffman with add-one smoothing.
    Huffman,
}

/// A built table of either kind.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeBook {
    Rank(CodeTable),
    Huffman(HuffmanTable),
}

impl CodeBook {
    pub fn build(kind: CodeKind, freq: &SymbolHistogram, params: CodecParams) -> Result<Self> {
        Ok(match kind {
            CodeKind::Rank => CodeBook::Rank(CodeTable::build(freq, params)?),
            CodeKind::Huffman => CodeBook::Huffman(HuffmanTable::build(freq, params)?),
        })
    }

    pub fn kind(&self) -> CodeKind {
        match self {
            CodeBook::Rank(_) => CodeKind::Rank,
            CodeBook::Huffman(_) => CodeKind::Huffman,
        }
    }

    #[inline]
    pub fn encode(&self, block: u32) -> Code {
        match self {
            CodeBook::Rank(t) => t.encode(block),
            CodeBook::Huffman(t) => t.encode(block),
        }
    }

    #[inline]
    pub fn decode(&self, code: Code) -> Result<u32> {
        match self {
            CodeBook::Rank(t) => t.decode(code),
            CodeBook::Huffman(t) => t.decode(code),
        }
    }

    /// Approximate storage of the table itself, in bits.
    pub fn size_bits(&self) -> u64 {
        match self {
            // r^-1 plus the rank of every block.
            CodeBook::Rank(t) => {
                2 * t.params.universe() * ceil_log2(t.params.universe()).max(1) as u64
            }
            CodeBook::Huffman(t) => {
                let u = t.params.universe();
                u * ceil_log2(u).max(1) as u64
                    + u * ceil_log2(t.params.cap_bits() as u64 + 1) as u64
            }
        }
    }
}
