//! Segment store for `m` variable-length bit blocks of at most `b` bits.
//!
//! Memory is an arena of fixed-size segments of `b + 4p` bits:
//!
//! ```text
//! | pred (p) | succ (p) | offset (p) | block_data (b + p) |
//! ```
//!
//! Segments are threaded into doubly-linked lists `L_1..L_b`. List `L_x`
//! holds the concatenation of `(id(i), data(i))` pairs of every block of
//! length `x`, laid out back to back over the `block_data` regions of its
//! segments. Only the head of a list has unused bits, all of them in front of
//! its first pair; `offset` is the start of the first pair beginning in that
//! segment. New pairs are prepended at the head; a removed pair is
//! back-filled with the head's first pair. An emptied head is recycled by
//! moving the highest-address segment into its place, so the arena stays
//! compact and its high-water mark is the space in use.
//!
//! Blocks are located through two indirections: `seg[i]` names a slot, and
//! `ind[slot]` the segment address. Moving a segment only rewrites its slot's
//! `ind` entry, never the `seg` entries of the blocks it carries.

use std::fmt::Write as _;

use crate::bits::{ceil_log2, copy_bits, get_bits, set_bits, width_for, BitString};
use crate::error::{check_index, Error, Result};

const NO_SLOT: u32 = u32::MAX;

/// Shape of a store: `m` blocks of at most `b` bits each.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StoreParams {
    pub max_len: usize,
    pub blocks: usize,
}

impl StoreParams {
    pub fn new(max_len: usize, blocks: usize) -> Self {
        Self { max_len, blocks }
    }

    /// Address width `p`: the smallest whole number of bytes with
    /// `2^p >= m (b + 4p)`, starting from `p0 = ceil(log2(m b))`.
    pub fn addr_bits(&self) -> usize {
        let m = self.blocks.max(1) as u64;
        let b = self.max_len.max(1) as u64;
        let mut p = (ceil_log2((m * b).max(2)) as u64).div_ceil(8) * 8;
        while p < 64 && (1u64 << p) < m * (b + 4 * p) {
            p += 8;
        }
        p as usize
    }
}

/// Where a block's bits live.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Location {
    /// Segment address (index in the arena).
    pub segment: usize,
    /// Bit offset inside that segment's `block_data` region.
    pub pos: usize,
    /// Block length in bits.
    pub len: usize,
}

/// Space used by a store, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StoreSpace {
    /// Sum of all block lengths.
    pub payload: u64,
    /// Arena bits up to the high-water mark.
    pub arena: u64,
    /// `seg`/`pos`/`len` per block, `ind` per slot, per-segment side fields.
    pub index: u64,
}

impl StoreSpace {
    pub fn total(&self) -> u64 {
        self.arena + self.index
    }

    /// Everything except the payload bits themselves.
    pub fn overhead(&self) -> u64 {
        self.total() - self.payload
    }
}

#[derive(Debug, Clone)]
pub struct SegmentStore {
    b: usize,
    m: usize,
    p: usize,
    /// `b + p`: bits of `block_data` per segment.
    data_bits: usize,
    /// `b + 4p`: bits per segment.
    seg_bits: usize,
    nil: u64,
    arena: Vec<u64>,
    segments: usize,
    /// Head segment of `L_x`, index `x` (index 0 unused).
    heads: Vec<u64>,
    seg: Vec<u32>,
    pos: Vec<u32>,
    len: Vec<u32>,
    ind: Vec<u32>,
    free_slots: Vec<u32>,
    /// Reverse of `ind`: the slot owned by each segment.
    slot_of: Vec<u32>,
    /// List each segment belongs to.
    class_of: Vec<u32>,
}

impl SegmentStore {
    /// Creates a store holding `lengths.len()` zero-filled blocks.
    pub fn new(max_len: usize, lengths: &[usize]) -> Result<Self> {
        let params = StoreParams::new(max_len, lengths.len());
        if max_len == 0 {
            return Err(Error::Argument("maximum block length must be positive".into()));
        }
        if max_len >= u32::MAX as usize / 2 {
            return Err(Error::Argument("maximum block length too large".into()));
        }
        if let Some((i, &l)) = lengths.iter().enumerate().find(|(_, &l)| l > max_len) {
            return Err(Error::Argument(format!(
                "block {i} has length {l} > maximum {max_len}"
            )));
        }
        let p = params.addr_bits();
        if p > 32 || lengths.len() >= u32::MAX as usize {
            return Err(Error::Argument("store too large for 32-bit addressing".into()));
        }
        let m = lengths.len();
        let mut store = Self {
            b: max_len,
            m,
            p,
            data_bits: max_len + p,
            seg_bits: max_len + 4 * p,
            nil: (1u64 << p) - 1,
            arena: Vec::new(),
            segments: 0,
            heads: vec![(1u64 << p) - 1; max_len + 1],
            seg: vec![NO_SLOT; m],
            pos: vec![0; m],
            len: vec![0; m],
            ind: Vec::new(),
            free_slots: Vec::new(),
            slot_of: Vec::new(),
            class_of: Vec::new(),
        };
        for (i, &l) in lengths.iter().enumerate() {
            if l > 0 {
                store.prepend(i, l);
                store.len[i] = l as u32;
            }
        }
        Ok(store)
    }

    pub fn params(&self) -> StoreParams {
        StoreParams::new(self.b, self.m)
    }

    pub fn max_len(&self) -> usize {
        self.b
    }

    pub fn block_count(&self) -> usize {
        self.m
    }

    pub fn addr_bits(&self) -> usize {
        self.p
    }

    pub fn segment_bits(&self) -> usize {
        self.seg_bits
    }

    /// Segments currently in use (the arena high-water mark).
    pub fn live_segments(&self) -> usize {
        self.segments
    }

    pub fn len(&self, i: usize) -> usize {
        self.len[i] as usize
    }

    /// `sum_i (len(i) + p [len(i) > 0])`: bits of all stored pairs.
    pub fn stored_bits(&self) -> u64 {
        self.len
            .iter()
            .filter(|&&l| l > 0)
            .map(|&l| l as u64 + self.p as u64)
            .sum()
    }

    /// Upper bound on live segments: `ceil(S / b) + b`.
    pub fn segment_bound(&self) -> usize {
        (self.stored_bits().div_ceil(self.b as u64)) as usize + self.b
    }

    pub fn space(&self) -> StoreSpace {
        let payload: u64 = self.len.iter().map(|&l| l as u64).sum();
        let slot_w = width_for(self.ind.len() as u64) as u64;
        let pos_w = width_for(self.data_bits as u64) as u64;
        let len_w = width_for(self.b as u64) as u64;
        let index = self.m as u64 * (slot_w + pos_w + len_w)
            + self.ind.len() as u64 * self.p as u64
            + self.segments as u64 * (slot_w + len_w);
        StoreSpace {
            payload,
            arena: (self.segments * self.seg_bits) as u64,
            index,
        }
    }

    // ---- raw segment fields --------------------------------------------

    #[inline]
    fn base(&self, s: u64) -> usize {
        s as usize * self.seg_bits
    }

    #[inline]
    fn pred(&self, s: u64) -> u64 {
        get_bits(&self.arena, self.base(s), self.p)
    }

    #[inline]
    fn succ(&self, s: u64) -> u64 {
        get_bits(&self.arena, self.base(s) + self.p, self.p)
    }

    #[inline]
    fn offset(&self, s: u64) -> usize {
        get_bits(&self.arena, self.base(s) + 2 * self.p, self.p) as usize
    }

    fn set_pred(&mut self, s: u64, v: u64) {
        let at = self.base(s);
        set_bits(&mut self.arena, at, self.p, v);
    }

    fn set_succ(&mut self, s: u64, v: u64) {
        let at = self.base(s) + self.p;
        set_bits(&mut self.arena, at, self.p, v);
    }

    fn set_offset(&mut self, s: u64, v: usize) {
        let at = self.base(s) + 2 * self.p;
        set_bits(&mut self.arena, at, self.p, v as u64);
    }

    /// Arena bit address of data position `off` of segment `s`.
    #[inline]
    fn data_addr(&self, s: u64, off: usize) -> usize {
        self.base(s) + 3 * self.p + off
    }

    /// Normalizes a list position that may run past the end of `s`.
    #[inline]
    fn forward(&self, s: u64, off: usize) -> (u64, usize) {
        if off >= self.data_bits {
            (self.succ(s), off - self.data_bits)
        } else {
            (s, off)
        }
    }

    /// Reads `n <= 64` bits at list position `(s, off)`, following `succ`.
    fn read_list(&self, s: u64, off: usize, n: usize) -> u64 {
        let (s, off) = self.forward(s, off);
        let here = (self.data_bits - off).min(n);
        let hi = get_bits(&self.arena, self.data_addr(s, off), here);
        if here == n {
            hi
        } else {
            let rest = n - here;
            let lo = get_bits(&self.arena, self.data_addr(self.succ(s), 0), rest);
            (hi << rest) | lo
        }
    }

    fn write_list(&mut self, s: u64, off: usize, n: usize, value: u64) {
        let (s, off) = self.forward(s, off);
        let here = (self.data_bits - off).min(n);
        let at = self.data_addr(s, off);
        if here == n {
            set_bits(&mut self.arena, at, n, value);
        } else {
            let rest = n - here;
            set_bits(&mut self.arena, at, here, value >> rest);
            let at2 = self.data_addr(self.succ(s), 0);
            set_bits(&mut self.arena, at2, rest, value);
        }
    }

    fn copy_list(&mut self, from: (u64, usize), to: (u64, usize), n: usize) {
        let mut done = 0;
        while done < n {
            let k = (n - done).min(64);
            let v = self.read_list(from.0, from.1 + done, k);
            self.write_list(to.0, to.1 + done, k, v);
            done += k;
        }
    }

    // ---- segment allocation --------------------------------------------

    fn alloc_segment(&mut self, class: usize) -> u64 {
        let s = self.segments as u64;
        self.segments += 1;
        let need = (self.segments * self.seg_bits).div_ceil(64);
        if self.arena.len() < need {
            let grown = need.max(self.arena.len() * 2);
            self.arena.resize(grown, 0);
        }
        // Recycled arena memory may hold stale bits.
        let base = self.base(s);
        let mut done = 0;
        while done < self.seg_bits {
            let k = (self.seg_bits - done).min(64);
            set_bits(&mut self.arena, base + done, k, 0);
            done += k;
        }
        let slot = match self.free_slots.pop() {
            Some(r) => r,
            None => {
                self.ind.push(0);
                (self.ind.len() - 1) as u32
            }
        };
        self.ind[slot as usize] = s as u32;
        if self.slot_of.len() < self.segments {
            self.slot_of.push(slot);
            self.class_of.push(class as u32);
        } else {
            self.slot_of[s as usize] = slot;
            self.class_of[s as usize] = class as u32;
        }
        s
    }

    /// Releases segment `h` (already unlinked and empty) and fills the hole
    /// with the highest-address segment.
    fn free_segment(&mut self, h: u64) {
        let last = (self.segments - 1) as u64;
        self.free_slots.push(self.slot_of[h as usize]);
        if h != last {
            let from = self.base(last);
            let to = self.base(h);
            copy_bits(&mut self.arena, from, to, self.seg_bits);
            let (p, s) = (self.pred(h), self.succ(h));
            let class = self.class_of[last as usize] as usize;
            if p == self.nil {
                self.heads[class] = h;
            } else {
                self.set_succ(p, h);
            }
            if s != self.nil {
                self.set_pred(s, h);
            }
            let slot = self.slot_of[last as usize];
            self.slot_of[h as usize] = slot;
            self.class_of[h as usize] = class as u32;
            self.ind[slot as usize] = h as u32;
        }
        self.segments -= 1;
    }

    // ---- list maintenance ----------------------------------------------

    /// Puts a zeroed `(id(i), data)` pair of `x` data bits at the head of `L_x`.
    fn prepend(&mut self, i: usize, x: usize) {
        let pair = self.p + x;
        let d = self.data_bits;
        let h = self.heads[x];
        let (seg, start) = if h == self.nil {
            let n = self.alloc_segment(x);
            self.set_pred(n, self.nil);
            self.set_succ(n, self.nil);
            self.set_offset(n, d - pair);
            self.heads[x] = n;
            (n, d - pair)
        } else {
            let off = self.offset(h);
            if off >= pair {
                self.set_offset(h, off - pair);
                (h, off - pair)
            } else {
                // The pair starts near the end of a fresh head and runs into
                // the old head's unused prefix.
                let n = self.alloc_segment(x);
                self.set_pred(n, self.nil);
                self.set_succ(n, h);
                self.set_pred(h, n);
                self.heads[x] = n;
                let start = d - (pair - off);
                self.set_offset(n, start);
                (n, start)
            }
        };
        self.write_list(seg, start, self.p, i as u64);
        let mut done = 0;
        while done < x {
            let k = (x - done).min(64);
            self.write_list(seg, start + self.p + done, k, 0);
            done += k;
        }
        self.point_at(i, self.forward(seg, start + self.p));
    }

    fn point_at(&mut self, i: usize, (s, off): (u64, usize)) {
        self.seg[i] = self.slot_of[s as usize];
        self.pos[i] = off as u32;
    }

    /// Segment and data offset of block `i`.
    #[inline]
    fn locate(&self, i: usize) -> (u64, usize) {
        (self.ind[self.seg[i] as usize] as u64, self.pos[i] as usize)
    }

    /// Removes block `i`'s pair from its list, back-filling the hole.
    fn remove(&mut self, i: usize) {
        let x = self.len[i] as usize;
        let pair = self.p + x;
        let d = self.data_bits;
        let (q, pos) = self.locate(i);
        let hole = if pos >= self.p {
            (q, pos - self.p)
        } else {
            (self.pred(q), d - (self.p - pos))
        };
        let h = self.heads[x];
        let off = self.offset(h);
        if hole != (h, off) {
            let j = self.read_list(h, off, self.p) as usize;
            self.copy_list((h, off), hole, pair);
            let data = self.forward(hole.0, hole.1 + self.p);
            self.point_at(j, data);
        }
        let next = off + pair;
        if next < d {
            self.set_offset(h, next);
        } else {
            let s = self.succ(h);
            self.heads[x] = s;
            if s != self.nil {
                self.set_pred(s, self.nil);
                debug_assert_eq!(self.offset(s), next - d);
            }
            self.free_segment(h);
        }
        self.seg[i] = NO_SLOT;
        self.pos[i] = 0;
    }

    // ---- public operations ---------------------------------------------

    /// O(1) location of block `i`.
    pub fn address(&self, i: usize) -> Result<Location> {
        check_index(i, self.m)?;
        let len = self.len[i] as usize;
        if len == 0 {
            return Ok(Location {
                segment: self.nil as usize,
                pos: 0,
                len: 0,
            });
        }
        let (s, pos) = self.locate(i);
        Ok(Location {
            segment: s as usize,
            pos,
            len,
        })
    }

    /// Changes the length of block `i`. Its contents are unspecified
    /// afterwards; every other block keeps its contents.
    pub fn realloc(&mut self, i: usize, new_len: usize) -> Result<()> {
        check_index(i, self.m)?;
        if new_len > self.b {
            return Err(Error::Argument(format!(
                "length {new_len} exceeds maximum {}",
                self.b
            )));
        }
        let old = self.len[i] as usize;
        if old == new_len {
            return Ok(());
        }
        if old > 0 {
            self.remove(i);
        }
        if new_len > 0 {
            self.prepend(i, new_len);
        }
        self.len[i] = new_len as u32;
        Ok(())
    }

    /// Reads `n <= 64` bits of block `i` starting at bit `off`.
    #[inline]
    pub fn read_bits(&self, i: usize, off: usize, n: usize) -> u64 {
        debug_assert!(off + n <= self.len[i] as usize);
        if n == 0 {
            return 0;
        }
        let (s, pos) = self.locate(i);
        self.read_list(s, pos + off, n)
    }

    /// Writes `n <= 64` bits of block `i` starting at bit `off`.
    #[inline]
    pub fn write_bits(&mut self, i: usize, off: usize, n: usize, value: u64) {
        debug_assert!(off + n <= self.len[i] as usize);
        if n == 0 {
            return;
        }
        let (s, pos) = self.locate(i);
        self.write_list(s, pos + off, n, value);
    }

    pub fn read(&self, i: usize) -> Result<BitString> {
        check_index(i, self.m)?;
        let len = self.len[i] as usize;
        let mut out = BitString::new();
        let mut done = 0;
        while done < len {
            let k = (len - done).min(64);
            out.push(self.read_bits(i, done, k), k);
            done += k;
        }
        Ok(out)
    }

    pub fn write(&mut self, i: usize, bits: &BitString) -> Result<()> {
        check_index(i, self.m)?;
        let len = self.len[i] as usize;
        if bits.len() != len {
            return Err(Error::Argument(format!(
                "block {i} holds {len} bits, got {}",
                bits.len()
            )));
        }
        let mut done = 0;
        while done < len {
            let k = (len - done).min(64);
            self.write_bits(i, done, k, bits.get(done, k));
            done += k;
        }
        Ok(())
    }

    /// Flips one stored bit of block `i` (fault injection for verifiers).
    #[doc(hidden)]
    pub fn flip_bit(&mut self, i: usize, off: usize) {
        let v = self.read_bits(i, off, 1);
        self.write_bits(i, off, 1, v ^ 1);
    }

    // ---- diagnostics ---------------------------------------------------

    /// Full structural scan: list links, pair layout, id tags, indirection,
    /// slack and the segment-count bound.
    pub fn check_invariants(&self) -> Result<(), String> {
        let d = self.data_bits;
        let mut seen_segments = vec![false; self.segments];
        let mut seen_blocks = vec![false; self.m];
        let mut per_len = vec![0usize; self.b + 1];
        for &l in &self.len {
            per_len[l as usize] += 1;
        }
        for x in 1..=self.b {
            let expected = per_len[x];
            let h = self.heads[x];
            if h == self.nil {
                if expected != 0 {
                    return Err(format!("list {x} empty but {expected} blocks have that length"));
                }
                continue;
            }
            if self.pred(h) != self.nil {
                return Err(format!("head of list {x} has a predecessor"));
            }
            // Walk the chain.
            let mut chain = Vec::new();
            let mut s = h;
            while s != self.nil {
                let si = s as usize;
                if si >= self.segments || seen_segments[si] {
                    return Err(format!("list {x} revisits or leaves the arena at {s}"));
                }
                seen_segments[si] = true;
                if self.class_of[si] as usize != x {
                    return Err(format!("segment {s} filed under list {}", self.class_of[si]));
                }
                if self.ind[self.slot_of[si] as usize] as u64 != s {
                    return Err(format!("indirection of segment {s} is stale"));
                }
                let n = self.succ(s);
                if n != self.nil && self.pred(n) != s {
                    return Err(format!("broken pred link after segment {s}"));
                }
                chain.push(s);
                s = n;
            }
            // Walk the pairs: they must tile the chain from the head offset
            // to the very end of the tail.
            let pair = self.p + x;
            let total = chain.len() * d - self.offset(h);
            if total % pair != 0 || total / pair != expected {
                return Err(format!(
                    "list {x}: {total} used bits do not hold {expected} pairs of {pair}"
                ));
            }
            let mut k = 0usize; // chain index
            let mut off = self.offset(h);
            let mut starts_in = vec![None; chain.len()];
            for _ in 0..expected {
                if starts_in[k].is_none() {
                    starts_in[k] = Some(off);
                }
                let id = self.read_list(chain[k], off, self.p) as usize;
                if id >= self.m || self.len[id] as usize != x || seen_blocks[id] {
                    return Err(format!("list {x}: bad id tag {id}"));
                }
                seen_blocks[id] = true;
                let (ds, doff) = self.forward(chain[k], off + self.p);
                if self.locate(id) != (ds, doff) {
                    return Err(format!("block {id}: seg/pos do not match its pair"));
                }
                off += pair;
                while off >= d && k + 1 < chain.len() {
                    off -= d;
                    k += 1;
                }
            }
            if k + 1 != chain.len() || off != d {
                return Err(format!("list {x}: tail segment not full"));
            }
            for (c, &s) in chain.iter().enumerate().skip(1) {
                if let Some(o) = starts_in[c] {
                    if self.offset(s) != o {
                        return Err(format!("segment {s}: offset {} != {o}", self.offset(s)));
                    }
                }
            }
        }
        if let Some(s) = seen_segments.iter().position(|&v| !v) {
            return Err(format!("segment {s} belongs to no list"));
        }
        for i in 0..self.m {
            if self.len[i] == 0 && self.seg[i] != NO_SLOT {
                return Err(format!("empty block {i} still points at a slot"));
            }
            if self.len[i] > 0 && !seen_blocks[i] {
                return Err(format!("block {i} missing from its list"));
            }
        }
        if self.segments > self.segment_bound() {
            return Err(format!(
                "{} live segments exceed bound {}",
                self.segments,
                self.segment_bound()
            ));
        }
        Ok(())
    }

    /// Text dump of every list's segment chain.
    pub fn debug_dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "store b={} m={} p={} segment_bits={} live_segments={}",
            self.b, self.m, self.p, self.seg_bits, self.segments
        );
        for x in 1..=self.b {
            let mut s = self.heads[x];
            if s == self.nil {
                continue;
            }
            let _ = write!(out, "L{x}:");
            while s != self.nil {
                let _ = write!(
                    out,
                    " [seg {s} slot {} offset {}]",
                    self.slot_of[s as usize],
                    self.offset(s)
                );
                s = self.succ(s);
            }
            out.push('\n');
        }
        out
    }

    // ---- snapshot support ----------------------------------------------

    pub(crate) fn save(&self, w: &mut crate::snapshot::Writer<'_>) -> Result<()> {
        w.u64(self.b as u64)?;
        w.u64(self.m as u64)?;
        w.u8(self.p as u8)?;
        w.u64(self.segments as u64)?;
        w.u64_slice(&self.heads)?;
        w.u32_slice(&self.seg)?;
        w.u32_slice(&self.pos)?;
        w.u32_slice(&self.len)?;
        w.u32_slice(&self.ind)?;
        w.u32_slice(&self.free_slots)?;
        w.u32_slice(&self.slot_of[..self.segments])?;
        w.u32_slice(&self.class_of[..self.segments])?;
        w.bit_stream(&self.arena, self.segments * self.seg_bits)
    }

    pub(crate) fn load(r: &mut crate::snapshot::Reader<'_>) -> Result<Self> {
        let b = r.u64()? as usize;
        let m = r.u64()? as usize;
        let p = r.u8()? as usize;
        if b == 0 || p == 0 || p > 32 || p != StoreParams::new(b, m).addr_bits() {
            return Err(Error::Format("inconsistent store parameters".into()));
        }
        let segments = r.u64()? as usize;
        let heads = r.u64_vec()?;
        let seg = r.u32_vec()?;
        let pos = r.u32_vec()?;
        let len = r.u32_vec()?;
        let ind = r.u32_vec()?;
        let free_slots = r.u32_vec()?;
        let slot_of = r.u32_vec()?;
        let class_of = r.u32_vec()?;
        let seg_bits = b + 4 * p;
        let arena = r.bit_stream(segments * seg_bits)?;
        if heads.len() != b + 1
            || seg.len() != m
            || pos.len() != m
            || len.len() != m
            || slot_of.len() != segments
            || class_of.len() != segments
        {
            return Err(Error::Format("store table sizes disagree".into()));
        }
        let store = Self {
            b,
            m,
            p,
            data_bits: b + p,
            seg_bits,
            nil: (1u64 << p) - 1,
            arena,
            segments,
            heads,
            seg,
            pos,
            len,
            ind,
            free_slots,
            slot_of,
            class_of,
        };
        store.check_invariants().map_err(Error::Format)?;
        Ok(store)
    }
}
