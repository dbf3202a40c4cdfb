//! Compressed text supporting insert and delete as well as replace.
//!
//! The text is cut into super-blocks of `tau..=2 tau` blocks (the last one
//! may be shorter). Blocks are aligned to the start of their own super-block,
//! so an edit only re-derives the blocks of one super-block. A dynamic bit
//! vector marks the first character of every super-block; rank and select
//! on it locate positions. Each super-block is stored as one variable-length
//! entry (the concatenated block codes) in a [`SegmentStore`], under a slot
//! id that stays fixed while its ordinal shifts.
//!
//! Parameters are frozen from the length at build time, `n0`. When the
//! length leaves `[n0 / 2, 2 n0]` the structure is rebuilt from scratch.

use std::io::{Read, Write};

use crate::allocator::SegmentStore;
use crate::bits::width_for;
use crate::bitvec::{DynBitVec, DynSeq};
use crate::codec::{Code, CodeBook, CodeKind, CodecParams};
use crate::cram::{
    check_text, default_block_len, load_book, load_histogram, save_book, save_histogram, Packer,
    SpaceReport,
};
use crate::entropy::SymbolHistogram;
use crate::error::{check_index, Error, Result};
use crate::schedule::Schedule;
use crate::snapshot::{Reader, Writer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XCramConfig {
    /// Minimum blocks per super-block; derived from `n0` when unset.
    pub tau: Option<usize>,
    pub block_len: Option<usize>,
    pub code: CodeKind,
    pub rotation: bool,
}

impl Default for XCramConfig {
    fn default() -> Self {
        Self {
            tau: None,
            block_len: None,
            code: CodeKind::Rank,
            rotation: true,
        }
    }
}

/// `max(1, floor(log2 n / log2 log2 n))`.
pub fn default_tau(n: usize) -> usize {
    if n < 16 {
        return 1;
    }
    let lg = (n as f64).log2();
    ((lg / lg.log2()).floor() as usize).max(1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct XCramParams {
    pub n0: usize,
    pub sigma: usize,
    pub ell: usize,
    pub tau: usize,
    /// Slot capacity of the store.
    pub slots: usize,
}

impl XCramParams {
    fn new(n0: usize, sigma: usize, config: &XCramConfig) -> Self {
        let ell = config.block_len.unwrap_or_else(|| default_block_len(n0, sigma));
        let tau = config.tau.unwrap_or_else(|| default_tau(n0)).max(1);
        let (_, hi) = length_window(n0);
        // A non-final super-block holds at least (tau - 1) ell + 1 characters.
        let slots = hi / ((tau - 1) * ell + 1) + 4;
        Self {
            n0,
            sigma,
            ell,
            tau,
            slots,
        }
    }

    pub fn max_blocks(&self) -> usize {
        2 * self.tau
    }

    /// Blocks per super-block at build time.
    fn initial_blocks(&self) -> usize {
        (self.tau + self.tau / 2).max(1)
    }
}

/// Lengths outside this window trigger a rebuild.
fn length_window(n0: usize) -> (usize, usize) {
    let lo = if n0 >= 128 { n0 / 2 } else { 0 };
    (lo, 2 * n0.max(64))
}

#[derive(Debug, Clone)]
struct Phase {
    number: u64,
    done: usize,
    len: usize,
    f_cur: SymbolHistogram,
    f_next: SymbolHistogram,
    c_prev2: CodeBook,
    c_prev1: CodeBook,
    schedule: Schedule,
}

#[derive(Debug, Clone)]
pub struct XCram {
    params: XCramParams,
    codec: CodecParams,
    config: XCramConfig,
    packer: Packer,
    n: usize,
    boundary: DynBitVec,
    order: DynSeq,
    store: SegmentStore,
    /// Per slot: character count (0 for a free slot).
    chars: Vec<u32>,
    /// Per slot: migrated to the newer table.
    migrated: Vec<bool>,
    /// Per slot, `2 tau` entries: code length of each block.
    code_lens: Vec<u8>,
    free_slots: Vec<u32>,
    phase: Phase,
}

impl XCram {
    pub fn build(text: &[u8], sigma: usize, config: XCramConfig) -> Result<Self> {
        check_text(text, sigma)?;
        let params = XCramParams::new(text.len(), sigma, &config);
        let codec = CodecParams::new(sigma, params.ell)?;
        if params.slots >= u32::MAX as usize {
            return Err(Error::Argument("text too long".into()));
        }
        let packer = Packer::new(sigma, params.ell);
        let sb_chars = params.initial_blocks() * params.ell;
        let mut freq = SymbolHistogram::with_universe(codec.universe() as usize);
        for sb in text.chunks(sb_chars) {
            for b in sb.chunks(params.ell) {
                freq.increment(packer.pack(b) as u64);
            }
        }
        let table = CodeBook::build(config.code, &freq, codec)?;
        let max_bits = params.max_blocks() * codec.cap_bits() as usize;
        let store = SegmentStore::new(max_bits, &vec![0; params.slots])?;
        let mut x = Self {
            params,
            codec,
            config,
            packer,
            n: text.len(),
            boundary: DynBitVec::from_bits(
                (0..text.len()).map(|i| i % sb_chars == 0),
            ),
            order: DynSeq::new(),
            store,
            chars: vec![0; params.slots],
            migrated: vec![false; params.slots],
            code_lens: vec![0; params.slots * params.max_blocks()],
            free_slots: (0..params.slots as u32).rev().collect(),
            phase: Phase {
                number: 1,
                done: 0,
                len: 1,
                f_next: SymbolHistogram::with_universe(codec.universe() as usize),
                f_cur: freq,
                c_prev2: table.clone(),
                c_prev1: table,
                schedule: Schedule::default(),
            },
        };
        let mut slots = Vec::new();
        for sb in text.chunks(sb_chars) {
            let slot = x.alloc_slot()?;
            x.put(slot, sb, false)?;
            slots.push(slot as u32);
        }
        x.order = DynSeq::from_values(slots);
        x.start_phase();
        Ok(x)
    }

    pub fn params(&self) -> &XCramParams {
        &self.params
    }

    pub fn config(&self) -> &XCramConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn super_blocks(&self) -> usize {
        self.order.len()
    }

    pub fn phase_number(&self) -> u64 {
        self.phase.number
    }

    fn alloc_slot(&mut self) -> Result<usize> {
        self.free_slots
            .pop()
            .map(|s| s as usize)
            .ok_or_else(|| Error::Argument("super-block slots exhausted".into()))
    }

    fn free_slot(&mut self, slot: usize) -> Result<()> {
        self.store.realloc(slot, 0)?;
        self.chars[slot] = 0;
        self.migrated[slot] = false;
        self.free_slots.push(slot as u32);
        Ok(())
    }

    fn table(&self, migrated: bool) -> &CodeBook {
        if migrated {
            &self.phase.c_prev1
        } else {
            &self.phase.c_prev2
        }
    }

    fn blocks_of(&self, chars: usize) -> usize {
        chars.div_ceil(self.params.ell)
    }

    /// Decoded block values of a slot.
    fn slot_blocks(&self, slot: usize) -> Result<Vec<u32>> {
        let table = self.table(self.migrated[slot]);
        let k = self.blocks_of(self.chars[slot] as usize);
        let base = slot * self.params.max_blocks();
        let mut off = 0;
        let mut out = Vec::with_capacity(k);
        for j in 0..k {
            let len = self.code_lens[base + j] as usize;
            let code = Code::new(len as u32, self.store.read_bits(slot, off, len));
            out.push(table.decode(code)?);
            off += len;
        }
        Ok(out)
    }

    fn slot_chars(&self, slot: usize) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(self.chars[slot] as usize + self.params.ell);
        for v in self.slot_blocks(slot)? {
            self.packer.unpack_into(v, &mut out);
        }
        out.truncate(self.chars[slot] as usize);
        Ok(out)
    }

    /// Decodes a slot and removes its blocks from the next-phase histogram.
    fn take(&mut self, slot: usize) -> Result<Vec<u8>> {
        for v in self.slot_blocks(slot)? {
            self.phase.f_next.decrement(v as u64)?;
        }
        self.slot_chars(slot)
    }

    /// Encodes `chars` into `slot` under the table selected by `migrated`,
    /// adding its blocks to the next-phase histogram.
    fn put(&mut self, slot: usize, chars: &[u8], migrated: bool) -> Result<()> {
        let ell = self.params.ell;
        let k = self.blocks_of(chars.len());
        debug_assert!(k <= self.params.max_blocks());
        let table = self.table(migrated);
        let codes: Vec<Code> = chars
            .chunks(ell)
            .map(|b| table.encode(self.packer.pack(b)))
            .collect();
        for b in chars.chunks(ell) {
            self.phase.f_next.increment(self.packer.pack(b) as u64);
        }
        let total: usize = codes.iter().map(|c| c.len as usize).sum();
        self.store.realloc(slot, total)?;
        let base = slot * self.params.max_blocks();
        let mut off = 0;
        for (j, c) in codes.iter().enumerate() {
            self.store.write_bits(slot, off, c.len as usize, c.bits);
            self.code_lens[base + j] = c.len as u8;
            off += c.len as usize;
        }
        self.chars[slot] = chars.len() as u32;
        self.migrated[slot] = migrated;
        Ok(())
    }

    /// Ordinal, slot and start position of the super-block holding `i`.
    fn locate(&self, i: usize) -> Result<(usize, usize, usize)> {
        let ord = self.boundary.rank1(i + 1)? - 1;
        let start = self.boundary.select1(ord + 1)?;
        Ok((ord, self.order.get(ord)? as usize, start))
    }

    pub fn get(&self, i: usize) -> Result<u8> {
        check_index(i, self.n)?;
        let (_, slot, start) = self.locate(i)?;
        let o = i - start;
        let ell = self.params.ell;
        let (k, within) = (o / ell, o % ell);
        let base = slot * self.params.max_blocks();
        let off: usize = self.code_lens[base..base + k].iter().map(|&l| l as usize).sum();
        let len = self.code_lens[base + k] as usize;
        let code = Code::new(len as u32, self.store.read_bits(slot, off, len));
        let v = self.table(self.migrated[slot]).decode(code)?;
        Ok(self.packer.char_at(v, within))
    }

    /// The `ell` characters starting at `i`.
    pub fn access(&self, i: usize) -> Result<Vec<u8>> {
        let ell = self.params.ell;
        if i + ell > self.n {
            return Err(Error::OutOfRange {
                index: i + ell - 1,
                len: self.n,
            });
        }
        self.read(i, ell)
    }

    pub fn read(&self, i: usize, len: usize) -> Result<Vec<u8>> {
        if len == 0 {
            return Ok(Vec::new());
        }
        if i + len > self.n {
            return Err(Error::OutOfRange {
                index: i + len - 1,
                len: self.n,
            });
        }
        let (mut ord, slot, start) = self.locate(i)?;
        let mut chars = self.slot_chars(slot)?;
        let mut out: Vec<u8> = chars[i - start..].iter().copied().take(len).collect();
        while out.len() < len {
            ord += 1;
            chars = self.slot_chars(self.order.get(ord)? as usize)?;
            let need = len - out.len();
            out.extend(chars.iter().take(need));
        }
        Ok(out)
    }

    pub fn to_vec(&self) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(self.n);
        for slot in self.order.iter() {
            out.extend(self.slot_chars(slot as usize)?);
        }
        Ok(out)
    }

    fn check_symbol(&self, c: u8) -> Result<()> {
        if c as usize >= self.params.sigma {
            return Err(Error::Symbol {
                symbol: c as u64,
                sigma: self.params.sigma,
            });
        }
        Ok(())
    }

    pub fn replace(&mut self, i: usize, c: u8) -> Result<()> {
        check_index(i, self.n)?;
        self.check_symbol(c)?;
        self.migrate_step()?;
        let (_, slot, start) = self.locate(i)?;
        let mut chars = self.take(slot)?;
        chars[i - start] = c;
        self.put(slot, &chars, self.migrated[slot])?;
        self.finish_update()
    }

    /// Inserts `c` before position `i` (`i == len()` appends).
    pub fn insert(&mut self, i: usize, c: u8) -> Result<()> {
        if i > self.n {
            return Err(Error::OutOfRange {
                index: i,
                len: self.n,
            });
        }
        self.check_symbol(c)?;
        self.migrate_step()?;
        if self.n == 0 {
            let slot = self.alloc_slot()?;
            self.put(slot, &[c], true)?;
            self.order.insert(0, slot as u32)?;
            self.boundary.insert_bit(0, true)?;
            self.n = 1;
            return self.finish_update();
        }
        let (ord, slot, start) = if i == self.n {
            let ord = self.order.len() - 1;
            (ord, self.order.get(ord)? as usize, self.boundary.select1(ord + 1)?)
        } else {
            self.locate(i)?
        };
        let r = self.migrated[slot];
        let mut chars = self.take(slot)?;
        chars.insert(i - start, c);
        if i == start {
            self.boundary.insert_bit(i, true)?;
            self.boundary.set(i + 1, false)?;
        } else {
            self.boundary.insert_bit(i, false)?;
        }
        self.n += 1;
        self.settle(ord, slot, start, chars, r)?;
        self.finish_update()
    }

    pub fn delete(&mut self, i: usize) -> Result<u8> {
        check_index(i, self.n)?;
        self.migrate_step()?;
        let (ord, slot, start) = self.locate(i)?;
        let r = self.migrated[slot];
        let mut chars = self.take(slot)?;
        let removed = chars.remove(i - start);
        self.boundary.delete_bit(i)?;
        self.n -= 1;
        if chars.is_empty() {
            self.free_slot(slot)?;
            self.order.remove(ord)?;
        } else {
            if i == start {
                self.boundary.set(i, true)?;
            }
            self.settle(ord, slot, start, chars, r)?;
        }
        self.finish_update()?;
        Ok(removed)
    }

    /// Stores the edited characters of super-block `ord`, splitting or
    /// merging so that block counts stay within bounds.
    fn settle(
        &mut self,
        ord: usize,
        slot: usize,
        start: usize,
        mut chars: Vec<u8>,
        migrated: bool,
    ) -> Result<()> {
        let tau = self.params.tau;
        let blocks = self.blocks_of(chars.len());
        let is_last = ord + 1 == self.order.len();
        if blocks > 2 * tau {
            return self.split(ord, slot, start, &chars);
        }
        if blocks < tau && !is_last {
            let right = self.order.get(ord + 1)? as usize;
            let tail = self.take(right)?;
            self.boundary.set(start + chars.len(), false)?;
            self.free_slot(right)?;
            self.order.remove(ord + 1)?;
            chars.extend(tail);
            if self.blocks_of(chars.len()) > 2 * tau {
                return self.split(ord, slot, start, &chars);
            }
            return self.put(slot, &chars, true);
        }
        self.put(slot, &chars, migrated)
    }

    /// Splits after the first `ceil(blocks / 2)` blocks. Both halves are
    /// coded with the newer table.
    fn split(&mut self, ord: usize, slot: usize, start: usize, chars: &[u8]) -> Result<()> {
        let cut = self.blocks_of(chars.len()).div_ceil(2) * self.params.ell;
        let other = self.alloc_slot()?;
        self.put(slot, &chars[..cut], true)?;
        self.put(other, &chars[cut..], true)?;
        self.order.insert(ord + 1, other as u32)?;
        self.boundary.set(start + cut, true)?;
        Ok(())
    }

    fn migrate_step(&mut self) -> Result<()> {
        if !self.config.rotation {
            return Ok(());
        }
        while let Some(slot) = self.phase.schedule.pop() {
            let slot = slot as usize;
            if self.chars[slot] > 0 && !self.migrated[slot] {
                return self.migrate(slot);
            }
        }
        Ok(())
    }

    fn migrate(&mut self, slot: usize) -> Result<()> {
        let chars = self.take(slot)?;
        self.put(slot, &chars, true)
    }

    fn finish_update(&mut self) -> Result<()> {
        let (lo, hi) = length_window(self.params.n0);
        if self.n < lo || self.n > hi {
            let text = self.to_vec()?;
            *self = Self::build(&text, self.params.sigma, self.config)?;
            return Ok(());
        }
        if self.config.rotation {
            self.phase.done += 1;
            if self.phase.done >= self.phase.len {
                self.advance_phase()?;
            }
        }
        Ok(())
    }

    /// Finishes migration and rotates tables, as in the fixed layout.
    pub fn advance_phase(&mut self) -> Result<()> {
        while let Some(slot) = self.phase.schedule.pop() {
            let slot = slot as usize;
            if self.chars[slot] > 0 && !self.migrated[slot] {
                self.migrate(slot)?;
            }
        }
        let next = CodeBook::build(self.config.code, &self.phase.f_cur, self.codec)?;
        self.phase.c_prev2 = std::mem::replace(&mut self.phase.c_prev1, next);
        std::mem::swap(&mut self.phase.f_cur, &mut self.phase.f_next);
        self.phase.f_next.clone_from(&self.phase.f_cur);
        self.migrated.iter_mut().for_each(|m| *m = false);
        self.phase.number += 1;
        self.start_phase();
        Ok(())
    }

    /// Schedules every live super-block; at build time also fills `f_next`.
    fn start_phase(&mut self) {
        if self.phase.number == 1 {
            self.phase.f_next.clone_from(&self.phase.f_cur);
        }
        let keys: Vec<u32> = (0..self.params.slots)
            .map(|s| if self.chars[s] > 0 { self.store.len(s) as u32 } else { 0 })
            .collect();
        let live: Vec<(u32, u32)> = keys
            .iter()
            .enumerate()
            .filter(|&(s, _)| self.chars[s] > 0)
            .map(|(s, &k)| (s as u32, k))
            .collect();
        let max_key = self.store.max_len();
        let mut sorted = live.clone();
        sorted.sort_by_key(|&(s, k)| (k, s));
        self.phase.schedule = Schedule::from_pending(&sorted, self.params.slots, max_key);
        self.phase.len = live.len().max(1);
        self.phase.done = 0;
    }

    pub fn measure(&self) -> SpaceReport {
        let space = self.store.space();
        let universe = self.codec.universe();
        let count_w = width_for(self.n as u64 + 1) as u64;
        let tables = self.phase.c_prev2.size_bits()
            + self.phase.c_prev1.size_bits()
            + 2 * universe * count_w;
        let slots = self.params.slots as u64;
        let len_w = width_for(self.codec.cap_bits() as u64) as u64;
        let side = slots * (count_w + 1 + self.params.max_blocks() as u64 * len_w);
        let aux = side + self.boundary.size_bits() + self.order.size_bits() + slots * 2 * 32;
        SpaceReport {
            n: self.n,
            payload: space.payload,
            allocator: space.overhead(),
            tables,
            aux,
        }
    }

    /// Full structural and coding check.
    pub fn check_invariants(&self) -> Result<(), String> {
        let sbs = self.order.len();
        if self.boundary.len() != self.n || self.boundary.count_ones() != sbs {
            return Err("boundary vector disagrees with super-block count".into());
        }
        let tau = self.params.tau;
        let mut hist = vec![0u64; self.codec.universe() as usize];
        let mut seen = vec![false; self.params.slots];
        let mut pos = 0usize;
        for (ord, slot) in self.order.iter().enumerate() {
            let slot = slot as usize;
            if seen[slot] {
                return Err(format!("slot {slot} used twice"));
            }
            seen[slot] = true;
            let start = self.boundary.select1(ord + 1).map_err(|e| e.to_string())?;
            if start != pos {
                return Err(format!("super-block {ord} starts at {start}, expected {pos}"));
            }
            let count = self.chars[slot] as usize;
            let blocks = self.blocks_of(count);
            if count == 0 || blocks > 2 * tau || (blocks < tau && ord + 1 != sbs) {
                return Err(format!("super-block {ord} has {blocks} blocks (tau = {tau})"));
            }
            let base = slot * self.params.max_blocks();
            let stored: usize = self.code_lens[base..base + blocks].iter().map(|&l| l as usize).sum();
            if stored != self.store.len(slot) {
                return Err(format!("super-block {ord}: stored length mismatch"));
            }
            let table = self.table(self.migrated[slot]);
            let values = self.slot_blocks(slot).map_err(|e| e.to_string())?;
            let mut off = 0;
            for (j, &v) in values.iter().enumerate() {
                let len = self.code_lens[base + j] as usize;
                let code = Code::new(len as u32, self.store.read_bits(slot, off, len));
                if table.encode(v) != code {
                    return Err(format!("super-block {ord} block {j} not under its table"));
                }
                off += len;
                hist[v as usize] += 1;
            }
            pos += count;
        }
        if pos != self.n {
            return Err("super-block sizes do not sum to n".into());
        }
        for s in 0..self.params.slots {
            if !seen[s] && self.chars[s] != 0 {
                return Err(format!("orphan slot {s}"));
            }
        }
        if hist != self.phase.f_next.counts() {
            return Err("next-phase histogram differs from the current blocks".into());
        }
        self.boundary.check_invariants()?;
        self.order.check_invariants()?;
        Ok(())
    }

    pub fn check_store(&self) -> Result<(), String> {
        self.store.check_invariants()
    }

    /// Flips one stored bit of the first super-block. For verifier
    /// self-tests only.
    #[doc(hidden)]
    pub fn inject_fault(&mut self) {
        if let Ok(slot) = self.order.get(0) {
            let slot = slot as usize;
            if self.store.len(slot) > 0 {
                self.store.flip_bit(slot, 0);
            }
        }
    }

    pub fn save(&self, out: &mut dyn Write) -> Result<()> {
        let mut w = Writer::new(out);
        w.header(1)?;
        w.u64(self.params.n0 as u64)?;
        w.u64(self.params.sigma as u64)?;
        w.u64(self.params.ell as u64)?;
        w.u64(self.params.tau as u64)?;
        w.u64(self.config.tau.map_or(0, |t| t as u64))?;
        w.u64(self.config.block_len.map_or(0, |l| l as u64))?;
        w.u8(matches!(self.config.code, CodeKind::Huffman) as u8)?;
        w.u8(self.config.rotation as u8)?;
        w.u64(self.n as u64)?;
        let p = &self.phase;
        w.u64(p.number)?;
        w.u64(p.done as u64)?;
        w.u64(p.len as u64)?;
        save_book(&mut w, &p.c_prev2)?;
        save_book(&mut w, &p.c_prev1)?;
        save_histogram(&mut w, &p.f_cur)?;
        save_histogram(&mut w, &p.f_next)?;
        let pending = p.schedule.pending();
        w.u32_slice(&pending.iter().map(|e| e.0).collect::<Vec<_>>())?;
        w.u32_slice(&pending.iter().map(|e| e.1).collect::<Vec<_>>())?;
        w.u32_slice(&self.order.iter().collect::<Vec<_>>())?;
        w.u32_slice(&self.chars)?;
        w.u32_slice(&self.migrated.iter().map(|&m| m as u32).collect::<Vec<_>>())?;
        w.u32_slice(&self.code_lens.iter().map(|&l| l as u32).collect::<Vec<_>>())?;
        w.u32_slice(&self.free_slots)?;
        self.store.save(&mut w)
    }

    pub fn load(input: &mut dyn Read) -> Result<Self> {
        let mut r = Reader::new(input);
        if r.header()? != 1 {
            return Err(Error::Format("snapshot is not an extended structure".into()));
        }
        let n0 = r.u64()? as usize;
        let sigma = r.u64()? as usize;
        let ell = r.u64()? as usize;
        let tau = r.u64()? as usize;
        let config = XCramConfig {
            tau: match r.u64()? {
                0 => None,
                t => Some(t as usize),
            },
            block_len: match r.u64()? {
                0 => None,
                l => Some(l as usize),
            },
            code: if r.u8()? == 1 { CodeKind::Huffman } else { CodeKind::Rank },
            rotation: r.u8()? == 1,
        };
        let params = XCramParams::new(n0, sigma, &config);
        if params.ell != ell || params.tau != tau {
            return Err(Error::Format("inconsistent parameters".into()));
        }
        let codec = CodecParams::new(sigma, ell)?;
        let n = r.u64()? as usize;
        let number = r.u64()?;
        let done = r.u64()? as usize;
        let len = r.u64()? as usize;
        let c_prev2 = load_book(&mut r, codec)?;
        let c_prev1 = load_book(&mut r, codec)?;
        let universe = codec.universe() as usize;
        let f_cur = load_histogram(&mut r, universe)?;
        let f_next = load_histogram(&mut r, universe)?;
        let ids = r.u32_vec()?;
        let keys = r.u32_vec()?;
        let order = r.u32_vec()?;
        let chars = r.u32_vec()?;
        let migrated: Vec<bool> = r.u32_vec()?.into_iter().map(|m| m != 0).collect();
        let code_lens: Vec<u8> = r.u32_vec()?.into_iter().map(|l| l.min(255) as u8).collect();
        let free_slots = r.u32_vec()?;
        let store = SegmentStore::load(&mut r)?;
        let slots = params.slots;
        let max_key = store.max_len();
        if ids.len() != keys.len()
            || ids.iter().any(|&s| s as usize >= slots)
            || keys.iter().any(|&k| k as usize > max_key)
            || order.iter().any(|&s| s as usize >= slots)
            || chars.len() != slots
            || migrated.len() != slots
            || code_lens.len() != slots * params.max_blocks()
            || store.block_count() != slots
            || max_key != params.max_blocks() * codec.cap_bits() as usize
        {
            return Err(Error::Format("inconsistent super-block tables".into()));
        }
        let mut boundary = DynBitVec::new();
        for &s in &order {
            for k in 0..chars[s as usize] {
                boundary.push(k == 0);
            }
        }
        let pending: Vec<(u32, u32)> = ids.into_iter().zip(keys).collect();
        let x = Self {
            params,
            codec,
            config,
            packer: Packer::new(sigma, ell),
            n,
            boundary,
            order: DynSeq::from_values(order),
            store,
            chars,
            migrated,
            code_lens,
            free_slots,
            phase: Phase {
                number,
                done,
                len,
                f_cur,
                f_next,
                c_prev2,
                c_prev1,
                schedule: Schedule::from_pending(&pending, slots, max_key),
            },
        };
        x.check_invariants().map_err(Error::Corrupt)?;
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_formula() {
        assert_eq!(default_tau(1 << 20), 4);
        assert_eq!(default_tau(1 << 16), 4);
        assert_eq!(default_tau(3), 1);
    }

    #[test]
    fn grow_from_empty() {
        let mut x = XCram::build(&[], 4, XCramConfig::default()).unwrap();
        for i in 0..300 {
            x.insert(i / 2, (i % 4) as u8).unwrap();
            x.check_invariants().unwrap();
        }
        assert_eq!(x.len(), 300);
        while !x.is_empty() {
            x.delete(x.len() / 2).unwrap();
        }
        x.check_invariants().unwrap();
        assert_eq!(x.super_blocks(), 0);
    }
}
