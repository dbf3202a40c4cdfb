//! Compressed random access memory with in-place replacement.
//!
//! The text is cut into blocks of `ell` characters, each block stored as its
//! codeword in a [`SegmentStore`]. Groups of `spb` consecutive blocks form a
//! super-block, the unit of re-encoding.
//!
//! Replacements are grouped into phases. During a phase two code tables are
//! live and frozen: every super-block is coded either with the older one or,
//! once it has been migrated (its `R` bit is set), with the newer one. Each
//! replace migrates one more super-block, shortest first. At the end of a
//! phase the tables rotate and a table built from the block histogram seen at
//! the start of the phase becomes the newer one.

use std::io::{Read, Write};

use crate::allocator::SegmentStore;
use crate::codec::{Code, CodeBook, CodeKind, CodecParams, CodeTable, HuffmanTable};
use crate::entropy::SymbolHistogram;
use crate::error::{check_index, Error, Result};
use crate::schedule::Schedule;
use crate::snapshot::{Reader, Writer};

/// How quickly super-blocks are migrated to the newer table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pace {
    /// One super-block per replace; a phase lasts `ceil(eps * n')` replaces.
    PerReplace,
    /// Each replace earns `u` characters of re-encoding credit; a super-block
    /// is migrated whenever the credit covers its characters.
    Credit { u: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CramConfig {
    /// Super-blocks hold `ceil(1 / epsilon)` blocks.
    pub epsilon: f64,
    /// Overrides the block length derived from `n` and `sigma`.
    pub block_len: Option<usize>,
    pub code: CodeKind,
    /// With rotation off the initial table is kept forever.
    pub rotation: bool,
    pub pace: Pace,
}

impl Default for CramConfig {
    fn default() -> Self {
        Self {
            epsilon: 1.0 / 16.0,
            block_len: None,
            code: CodeKind::Rank,
            rotation: true,
            pace: Pace::PerReplace,
        }
    }
}

/// Block length `max(1, floor(log_sigma(n) / 2))`: the largest `ell` with
/// `sigma^(2 ell) <= n`.
pub fn default_block_len(n: usize, sigma: usize) -> usize {
    let mut ell = 1usize;
    loop {
        let next = ell + 1;
        match (sigma as u128).checked_pow(2 * next as u32) {
            Some(v) if v <= n as u128 => ell = next,
            _ => return ell,
        }
    }
}

pub(crate) fn blocks_per_super_block(epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Argument(format!("epsilon {epsilon} not in (0, 1]")));
    }
    Ok(((1.0 / epsilon) - 1e-9).ceil().max(1.0) as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CramParams {
    pub n: usize,
    pub sigma: usize,
    pub ell: usize,
    /// Blocks per super-block.
    pub spb: usize,
    /// `n' = ceil(n / ell)`.
    pub blocks: usize,
    pub super_blocks: usize,
    /// Replaces per phase.
    pub phase_len: usize,
}

/// Space used by a structure, in bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SpaceReport {
    pub n: usize,
    /// Sum of stored codeword lengths.
    pub payload: u64,
    /// Allocator bits beyond the payload: id tags, segment headers, slack,
    /// and the per-block addressing tables.
    pub allocator: u64,
    /// Live code tables and block histograms.
    pub tables: u64,
    /// Phase bookkeeping and, in the extended structure, the boundary vector.
    pub aux: u64,
}

impl SpaceReport {
    pub fn total(&self) -> u64 {
        self.payload + self.allocator + self.tables + self.aux
    }

    pub fn bpc(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.total() as f64 / self.n as f64
        }
    }

    pub fn payload_bpc(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.payload as f64 / self.n as f64
        }
    }
}

/// Packs and unpacks base-`sigma` blocks.
#[derive(Debug, Clone)]
pub(crate) struct Packer {
    sigma: u32,
    pow: Vec<u32>,
}

impl Packer {
    pub fn new(sigma: usize, ell: usize) -> Self {
        let pow = (0..ell).rev().map(|k| (sigma as u32).pow(k as u32)).collect();
        Self {
            sigma: sigma as u32,
            pow,
        }
    }

    pub fn ell(&self) -> usize {
        self.pow.len()
    }

    #[inline]
    pub fn char_at(&self, block: u32, k: usize) -> u8 {
        ((block / self.pow[k]) % self.sigma) as u8
    }

    #[inline]
    pub fn with_char(&self, block: u32, k: usize, c: u8) -> u32 {
        let old = self.char_at(block, k) as u32;
        block - old * self.pow[k] + c as u32 * self.pow[k]
    }

    pub fn pack(&self, chars: &[u8]) -> u32 {
        let mut v = 0u32;
        for k in 0..self.ell() {
            v = v * self.sigma + chars.get(k).copied().unwrap_or(0) as u32;
        }
        v
    }

    pub fn unpack_into(&self, block: u32, out: &mut Vec<u8>) {
        for k in 0..self.ell() {
            out.push(self.char_at(block, k));
        }
    }
}

pub(crate) fn check_text(text: &[u8], sigma: usize) -> Result<()> {
    if let Some(&c) = text.iter().find(|&&c| c as usize >= sigma) {
        return Err(Error::Symbol {
            symbol: c as u64,
            sigma,
        });
    }
    Ok(())
}

pub(crate) fn save_book(w: &mut Writer<'_>, book: &CodeBook) -> Result<()> {
    match book {
        CodeBook::Rank(t) => {
            w.u8(0)?;
            w.u32_slice(t.block_of_rank())
        }
        CodeBook::Huffman(t) => {
            w.u8(1)?;
            let lens: Vec<u32> = t.lengths().iter().map(|&l| l as u32).collect();
            w.u32_slice(&lens)
        }
    }
}

pub(crate) fn load_book(r: &mut Reader<'_>, params: CodecParams) -> Result<CodeBook> {
    match r.u8()? {
        0 => Ok(CodeBook::Rank(CodeTable::from_order(r.u32_vec()?, params)?)),
        1 => {
            let lens = r.u32_vec()?;
            if lens.iter().any(|&l| l > 64) {
                return Err(Error::Format("code length out of range".into()));
            }
            Ok(CodeBook::Huffman(HuffmanTable::from_lengths(
                lens.into_iter().map(|l| l as u8).collect(),
                params,
            )?))
        }
        k => Err(Error::Format(format!("unknown table kind {k}"))),
    }
}

pub(crate) fn save_histogram(w: &mut Writer<'_>, h: &SymbolHistogram) -> Result<()> {
    w.u64_slice(h.counts())
}

pub(crate) fn load_histogram(r: &mut Reader<'_>, universe: usize) -> Result<SymbolHistogram> {
    let counts = r.u64_vec()?;
    if counts.len() != universe {
        return Err(Error::Format("histogram size mismatch".into()));
    }
    Ok(SymbolHistogram::from_parts(counts))
}

pub(crate) fn encode_pace(w: &mut Writer<'_>, config: &CramConfig) -> Result<()> {
    w.f64(config.epsilon)?;
    w.u64(config.block_len.map_or(0, |l| l as u64))?;
    w.u8(matches!(config.code, CodeKind::Huffman) as u8)?;
    w.u8(config.rotation as u8)?;
    match config.pace {
        Pace::PerReplace => w.u64(0),
        Pace::Credit { u } => w.u64(u as u64 + 1),
    }
}

pub(crate) fn decode_pace(r: &mut Reader<'_>) -> Result<CramConfig> {
    let epsilon = r.f64()?;
    let block_len = match r.u64()? {
        0 => None,
        l => Some(l as usize),
    };
    let code = if r.u8()? == 1 { CodeKind::Huffman } else { CodeKind::Rank };
    let rotation = r.u8()? == 1;
    let pace = match r.u64()? {
        0 => Pace::PerReplace,
        u => Pace::Credit { u: u as usize - 1 },
    };
    Ok(CramConfig {
        epsilon,
        block_len,
        code,
        rotation,
        pace,
    })
}

#[derive(Debug, Clone)]
struct PhaseState {
    number: u64,
    done: usize,
    f_cur: SymbolHistogram,
    f_next: SymbolHistogram,
    c_prev2: CodeBook,
    c_prev1: CodeBook,
    r: Vec<u64>,
    schedule: Schedule,
    credit: usize,
}

/// Fixed-layout compressed text supporting `access` and `replace`.
#[derive(Debug, Clone)]
pub struct Cram {
    params: CramParams,
    codec: CodecParams,
    config: CramConfig,
    packer: Packer,
    store: SegmentStore,
    phase: PhaseState,
    #[cfg(debug_assertions)]
    checked_ops: u64,
}

impl Cram {
    pub fn build(text: &[u8], sigma: usize, config: CramConfig) -> Result<Self> {
        check_text(text, sigma)?;
        let n = text.len();
        let ell = config.block_len.unwrap_or_else(|| default_block_len(n, sigma));
        let codec = CodecParams::new(sigma, ell)?;
        let spb = blocks_per_super_block(config.epsilon)?;
        if let Pace::Credit { u } = config.pace {
            if u == 0 {
                return Err(Error::Argument("credit pace needs u >= 1".into()));
            }
        }
        let blocks = n.div_ceil(ell);
        let super_blocks = blocks.div_ceil(spb);
        let phase_len = match config.pace {
            Pace::PerReplace => ((config.epsilon * blocks as f64).ceil() as usize).max(1),
            Pace::Credit { u } => (super_blocks * spb * ell).div_ceil(u).max(1),
        };
        let params = CramParams {
            n,
            sigma,
            ell,
            spb,
            blocks,
            super_blocks,
            phase_len,
        };
        let packer = Packer::new(sigma, ell);
        let values: Vec<u32> = text.chunks(ell).map(|c| packer.pack(c)).collect();
        let mut freq = SymbolHistogram::with_universe(codec.universe() as usize);
        for &v in &values {
            freq.increment(v as u64);
        }
        let table = CodeBook::build(config.code, &freq, codec)?;
        let codes: Vec<Code> = values.iter().map(|&v| table.encode(v)).collect();
        let lengths: Vec<usize> = codes.iter().map(|c| c.len as usize).collect();
        let mut store = SegmentStore::new(codec.cap_bits() as usize, &lengths)?;
        for (x, c) in codes.iter().enumerate() {
            store.write_bits(x, 0, c.len as usize, c.bits);
        }
        let phase = PhaseState {
            number: 1,
            done: 0,
            f_next: freq.clone(),
            f_cur: freq,
            c_prev2: table.clone(),
            c_prev1: table,
            r: vec![0; super_blocks.div_ceil(64)],
            schedule: Schedule::default(),
            credit: 0,
        };
        let mut cram = Self {
            params,
            codec,
            config,
            packer,
            store,
            phase,
            #[cfg(debug_assertions)]
            checked_ops: 0,
        };
        cram.phase.schedule = cram.build_schedule();
        Ok(cram)
    }

    pub fn params(&self) -> &CramParams {
        &self.params
    }

    pub fn config(&self) -> &CramConfig {
        &self.config
    }

    pub fn codec(&self) -> CodecParams {
        self.codec
    }

    pub fn len(&self) -> usize {
        self.params.n
    }

    pub fn is_empty(&self) -> bool {
        self.params.n == 0
    }

    pub fn phase_number(&self) -> u64 {
        self.phase.number
    }

    /// Replaces done in the current phase.
    pub fn phase_progress(&self) -> usize {
        self.phase.done
    }

    pub fn store(&self) -> &SegmentStore {
        &self.store
    }

    /// Whether super-block `y` has been migrated to the newer table.
    pub fn is_migrated(&self, y: usize) -> bool {
        (self.phase.r[y / 64] >> (y % 64)) & 1 == 1
    }

    fn set_migrated(&mut self, y: usize) {
        self.phase.r[y / 64] |= 1 << (y % 64);
    }

    /// Table currently governing super-block `y`.
    fn table_for(&self, y: usize) -> &CodeBook {
        if self.is_migrated(y) {
            &self.phase.c_prev1
        } else {
            &self.phase.c_prev2
        }
    }

    fn block_range(&self, y: usize) -> std::ops::Range<usize> {
        y * self.params.spb..((y + 1) * self.params.spb).min(self.params.blocks)
    }

    #[inline]
    fn stored_code(&self, x: usize) -> Code {
        let len = self.store.len(x);
        Code::new(len as u32, self.store.read_bits(x, 0, len))
    }

    /// Decoded value of block `x`.
    #[inline]
    pub fn block(&self, x: usize) -> Result<u32> {
        check_index(x, self.params.blocks)?;
        self.table_for(x / self.params.spb).decode(self.stored_code(x))
    }

    fn put_block(&mut self, x: usize, code: Code) -> Result<()> {
        self.store.realloc(x, code.len as usize)?;
        self.store.write_bits(x, 0, code.len as usize, code.bits);
        Ok(())
    }

    /// Character at position `i`.
    pub fn get(&self, i: usize) -> Result<u8> {
        check_index(i, self.params.n)?;
        let ell = self.params.ell;
        Ok(self.packer.char_at(self.block(i / ell)?, i % ell))
    }

    /// The `ell` characters starting at `i` (a whole word).
    pub fn access(&self, i: usize) -> Result<Vec<u8>> {
        let ell = self.params.ell;
        if i + ell > self.params.n {
            return Err(Error::OutOfRange {
                index: i + ell - 1,
                len: self.params.n,
            });
        }
        self.read(i, ell)
    }

    /// `len` characters starting at `i`.
    pub fn read(&self, i: usize, len: usize) -> Result<Vec<u8>> {
        let mut out = Vec::with_capacity(len);
        self.read_into(i, len, &mut out)?;
        Ok(out)
    }

    pub fn read_into(&self, i: usize, len: usize, out: &mut Vec<u8>) -> Result<()> {
        if len == 0 {
            return Ok(());
        }
        if i + len > self.params.n {
            return Err(Error::OutOfRange {
                index: i + len - 1,
                len: self.params.n,
            });
        }
        let ell = self.params.ell;
        let (first, last) = (i / ell, (i + len - 1) / ell);
        let start = out.len();
        for x in first..=last {
            self.packer.unpack_into(self.block(x)?, out);
        }
        let skip = i - first * ell;
        out.drain(start..start + skip);
        out.truncate(start + len);
        Ok(())
    }

    /// Whole current text.
    pub fn to_vec(&self) -> Result<Vec<u8>> {
        self.read(0, self.params.n)
    }

    pub fn replace(&mut self, i: usize, c: u8) -> Result<()> {
        check_index(i, self.params.n)?;
        if c as usize >= self.params.sigma {
            return Err(Error::Symbol {
                symbol: c as u64,
                sigma: self.params.sigma,
            });
        }
        if self.config.rotation {
            self.migrate_scheduled()?;
        }
        let ell = self.params.ell;
        let x = i / ell;
        let y = x / self.params.spb;
        let old = self.block(x)?;
        let new = self.packer.with_char(old, i % ell, c);
        if new != old {
            self.phase.f_next.decrement(old as u64)?;
            self.phase.f_next.increment(new as u64);
            let code = self.table_for(y).encode(new);
            self.put_block(x, code)?;
        }
        #[cfg(debug_assertions)]
        self.debug_check_local(y, new)?;
        if self.config.rotation {
            self.phase.done += 1;
            if self.phase.done >= self.params.phase_len {
                self.advance_phase()?;
            }
        }
        Ok(())
    }

    /// Migration step of a replace, according to the configured pace.
    fn migrate_scheduled(&mut self) -> Result<()> {
        match self.config.pace {
            Pace::PerReplace => {
                if let Some(y) = self.phase.schedule.pop() {
                    self.migrate(y as usize)?;
                }
            }
            Pace::Credit { u } => {
                self.phase.credit += u;
                let sb_chars = self.params.spb * self.params.ell;
                while self.phase.credit >= sb_chars {
                    self.phase.credit -= sb_chars;
                    match self.phase.schedule.pop() {
                        Some(y) => self.migrate(y as usize)?,
                        None => {
                            self.phase.credit = 0;
                            break;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Re-encodes super-block `y` from the older to the newer table.
    fn migrate(&mut self, y: usize) -> Result<()> {
        if self.is_migrated(y) {
            return Ok(());
        }
        for x in self.block_range(y) {
            let v = self.phase.c_prev2.decode(self.stored_code(x))?;
            let code = self.phase.c_prev1.encode(v);
            if code != self.stored_code(x) {
                self.put_block(x, code)?;
            }
        }
        self.set_migrated(y);
        Ok(())
    }

    /// Ends the current phase: finishes migration, rotates the tables and
    /// histograms, and schedules the next phase.
    pub fn advance_phase(&mut self) -> Result<()> {
        while let Some(y) = self.phase.schedule.pop() {
            self.migrate(y as usize)?;
        }
        let next = CodeBook::build(self.config.code, &self.phase.f_cur, self.codec)?;
        self.phase.c_prev2 = std::mem::replace(&mut self.phase.c_prev1, next);
        std::mem::swap(&mut self.phase.f_cur, &mut self.phase.f_next);
        self.phase.f_next.clone_from(&self.phase.f_cur);
        self.phase.r.iter_mut().for_each(|w| *w = 0);
        self.phase.schedule = self.build_schedule();
        self.phase.done = 0;
        self.phase.credit = 0;
        self.phase.number += 1;
        Ok(())
    }

    fn super_block_bits(&self, y: usize) -> u32 {
        self.block_range(y).map(|x| self.store.len(x) as u32).sum()
    }

    fn build_schedule(&self) -> Schedule {
        let keys: Vec<u32> = (0..self.params.super_blocks)
            .map(|y| self.super_block_bits(y))
            .collect();
        Schedule::build(&keys, self.params.spb * self.codec.cap_bits() as usize)
    }

    /// Histogram of the current blocks.
    pub fn block_histogram(&self) -> &SymbolHistogram {
        &self.phase.f_next
    }

    /// Super-blocks still waiting for migration in this phase.
    pub fn pending_migrations(&self) -> usize {
        self.phase.schedule.len()
    }

    pub fn measure(&self) -> SpaceReport {
        let space = self.store.space();
        let universe = self.codec.universe();
        let count_w = crate::bits::width_for(self.params.blocks as u64) as u64;
        let tables = self.phase.c_prev2.size_bits()
            + self.phase.c_prev1.size_bits()
            + 2 * universe * count_w;
        let sb_w = crate::bits::width_for(self.params.super_blocks as u64) as u64;
        let aux = self.params.super_blocks as u64 * (1 + sb_w)
            + (self.params.spb as u64 * self.codec.cap_bits() as u64 + 1) * 2 * sb_w;
        SpaceReport {
            n: self.params.n,
            payload: space.payload,
            allocator: space.overhead(),
            tables,
            aux,
        }
    }

    /// Payload bits if every block were coded with the older table, and with
    /// the newer table.
    pub fn payload_under_tables(&self) -> Result<(u64, u64)> {
        let (mut old, mut new) = (0u64, 0u64);
        for x in 0..self.params.blocks {
            let v = self.block(x)?;
            old += self.phase.c_prev2.encode(v).len as u64;
            new += self.phase.c_prev1.encode(v).len as u64;
        }
        Ok((old, new))
    }

    /// Current payload: sum of stored code lengths.
    pub fn payload_bits(&self) -> u64 {
        self.store.space().payload
    }

    /// Cheap per-operation check of the touched super-block.
    #[cfg(debug_assertions)]
    fn debug_check_local(&mut self, y: usize, new: u32) -> Result<()> {
        self.checked_ops += 1;
        debug_assert!(self.phase.f_next.count(new as u64) > 0);
        let table = self.table_for(y);
        for x in self.block_range(y) {
            let code = self.stored_code(x);
            let v = table.decode(code)?;
            debug_assert_eq!(table.encode(v), code, "block {x} not under its table");
        }
        Ok(())
    }

    /// Full scan of the phase invariants and the store.
    ///
    /// * every block is stored exactly as its governing table encodes it,
    ///   the newer table iff its super-block is migrated;
    /// * the next-phase histogram equals the histogram of the current blocks.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut hist = vec![0u64; self.codec.universe() as usize];
        for y in 0..self.params.super_blocks {
            let table = self.table_for(y);
            for x in self.block_range(y) {
                let code = self.stored_code(x);
                let v = table
                    .decode(code)
                    .map_err(|e| format!("block {x}: {e}"))?;
                if table.encode(v) != code {
                    return Err(format!("block {x} is not coded with its governing table"));
                }
                hist[v as usize] += 1;
            }
        }
        if hist != self.phase.f_next.counts() {
            return Err("next-phase histogram differs from the current blocks".into());
        }
        if self.store.block_count() != self.params.blocks {
            return Err("store block count mismatch".into());
        }
        Ok(())
    }

    /// Full store scan; slow.
    pub fn check_store(&self) -> Result<(), String> {
        self.store.check_invariants()
    }

    /// Flips one stored bit of block `x`. For verifier self-tests only.
    #[doc(hidden)]
    pub fn inject_fault(&mut self, x: usize) {
        if self.store.len(x) > 0 {
            self.store.flip_bit(x, 0);
        }
    }

    pub fn save(&self, out: &mut dyn Write) -> Result<()> {
        let mut w = Writer::new(out);
        w.header(0)?;
        w.u64(self.params.n as u64)?;
        w.u64(self.params.sigma as u64)?;
        w.u64(self.params.ell as u64)?;
        encode_pace(&mut w, &self.config)?;
        let p = &self.phase;
        w.u64(p.number)?;
        w.u64(p.done as u64)?;
        w.u64(p.credit as u64)?;
        save_book(&mut w, &p.c_prev2)?;
        save_book(&mut w, &p.c_prev1)?;
        w.u64_slice(&p.r)?;
        save_histogram(&mut w, &p.f_cur)?;
        save_histogram(&mut w, &p.f_next)?;
        let pending = p.schedule.pending();
        w.u32_slice(&pending.iter().map(|e| e.0).collect::<Vec<_>>())?;
        w.u32_slice(&pending.iter().map(|e| e.1).collect::<Vec<_>>())?;
        self.store.save(&mut w)
    }

    pub fn load(input: &mut dyn Read) -> Result<Self> {
        let mut r = Reader::new(input);
        if r.header()? != 0 {
            return Err(Error::Format("snapshot is not a fixed-layout structure".into()));
        }
        let n = r.u64()? as usize;
        let sigma = r.u64()? as usize;
        let ell = r.u64()? as usize;
        let config = decode_pace(&mut r)?;
        let codec = CodecParams::new(sigma, ell)?;
        let spb = blocks_per_super_block(config.epsilon)?;
        let blocks = n.div_ceil(ell);
        let super_blocks = blocks.div_ceil(spb);
        let phase_len = match config.pace {
            Pace::PerReplace => ((config.epsilon * blocks as f64).ceil() as usize).max(1),
            Pace::Credit { u } => (super_blocks * spb * ell).div_ceil(u.max(1)).max(1),
        };
        let number = r.u64()?;
        let done = r.u64()? as usize;
        let credit = r.u64()? as usize;
        let c_prev2 = load_book(&mut r, codec)?;
        let c_prev1 = load_book(&mut r, codec)?;
        let rbits = r.u64_vec()?;
        let universe = codec.universe() as usize;
        let f_cur = load_histogram(&mut r, universe)?;
        let f_next = load_histogram(&mut r, universe)?;
        let ids = r.u32_vec()?;
        let keys = r.u32_vec()?;
        let store = SegmentStore::load(&mut r)?;
        let max_key = spb * codec.cap_bits() as usize;
        if rbits.len() != super_blocks.div_ceil(64)
            || ids.len() != keys.len()
            || ids.iter().any(|&y| y as usize >= super_blocks)
            || keys.iter().any(|&k| k as usize > max_key)
            || store.block_count() != blocks
        {
            return Err(Error::Format("inconsistent phase state".into()));
        }
        let pending: Vec<(u32, u32)> = ids.into_iter().zip(keys).collect();
        let cram = Self {
            params: CramParams {
                n,
                sigma,
                ell,
                spb,
                blocks,
                super_blocks,
                phase_len,
            },
            codec,
            config,
            packer: Packer::new(sigma, ell),
            store,
            phase: PhaseState {
                number,
                done,
                f_cur,
                f_next,
                c_prev2,
                c_prev1,
                r: rbits,
                schedule: Schedule::from_pending(&pending, super_blocks, max_key),
                credit,
            },
            #[cfg(debug_assertions)]
            checked_ops: 0,
        };
        cram.check_invariants().map_err(Error::Corrupt)?;
        Ok(cram)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn block_length_formula() {
        assert_eq!(default_block_len(1 << 20, 4), 5);
        assert_eq!(default_block_len(10_000_000, 256), 1);
        assert_eq!(default_block_len(3, 2), 1);
        assert_eq!(default_block_len(16, 2), 2);
    }

    #[test]
    fn packer_round_trip() {
        let p = Packer::new(3, 4);
        let v = p.pack(&[2, 0, 1, 2]);
        assert_eq!(v, 2 * 27 + 1 * 3 + 2);
        let mut out = Vec::new();
        p.unpack_into(v, &mut out);
        assert_eq!(out, vec![2, 0, 1, 2]);
        assert_eq!(p.with_char(v, 1, 2), v + 2 * 9);
    }

    #[test]
    fn tiny_round_trip() {
        let text = b"\x00\x01\x01\x00\x01";
        let c = Cram::build(text, 2, CramConfig::default()).unwrap();
        assert_eq!(c.to_vec().unwrap(), text.to_vec());
        c.check_invariants().unwrap();
    }

    #[test]
    fn empty_text() {
        let mut c = Cram::build(&[], 4, CramConfig::default()).unwrap();
        assert!(c.is_empty());
        assert!(c.get(0).is_err());
        assert!(c.replace(0, 1).is_err());
        assert_eq!(c.to_vec().unwrap(), Vec::<u8>::new());
    }
}
