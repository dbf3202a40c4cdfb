//! Subcommand implementations. Each returns its report or CSV as a string
//! so tests can inspect it; `main` decides where it goes.

use std::fmt::Write as _;
use std::time::Instant;

use anyhow::{bail, ensure, Result};
use cram_core::codec::CodeKind;
use cram_core::cram::{Cram, CramConfig, Pace};
use cram_core::entropy::hk;
use cram_core::xcram::{XCram, XCramConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Byte corpora always use the full byte alphabet.
pub const SIGMA: usize = 256;

/// Prototype geometry: two-character blocks in 64-character middle blocks.
const PROTOTYPE_BLOCK_LEN: usize = 2;
const PROTOTYPE_MIDDLE_CHARS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    /// Rank codes, one super-block migrated per replace.
    Theory,
    /// Huffman codes on two-character blocks, migration paced by `u`.
    HuffmanU,
}

#[derive(Debug, Clone, Copy)]
pub struct Settings {
    pub mode: Mode,
    pub epsilon: f64,
    pub tau: Option<usize>,
    pub u: usize,
    pub rotation: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            mode: Mode::Theory,
            epsilon: 1.0 / 16.0,
            tau: None,
            u: 4,
            rotation: true,
        }
    }
}

impl Settings {
    pub fn cram_config(&self) -> CramConfig {
        match self.mode {
            Mode::Theory => CramConfig {
                epsilon: self.epsilon,
                rotation: self.rotation,
                ..CramConfig::default()
            },
            Mode::HuffmanU => CramConfig {
                epsilon: PROTOTYPE_BLOCK_LEN as f64 / PROTOTYPE_MIDDLE_CHARS as f64,
                block_len: Some(PROTOTYPE_BLOCK_LEN),
                code: CodeKind::Huffman,
                rotation: self.rotation,
                pace: Pace::Credit { u: self.u },
            },
        }
    }

    pub fn xcram_config(&self) -> XCramConfig {
        XCramConfig {
            tau: self.tau,
            code: match self.mode {
                Mode::Theory => CodeKind::Rank,
                Mode::HuffmanU => CodeKind::Huffman,
            },
            rotation: self.rotation,
            ..XCramConfig::default()
        }
    }
}

// ---- build -------------------------------------------------------------

pub struct Built {
    pub report: String,
    pub cram: Cram,
}

pub fn cmd_build(text: &[u8], settings: &Settings) -> Result<Built> {
    let cram = Cram::build(text, SIGMA, settings.cram_config())?;
    let p = cram.params();
    let m = cram.measure();
    let mut r = String::new();
    writeln!(r, "n={} sigma={} ell={} blocks_per_super_block={}", p.n, p.sigma, p.ell, p.spb)?;
    writeln!(r, "blocks={} super_blocks={} phase_len={}", p.blocks, p.super_blocks, p.phase_len)?;
    writeln!(r, "payload_bits={}", m.payload)?;
    writeln!(r, "allocator_bits={}", m.allocator)?;
    writeln!(r, "table_bits={}", m.tables)?;
    writeln!(r, "aux_bits={}", m.aux)?;
    writeln!(r, "total_bits={}", m.total())?;
    writeln!(r, "bpc_total={:.4}", m.bpc())?;
    writeln!(r, "bpc_payload={:.4}", m.payload_bpc())?;
    writeln!(
        r,
        "h0_blocked_per_char={:.4}",
        cram.block_histogram().h0() / p.ell as f64
    )?;
    Ok(Built { report: r, cram })
}

// ---- verify ------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OpKind {
    Access,
    Replace,
    Insert,
    Delete,
}

/// One fuzz operation. Positions are drawn as raw words and reduced modulo
/// the current length at replay, so any subsequence is still replayable.
#[derive(Debug, Clone, Copy)]
pub struct Op {
    pub kind: OpKind,
    pub pos: u64,
    pub ch: u8,
}

impl std::fmt::Display for Op {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let k = match self.kind {
            OpKind::Access => "access",
            OpKind::Replace => "replace",
            OpKind::Insert => "insert",
            OpKind::Delete => "delete",
        };
        write!(f, "{k} pos={} ch={}", self.pos, self.ch)
    }
}

pub fn random_ops(rng: &mut impl Rng, count: usize, extended: bool) -> Vec<Op> {
    (0..count)
        .map(|_| {
            let kind = match rng.gen_range(0..if extended { 4 } else { 2 }) {
                0 => OpKind::Access,
                1 => OpKind::Replace,
                2 => OpKind::Insert,
                _ => OpKind::Delete,
            };
            Op {
                kind,
                pos: rng.gen(),
                ch: rng.gen(),
            }
        })
        .collect()
}

/// Something the structure under test can be driven through.
pub trait Subject {
    fn len(&self) -> usize;
    fn window(&self) -> usize;
    fn read(&self, i: usize, len: usize) -> cram_core::Result<Vec<u8>>;
    fn replace(&mut self, i: usize, c: u8) -> cram_core::Result<()>;
    fn insert(&mut self, i: usize, c: u8) -> cram_core::Result<()>;
    fn delete(&mut self, i: usize) -> cram_core::Result<u8>;
    fn contents(&self) -> cram_core::Result<Vec<u8>>;
}

impl Subject for Cram {
    fn len(&self) -> usize {
        Cram::len(self)
    }
    fn window(&self) -> usize {
        self.params().ell
    }
    fn read(&self, i: usize, len: usize) -> cram_core::Result<Vec<u8>> {
        Cram::read(self, i, len)
    }
    fn replace(&mut self, i: usize, c: u8) -> cram_core::Result<()> {
        Cram::replace(self, i, c)
    }
    fn insert(&mut self, _: usize, _: u8) -> cram_core::Result<()> {
        unreachable!("fixed layout has no insert")
    }
    fn delete(&mut self, _: usize) -> cram_core::Result<u8> {
        unreachable!("fixed layout has no delete")
    }
    fn contents(&self) -> cram_core::Result<Vec<u8>> {
        self.to_vec()
    }
}

impl Subject for XCram {
    fn len(&self) -> usize {
        XCram::len(self)
    }
    fn window(&self) -> usize {
        self.params().ell
    }
    fn read(&self, i: usize, len: usize) -> cram_core::Result<Vec<u8>> {
        XCram::read(self, i, len)
    }
    fn replace(&mut self, i: usize, c: u8) -> cram_core::Result<()> {
        XCram::replace(self, i, c)
    }
    fn insert(&mut self, i: usize, c: u8) -> cram_core::Result<()> {
        XCram::insert(self, i, c)
    }
    fn delete(&mut self, i: usize) -> cram_core::Result<u8> {
        XCram::delete(self, i)
    }
    fn contents(&self) -> cram_core::Result<Vec<u8>> {
        self.to_vec()
    }
}

/// First disagreement between a structure and its flat oracle.
#[derive(Debug, Clone)]
pub struct Divergence {
    /// Index into the op list, or the list length for the final comparison.
    pub at: usize,
    pub detail: String,
}

/// Runs `ops` against `subject` and a flat copy of `text`. Characters are
/// drawn from `alphabet`.
pub fn replay<S: Subject>(subject: &mut S, text: &[u8], ops: &[Op], alphabet: &[u8]) -> Option<Divergence> {
    let mut oracle = text.to_vec();
    let fail = |at: usize, detail: String| Some(Divergence { at, detail });
    for (at, op) in ops.iter().enumerate() {
        let n = oracle.len();
        let ch = alphabet[op.ch as usize % alphabet.len()];
        match op.kind {
            OpKind::Access if n > 0 => {
                let i = (op.pos % n as u64) as usize;
                let len = subject.window().min(n - i);
                match subject.read(i, len) {
                    Ok(got) if got == oracle[i..i + len] => {}
                    Ok(got) => return fail(at, format!("read({i}, {len}) = {got:?}, expected {:?}", &oracle[i..i + len])),
                    Err(e) => return fail(at, format!("read({i}, {len}) failed: {e}")),
                }
            }
            OpKind::Replace if n > 0 => {
                let i = (op.pos % n as u64) as usize;
                if let Err(e) = subject.replace(i, ch) {
                    return fail(at, format!("replace({i}) failed: {e}"));
                }
                oracle[i] = ch;
            }
            OpKind::Insert => {
                let i = (op.pos % (n as u64 + 1)) as usize;
                if let Err(e) = subject.insert(i, ch) {
                    return fail(at, format!("insert({i}) failed: {e}"));
                }
                oracle.insert(i, ch);
            }
            OpKind::Delete if n > 0 => {
                let i = (op.pos % n as u64) as usize;
                match subject.delete(i) {
                    Ok(c) if c == oracle[i] => {}
                    Ok(c) => return fail(at, format!("delete({i}) returned {c}, expected {}", oracle[i])),
                    Err(e) => return fail(at, format!("delete({i}) failed: {e}")),
                }
                oracle.remove(i);
            }
            _ => {}
        }
        if subject.len() != oracle.len() {
            return fail(at, format!("length {} != {}", subject.len(), oracle.len()));
        }
    }
    match subject.contents() {
        Ok(c) if c == oracle => None,
        Ok(c) => {
            let i = c.iter().zip(&oracle).position(|(a, b)| a != b).unwrap_or(c.len().min(oracle.len()));
            fail(ops.len(), format!("final contents differ first at position {i}"))
        }
        Err(e) => fail(ops.len(), format!("final read failed: {e}")),
    }
}

/// Shrinks a failing op list with greedy chunk removal.
fn minimize(ops: &[Op], fails: impl Fn(&[Op]) -> bool) -> Vec<Op> {
    let mut cur = ops.to_vec();
    let mut chunk = cur.len().div_ceil(2).max(1);
    loop {
        let mut i = 0;
        let mut removed = false;
        while i < cur.len() {
            let mut trial = cur[..i].to_vec();
            trial.extend_from_slice(&cur[(i + chunk).min(cur.len())..]);
            if fails(&trial) {
                cur = trial;
                removed = true;
            } else {
                i += chunk;
            }
        }
        if chunk == 1 && !removed {
            return cur;
        }
        if !removed {
            chunk = (chunk / 2).max(1);
        }
    }
}

pub struct VerifyOptions {
    pub seed: u64,
    pub ops: usize,
    pub inject_fault: bool,
}

pub struct Verified {
    pub passed: bool,
    pub report: String,
}

/// Fuzzes both structures against flat arrays. The report contains no
/// timings, so equal options give byte-identical reports.
pub fn cmd_verify(text: &[u8], settings: &Settings, opts: &VerifyOptions) -> Result<Verified> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let alphabet: Vec<u8> = {
        let mut seen = [false; 256];
        text.iter().for_each(|&c| seen[c as usize] = true);
        let a: Vec<u8> = (0..=255u8).filter(|&c| seen[c as usize]).collect();
        if a.is_empty() { vec![0] } else { a }
    };
    let mut report = String::new();
    let mut passed = true;
    writeln!(report, "seed={} ops={} n={} sigma={}", opts.seed, opts.ops, text.len(), SIGMA)?;

    let fixed_ops = random_ops(&mut rng, opts.ops, false);
    let config = settings.cram_config();
    let make_fixed = || -> Result<Cram> {
        let mut c = Cram::build(text, SIGMA, config)?;
        if opts.inject_fault {
            c.inject_fault(0);
        }
        Ok(c)
    };
    let outcome = replay(&mut make_fixed()?, text, &fixed_ops, &alphabet);
    passed &= section(&mut report, "cram", &fixed_ops, outcome, |ops| {
        make_fixed().map_or(true, |mut c| replay(&mut c, text, ops, &alphabet).is_some())
    })?;

    let ext_ops = random_ops(&mut rng, opts.ops, true);
    let xconfig = settings.xcram_config();
    let make_ext = || -> Result<XCram> {
        let mut x = XCram::build(text, SIGMA, xconfig)?;
        if opts.inject_fault {
            x.inject_fault();
        }
        Ok(x)
    };
    let outcome = replay(&mut make_ext()?, text, &ext_ops, &alphabet);
    passed &= section(&mut report, "xcram", &ext_ops, outcome, |ops| {
        make_ext().map_or(true, |mut x| replay(&mut x, text, ops, &alphabet).is_some())
    })?;
    writeln!(report, "result={}", if passed { "pass" } else { "FAIL" })?;
    Ok(Verified { passed, report })
}

fn section(
    report: &mut String,
    name: &str,
    ops: &[Op],
    outcome: Option<Divergence>,
    fails: impl Fn(&[Op]) -> bool,
) -> Result<bool> {
    match outcome {
        None => {
            writeln!(report, "{name}: ok ({} ops)", ops.len())?;
            Ok(true)
        }
        Some(d) => {
            writeln!(report, "{name}: DIVERGED at op {}: {}", d.at, d.detail)?;
            let prefix = &ops[..(d.at + 1).min(ops.len())];
            let small = minimize(prefix, fails);
            writeln!(report, "{name}: minimized trace ({} ops):", small.len())?;
            for op in &small {
                writeln!(report, "  {op}")?;
            }
            Ok(false)
        }
    }
}

// ---- overwrite ---------------------------------------------------------

#[derive(Debug, Clone, Copy)]
pub struct OverwriteRow {
    pub percent: usize,
    pub bpc_total: f64,
    pub bpc_payload: f64,
    pub h0_blocked_current: f64,
}

/// Builds on `a`, overwrites it left to right with `b`, sampling at every
/// percentage point.
pub fn cmd_overwrite(a: &[u8], b: &[u8], settings: &Settings) -> Result<Vec<OverwriteRow>> {
    ensure!(
        a.len() == b.len(),
        "corpora differ in length ({} vs {})",
        a.len(),
        b.len()
    );
    let mut cram = Cram::build(a, SIGMA, settings.cram_config())?;
    let n = a.len();
    let mut rows = Vec::with_capacity(101);
    let mut next = 0usize;
    for percent in 0..=100 {
        let upto = n * percent / 100;
        while next < upto {
            cram.replace(next, b[next])?;
            next += 1;
        }
        let m = cram.measure();
        rows.push(OverwriteRow {
            percent,
            bpc_total: m.bpc(),
            bpc_payload: m.payload_bpc(),
            h0_blocked_current: cram.block_histogram().h0() / cram.params().ell as f64,
        });
    }
    Ok(rows)
}

pub fn overwrite_csv(rows: &[OverwriteRow]) -> String {
    let mut s = String::from("percent,bpc_total,bpc_payload,h0_blocked_current\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{:.6},{:.6},{:.6}",
            r.percent, r.bpc_total, r.bpc_payload, r.h0_blocked_current
        );
    }
    s
}

// ---- throughput --------------------------------------------------------

pub const UNIT_SIZES: [usize; 5] = [4, 16, 64, 256, 1024];

#[derive(Debug, Clone, Copy)]
pub struct ThroughputRow {
    pub unit_bytes: usize,
    pub read_s: f64,
    pub write_s: f64,
    pub bytes_read: usize,
}

fn median3(mut v: [f64; 3]) -> f64 {
    v.sort_by(f64::total_cmp);
    v[1]
}

/// Times a full read and a full overwrite (with `b`) per unit size; each
/// figure is the median of three runs.
pub fn cmd_throughput(a: &[u8], b: &[u8], settings: &Settings) -> Result<Vec<ThroughputRow>> {
    ensure!(a.len() == b.len(), "corpora differ in length");
    let base = Cram::build(a, SIGMA, settings.cram_config())?;
    let n = a.len();
    let mut rows = Vec::new();
    for unit in UNIT_SIZES {
        let mut reads = [0.0; 3];
        let mut writes = [0.0; 3];
        let mut bytes_read = 0;
        for run in 0..3 {
            let mut buf = Vec::with_capacity(unit);
            let t = Instant::now();
            let mut total = 0;
            let mut i = 0;
            while i < n {
                let len = unit.min(n - i);
                buf.clear();
                base.read_into(i, len, &mut buf)?;
                total += buf.len();
                i += len;
            }
            reads[run] = t.elapsed().as_secs_f64();
            if total != n {
                bail!("read {total} bytes of {n}");
            }
            bytes_read = total;

            let mut c = base.clone();
            let t = Instant::now();
            let mut i = 0;
            while i < n {
                let end = (i + unit).min(n);
                for (k, &ch) in b[i..end].iter().enumerate() {
                    c.replace(i + k, ch)?;
                }
                i = end;
            }
            writes[run] = t.elapsed().as_secs_f64();
        }
        rows.push(ThroughputRow {
            unit_bytes: unit,
            read_s: median3(reads),
            write_s: median3(writes),
            bytes_read,
        });
    }
    Ok(rows)
}

pub fn throughput_csv(rows: &[ThroughputRow]) -> String {
    let mut s = String::from("unit_bytes,read_s,write_s\n");
    for r in rows {
        let _ = writeln!(s, "{},{:.6},{:.6}", r.unit_bytes, r.read_s, r.write_s);
    }
    s
}

// ---- entropy -----------------------------------------------------------

/// `H_0 .. H_3` in bits per character, as CSV. Orders the text is too short
/// for are skipped.
pub fn cmd_entropy(text: &[u8]) -> Result<String> {
    let mut s = String::from("k,hk_bits\n");
    for k in 0..=3 {
        if k > 0 && k >= text.len() {
            break;
        }
        writeln!(s, "{k},{:.6}", hk(text, k)?)?;
    }
    Ok(s)
}
