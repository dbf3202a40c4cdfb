//! Binary snapshot encoding: little-endian integers, MSB-first bit streams.

use std::io::{Read, Write};

use crate::error::{Error, Result};

pub(crate) const MAGIC: &[u8; 5] = b"CRAM1";
pub(crate) const VERSION: u8 = 1;

pub(crate) struct Writer<'a> {
    out: &'a mut dyn Write,
}

impl<'a> Writer<'a> {
    pub fn new(out: &'a mut dyn Write) -> Self {
        Self { out }
    }

    pub fn header(&mut self, mode: u8) -> Result<()> {
        self.out.write_all(MAGIC)?;
        self.u8(VERSION)?;
        self.u8(mode)
    }

    pub fn u8(&mut self, v: u8) -> Result<()> {
        self.out.write_all(&[v])?;
        Ok(())
    }

    pub fn u32(&mut self, v: u32) -> Result<()> {
        self.out.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn u64(&mut self, v: u64) -> Result<()> {
        self.out.write_all(&v.to_le_bytes())?;
        Ok(())
    }

    pub fn f64(&mut self, v: f64) -> Result<()> {
        self.u64(v.to_bits())
    }

    pub fn u32_slice(&mut self, v: &[u32]) -> Result<()> {
        self.u64(v.len() as u64)?;
        for &x in v {
            self.u32(x)?;
        }
        Ok(())
    }

    pub fn u64_slice(&mut self, v: &[u64]) -> Result<()> {
        self.u64(v.len() as u64)?;
        for &x in v {
            self.u64(x)?;
        }
        Ok(())
    }

    /// Writes the first `nbits` bits of `words` (MSB-first) as bytes.
    pub fn bit_stream(&mut self, words: &[u64], nbits: usize) -> Result<()> {
        self.u64(nbits as u64)?;
        let nbytes = nbits.div_ceil(8);
        let mut buf = Vec::with_capacity(nbytes);
        for i in 0..nbytes {
            let w = words[i / 8];
            buf.push((w >> (56 - 8 * (i % 8))) as u8);
        }
        self.out.write_all(&buf)?;
        Ok(())
    }
}

pub(crate) struct Reader<'a> {
    input: &'a mut dyn Read,
}

/// Upper bound on any length prefix, to reject corrupt headers before
/// allocating.
const MAX_ITEMS: u64 = 1 << 36;

impl<'a> Reader<'a> {
    pub fn new(input: &'a mut dyn Read) -> Self {
        Self { input }
    }

    /// Checks magic and version; returns the mode flag.
    pub fn header(&mut self) -> Result<u8> {
        let mut magic = [0u8; 5];
        self.input.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("bad magic".into()));
        }
        let v = self.u8()?;
        if v != VERSION {
            return Err(Error::Format(format!("unsupported version {v}")));
        }
        self.u8()
    }

    pub fn u8(&mut self) -> Result<u8> {
        let mut b = [0u8; 1];
        self.input.read_exact(&mut b)?;
        Ok(b[0])
    }

    pub fn u64(&mut self) -> Result<u64> {
        let mut b = [0u8; 8];
        self.input.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_bits(self.u64()?))
    }

    fn count(&mut self) -> Result<usize> {
        let n = self.u64()?;
        if n > MAX_ITEMS {
            return Err(Error::Format(format!("implausible length {n}")));
        }
        Ok(n as usize)
    }

    pub fn u32_vec(&mut self) -> Result<Vec<u32>> {
        let n = self.count()?;
        let mut bytes = vec![0u8; n * 4];
        self.input.read_exact(&mut bytes)?;
        Ok(bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    pub fn u64_vec(&mut self) -> Result<Vec<u64>> {
        let n = self.count()?;
        let mut bytes = vec![0u8; n * 8];
        self.input.read_exact(&mut bytes)?;
        Ok(bytes
            .chunks_exact(8)
            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    /// Reads a bit stream written by [`Writer::bit_stream`]; `expect` is the
    /// bit count the caller derived from already-read fields.
    pub fn bit_stream(&mut self, expect: usize) -> Result<Vec<u64>> {
        let nbits = self.count()?;
        if nbits != expect {
            return Err(Error::Format(format!(
                "bit stream holds {nbits} bits, expected {expect}"
            )));
        }
        let mut bytes = vec![0u8; nbits.div_ceil(8)];
        self.input.read_exact(&mut bytes)?;
        let mut words = vec![0u64; nbits.div_ceil(64)];
        for (i, &b) in bytes.iter().enumerate() {
            words[i / 8] |= (b as u64) << (56 - 8 * (i % 8));
        }
        Ok(words)
    }
}
