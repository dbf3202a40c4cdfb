//! Compressed random access memory.
//!
//! A text over an alphabet of at most 256 symbols is cut into fixed-length
//! blocks, each block is coded with a frequency-ranked code, and the codes
//! live in a segment store that supports constant-time lookup and in-place
//! resizing. [`Cram`] handles replacements; [`XCram`] adds insertions and
//! deletions.

mod bits;
pub mod allocator;
pub mod bitvec;
pub mod codec;
pub mod cram;
pub mod entropy;
pub mod error;
mod schedule;
mod snapshot;
pub mod xcram;

pub use allocator::{SegmentStore, StoreParams};
pub use bits::{ceil_log2, BitString};
pub use bitvec::{DynBitVec, DynSeq};
pub use codec::{CodeBook, CodeKind, CodeTable, CodecParams, HuffmanTable};
pub use cram::{Cram, CramConfig, Pace, SpaceReport};
pub use entropy::SymbolHistogram;
pub use error::{Error, Result};
pub use xcram::{XCram, XCramConfig};
