//! Binary container for TT tensors.
//!
//! ```text
//! offset  size  content
//! 0       8     magic b"TTCORE01"
//! 8       8     header length H, u64 little-endian
//! 16      H     UTF-8 JSON header {d, shape, ranks, generator, seed}
//! 16+H    ...   core 1..d entries as f64 little-endian,
//!               each core ordered a fastest, then j, then b
//! ```

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{TtCore, TtTensor};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"TTCORE01";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TtFileHeader {
    pub d: usize,
    pub shape: Vec<usize>,
    /// Internal ranks `r_1..r_{d-1}`.
    pub ranks: Vec<usize>,
    pub generator: Option<String>,
    pub seed: Option<u64>,
}

impl TtFileHeader {
    pub fn for_tensor(t: &TtTensor, generator: Option<String>, seed: Option<u64>) -> Self {
        TtFileHeader {
            d: t.order(),
            shape: t.shape().dims().to_vec(),
            ranks: t.ranks(),
            generator,
            seed,
        }
    }
}

pub fn write_tt<W: Write>(mut w: W, t: &TtTensor, header: &TtFileHeader) -> Result<()> {
    if header.shape != t.shape().dims() || header.ranks != t.ranks() || header.d != t.order() {
        return Err(Error::Format("header does not describe the tensor".into()));
    }
    let json = serde_json::to_vec(header)?;
    w.write_all(MAGIC)?;
    w.write_all(&(json.len() as u64).to_le_bytes())?;
    w.write_all(&json)?;
    for core in t.cores() {
        for x in core.data() {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_tt<R: Read>(mut r: R) -> Result<(TtTensor, TtFileHeader)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format("bad magic, not a TT core file".into()));
    }
    let mut len = [0u8; 8];
    r.read_exact(&mut len)?;
    let len = u64::from_le_bytes(len) as usize;
    if len > 1 << 24 {
        return Err(Error::Format(format!("implausible header length {len}")));
    }
    let mut json = vec![0u8; len];
    r.read_exact(&mut json)?;
    let header: TtFileHeader = serde_json::from_slice(&json)?;
    if header.d < 2 || header.shape.len() != header.d || header.ranks.len() != header.d - 1 {
        return Err(Error::Format("inconsistent d, shape and ranks in header".into()));
    }
    let mut cores = Vec::with_capacity(header.d);
    let mut buf = [0u8; 8];
    for k in 0..header.d {
        let rl = if k == 0 { 1 } else { header.ranks[k - 1] };
        let rr = if k + 1 == header.d { 1 } else { header.ranks[k] };
        let n = header.shape[k];
        let count = rl * n * rr;
        let mut data = Vec::with_capacity(count);
        for _ in 0..count {
            r.read_exact(&mut buf)?;
            data.push(f64::from_le_bytes(buf));
        }
        cores.push(TtCore::new(rl, n, rr, data)?);
    }
    let mut trailing = [0u8; 1];
    if r.read(&mut trailing)? != 0 {
        return Err(Error::Format("trailing bytes after last core".into()));
    }
    Ok((TtTensor::new(cores)?, header))
}
