//! `SSIX` index file, little-endian:
//!
//! ```text
//! magic "SSIX" | version u32 | metric u8 | dim u32 | nlist u32 | pq flag u8
//! [pq: m u32 | dsub u32 | ks u32 | codebooks f32 * m*ks*dsub]
//! centroids f32 * nlist*dim
//! per list: length u64, then length * (id u64, payload)
//! crc32 of all preceding bytes
//! ```
//!
//! The payload is `dim` f32 values, or `m` code bytes when the PQ flag is set.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use super::ivf::{CoarseQuantizer, IvfPqIndex, Payload};
use super::pq::PqCodebook;
use super::Metric;
use crate::binio::{Reader, Writer};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SSIX";
pub const VERSION: u32 = 1;

pub(crate) fn to_bytes(index: &IvfPqIndex) -> Vec<u8> {
    let mut w = Writer::new(MAGIC);
    w.u32(VERSION);
    w.u8(index.metric.to_byte());
    w.u32(index.dim as u32);
    w.u32(index.coarse.nlist as u32);
    match &index.pq {
        Some(cb) => {
            w.u8(1);
            w.u32(cb.m as u32);
            w.u32(cb.dsub as u32);
            w.u32(cb.ks as u32);
            w.f32s(cb.centroids.iter().copied());
        }
        None => w.u8(0),
    }
    w.f32s(index.coarse.centroids.iter().copied());
    for list in &index.lists {
        w.u64(list.ids.len() as u64);
        match &list.payload {
            Payload::Full(v) => {
                for (&id, row) in list.ids.iter().zip(v.chunks_exact(index.dim)) {
                    w.u64(id);
                    w.f32s(row.iter().copied());
                }
            }
            Payload::Codes(c) => {
                let m = index.pq.as_ref().map_or(0, |cb| cb.m);
                for (&id, code) in list.ids.iter().zip(c.chunks_exact(m)) {
                    w.u64(id);
                    w.bytes(code);
                }
            }
        }
    }
    w.finish()
}

pub(crate) fn save(index: &IvfPqIndex, path: &Path) -> Result<()> {
    fs::write(path, to_bytes(index))?;
    Ok(())
}

pub(crate) fn load(path: &Path) -> Result<IvfPqIndex> {
    from_bytes(&fs::read(path)?)
}

fn corrupt(msg: impl Into<String>) -> Error {
    Error::CorruptFile(msg.into())
}

pub(crate) fn from_bytes(bytes: &[u8]) -> Result<IvfPqIndex> {
    let mut r = Reader::open(bytes, MAGIC)?;
    let version = r.u32()?;
    if version != VERSION {
        return Err(corrupt(format!("unsupported version {version}")));
    }
    let metric = Metric::from_byte(r.u8()?).ok_or_else(|| corrupt("unknown metric"))?;
    let dim = r.u32()? as usize;
    let nlist = r.u32()? as usize;
    if dim == 0 || nlist == 0 {
        return Err(corrupt("zero dimension or list count"));
    }
    let pq = match r.u8()? {
        0 => None,
        1 => {
            let m = r.u32()? as usize;
            let dsub = r.u32()? as usize;
            let ks = r.u32()? as usize;
            if m.checked_mul(dsub) != Some(dim) || ks == 0 || ks > 256 {
                return Err(corrupt("inconsistent PQ shape"));
            }
            let centroids = r.f32s(m * ks * dsub)?;
            Some(PqCodebook::from_parts(m, dsub, ks, centroids).map_err(|e| corrupt(e.to_string()))?)
        }
        other => return Err(corrupt(format!("bad PQ flag {other}"))),
    };
    let centroids = r.f32s(nlist.checked_mul(dim).ok_or_else(|| corrupt("size overflow"))?)?;
    let mut index = IvfPqIndex::empty(metric, CoarseQuantizer { dim, nlist, centroids }, pq, 1);

    let mut seen = HashSet::new();
    for cell in 0..nlist {
        let len = usize::try_from(r.u64()?).map_err(|_| corrupt("list length overflow"))?;
        let entry = 8 + index.pq.as_ref().map_or(dim * 4, |cb| cb.m);
        if len.checked_mul(entry).is_none_or(|need| need > r.remaining()) {
            return Err(corrupt("list length exceeds file size"));
        }
        let list = &mut index.lists[cell];
        for _ in 0..len {
            let id = r.u64()?;
            if !seen.insert(id) {
                return Err(corrupt(format!("duplicate id {id}")));
            }
            list.ids.push(id);
            match &mut list.payload {
                Payload::Full(v) => v.extend(r.f32s(dim)?),
                Payload::Codes(c) => {
                    let cb = index.pq.as_ref().expect("codes imply a codebook");
                    let code = r.bytes(cb.m)?;
                    if code.iter().any(|&b| usize::from(b) >= cb.ks) {
                        return Err(corrupt("code byte out of range"));
                    }
                    c.extend_from_slice(code);
                }
            }
        }
    }
    r.expect_end()?;
    index.seen = seen;
    Ok(index)
}
