//! Binary cache for built hierarchies.
//!
//! Layout (little endian): magic `TDCH`, format version (u32), SHA-256 of the
//! scalar graph the hierarchy was built from, then the rank array and both
//! arc lists. A file whose version or hash differs is ignored.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{ArcLists, ChArc, ChIndex, ScalarGraph, Via};
use crate::error::{Error, Result};
use crate::scalar::Time;

const MAGIC: &[u8; 4] = b"TDCH";
pub const CACHE_VERSION: u32 = 1;

pub fn save_cache<T: Time>(ch: &ChIndex<T>, graph: &ScalarGraph<T>, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    out.write_all(MAGIC)?;
    out.write_all(&CACHE_VERSION.to_le_bytes())?;
    out.write_all(&graph.content_hash())?;
    write_u32s(&mut out, &ch.rank)?;
    for lists in [&ch.up, &ch.down] {
        write_u32s(&mut out, &lists.first)?;
        out.write_all(&(lists.arcs.len() as u64).to_le_bytes())?;
        for arc in &lists.arcs {
            out.write_all(&arc.node.to_le_bytes())?;
            out.write_all(&arc.weight.to_f64().to_bits().to_le_bytes())?;
            let (tag, a, b, c) = match arc.via {
                Via::Original(e) => (0u8, e, 0, 0),
                Via::Shortcut { middle, down_arc, up_arc } => (1u8, middle, down_arc, up_arc),
            };
            out.write_all(&[tag])?;
            for x in [a, b, c] {
                out.write_all(&x.to_le_bytes())?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

/// Loads a cached hierarchy if the file exists and was built from `graph`.
pub fn load_cached<T: Time>(graph: &ScalarGraph<T>, path: impl AsRef<Path>) -> Result<Option<ChIndex<T>>> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut r = Reader { bytes: &bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(Error::Cache("not a hierarchy cache file".into()));
    }
    if r.u32()? != CACHE_VERSION || r.take(32)? != graph.content_hash() {
        return Ok(None);
    }
    let rank = r.u32s()?;
    let mut lists = Vec::with_capacity(2);
    for _ in 0..2 {
        let first = r.u32s()?;
        let count = r.u64()? as usize;
        let mut arcs = Vec::with_capacity(count.min(bytes.len()));
        for _ in 0..count {
            let node = r.u32()?;
            let weight = T::from_ticks_f64(f64::from_bits(r.u64()?));
            let tag = r.take(1)?[0];
            let (a, b, c) = (r.u32()?, r.u32()?, r.u32()?);
            let via = match tag {
                0 => Via::Original(a),
                1 => Via::Shortcut {
                    middle: a,
                    down_arc: b,
                    up_arc: c,
                },
                _ => return Err(Error::Cache(format!("bad arc tag {tag}"))),
            };
            arcs.push(ChArc { node, weight, via });
        }
        lists.push(ArcLists { first, arcs });
    }
    if r.pos != bytes.len() {
        return Err(Error::Cache("trailing bytes".into()));
    }
    let down = lists.pop().unwrap();
    let up = lists.pop().unwrap();
    let n = graph.node_count();
    if rank.len() != n || up.first.len() != n + 1 || down.first.len() != n + 1 {
        return Err(Error::Cache("size mismatch".into()));
    }
    Ok(Some(ChIndex { rank, up, down }))
}

fn write_u32s(out: &mut impl Write, values: &[u32]) -> std::io::Result<()> {
    out.write_all(&(values.len() as u64).to_le_bytes())?;
    for v in values {
        out.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| Error::Cache("truncated file".into()))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn u32s(&mut self) -> Result<Vec<u32>> {
        let len = self.u64()? as usize;
        if len > self.bytes.len() / 4 {
            return Err(Error::Cache("truncated file".into()));
        }
        (0..len).map(|_| self.u32()).collect()
    }
}
