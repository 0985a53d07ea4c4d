//! Versioned binary container for built graphs.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "POPCLUST" | version u32
//! user count u64   | per user: length u32, UTF-8 bytes
//! item count u64   | per item: length u32, UTF-8 bytes
//! edge count u64   | per edge: user u32, item u32, rating f64, timestamp i64
//! duplicates u64
//! ```
//!
//! Adjacency is rebuilt on load.

use std::io::{self, Read, Write};

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::graph::{Edge, ItemIdx, TemporalBipartiteGraph, UserIdx};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"POPCLUST";
pub const SNAPSHOT_VERSION: u32 = 1;

const MAX_ID_LEN: u32 = 1 << 20;

pub fn save_snapshot(graph: &TemporalBipartiteGraph, mut out: impl Write) -> Result<()> {
    out.write_all(SNAPSHOT_MAGIC)?;
    out.write_u32::<LittleEndian>(SNAPSHOT_VERSION)?;
    for ids in [graph.user_ids(), graph.item_ids()] {
        out.write_u64::<LittleEndian>(ids.len() as u64)?;
        for id in ids {
            out.write_u32::<LittleEndian>(id.len() as u32)?;
            out.write_all(id.as_bytes())?;
        }
    }
    out.write_u64::<LittleEndian>(graph.edge_count() as u64)?;
    for e in graph.edges() {
        out.write_u32::<LittleEndian>(e.user.0)?;
        out.write_u32::<LittleEndian>(e.item.0)?;
        out.write_f64::<LittleEndian>(e.rating)?;
        out.write_i64::<LittleEndian>(e.timestamp)?;
    }
    out.write_u64::<LittleEndian>(graph.duplicates() as u64)?;
    out.flush()?;
    Ok(())
}

pub fn load_snapshot(mut input: impl Read) -> Result<TemporalBipartiteGraph> {
    let mut magic = [0u8; 8];
    read(input.read_exact(&mut magic))?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(Error::Snapshot("bad magic bytes".into()));
    }
    let version = read(input.read_u32::<LittleEndian>())?;
    if version != SNAPSHOT_VERSION {
        return Err(Error::Snapshot(format!(
            "unsupported format version {version}, expected {SNAPSHOT_VERSION}"
        )));
    }
    let user_ids = read_ids(&mut input)?;
    let item_ids = read_ids(&mut input)?;
    let edge_count = read(input.read_u64::<LittleEndian>())?;
    let mut edges = Vec::with_capacity(edge_count.min(1 << 24) as usize);
    for _ in 0..edge_count {
        edges.push(Edge {
            user: UserIdx(read(input.read_u32::<LittleEndian>())?),
            item: ItemIdx(read(input.read_u32::<LittleEndian>())?),
            rating: read(input.read_f64::<LittleEndian>())?,
            timestamp: read(input.read_i64::<LittleEndian>())?,
        });
    }
    let duplicates = read(input.read_u64::<LittleEndian>())? as usize;
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Snapshot("trailing bytes after snapshot".into()));
    }
    TemporalBipartiteGraph::from_parts(user_ids, item_ids, edges, duplicates)
        .map_err(|e| Error::Snapshot(format!("inconsistent contents: {e}")))
}

fn read<T>(r: io::Result<T>) -> Result<T> {
    r.map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => Error::Snapshot("truncated stream".into()),
        _ => Error::Io(e),
    })
}

fn read_ids(input: &mut impl Read) -> Result<Vec<String>> {
    let count = read(input.read_u64::<LittleEndian>())?;
    let mut ids = Vec::with_capacity(count.min(1 << 20) as usize);
    for _ in 0..count {
        let len = read(input.read_u32::<LittleEndian>())?;
        if len > MAX_ID_LEN {
            return Err(Error::Snapshot(format!("id length {len} exceeds limit")));
        }
        let mut buf = vec![0u8; len as usize];
        read(input.read_exact(&mut buf))?;
        ids.push(String::from_utf8(buf).map_err(|_| Error::Snapshot("id is not UTF-8".into()))?);
    }
    Ok(ids)
}
