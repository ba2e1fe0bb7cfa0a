//! On-disk stream formats.
//!
//! Binary layout, all little-endian:
//!
//! ```text
//! offset 0   magic  "PDSK"
//! offset 4   u32    format version (1)
//! offset 8   u64    universe size n
//! offset 16  u32 * m  items
//! ```
//!
//! The text format is one decimal id per line; blank lines are skipped and
//! the universe size is the largest id seen.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{ElementId, StreamView};
use crate::error::{Error, Result};

pub const MAGIC: [u8; 4] = *b"PDSK";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: u64 = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Header {
    pub version: u32,
    pub universe: u64,
}

pub fn write_binary<W: Write>(mut w: W, stream: &StreamView) -> Result<()> {
    w.write_all(&MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&stream.universe().to_le_bytes())?;
    for id in stream.items() {
        w.write_all(&id.0.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_binary_file(path: &Path, stream: &StreamView) -> Result<()> {
    write_binary(BufWriter::new(File::create(path)?), stream)
}

fn read_header<R: Read>(r: &mut R) -> Result<Header> {
    let mut buf = [0u8; HEADER_LEN as usize];
    r.read_exact(&mut buf).map_err(|e| match e.kind() {
        io::ErrorKind::UnexpectedEof => Error::Format("truncated header".into()),
        _ => Error::Io(e),
    })?;
    if buf[..4] != MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(buf[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let universe = u64::from_le_bytes(buf[8..16].try_into().unwrap());
    Ok(Header { version, universe })
}

/// Single-pass reader over a binary stream; validates every item.
pub struct BinaryReader<R> {
    inner: R,
    header: Header,
    remaining: u64,
    position: usize,
}

impl<R: Read> BinaryReader<R> {
    /// `payload_len` is the number of bytes following the header.
    pub fn new(mut inner: R, payload_len: u64) -> Result<Self> {
        let header = read_header(&mut inner)?;
        if !payload_len.is_multiple_of(4) {
            return Err(Error::Format(format!(
                "payload of {payload_len} bytes is not a whole number of u32 items"
            )));
        }
        Ok(BinaryReader {
            inner,
            header,
            remaining: payload_len / 4,
            position: 0,
        })
    }

    pub fn header(&self) -> Header {
        self.header
    }

    /// Items not yet read.
    pub fn remaining(&self) -> u64 {
        self.remaining
    }
}

impl<R: Read> Iterator for BinaryReader<R> {
    type Item = Result<ElementId>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.remaining == 0 {
            return None;
        }
        let mut buf = [0u8; 4];
        if let Err(e) = self.inner.read_exact(&mut buf) {
            self.remaining = 0;
            return Some(Err(e.into()));
        }
        self.remaining -= 1;
        let v = u32::from_le_bytes(buf);
        let position = self.position;
        self.position += 1;
        if v == 0 || u64::from(v) > self.header.universe {
            self.remaining = 0;
            return Some(Err(Error::OutOfRange {
                item: u64::from(v),
                position,
                universe: self.header.universe,
            }));
        }
        Some(Ok(ElementId(v)))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.remaining as usize;
        (n, Some(n))
    }
}

pub fn open_binary(path: &Path) -> Result<BinaryReader<BufReader<File>>> {
    let file = File::open(path)?;
    let len = file.metadata()?.len();
    if len < HEADER_LEN {
        return Err(Error::Format("truncated header".into()));
    }
    BinaryReader::new(BufReader::new(file), len - HEADER_LEN)
}

pub fn read_binary<R: Read>(r: R, payload_len: u64) -> Result<StreamView> {
    let reader = BinaryReader::new(r, payload_len)?;
    let universe = reader.header().universe;
    let items = reader.collect::<Result<Vec<_>>>()?;
    StreamView::from_ids(items, universe)
}

pub fn read_text<R: BufRead>(r: R) -> Result<StreamView> {
    let mut items = Vec::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v: u32 = trimmed
            .parse()
            .map_err(|_| Error::Format(format!("line {}: not an id: {trimmed:?}", lineno + 1)))?;
        if v == 0 {
            return Err(Error::Format(format!("line {}: ids start at 1", lineno + 1)));
        }
        items.push(v);
    }
    let universe = u64::from(items.iter().copied().max().unwrap_or(1));
    StreamView::new(items, universe)
}

/// Reads a stream file, choosing the format by its leading magic bytes.
pub fn read_stream_file(path: &Path) -> Result<StreamView> {
    let mut file = File::open(path)?;
    let len = file.metadata()?.len();
    let mut magic = [0u8; 4];
    let sniffed = file.read(&mut magic)?;
    drop(file);
    if sniffed == 4 && magic == MAGIC {
        let reader = open_binary(path)?;
        let universe = reader.header().universe;
        let items = reader.collect::<Result<Vec<_>>>()?;
        debug_assert_eq!(items.len() as u64, (len - HEADER_LEN) / 4);
        StreamView::from_ids(items, universe)
    } else {
        read_text(BufReader::new(File::open(path)?))
    }
}

pub fn write_text<W: Write>(mut w: W, stream: &StreamView) -> Result<()> {
    for id in stream.items() {
        writeln!(w, "{}", id.0)?;
    }
    w.flush()?;
    Ok(())
}
