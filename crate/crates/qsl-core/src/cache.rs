use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const MAGIC: &[u8; 4] = b"QSLC";
const VERSION: u32 = 1;

/// Writes eigenvalues keyed by the Hamiltonian fingerprint. Layout: magic,
/// format version (u32 LE), fingerprint length (u64 LE) and UTF-8 bytes,
/// value count (u64 LE), then the values as little-endian f64. The write
/// goes through a sibling temp file so a crash never leaves a half-written
/// cache entry.
pub fn store_eigenvalues(path: &Path, fingerprint: &str, values: &[f64]) -> Result<()> {
    let fp = fingerprint.as_bytes();
    let mut bytes = Vec::with_capacity(24 + fp.len() + 8 * values.len());
    bytes.extend_from_slice(MAGIC);
    bytes.extend_from_slice(&VERSION.to_le_bytes());
    bytes.extend_from_slice(&(fp.len() as u64).to_le_bytes());
    bytes.extend_from_slice(fp);
    bytes.extend_from_slice(&(values.len() as u64).to_le_bytes());
    for v in values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, &bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let slice = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(slice)
            }
            None => Err(Error::Cache("file is truncated".into())),
        }
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Reads eigenvalues back if the file exists and matches `fingerprint`.
/// A missing file, an older format version, or a different fingerprint is a
/// miss (`Ok(None)`); structurally broken files are an error.
pub fn load_eigenvalues(path: &Path, fingerprint: &str) -> Result<Option<Vec<f64>>> {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let mut r = Reader {
        bytes: &bytes,
        pos: 0,
    };
    if r.take(4)? != MAGIC {
        return Err(Error::Cache("wrong magic bytes".into()));
    }
    if r.u32()? != VERSION {
        return Ok(None);
    }
    let fp_len = r.u64()? as usize;
    let fp = r.take(fp_len)?;
    if fp != fingerprint.as_bytes() {
        return Ok(None);
    }
    let count = r.u64()? as usize;
    let mut values = Vec::with_capacity(count);
    for _ in 0..count {
        values.push(f64::from_le_bytes(r.take(8)?.try_into().unwrap()));
    }
    if r.pos != bytes.len() {
        return Err(Error::Cache("trailing bytes after the value block".into()));
    }
    Ok(Some(values))
}
