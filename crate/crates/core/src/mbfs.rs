//! The MBFS binary format for sets of truth tables.
//!
//! Layout: `MBFS`, version byte `0x01`, one byte `n`, a little-endian `u64` member
//! count, then `words_for(n)` little-endian `u64` words per member.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::hypercube::MAX_VARS;
use crate::mbf::{is_monotone, words_for, MbfSet};

pub const MAGIC: &[u8; 4] = b"MBFS";
pub const VERSION: u8 = 1;
const HEADER_LEN: usize = 14;

/// Serializes a set to MBFS bytes.
pub fn write_to(set: &MbfSet, out: &mut impl Write) -> std::io::Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&[VERSION, set.n() as u8])?;
    out.write_all(&(set.len() as u64).to_le_bytes())?;
    for w in set.as_words() {
        out.write_all(&w.to_le_bytes())?;
    }
    Ok(())
}

/// Parses MBFS bytes; `origin` names the source in error messages.
pub fn read_from(input: &mut impl Read, origin: &Path) -> Result<MbfSet> {
    let bad = |reason: &str| Error::Format {
        path: origin.to_path_buf(),
        reason: reason.to_string(),
    };
    let mut header = [0u8; HEADER_LEN];
    input
        .read_exact(&mut header)
        .map_err(|_| bad("truncated header"))?;
    if &header[..4] != MAGIC {
        return Err(bad("bad magic bytes"));
    }
    if header[4] != VERSION {
        return Err(bad(&format!("unsupported version {}", header[4])));
    }
    let n = header[5] as usize;
    if n > MAX_VARS {
        return Err(bad(&format!("arity {n} out of range")));
    }
    let count = u64::from_le_bytes(header[6..].try_into().expect("8 bytes"));
    let width = words_for(n);
    let total = usize::try_from(count)
        .ok()
        .and_then(|c| c.checked_mul(width))
        .ok_or_else(|| bad("member count too large"))?;
    let mut bytes = Vec::new();
    input
        .read_to_end(&mut bytes)
        .map_err(|e| Error::io(origin, e))?;
    if bytes.len() != total * 8 {
        return Err(bad(&format!(
            "expected {} payload bytes, found {}",
            total * 8,
            bytes.len()
        )));
    }
    let words: Vec<u64> = bytes
        .chunks_exact(8)
        .map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    let set = MbfSet::from_words(n, words);
    if set.len() as u64 != count {
        return Err(bad("duplicate members"));
    }
    if let Some(i) = (0..set.len()).find(|&i| !is_monotone(set.table(i), n)) {
        return Err(bad(&format!("member {i} is not monotone")));
    }
    Ok(set)
}

/// Writes a set atomically: a temporary file in the same directory is renamed into place.
pub fn save(set: &MbfSet, path: &Path) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    {
        let mut out = BufWriter::new(tmp.as_file());
        write_to(set, &mut out).map_err(|e| Error::io(tmp.path(), e))?;
        out.flush().map_err(|e| Error::io(tmp.path(), e))?;
    }
    tmp.as_file()
        .sync_all()
        .map_err(|e| Error::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

pub fn load(path: &Path) -> Result<MbfSet> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_from(&mut BufReader::new(file), path)
}
