//! Binary codebook files.
//!
//! Layout, all little-endian: magic `OARC`, `u32` version, `u32` D, D_c, N,
//! `u32` entity, attribute and predicate counts, `u64` seed, then the `f64`
//! matrices row-major in order entity, attribute, predicate, pair,
//! projection.

use std::fs;
use std::io::{self, Read, Write};
use std::path::Path;

use oar_core::codec::{Codebook, CodebookParams, Matrix};

use crate::Error;

pub const MAGIC: [u8; 4] = *b"OARC";
pub const VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CodebookFileError {
    #[error("not a codebook file")]
    Magic,
    #[error("unsupported codebook version {0}")]
    Version(u32),
    #[error("truncated codebook file")]
    Truncated,
    #[error("trailing bytes after codebook")]
    Trailing,
    #[error("codebook header: {0}")]
    Header(&'static str),
    #[error("invalid codebook: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn write_codebook<W: Write>(mut w: W, cb: &Codebook) -> io::Result<()> {
    let p = cb.params();
    let sizes = cb.sizes();
    w.write_all(&MAGIC)?;
    for v in [VERSION, p.latent_dim as u32, p.channel_dim as u32, p.slots as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    for v in [sizes.entities, sizes.attributes, sizes.predicates] {
        w.write_all(&(v as u32).to_le_bytes())?;
    }
    w.write_all(&p.seed.to_le_bytes())?;
    for m in [cb.entity_codewords(), cb.attribute_codewords(), cb.predicate_codewords(), cb.pair_codes(), cb.projection()] {
        for x in m.as_slice() {
            w.write_all(&x.to_le_bytes())?;
        }
    }
    w.flush()
}

struct Cursor<'a>(&'a [u8]);

impl Cursor<'_> {
    fn take<const K: usize>(&mut self) -> Result<[u8; K], CodebookFileError> {
        if self.0.len() < K {
            return Err(CodebookFileError::Truncated);
        }
        let (head, rest) = self.0.split_at(K);
        self.0 = rest;
        Ok(head.try_into().expect("length checked"))
    }

    fn u32(&mut self) -> Result<usize, CodebookFileError> {
        Ok(u32::from_le_bytes(self.take()?) as usize)
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Result<Matrix, CodebookFileError> {
        let len = rows.checked_mul(cols).ok_or(CodebookFileError::Header("matrix too large"))?;
        if self.0.len() / 8 < len {
            return Err(CodebookFileError::Truncated);
        }
        let data = (0..len).map(|_| self.take().map(f64::from_le_bytes)).collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::from_vec(rows, cols, data))
    }
}

/// Parses and validates a codebook image.
pub fn codebook_from_bytes(bytes: &[u8]) -> Result<Codebook, CodebookFileError> {
    let mut c = Cursor(bytes);
    if c.take::<4>()? != MAGIC {
        return Err(CodebookFileError::Magic);
    }
    let version = c.u32()? as u32;
    if version != VERSION {
        return Err(CodebookFileError::Version(version));
    }
    let (d, dc, n) = (c.u32()?, c.u32()?, c.u32()?);
    let (ne, na, np) = (c.u32()?, c.u32()?, c.u32()?);
    let seed = u64::from_le_bytes(c.take()?);
    if d == 0 || d % 4 != 0 || dc == 0 || n == 0 {
        return Err(CodebookFileError::Header("bad geometry"));
    }
    let entity = c.matrix(ne, d)?;
    let attribute = c.matrix(na, d)?;
    let predicate = c.matrix(np, d / 2)?;
    let pair = c.matrix(n, d / 4)?;
    let projection = c.matrix(dc, d)?;
    if !c.0.is_empty() {
        return Err(CodebookFileError::Trailing);
    }
    let params = CodebookParams { latent_dim: d, channel_dim: dc, slots: n, seed };
    Codebook::from_parts(params, entity, attribute, predicate, pair, projection)
        .map_err(|e| CodebookFileError::Invalid(e.to_string()))
}

pub fn read_codebook<R: Read>(mut r: R) -> Result<Codebook, CodebookFileError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    codebook_from_bytes(&bytes)
}

pub fn save_codebook(path: &Path, cb: &Codebook) -> Result<(), Error> {
    let mut bytes = Vec::new();
    write_codebook(&mut bytes, cb).expect("writing to memory");
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_codebook(path: &Path) -> Result<Codebook, Error> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    codebook_from_bytes(&bytes).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}
