//! `PMTX` dense matrix container.
//!
//! ```text
//! offset  size        field
//! 0       4           magic "PMTX"
//! 4       4           u32 LE version (= 1)
//! 8       4           u32 LE rows
//! 12      4           u32 LE cols
//! 16      rows*cols*4 f32 LE, row-major
//! ```
//!
//! Descriptor series are stored with one row per time step; feature vectors
//! as a single row.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"PMTX";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

/// A row-major `f32` matrix as stored on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f32>,
}

impl Matrix {
    pub fn from_f64(rows: usize, cols: usize, values: &[f64]) -> Result<Self> {
        if rows * cols != values.len() {
            return Err(Error::invalid(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        Ok(Self {
            rows,
            cols,
            data: values.iter().map(|&v| v as f32).collect(),
        })
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.data.iter().map(|&v| f64::from(v)).collect()
    }

    pub fn encode(&self) -> Result<Vec<u8>> {
        let rows = u32::try_from(self.rows)
            .map_err(|_| Error::invalid(format!("{} rows do not fit in u32", self.rows)))?;
        let cols = u32::try_from(self.cols)
            .map_err(|_| Error::invalid(format!("{} cols do not fit in u32", self.cols)))?;
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len() * 4);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&rows.to_le_bytes());
        out.extend_from_slice(&cols.to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        Ok(out)
    }

    /// Parses a PMTX buffer. Rejects zero dimensions, short payloads, trailing
    /// bytes and non-finite entries.
    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < HEADER_LEN {
            return Err(Error::format(
                bytes.len() as u64,
                format!("truncated header: {} of {HEADER_LEN} bytes", bytes.len()),
            ));
        }
        if &bytes[0..4] != MAGIC {
            return Err(Error::format(0, "bad magic, expected \"PMTX\""));
        }
        let version = read_u32(bytes, 4);
        if version != VERSION {
            return Err(Error::format(4, format!("unsupported version {version}")));
        }
        let rows = read_u32(bytes, 8) as usize;
        let cols = read_u32(bytes, 12) as usize;
        if rows == 0 {
            return Err(Error::format(8, "matrix has zero rows"));
        }
        if cols == 0 {
            return Err(Error::format(12, "matrix has zero columns"));
        }
        let expected = rows
            .checked_mul(cols)
            .and_then(|n| n.checked_mul(4))
            .and_then(|n| n.checked_add(HEADER_LEN))
            .ok_or_else(|| Error::format(8, "declared size overflows"))?;
        if bytes.len() < expected {
            return Err(Error::format(
                bytes.len() as u64,
                format!(
                    "truncated payload: header declares {rows}x{cols} ({expected} bytes), file has {}",
                    bytes.len()
                ),
            ));
        }
        if bytes.len() > expected {
            return Err(Error::format(expected as u64, "trailing bytes after payload"));
        }
        let data: Vec<f32> = bytes[HEADER_LEN..]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::format(
                (HEADER_LEN + 4 * i) as u64,
                format!("non-finite value at row {}, col {}", i / cols, i % cols),
            ));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::decode(&bytes).map_err(|e| match e {
            Error::Format { offset, message } => Error::Format {
                offset,
                message: format!("{}: {message}", path.display()),
            },
            other => other,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        fs::write(path, self.encode()?).map_err(|e| Error::io(path, e))
    }
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let m = Matrix::from_f64(1, 2, &[1.0, -0.5]).unwrap();
        let b = m.encode().unwrap();
        assert_eq!(b.len(), 24);
        assert_eq!(&b[0..4], b"PMTX");
        assert_eq!(&b[4..8], &[1, 0, 0, 0]);
        assert_eq!(&b[8..12], &[1, 0, 0, 0]);
        assert_eq!(&b[12..16], &[2, 0, 0, 0]);
        assert_eq!(&b[16..20], &1.0f32.to_le_bytes());
        assert_eq!(Matrix::decode(&b).unwrap(), m);
    }

    #[test]
    fn rejects_malformed() {
        let good = Matrix::from_f64(2, 2, &[0.0; 4]).unwrap().encode().unwrap();

        let mut bad = good.clone();
        bad[0] = b'X';
        assert!(matches!(Matrix::decode(&bad), Err(Error::Format { offset: 0, .. })));

        let mut bad = good.clone();
        bad[4] = 2;
        assert!(matches!(Matrix::decode(&bad), Err(Error::Format { offset: 4, .. })));

        let mut zero_rows = good.clone();
        zero_rows[8..12].copy_from_slice(&0u32.to_le_bytes());
        assert!(matches!(Matrix::decode(&zero_rows[..16]), Err(Error::Format { offset: 8, .. })));

        assert!(matches!(
            Matrix::decode(&good[..good.len() - 1]),
            Err(Error::Format { message, .. }) if message.contains("truncated")
        ));

        let mut big = good.clone();
        big[8..12].copy_from_slice(&100u32.to_le_bytes());
        assert!(matches!(
            Matrix::decode(&big),
            Err(Error::Format { message, .. }) if message.contains("truncated")
        ));

        let mut nan = good.clone();
        nan[16..20].copy_from_slice(&f32::NAN.to_le_bytes());
        assert!(matches!(Matrix::decode(&nan), Err(Error::Format { offset: 16, .. })));

        assert!(Matrix::decode(&good[..10]).is_err());
    }
}
