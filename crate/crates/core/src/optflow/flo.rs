//! Middlebury `.flo` files: float tag 202021.25 ("PIEH"), i32 width, i32
//! height, then interleaved `(u, v)` f32 pairs, row-major, little-endian.

use std::fs;
use std::path::Path;

use super::FlowField;
use crate::error::{Error, Result};

pub const FLO_TAG: f32 = 202021.25;
const HEADER_LEN: usize = 12;

pub fn encode_flo(flow: &FlowField) -> Result<Vec<u8>> {
    let w = i32::try_from(flow.width())
        .map_err(|_| Error::invalid("flow width does not fit in i32"))?;
    let h = i32::try_from(flow.height())
        .map_err(|_| Error::invalid("flow height does not fit in i32"))?;
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * flow.u().len());
    out.extend_from_slice(&FLO_TAG.to_le_bytes());
    out.extend_from_slice(&w.to_le_bytes());
    out.extend_from_slice(&h.to_le_bytes());
    for (u, v) in flow.u().iter().zip(flow.v()) {
        out.extend_from_slice(&(*u as f32).to_le_bytes());
        out.extend_from_slice(&(*v as f32).to_le_bytes());
    }
    Ok(out)
}

pub fn decode_flo(bytes: &[u8]) -> Result<FlowField> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::format(
            bytes.len() as u64,
            format!("truncated header: {} of {HEADER_LEN} bytes", bytes.len()),
        ));
    }
    let word = |at: usize| [bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]];
    if f32::from_le_bytes(word(0)) != FLO_TAG {
        return Err(Error::format(0, "bad magic, expected \"PIEH\""));
    }
    let w = i32::from_le_bytes(word(4));
    let h = i32::from_le_bytes(word(8));
    if w <= 0 {
        return Err(Error::format(4, format!("nonpositive width {w}")));
    }
    if h <= 0 {
        return Err(Error::format(8, format!("nonpositive height {h}")));
    }
    let (w, h) = (w as usize, h as usize);
    let expected = HEADER_LEN + 8 * w * h;
    if bytes.len() < expected {
        return Err(Error::format(
            bytes.len() as u64,
            format!("truncated payload: {w}x{h} needs {expected} bytes, got {}", bytes.len()),
        ));
    }
    if bytes.len() > expected {
        return Err(Error::format(expected as u64, "trailing bytes after payload"));
    }
    let mut u = Vec::with_capacity(w * h);
    let mut v = Vec::with_capacity(w * h);
    for (k, pair) in bytes[HEADER_LEN..].chunks_exact(8).enumerate() {
        let cu = f32::from_le_bytes([pair[0], pair[1], pair[2], pair[3]]);
        let cv = f32::from_le_bytes([pair[4], pair[5], pair[6], pair[7]]);
        if !cu.is_finite() || !cv.is_finite() {
            return Err(Error::format(
                (HEADER_LEN + 8 * k) as u64,
                "non-finite flow component",
            ));
        }
        u.push(f64::from(cu));
        v.push(f64::from(cv));
    }
    FlowField::new(w, h, u, v)
}

pub fn write_flo(flow: &FlowField, path: &Path) -> Result<()> {
    fs::write(path, encode_flo(flow)?).map_err(|e| Error::io(path, e))
}

pub fn read_flo(path: &Path) -> Result<FlowField> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_flo(&bytes).map_err(|e| match e {
        Error::Format { offset, message } => Error::Format {
            offset,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}
