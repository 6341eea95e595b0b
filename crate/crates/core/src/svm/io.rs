//! `PSVM` model container, little-endian throughout:
//!
//! ```text
//! "PSVM" | u32 version
//! u8 kernel (0 = linear, 1 = chi2) | f64 gamma (0 for linear) | f64 c_reg
//! u32 class count | per class: u32 byte length, UTF-8 label
//! u32 dim | u32 vector count | vectors as f32, row-major
//! per class: f64 bias | u32 support count | (u32 vector index, f64 coef) pairs
//! ```

use std::fs;
use std::path::Path;

use super::{BinaryModel, Gamma, KernelSpec, SvmModel};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &[u8; 4] = b"PSVM";
pub const MODEL_VERSION: u32 = 1;

fn u32_of(n: usize, what: &str) -> Result<u32> {
    u32::try_from(n).map_err(|_| Error::invalid(format!("{what} {n} does not fit in u32")))
}

pub fn encode_model(model: &SvmModel) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    let (kind, gamma) = match model.kernel {
        KernelSpec::Linear => (0u8, 0.0),
        KernelSpec::Chi2 {
            gamma: Gamma::Fixed(g),
        } => (1u8, g),
        KernelSpec::Chi2 { gamma: Gamma::Auto } => {
            return Err(Error::invalid("model kernel has unresolved gamma"))
        }
    };
    out.push(kind);
    out.extend_from_slice(&gamma.to_le_bytes());
    out.extend_from_slice(&model.c_reg.to_le_bytes());

    out.extend_from_slice(&u32_of(model.classes.len(), "class count")?.to_le_bytes());
    for c in &model.classes {
        out.extend_from_slice(&u32_of(c.len(), "label length")?.to_le_bytes());
        out.extend_from_slice(c.as_bytes());
    }

    out.extend_from_slice(&u32_of(model.dim, "dimension")?.to_le_bytes());
    out.extend_from_slice(&u32_of(model.vectors.len(), "vector count")?.to_le_bytes());
    for v in &model.vectors {
        for &x in v {
            out.extend_from_slice(&(x as f32).to_le_bytes());
        }
    }

    for b in &model.binaries {
        out.extend_from_slice(&b.bias.to_le_bytes());
        out.extend_from_slice(&u32_of(b.support.len(), "support count")?.to_le_bytes());
        for (&s, &c) in b.support.iter().zip(&b.coef) {
            out.extend_from_slice(&u32_of(s, "support index")?.to_le_bytes());
            out.extend_from_slice(&c.to_le_bytes());
        }
    }
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.bytes.len() - self.pos < n {
            return Err(Error::format(
                self.pos as u64,
                format!("truncated while reading {what}"),
            ));
        }
        let s = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let b = self.take(4, what)?;
        Ok(u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn f32(&mut self, what: &str) -> Result<f32> {
        let b = self.take(4, what)?;
        Ok(f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        let b = self.take(8, what)?;
        let mut a = [0u8; 8];
        a.copy_from_slice(b);
        Ok(f64::from_le_bytes(a))
    }

    fn finite_f64(&mut self, what: &str) -> Result<f64> {
        let at = self.pos;
        let v = self.f64(what)?;
        if !v.is_finite() {
            return Err(Error::format(at as u64, format!("non-finite {what}")));
        }
        Ok(v)
    }
}

pub fn decode_model(bytes: &[u8]) -> Result<SvmModel> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(4, "magic")? != MODEL_MAGIC {
        return Err(Error::format(0, "bad magic, expected \"PSVM\""));
    }
    let version = r.u32("version")?;
    if version != MODEL_VERSION {
        return Err(Error::format(4, format!("unsupported version {version}")));
    }
    let kind_at = r.pos;
    let kind = r.u8("kernel kind")?;
    let gamma = r.finite_f64("gamma")?;
    let kernel = match kind {
        0 => KernelSpec::Linear,
        1 if gamma > 0.0 => KernelSpec::Chi2 {
            gamma: Gamma::Fixed(gamma),
        },
        1 => return Err(Error::format(kind_at as u64 + 1, "chi2 gamma must be > 0")),
        k => return Err(Error::format(kind_at as u64, format!("unknown kernel kind {k}"))),
    };
    let c_reg = r.finite_f64("c_reg")?;

    let n_classes = r.u32("class count")? as usize;
    if n_classes < 2 {
        return Err(Error::format(r.pos as u64 - 4, "model needs at least two classes"));
    }
    let mut classes = Vec::with_capacity(n_classes);
    for _ in 0..n_classes {
        let len = r.u32("label length")? as usize;
        let at = r.pos;
        let raw = r.take(len, "label")?;
        let s = std::str::from_utf8(raw)
            .map_err(|_| Error::format(at as u64, "label is not UTF-8"))?;
        classes.push(s.to_string());
    }

    let dim = r.u32("dimension")? as usize;
    let n_vec = r.u32("vector count")? as usize;
    let payload = n_vec
        .checked_mul(dim)
        .and_then(|x| x.checked_mul(4))
        .ok_or_else(|| Error::format(r.pos as u64, "vector block size overflows"))?;
    if bytes.len() - r.pos < payload {
        return Err(Error::format(r.pos as u64, "truncated vector block"));
    }
    let mut vectors = Vec::with_capacity(n_vec);
    for _ in 0..n_vec {
        let mut v = Vec::with_capacity(dim);
        for _ in 0..dim {
            let at = r.pos;
            let x = r.f32("vector entry")?;
            if !x.is_finite() {
                return Err(Error::format(at as u64, "non-finite vector entry"));
            }
            v.push(f64::from(x));
        }
        vectors.push(v);
    }

    let mut binaries = Vec::with_capacity(n_classes);
    for _ in 0..n_classes {
        let bias = r.finite_f64("bias")?;
        let n_sv = r.u32("support count")? as usize;
        let mut support = Vec::with_capacity(n_sv.min(n_vec));
        let mut coef = Vec::with_capacity(n_sv.min(n_vec));
        for _ in 0..n_sv {
            let at = r.pos;
            let s = r.u32("support index")? as usize;
            if s >= n_vec {
                return Err(Error::format(at as u64, format!("support index {s} out of range")));
            }
            support.push(s);
            coef.push(r.finite_f64("coefficient")?);
        }
        binaries.push(BinaryModel {
            support,
            coef,
            bias,
        });
    }
    if r.pos != bytes.len() {
        return Err(Error::format(r.pos as u64, "trailing bytes after model"));
    }
    Ok(SvmModel {
        classes,
        kernel,
        c_reg,
        dim,
        vectors,
        binaries,
    })
}

pub fn write_model(model: &SvmModel, path: &Path) -> Result<()> {
    fs::write(path, encode_model(model)?).map_err(|e| Error::io(path, e))
}

pub fn read_model(path: &Path) -> Result<SvmModel> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(&bytes)
}
