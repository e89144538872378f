//! `AOLW1` weight snapshots.
//!
//! Layout, all integers and floats little-endian:
//!
//! ```text
//! "AOLW1"                      5 bytes magic
//! arch_id length               u8
//! arch_id                      UTF-8 bytes
//! t_obs, t_pred, hidden_size   u32 each
//! coord_scale                  f64
//! parameter count              u64
//! parameters                   f64 * count, flat vector order
//! ```
//!
//! Trailing bytes after the last parameter are rejected.

use std::path::Path;

use crate::error::{AolError, Result};
use crate::predictor::{param_count, Arch, PredictorSpec, WeightVector};

pub const MAGIC: &[u8; 5] = b"AOLW1";

pub fn encode_weights(w: &WeightVector, spec: &PredictorSpec) -> Result<Vec<u8>> {
    spec.validate()?;
    w.check_matches(spec)?;
    let arch = spec.arch.as_str().as_bytes();
    let to_u32 = |v: usize, name: &str| {
        u32::try_from(v).map_err(|_| AolError::contract(format!("{name} does not fit in u32")))
    };
    let mut buf = Vec::with_capacity(MAGIC.len() + 1 + arch.len() + 28 + 8 * w.len());
    buf.extend_from_slice(MAGIC);
    buf.push(arch.len() as u8);
    buf.extend_from_slice(arch);
    buf.extend_from_slice(&to_u32(spec.t_obs, "t_obs")?.to_le_bytes());
    buf.extend_from_slice(&to_u32(spec.t_pred, "t_pred")?.to_le_bytes());
    buf.extend_from_slice(&to_u32(spec.hidden_size, "hidden_size")?.to_le_bytes());
    buf.extend_from_slice(&spec.coord_scale.to_le_bytes());
    buf.extend_from_slice(&(w.len() as u64).to_le_bytes());
    for v in w.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    Ok(buf)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(AolError::Parse {
                offset: self.buf.len(),
                message: format!("truncated while reading {what}"),
            });
        }
        let out = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn array<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        Ok(self.take(N, what)?.try_into().expect("length checked"))
    }

    fn u32(&mut self, what: &str) -> Result<usize> {
        Ok(u32::from_le_bytes(self.array(what)?) as usize)
    }

    fn fail<T>(&self, at: usize, message: impl Into<String>) -> Result<T> {
        Err(AolError::Parse {
            offset: at,
            message: message.into(),
        })
    }
}

pub fn decode_weights(buf: &[u8]) -> Result<(WeightVector, PredictorSpec)> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(MAGIC.len(), "magic")? != MAGIC {
        return r.fail(0, "bad magic, expected AOLW1");
    }
    let arch_len = r.array::<1>("arch_id length")?[0] as usize;
    let arch_at = r.pos;
    let arch_bytes = r.take(arch_len, "arch_id")?;
    let arch: Arch = match std::str::from_utf8(arch_bytes).ok().map(str::parse) {
        Some(Ok(a)) => a,
        _ => return r.fail(arch_at, "unknown or non-UTF-8 arch_id"),
    };
    let spec_at = r.pos;
    let spec = PredictorSpec {
        arch,
        t_obs: r.u32("t_obs")?,
        t_pred: r.u32("t_pred")?,
        hidden_size: r.u32("hidden_size")?,
        coord_scale: f64::from_le_bytes(r.array("coord_scale")?),
    };
    if let Err(e) = spec.validate() {
        return r.fail(spec_at, format!("invalid predictor header: {e}"));
    }
    let count_at = r.pos;
    let count = u64::from_le_bytes(r.array("parameter count")?);
    let expected = param_count(&spec)?;
    if count != expected as u64 {
        return r.fail(
            count_at,
            format!("parameter count {count} does not match {arch} ({expected})"),
        );
    }
    let mut values = Vec::with_capacity(expected);
    for i in 0..expected {
        let at = r.pos;
        let v = f64::from_le_bytes(r.array(&format!("parameter {i}"))?);
        if !v.is_finite() {
            return r.fail(at, format!("parameter {i} is not finite"));
        }
        values.push(v);
    }
    if r.pos != buf.len() {
        return r.fail(r.pos, format!("{} trailing bytes", buf.len() - r.pos));
    }
    Ok((WeightVector::new(&spec, values)?, spec))
}

pub fn save_weights(w: &WeightVector, spec: &PredictorSpec, path: &Path) -> Result<()> {
    let bytes = encode_weights(w, spec)?;
    std::fs::write(path, bytes).map_err(|e| AolError::io(path, e))
}

pub fn load_weights(path: &Path) -> Result<(WeightVector, PredictorSpec)> {
    let bytes = std::fs::read(path).map_err(|e| AolError::io(path, e))?;
    decode_weights(&bytes)
}
