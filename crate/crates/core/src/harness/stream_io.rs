//! JSON-lines stream export: one [`Sample`] object per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{AolError, Result};
use crate::trajcore::Sample;

pub fn write_jsonl<W: Write>(samples: &[Sample], mut out: W) -> Result<()> {
    for s in samples {
        serde_json::to_writer(&mut out, s)?;
        out.write_all(b"\n")
            .map_err(|e| AolError::io("<stream>", e))?;
    }
    Ok(())
}

pub fn save_stream(samples: &[Sample], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| AolError::io(path, e))?;
    let mut w = BufWriter::new(file);
    write_jsonl(samples, &mut w)?;
    w.flush().map_err(|e| AolError::io(path, e))
}

pub fn load_stream(path: &Path) -> Result<Vec<Sample>> {
    let file = File::open(path).map_err(|e| AolError::io(path, e))?;
    let mut out = Vec::new();
    for line in BufReader::new(file).lines() {
        let line = line.map_err(|e| AolError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}
