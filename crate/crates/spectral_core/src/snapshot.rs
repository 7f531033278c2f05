//! Binary snapshot format for coefficient fields.
//!
//! Layout: 8-byte magic, N as little-endian u32, component count as u32, then
//! for each component the (re, im) f64 pairs of every retained wavevector in
//! lexicographic (k1, k2, k3) order. A JSON sidecar `<path>.json` carries the
//! grid size, component count, and caller metadata.

use crate::{modes, SpectralError, SpectralScalar};
use num_complex::Complex64;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"PELABFS1";

pub fn write_snapshot(
    path: &Path,
    components: &[&SpectralScalar],
    metadata: &serde_json::Value,
) -> Result<(), SpectralError> {
    let n = match components.first() {
        Some(c) => c.n(),
        None => return Err(SpectralError::BadSnapshot("no components".into())),
    };
    for c in components {
        if c.n() != n {
            return Err(SpectralError::GridMismatch { a: n, b: c.n() });
        }
    }

    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(SNAPSHOT_MAGIC)?;
    w.write_all(&(n as u32).to_le_bytes())?;
    w.write_all(&(components.len() as u32).to_le_bytes())?;
    for c in components {
        for k in modes(n) {
            let v = c.get(k);
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    w.flush()?;

    let sidecar = serde_json::json!({
        "format": {
            "magic": String::from_utf8_lossy(SNAPSHOT_MAGIC),
            "order": "lexicographic (k1, k2, k3)",
            "scalar": "f64 little-endian (re, im)",
        },
        "n": n,
        "components": components.len(),
        "meta": metadata,
    });
    let text = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| SpectralError::BadSnapshot(e.to_string()))?;
    std::fs::write(sidecar_path(path), text)?;
    Ok(())
}

pub fn read_snapshot(path: &Path) -> Result<(Vec<SpectralScalar>, serde_json::Value), SpectralError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != SNAPSHOT_MAGIC {
        return Err(SpectralError::BadSnapshot(format!(
            "bad magic {:?}",
            &magic
        )));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let n = u32::from_le_bytes(word) as usize;
    if n < 2 || n % 2 != 0 {
        return Err(SpectralError::BadSnapshot(format!("bad grid size {n}")));
    }
    r.read_exact(&mut word)?;
    let ncomp = u32::from_le_bytes(word) as usize;

    let mut components = Vec::with_capacity(ncomp);
    let mut pair = [0u8; 16];
    for _ in 0..ncomp {
        let mut field = SpectralScalar::zeros(n);
        for k in modes(n) {
            r.read_exact(&mut pair)?;
            let re = f64::from_le_bytes(pair[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(pair[8..16].try_into().unwrap());
            field.set(k, Complex64::new(re, im));
        }
        components.push(field);
    }
    let mut rest = Vec::new();
    r.read_to_end(&mut rest)?;
    if !rest.is_empty() {
        return Err(SpectralError::BadSnapshot(format!(
            "{} trailing bytes",
            rest.len()
        )));
    }

    let sidecar = match std::fs::read_to_string(sidecar_path(path)) {
        Ok(text) => serde_json::from_str(&text)
            .map_err(|e| SpectralError::BadSnapshot(format!("sidecar: {e}")))?,
        Err(_) => serde_json::Value::Null,
    };
    Ok((components, sidecar))
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".json");
    std::path::PathBuf::from(s)
}
