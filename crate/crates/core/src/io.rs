//! Grid field serialization: a flat little-endian binary format and CSV.
//!
//! Binary layout: a 32-byte header
//!
//! | bytes  | content                 |
//! |--------|-------------------------|
//! | 0..4   | magic `FRIT`            |
//! | 4..8   | format version (u32)    |
//! | 8..12  | dimension n (u32)       |
//! | 12..16 | samples per axis N (u32)|
//! | 16..24 | side length L (f64)     |
//! | 24..32 | reserved, zero          |
//!
//! followed by `N^n` f64 samples in row-major order.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{BoxDomain, GridField};

pub const MAGIC: &[u8; 4] = b"FRIT";
pub const VERSION: u32 = 1;
pub const HEADER_LEN: usize = 32;

pub fn write_binary<W: Write>(f: &GridField, mut w: W) -> Result<()> {
    let d = f.domain();
    let mut header = [0u8; HEADER_LEN];
    header[0..4].copy_from_slice(MAGIC);
    header[4..8].copy_from_slice(&VERSION.to_le_bytes());
    header[8..12].copy_from_slice(&(d.dim() as u32).to_le_bytes());
    header[12..16].copy_from_slice(&(d.samples() as u32).to_le_bytes());
    header[16..24].copy_from_slice(&d.side().to_le_bytes());
    w.write_all(&header)?;
    let mut buf = Vec::with_capacity(8 * f.values().len());
    for v in f.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_binary<R: Read>(mut r: R) -> Result<GridField> {
    let mut header = [0u8; HEADER_LEN];
    r.read_exact(&mut header)
        .map_err(|_| Error::Format("truncated header".into()))?;
    if &header[0..4] != MAGIC {
        return Err(Error::Format("bad magic, not a FRIT field".into()));
    }
    let u32_at = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
    let version = u32_at(4);
    if version != VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    let n = u32_at(8) as usize;
    let samples = u32_at(12) as usize;
    let side = f64::from_le_bytes(header[16..24].try_into().unwrap());
    let d = BoxDomain::new(n, side, samples).map_err(|e| Error::Format(e.to_string()))?;
    let mut bytes = Vec::with_capacity(8 * d.len());
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 8 * d.len() {
        return Err(Error::Format(format!(
            "payload has {} bytes, expected {}",
            bytes.len(),
            8 * d.len()
        )));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridField::new(d, values).map_err(|e| Error::Format(e.to_string()))
}

pub fn save_binary(f: &GridField, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_binary(f, std::io::BufWriter::new(file))
}

pub fn load_binary(path: impl AsRef<Path>) -> Result<GridField> {
    let file = std::fs::File::open(path)?;
    read_binary(std::io::BufReader::new(file))
}

/// CSV with columns `i1, ..., in, value`.
pub fn write_csv<W: Write>(f: &GridField, w: W) -> Result<()> {
    let d = f.domain();
    let n = d.dim();
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = (1..=n).map(|a| format!("i{a}")).collect();
    header.push("value".into());
    out.write_record(&header)?;
    let mut row: Vec<String> = Vec::with_capacity(n + 1);
    for (i, v) in f.values().iter().enumerate() {
        let idx = d.unravel(i);
        row.clear();
        row.extend(idx[..n].iter().map(|k| k.to_string()));
        row.push(format!("{v:e}"));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_csv(f: &GridField, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_csv(f, std::io::BufWriter::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> GridField {
        let d = BoxDomain::new(2, 3.5, 8).unwrap();
        GridField::from_fn(d, |x| x[0] - 0.25 * x[1] * x[1]).unwrap()
    }

    #[test]
    fn binary_round_trip() {
        let f = sample();
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), HEADER_LEN + 8 * 64);
        assert_eq!(&buf[0..4], b"FRIT");
        assert_eq!(read_binary(&buf[..]).unwrap(), f);
    }

    #[test]
    fn binary_rejects_corruption() {
        let f = sample();
        let mut buf = Vec::new();
        write_binary(&f, &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(read_binary(&bad[..]), Err(Error::Format(_))));
        assert!(matches!(read_binary(&buf[..buf.len() - 1]), Err(Error::Format(_))));
        assert!(matches!(read_binary(&buf[..10]), Err(Error::Format(_))));
    }

    #[test]
    fn csv_has_index_columns() {
        let f = sample();
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("i1,i2,value"));
        let first = lines.next().unwrap();
        assert!(first.starts_with("0,0,"));
        let v: f64 = first.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(v, f.values()[0]);
        assert_eq!(text.lines().count(), 65);
    }
}
