//! Binary field snapshot container.
//!
//! Layout, all integers and floats little-endian:
//!
//! | offset | size | content                                   |
//! |--------|------|-------------------------------------------|
//! | 0      | 8    | magic `BLWFIELD`                          |
//! | 8      | 4    | format version (`u32`, currently 1)       |
//! | 12     | 4    | points per axis `n` (`u32`)               |
//! | 16     | 4    | component count (`u32`, 1 or 3)           |
//! | 20     | 8    | period `L` (`f64`)                        |
//! | 28     | …    | coefficients, `(re, im)` as two `f64`s     |
//!
//! Coefficients are written component by component. Within a component the
//! order is row-major in integer wavenumber: `m₀` from `-n/2` to `n/2-1`
//! slowest, then `m₁`, then `m₂` fastest. Readers reject other versions.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{ScalarSpectralField, VelocityField};
use crate::lattice::Lattice;

pub const MAGIC: [u8; 8] = *b"BLWFIELD";
pub const VERSION: u32 = 1;

fn wavenumber_order(lattice: Lattice) -> impl Iterator<Item = usize> {
    let half = (lattice.n() / 2) as i64;
    let range = move || -half..half;
    range().flat_map(move |a| {
        range().flat_map(move |b| range().map(move |c| lattice.index_wrapped([a, b, c])))
    })
}

pub fn write_fields<W: Write>(mut w: W, fields: &[ScalarSpectralField]) -> Result<()> {
    let lattice = fields
        .first()
        .ok_or_else(|| Error::Snapshot("no components to write".into()))?
        .lattice();
    if fields.iter().any(|f| f.lattice() != lattice) {
        return Err(Error::LatticeMismatch);
    }
    let mut buf = Vec::with_capacity(28 + fields.len() * lattice.len() * 16);
    buf.extend_from_slice(&MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(lattice.n() as u32).to_le_bytes());
    buf.extend_from_slice(&(fields.len() as u32).to_le_bytes());
    buf.extend_from_slice(&lattice.period().to_le_bytes());
    for f in fields {
        for idx in wavenumber_order(lattice) {
            let c = f.coeffs()[idx];
            buf.extend_from_slice(&c.re.to_le_bytes());
            buf.extend_from_slice(&c.im.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_fields<R: Read>(mut r: R) -> Result<Vec<ScalarSpectralField>> {
    let mut header = [0u8; 28];
    r.read_exact(&mut header)
        .map_err(|e| Error::Snapshot(format!("truncated header: {e}")))?;
    if header[..8] != MAGIC {
        return Err(Error::Snapshot("bad magic".into()));
    }
    let word = |at: usize| u32::from_le_bytes(header[at..at + 4].try_into().expect("4 bytes"));
    let version = word(8);
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let n = word(12) as usize;
    let count = word(16) as usize;
    if count != 1 && count != 3 {
        return Err(Error::Snapshot(format!("component count must be 1 or 3, got {count}")));
    }
    let period = f64::from_le_bytes(header[20..28].try_into().expect("8 bytes"));
    let lattice = Lattice::new(n, period)?;
    let mut body = vec![0u8; count * lattice.len() * 16];
    r.read_exact(&mut body)
        .map_err(|e| Error::Snapshot(format!("truncated coefficient block: {e}")))?;
    let mut values = body.chunks_exact(8).map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")));
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut coeffs = vec![Complex64::default(); lattice.len()];
        for idx in wavenumber_order(lattice) {
            let re = values.next().expect("sized above");
            let im = values.next().expect("sized above");
            coeffs[idx] = Complex64::new(re, im);
        }
        out.push(ScalarSpectralField::new(lattice, coeffs)?);
    }
    Ok(out)
}

pub fn save_velocity(path: &Path, u: &VelocityField) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_fields(std::io::BufWriter::new(file), u.as_array())
}

pub fn load_velocity(path: &Path) -> Result<VelocityField> {
    let file = std::fs::File::open(path)?;
    let fields = read_fields(std::io::BufReader::new(file))?;
    let arr: [ScalarSpectralField; 3] = fields
        .try_into()
        .map_err(|_| Error::Snapshot("expected three components".into()))?;
    VelocityField::new(arr)
}
