//! Binary snapshot of one field.
//!
//! Layout, little-endian: magic `KVSF`, version `u32`, d `u32`, N `u32`,
//! shape code `u32`, time `f64`, then for every mode in lexicographic order
//! and every component inside it the pair (re, im) as `f64`.

use std::io::{Read, Write};

use num_complex::Complex64;

use super::{Shape, SpectralField};
use crate::error::{Error, Result};

pub const CHECKPOINT_MAGIC: [u8; 4] = *b"KVSF";
pub const CHECKPOINT_VERSION: u32 = 1;

pub fn write_field(mut w: impl Write, field: &SpectralField, time: f64) -> Result<()> {
    let mut buf = Vec::with_capacity(28 + 16 * field.coeffs().len());
    buf.extend_from_slice(&CHECKPOINT_MAGIC);
    for v in [CHECKPOINT_VERSION, field.dim() as u32, field.n() as u32, field.shape().code()] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    buf.extend_from_slice(&time.to_le_bytes());
    for idx in 0..field.mode_count() {
        for c in 0..field.components() {
            let z = field.component(c)[idx];
            buf.extend_from_slice(&z.re.to_le_bytes());
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads a field written by [`write_field`], returning it with its time.
pub fn read_field(mut r: impl Read) -> Result<(SpectralField, f64)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 28 || bytes[..4] != CHECKPOINT_MAGIC {
        return Err(Error::Format("missing KVSF header".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap());
    let (version, dim, n, code) = (word(0), word(1) as usize, word(2) as usize, word(3));
    if version != CHECKPOINT_VERSION {
        return Err(Error::Format(format!("unsupported checkpoint version {version}")));
    }
    let shape = Shape::from_code(code).ok_or_else(|| Error::Format(format!("unknown shape code {code}")))?;
    if !(1..=3).contains(&dim) {
        return Err(Error::Format(format!("invalid dimension {dim}")));
    }
    let time = f64::from_le_bytes(bytes[20..28].try_into().unwrap());
    let mut field = SpectralField::zeros(dim, n, shape);
    let expected = 28 + 16 * field.coeffs().len();
    if bytes.len() != expected {
        return Err(Error::Format(format!("expected {expected} bytes, found {}", bytes.len())));
    }
    let comps = field.components();
    let f64_at = |off: usize| f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
    for idx in 0..field.mode_count() {
        for c in 0..comps {
            let off = 28 + 16 * (idx * comps + c);
            field.component_mut(c)[idx] = Complex64::new(f64_at(off), f64_at(off + 8));
        }
    }
    Ok((field, time))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_bit_exact() {
        let mut f = SpectralField::zeros(2, 3, Shape::Matrix);
        f.set_mode(3, &[1, -2], Complex64::new(0.1, -1.0 / 3.0));
        f.set_mode(0, &[0, 0], Complex64::new(std::f64::consts::PI, 0.0));
        let mut buf = Vec::new();
        write_field(&mut buf, &f, 0.125).unwrap();
        let (g, t) = read_field(buf.as_slice()).unwrap();
        assert_eq!(t, 0.125);
        assert_eq!(f, g);
    }

    #[test]
    fn rejects_truncated_input() {
        let f = SpectralField::zeros(1, 2, Shape::Vector);
        let mut buf = Vec::new();
        write_field(&mut buf, &f, 0.0).unwrap();
        buf.pop();
        assert!(read_field(buf.as_slice()).is_err());
        assert!(read_field(&b"XXXX"[..]).is_err());
    }
}
