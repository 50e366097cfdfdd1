//! `RFC1` coefficient files.
//!
//! Layout: magic `RFC1`, then `u32` LE width, height, block size and a
//! reserved zero, then `width·height` `f64` LE values, row-major.

use std::fs;
use std::path::Path;

use super::CoeffPlane;
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"RFC1";
const HEADER_LEN: usize = 4 + 4 * 4;

pub fn encode(c: &CoeffPlane) -> Result<Vec<u8>> {
    let dim = |v: usize| {
        u32::try_from(v).map_err(|_| Error::InvalidArgument(format!("dimension {v} exceeds u32")))
    };
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * c.values.len());
    out.extend_from_slice(MAGIC);
    for v in [dim(c.width)?, dim(c.height)?, dim(c.block)?, 0] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for v in &c.values {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn decode(data: &[u8]) -> Result<CoeffPlane> {
    if data.len() < HEADER_LEN || &data[..4] != MAGIC {
        return Err(Error::Parse("coefficient file: missing RFC1 header".into()));
    }
    let word = |k: usize| {
        let off = 4 + 4 * k;
        u32::from_le_bytes(data[off..off + 4].try_into().unwrap()) as usize
    };
    let (width, height, block, reserved) = (word(0), word(1), word(2), word(3));
    if reserved != 0 {
        return Err(Error::Parse(format!("coefficient file: reserved field is {reserved}, expected 0")));
    }
    let body = &data[HEADER_LEN..];
    let count = width * height;
    if body.len() != 8 * count {
        return Err(Error::Parse(format!(
            "coefficient file: expected {} payload bytes, found {}",
            8 * count,
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    CoeffPlane::new(width, height, block, values)
}

pub fn read(path: &Path) -> Result<CoeffPlane> {
    decode(&fs::read(path)?)
}

pub fn write(path: &Path, c: &CoeffPlane) -> Result<()> {
    fs::write(path, encode(c)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let c = CoeffPlane::new(4, 2, 2, vec![1.5, -0.0, 3.0, f64::MIN_POSITIVE, 0.0, 1e300, -2.0, 7.0]).unwrap();
        let bytes = encode(&c).unwrap();
        assert_eq!(&bytes[..4], b"RFC1");
        assert_eq!(&bytes[4..20], &[4, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0]);
        assert_eq!(&bytes[20..28], &1.5f64.to_le_bytes());
        assert_eq!(bytes.len(), 20 + 64);
        let back = decode(&bytes).unwrap();
        assert!(back.values.iter().zip(&c.values).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn rejects_corruption() {
        let c = CoeffPlane::new(2, 2, 2, vec![0.0; 4]).unwrap();
        let good = encode(&c).unwrap();
        assert!(decode(&good[..good.len() - 1]).is_err());
        let mut bad_magic = good.clone();
        bad_magic[0] = b'X';
        assert!(decode(&bad_magic).is_err());
        let mut bad_reserved = good.clone();
        bad_reserved[16] = 1;
        assert!(decode(&bad_reserved).is_err());
        let mut bad_block = good;
        bad_block[12] = 3;
        assert!(decode(&bad_block).is_err());
    }
}
