//! Binary PGM (P5), 8-bit, maxval 255.

use std::fs;
use std::path::Path;

use super::GrayImage;
use crate::error::{Error, Result};

pub fn encode(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.samples());
    out
}

struct Header<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.data.get(self.pos).is_some_and(|&c| c != b'\n') {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.data.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("PGM: missing or invalid {what}")))
    }
}

pub fn decode(data: &[u8]) -> Result<GrayImage> {
    if !data.starts_with(b"P5") {
        return Err(Error::Parse("PGM: expected binary 'P5' magic".into()));
    }
    let mut h = Header { data, pos: 2 };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if maxval != 255 {
        return Err(Error::Parse(format!("PGM: only maxval 255 is supported, got {maxval}")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if !data.get(h.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Parse("PGM: missing separator after maxval".into()));
    }
    let raster = &data[h.pos + 1..];
    let len = width * height;
    if raster.len() < len {
        return Err(Error::Parse(format!(
            "PGM: expected {len} samples, found {}",
            raster.len()
        )));
    }
    GrayImage::new(width, height, raster[..len].to_vec())
}

pub fn read(path: &Path) -> Result<GrayImage> {
    decode(&fs::read(path)?)
}

pub fn write(path: &Path, img: &GrayImage) -> Result<()> {
    fs::write(path, encode(img))?;
    Ok(())
}
