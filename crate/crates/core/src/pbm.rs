//! Portable bitmap (P1 ASCII and P4 binary) reading and writing.
//!
//! Pixels are row-major from the top-left corner; a black pixel is bit 1.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::BitVector;

pub const FEATURE_WIDTH: usize = 160;
pub const FEATURE_HEIGHT: usize = 40;

/// Largest pixel count accepted by the reader.
const MAX_PIXELS: usize = 1 << 26;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bitmap {
    width: usize,
    height: usize,
    bits: BitVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbmFormat {
    Ascii,
    Binary,
}

impl Bitmap {
    pub fn new(width: usize, height: usize, bits: BitVector) -> Result<Self> {
        if bits.len() != width * height {
            return Err(Error::DimensionMismatch {
                op: "bitmap",
                expected: width * height,
                found: bits.len(),
            });
        }
        Ok(Self { width, height, bits })
    }

    pub fn blank(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            bits: BitVector::zeros(width * height),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &BitVector {
        &self.bits
    }

    pub fn into_bits(self) -> BitVector {
        self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits.get(y * self.width + x)
    }

    pub fn set(&mut self, x: usize, y: usize, black: bool) {
        self.bits.set(y * self.width + x, black);
    }

    /// Fraction of black pixels.
    pub fn density(&self) -> f64 {
        if self.bits.is_empty() {
            return 0.0;
        }
        self.bits.count_ones() as f64 / self.bits.len() as f64
    }

    pub fn require_size(&self, width: usize, height: usize) -> Result<()> {
        if (self.width, self.height) != (width, height) {
            return Err(Error::InvalidInput(format!(
                "image is {}x{}, expected {width}x{height}",
                self.width, self.height
            )));
        }
        Ok(())
    }

    pub fn parse(data: &[u8]) -> Result<Self> {
        let mut r = Reader { data, pos: 0 };
        let magic = r.token()?;
        let format = match magic.as_slice() {
            b"P1" => PbmFormat::Ascii,
            b"P4" => PbmFormat::Binary,
            _ => return Err(r.error("expected P1 or P4 magic")),
        };
        let width = r.number()?;
        let height = r.number()?;
        let pixels = width
            .checked_mul(height)
            .filter(|&p| p <= MAX_PIXELS)
            .ok_or_else(|| r.error("image too large"))?;
        let mut bits = BitVector::zeros(pixels);
        match format {
            PbmFormat::Ascii => {
                for i in 0..pixels {
                    r.skip_space();
                    match r.next_byte() {
                        Some(b'0') => {}
                        Some(b'1') => bits.set(i, true),
                        Some(_) => return Err(r.error("pixel must be 0 or 1")),
                        None => return Err(r.error("raster ends early")),
                    }
                }
            }
            PbmFormat::Binary => {
                match r.next_byte() {
                    Some(b) if b.is_ascii_whitespace() => {}
                    _ => return Err(r.error("expected whitespace before raster")),
                }
                let stride = width.div_ceil(8);
                let raster = r
                    .data
                    .get(r.pos..r.pos + stride * height)
                    .ok_or_else(|| r.error("raster ends early"))?;
                for y in 0..height {
                    for x in 0..width {
                        if raster[y * stride + x / 8] & (0x80 >> (x % 8)) != 0 {
                            bits.set(y * width + x, true);
                        }
                    }
                }
            }
        }
        Ok(Self { width, height, bits })
    }

    pub fn to_bytes(&self, format: PbmFormat) -> Vec<u8> {
        match format {
            PbmFormat::Ascii => {
                let mut s = format!("P1\n{} {}\n", self.width, self.height);
                for y in 0..self.height {
                    // keep lines under 70 characters
                    for (i, x) in (0..self.width).enumerate() {
                        if i > 0 {
                            s.push(if i % 35 == 0 { '\n' } else { ' ' });
                        }
                        s.push(if self.get(x, y) { '1' } else { '0' });
                    }
                    s.push('\n');
                }
                s.into_bytes()
            }
            PbmFormat::Binary => {
                let mut out = format!("P4\n{} {}\n", self.width, self.height).into_bytes();
                let stride = self.width.div_ceil(8);
                for y in 0..self.height {
                    let mut row = vec![0u8; stride];
                    for x in 0..self.width {
                        if self.get(x, y) {
                            row[x / 8] |= 0x80 >> (x % 8);
                        }
                    }
                    out.extend_from_slice(&row);
                }
                out
            }
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>, format: PbmFormat) -> Result<()> {
        std::fs::write(path, self.to_bytes(format))?;
        Ok(())
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn line(&self) -> usize {
        1 + self.data[..self.pos.min(self.data.len())]
            .iter()
            .filter(|&&b| b == b'\n')
            .count()
    }

    fn error(&self, msg: &str) -> Error {
        Error::parse(self.line(), msg)
    }

    fn next_byte(&mut self) -> Option<u8> {
        let b = self.data.get(self.pos).copied();
        if b.is_some() {
            self.pos += 1;
        }
        b
    }

    /// Skips whitespace and `#` comments.
    fn skip_space(&mut self) {
        while let Some(&b) = self.data.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.data.get(self.pos) {
                    if c == b'\n' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<Vec<u8>> {
        self.skip_space();
        let start = self.pos;
        while self
            .data
            .get(self.pos)
            .is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#')
        {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("unexpected end of header"));
        }
        Ok(self.data[start..self.pos].to_vec())
    }

    fn number(&mut self) -> Result<usize> {
        let tok = self.token()?;
        std::str::from_utf8(&tok)
            .ok()
            .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.error("expected a decimal dimension"))
    }
}
