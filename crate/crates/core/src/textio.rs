//! Plain-text bit and LLR files.
//!
//! Bit files hold `0`/`1` characters; whitespace is ignored and `#` starts a
//! comment running to the end of the line. LLR files hold one decimal number
//! per whitespace-separated token with the same comment rule.

use std::path::Path;

use crate::error::{Error, Result};
use crate::gf2::BitVector;

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(body, _)| body)
}

pub fn parse_bits(text: &str) -> Result<BitVector> {
    let mut v = BitVector::zeros(0);
    for (n, line) in text.lines().enumerate() {
        for ch in strip_comment(line).chars() {
            match ch {
                '0' => v.push(false),
                '1' => v.push(true),
                c if c.is_whitespace() => {}
                c => return Err(Error::parse(n + 1, format!("unexpected character {c:?} in bit file"))),
            }
        }
    }
    Ok(v)
}

pub fn format_bits(v: &BitVector) -> String {
    let mut s = String::with_capacity(v.len() + v.len() / 80 + 1);
    for (i, b) in v.iter().enumerate() {
        if i > 0 && i % 80 == 0 {
            s.push('\n');
        }
        s.push(if b { '1' } else { '0' });
    }
    s.push('\n');
    s
}

pub fn parse_llrs(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        for tok in strip_comment(line).split_whitespace() {
            let x: f64 = tok
                .parse()
                .map_err(|_| Error::parse(n + 1, format!("invalid LLR {tok:?}")))?;
            if x.is_nan() {
                return Err(Error::parse(n + 1, "LLR is NaN"));
            }
            out.push(x);
        }
    }
    Ok(out)
}

/// One value per line, printed with enough digits to read back exactly.
pub fn format_llrs(llrs: &[f64]) -> String {
    let mut s = String::new();
    for x in llrs {
        s.push_str(&format!("{x:?}\n"));
    }
    s
}

pub fn read_bits(path: impl AsRef<Path>) -> Result<BitVector> {
    parse_bits(&std::fs::read_to_string(path)?)
}

pub fn write_bits(path: impl AsRef<Path>, v: &BitVector) -> Result<()> {
    std::fs::write(path, format_bits(v))?;
    Ok(())
}

pub fn read_llrs(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    parse_llrs(&std::fs::read_to_string(path)?)
}

pub fn write_llrs(path: impl AsRef<Path>, llrs: &[f64]) -> Result<()> {
    std::fs::write(path, format_llrs(llrs))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_roundtrip() {
        let v = BitVector::from_bits((0..203).map(|i| (i * 7 % 3 == 0) as u8));
        assert_eq!(parse_bits(&format_bits(&v)).unwrap(), v);
    }

    #[test]
    fn bits_ignore_space_and_comments() {
        let v = parse_bits("# header\n01 1\n  0 # tail 111\n").unwrap();
        assert_eq!(v, BitVector::from_bits([0u8, 1, 1, 0]));
    }

    #[test]
    fn bits_reject_garbage() {
        let e = parse_bits("01\n012\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }), "{e}");
    }

    #[test]
    fn llrs_roundtrip_exactly() {
        let v = vec![0.1, -3.25, 1e-300, -0.0, 38.14, f64::INFINITY];
        let back = parse_llrs(&format_llrs(&v)).unwrap();
        assert_eq!(back.len(), v.len());
        for (a, b) in back.iter().zip(&v) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn llrs_reject_nan_and_junk() {
        assert!(parse_llrs("1.0 NaN").is_err());
        assert!(parse_llrs("1.0\n0x12").is_err());
        assert_eq!(parse_llrs("# none\n\n").unwrap(), Vec::<f64>::new());
    }
}
