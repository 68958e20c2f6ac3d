//! Saturating fixed-point LLRs and the two-input tanh lookup table.
//!
//! A value is a two's-complement integer code `q` of `total_bits` bits standing
//! for `q * 2^-frac_bits`. The default 6-bit format with 2 fractional bits
//! covers `[-8.0, 7.75]` in steps of 0.25.
//!
//! The check-node core works on pairs: `f(a, b) = 2 atanh(tanh(a/2) tanh(b/2))`
//! is tabulated once for every pair of codes, and a check node of any degree is
//! evaluated by folding the table left to right over its inputs.

use std::fmt::Write as _;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// A quantized LLR: the raw two's-complement code.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QValue(pub i8);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FixedFormat {
    pub total_bits: u32,
    pub frac_bits: u32,
}

impl Default for FixedFormat {
    fn default() -> Self {
        Self::Q6
    }
}

impl FixedFormat {
    pub const Q6: FixedFormat = FixedFormat {
        total_bits: 6,
        frac_bits: 2,
    };

    pub fn new(total_bits: u32, frac_bits: u32) -> Result<Self> {
        if !(2..=8).contains(&total_bits) || frac_bits >= total_bits {
            return Err(Error::InvalidInput(format!(
                "unsupported fixed format: {total_bits} bits with {frac_bits} fractional"
            )));
        }
        Ok(Self {
            total_bits,
            frac_bits,
        })
    }

    pub fn min_code(&self) -> i32 {
        -(1 << (self.total_bits - 1))
    }

    pub fn max_code(&self) -> i32 {
        (1 << (self.total_bits - 1)) - 1
    }

    /// Number of distinct codes.
    pub fn levels(&self) -> usize {
        1 << self.total_bits
    }

    pub fn step(&self) -> f64 {
        (-(self.frac_bits as f64)).exp2()
    }

    pub fn max_value(&self) -> f64 {
        self.to_f64(QValue(self.max_code() as i8))
    }

    pub fn min_value(&self) -> f64 {
        self.to_f64(QValue(self.min_code() as i8))
    }

    pub fn to_f64(&self, q: QValue) -> f64 {
        q.0 as f64 * self.step()
    }

    #[inline]
    pub fn saturate(&self, code: i32) -> QValue {
        QValue(code.clamp(self.min_code(), self.max_code()) as i8)
    }

    /// Round to the nearest grid point (ties to even), then saturate.
    pub fn quantize(&self, x: f64) -> Result<QValue> {
        if x.is_nan() {
            return Err(Error::InvalidInput("cannot quantize NaN".into()));
        }
        Ok(self.quantize_lossy(x))
    }

    /// [`Self::quantize`] for inputs already known not to be NaN.
    #[inline]
    pub fn quantize_lossy(&self, x: f64) -> QValue {
        let scaled = (x * (self.frac_bits as f64).exp2()).round_ties_even();
        let clamped = scaled.clamp(self.min_code() as f64, self.max_code() as f64);
        QValue(clamped as i8)
    }

    /// Table index of a code: its unsigned `total_bits`-bit pattern.
    #[inline]
    pub fn index(&self, q: QValue) -> usize {
        (q.0 as u8 as usize) & (self.levels() - 1)
    }

    /// Inverse of [`Self::index`].
    pub fn from_index(&self, i: usize) -> QValue {
        let i = i as i32;
        let half = 1 << (self.total_bits - 1);
        QValue(if i >= half { i - self.levels() as i32 } else { i } as i8)
    }

    pub fn codes(&self) -> impl Iterator<Item = QValue> + '_ {
        (self.min_code()..=self.max_code()).map(|c| QValue(c as i8))
    }
}

/// Exact two-input box-plus in double precision.
pub fn boxplus(a: f64, b: f64) -> f64 {
    2.0 * ((a / 2.0).tanh() * (b / 2.0).tanh()).atanh()
}

#[derive(Clone, PartialEq, Eq)]
pub struct TanhLut {
    format: FixedFormat,
    table: Vec<QValue>,
}

impl std::fmt::Debug for TanhLut {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TanhLut({:?})", self.format)
    }
}

impl TanhLut {
    /// Tabulates `quantize(boxplus(a, b))` for every pair of codes.
    pub fn build(format: FixedFormat) -> Self {
        let n = format.levels();
        let mut table = vec![QValue(0); n * n];
        for i in 0..n {
            let a = format.to_f64(format.from_index(i));
            for j in 0..n {
                let b = format.to_f64(format.from_index(j));
                // boxplus(max, max) stays finite, so the value is never NaN
                table[i * n + j] = format.quantize_lossy(boxplus(a, b));
            }
        }
        Self { format, table }
    }

    /// The shared table for the default 6-bit format.
    pub fn q6() -> &'static TanhLut {
        static LUT: OnceLock<TanhLut> = OnceLock::new();
        LUT.get_or_init(|| TanhLut::build(FixedFormat::Q6))
    }

    pub fn format(&self) -> FixedFormat {
        self.format
    }

    #[inline]
    pub fn get(&self, a: QValue, b: QValue) -> QValue {
        let n = self.format.levels();
        self.table[self.format.index(a) * n + self.format.index(b)]
    }

    /// Left fold of the table over `values`; the empty fold is the saturated
    /// maximum (the neutral "certainly 0" message).
    pub fn fold<I: IntoIterator<Item = QValue>>(&self, values: I) -> QValue {
        let mut it = values.into_iter();
        match it.next() {
            None => QValue(self.format.max_code() as i8),
            Some(first) => it.fold(first, |acc, v| self.get(acc, v)),
        }
    }

    /// Hex dump: one line per row index, entries space-separated as two hex
    /// digits of the unsigned code pattern. Row/column `i` is the code whose
    /// unsigned pattern is `i` (so 0..31 are non-negative, 32..63 negative).
    pub fn to_hex(&self) -> String {
        let n = self.format.levels();
        let mut out = String::with_capacity(n * n * 3);
        for i in 0..n {
            for j in 0..n {
                if j > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{:02x}", self.format.index(self.table[i * n + j]));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_hex(text: &str, format: FixedFormat) -> Result<Self> {
        let n = format.levels();
        let mut table = Vec::with_capacity(n * n);
        let mut rows = 0;
        for (ln, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            rows += 1;
            if rows > n {
                return Err(Error::parse(ln + 1, format!("more than {n} rows")));
            }
            let cells: Vec<&str> = line.split_whitespace().collect();
            if cells.len() != n {
                return Err(Error::parse(
                    ln + 1,
                    format!("expected {n} entries, found {}", cells.len()),
                ));
            }
            for cell in cells {
                let v = usize::from_str_radix(cell, 16)
                    .ok()
                    .filter(|&v| v < n && cell.len() <= 2)
                    .ok_or_else(|| Error::parse(ln + 1, format!("bad entry {cell:?}")))?;
                table.push(format.from_index(v));
            }
        }
        if rows != n {
            return Err(Error::parse(rows + 1, format!("expected {n} rows, found {rows}")));
        }
        Ok(Self { format, table })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const F: FixedFormat = FixedFormat::Q6;

    #[test]
    fn format_range() {
        assert_eq!(F.min_value(), -8.0);
        assert_eq!(F.max_value(), 7.75);
        assert_eq!(F.step(), 0.25);
        assert_eq!(F.levels(), 64);
    }

    #[test]
    fn quantize_examples() {
        assert_eq!(F.quantize(0.0).unwrap(), QValue(0));
        assert_eq!(F.to_f64(F.quantize(100.0).unwrap()), 7.75);
        assert_eq!(F.to_f64(F.quantize(-100.0).unwrap()), -8.0);
        assert_eq!(F.to_f64(F.quantize(f64::INFINITY).unwrap()), 7.75);
        assert_eq!(F.to_f64(F.quantize(3.178).unwrap()), 3.25);
        // ties to even: 0.125 -> 0.0, 0.375 -> 0.5
        assert_eq!(F.quantize(0.125).unwrap(), QValue(0));
        assert_eq!(F.quantize(0.375).unwrap(), QValue(2));
        assert!(F.quantize(f64::NAN).is_err());
    }

    #[test]
    fn index_roundtrip() {
        for q in F.codes() {
            assert_eq!(F.from_index(F.index(q)), q);
        }
        assert_eq!(F.index(QValue(-1)), 63);
        assert_eq!(F.index(QValue(-32)), 32);
    }

    #[test]
    fn lut_zero_row_and_symmetry() {
        let lut = TanhLut::q6();
        for a in F.codes() {
            assert_eq!(lut.get(QValue(0), a), QValue(0));
            for b in F.codes() {
                assert_eq!(lut.get(a, b), lut.get(b, a));
            }
        }
    }

    #[test]
    fn lut_max_entry() {
        // boxplus(7.75, 7.75) = 7.0592... -> 7.0
        let want = F.quantize(boxplus(7.75, 7.75)).unwrap();
        assert_eq!(F.to_f64(want), 7.0);
        assert_eq!(TanhLut::q6().get(QValue(31), QValue(31)), want);
    }

    #[test]
    fn lut_sign_and_contraction() {
        let lut = TanhLut::q6();
        for a in F.codes() {
            for b in F.codes() {
                let v = F.to_f64(lut.get(a, b));
                let (x, y) = (F.to_f64(a), F.to_f64(b));
                assert!(v.abs() <= x.abs().min(y.abs()) + F.step(), "{x} {y} -> {v}");
                if v != 0.0 {
                    assert_eq!(v.signum(), x.signum() * y.signum());
                }
                // odd in each argument where negation stays in range
                if a.0 > F.min_code() as i8 && b.0 != F.min_code() as i8 {
                    let neg = lut.get(QValue(-a.0), b);
                    assert_eq!(neg.0, -lut.get(a, b).0);
                }
            }
        }
    }

    #[test]
    fn fold_of_nothing_is_max() {
        assert_eq!(TanhLut::q6().fold([]), QValue(31));
        assert_eq!(TanhLut::q6().fold([QValue(5)]), QValue(5));
    }

    #[test]
    fn hex_roundtrip_and_shape() {
        let lut = TanhLut::q6();
        let hex = lut.to_hex();
        assert_eq!(hex.lines().count(), 64);
        assert!(hex.lines().all(|l| l.split(' ').count() == 64));
        assert_eq!(&TanhLut::from_hex(&hex, F).unwrap(), lut);
        assert!(TanhLut::from_hex("00 01\n", F).is_err());
        let bad = hex.replacen("00", "zz", 1);
        assert!(TanhLut::from_hex(&bad, F).is_err());
    }

    #[test]
    fn custom_formats() {
        let f = FixedFormat::new(5, 1).unwrap();
        assert_eq!(f.max_value(), 7.5);
        assert!(FixedFormat::new(9, 2).is_err());
        assert!(FixedFormat::new(6, 6).is_err());
        assert_eq!(TanhLut::build(f).to_hex().lines().count(), 32);
    }

    proptest! {
        #[test]
        fn quantize_is_monotone(x in -20.0f64..20.0, y in -20.0f64..20.0) {
            let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
            prop_assert!(F.quantize(lo).unwrap() <= F.quantize(hi).unwrap());
        }

        #[test]
        fn quantize_is_odd_off_half_points(x in -7.75f64..7.75) {
            let frac = (x * 4.0).abs().fract();
            prop_assume!((frac - 0.5).abs() > 1e-9);
            prop_assert_eq!(F.quantize(-x).unwrap().0, -F.quantize(x).unwrap().0);
        }

        #[test]
        fn quantize_error_within_half_step(x in -8.0f64..7.75) {
            let q = F.to_f64(F.quantize(x).unwrap());
            prop_assert!((q - x).abs() <= 0.125 + 1e-12);
        }
    }
}
