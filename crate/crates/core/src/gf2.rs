//! Binary-field vectors and matrices.
//!
//! Both [`BitVector`] and [`Gf2Matrix`] are packed into `u64` words so that row
//! operations during elimination and inner products during encoding are
//! word-parallel. Bit `i` of a vector lives in word `i / 64` at bit position
//! `i % 64`. Unused high bits of the final word are always zero.

use std::fmt;

use crate::error::{Error, Result};

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[cfg(test)]
fn tail_mask(bits: usize) -> u64 {
    match bits % WORD {
        0 => u64::MAX,
        r => (1u64 << r) - 1,
    }
}

/// A dense, word-packed vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Builds a vector from any iterator of bits; nonzero values count as 1.
    pub fn from_bits<I, B>(bits: I) -> Self
    where
        I: IntoIterator<Item = B>,
        B: Into<u8>,
    {
        let mut v = Self::zeros(0);
        for b in bits {
            v.push(b.into() != 0);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn push(&mut self, bit: bool) {
        if self.len.is_multiple_of(WORD) {
            self.words.push(0);
        }
        self.len += 1;
        self.set(self.len - 1, bit);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Parity of the bitwise AND with `other`, i.e. the GF(2) inner product.
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        let acc = self
            .words
            .iter()
            .zip(&other.words)
            .fold(0u64, |acc, (a, b)| acc ^ (a & b));
        acc.count_ones() & 1 == 1
    }

    pub fn xor_assign(&mut self, other: &BitVector) -> Result<()> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                op: "xor",
                expected: self.len,
                found: other.len,
            });
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn xor(&self, other: &BitVector) -> Result<BitVector> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    /// Number of positions where the two vectors differ.
    pub fn hamming_distance(&self, other: &BitVector) -> usize {
        assert_eq!(self.len, other.len, "hamming distance of unequal lengths");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum()
    }

    /// Copies bits `[start, start + len)` into a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVector {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = BitVector::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn concat(&self, tail: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + tail.len);
        out.words[..self.words.len()].copy_from_slice(&self.words);
        for i in tail.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of set bits in ascending order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + t)
                }
            })
        })
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector[{}](", self.len)?;
        if self.len <= 128 {
            for b in self.iter() {
                f.write_str(if b { "1" } else { "0" })?;
            }
        } else {
            write!(f, "{} ones", self.count_ones())?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// A dense row-major binary matrix with word-packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from nested rows; nonzero entries count as 1.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    op: "from_rows",
                    expected: cols,
                    found: r.len(),
                });
            }
            for (j, &b) in r.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVector {
        BitVector {
            len: self.cols,
            words: self.row_words(r).to_vec(),
        }
    }

    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    /// Column indices of the set entries in row `r`, ascending.
    pub fn row_support(&self, r: usize) -> Vec<usize> {
        let words = self.row_words(r);
        let mut out = Vec::new();
        for (wi, &w) in words.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(wi * WORD + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }

    pub fn row_weight(&self, r: usize) -> usize {
        self.row_words(r).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// Copies the column range `[start, start + width)`.
    pub fn columns(&self, start: usize, width: usize) -> Gf2Matrix {
        assert!(start + width <= self.cols, "column range out of bounds");
        let mut out = Gf2Matrix::zeros(self.rows, width);
        for r in 0..self.rows {
            for c in self.row_support(r) {
                if c >= start && c < start + width {
                    out.set(r, c - start, true);
                }
            }
        }
        out
    }

    /// Copies the block `[r0, r0 + h) x [c0, c0 + w)`.
    pub fn submatrix(&self, r0: usize, c0: usize, h: usize, w: usize) -> Gf2Matrix {
        assert!(r0 + h <= self.rows, "row range out of bounds");
        let mut out = Gf2Matrix::zeros(h, w);
        let cols = self.columns(c0, w);
        for r in 0..h {
            let src = cols.row_words(r0 + r);
            out.data[r * out.stride..(r + 1) * out.stride].copy_from_slice(src);
        }
        out
    }

    pub fn transpose(&self) -> Gf2Matrix {
        let mut out = Gf2Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.row_support(r) {
                out.set(c, r, true);
            }
        }
        out
    }

    /// `self * v` over GF(2).
    pub fn mat_vec_mul(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                op: "mat_vec_mul",
                expected: self.cols,
                found: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            let acc = self
                .row_words(r)
                .iter()
                .zip(v.words())
                .fold(0u64, |acc, (a, b)| acc ^ (a & b));
            if acc.count_ones() & 1 == 1 {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    /// `self * other` over GF(2).
    pub fn mul(&self, other: &Gf2Matrix) -> Result<Gf2Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "mul",
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = Gf2Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let dst = r * out.stride;
            for k in self.row_support(r) {
                let src = other.row_words(k);
                for (d, s) in out.data[dst..dst + out.stride].iter_mut().zip(src) {
                    *d ^= s;
                }
            }
        }
        Ok(out)
    }

    #[inline]
    fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.data.split_at_mut(dst * s);
            (&lo[src * s..src * s + s], &mut hi[..s])
        } else {
            let (lo, hi) = self.data.split_at_mut(src * s);
            (&hi[..s] as &[u64], &mut lo[dst * s..dst * s + s])
        };
        for (d, x) in b.iter_mut().zip(a) {
            *d ^= x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let s = self.stride;
        for w in 0..s {
            self.data.swap(a * s + w, b * s + w);
        }
    }

    /// Row-reduces a working copy and returns the rank.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            let Some(p) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(rank, p);
            for r in rank + 1..m.rows {
                if m.get(r, c) {
                    m.xor_row_into(rank, r);
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Inverse by Gauss-Jordan elimination on the augmented matrix `[M | I]`.
    ///
    /// A singular input yields [`Error::SingularMatrix`] with the rank of `M`.
    pub fn invert(&self) -> Result<Gf2Matrix> {
        if self.rows != self.cols {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Gf2Matrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in self.row_support(r) {
                aug.set(r, c, true);
            }
            aug.set(r, n + r, true);
        }
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| aug.get(r, c)) else {
                return Err(Error::SingularMatrix { rank: self.rank() });
            };
            aug.swap_rows(c, p);
            let word = c / WORD;
            let mask = 1u64 << (c % WORD);
            for r in 0..n {
                if r != c && aug.data[r * aug.stride + word] & mask != 0 {
                    aug.xor_row_into(c, r);
                }
            }
        }
        Ok(aug.columns(n, n))
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols && (0..self.rows).all(|r| self.row_support(r) == [r])
    }

    #[cfg(test)]
    pub(crate) fn debug_check_tail(&self) -> bool {
        let mask = tail_mask(self.cols);
        (0..self.rows).all(|r| self.row_words(r).last().is_none_or(|&w| w & !mask == 0))
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{}", self.rows, self.cols)?;
        if self.rows <= 32 && self.cols <= 128 {
            for r in 0..self.rows {
                for c in 0..self.cols {
                    f.write_str(if self.get(r, c) { "1" } else { "0" })?;
                }
                writeln!(f)?;
            }
        }
        Ok(())
    }
}

/// One `z x z` block of a quasi-cyclic matrix: either all-zero or the identity
/// cyclically shifted right by `shift` columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CirculantBlock {
    pub z: usize,
    pub shift: Option<usize>,
}

impl CirculantBlock {
    pub fn zero(z: usize) -> Self {
        Self { z, shift: None }
    }

    pub fn shifted(z: usize, shift: usize) -> Self {
        assert!(shift < z, "shift {shift} out of range for z={z}");
        Self {
            z,
            shift: Some(shift),
        }
    }

    /// Column of the single 1 in row `r`, or `None` for the zero block.
    #[inline]
    pub fn column_of_row(&self, r: usize) -> Option<usize> {
        self.shift.map(|s| (r + s) % self.z)
    }

    pub fn expand(&self) -> Gf2Matrix {
        let mut m = Gf2Matrix::zeros(self.z, self.z);
        for r in 0..self.z {
            if let Some(c) = self.column_of_row(r) {
                m.set(r, c, true);
            }
        }
        m
    }
}

pub fn expand_circulant(block: CirculantBlock) -> Gf2Matrix {
    block.expand()
}
