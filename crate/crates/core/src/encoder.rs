//! Two-stage joint encoder: `b = Hs s`, then `p = H1^-1 H2 b`, emitting
//! `c = [p b]` so that `Hc c = 0`.

use crate::code::QcCode;
use crate::error::{Error, Result};
use crate::gf2::{BitVector, Gf2Matrix};

/// Precomputed matrices for encoding one code.
#[derive(Clone, Debug)]
pub struct EncoderContext {
    hs: Gf2Matrix,
    hc: Gf2Matrix,
    h1_inv: Gf2Matrix,
    h2: Gf2Matrix,
}

impl EncoderContext {
    pub fn new(code: &QcCode) -> Result<Self> {
        Self::from_matrices(code.source_matrix(), code.channel_matrix())
    }

    /// Builds an encoder for any pair `Hs (m x n)`, `Hc (r x (r + m))` whose
    /// leading `r x r` block of `Hc` is invertible.
    pub fn from_matrices(hs: Gf2Matrix, hc: Gf2Matrix) -> Result<Self> {
        let compressed = hs.rows();
        if hc.cols() != hc.rows() + compressed {
            return Err(Error::DimensionMismatch {
                op: "encoder channel matrix columns",
                expected: hc.rows() + compressed,
                found: hc.cols(),
            });
        }
        let parity = hc.rows();
        let h1_inv = hc.columns(0, parity).invert()?;
        let h2 = hc.columns(parity, compressed);
        Ok(Self { hs, hc, h1_inv, h2 })
    }

    pub fn source_len(&self) -> usize {
        self.hs.cols()
    }

    pub fn compressed_len(&self) -> usize {
        self.hs.rows()
    }

    pub fn parity_len(&self) -> usize {
        self.hc.rows()
    }

    pub fn codeword_len(&self) -> usize {
        self.hc.cols()
    }

    pub fn source_matrix(&self) -> &Gf2Matrix {
        &self.hs
    }

    pub fn channel_matrix(&self) -> &Gf2Matrix {
        &self.hc
    }

    pub fn parity_inverse(&self) -> &Gf2Matrix {
        &self.h1_inv
    }

    /// Source compression `b = Hs s`.
    pub fn compress(&self, s: &BitVector) -> Result<BitVector> {
        self.hs.mat_vec_mul(s)
    }

    /// Channel parity `p = H1^-1 (H2 b)`.
    pub fn make_parity(&self, b: &BitVector) -> Result<BitVector> {
        let folded = self.h2.mat_vec_mul(b)?;
        self.h1_inv.mat_vec_mul(&folded)
    }

    pub fn encode(&self, s: &BitVector) -> Result<BitVector> {
        let b = self.compress(s)?;
        let p = self.make_parity(&b)?;
        Ok(p.concat(&b))
    }

    /// `Hc c == 0`.
    pub fn parity_ok(&self, c: &BitVector) -> bool {
        self.hc.mat_vec_mul(c).is_ok_and(|syn| syn.is_zero())
    }

    /// `Hs s` equals the systematic tail of `c`.
    pub fn source_consistent(&self, s: &BitVector, c: &BitVector) -> bool {
        let tail = c.slice(self.parity_len(), self.compressed_len());
        self.hs.mat_vec_mul(s).is_ok_and(|b| b == tail)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy() -> (QcCode, EncoderContext) {
        let code = QcCode::construct(1, 4).unwrap();
        let ctx = EncoderContext::new(&code).unwrap();
        (code, ctx)
    }

    fn bernoulli(rng: &mut ChaCha8Rng, n: usize, p: f64) -> BitVector {
        BitVector::from_bools(&(0..n).map(|_| rng.random_bool(p)).collect::<Vec<_>>())
    }

    #[test]
    fn dimensions_follow_lifting() {
        let (_, ctx) = toy();
        assert_eq!(ctx.source_len(), 160);
        assert_eq!(ctx.compressed_len(), 80);
        assert_eq!(ctx.parity_len(), 120);
        assert_eq!(ctx.codeword_len(), 200);
        assert!(ctx.channel_matrix().columns(0, 120).mul(ctx.parity_inverse()).unwrap().is_identity());
    }

    #[test]
    fn zero_source_encodes_to_zero() {
        let (_, ctx) = toy();
        assert!(ctx.compress(&BitVector::zeros(160)).unwrap().is_zero());
        assert!(ctx.make_parity(&BitVector::zeros(80)).unwrap().is_zero());
        assert!(ctx.encode(&BitVector::zeros(160)).unwrap().is_zero());
    }

    #[test]
    fn unit_source_selects_column() {
        let (_, ctx) = toy();
        for k in [0, 17, 159] {
            let mut s = BitVector::zeros(160);
            s.set(k, true);
            assert_eq!(ctx.compress(&s).unwrap(), ctx.source_matrix().column(k));
        }
    }

    #[test]
    fn unit_compressed_vector_parity() {
        let (_, ctx) = toy();
        let mut b = BitVector::zeros(80);
        b.set(1, true);
        let p = ctx.make_parity(&b).unwrap();
        let h2_col = ctx.channel_matrix().columns(120, 80).column(1);
        assert_eq!(p, ctx.parity_inverse().mat_vec_mul(&h2_col).unwrap());
        assert!(ctx.parity_ok(&p.concat(&b)));
    }

    #[test]
    fn rejects_wrong_lengths() {
        let (_, ctx) = toy();
        assert!(ctx.compress(&BitVector::zeros(100)).is_err());
        assert!(ctx.make_parity(&BitVector::zeros(100)).is_err());
    }

    #[test]
    fn full_chain_checks_on_random_sources() {
        let (_, ctx) = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let s = bernoulli(&mut rng, 160, 0.04);
            let c = ctx.encode(&s).unwrap();
            assert_eq!(c.len(), 200);
            assert!(ctx.parity_ok(&c));
            assert!(ctx.source_consistent(&s, &c));
            assert_eq!(c.slice(120, 80), ctx.compress(&s).unwrap());
        }
    }

    #[test]
    fn encode_is_linear() {
        let (_, ctx) = toy();
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..50 {
            let s1 = bernoulli(&mut rng, 160, 0.3);
            let s2 = bernoulli(&mut rng, 160, 0.3);
            let lhs = ctx.encode(&s1.xor(&s2).unwrap()).unwrap();
            let rhs = ctx.encode(&s1).unwrap().xor(&ctx.encode(&s2).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    /// Generator-matrix encoding at toy scale: the columns of `G^T` are the
    /// encodings of unit sources, and `G^T s` must agree with the two-stage
    /// encoder for every source.
    #[test]
    fn generator_form_agrees_with_two_stage_encoding() {
        let (_, ctx) = toy();
        let mut gt = Gf2Matrix::zeros(200, 160);
        for k in 0..160 {
            let mut e = BitVector::zeros(160);
            e.set(k, true);
            let col = ctx.encode(&e).unwrap();
            for r in col.ones() {
                gt.set(r, k, true);
            }
        }
        // every column of G^T lies in the null space of Hc
        assert!(ctx.channel_matrix().mul(&gt).unwrap().is_zero());
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..50 {
            let s = bernoulli(&mut rng, 160, 0.04);
            assert_eq!(gt.mat_vec_mul(&s).unwrap(), ctx.encode(&s).unwrap());
        }
    }
}
