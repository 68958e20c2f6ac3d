//! Message arithmetic for the joint decoder.
//!
//! The decoder's control flow is written once against [`Arithmetic`]; the two
//! engines differ only in how messages are stored, summed and combined at
//! check nodes.

use std::fmt::Debug;

use crate::fixed::{FixedFormat, QValue, TanhLut};

/// Largest `|x/2|` fed to `tanh`; `tanh(19.07)` rounds to 1.0 in double precision.
pub const TANH_CLIP: f64 = 19.07;
/// Largest LLR magnitude a float check node emits.
pub const LLR_MAX: f64 = 2.0 * TANH_CLIP;

/// Check nodes of higher degree are rejected when the decoder is built.
pub const MAX_CHECK_DEGREE: usize = 64;

pub trait Arithmetic: Sync {
    /// A stored message or LLR.
    type Msg: Copy + Default + PartialEq + Debug + Send + Sync;
    /// Accumulator used inside a single variable-node sum.
    type Acc: Copy + Debug;

    #[allow(clippy::wrong_self_convention)]
    fn from_llr(&self, x: f64) -> Self::Msg;
    fn to_f64(&self, m: Self::Msg) -> f64;

    fn widen(&self, m: Self::Msg) -> Self::Acc;
    fn add(&self, a: Self::Acc, m: Self::Msg) -> Self::Acc;
    fn sub(&self, a: Self::Acc, m: Self::Msg) -> Self::Acc;
    fn add_acc(&self, a: Self::Acc, b: Self::Acc) -> Self::Acc;
    fn zero_acc(&self) -> Self::Acc;
    /// Store an accumulator as a message (saturating where applicable).
    fn narrow(&self, a: Self::Acc) -> Self::Msg;
    /// Hard decision: `true` (bit 1) iff the LLR is negative.
    fn is_one(&self, m: Self::Msg) -> bool;

    /// Extrinsic check-node update. For every `k`,
    /// `tanh(out[k]/2) = tanh(cross/2) * prod_{k' != k} tanh(inputs[k']/2)`,
    /// where the cross factor is dropped when `cross` is `None`.
    fn check_extrinsic(&self, cross: Option<Self::Msg>, inputs: &[Self::Msg], out: &mut [Self::Msg]);

    /// Total check-node product: `tanh(out/2) = prod_k tanh(inputs[k]/2)`.
    fn check_total(&self, inputs: &[Self::Msg]) -> Self::Msg;

    /// [`check_extrinsic`](Self::check_extrinsic) followed by
    /// [`check_total`](Self::check_total) over the same inputs.
    fn check_extrinsic_total(
        &self,
        cross: Option<Self::Msg>,
        inputs: &[Self::Msg],
        out: &mut [Self::Msg],
    ) -> Self::Msg {
        self.check_extrinsic(cross, inputs, out);
        self.check_total(inputs)
    }
}

/// Double-precision sum-product.
#[derive(Clone, Copy, Debug, Default)]
pub struct FloatArith;

/// `tanh(x/2)` as `(e^x - 1) / (e^x + 1)`, a single `exp` instead of libm's
/// `tanh`. Agrees with `tanh` to a few ulps in absolute terms.
#[inline]
fn half_tanh(x: f64) -> f64 {
    let e = x.clamp(-LLR_MAX, LLR_MAX).exp();
    (e - 1.0) / (e + 1.0)
}

/// `2 atanh(p)` as `ln((1 + p) / (1 - p))`; `|p| = 1` maps to `LLR_MAX`.
#[inline]
fn from_product(p: f64) -> f64 {
    ((1.0 + p) / (1.0 - p)).ln().clamp(-LLR_MAX, LLR_MAX)
}

impl Arithmetic for FloatArith {
    type Msg = f64;
    type Acc = f64;

    #[inline]
    fn from_llr(&self, x: f64) -> f64 {
        x
    }

    #[inline]
    fn to_f64(&self, m: f64) -> f64 {
        m
    }

    #[inline]
    fn widen(&self, m: f64) -> f64 {
        m
    }

    #[inline]
    fn add(&self, a: f64, m: f64) -> f64 {
        a + m
    }

    #[inline]
    fn sub(&self, a: f64, m: f64) -> f64 {
        a - m
    }

    #[inline]
    fn add_acc(&self, a: f64, b: f64) -> f64 {
        a + b
    }

    #[inline]
    fn zero_acc(&self) -> f64 {
        0.0
    }

    #[inline]
    fn narrow(&self, a: f64) -> f64 {
        a
    }

    #[inline]
    fn is_one(&self, m: f64) -> bool {
        m < 0.0
    }

    fn check_extrinsic(&self, cross: Option<f64>, inputs: &[f64], out: &mut [f64]) {
        self.check_extrinsic_total(cross, inputs, out);
    }

    fn check_total(&self, inputs: &[f64]) -> f64 {
        from_product(inputs.iter().map(|&x| half_tanh(x)).product())
    }

    fn check_extrinsic_total(&self, cross: Option<f64>, inputs: &[f64], out: &mut [f64]) -> f64 {
        let d = inputs.len();
        debug_assert!(d <= MAX_CHECK_DEGREE && out.len() == d);
        let mut t = [0.0f64; MAX_CHECK_DEGREE];
        for (ti, &x) in t.iter_mut().zip(inputs) {
            *ti = half_tanh(x);
        }
        // out[k] holds the prefix product, then the running suffix multiplies in
        let mut acc = cross.map_or(1.0, half_tanh);
        for k in 0..d {
            out[k] = acc;
            acc *= t[k];
        }
        let mut suffix = 1.0;
        for k in (0..d).rev() {
            let p = out[k] * suffix;
            out[k] = from_product(p);
            suffix *= t[k];
        }
        from_product(suffix)
    }
}

/// Saturating fixed point with a LUT check-node core.
///
/// Check nodes fold the table left to right in fixed order: the cross message
/// first (when present), then the inputs by ascending variable index, skipping
/// the destination edge. Variable-node sums use an `i32` accumulator and are
/// saturated only when stored.
#[derive(Clone, Copy, Debug)]
pub struct FixedArith<'a> {
    lut: &'a TanhLut,
    format: FixedFormat,
}

impl<'a> FixedArith<'a> {
    pub fn new(lut: &'a TanhLut) -> Self {
        Self {
            lut,
            format: lut.format(),
        }
    }

    pub fn q6() -> FixedArith<'static> {
        FixedArith::new(TanhLut::q6())
    }

    pub fn format(&self) -> FixedFormat {
        self.format
    }
}

impl Arithmetic for FixedArith<'_> {
    type Msg = QValue;
    type Acc = i32;

    #[inline]
    fn from_llr(&self, x: f64) -> QValue {
        // NaN LLRs are rejected before decoding starts
        self.format.quantize_lossy(x)
    }

    #[inline]
    fn to_f64(&self, m: QValue) -> f64 {
        self.format.to_f64(m)
    }

    #[inline]
    fn widen(&self, m: QValue) -> i32 {
        m.0 as i32
    }

    #[inline]
    fn add(&self, a: i32, m: QValue) -> i32 {
        a + m.0 as i32
    }

    #[inline]
    fn sub(&self, a: i32, m: QValue) -> i32 {
        a - m.0 as i32
    }

    #[inline]
    fn add_acc(&self, a: i32, b: i32) -> i32 {
        a + b
    }

    #[inline]
    fn zero_acc(&self) -> i32 {
        0
    }

    #[inline]
    fn narrow(&self, a: i32) -> QValue {
        self.format.saturate(a)
    }

    #[inline]
    fn is_one(&self, m: QValue) -> bool {
        m.0 < 0
    }

    fn check_extrinsic(&self, cross: Option<QValue>, inputs: &[QValue], out: &mut [QValue]) {
        // out[k] = fold(cross, inputs[..k], inputs[k+1..]); the prefix folds
        // are shared, so the left-to-right order is unchanged
        let d = inputs.len();
        let mut prefix = cross;
        for k in 0..d {
            let mut acc = prefix;
            for &v in &inputs[k + 1..] {
                acc = Some(acc.map_or(v, |a| self.lut.get(a, v)));
            }
            out[k] = acc.unwrap_or(QValue(self.format.max_code() as i8));
            prefix = Some(prefix.map_or(inputs[k], |a| self.lut.get(a, inputs[k])));
        }
    }

    fn check_total(&self, inputs: &[QValue]) -> QValue {
        self.lut.fold(inputs.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct evaluation of the check-node formula, one output at a time.
    fn scalar_extrinsic(cross: Option<f64>, inputs: &[f64], k: usize) -> f64 {
        let mut p = cross.map_or(1.0, |c| (c / 2.0).tanh());
        for (i, &x) in inputs.iter().enumerate() {
            if i != k {
                p *= (x / 2.0).tanh();
            }
        }
        2.0 * p.atanh()
    }

    #[test]
    fn zero_input_annihilates() {
        let mut out = [9.0; 3];
        FloatArith.check_extrinsic(None, &[0.0, 1.5, -2.0], &mut out);
        assert_eq!(out[1], 0.0);
        assert_eq!(out[2], 0.0);
        assert!(out[0] != 0.0);
    }

    #[test]
    fn zero_cross_annihilates() {
        let mut out = [9.0; 2];
        FloatArith.check_extrinsic(Some(0.0), &[2.0, 2.0], &mut out);
        assert_eq!(out, [0.0, 0.0]);
    }

    #[test]
    fn degree_two_passes_through() {
        let mut out = [0.0; 2];
        FloatArith.check_extrinsic(None, &[1.25, -3.5], &mut out);
        assert!((out[0] + 3.5).abs() < 1e-12);
        assert!((out[1] - 1.25).abs() < 1e-12);
    }

    #[test]
    fn cross_message_case() {
        let mut out = [0.0; 2];
        FloatArith.check_extrinsic(Some(4.0), &[2.0, 2.0], &mut out);
        let want = 2.0 * ((2.0f64).tanh() * (1.0f64).tanh()).atanh();
        assert!((out[0] - want).abs() < 1e-12);
        assert!((out[1] - want).abs() < 1e-12);
        assert!((out[0] - scalar_extrinsic(Some(4.0), &[2.0, 2.0], 0)).abs() < 1e-12);
    }

    #[test]
    fn saturated_cross_is_neutral() {
        let inputs = [1.3, -0.7, 2.2, 4.1];
        let mut with = [0.0; 4];
        let mut without = [0.0; 4];
        FloatArith.check_extrinsic(Some(1e6), &inputs, &mut with);
        FloatArith.check_extrinsic(None, &inputs, &mut without);
        assert_eq!(with, without);
    }

    #[test]
    fn saturation_keeps_values_finite() {
        let mut out = [0.0; 3];
        FloatArith.check_extrinsic(None, &[1e9, -1e9, 1e9], &mut out);
        assert!(out.iter().all(|v| v.is_finite() && v.abs() <= LLR_MAX));
        assert_eq!(out[0], -LLR_MAX);
        assert!(FloatArith.check_total(&[1e9, 1e9]).is_finite());
    }

    #[test]
    fn random_degree_five_matches_scalar_formula() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..2000 {
            let inputs: Vec<f64> = (0..5).map(|_| rng.random_range(-6.0..6.0)).collect();
            let cross = rng.random_bool(0.5).then(|| rng.random_range(-6.0..6.0));
            let mut out = [0.0; 5];
            FloatArith.check_extrinsic(cross, &inputs, &mut out);
            for (k, &o) in out.iter().enumerate() {
                let want = scalar_extrinsic(cross, &inputs, k);
                assert!((o - want).abs() < 1e-12, "{o} vs {want}");
            }
            let total = FloatArith.check_total(&inputs);
            let want = 2.0 * inputs.iter().map(|x| (x / 2.0).tanh()).product::<f64>().atanh();
            assert!((total - want).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_fold_order_is_cross_then_ascending() {
        let a = FixedArith::q6();
        let lut = TanhLut::q6();
        let inputs = [QValue(12), QValue(-7), QValue(20)];
        let mut out = [QValue(0); 3];
        a.check_extrinsic(Some(QValue(9)), &inputs, &mut out);
        assert_eq!(out[0], lut.get(lut.get(QValue(9), QValue(-7)), QValue(20)));
        assert_eq!(out[1], lut.get(lut.get(QValue(9), QValue(12)), QValue(20)));
        assert_eq!(out[2], lut.get(lut.get(QValue(9), QValue(12)), QValue(-7)));
        assert_eq!(
            a.check_total(&inputs),
            lut.get(lut.get(QValue(12), QValue(-7)), QValue(20))
        );
    }

    #[test]
    fn fixed_sums_saturate_only_on_store() {
        let a = FixedArith::q6();
        let acc = a.add(a.add(a.widen(QValue(30)), QValue(30)), QValue(-40));
        assert_eq!(acc, 20);
        assert_eq!(a.narrow(acc), QValue(20));
        assert_eq!(a.narrow(a.add(acc, QValue(31))), QValue(31));
        assert_eq!(a.narrow(-1000), QValue(-32));
    }
}
