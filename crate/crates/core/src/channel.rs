//! BPSK over AWGN with LLR demodulation.
//!
//! Noise variance follows from `Eb/N0` and the overall code rate `R` (source
//! bits per channel symbol): `sigma^2 = 1 / (2 R 10^(EbN0/10))`. LLRs are
//! `2y / sigma^2`, positive when bit 0 is more likely.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::gf2::BitVector;

pub const DEFAULT_RATE: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub ebn0_db: f64,
    pub rate: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl ChannelParams {
    pub fn new(ebn0_db: f64, rate: f64, seed: u64) -> Result<Self> {
        if !ebn0_db.is_finite() {
            return Err(Error::InvalidInput(format!("Eb/N0 must be finite, got {ebn0_db}")));
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::InvalidInput(format!("rate must be positive, got {rate}")));
        }
        Ok(Self {
            ebn0_db,
            rate,
            sigma: sigma_for(ebn0_db, rate),
            seed,
        })
    }

    /// Parameters with an explicit noise standard deviation.
    pub fn with_sigma(sigma: f64, seed: u64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self {
            ebn0_db: f64::NAN,
            rate: f64::NAN,
            sigma,
            seed,
        })
    }

    pub fn variance(&self) -> f64 {
        self.sigma * self.sigma
    }
}

pub fn sigma_for(ebn0_db: f64, rate: f64) -> f64 {
    (1.0 / (2.0 * rate * 10f64.powf(ebn0_db / 10.0))).sqrt()
}

/// Bit 0 maps to +1, bit 1 to -1.
pub fn modulate(c: &BitVector) -> Vec<f64> {
    c.iter().map(|b| if b { -1.0 } else { 1.0 }).collect()
}

/// Adds i.i.d. `N(0, sigma^2)` noise drawn from a generator seeded by `params.seed`.
pub fn add_noise(x: &[f64], params: &ChannelParams) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    add_noise_with(x, params.sigma, &mut rng)
}

pub fn add_noise_with(x: &[f64], sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let n: f64 = StandardNormal.sample(rng);
            v + sigma * n
        })
        .collect()
}

pub fn demodulate_llr(y: &[f64], params: &ChannelParams) -> Vec<f64> {
    let scale = 2.0 / params.variance();
    y.iter().map(|&v| scale * v).collect()
}

/// Sign demapper: non-negative samples decide 0.
pub fn hard_decision(y: &[f64]) -> BitVector {
    BitVector::from_bools(&y.iter().map(|&v| v < 0.0).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn bpsk_mapping() {
        let c = BitVector::from_bits([0u8, 1, 0]);
        assert_eq!(modulate(&c), vec![1.0, -1.0, 1.0]);
        assert!(modulate(&BitVector::zeros(5)).iter().all(|&v| v == 1.0));
    }

    #[test]
    fn noiseless_chain_is_identity() {
        let c = BitVector::from_bits([1u8, 0, 0, 1, 1, 0, 1]);
        let p = ChannelParams::with_sigma(1e-3, 0).unwrap();
        let llr = demodulate_llr(&modulate(&c), &p);
        assert_eq!(hard_decision(&llr), c);
    }

    #[test]
    fn sigma_at_zero_db_rate_point_eight() {
        let p = ChannelParams::new(0.0, DEFAULT_RATE, 0).unwrap();
        assert_close(p.variance(), 0.625, 1e-12);
        let llr = demodulate_llr(&[1.0, 0.0, -0.5], &p);
        assert_close(llr[0], 3.2, 1e-12);
        assert_eq!(llr[1], 0.0);
        assert_close(llr[2], -1.6, 1e-12);
    }

    #[test]
    fn sigma_decreases_with_ebn0() {
        let grid = [-10.0, -2.0, -1.5, -1.0, -0.5, 0.0, 3.0];
        for w in grid.windows(2) {
            assert!(sigma_for(w[0], 0.8) > sigma_for(w[1], 0.8));
        }
    }

    #[test]
    fn llr_is_odd_and_linear() {
        let p = ChannelParams::new(-1.0, 0.8, 0).unwrap();
        let y = [0.3, -1.2, 2.5];
        let l = demodulate_llr(&y, &p);
        let neg: Vec<f64> = y.iter().map(|v| -v).collect();
        let ln = demodulate_llr(&neg, &p);
        for (a, b) in l.iter().zip(&ln) {
            assert_eq!(*a, -*b);
        }
        for (a, v) in l.iter().zip(&y) {
            assert_eq!(a.signum(), v.signum());
        }
    }

    #[test]
    fn tiny_sigma_leaves_samples_unchanged() {
        let p = ChannelParams::with_sigma(1e-12, 4).unwrap();
        let x = vec![1.0, -1.0, 1.0];
        for (a, b) in add_noise(&x, &p).iter().zip(&x) {
            assert_close(*a, *b, 1e-9);
        }
    }

    #[test]
    fn noise_is_deterministic_under_seed() {
        let p = ChannelParams::new(-2.0, 0.8, 77).unwrap();
        let x = vec![1.0; 64];
        assert_eq!(add_noise(&x, &p), add_noise(&x, &p));
        let q = ChannelParams { seed: 78, ..p };
        assert_ne!(add_noise(&x, &p), add_noise(&x, &q));
    }

    #[test]
    fn noise_moments() {
        let p = ChannelParams::new(-2.0, 0.8, 1234).unwrap();
        let n = 1_000_000;
        let x = vec![0.0; n];
        let y = add_noise(&x, &p);
        let mean = y.iter().sum::<f64>() / n as f64;
        let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() <= 4.0 * p.sigma / 1000.0, "mean {mean}");
        assert!((var / p.variance() - 1.0).abs() < 0.01, "var {var}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ChannelParams::new(f64::NAN, 0.8, 0).is_err());
        assert!(ChannelParams::new(0.0, 0.0, 0).is_err());
        assert!(ChannelParams::with_sigma(0.0, 0).is_err());
    }
}
