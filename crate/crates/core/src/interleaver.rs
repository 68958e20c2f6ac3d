//! Source-side interleavers.
//!
//! The regular UEP interleaver steers even source positions into a protected
//! range of the frame and odd positions into the rest, both in order. The
//! random interleaver is a seeded Fisher-Yates permutation.

use std::ops::Range;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::BitVector;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterleaverKind {
    #[default]
    None,
    RegularUep,
    Random,
}

impl std::str::FromStr for InterleaverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "regular-uep" | "uep" => Ok(Self::RegularUep),
            "random" => Ok(Self::Random),
            other => Err(Error::InvalidInput(format!("unknown interleaver {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InterleaverSpec {
    pub kind: InterleaverKind,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    /// Output positions that receive the even input indices (regular-uep
    /// only). Defaults to the first half of the frame.
    #[serde(default)]
    pub protected_region: Option<Range<usize>>,
}

impl InterleaverSpec {
    pub fn none(n: usize) -> Self {
        Self {
            kind: InterleaverKind::None,
            n,
            seed: 0,
            protected_region: None,
        }
    }

    pub fn regular_uep(n: usize) -> Self {
        Self {
            kind: InterleaverKind::RegularUep,
            ..Self::none(n)
        }
    }

    pub fn random(n: usize, seed: u64) -> Self {
        Self {
            kind: InterleaverKind::Random,
            seed,
            ..Self::none(n)
        }
    }

    pub fn protected(&self) -> Range<usize> {
        self.protected_region.clone().unwrap_or(0..self.n / 2)
    }

    /// The permutation as `out[i] = in[perm[i]]`.
    pub fn permutation(&self) -> Result<Vec<usize>> {
        let n = self.n;
        match self.kind {
            InterleaverKind::None => Ok((0..n).collect()),
            InterleaverKind::Random => {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));
                Ok(perm)
            }
            InterleaverKind::RegularUep => {
                if !n.is_multiple_of(2) {
                    return Err(Error::InvalidInput(format!(
                        "regular-uep interleaver needs an even length, got {n}"
                    )));
                }
                let region = self.protected();
                if region.len() != n / 2 || region.end > n {
                    return Err(Error::InvalidInput(format!(
                        "protected region {region:?} must hold exactly n/2 = {} positions of [0, {n})",
                        n / 2
                    )));
                }
                let mut evens = (0..n).step_by(2);
                let mut odds = (1..n).step_by(2);
                Ok((0..n)
                    .map(|i| {
                        let src = if region.contains(&i) { evens.next() } else { odds.next() };
                        src.expect("region holds n/2 positions")
                    })
                    .collect())
            }
        }
    }

    pub fn interleaver(&self) -> Result<Interleaver> {
        Interleaver::new(self.permutation()?)
    }
}

/// A precomputed permutation and its inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interleaver {
    perm: Vec<usize>,
    inverse: Vec<usize>,
}

impl Interleaver {
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let mut inverse = vec![usize::MAX; perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            if p >= perm.len() || inverse[p] != usize::MAX {
                return Err(Error::InvalidInput("not a permutation".into()));
            }
            inverse[p] = i;
        }
        Ok(Self { perm, inverse })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    fn apply(map: &[usize], v: &BitVector) -> Result<BitVector> {
        if v.len() != map.len() {
            return Err(Error::DimensionMismatch {
                op: "interleave",
                expected: map.len(),
                found: v.len(),
            });
        }
        let mut out = BitVector::zeros(map.len());
        for (i, &src) in map.iter().enumerate() {
            if v.get(src) {
                out.set(i, true);
            }
        }
        Ok(out)
    }

    pub fn interleave(&self, v: &BitVector) -> Result<BitVector> {
        Self::apply(&self.perm, v)
    }

    pub fn deinterleave(&self, v: &BitVector) -> Result<BitVector> {
        Self::apply(&self.inverse, v)
    }
}

pub fn interleave(s: &BitVector, spec: &InterleaverSpec) -> Result<BitVector> {
    check_len(s, spec)?;
    spec.interleaver()?.interleave(s)
}

pub fn deinterleave(v: &BitVector, spec: &InterleaverSpec) -> Result<BitVector> {
    check_len(v, spec)?;
    spec.interleaver()?.deinterleave(v)
}

fn check_len(v: &BitVector, spec: &InterleaverSpec) -> Result<()> {
    if v.len() != spec.n {
        return Err(Error::DimensionMismatch {
            op: "interleave",
            expected: spec.n,
            found: v.len(),
        });
    }
    Ok(())
}
