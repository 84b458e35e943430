//! Seeded bit interleaver.
//!
//! The permutation is part of the wire contract, so its construction is fixed
//! bit-for-bit: a Fisher–Yates shuffle of the identity array driven by the
//! splitmix64 sequence seeded with the interleaver seed, where step `i`
//! (ascending, `i = 1..len`) swaps position `i` with `j = output mod (i+1)`.
//! Interleaving gathers: output position `i` takes the input at `perm[i]`.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use alloc::vec::Vec;

/// A fixed permutation and its inverse application.
#[derive(Debug, Clone)]
pub struct Permutation {
    forward: Vec<u32>,
}

impl Permutation {
    /// Builds the seeded permutation of the given length.
    pub fn from_seed(len: usize, seed: u64) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidArgument("permutation length must be nonzero"));
        }
        if len > u32::MAX as usize {
            return Err(Error::InvalidArgument("permutation length exceeds u32 range"));
        }
        let mut forward: Vec<u32> = (0..len as u32).collect();
        let mut rng = SplitMix64::new(seed);
        for i in 1..len {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            forward.swap(i, j);
        }
        Ok(Self { forward })
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    /// Source index feeding output position `i`.
    pub fn source_of(&self, i: usize) -> usize {
        self.forward[i] as usize
    }

    /// Permutes: `out[i] = src[perm[i]]`.
    pub fn apply<T: Copy>(&self, src: &[T]) -> Result<Vec<T>> {
        if src.len() != self.forward.len() {
            return Err(Error::LengthMismatch {
                what: "interleaver input",
                expected: self.forward.len(),
                got: src.len(),
            });
        }
        Ok(self.forward.iter().map(|&p| src[p as usize]).collect())
    }

    /// Inverts [`Permutation::apply`] exactly: `out[perm[i]] = src[i]`.
    pub fn invert<T: Copy + Default>(&self, src: &[T]) -> Result<Vec<T>> {
        if src.len() != self.forward.len() {
            return Err(Error::LengthMismatch {
                what: "deinterleaver input",
                expected: self.forward.len(),
                got: src.len(),
            });
        }
        let mut out = alloc::vec![T::default(); src.len()];
        for (i, &p) in self.forward.iter().enumerate() {
            out[p as usize] = src[i];
        }
        Ok(out)
    }
}

/// One-shot interleave with the permutation seeded by `seed`.
pub fn interleave<T: Copy>(v: &[T], seed: u64) -> Result<Vec<T>> {
    Permutation::from_seed(v.len(), seed)?.apply(v)
}

/// Exact inverse of [`interleave`] under the same seed.
pub fn deinterleave<T: Copy + Default>(v: &[T], seed: u64) -> Result<Vec<T>> {
    Permutation::from_seed(v.len(), seed)?.invert(v)
}
