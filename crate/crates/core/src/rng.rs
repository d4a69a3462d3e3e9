//! Splittable random streams.
//!
//! A stream is identified by a master seed and a derivation path. The seed of
//! a child is the first eight bytes of SHA-256 over the parent seed and the
//! path element, so children never depend on how much of the parent has been
//! consumed. Two streams with the same `(master_seed, path)` produce the same
//! sequence regardless of thread scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    path: Vec<u64>,
    seed: u64,
    inner: ChaCha12Rng,
}

impl RngStream {
    pub fn new(master_seed: u64) -> Self {
        Self::from_parts(master_seed, Vec::new(), master_seed)
    }

    fn from_parts(master_seed: u64, path: Vec<u64>, seed: u64) -> Self {
        Self {
            master_seed,
            path,
            seed,
            inner: ChaCha12Rng::seed_from_u64(seed),
        }
    }

    /// Derive the child stream at `index`. Independent of the parent's state.
    pub fn child(&self, index: u64) -> Self {
        let mut path = self.path.clone();
        path.push(index);
        Self::from_parts(self.master_seed, path, mix_seed(self.seed, index))
    }

    /// Derive a descendant along several path elements.
    pub fn derive(&self, path: &[u64]) -> Self {
        path.iter().fold(self.clone_fresh(), |s, &i| s.child(i))
    }

    /// The same stream rewound to its start.
    pub fn clone_fresh(&self) -> Self {
        Self::from_parts(self.master_seed, self.path.clone(), self.seed)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn mix_seed(parent: u64, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(parent.to_le_bytes());
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn same_path_same_sequence() {
        let mut a = RngStream::new(7).derive(&[3, 1]);
        let mut b = RngStream::new(7).child(3).child(1);
        let xs: Vec<u64> = (0..16).map(|_| a.next_u64()).collect();
        let ys: Vec<u64> = (0..16).map(|_| b.next_u64()).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn child_ignores_parent_consumption() {
        let mut parent = RngStream::new(11);
        let before = parent.child(4).next_u64();
        for _ in 0..100 {
            parent.random::<f64>();
        }
        assert_eq!(parent.child(4).next_u64(), before);
        assert_eq!(parent.child(4).path(), &[4]);
    }

    #[test]
    fn siblings_differ() {
        let root = RngStream::new(1);
        assert_ne!(root.child(0).next_u64(), root.child(1).next_u64());
        assert_ne!(root.child(0).seed(), RngStream::new(0).seed());
    }
}
