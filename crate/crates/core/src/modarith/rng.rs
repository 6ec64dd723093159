use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use sha2::{Digest, Sha256};

/// Seeded ChaCha20 stream. The 256-bit seed is kept so every derived value
/// can be traced back to it.
#[derive(Debug, Clone)]
pub struct RngHandle {
    seed: [u8; 32],
    stream: ChaCha20Rng,
}

impl RngHandle {
    pub fn from_seed(seed: [u8; 32]) -> Self {
        Self {
            seed,
            stream: ChaCha20Rng::from_seed(seed),
        }
    }

    /// Expands a 64-bit experiment seed into a full 256-bit seed.
    pub fn from_u64(seed: u64) -> Self {
        let mut h = Sha256::new();
        h.update(b"encctl/seed/v1");
        h.update(seed.to_le_bytes());
        Self::from_seed(h.finalize().into())
    }

    pub fn seed(&self) -> [u8; 32] {
        self.seed
    }

    pub fn seed_hex(&self) -> String {
        hex::encode(self.seed)
    }

    /// Derives an independent handle from this handle's seed. The parent stream
    /// is not advanced, so children are a pure function of `(seed, label, index)`.
    pub fn child(&self, label: &str, index: u64) -> RngHandle {
        let mut h = Sha256::new();
        h.update(b"encctl/child/v1");
        h.update(self.seed);
        h.update((label.len() as u64).to_le_bytes());
        h.update(label.as_bytes());
        h.update(index.to_le_bytes());
        Self::from_seed(h.finalize().into())
    }

    pub fn next_u64(&mut self) -> u64 {
        self.stream.next_u64()
    }

    pub fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.stream.fill_bytes(dest)
    }

    pub fn coin(&mut self) -> bool {
        self.stream.next_u32() & 1 == 1
    }

    /// Uniform value in `[0, 1)` with 53 bits of precision.
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

impl RngCore for RngHandle {
    fn next_u32(&mut self) -> u32 {
        self.stream.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.stream.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.stream.fill_bytes(dest)
    }
}
