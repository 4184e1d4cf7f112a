//! Seed derivation. Every random stream in the toolkit is a ChaCha8 generator
//! keyed by a 64-bit seed derived from a master seed and a path of labels, so
//! independent consumers never share or perturb each other's streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn label_hash(label: &str) -> u64 {
    // FNV-1a
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// A node in the seed tree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeedPath(u64);

impl SeedPath {
    pub fn new(seed: u64) -> Self {
        SeedPath(splitmix(seed))
    }

    pub fn child(self, label: &str) -> Self {
        SeedPath(splitmix(self.0 ^ label_hash(label)))
    }

    pub fn index(self, k: u64) -> Self {
        SeedPath(splitmix(self.0.wrapping_add(splitmix(k ^ 0x5851_F42D_4C95_7F2D))))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
