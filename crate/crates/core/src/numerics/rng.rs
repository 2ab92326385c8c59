use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::Vector4;
use crate::scalar::Real;

/// Seeded random stream: ChaCha8 keyed by a 64-bit seed, with the ChaCha
/// stream id selecting an independent substream.
///
/// Work that is split into chunks gives each chunk its own `stream` index,
/// so the numbers a chunk sees do not depend on which thread runs it or in
/// what order. Samples are drawn in `f64` and rounded to the target scalar,
/// so `f32` and `f64` runs consume the generator identically.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A standard normal deviate.
    pub fn gaussian<T: Real>(&mut self) -> T {
        let x: f64 = self.rng.sample(StandardNormal);
        T::lit(x)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform<T: Real>(&mut self) -> T {
        let x: f64 = self.rng.random();
        T::lit(x)
    }

    pub fn gaussian_vector4<T: Real>(&mut self) -> Vector4<T> {
        Vector4([
            self.gaussian(),
            self.gaussian(),
            self.gaussian(),
            self.gaussian(),
        ])
    }

    /// Uniformly distributed unit vector in `R^N`.
    pub fn unit_vector<T: Real, const N: usize>(&mut self) -> [T; N] {
        loop {
            let v: [T; N] = std::array::from_fn(|_| self.gaussian());
            let n = v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
            if n > T::tol(1e-8) {
                return v.map(|x| x / n);
            }
        }
    }
}

/// Derives a well-spread seed for item `index` of a run seeded with `seed`
/// (SplitMix64 finalizer over the pair).
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
