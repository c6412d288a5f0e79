//! Seeded random streams shared by the optimizer restarts, the shot
//! simulator and the random state constructors.
//!
//! Every stream is a ChaCha8 keystream addressed by `(seed, stream)`. ChaCha is
//! counter based, so stream `k` for a given seed is the same sequence no matter
//! which thread asks for it or in which order.

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type StreamRng = ChaCha8Rng;

pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform direction on the unit sphere from a normalized Gaussian triple.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R) -> Vector3<f64> {
    loop {
        let g = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        let norm = g.norm();
        if norm > 1e-12 {
            return g / norm;
        }
    }
}
