//! Seeded, counter-addressed random draws.
//!
//! Every draw is addressed by `(seed, index)`: the generator is ChaCha20
//! (`rand_chacha::ChaCha20Rng::seed_from_u64(seed)`) positioned at word
//! `2 * index`, and one `u64` is read and mapped to `[0, 1)` with 53 bits.
//! Values therefore do not depend on how many other draws were made, so a
//! datum restricted to a larger or smaller frequency window keeps the same
//! phases on the common modes.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::spectral::{Field, Lattice};

/// Zigzag index of a signed frequency: `0, -1, 1, -2, 2, ...` map to `0, 1, 2, 3, 4, ...`.
pub fn zigzag(k: i64) -> u64 {
    ((k << 1) ^ (k >> 63)) as u64
}

/// Uniform draw in `[0, 1)` at counter `index` of stream `seed`.
pub fn uniform_at(seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_word_pos(2 * index as u128);
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

/// Unit phase `e^{i theta_k}` with `theta_k` uniform on `[0, 2 pi)`.
pub fn phase_for(seed: u64, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * uniform_at(seed, zigzag(k)))
}

/// Physical field with independent real and imaginary parts uniform on `[-1, 1)`.
pub fn random_field(lattice: Lattice, seed: u64) -> Field {
    let values = lattice
        .indices()
        .map(|j| {
            let i = zigzag(j);
            Complex64::new(
                2.0 * uniform_at(seed, 2 * i) - 1.0,
                2.0 * uniform_at(seed, 2 * i + 1) - 1.0,
            )
        })
        .collect();
    Field::physical(lattice, values).expect("length matches lattice")
}
