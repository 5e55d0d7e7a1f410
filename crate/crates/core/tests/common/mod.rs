#![allow(dead_code)]

use num_complex::Complex64;
use pu_core::params::TwoOscillatorParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Complex64 {
    c(rng.random_range(lo..hi), rng.random_range(-0.5..0.5))
}

/// Complex masses and frequencies with well separated squared frequencies.
pub fn random_two_oscillator(rng: &mut ChaCha8Rng) -> TwoOscillatorParams {
    loop {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let p = TwoOscillatorParams::new(
            random_complex(rng, 0.5, 2.0),
            random_complex(rng, 0.5, 2.0) * sign,
            random_complex(rng, 0.5, 1.5),
            random_complex(rng, 1.7, 3.0),
        );
        if p.gap().norm() > 0.5 {
            return p;
        }
    }
}
