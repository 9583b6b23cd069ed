//! Counter-based random streams: one ChaCha stream per `(seed, stream)` key,
//! so parallel consumers draw identical values regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Integer, Rational};

pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Rational uniform on `[lo, hi)` with resolution `(hi - lo)/2^32`.
pub fn uniform_rational<R: Rng>(rng: &mut R, lo: &Rational, hi: &Rational) -> Rational {
    let k: u32 = rng.gen();
    let width = Rational::from(hi - lo);
    let frac = Rational::from((Integer::from(k), Integer::from(1u64 << 32)));
    lo + width * frac
}

/// Integer uniform on `[lo, hi)`.
pub fn uniform_u64<R: Rng>(rng: &mut R, lo: u64, hi: u64) -> u64 {
    rng.gen_range(lo..hi)
}

/// Float uniform on `[lo, hi)`.
pub fn uniform_f64<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    rng.gen_range(lo..hi)
}
