//! Random number streams and random test objects.
//!
//! All randomness goes through [`SimRng`], the ChaCha stream cipher with 8
//! rounds used as a counter-based generator: the 64-bit user seed is
//! expanded into a 256-bit key (`SeedableRng::seed_from_u64`), and every
//! logical consumer gets its own 64-bit stream id under that key. Sample `j`
//! of a simulation always reads stream `j`, so results do not depend on how
//! samples are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::carrier::{Carrier, PointFunction, SubsetMask};
use crate::setfun::{capacity_from_measure, Capacity, MobiusMeasure};

pub type SimRng = ChaCha8Rng;

/// Stream ids at the top of the range are reserved for checkers so they
/// never collide with per-sample simulation streams.
pub mod streams {
    pub const ALTERNATION: u64 = u64::MAX;
    pub const COMONOTONE: u64 = u64::MAX - 1;
    pub const MAX_ALTERNATION: u64 = u64::MAX - 2;
    pub const DOMINATION: u64 = u64::MAX - 3;
    pub const DUAL_SAMPLING: u64 = u64::MAX - 4;
    pub const VERIFY: u64 = u64::MAX - 5;
}

/// Generator for stream `stream` under `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw from `(0, 1]`.
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// A nonnegative vector with mixed scales: about one coordinate in five is
/// zero, the rest are log-uniform over `[e^-3, e^3]`.
pub fn random_point_function<R: Rng + ?Sized>(rng: &mut R, d: usize) -> PointFunction {
    let v = (0..d)
        .map(|_| if rng.random_bool(0.2) { 0.0 } else { rng.random_range(-3.0..3.0f64).exp() })
        .collect();
    PointFunction::new(v).expect("generated values are finite and nonnegative")
}

/// A strictly positive vector, log-uniform over `[e^-2, e^2]` per coordinate.
pub fn random_positive_function<R: Rng + ?Sized>(rng: &mut R, d: usize) -> PointFunction {
    let v = (0..d).map(|_| rng.random_range(-2.0..2.0f64).exp()).collect();
    PointFunction::new(v).expect("generated values are finite and positive")
}

/// A random completely alternating capacity: the capacity of a random
/// nonnegative Möbius measure. Each nonempty subset carries weight with
/// probability `density`.
pub fn random_ca_capacity<R: Rng + ?Sized>(rng: &mut R, carrier: &Carrier, density: f64) -> Capacity {
    let n = carrier.subset_count();
    let mut weights = vec![0.0; n];
    for w in weights.iter_mut().skip(1) {
        if rng.random_bool(density) {
            *w = rng.random::<f64>();
        }
    }
    if weights.iter().all(|w| *w == 0.0) {
        weights[rng.random_range(1..n)] = 1.0;
    }
    let nu = MobiusMeasure::new(carrier.clone(), weights).expect("weights are finite");
    capacity_from_measure(&nu).expect("nonnegative weights give a valid capacity")
}

/// A random table with `θ(∅) = 0` and entries uniform on `[0, scale)`; not
/// necessarily monotone or completely alternating.
pub fn random_table<R: Rng + ?Sized>(rng: &mut R, carrier: &Carrier, scale: f64) -> Capacity {
    Capacity::from_fn(carrier.clone(), |k| if k.is_empty() { 0.0 } else { scale * rng.random::<f64>() })
        .expect("entries are finite and nonnegative")
}

/// A uniformly random nonempty subset of a `d`-point carrier.
pub fn random_nonempty_mask<R: Rng + ?Sized>(rng: &mut R, d: usize) -> SubsetMask {
    SubsetMask(rng.random_range(1..(1u32 << d)))
}
