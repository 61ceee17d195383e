//! Deterministic random-number streams.
//!
//! All randomness in the crate flows through [`RngStream`], a counter-based
//! ChaCha12 generator addressed by a `(seed, stream_id)` pair. Equal pairs
//! reproduce bit-identical sequences across runs; distinct stream ids give
//! statistically independent streams, which is how parallel Monte Carlo
//! workers stay deterministic regardless of scheduling.

use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha12Rng,
    spare_normal: Option<f64>,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RngStream {
            seed,
            stream_id,
            rng,
            spare_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform draw in (0, 1]; safe as a Box-Muller log argument.
    pub fn next_open_f64(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) + 1) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Pair of independent standard normal draws (Box-Muller transform).
    pub fn next_normal_pair(&mut self) -> (f64, f64) {
        let u1 = self.next_open_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let th = 2.0 * std::f64::consts::PI * u2;
        (r * th.cos(), r * th.sin())
    }

    /// Single standard normal draw; the Box-Muller partner is cached so no
    /// entropy is discarded.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(v) = self.spare_normal.take() {
            return v;
        }
        let (a, b) = self.next_normal_pair();
        self.spare_normal = Some(b);
        a
    }

    /// Circularly symmetric complex Gaussian with unit total variance,
    /// CN(0, 1): each component is N(0, 1/2).
    pub fn next_std_complex(&mut self) -> Complex64 {
        let (a, b) = self.next_normal_pair();
        Complex64::new(a, b) * std::f64::consts::FRAC_1_SQRT_2
    }
}
