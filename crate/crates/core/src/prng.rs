//! MiniSAT's pseudo-random generator.
//!
//! The state is a double in `(0, 2147483647)`. Each step multiplies by
//! 1389796 and reduces modulo 2147483647, with the quotient truncated toward
//! zero via an `i32` cast exactly as MiniSAT 2.2 does. Runs that consume the
//! stream in the same order therefore reproduce bit for bit.

/// MiniSAT 2.2's default `random_seed`.
pub const DEFAULT_SEED: f64 = 91648253.0;

const MODULUS: f64 = 2147483647.0;
const MULTIPLIER: f64 = 1389796.0;

#[derive(Debug, Clone, PartialEq)]
pub struct Rng {
    seed: f64,
}

impl Default for Rng {
    fn default() -> Self {
        Rng { seed: DEFAULT_SEED }
    }
}

impl Rng {
    /// Seeds from a configuration integer.
    ///
    /// Integers are reduced into `1..2147483647` so the invariant on the state
    /// holds from the start; 0 maps to the default seed.
    pub fn new(seed: u64) -> Rng {
        let s = seed % 2147483647;
        if s == 0 {
            Rng::default()
        } else {
            Rng { seed: s as f64 }
        }
    }

    pub fn state(&self) -> f64 {
        self.seed
    }

    /// Next value in `[0, 1)`.
    pub fn drand(&mut self) -> f64 {
        self.seed *= MULTIPLIER;
        let q = (self.seed / MODULUS) as i32;
        self.seed -= q as f64 * MODULUS;
        self.seed / MODULUS
    }

    /// Next integer in `[0, size)`; consumes one [`drand`](Rng::drand) step.
    ///
    /// Panics if `size == 0`.
    pub fn irand(&mut self, size: u32) -> u32 {
        assert!(size > 0, "irand needs a nonempty range");
        (self.drand() * size as f64) as u32
    }
}
