//! Shared fixtures for the criterion benchmarks.

use efx_core::gen::{generate, GenParams};
use efx_core::Instance;

/// Seeded 3-class additive instance with values in `[1, 100]`.
pub fn instance(n: usize, m: usize, seed: u64) -> Instance {
    generate(&GenParams::additive(n, m, 3, 100, seed)).expect("valid generator parameters")
}
