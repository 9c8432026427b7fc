//! Shared inputs for the benchmarks.

use g2census::census::enumerate;
use g2census::{EnumerateConfig, Origami, Stratum};

/// The full H(1,1) census with `n` squares, as benchmark input.
pub fn h11_surfaces(n: usize) -> Vec<Origami> {
    enumerate(n, Stratum::H11, &EnumerateConfig::default()).expect("small census")
}
