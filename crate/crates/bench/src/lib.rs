//! Benchmark inputs shared by the criterion benches.

use linext_core::families::{antichain, bit_example, komlos_chains, random_poset};
use linext_core::Poset;

/// Named posets of increasing lattice size.
pub fn workloads() -> Vec<(&'static str, Poset)> {
    vec![
        ("antichain-12", antichain(12).unwrap()),
        ("komlos-3", komlos_chains(3).unwrap()),
        ("bit-3", bit_example(3).unwrap()),
        ("random-16", random_poset(16, 0.2, 1).unwrap()),
    ]
}
