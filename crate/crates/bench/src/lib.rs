//! Instances shared by the criterion benchmarks.

use codegree::blowup::{build_blowup, BlowupSpec};
use codegree::steiner::{generate_steiner, SteinerSystem};
use codegree::Hypergraph;

/// A restart-minimized Steiner triple packing on `m` points.
pub fn steiner_triples(m: usize, seed: u64) -> SteinerSystem {
    generate_steiner(m, 3, 4, seed).expect("valid steiner parameters")
}

/// Blowup of a Steiner triple packing with classes of size `d`.
pub fn blowup_instance(m: usize, d: usize, seed: u64) -> Hypergraph {
    let spec = BlowupSpec::new(steiner_triples(m, seed), d, false).expect("valid blowup spec");
    build_blowup(&spec)
}
