//! Shared fixtures for the benchmarks.

use hodgelab_core::generators::{gen_example_5_2, gen_lattice, Adjacency, Generated, Parity, TreeShape};
use hodgelab_core::{Cochain, WeightedComplex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Freudenthal patch of `Z^d` truncated at `radius`, with all simplices up to `d`.
pub fn lattice(d: usize, radius: i64) -> Generated {
    gen_lattice(d, d, radius, Adjacency::Freudenthal).expect("valid lattice parameters")
}

/// Refined tree with quadratic offspring, spine-shaped so depth stays cheap.
pub fn quadratic_tree(depth: usize) -> Generated {
    gen_example_5_2(depth, "n^2".parse().unwrap(), Parity::Even, Some(TreeShape::Spine { width: 2 }))
        .expect("valid tree parameters")
}

/// Seeded random cochains in every degree.
pub fn random_forms(complex: &WeightedComplex, seed: u64) -> Vec<Cochain> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..=complex.max_degree()).map(|i| Cochain::random(complex, i, &mut rng)).collect()
}
