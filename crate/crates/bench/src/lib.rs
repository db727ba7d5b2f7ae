//! Shared fixtures for the criterion benches.
//!
//! Both bench targets draw their instances from here so that numbers stay
//! comparable across targets and across runs: every generator is seeded, and
//! the seeds mix in the size parameter so different sizes do not see shifted
//! copies of the same randomness.

use num_rational::Ratio;
use symmatch::corpus;
use symmatch::groups::{self, GroupDescriptor};
use symmatch::{FiniteBigraph, FiniteSubset, RationalRotation, SymGraph};

/// Sparse instances hold the expected degree near 8 as `n` grows, the regime
/// where augmenting-path search dominates over edge scanning.
pub fn sparse_bigraph(n: usize) -> FiniteBigraph {
    let mut rng = corpus::seeded_rng(0xB0B_0001 ^ n as u64);
    corpus::random_bigraph(&mut rng, n, n, (8.0 / n as f64).min(1.0))
}

/// Dense instances at a flat 50% edge probability.
pub fn dense_bigraph(n: usize) -> FiniteBigraph {
    let mut rng = corpus::seeded_rng(0xB0B_0002 ^ n as u64);
    corpus::random_bigraph(&mut rng, n, n, 0.5)
}

/// A proper symmetric graph over ℤ² with a perfect-matching backbone.
pub fn lattice_symgraph(orbits: usize) -> SymGraph {
    let mut rng = corpus::seeded_rng(0xB0B_0003 ^ orbits as u64);
    corpus::random_proper_symgraph(
        &mut rng,
        GroupDescriptor::Zd { d: 2 },
        orbits,
        orbits + 4,
        false,
    )
}

/// The square window of the given radius on ℤ² (side `2·radius + 1`).
pub fn box_window(radius: u64) -> FiniteSubset {
    groups::zd_box(2, 2 * radius + 1).expect("rank and side are valid")
}

/// A rotation by the (p, q, c) Pythagorean angle, no translation.
pub fn pythagorean_rotation(p: i64, q: i64, c: i64) -> RationalRotation {
    RationalRotation::new(p, q, c, (Ratio::from_integer(0), Ratio::from_integer(0)))
        .expect("a Pythagorean triple")
}
