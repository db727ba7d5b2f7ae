//! Bipartite matching in the presence of a group symmetry.
//!
//! The crate revolves around one reduction: an infinite bipartite graph with
//! a free action of a group `G` on both sides is presented by finitely many
//! edge orbits, and questions about perfect matchings transfer back and forth
//! between the infinite graph, its finite factor (one vertex per orbit), and
//! finite materialized windows. Around that core sit:
//!
//! - [`bigraph`]: finite bipartite graphs, Hopcroft–Karp matching, Hall
//!   condition checks with violation witnesses, bottleneck matchings.
//! - [`groups`]: the supported symmetry groups — ℤ^d, ℤ_n, and free groups —
//!   with canonical element serialization, finite subsets, and balls.
//! - [`symmetry`]: orbit-presented graphs, factor graphs, lifting and
//!   projecting matchings, window materialization with interior tracking,
//!   and Hall probes over growing windows.
//! - [`amenability`]: Følner-style almost-invariance ratios for subsets, and
//!   paradoxical decompositions of the rank-2 free group with a window
//!   verifier.
//! - [`counterexample`]: a proper symmetric graph whose factor has a perfect
//!   matching while the graph itself has none — the Latin-square twist over a
//!   paradoxical decomposition — with certificates for both halves.
//! - [`twinlattice`]: ℤ² against a rotated, translated copy of itself;
//!   periodic quotients, exact bottleneck bounds, and windowed lower bounds
//!   for irrational angles.
//! - [`oracle`]: slow, obviously-correct reference implementations the test
//!   suites compare against.
//! - [`corpus`]: seeded random instance generators for tests and benchmarks.

pub mod amenability;
pub mod bigraph;
pub mod corpus;
pub mod counterexample;
pub mod error;
pub mod groups;
pub mod oracle;
pub mod symmetry;
pub mod twinlattice;

pub use bigraph::{
    Bottleneck, FiniteBigraph, HallOutcome, HallWitness, Matching, Side,
};
pub use error::{Error, Result};
pub use groups::{FiniteSubset, GroupDescriptor, GroupElem};
pub use symmetry::{FactorGraph, Materialized, SymGraph, SymMatching, Triple};
pub use twinlattice::{
    BottleneckOutcome, IrrationalReport, RationalPoint, RationalRotation, TwinQuotient,
};

/// Serde adapter rendering rationals as `"num/den"` strings (a plain integer
/// string when the denominator is 1), so exact values stay exact in JSON.
pub mod ratio_string {
    use std::fmt::Display;
    use std::str::FromStr;

    use num_integer::Integer;
    use num_rational::Ratio;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S, T>(r: &Ratio<T>, s: S) -> Result<S::Ok, S::Error>
    where
        S: Serializer,
        T: Clone + Integer + Display,
    {
        s.collect_str(r)
    }

    pub fn deserialize<'de, D, T>(d: D) -> Result<Ratio<T>, D::Error>
    where
        D: Deserializer<'de>,
        T: Clone + Integer + FromStr,
    {
        let text = String::deserialize(d)?;
        text.parse::<Ratio<T>>()
            .map_err(|_| de::Error::custom(format!("not a rational number: {text:?}")))
    }
}
