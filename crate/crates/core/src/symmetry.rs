//! Bipartite graphs carrying a free group action, presented finitely by
//! orbit triples.
//!
//! Both vertex sides are disjoint unions of copies of a group `G`: a left
//! vertex is a pair `(h, i)` with `h ∈ G` and `i` an orbit index, and `G`
//! acts by left multiplication on the first component. A triple `(i, g, j)`
//! presents the full edge orbit
//!
//! ```text
//!     (h, i) -- (h∘g, j)      for every h in G,
//! ```
//!
//! so finitely many triples describe an infinite, `G`-invariant edge set.
//! Everything downstream — factor graphs, window materializations, the
//! lift/project correspondence — is phrased against this convention.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::bigraph::{self, FiniteBigraph, HallOutcome, HallWitness, Matching, Side};
use crate::error::{Error, Result};
use crate::groups::{compose, inverse, product_set, FiniteSubset, GroupDescriptor, GroupElem};

/// One orbit of edges: `(h, a) -- (h∘g, b)` for all `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triple {
    pub a: usize,
    pub g: GroupElem,
    pub b: usize,
}

/// A `G`-symmetric bipartite graph given by orbit counts and edge triples.
///
/// Validation canonicalizes the elements (so e.g. two residues that are equal
/// mod `n` cannot masquerade as distinct triples) and rejects exact
/// duplicates; triples are kept sorted by `(a, serialized g, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymGraph {
    descriptor: GroupDescriptor,
    a_orbits: usize,
    b_orbits: usize,
    triples: Vec<Triple>,
}

impl SymGraph {
    pub fn new(
        descriptor: GroupDescriptor,
        a_orbits: usize,
        b_orbits: usize,
        triples: Vec<(usize, GroupElem, usize)>,
    ) -> Result<Self> {
        let mut out = Vec::with_capacity(triples.len());
        for (a, g, b) in triples {
            if a >= a_orbits {
                return Err(Error::IndexOutOfBounds {
                    side: "left",
                    index: a,
                    size: a_orbits,
                });
            }
            if b >= b_orbits {
                return Err(Error::IndexOutOfBounds {
                    side: "right",
                    index: b,
                    size: b_orbits,
                });
            }
            descriptor.validate(&g)?;
            out.push(Triple { a, g, b });
        }
        out.sort_by(|s, t| {
            (s.a, s.g.to_string(), s.b).cmp(&(t.a, t.g.to_string(), t.b))
        });
        for w in out.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateTriple {
                    a: w[0].a,
                    g: w[0].g.to_string(),
                    b: w[0].b,
                });
            }
        }
        Ok(SymGraph {
            descriptor,
            a_orbits,
            b_orbits,
            triples: out,
        })
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn a_orbits(&self) -> usize {
        self.a_orbits
    }

    pub fn b_orbits(&self) -> usize {
        self.b_orbits
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }
}

#[derive(Serialize, Deserialize)]
struct SymGraphRepr {
    group: GroupDescriptor,
    a_orbits: usize,
    b_orbits: usize,
    triples: Vec<(usize, String, usize)>,
}

impl Serialize for SymGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SymGraphRepr {
            group: self.descriptor,
            a_orbits: self.a_orbits,
            b_orbits: self.b_orbits,
            triples: self
                .triples
                .iter()
                .map(|t| (t.a, t.g.to_string(), t.b))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SymGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = SymGraphRepr::deserialize(d)?;
        let triples = repr
            .triples
            .into_iter()
            .map(|(a, g, b)| Ok((a, repr.group.parse_elem(&g).map_err(serde::de::Error::custom)?, b)))
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        SymGraph::new(repr.group, repr.a_orbits, repr.b_orbits, triples)
            .map_err(serde::de::Error::custom)
    }
}

/// The quotient of a symmetric graph by the group action: one vertex per
/// orbit, one edge per orbit pair that carries at least one triple, plus the
/// list of group elements behind each edge.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorGraph {
    pub underlying: FiniteBigraph,
    /// For each factor edge, the triple elements it collapses, sorted by
    /// serialization (so `[0]` is the canonical first choice).
    pub multiplicity: BTreeMap<(usize, usize), Vec<GroupElem>>,
}

/// Collapses each vertex orbit to a single vertex. Local finiteness of the
/// presentation (finitely many triples) makes the factor graph finite.
pub fn factor(sg: &SymGraph) -> FactorGraph {
    let mut multiplicity: BTreeMap<(usize, usize), Vec<GroupElem>> = BTreeMap::new();
    for t in sg.triples() {
        multiplicity.entry((t.a, t.b)).or_default().push(t.g.clone());
    }
    // Triples are sorted by (a, g, b); regrouping by (a, b) keeps each list
    // sorted by serialization.
    let edges: Vec<(usize, usize)> = multiplicity.keys().copied().collect();
    let underlying = FiniteBigraph::new(sg.a_orbits(), sg.b_orbits(), edges)
        .expect("orbit indices were validated at SymGraph construction");
    FactorGraph {
        underlying,
        multiplicity,
    }
}

/// A symmetric graph is proper when no vertex pair is joined by two distinct
/// edge orbits — equivalently, when every factor edge has multiplicity one.
/// (Two triples `(i, g, j)` and `(i, g', j)` with `g ≠ g'` put the edges
/// `(h, i)–(h∘g, j)` and `(h∘g∘g'⁻¹, i)–(h∘g, j)` on one right vertex, a
/// group translate relating two edges, and conversely.)
pub fn is_proper(sg: &SymGraph) -> bool {
    factor(sg).multiplicity.values().all(|gs| gs.len() == 1)
}

/// A finite window of a symmetric graph: the subgraph induced by vertices
/// `(h, i)` with `h` in a chosen finite subset of the group.
///
/// Truncation cuts edges at the boundary, so only *interior* vertices — whose
/// every presented neighbor also lies in the window — support sound coverage
/// or Hall claims about the infinite graph.
#[derive(Debug, Clone)]
pub struct Materialized {
    pub graph: FiniteBigraph,
    window: FiniteSubset,
    a_orbits: usize,
    b_orbits: usize,
    left_interior: Vec<bool>,
    right_interior: Vec<bool>,
}

impl Materialized {
    pub fn window(&self) -> &FiniteSubset {
        &self.window
    }

    /// Index of left vertex `(window[pos], orbit)`.
    pub fn left_index(&self, pos: usize, orbit: usize) -> usize {
        pos * self.a_orbits + orbit
    }

    pub fn right_index(&self, pos: usize, orbit: usize) -> usize {
        pos * self.b_orbits + orbit
    }

    /// `(group element, orbit)` behind a left vertex index.
    pub fn left_label(&self, index: usize) -> (&GroupElem, usize) {
        (
            &self.window.elements()[index / self.a_orbits],
            index % self.a_orbits,
        )
    }

    pub fn right_label(&self, index: usize) -> (&GroupElem, usize) {
        (
            &self.window.elements()[index / self.b_orbits],
            index % self.b_orbits,
        )
    }

    pub fn left_interior(&self) -> &[bool] {
        &self.left_interior
    }

    pub fn right_interior(&self) -> &[bool] {
        &self.right_interior
    }
}

fn window_positions(window: &FiniteSubset) -> BTreeMap<GroupElem, usize> {
    window
        .elements()
        .iter()
        .enumerate()
        .map(|(k, e)| (e.clone(), k))
        .collect()
}

/// Builds the finite subgraph induced by a window, marking interior vertices.
pub fn materialize(sg: &SymGraph, window: &FiniteSubset) -> Result<Materialized> {
    if window.descriptor() != sg.descriptor() {
        return Err(Error::SubsetDescriptorMismatch(
            window.descriptor().to_string(),
            sg.descriptor().to_string(),
        ));
    }
    let desc = *sg.descriptor();
    let pos = window_positions(window);
    let n = window.len();

    let mut edges = Vec::new();
    let mut left_interior = vec![true; n * sg.a_orbits()];
    let mut right_interior = vec![true; n * sg.b_orbits()];
    for (k, h) in window.elements().iter().enumerate() {
        for t in sg.triples() {
            // Left neighbor (h, a) -> (h∘g, b).
            let fwd = compose(&desc, h, &t.g)?;
            match pos.get(&fwd) {
                Some(&k2) => edges.push((k * sg.a_orbits() + t.a, k2 * sg.b_orbits() + t.b)),
                None => left_interior[k * sg.a_orbits() + t.a] = false,
            }
            // Right neighbor (h, b) <- (h∘g⁻¹, a).
            let back = compose(&desc, h, &inverse(&desc, &t.g)?)?;
            if !pos.contains_key(&back) {
                right_interior[k * sg.b_orbits() + t.b] = false;
            }
        }
    }
    edges.sort_unstable();
    edges.dedup();
    let graph = FiniteBigraph::new(n * sg.a_orbits(), n * sg.b_orbits(), edges)?;
    Ok(Materialized {
        graph,
        window: window.clone(),
        a_orbits: sg.a_orbits(),
        b_orbits: sg.b_orbits(),
        left_interior,
        right_interior,
    })
}

/// A `G`-symmetric matching: a partial matching of the factor graph together
/// with a choice of group element for every matched orbit pair. Lifting
/// reconstitutes the infinite matching `{(h, i)–(h∘g, j) : h ∈ G}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatching {
    chosen: BTreeMap<(usize, usize), GroupElem>,
}

impl SymMatching {
    pub fn new(sg: &SymGraph, chosen: BTreeMap<(usize, usize), GroupElem>) -> Result<Self> {
        let fac = factor(sg);
        let mut used_a = BTreeSet::new();
        let mut used_b = BTreeSet::new();
        for (&(a, b), g) in &chosen {
            let options = fac
                .multiplicity
                .get(&(a, b))
                .ok_or(Error::NotAFactorEdge(a, b))?;
            if !options.contains(g) {
                return Err(Error::BadChoice {
                    a,
                    g: g.to_string(),
                    b,
                });
            }
            if !used_a.insert(a) || !used_b.insert(b) {
                return Err(Error::InvalidMatching(format!(
                    "orbit pair ({a}, {b}) reuses an orbit"
                )));
            }
        }
        Ok(SymMatching { chosen })
    }

    pub fn chosen(&self) -> &BTreeMap<(usize, usize), GroupElem> {
        &self.chosen
    }
}

/// Turns a factor matching into a symmetric matching. Where an orbit pair has
/// several triples, `choice` may pick one; otherwise the first element in
/// canonical serialization order is taken.
pub fn lift(
    sg: &SymGraph,
    factor_matching: &Matching,
    choice: Option<&BTreeMap<(usize, usize), GroupElem>>,
) -> Result<SymMatching> {
    let fac = factor(sg);
    let mut chosen = BTreeMap::new();
    for &(a, b) in factor_matching.pairs() {
        let options = fac
            .multiplicity
            .get(&(a, b))
            .ok_or(Error::NotAFactorEdge(a, b))?;
        let g = match choice.and_then(|c| c.get(&(a, b))) {
            Some(g) => {
                if !options.contains(g) {
                    return Err(Error::BadChoice {
                        a,
                        g: g.to_string(),
                        b,
                    });
                }
                g.clone()
            }
            None => options[0].clone(),
        };
        chosen.insert((a, b), g);
    }
    SymMatching::new(sg, chosen)
}

/// Forgets the chosen group elements, leaving the underlying factor matching.
/// `project(lift(m)) = m` always; on proper graphs `lift(project(s)) = s`
/// since each orbit pair admits exactly one choice.
pub fn project(sg: &SymGraph, sm: &SymMatching) -> Result<Matching> {
    let fac = factor(sg);
    Matching::new(
        &fac.underlying,
        sm.chosen().keys().copied().collect::<Vec<_>>(),
    )
}

/// Restricts the infinite matching described by `sm` to a window: the pairs
/// `(h, i)–(h∘g, j)` with both endpoints inside.
pub fn materialize_sym_matching(
    sg: &SymGraph,
    sm: &SymMatching,
    mat: &Materialized,
) -> Result<Matching> {
    let desc = *sg.descriptor();
    let pos = window_positions(mat.window());
    let mut pairs = Vec::new();
    for (k, h) in mat.window().elements().iter().enumerate() {
        for (&(a, b), g) in sm.chosen() {
            let fwd = compose(&desc, h, g)?;
            if let Some(&k2) = pos.get(&fwd) {
                pairs.push((mat.left_index(k, a), mat.right_index(k2, b)));
            }
        }
    }
    Matching::new(&mat.graph, pairs)
}

/// Does `m` cover every interior vertex of the window, on both sides?
pub fn covers_interior(mat: &Materialized, m: &Matching) -> bool {
    let mut left_covered = vec![false; mat.graph.left_count()];
    let mut right_covered = vec![false; mat.graph.right_count()];
    for &(i, j) in m.pairs() {
        left_covered[i] = true;
        right_covered[j] = true;
    }
    mat.left_interior
        .iter()
        .zip(&left_covered)
        .all(|(&int, &cov)| !int || cov)
        && mat
            .right_interior
            .iter()
            .zip(&right_covered)
            .all(|(&int, &cov)| !int || cov)
}

/// Searches the window for a Hall violation among interior vertices: a set of
/// interior vertices on one side with fewer neighbors than members. Interior
/// vertices see their full infinite-graph neighborhood inside the window, so
/// such a violation is a genuine certificate about the infinite graph.
///
/// Returns the side on which a violation exists, if any (left is tried
/// first). Implemented by checking whether a matching can saturate the
/// interior vertices of each side.
pub fn interior_hall_violation(mat: &Materialized) -> Option<Side> {
    let saturable = |side: Side| -> bool {
        let interior: Vec<usize> = match side {
            Side::Left => (0..mat.graph.left_count())
                .filter(|&v| mat.left_interior[v])
                .collect(),
            Side::Right => (0..mat.graph.right_count())
                .filter(|&v| mat.right_interior[v])
                .collect(),
        };
        // Restrict one side to its interior and ask for full saturation.
        let mut renum = BTreeMap::new();
        for (new, &old) in interior.iter().enumerate() {
            renum.insert(old, new);
        }
        let edges: Vec<(usize, usize)> = mat
            .graph
            .edges()
            .iter()
            .filter_map(|&(i, j)| {
                let (v, w) = match side {
                    Side::Left => (i, j),
                    Side::Right => (j, i),
                };
                renum.get(&v).map(|&v2| (v2, w))
            })
            .collect();
        let other = match side {
            Side::Left => mat.graph.right_count(),
            Side::Right => mat.graph.left_count(),
        };
        let g = FiniteBigraph::new(interior.len(), other, edges)
            .expect("reindexed subgraph is valid");
        bigraph::max_matching(&g).len() == interior.len()
    };
    if !saturable(Side::Left) {
        Some(Side::Left)
    } else if !saturable(Side::Right) {
        Some(Side::Right)
    } else {
        None
    }
}

/// Outcome of searching for a perfect symmetric matching.
#[derive(Debug, Clone, PartialEq)]
pub enum SymPerfectOutcome {
    /// A perfect symmetric matching, lifted from a perfect factor matching.
    Perfect(SymMatching),
    /// The factor graph has no perfect matching; here is a Hall witness.
    /// No symmetric perfect matching can exist.
    NoneExists(HallWitness),
}

/// Finds a perfect symmetric matching if one exists: perfect symmetric
/// matchings correspond exactly to perfect factor matchings, so this runs
/// the finite matcher on the factor and lifts, or reports the factor's Hall
/// witness.
pub fn symmetric_perfect_matching(sg: &SymGraph) -> Result<SymPerfectOutcome> {
    let fac = factor(sg);
    if let HallOutcome::Violated(w) = bigraph::hall_check(&fac.underlying, Side::Left) {
        return Ok(SymPerfectOutcome::NoneExists(w));
    }
    if let HallOutcome::Violated(w) = bigraph::hall_check(&fac.underlying, Side::Right) {
        return Ok(SymPerfectOutcome::NoneExists(w));
    }
    // Both Hall conditions hold, so the sides have equal size and the factor
    // has a perfect matching.
    let m = bigraph::max_matching(&fac.underlying);
    debug_assert!(bigraph::is_perfect(&fac.underlying, &m)?);
    Ok(SymPerfectOutcome::Perfect(lift(sg, &m, None)?))
}

/// One row of a window-counting probe report; see [`window_hall_probe`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    /// Description of the window `F`.
    pub window: String,
    /// The orbit subset `X` on the probed side.
    pub subset: Vec<usize>,
    /// `|Y|`: size of the factor neighborhood of `X`.
    pub y_size: usize,
    pub f_size: usize,
    pub fu_size: usize,
    /// `|FU| / |F|` as an exact rational.
    #[serde(with = "crate::ratio_string")]
    pub ratio: Ratio<u64>,
    /// Whether the counting bound `|X| ≤ (|FU|/|F|)·|Y|` pins `|X| ≤ |Y|`,
    /// i.e. `|FU|·|Y| < |F|·(|Y| + 1)`.
    pub certifies: bool,
}

/// Per-window flag from the interior Hall check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowFlag {
    pub window: String,
    pub violation: Option<Side>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub side: Side,
    pub rows: Vec<ProbeRow>,
    pub flags: Vec<WindowFlag>,
}

fn describe_window(w: &FiniteSubset) -> String {
    format!("|F|={} over {}", w.len(), w.descriptor())
}

/// Empirical window counting on one side.
///
/// For every window `F` and every non-empty orbit subset `X` on `side`, take
/// representatives `X` at the identity, let `Y` be the factor neighborhood,
/// and extract the smallest `U` with `E(X) ⊆ UY`: because the action is free,
/// that is exactly the set of triple elements leaving `X` (inverted on the
/// right side). Any perfect matching of the infinite graph forces
/// `|F|·|X| ≤ |FU|·|Y|`, so as `|FU|/|F|` approaches 1 the counting certifies
/// `|X| ≤ |Y|`. The report also flags windows whose materialization has an
/// interior Hall violation — a finite disproof of perfect matchability.
pub fn window_hall_probe(
    sg: &SymGraph,
    windows: &[FiniteSubset],
    side: Side,
) -> Result<ProbeReport> {
    let desc = *sg.descriptor();
    let fac = factor(sg);
    let orbits = match side {
        Side::Left => sg.a_orbits(),
        Side::Right => sg.b_orbits(),
    };
    if orbits > 12 {
        return Err(Error::Other(format!(
            "probe enumerates all 2^{orbits} orbit subsets; refusing above 12 orbits"
        )));
    }

    let mut rows = Vec::new();
    let mut flags = Vec::new();
    for window in windows {
        for mask in 1u32..(1 << orbits) {
            let subset: Vec<usize> = (0..orbits).filter(|i| mask >> i & 1 == 1).collect();
            let y = bigraph::neighborhood(&fac.underlying, side, &subset)?;
            let mut u_elems = Vec::new();
            for t in sg.triples() {
                match side {
                    Side::Left if subset.contains(&t.a) => u_elems.push(t.g.clone()),
                    Side::Right if subset.contains(&t.b) => {
                        u_elems.push(inverse(&desc, &t.g)?)
                    }
                    _ => {}
                }
            }
            let u = FiniteSubset::new(desc, u_elems)?;
            let fu = if u.is_empty() {
                // No edges leave X: E(X) is empty and the bound is vacuous.
                0
            } else {
                product_set(window, &u)?.len()
            };
            let (f_size, fu_size) = (window.len(), fu);
            rows.push(ProbeRow {
                window: describe_window(window),
                subset,
                y_size: y.len(),
                f_size,
                fu_size,
                ratio: Ratio::new(fu_size as u64, f_size as u64),
                // An empty U means X has no edges at all; nothing to certify.
                certifies: !u.is_empty() && fu_size * y.len() < f_size * (y.len() + 1),
            });
        }
        let mat = materialize(sg, window)?;
        flags.push(WindowFlag {
            window: describe_window(window),
            violation: interior_hall_violation(&mat),
        });
    }
    Ok(ProbeReport { side, rows, flags })
}
