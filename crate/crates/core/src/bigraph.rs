//! Finite bipartite graphs with deterministic matching algorithms.
//!
//! Vertices are `0..left_count` and `0..right_count` on the two sides. All
//! algorithms scan adjacency in ascending order, so every result — matchings,
//! Hall witnesses, bottleneck thresholds — is reproducible for a fixed input.

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which side of the bipartition an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A finite bipartite graph, optionally edge-weighted.
///
/// Construction validates all indices, rejects duplicate edges, and requires
/// weights (when given) to be finite and non-negative. Edges are stored
/// sorted lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteBigraph {
    left_count: usize,
    right_count: usize,
    edges: Vec<(usize, usize)>,
    weights: Option<Vec<f64>>,
    adj: Vec<Vec<usize>>,
    radj: Vec<Vec<usize>>,
}

impl FiniteBigraph {
    pub fn new(left_count: usize, right_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        Self::build(left_count, right_count, edges, None)
    }

    pub fn new_weighted(
        left_count: usize,
        right_count: usize,
        edges: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        let (pairs, weights): (Vec<_>, Vec<_>) =
            edges.into_iter().map(|(i, j, w)| ((i, j), w)).unzip();
        Self::build(left_count, right_count, pairs, Some(weights))
    }

    fn build(
        left_count: usize,
        right_count: usize,
        edges: Vec<(usize, usize)>,
        weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        for &(i, j) in &edges {
            if i >= left_count {
                return Err(Error::IndexOutOfBounds {
                    side: "left",
                    index: i,
                    size: left_count,
                });
            }
            if j >= right_count {
                return Err(Error::IndexOutOfBounds {
                    side: "right",
                    index: j,
                    size: right_count,
                });
            }
        }
        if let Some(ws) = &weights {
            for &w in ws {
                if !w.is_finite() || w < 0.0 {
                    return Err(Error::BadWeight(w));
                }
            }
        }
        // Sort edges (carrying weights along) and reject duplicates.
        let mut order: Vec<usize> = (0..edges.len()).collect();
        order.sort_by_key(|&k| edges[k]);
        let edges_sorted: Vec<(usize, usize)> = order.iter().map(|&k| edges[k]).collect();
        let weights_sorted = weights.map(|ws| order.iter().map(|&k| ws[k]).collect::<Vec<_>>());
        for w in edges_sorted.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateEdge(w[0].0, w[0].1));
            }
        }
        let mut adj = vec![Vec::new(); left_count];
        let mut radj = vec![Vec::new(); right_count];
        for &(i, j) in &edges_sorted {
            adj[i].push(j);
            radj[j].push(i);
        }
        for l in &mut radj {
            l.sort_unstable();
        }
        Ok(FiniteBigraph {
            left_count,
            right_count,
            edges: edges_sorted,
            weights: weights_sorted,
            adj,
            radj,
        })
    }

    /// Complete bipartite graph K_{l,r}.
    pub fn complete(left_count: usize, right_count: usize) -> Self {
        let edges = (0..left_count)
            .flat_map(|i| (0..right_count).map(move |j| (i, j)))
            .collect();
        Self::new(left_count, right_count, edges).expect("complete graph is always valid")
    }

    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.binary_search(&(i, j)).is_ok()
    }

    pub fn adjacency(&self, side: Side) -> &[Vec<usize>] {
        match side {
            Side::Left => &self.adj,
            Side::Right => &self.radj,
        }
    }

    fn side_count(&self, side: Side) -> usize {
        match side {
            Side::Left => self.left_count,
            Side::Right => self.right_count,
        }
    }
}

/// JSON edge entry: `[i, j]` or `[i, j, w]`.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EdgeEntry {
    Plain(usize, usize),
    Weighted(usize, usize, f64),
}

#[derive(Serialize, Deserialize)]
struct BigraphRepr {
    left: usize,
    right: usize,
    edges: Vec<EdgeEntry>,
}

impl Serialize for FiniteBigraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(k, &(i, j))| match &self.weights {
                Some(ws) => EdgeEntry::Weighted(i, j, ws[k]),
                None => EdgeEntry::Plain(i, j),
            })
            .collect();
        BigraphRepr {
            left: self.left_count,
            right: self.right_count,
            edges,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteBigraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = BigraphRepr::deserialize(d)?;
        let weighted = repr
            .edges
            .first()
            .map(|e| matches!(e, EdgeEntry::Weighted(..)))
            .unwrap_or(false);
        let build = if weighted {
            let edges = repr
                .edges
                .into_iter()
                .map(|e| match e {
                    EdgeEntry::Weighted(i, j, w) => Ok((i, j, w)),
                    EdgeEntry::Plain(i, j) => Err(serde::de::Error::custom(format!(
                        "edge ({i}, {j}) is missing a weight while other edges have one"
                    ))),
                })
                .collect::<std::result::Result<Vec<_>, D::Error>>()?;
            FiniteBigraph::new_weighted(repr.left, repr.right, edges)
        } else {
            let edges = repr
                .edges
                .into_iter()
                .map(|e| match e {
                    EdgeEntry::Plain(i, j) => Ok((i, j)),
                    EdgeEntry::Weighted(i, j, _) => Err(serde::de::Error::custom(format!(
                        "edge ({i}, {j}) has a weight while the first edge does not"
                    ))),
                })
                .collect::<std::result::Result<Vec<_>, D::Error>>()?;
            FiniteBigraph::new(repr.left, repr.right, edges)
        };
        build.map_err(serde::de::Error::custom)
    }
}

/// A set of vertex-disjoint edges, stored as sorted `(left, right)` pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Matching {
    pairs: Vec<(usize, usize)>,
}

impl Matching {
    /// Wraps pairs as a matching of `g`, failing if any pair is not an edge
    /// or any vertex is used twice.
    pub fn new(g: &FiniteBigraph, mut pairs: Vec<(usize, usize)>) -> Result<Self> {
        pairs.sort_unstable();
        let mut seen_l = vec![false; g.left_count()];
        let mut seen_r = vec![false; g.right_count()];
        for &(i, j) in &pairs {
            if !g.has_edge(i, j) {
                return Err(Error::InvalidMatching(format!("({i}, {j}) is not an edge")));
            }
            if std::mem::replace(&mut seen_l[i], true) {
                return Err(Error::InvalidMatching(format!(
                    "left vertex {i} used more than once"
                )));
            }
            if std::mem::replace(&mut seen_r[j], true) {
                return Err(Error::InvalidMatching(format!(
                    "right vertex {j} used more than once"
                )));
            }
        }
        Ok(Matching { pairs })
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// A finite certificate that the Hall condition fails on `side`: a subset
/// with strictly fewer neighbors than members.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HallWitness {
    pub side: Side,
    pub subset: Vec<usize>,
    pub neighborhood_size: usize,
}

/// Outcome of a Hall-condition check on one side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HallOutcome {
    Satisfied,
    Violated(HallWitness),
}

impl HallOutcome {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, HallOutcome::Satisfied)
    }

    pub fn witness(&self) -> Option<&HallWitness> {
        match self {
            HallOutcome::Satisfied => None,
            HallOutcome::Violated(w) => Some(w),
        }
    }
}

/// The set of vertices adjacent to any vertex of `subset` (which lives on
/// `side`), sorted ascending.
pub fn neighborhood(g: &FiniteBigraph, side: Side, subset: &[usize]) -> Result<Vec<usize>> {
    let n = g.side_count(side);
    let adj = g.adjacency(side);
    let mut out = BTreeSet::new();
    for &v in subset {
        if v >= n {
            return Err(Error::IndexOutOfBounds {
                side: match side {
                    Side::Left => "left",
                    Side::Right => "right",
                },
                index: v,
                size: n,
            });
        }
        out.extend(adj[v].iter().copied());
    }
    Ok(out.into_iter().collect())
}

/// Maximum-cardinality matching via Hopcroft–Karp. Adjacency is scanned in
/// ascending order, so the result is deterministic.
pub fn max_matching(g: &FiniteBigraph) -> Matching {
    let n = g.left_count();
    let mut match_l: Vec<Option<usize>> = vec![None; n];
    let mut match_r: Vec<Option<usize>> = vec![None; g.right_count()];
    let mut dist: Vec<usize> = vec![usize::MAX; n];

    loop {
        // BFS: layer left vertices by alternating distance from the free ones.
        let mut queue: VecDeque<usize> = VecDeque::new();
        for i in 0..n {
            if match_l[i].is_none() {
                dist[i] = 0;
                queue.push_back(i);
            } else {
                dist[i] = usize::MAX;
            }
        }
        let mut reachable_free = false;
        while let Some(i) = queue.pop_front() {
            for &j in &g.adj[i] {
                match match_r[j] {
                    None => reachable_free = true,
                    Some(i2) => {
                        if dist[i2] == usize::MAX {
                            dist[i2] = dist[i] + 1;
                            queue.push_back(i2);
                        }
                    }
                }
            }
        }
        if !reachable_free {
            break;
        }
        // DFS along the layering, augmenting a maximal set of disjoint paths.
        fn augment(
            g: &FiniteBigraph,
            i: usize,
            dist: &mut [usize],
            match_l: &mut [Option<usize>],
            match_r: &mut [Option<usize>],
        ) -> bool {
            for idx in 0..g.adj[i].len() {
                let j = g.adj[i][idx];
                let ok = match match_r[j] {
                    None => true,
                    Some(i2) => {
                        dist[i2] == dist[i].wrapping_add(1)
                            && augment(g, i2, dist, match_l, match_r)
                    }
                };
                if ok {
                    match_l[i] = Some(j);
                    match_r[j] = Some(i);
                    return true;
                }
            }
            dist[i] = usize::MAX;
            false
        }
        for i in 0..n {
            if match_l[i].is_none() {
                augment(g, i, &mut dist, &mut match_l, &mut match_r);
            }
        }
    }

    let pairs: Vec<(usize, usize)> = match_l
        .iter()
        .enumerate()
        .filter_map(|(i, m)| m.map(|j| (i, j)))
        .collect();
    Matching::new(g, pairs).expect("algorithm output is a valid matching")
}

/// Checks the Hall condition on one side. On failure returns a witness
/// subset computed by alternating-path reachability from the unmatched
/// vertices (König's construction), never by subset enumeration.
pub fn hall_check(g: &FiniteBigraph, side: Side) -> HallOutcome {
    let m = max_matching(g);
    let n = g.side_count(side);
    // match_of[v] for v on `side`; matched_to on the opposite side.
    let mut match_here: Vec<Option<usize>> = vec![None; n];
    let mut match_there: Vec<Option<usize>> = vec![None; g.side_count(side.opposite())];
    for &(i, j) in m.pairs() {
        let (v, w) = match side {
            Side::Left => (i, j),
            Side::Right => (j, i),
        };
        match_here[v] = Some(w);
        match_there[w] = Some(v);
    }
    if match_here.iter().all(|x| x.is_some()) {
        return HallOutcome::Satisfied;
    }

    // Alternating reachability: free vertices on `side`, forward along any
    // edge, backward along matched edges.
    let adj = g.adjacency(side);
    let mut seen_here = vec![false; n];
    let mut seen_there = vec![false; match_there.len()];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| match_here[v].is_none()).collect();
    for &v in &queue {
        seen_here[v] = true;
    }
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen_there[w] {
                seen_there[w] = true;
                if let Some(v2) = match_there[w] {
                    if !seen_here[v2] {
                        seen_here[v2] = true;
                        queue.push_back(v2);
                    }
                }
            }
        }
    }

    let subset: Vec<usize> = (0..n).filter(|&v| seen_here[v]).collect();
    let nbhd = neighborhood(g, side, &subset).expect("witness indices are in bounds");
    debug_assert_eq!(nbhd.len(), seen_there.iter().filter(|&&b| b).count());
    debug_assert!(subset.len() > nbhd.len());
    HallOutcome::Violated(HallWitness {
        side,
        subset,
        neighborhood_size: nbhd.len(),
    })
}

/// Does `m` cover every vertex on both sides? Errors if `m` is not a valid
/// matching of `g`.
pub fn is_perfect(g: &FiniteBigraph, m: &Matching) -> Result<bool> {
    // Re-validate against this graph (the Matching may come from elsewhere).
    let m = Matching::new(g, m.pairs().to_vec())?;
    Ok(m.len() == g.left_count() && m.len() == g.right_count())
}

/// Result of a bottleneck perfect-matching computation.
#[derive(Debug, Clone, PartialEq)]
pub enum Bottleneck {
    /// No perfect matching exists even using every edge.
    Infeasible,
    /// `threshold` is the smallest value such that edges of weight
    /// `<= threshold` admit a perfect matching; `None` only for the empty
    /// graph with zero vertices, whose perfect matching uses no edges.
    Feasible {
        threshold: Option<f64>,
        matching: Matching,
    },
}

/// Minimizes, over perfect matchings, the maximum edge weight used: sorts the
/// distinct weights and binary-searches the smallest prefix of the weight
/// order that still admits a perfect matching. The optimum is always one of
/// the edge weights, so the search over distinct weights is exact.
pub fn bottleneck_matching(g: &FiniteBigraph) -> Result<Bottleneck> {
    let weights = g.weights().ok_or(Error::MissingWeights)?;
    let keyed: Vec<OrdF64> = weights.iter().map(|&w| OrdF64(w)).collect();
    Ok(match bottleneck_matching_by(g, &keyed) {
        None => Bottleneck::Infeasible,
        Some((threshold, matching)) => Bottleneck::Feasible {
            threshold: threshold.map(|w| w.0),
            matching,
        },
    })
}

/// Generic bottleneck search over any totally ordered weight type; used with
/// exact rational weights by the twin-lattice module. `weights` is parallel
/// to `g.edges()`. Returns `None` when no perfect matching exists at all.
pub fn bottleneck_matching_by<W: Ord + Clone>(
    g: &FiniteBigraph,
    weights: &[W],
) -> Option<(Option<W>, Matching)> {
    assert_eq!(weights.len(), g.edges().len(), "one weight per edge");
    if g.left_count() != g.right_count() {
        return None;
    }
    if g.left_count() == 0 {
        let empty = Matching::new(g, Vec::new()).expect("empty matching is valid");
        return Some((None, empty));
    }

    let restricted = |cap: &W| -> FiniteBigraph {
        let edges = g
            .edges()
            .iter()
            .zip(weights)
            .filter(|(_, w)| *w <= cap)
            .map(|(&e, _)| e)
            .collect();
        FiniteBigraph::new(g.left_count(), g.right_count(), edges)
            .expect("subgraph of a valid graph is valid")
    };
    let feasible =
        |cap: &W| -> Option<Matching> { Some(max_matching(&restricted(cap))).filter(|m| m.len() == g.left_count()) };

    let mut distinct: Vec<W> = weights.to_vec();
    distinct.sort();
    distinct.dedup();

    // Invariant: feasible(distinct[hi]) holds, everything below lo fails.
    feasible(distinct.last()?)?;
    let (mut lo, mut hi) = (0usize, distinct.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(&distinct[mid]).is_some() {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let matching = feasible(&distinct[lo]).expect("binary search maintained feasibility");
    Some((Some(distinct[lo].clone()), matching))
}

/// Total order on finite non-negative floats (constructor-validated).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct OrdF64(pub f64);

impl Eq for OrdF64 {}

impl PartialOrd for OrdF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrdF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .partial_cmp(&other.0)
            .expect("graph weights are validated finite")
    }
}
