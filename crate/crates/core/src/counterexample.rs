//! A proper symmetric graph with a perfect matching that no symmetric
//! matching can realize.
//!
//! The construction pairs one copy of a non-amenable group against two: the
//! left side is `G × F` and the right side `G × F × {1,2}` for a finite
//! translator set `F`, with `(x∘g, φ(g,h))` adjacent to `(x, h, copy)` for
//! every `g ∈ F`, where `φ` is a Latin square on the indices of `F`. The
//! Latin property makes the presentation proper and its factor graph the
//! complete `|F| × 2|F|` graph — which cannot have a perfect matching. Yet
//! when `G` doubles itself by right translations (see
//! [`crate::amenability::ParadoxDecomp`]), routing each right vertex along
//! its classifier's translator produces a genuine perfect matching of the
//! infinite graph. Orbit counting is thus strictly weaker than matching.

use std::collections::BTreeMap;

use crate::amenability::ParadoxDecomp;
use crate::bigraph::{HallWitness, Matching, Side};
use crate::error::{Error, Result};
use crate::groups::{ball, compose, inverse, FiniteSubset, GroupElem};
use crate::symmetry::{
    self, materialize, window_hall_probe, Materialized, ProbeReport, SymGraph,
    SymPerfectOutcome,
};

/// An `n × n` table whose rows and columns are each permutations of
/// `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatinSquare {
    table: Vec<Vec<usize>>,
}

impl LatinSquare {
    /// Validates the Latin property.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let sq = LatinSquare { table };
        if sq.is_latin() {
            Ok(sq)
        } else {
            Err(Error::Other(
                "table rows and columns must each permute 0..n".into(),
            ))
        }
    }

    /// Skips validation. Exists for fault injection in tests; everything
    /// downstream is expected to *detect* a non-Latin table, not assume one
    /// away.
    pub fn unchecked(table: Vec<Vec<usize>>) -> Self {
        LatinSquare { table }
    }

    /// The addition table of `Z_n`: `φ(g, h) = g + h mod n`.
    pub fn cyclic(n: usize) -> Self {
        LatinSquare {
            table: (0..n).map(|g| (0..n).map(|h| (g + h) % n).collect()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.table.len()
    }

    pub fn at(&self, g: usize, h: usize) -> usize {
        self.table[g][h]
    }

    pub fn is_latin(&self) -> bool {
        let n = self.n();
        let perm = |xs: Vec<usize>| {
            let mut seen = vec![false; n];
            xs.into_iter().all(|x| x < n && !std::mem::replace(&mut seen[x], true))
        };
        self.table.iter().all(|row| row.len() == n)
            && self.table.iter().all(|row| perm(row.clone()))
            && (0..n).all(|h| perm(self.table.iter().map(|row| row[h]).collect()))
    }
}

/// The symmetric graph of the construction, over any group and translator
/// set.
///
/// Left orbits are indexed by `F`, right orbits by `F × {1,2}` (orbit
/// `2·h + copy` for copy `0` or `1`). The defining edges join
/// `(x∘g, φ(g,h))` on the left to `(x, h, copy)` on the right for all
/// `x ∈ G`. To express that as orbit triples — which present edges as
/// `(y, a) — (y∘s, b)` from the *left* coordinate `y` — substitute
/// `y = x∘g`, so `x = y∘g⁻¹`, giving the triple `(φ(g,h), g⁻¹, 2h+copy)`
/// for every `g`, `h`, and copy. A test checks this against direct
/// enumeration of the defining edges.
pub fn build_sym_graph(square: &LatinSquare, translators: &FiniteSubset) -> Result<SymGraph> {
    let n = translators.len();
    if square.n() != n {
        return Err(Error::LatinOrderMismatch {
            got: square.n(),
            expected: n,
        });
    }
    let desc = *translators.descriptor();
    let mut triples = Vec::with_capacity(n * n * 2);
    for (g_idx, g) in translators.elements().iter().enumerate() {
        let g_inv = inverse(&desc, g)?;
        for h_idx in 0..n {
            for copy in 0..2 {
                triples.push((square.at(g_idx, h_idx), g_inv.clone(), 2 * h_idx + copy));
            }
        }
    }
    SymGraph::new(desc, n, 2 * n, triples)
}

/// The full package: the graph, its ingredients, and the doubling that
/// powers the explicit matching.
#[derive(Debug, Clone)]
pub struct CounterexampleBundle {
    pub graph: SymGraph,
    pub translators: FiniteSubset,
    pub square: LatinSquare,
    pub decomp: ParadoxDecomp,
}

/// Builds a bundle from a doubling and a Latin square, letting tests swap in
/// corrupted squares or faulty decompositions.
pub fn build_counterexample(
    decomp: ParadoxDecomp,
    square: LatinSquare,
) -> Result<CounterexampleBundle> {
    let translators = decomp.f.clone();
    let graph = build_sym_graph(&square, &translators)?;
    Ok(CounterexampleBundle {
        graph,
        translators,
        square,
        decomp,
    })
}

/// The standard instance: rank-2 free group, translators `{e, a⁻¹, b⁻¹}`,
/// cyclic Latin square, textbook doubling.
pub fn standard_bundle() -> CounterexampleBundle {
    build_counterexample(crate::amenability::standard_f2_paradox(), LatinSquare::cyclic(3))
        .expect("standard ingredients are consistent")
}

/// A first, failed attempt at presenting the same adjacency: collapse the
/// left side to a single orbit and forget the Latin routing. The result is
/// an *improper* presentation (three parallel edge orbits per factor edge),
/// on which lifting cannot be inverted.
pub fn improper_variant() -> SymGraph {
    let bundle = standard_bundle();
    let desc = *bundle.translators.descriptor();
    let mut triples = Vec::new();
    for g in bundle.translators.elements() {
        let g_inv = inverse(&desc, g).expect("translators are valid");
        for copy in 0..2 {
            triples.push((0, g_inv.clone(), copy));
        }
    }
    SymGraph::new(desc, 1, 2, triples).expect("triples are distinct")
}

/// Certifies that no symmetric perfect matching exists, returning the factor
/// graph's Hall witness (the right orbits outnumber their joint
/// neighborhood).
pub fn certify_no_symmetric_matching(bundle: &CounterexampleBundle) -> Result<HallWitness> {
    match symmetry::symmetric_perfect_matching(&bundle.graph)? {
        SymPerfectOutcome::NoneExists(w) => Ok(w),
        SymPerfectOutcome::Perfect(_) => Err(Error::Other(
            "factor graph unexpectedly admits a perfect matching".into(),
        )),
    }
}

/// The explicit perfect matching, restricted to a window.
///
/// Each right vertex `(x, h, copy)` is routed along `g = classify_copy(x)`
/// to the left vertex `(x∘g, φ(g, h))`. Validity of the doubling makes
/// `(x, copy) ↦ x∘classify_copy(x)` a bijection `G ⊔ G → G`, and the Latin
/// square's rows then spread the `2|F|` right orbits at `x` bijectively over
/// the `|F|` left orbits at the two image points — a perfect matching of the
/// infinite graph. Every interior vertex of the window keeps its matching
/// partner inside (partners sit at most one translator step away), so the
/// windowed restriction must cover all interior vertices; callers verify
/// that with [`symmetry::covers_interior`].
pub fn explicit_matching(
    bundle: &CounterexampleBundle,
    window: &FiniteSubset,
) -> Result<(Materialized, Matching)> {
    let desc = *bundle.translators.descriptor();
    let mat = materialize(&bundle.graph, window)?;
    let index_of: BTreeMap<&GroupElem, usize> = bundle
        .translators
        .elements()
        .iter()
        .enumerate()
        .map(|(k, g)| (g, k))
        .collect();
    let positions: BTreeMap<&GroupElem, usize> = window
        .elements()
        .iter()
        .enumerate()
        .map(|(k, x)| (x, k))
        .collect();

    let n = bundle.translators.len();
    let mut pairs = Vec::new();
    for (x_pos, x) in window.elements().iter().enumerate() {
        for (copy, classify) in [bundle.decomp.classify_a, bundle.decomp.classify_b]
            .into_iter()
            .enumerate()
        {
            let g = classify(x);
            let g_idx = *index_of.get(&g).ok_or_else(|| Error::Other(format!(
                "classifier output {g} is outside the translator set"
            )))?;
            let y = compose(&desc, x, &g)?;
            let Some(&y_pos) = positions.get(&y) else {
                continue; // partner outside the window; x is not interior
            };
            for h_idx in 0..n {
                pairs.push((
                    mat.left_index(y_pos, bundle.square.at(g_idx, h_idx)),
                    mat.right_index(x_pos, 2 * h_idx + copy),
                ));
            }
        }
    }
    let matching = Matching::new(&mat.graph, pairs)?;
    Ok((mat, matching))
}

/// Runs the window-counting probe on the right side over balls of radius
/// `0..=max_radius`. On this graph every orbit subset sees the whole
/// translator set, so the growth ratio stays near 2 and certification never
/// fires — counting is simply too coarse to detect the matching.
pub fn right_probe(bundle: &CounterexampleBundle, max_radius: u32) -> Result<ProbeReport> {
    let desc = bundle.translators.descriptor();
    let windows = (0..=max_radius)
        .map(|r| ball(desc, r))
        .collect::<Result<Vec<_>>>()?;
    window_hall_probe(&bundle.graph, &windows, Side::Right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amenability::broken_paradox;
    use crate::bigraph::FiniteBigraph;
    use crate::symmetry::{covers_interior, factor, interior_hall_violation, is_proper};
    use num_rational::Ratio;

    #[test]
    fn latin_square_validation() {
        assert!(LatinSquare::cyclic(3).is_latin());
        assert!(LatinSquare::new(vec![vec![0, 1], vec![1, 0]]).is_ok());
        // A repeated entry in a row.
        assert!(LatinSquare::new(vec![vec![0, 0], vec![1, 0]]).is_err());
        // Rows fine, columns not.
        assert!(LatinSquare::new(vec![vec![0, 1], vec![0, 1]]).is_err());
        assert_eq!(LatinSquare::cyclic(3).at(1, 2), 0);
    }

    #[test]
    fn standard_bundle_shape() {
        let bundle = standard_bundle();
        assert_eq!(bundle.graph.a_orbits(), 3);
        assert_eq!(bundle.graph.b_orbits(), 6);
        assert_eq!(bundle.graph.triples().len(), 18);
        assert!(is_proper(&bundle.graph));
        // Translators in canonical order: a⁻¹, b⁻¹, e.
        let names: Vec<String> = bundle
            .translators
            .elements()
            .iter()
            .map(|g| g.to_string())
            .collect();
        assert_eq!(names, ["A", "B", "e"]);

        let fac = factor(&bundle.graph);
        assert_eq!(fac.underlying, FiniteBigraph::complete(3, 6));
        assert!(fac.multiplicity.values().all(|gs| gs.len() == 1));
    }

    #[test]
    fn triples_match_direct_edge_enumeration() {
        // The defining adjacency, enumerated without the substitution that
        // produced the triples.
        let bundle = standard_bundle();
        let desc = *bundle.translators.descriptor();
        let window = ball(&desc, 2).unwrap();
        let mat = materialize(&bundle.graph, &window).unwrap();

        let positions: BTreeMap<&GroupElem, usize> = window
            .elements()
            .iter()
            .enumerate()
            .map(|(k, x)| (x, k))
            .collect();
        let mut direct = Vec::new();
        for (x_pos, x) in window.elements().iter().enumerate() {
            for (g_idx, g) in bundle.translators.elements().iter().enumerate() {
                let y = compose(&desc, x, g).unwrap();
                if let Some(&y_pos) = positions.get(&y) {
                    for h_idx in 0..3 {
                        for copy in 0..2 {
                            direct.push((
                                mat.left_index(y_pos, bundle.square.at(g_idx, h_idx)),
                                mat.right_index(x_pos, 2 * h_idx + copy),
                            ));
                        }
                    }
                }
            }
        }
        direct.sort_unstable();
        direct.dedup();
        assert_eq!(mat.graph.edges(), &direct[..]);
    }

    #[test]
    fn no_symmetric_matching_with_right_witness() {
        let bundle = standard_bundle();
        let w = certify_no_symmetric_matching(&bundle).unwrap();
        assert_eq!(w.side, Side::Right);
        assert_eq!(w.subset.len(), 6);
        assert_eq!(w.neighborhood_size, 3);
    }

    #[test]
    fn explicit_matching_covers_interior() {
        let bundle = standard_bundle();
        for r in [2, 3] {
            let window = ball(bundle.translators.descriptor(), r).unwrap();
            let (mat, m) = explicit_matching(&bundle, &window).unwrap();
            assert!(covers_interior(&mat, &m));
            // Consistent with a perfect matching existing upstairs: no
            // interior Hall violation either.
            assert_eq!(interior_hall_violation(&mat), None);
        }
    }

    #[test]
    fn corrupted_square_is_detected_as_double_cover() {
        // Row 1 hits index 0 twice, so two right vertices route to the same
        // left vertex; matching validation must reject the collision.
        let square = LatinSquare::unchecked(vec![vec![0, 1, 2], vec![0, 2, 0], vec![2, 0, 1]]);
        let bundle = build_counterexample(crate::amenability::standard_f2_paradox(), square).unwrap();
        assert!(!is_proper(&bundle.graph));
        let window = ball(bundle.translators.descriptor(), 2).unwrap();
        let err = explicit_matching(&bundle, &window).unwrap_err();
        assert!(matches!(err, Error::InvalidMatching(_)));
    }

    #[test]
    fn faulty_doubling_is_detected_as_uncovered_interior() {
        // The broken classifier never routes anything onto the identity's
        // left vertices, which are interior from radius 1 on.
        let bundle = build_counterexample(broken_paradox(), LatinSquare::cyclic(3)).unwrap();
        let window = ball(bundle.translators.descriptor(), 2).unwrap();
        let (mat, m) = explicit_matching(&bundle, &window).unwrap();
        assert!(!covers_interior(&mat, &m));
    }

    #[test]
    fn improper_variant_collapses_lifts() {
        use crate::symmetry::{lift, project, SymMatching};

        let sg = improper_variant();
        assert!(!is_proper(&sg));
        let fac = factor(&sg);
        assert_eq!(fac.underlying.edges(), [(0, 0), (0, 1)]);
        let mult: Vec<String> = fac.multiplicity[&(0, 0)]
            .iter()
            .map(|g| g.to_string())
            .collect();
        assert_eq!(mult, ["a", "b", "e"]);

        // Choose the identity; projecting forgets it, and the default lift
        // picks the canonically first option instead.
        let mut chosen = BTreeMap::new();
        chosen.insert((0usize, 0usize), GroupElem::Free(vec![]));
        let sm = SymMatching::new(&sg, chosen).unwrap();
        let back = lift(&sg, &project(&sg, &sm).unwrap(), None).unwrap();
        assert_ne!(back, sm);
        assert_eq!(back.chosen()[&(0, 0)].to_string(), "a");
    }

    #[test]
    fn counting_never_certifies_on_the_right() {
        let bundle = standard_bundle();
        let report = right_probe(&bundle, 3).unwrap();
        assert!(report.rows.iter().all(|row| !row.certifies));
        assert!(report.flags.iter().all(|f| f.violation.is_none()));

        // Every subset sees U = F, so the per-window ratio is
        // (4·3^r − 1) / (2·3^r − 1): bounded below by 2, while certification
        // would need strictly less than 1 + 1/3.
        let expect = [
            Ratio::new(3u64, 1),
            Ratio::new(11, 5),
            Ratio::new(35, 17),
            Ratio::new(107, 53),
        ];
        for row in &report.rows {
            assert!(row.ratio >= Ratio::new(2, 1), "ratio {} too small", row.ratio);
            assert!(expect.contains(&row.ratio));
        }
        // And the left side certifies nothing either.
        let desc = bundle.translators.descriptor();
        let windows: Vec<FiniteSubset> =
            (0..=3).map(|r| ball(desc, r).unwrap()).collect();
        let left = window_hall_probe(&bundle.graph, &windows, Side::Left).unwrap();
        assert!(left.rows.iter().all(|row| !row.certifies));
    }
}
