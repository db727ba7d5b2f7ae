//! Matching ℤ² against a rotated, translated copy of itself.
//!
//! The two lattices form the sides of a bipartite graph with an edge wherever
//! two points are within a distance threshold. For a rotation by a
//! Pythagorean angle the union of the lattices is periodic under a common
//! translation sublattice `L`, so the graph is `ℤ²`-symmetric with finitely
//! many orbits and thresholds, matchings, and bottleneck bounds all reduce to
//! finite computations on the quotient. For an irrational angle there is no
//! periodicity; a disc window still produces certified lower bounds on the
//! optimal displacement, via Hall violations among interior points.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_rational::Ratio;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::bigraph::{bottleneck_matching_by, max_matching, FiniteBigraph};
use crate::error::{Error, Result};
use crate::groups::{GroupDescriptor, GroupElem};
use crate::symmetry::{factor, lift, SymGraph, SymMatching};

/// A point of the plane with exact rational coordinates.
pub type RationalPoint = (Ratio<i128>, Ratio<i128>);

/// A rotation by a Pythagorean angle together with a rational translation of
/// the second lattice copy.
///
/// The matrix is `R = (1/c)·[[p, −q], [q, p]]` with `p² + q² = c²`, stored
/// gcd-normalized with `c ≥ 1` (negating all three integers describes the
/// same matrix, so the sign of `c` is normalized away). The second lattice is
/// `R·ℤ² + t`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalRotation {
    p: i64,
    q: i64,
    c: i64,
    t: RationalPoint,
}

impl RationalRotation {
    pub fn new(p: i64, q: i64, c: i64, t: RationalPoint) -> Result<Self> {
        if c == 0 {
            return Err(Error::BadRotation("c must be nonzero".into()));
        }
        let (pp, qq, cc) = (p as i128, q as i128, c as i128);
        if pp * pp + qq * qq != cc * cc {
            return Err(Error::BadRotation(format!(
                "{p}^2 + {q}^2 != {c}^2, not a Pythagorean triple"
            )));
        }
        let (p, q, c) = if c < 0 { (-p, -q, -c) } else { (p, q, c) };
        let g = p.gcd(&q).gcd(&c);
        Ok(RationalRotation {
            p: p / g,
            q: q / g,
            c: c / g,
            t,
        })
    }

    /// The trivial rotation `(1, 0, 1)` with zero translation.
    pub fn identity() -> Self {
        RationalRotation {
            p: 1,
            q: 0,
            c: 1,
            t: (Ratio::from_integer(0), Ratio::from_integer(0)),
        }
    }

    /// Replaces the translation, keeping the matrix.
    pub fn with_translation(mut self, t: RationalPoint) -> Self {
        self.t = t;
        self
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }

    pub fn c(&self) -> i64 {
        self.c
    }

    pub fn translation(&self) -> RationalPoint {
        self.t
    }

    /// Largest usable threshold: the minimal distance `c` of the common
    /// sublattice. Below it, partners of a point within the threshold all lie
    /// in one period, so the ±1 coefficient window in [`quotient_graph`]
    /// enumerates every edge orbit; at or above it the single-period
    /// reduction breaks down.
    pub fn cap(&self) -> i64 {
        self.c
    }

    /// `R·u + t` for an integer vector `u`.
    pub fn apply(&self, u: (i64, i64)) -> RationalPoint {
        let (p, q, c) = (self.p as i128, self.q as i128, self.c as i128);
        let (ux, uy) = (u.0 as i128, u.1 as i128);
        (
            Ratio::new(p * ux - q * uy, c) + self.t.0,
            Ratio::new(q * ux + p * uy, c) + self.t.1,
        )
    }

    /// The sublattice vector `m₁·(p, q) + m₂·(−q, p)`.
    fn lattice_vector(&self, m: (i128, i128)) -> (i128, i128) {
        let (p, q) = (self.p as i128, self.q as i128);
        (m.0 * p - m.1 * q, m.0 * q + m.1 * p)
    }

    /// Canonical representative of `v mod L`: the class point whose
    /// coordinates with respect to the `L`-basis lie in `[0, 1)²`. The basis
    /// is orthogonal, so the reduction is a floor in basis coordinates.
    fn reduce(&self, x: i128, y: i128) -> (i64, i64) {
        let (p, q) = (self.p as i128, self.q as i128);
        let cc = (self.c as i128) * (self.c as i128);
        // L⁻¹ = adj(L)/det(L) = (1/c²)·[[p, q], [−q, p]].
        let s1 = (p * x + q * y).div_euclid(cc);
        let s2 = (-q * x + p * y).div_euclid(cc);
        let (lx, ly) = self.lattice_vector((s1, s2));
        ((x - lx) as i64, (y - ly) as i64)
    }
}

impl Serialize for RationalRotation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RationalRotation", 4)?;
        st.serialize_field("p", &self.p)?;
        st.serialize_field("q", &self.q)?;
        st.serialize_field("c", &self.c)?;
        st.serialize_field("t", &[self.t.0.to_string(), self.t.1.to_string()])?;
        st.end()
    }
}

/// An integer basis of the common translation sublattice, with its index in
/// ℤ².
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Sublattice {
    pub basis: [(i64, i64); 2],
    pub index: i64,
}

/// The common translation sublattice `L = ⟨(p, q), (−q, p)⟩`.
///
/// `L ⊆ ℤ²` holds by integrality of the basis, and `L ⊆ R·ℤ²` because `R⁻¹`
/// sends the basis vectors to `(c, 0)` and `(0, c)`. Both containments are
/// checked here in integer arithmetic rather than trusted, as is the index
/// `det = p² + q² = c²`.
pub fn common_sublattice(rot: &RationalRotation) -> Sublattice {
    let (p, q, c) = (rot.p as i128, rot.q as i128, rot.c as i128);
    let basis = [(rot.p, rot.q), (-rot.q, rot.p)];
    for &(x, y) in &basis {
        let (x, y) = (x as i128, y as i128);
        // c·R⁻¹·v = (p·x + q·y, −q·x + p·y) must be divisible by c.
        let (rx, ry) = (p * x + q * y, -q * x + p * y);
        assert!(
            rx.rem_euclid(c) == 0 && ry.rem_euclid(c) == 0,
            "basis vector escapes the rotated lattice"
        );
    }
    let det = p * p + q * q;
    assert_eq!(det, c * c, "sublattice index differs from c^2");
    Sublattice {
        basis,
        index: rot.c * rot.c,
    }
}

/// The finite quotient of the twin-lattice distance graph at a threshold:
/// `c²` translation classes of ℤ² on the left, `c²` classes of the rotated
/// copy on the right, one triple per pair at distance ≤ threshold within one
/// period, each carrying its exact squared distance as a weight.
#[derive(Debug, Clone)]
pub struct TwinQuotient {
    pub rotation: RationalRotation,
    /// Threshold the enumeration was run at.
    pub threshold: Ratio<i128>,
    /// Class representatives of `ℤ²/L`, fundamental-domain reduced, sorted.
    pub a_reps: Vec<(i64, i64)>,
    /// Class representatives `R·u + t` of the rotated copy, for `u ∈ [0, c)²`
    /// in lexicographic order of `u`.
    pub b_reps: Vec<RationalPoint>,
    /// Presentation over the translation group `ℤ² ≅ L`; triple elements are
    /// coefficient vectors with respect to the basis `(p, q), (−q, p)`.
    pub graph: SymGraph,
    /// Exact squared distance of each triple.
    pub weights: BTreeMap<(usize, GroupElem, usize), Ratio<i128>>,
}

impl Serialize for TwinQuotient {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let b_reps: Vec<[String; 2]> = self
            .b_reps
            .iter()
            .map(|&(x, y)| [x.to_string(), y.to_string()])
            .collect();
        let weights: Vec<(usize, String, usize, String)> = self
            .weights
            .iter()
            .map(|((a, g, b), w)| (*a, g.to_string(), *b, w.to_string()))
            .collect();
        let mut st = s.serialize_struct("TwinQuotient", 6)?;
        st.serialize_field("rotation", &self.rotation)?;
        st.serialize_field("threshold", &self.threshold.to_string())?;
        st.serialize_field("a_reps", &self.a_reps)?;
        st.serialize_field("b_reps", &b_reps)?;
        st.serialize_field("graph", &self.graph)?;
        st.serialize_field("weights", &weights)?;
        st.end()
    }
}

fn ratio_f64(r: Ratio<i128>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Builds the quotient presentation at threshold `r`.
///
/// Representatives: the left classes `ℤ²/L` are found by reducing a scan of
/// `[0, c²)²` (which meets every class, since `c²·ℤ² ⊆ L`); the right classes
/// are `R·u + t` for `u ∈ [0, c)²`, a transversal because `L = R·(c·ℤ²)`.
/// For each representative pair the candidate translates solve
/// `L·m ≈ aᵢ − bⱼ`; with `r` below the cap the true solutions differ from the
/// real one by less than 1 per coordinate, so a ±1 window around the floor is
/// exhaustive. All arithmetic is exact.
pub fn quotient_graph(rot: &RationalRotation, r: Ratio<i128>) -> Result<TwinQuotient> {
    if r < Ratio::from_integer(0) {
        return Err(Error::Other("distance threshold must be non-negative".into()));
    }
    let cap = Ratio::from_integer(rot.c as i128);
    if r >= cap {
        return Err(Error::RadiusAboveCap {
            r: ratio_f64(r),
            cap: rot.c as f64,
        });
    }

    let c = rot.c as i128;
    let cc = c * c;
    let mut reps: BTreeSet<(i64, i64)> = BTreeSet::new();
    'scan: for x in 0..cc {
        for y in 0..cc {
            reps.insert(rot.reduce(x, y));
            if reps.len() as i128 == cc {
                break 'scan;
            }
        }
    }
    assert_eq!(reps.len() as i128, cc, "class count differs from the index");
    let a_reps: Vec<(i64, i64)> = reps.into_iter().collect();

    let b_reps: Vec<RationalPoint> = (0..rot.c)
        .flat_map(|ux| (0..rot.c).map(move |uy| (ux, uy)))
        .map(|u| rot.apply(u))
        .collect();

    let (p, q) = (rot.p as i128, rot.q as i128);
    let r_sq = r * r;
    let mut triples = Vec::new();
    let mut weights = BTreeMap::new();
    for (i, &(ax, ay)) in a_reps.iter().enumerate() {
        for (j, &(bx, by)) in b_reps.iter().enumerate() {
            let dx = Ratio::from_integer(ax as i128) - bx;
            let dy = Ratio::from_integer(ay as i128) - by;
            let m1 = ((Ratio::from_integer(p) * dx + Ratio::from_integer(q) * dy) / cc)
                .floor()
                .to_integer();
            let m2 = ((Ratio::from_integer(-q) * dx + Ratio::from_integer(p) * dy) / cc)
                .floor()
                .to_integer();
            for u in m1 - 1..=m1 + 1 {
                for v in m2 - 1..=m2 + 1 {
                    let (lx, ly) = rot.lattice_vector((u, v));
                    let ex = dx - Ratio::from_integer(lx);
                    let ey = dy - Ratio::from_integer(ly);
                    let d2 = ex * ex + ey * ey;
                    if d2 <= r_sq {
                        let g = GroupElem::Zd(vec![u as i64, v as i64]);
                        weights.insert((i, g.clone(), j), d2);
                        triples.push((i, g, j));
                    }
                }
            }
        }
    }
    let graph = SymGraph::new(GroupDescriptor::zd(2), a_reps.len(), b_reps.len(), triples)?;
    Ok(TwinQuotient {
        rotation: rot.clone(),
        threshold: r,
        a_reps,
        b_reps,
        graph,
        weights,
    })
}

/// Result of the bottleneck search up to a cap.
#[derive(Debug, Clone)]
pub enum BottleneckOutcome {
    /// `r_star_sq` is the least squared threshold at which the quotient
    /// admits a perfect matching; `matching` attains it symmetrically.
    Found {
        r_star_sq: Ratio<i128>,
        matching: SymMatching,
        quotient: Box<TwinQuotient>,
    },
    /// No perfect matching exists even using every pair up to the cap.
    Infeasible { largest_tested: Ratio<i128> },
}

/// Minimizes, over perfect matchings between the two lattices, the largest
/// displacement used, searching thresholds up to `r_cap`.
///
/// Each factor edge is weighted by the smallest squared distance among its
/// translates; a binary search over the distinct weights finds the least
/// threshold with a perfect factor matching, which is then lifted by picking
/// the distance-minimizing translate per matched pair (first in
/// serialization order on ties, so the outcome is deterministic).
pub fn bottleneck_bound(rot: &RationalRotation, r_cap: Ratio<i128>) -> Result<BottleneckOutcome> {
    let quotient = quotient_graph(rot, r_cap)?;
    let fac = factor(&quotient.graph);
    let edge_weights: Vec<Ratio<i128>> = fac
        .underlying
        .edges()
        .iter()
        .map(|&(a, b)| {
            fac.multiplicity[&(a, b)]
                .iter()
                .map(|g| quotient.weights[&(a, g.clone(), b)])
                .min()
                .expect("factor edges carry at least one triple")
        })
        .collect();
    match bottleneck_matching_by(&fac.underlying, &edge_weights) {
        None => Ok(BottleneckOutcome::Infeasible {
            largest_tested: r_cap,
        }),
        Some((threshold, factor_matching)) => {
            let mut choice = BTreeMap::new();
            for &(a, b) in factor_matching.pairs() {
                let g = fac.multiplicity[&(a, b)]
                    .iter()
                    .min_by_key(|g| quotient.weights[&(a, (*g).clone(), b)])
                    .expect("matched factor edges carry at least one triple")
                    .clone();
                choice.insert((a, b), g);
            }
            let matching = lift(&quotient.graph, &factor_matching, Some(&choice))?;
            Ok(BottleneckOutcome::Found {
                r_star_sq: threshold.unwrap_or_else(|| Ratio::from_integer(0)),
                matching,
                quotient: Box::new(quotient),
            })
        }
    }
}

/// The matched point pairs of one period: each chosen orbit pair contributes
/// the left representative and its partner `bⱼ + L·g`. Ordered by orbit pair,
/// so the output is deterministic.
pub fn matched_pairs(
    quotient: &TwinQuotient,
    matching: &SymMatching,
) -> Vec<(RationalPoint, RationalPoint)> {
    matching
        .chosen()
        .iter()
        .map(|(&(i, j), g)| {
            let (ax, ay) = quotient.a_reps[i];
            let (bx, by) = quotient.b_reps[j];
            let m = match g {
                GroupElem::Zd(v) => (v[0] as i128, v[1] as i128),
                other => unreachable!("quotient graphs live over Z^2, got {other}"),
            };
            let (lx, ly) = quotient.rotation.lattice_vector(m);
            (
                (
                    Ratio::from_integer(ax as i128),
                    Ratio::from_integer(ay as i128),
                ),
                (
                    bx + Ratio::from_integer(lx),
                    by + Ratio::from_integer(ly),
                ),
            )
        })
        .collect()
}

/// Tolerance for threshold comparisons in irrational mode, where exact
/// arithmetic is unavailable.
pub const IRRATIONAL_EPS: f64 = 1e-9;

/// Candidate thresholds are scanned up to this distance. The regime of
/// interest sits well below it (displacements near 1), and enumerating longer
/// pair distances would bloat the candidate list without adding information:
/// every lattice point has a partner on the other side within `√2/2 < 1.5`
/// regardless of angle and translation.
const IRRATIONAL_SCAN_CAP: f64 = 1.5;

/// Window study of an irrational-angle instance.
#[derive(Debug, Clone, Serialize)]
pub struct IrrationalReport {
    pub angle: f64,
    pub window_radius: i64,
    pub a_points: usize,
    pub b_points: usize,
    /// Number of distinct candidate thresholds scanned.
    pub candidates: usize,
    /// Largest candidate at which interior points violate the Hall
    /// condition — a certified lower bound for the infinite problem (every
    /// neighbor of an interior point lies inside the window, so the
    /// violating set transfers verbatim). 0 when no candidate violates.
    pub lower_bound: f64,
    /// Smallest candidate at which the window admits a matching covering all
    /// interior points of both sides. A heuristic indication only: boundary
    /// effects mean it need not bound the infinite problem from above.
    pub upper_indication: Option<f64>,
}

/// Studies the twin lattice at an arbitrary angle through a disc window of
/// the given radius centered at the origin.
///
/// Interior points at threshold `r` are those of norm ≤ radius − r, whose
/// full neighborhoods the window contains. Raising `r` adds edges and shrinks
/// the interiors, so "no interior Hall violation" is upward-closed and a
/// binary search over the candidate thresholds locates the frontier between
/// the certified-violating regime and the first interior-covering matching.
/// Comparisons use a `1e−9` tolerance ([`IRRATIONAL_EPS`]).
pub fn irrational_window_estimate(
    angle: f64,
    t: (f64, f64),
    window_radius: i64,
) -> Result<IrrationalReport> {
    if window_radius < 1 {
        return Err(Error::BadWindow(format!(
            "window radius must be at least 1, got {window_radius}"
        )));
    }
    let rho = window_radius as f64;
    let rho_sq = rho * rho;

    let mut a_pts: Vec<(f64, f64)> = Vec::new();
    for x in -window_radius..=window_radius {
        for y in -window_radius..=window_radius {
            if x * x + y * y <= window_radius * window_radius {
                a_pts.push((x as f64, y as f64));
            }
        }
    }

    let (cos, sin) = (angle.cos(), angle.sin());
    let reach = window_radius + (t.0.abs() + t.1.abs()).ceil() as i64 + 2;
    let mut b_pts: Vec<(f64, f64)> = Vec::new();
    for ux in -reach..=reach {
        for uy in -reach..=reach {
            let px = cos * ux as f64 - sin * uy as f64 + t.0;
            let py = sin * ux as f64 + cos * uy as f64 + t.1;
            if px * px + py * py <= rho_sq + IRRATIONAL_EPS {
                b_pts.push((px, py));
            }
        }
    }

    // Bucket the rotated points by unit cell so the pair scan touches only
    // nearby candidates.
    let mut cells: BTreeMap<(i64, i64), Vec<usize>> = BTreeMap::new();
    for (j, &(px, py)) in b_pts.iter().enumerate() {
        cells
            .entry((px.floor() as i64, py.floor() as i64))
            .or_default()
            .push(j);
    }
    let span = IRRATIONAL_SCAN_CAP.ceil() as i64;
    let mut pairs: Vec<(usize, usize, f64)> = Vec::new();
    for (i, &(ax, ay)) in a_pts.iter().enumerate() {
        let (cx, cy) = (ax.floor() as i64, ay.floor() as i64);
        for nx in cx - span..=cx + span {
            for ny in cy - span..=cy + span {
                let Some(bucket) = cells.get(&(nx, ny)) else {
                    continue;
                };
                for &j in bucket {
                    let (dx, dy) = (ax - b_pts[j].0, ay - b_pts[j].1);
                    let d = (dx * dx + dy * dy).sqrt();
                    if d <= IRRATIONAL_SCAN_CAP + IRRATIONAL_EPS {
                        pairs.push((i, j, d));
                    }
                }
            }
        }
    }

    let mut candidates: Vec<f64> = pairs.iter().map(|&(_, _, d)| d).collect();
    candidates.sort_by(|a, b| a.total_cmp(b));
    candidates.dedup_by(|a, b| (*a - *b).abs() <= IRRATIONAL_EPS);

    let violated = |r: f64| -> bool {
        let interior_a: Vec<bool> = a_pts
            .iter()
            .map(|&(x, y)| (x * x + y * y).sqrt() <= rho - r + IRRATIONAL_EPS)
            .collect();
        let interior_b: Vec<bool> = b_pts
            .iter()
            .map(|&(x, y)| (x * x + y * y).sqrt() <= rho - r + IRRATIONAL_EPS)
            .collect();
        let within: Vec<(usize, usize)> = pairs
            .iter()
            .filter(|&&(_, _, d)| d <= r + IRRATIONAL_EPS)
            .map(|&(i, j, _)| (i, j))
            .collect();
        for (interior, flip) in [(&interior_a, false), (&interior_b, true)] {
            let need = interior.iter().filter(|&&f| f).count();
            let edges: Vec<(usize, usize)> = within
                .iter()
                .filter(|&&(i, j)| interior[if flip { j } else { i }])
                .copied()
                .collect();
            let graph = FiniteBigraph::new(a_pts.len(), b_pts.len(), edges)
                .expect("pair scan yields unique index pairs");
            if max_matching(&graph).len() < need {
                return true;
            }
        }
        false
    };

    let (lower_bound, upper_indication) = if candidates.is_empty() {
        (0.0, None)
    } else if !violated(candidates[0]) {
        (0.0, Some(candidates[0]))
    } else if violated(candidates[candidates.len() - 1]) {
        (candidates[candidates.len() - 1], None)
    } else {
        // Invariant: candidates[lo] violates, candidates[hi] does not.
        let (mut lo, mut hi) = (0, candidates.len() - 1);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if violated(candidates[mid]) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (candidates[lo], Some(candidates[hi]))
    };

    Ok(IrrationalReport {
        angle,
        window_radius,
        a_points: a_pts.len(),
        b_points: b_pts.len(),
        candidates: candidates.len(),
        lower_bound,
        upper_indication,
    })
}

/// Parses `"3"`, `"-7/2"`, or a plain decimal such as `"0.71"` into an exact
/// rational.
pub fn parse_ratio(text: &str) -> Result<Ratio<i128>> {
    let s = text.trim();
    let bad = || Error::Other(format!("cannot parse {s:?} as a rational number"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(Error::Other(format!("zero denominator in {s:?}")));
        }
        Ok(Ratio::new(n, d))
    } else if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 27 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole: i128 = match whole {
            "" | "-" | "+" => 0,
            w => w.parse().map_err(|_| bad())?,
        };
        let scale = 10i128.pow(frac.len() as u32);
        let frac: i128 = frac.parse().map_err(|_| bad())?;
        let sign = if negative { -1 } else { 1 };
        Ok(Ratio::new(whole * scale + sign * frac, scale))
    } else {
        let n: i128 = s.parse().map_err(|_| bad())?;
        Ok(Ratio::from_integer(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::zd_box;
    use crate::oracle::torus_bottleneck_reference;
    use crate::symmetry::{covers_interior, materialize, materialize_sym_matching};

    fn rat(n: i128, d: i128) -> Ratio<i128> {
        Ratio::new(n, d)
    }

    fn zero_t() -> RationalPoint {
        (Ratio::from_integer(0), Ratio::from_integer(0))
    }

    fn half_t() -> RationalPoint {
        (rat(1, 2), rat(1, 2))
    }

    #[test]
    fn rotation_validation_and_normalization() {
        let r = RationalRotation::new(3, 4, 5, zero_t()).unwrap();
        assert_eq!((r.p(), r.q(), r.c()), (3, 4, 5));
        let doubled = RationalRotation::new(6, 8, 10, zero_t()).unwrap();
        assert_eq!(doubled, r);
        let flipped = RationalRotation::new(-3, -4, -5, zero_t()).unwrap();
        assert_eq!(flipped, r);
        assert!(matches!(
            RationalRotation::new(1, 1, 2, zero_t()),
            Err(Error::BadRotation(_))
        ));
        assert!(matches!(
            RationalRotation::new(0, 0, 0, zero_t()),
            Err(Error::BadRotation(_))
        ));
    }

    #[test]
    fn sublattice_examples() {
        let id = common_sublattice(&RationalRotation::identity());
        assert_eq!(id.basis, [(1, 0), (0, 1)]);
        assert_eq!(id.index, 1);
        let c5 = common_sublattice(&RationalRotation::new(3, 4, 5, zero_t()).unwrap());
        assert_eq!(c5.basis, [(3, 4), (-4, 3)]);
        assert_eq!(c5.index, 25);
        let c13 = common_sublattice(&RationalRotation::new(5, 12, 13, zero_t()).unwrap());
        assert_eq!(c13.index, 169);
    }

    #[test]
    fn identity_quotient_at_zero_threshold() {
        let rot = RationalRotation::identity();
        let q = quotient_graph(&rot, rat(0, 1)).unwrap();
        assert_eq!(q.a_reps, vec![(0, 0)]);
        assert_eq!(q.b_reps, vec![zero_t()]);
        assert_eq!(q.graph.triples().len(), 1);
        let t = &q.graph.triples()[0];
        assert_eq!(t.g, GroupElem::Zd(vec![0, 0]));
        assert_eq!(q.weights[&(0, t.g.clone(), 0)], rat(0, 1));
    }

    #[test]
    fn shifted_identity_has_four_diagonal_partners() {
        let rot = RationalRotation::identity().with_translation(half_t());
        let q = quotient_graph(&rot, rat(71, 100)).unwrap();
        assert_eq!(q.graph.triples().len(), 4);
        for t in q.graph.triples() {
            assert_eq!(q.weights[&(0, t.g.clone(), 0)], rat(1, 2));
        }
    }

    #[test]
    fn threshold_guards() {
        let rot = RationalRotation::identity();
        assert!(matches!(
            quotient_graph(&rot, rat(1, 1)),
            Err(Error::RadiusAboveCap { .. })
        ));
        assert!(matches!(
            quotient_graph(&rot, rat(-1, 2)),
            Err(Error::Other(_))
        ));
        let big = RationalRotation::new(3, 4, 5, zero_t()).unwrap();
        assert!(quotient_graph(&big, rat(9, 2)).is_ok());
        assert!(quotient_graph(&big, rat(5, 1)).is_err());
    }

    #[test]
    fn quotient_345_matches_direct_enumeration() {
        let rot = RationalRotation::new(3, 4, 5, zero_t()).unwrap();
        let q = quotient_graph(&rot, rat(1, 1)).unwrap();
        assert_eq!(q.graph.a_orbits(), 25);
        assert_eq!(q.graph.b_orbits(), 25);
        // Independent count: for each left representative, scan a generous
        // box of rotated-lattice points and count those within distance 1.
        let mut direct = 0usize;
        for &(ax, ay) in &q.a_reps {
            for ux in -30..=30 {
                for uy in -30..=30 {
                    let (bx, by) = rot.apply((ux, uy));
                    let dx = Ratio::from_integer(ax as i128) - bx;
                    let dy = Ratio::from_integer(ay as i128) - by;
                    if dx * dx + dy * dy <= rat(1, 1) {
                        direct += 1;
                    }
                }
            }
        }
        assert_eq!(q.graph.triples().len(), direct);
    }

    #[test]
    fn identity_bottleneck_is_zero() {
        let rot = RationalRotation::identity();
        match bottleneck_bound(&rot, rat(1, 2)).unwrap() {
            BottleneckOutcome::Found { r_star_sq, .. } => {
                assert_eq!(r_star_sq, rat(0, 1));
            }
            BottleneckOutcome::Infeasible { .. } => panic!("identity matching exists"),
        }
    }

    #[test]
    fn shifted_identity_bottleneck_is_half_squared() {
        let rot = RationalRotation::identity().with_translation(half_t());
        match bottleneck_bound(&rot, rat(71, 100)).unwrap() {
            BottleneckOutcome::Found {
                r_star_sq,
                matching,
                quotient,
            } => {
                assert_eq!(r_star_sq, rat(1, 2));
                let pairs = matched_pairs(&quotient, &matching);
                // Ties among the four diagonal partners resolve to the first
                // translate in serialization order.
                assert_eq!(pairs, vec![((rat(0, 1), rat(0, 1)), (rat(-1, 2), rat(-1, 2)))]);
            }
            BottleneckOutcome::Infeasible { .. } => panic!("diagonal shift is matchable"),
        }
    }

    #[test]
    fn infeasible_below_the_diagonal_distance() {
        let rot = RationalRotation::identity().with_translation(half_t());
        match bottleneck_bound(&rot, rat(1, 2)).unwrap() {
            BottleneckOutcome::Infeasible { largest_tested } => {
                assert_eq!(largest_tested, rat(1, 2));
            }
            BottleneckOutcome::Found { .. } => {
                panic!("nearest partner sits at squared distance 1/2 > (1/2)^2")
            }
        }
    }

    #[test]
    fn bottleneck_agrees_with_reference_up_to_c5() {
        let cases = [
            (1, 0, 1, zero_t()),
            (1, 0, 1, half_t()),
            (1, 0, 1, (rat(1, 3), rat(-2, 7))),
            (0, 1, 1, half_t()),
            (3, 4, 5, zero_t()),
            (3, 4, 5, (rat(1, 2), rat(0, 1))),
            (4, 3, 5, zero_t()),
        ];
        for (p, q, c, t) in cases {
            let rot = RationalRotation::new(p, q, c, t).unwrap();
            let r_cap = rat(99 * c as i128, 100);
            let expected = torus_bottleneck_reference(p, q, c, t);
            match bottleneck_bound(&rot, r_cap).unwrap() {
                BottleneckOutcome::Found { r_star_sq, .. } => {
                    assert_eq!(r_star_sq, expected, "rotation ({p},{q},{c}), t = {t:?}");
                }
                BottleneckOutcome::Infeasible { .. } =>

                    panic!("a perfect matching exists below 0.99·c for ({p},{q},{c})"),
            }
        }
    }

    #[test]
    fn bottleneck_agrees_with_reference_for_c13() {
        let rot = RationalRotation::new(5, 12, 13, zero_t()).unwrap();
        let expected = torus_bottleneck_reference(5, 12, 13, zero_t());
        match bottleneck_bound(&rot, rat(99 * 13, 100)).unwrap() {
            BottleneckOutcome::Found { r_star_sq, .. } => assert_eq!(r_star_sq, expected),
            BottleneckOutcome::Infeasible { .. } => panic!("a perfect matching exists"),
        }
    }

    #[test]
    fn threshold_is_tight_against_the_next_candidate_down() {
        let rot = RationalRotation::new(3, 4, 5, (rat(1, 2), rat(0, 1))).unwrap();
        let BottleneckOutcome::Found {
            r_star_sq,
            quotient,
            ..
        } = bottleneck_bound(&rot, rat(99 * 5, 100)).unwrap()
        else {
            panic!("a perfect matching exists below 0.99·c");
        };
        let fac = factor(&quotient.graph);
        let below: Vec<(usize, usize)> = fac
            .underlying
            .edges()
            .iter()
            .filter(|&&(a, b)| {
                fac.multiplicity[&(a, b)]
                    .iter()
                    .any(|g| quotient.weights[&(a, g.clone(), b)] < r_star_sq)
            })
            .copied()
            .collect();
        let restricted =
            FiniteBigraph::new(quotient.a_reps.len(), quotient.b_reps.len(), below).unwrap();
        assert!(
            max_matching(&restricted).len() < quotient.a_reps.len(),
            "strictly below the optimum no perfect matching may exist"
        );
    }

    #[test]
    fn lifted_matching_covers_a_three_by_three_period_block() {
        let rot = RationalRotation::new(3, 4, 5, (rat(1, 2), rat(0, 1))).unwrap();
        let BottleneckOutcome::Found {
            matching, quotient, ..
        } = bottleneck_bound(&rot, rat(99 * 5, 100)).unwrap()
        else {
            panic!("a perfect matching exists below 0.99·c");
        };
        let window = zd_box(2, 3).unwrap();
        let mat = materialize(&quotient.graph, &window).unwrap();
        let flat = materialize_sym_matching(&quotient.graph, &matching, &mat).unwrap();
        assert!(covers_interior(&mat, &flat));
    }

    #[test]
    fn zero_angle_window_reports_zero() {
        let report = irrational_window_estimate(0.0, (0.0, 0.0), 6).unwrap();
        assert_eq!(report.a_points, report.b_points);
        assert_eq!(report.lower_bound, 0.0);
        assert_eq!(report.upper_indication, Some(0.0));
    }

    #[test]
    fn quarter_turn_window_bounds_grow_and_respect_the_ceiling() {
        let angle = std::f64::consts::FRAC_PI_4;
        let small = irrational_window_estimate(angle, (0.0, 0.0), 4).unwrap();
        let large = irrational_window_estimate(angle, (0.0, 0.0), 8).unwrap();
        assert!(small.lower_bound <= large.lower_bound + IRRATIONAL_EPS);
        assert!(large.lower_bound <= 0.8558 + 1e-3);
        if let (Some(up), low) = (large.upper_indication, large.lower_bound) {
            assert!(low <= up + IRRATIONAL_EPS);
        }
    }

    #[test]
    fn window_radius_must_be_positive() {
        assert!(matches!(
            irrational_window_estimate(0.3, (0.0, 0.0), 0),
            Err(Error::BadWindow(_))
        ));
    }

    #[test]
    fn quotient_graph_round_trips_through_json() {
        let rot = RationalRotation::new(3, 4, 5, zero_t()).unwrap();
        let q = quotient_graph(&rot, rat(1, 1)).unwrap();
        let text = serde_json::to_string(&q.graph).unwrap();
        let back: SymGraph = serde_json::from_str(&text).unwrap();
        assert_eq!(back, q.graph);
    }

    #[test]
    fn ratio_parsing() {
        assert_eq!(parse_ratio("3/4").unwrap(), rat(3, 4));
        assert_eq!(parse_ratio("-7/2").unwrap(), rat(-7, 2));
        assert_eq!(parse_ratio("0.71").unwrap(), rat(71, 100));
        assert_eq!(parse_ratio("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_ratio("2").unwrap(), rat(2, 1));
        assert_eq!(parse_ratio(".5").unwrap(), rat(1, 2));
        assert!(parse_ratio("1/0").is_err());
        assert!(parse_ratio("abc").is_err());
        assert!(parse_ratio("1.2.3").is_err());
    }
}
