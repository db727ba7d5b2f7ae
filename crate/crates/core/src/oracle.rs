//! Slow, obviously-correct reference implementations.
//!
//! Everything here recomputes a quantity the main modules produce by a
//! cleverer route, using a deliberately different algorithm and data path:
//! exhaustive enumeration instead of augmenting paths, string generation
//! instead of word arithmetic, dense grids instead of set algebra. Tests
//! compare the two. Keep these naive — their only job is to be right.

use std::collections::{BTreeMap, BTreeSet};

use num_rational::Ratio;

use crate::bigraph::{FiniteBigraph, Side};
use crate::symmetry::Materialized;

/// Classic single-augmenting-path (Kuhn) maximum matching over raw adjacency
/// lists. Quadratic and humble; shares no code with the layered matcher.
pub fn kuhn_max_matching(adj: &[Vec<usize>], right_count: usize) -> Vec<(usize, usize)> {
    fn try_augment(
        v: usize,
        adj: &[Vec<usize>],
        seen: &mut [bool],
        right_match: &mut [Option<usize>],
    ) -> bool {
        for &w in &adj[v] {
            if seen[w] {
                continue;
            }
            seen[w] = true;
            if right_match[w].is_none()
                || try_augment(right_match[w].unwrap(), adj, seen, right_match)
            {
                right_match[w] = Some(v);
                return true;
            }
        }
        false
    }

    let mut right_match: Vec<Option<usize>> = vec![None; right_count];
    for v in 0..adj.len() {
        let mut seen = vec![false; right_count];
        try_augment(v, adj, &mut seen, &mut right_match);
    }
    let mut pairs: Vec<(usize, usize)> = right_match
        .iter()
        .enumerate()
        .filter_map(|(w, v)| v.map(|v| (v, w)))
        .collect();
    pairs.sort_unstable();
    pairs
}

/// Maximum matching size by exhaustive search over subsets of the right
/// side (bitmask dynamic program). Only for graphs with at most 20 right
/// vertices.
pub fn max_matching_size_exhaustive(g: &FiniteBigraph) -> usize {
    assert!(
        g.right_count() <= 20,
        "exhaustive matcher is exponential in the right side"
    );
    let n = g.left_count();
    let adj = g.adjacency(Side::Left);
    let mut memo: BTreeMap<(usize, u32), usize> = BTreeMap::new();

    fn rec(
        i: usize,
        mask: u32,
        n: usize,
        adj: &[Vec<usize>],
        memo: &mut BTreeMap<(usize, u32), usize>,
    ) -> usize {
        if i == n {
            return 0;
        }
        if let Some(&v) = memo.get(&(i, mask)) {
            return v;
        }
        let mut best = rec(i + 1, mask, n, adj, memo);
        for &j in &adj[i] {
            if mask >> j & 1 == 0 {
                best = best.max(1 + rec(i + 1, mask | 1 << j, n, adj, memo));
            }
        }
        memo.insert((i, mask), best);
        best
    }

    rec(0, 0, n, adj, &mut memo)
}

/// Worst Hall deficiency `|S| - |N(S)|` over *all* subsets of a side, with an
/// attaining subset. Exponential; sides of at most 20 vertices.
pub fn hall_deficiency_exhaustive(g: &FiniteBigraph, side: Side) -> (i64, Vec<usize>) {
    let n = match side {
        Side::Left => g.left_count(),
        Side::Right => g.right_count(),
    };
    assert!(n <= 20, "subset enumeration is exponential");
    let adj = g.adjacency(side);
    let mut best = (0i64, Vec::new());
    for mask in 0u32..(1 << n) {
        let subset: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let mut nbhd = BTreeSet::new();
        for &v in &subset {
            nbhd.extend(adj[v].iter().copied());
        }
        let deficiency = subset.len() as i64 - nbhd.len() as i64;
        if deficiency > best.0 {
            best = (deficiency, subset);
        }
    }
    best
}

/// All reduced words of length at most `radius` in the free group of the
/// given rank, generated as raw strings over the letter alphabet and
/// filtered for adjacent cancellations. The alphabet skips `e` (reserved for
/// the identity), matching the group serializer.
pub fn free_ball_strings(rank: usize, radius: u32) -> BTreeSet<String> {
    const LETTERS: &[u8; 25] = b"abcdfghijklmnopqrstuvwxyz";
    assert!(rank <= LETTERS.len());
    let alphabet: Vec<char> = LETTERS[..rank]
        .iter()
        .flat_map(|&b| [b as char, (b as char).to_ascii_uppercase()])
        .collect();
    let cancels = |x: char, y: char| x != y && x.eq_ignore_ascii_case(&y);

    let mut out = BTreeSet::new();
    out.insert("e".to_string());
    let mut frontier: Vec<String> = vec![String::new()];
    for _ in 0..radius {
        let mut next = Vec::new();
        for w in &frontier {
            for &ch in &alphabet {
                if w.chars().last().is_some_and(|last| cancels(last, ch)) {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(ch);
                out.insert(w2.clone());
                next.push(w2);
            }
        }
        frontier = next;
    }
    out
}

/// Detects an improper presentation from a finite window alone: under a free
/// action, two distinct edge orbits join the same orbit pair exactly when
/// some right vertex has two distinct left neighbors from one left orbit.
/// The window must be large enough to contain those neighbors (a ball of
/// radius beyond the longest triple element suffices).
pub fn same_orbit_fork_in_window(mat: &Materialized) -> bool {
    let radj = mat.graph.adjacency(Side::Right);
    for nbrs in radj {
        let mut orbits_seen = BTreeSet::new();
        for &v in nbrs {
            let (_, orbit) = mat.left_label(v);
            if !orbits_seen.insert(orbit) {
                return true;
            }
        }
    }
    false
}

/// `|F·U|` for finite subsets of the integer lattice, computed by marking a
/// dense boolean grid over the bounding box rather than by set algebra.
pub fn zd_product_size_dense(f: &[Vec<i64>], u: &[Vec<i64>]) -> usize {
    if f.is_empty() || u.is_empty() {
        return 0;
    }
    let d = f[0].len();
    let mut lo = vec![i64::MAX; d];
    let mut hi = vec![i64::MIN; d];
    for a in f {
        for b in u {
            for k in 0..d {
                let x = a[k] + b[k];
                lo[k] = lo[k].min(x);
                hi[k] = hi[k].max(x);
            }
        }
    }
    let dims: Vec<usize> = (0..d).map(|k| (hi[k] - lo[k] + 1) as usize).collect();
    let total: usize = dims.iter().product();
    assert!(total <= 1 << 28, "bounding box too large for dense marking");
    let mut grid = vec![false; total];
    let mut count = 0;
    for a in f {
        for b in u {
            let mut idx = 0usize;
            for k in 0..d {
                idx = idx * dims[k] + (a[k] + b[k] - lo[k]) as usize;
            }
            if !grid[idx] {
                grid[idx] = true;
                count += 1;
            }
        }
    }
    count
}

/// Exact bottleneck cost for the twin-lattice assignment, squared: the
/// smallest `r²` such that the `c²` lattice classes on each side admit a
/// perfect matching using only pairs at squared distance `≤ r²`.
///
/// Brute force in every respect: representatives are chosen as
/// lexicographically smallest points (via a divisibility invariant, not
/// fundamental-domain reduction), distances minimize over explicit lattice
/// translates, and feasibility uses the Kuhn matcher.
pub fn torus_bottleneck_reference(
    p: i64,
    q: i64,
    c: i64,
    t: (Ratio<i128>, Ratio<i128>),
) -> Ratio<i128> {
    assert_eq!(p * p + q * q, c * c, "not a rational rotation");
    let (p, q, c) = (p as i128, q as i128, c as i128);
    let cc = c * c;

    // Class invariant for v mod L, L = <(p,q),(-q,p)>: the adjugate image
    // reduced mod c². Lexicographically smallest point of each class in
    // [0,c²)² is the representative.
    let class_key = |x: i128, y: i128| -> (i128, i128) {
        ((p * x + q * y).rem_euclid(cc), (-q * x + p * y).rem_euclid(cc))
    };
    let mut reps: BTreeMap<(i128, i128), (i128, i128)> = BTreeMap::new();
    for x in 0..cc {
        for y in 0..cc {
            reps.entry(class_key(x, y)).or_insert((x, y));
        }
    }
    let a_reps: Vec<(i128, i128)> = reps.values().copied().collect();
    assert_eq!(a_reps.len() as i128, cc);

    // Rotated-side representatives: R·u + t for u in [0,c)².
    let b_reps: Vec<(Ratio<i128>, Ratio<i128>)> = (0..c)
        .flat_map(|ux| {
            (0..c).map(move |uy| {
                (
                    Ratio::new(p * ux - q * uy, c) + t.0,
                    Ratio::new(q * ux + p * uy, c) + t.1,
                )
            })
        })
        .collect();

    // Min squared distance between classes: minimize ‖v + L·m − w‖² over
    // integer m. The basis is orthogonal with equal lengths, so rounding the
    // real solution coordinate-wise is exact; a ±1 window adds slack.
    let round_nearest = |x: Ratio<i128>| -> i128 { (x + Ratio::new(1, 2)).floor().to_integer() };
    let dist2 = |v: (i128, i128), w: (Ratio<i128>, Ratio<i128>)| -> Ratio<i128> {
        let dx = w.0 - Ratio::from_integer(v.0);
        let dy = w.1 - Ratio::from_integer(v.1);
        // Solve L·m = (dx, dy): m = adj(L)·d / c².
        let m1 = round_nearest((Ratio::from_integer(p) * dx + Ratio::from_integer(q) * dy) / cc);
        let m2 = round_nearest((Ratio::from_integer(-q) * dx + Ratio::from_integer(p) * dy) / cc);
        let mut best: Option<Ratio<i128>> = None;
        for a in m1 - 1..=m1 + 1 {
            for b in m2 - 1..=m2 + 1 {
                let lx = a * p - b * q;
                let ly = a * q + b * p;
                let ex = dx - Ratio::from_integer(lx);
                let ey = dy - Ratio::from_integer(ly);
                let d2 = ex * ex + ey * ey;
                best = Some(match best {
                    Some(cur) if cur <= d2 => cur,
                    _ => d2,
                });
            }
        }
        best.unwrap()
    };

    let n = a_reps.len();
    let mut weights: Vec<Vec<Ratio<i128>>> = Vec::with_capacity(n);
    let mut distinct: BTreeSet<Ratio<i128>> = BTreeSet::new();
    for &v in &a_reps {
        let row: Vec<Ratio<i128>> = b_reps.iter().map(|&w| dist2(v, w)).collect();
        distinct.extend(row.iter().copied());
        weights.push(row);
    }

    // Smallest threshold admitting a perfect matching, by binary search over
    // the distinct weights (feasibility is monotone in the threshold).
    let thresholds: Vec<Ratio<i128>> = distinct.into_iter().collect();
    let feasible = |thr: Ratio<i128>| -> bool {
        let adj: Vec<Vec<usize>> = weights
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|&(_, &w)| w <= thr)
                    .map(|(j, _)| j)
                    .collect()
            })
            .collect();
        kuhn_max_matching(&adj, n).len() == n
    };
    let mut lo = 0usize;
    let mut hi = thresholds.len() - 1;
    assert!(feasible(thresholds[hi]), "complete threshold must match");
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasible(thresholds[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    thresholds[lo]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kuhn_finds_augmenting_chains() {
        // Path graph: 0-0, 0-1, 1-1 forces the alternating reassignment.
        let adj = vec![vec![0, 1], vec![1]];
        assert_eq!(kuhn_max_matching(&adj, 2).len(), 2);

        let adj = vec![vec![0], vec![0]];
        assert_eq!(kuhn_max_matching(&adj, 1).len(), 1);
    }

    #[test]
    fn exhaustive_matcher_small_cases() {
        let g = FiniteBigraph::complete(3, 3);
        assert_eq!(max_matching_size_exhaustive(&g), 3);

        let g = FiniteBigraph::new(3, 1, vec![(0, 0), (1, 0), (2, 0)]).unwrap();
        assert_eq!(max_matching_size_exhaustive(&g), 1);
    }

    #[test]
    fn deficiency_on_a_starved_side() {
        // Three left vertices share one right vertex: deficiency 2.
        let g = FiniteBigraph::new(3, 2, vec![(0, 0), (1, 0), (2, 0)]).unwrap();
        let (d, subset) = hall_deficiency_exhaustive(&g, Side::Left);
        assert_eq!(d, 2);
        assert_eq!(subset, [0, 1, 2]);
        let (d, _) = hall_deficiency_exhaustive(&g, Side::Right);
        assert_eq!(d, 1); // the isolated right vertex
    }

    #[test]
    fn free_ball_strings_sizes() {
        assert_eq!(free_ball_strings(2, 0).len(), 1);
        assert_eq!(free_ball_strings(2, 1).len(), 5);
        assert_eq!(free_ball_strings(2, 2).len(), 17);
        assert_eq!(free_ball_strings(1, 3).len(), 7);
        assert!(free_ball_strings(2, 2).contains("aB"));
        assert!(!free_ball_strings(2, 2).contains("aA"));
    }

    #[test]
    fn dense_product_count_matches_hand_count() {
        let f: Vec<Vec<i64>> = (0..3).flat_map(|x| (0..3).map(move |y| vec![x, y])).collect();
        let u = vec![vec![0, 0], vec![1, 0], vec![0, 1]];
        // 3×3 box grown by a corner: 9 + 3 + 3 = 15.
        assert_eq!(zd_product_size_dense(&f, &u), 15);
    }

    #[test]
    fn identity_rotation_bottleneck_is_half() {
        // c = 1: a single class per side, offset by (1/2, 1/2); the nearest
        // lattice translate sits at squared distance 1/2.
        let r2 = torus_bottleneck_reference(1, 0, 1, (Ratio::new(1, 2), Ratio::new(1, 2)));
        assert_eq!(r2, Ratio::new(1, 2));
    }

    #[test]
    fn zero_offset_bottleneck_is_zero() {
        // Unrotated, untranslated: both sides are the same lattice classes.
        let r2 = torus_bottleneck_reference(
            1,
            0,
            1,
            (Ratio::from_integer(0), Ratio::from_integer(0)),
        );
        assert_eq!(r2, Ratio::from_integer(0));
    }
}
