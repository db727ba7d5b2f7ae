//! The acceptance gate for the whole workspace: ten numbered checks, each
//! printing one PASS/FAIL line (run with `--nocapture` to see them all).
//! Every numeric claim is pinned exactly — rationals compare by value,
//! floats against fixed bounds — and each check carries a wall-clock
//! budget.

use std::panic::{catch_unwind, resume_unwind, AssertUnwindSafe};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use serde_json::Value;

use symmatch::amenability::{broken_paradox, folner_ratio, standard_f2_paradox, verify_paradox};
use symmatch::bigraph::{hall_check, is_perfect, max_matching};
use symmatch::corpus::{random_bigraph, random_proper_symgraph, seeded_rng};
use symmatch::counterexample::{
    build_counterexample, certify_no_symmetric_matching, explicit_matching, standard_bundle,
    LatinSquare,
};
use symmatch::groups::{ball, zd_box};
use symmatch::oracle::{max_matching_size_exhaustive, torus_bottleneck_reference, zd_product_size_dense};
use symmatch::symmetry::{
    covers_interior, factor, interior_hall_violation, is_proper, lift, materialize,
    materialize_sym_matching, project,
};
use symmatch::twinlattice::{bottleneck_bound, irrational_window_estimate, BottleneckOutcome, RationalRotation};
use symmatch::{
    Error, FiniteBigraph, FiniteSubset, GroupDescriptor, GroupElem, HallOutcome, Side, SymGraph,
};

/// Runs one numbered check, prints its verdict line, and enforces the time
/// budget. The verdict line is printed before any panic propagates, so a
/// red run still shows which check broke.
fn criterion(n: u32, label: &str, budget: Duration, body: impl FnOnce()) {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(body));
    let elapsed = start.elapsed();
    match outcome {
        Ok(()) if elapsed <= budget => {
            println!("criterion {n:02} [{label}]: PASS ({elapsed:.2?})");
        }
        Ok(()) => {
            println!(
                "criterion {n:02} [{label}]: FAIL (over budget: {elapsed:.2?} > {budget:?})"
            );
            panic!("criterion {n} exceeded its {budget:?} budget");
        }
        Err(cause) => {
            println!("criterion {n:02} [{label}]: FAIL ({elapsed:.2?})");
            resume_unwind(cause);
        }
    }
}

/// All 16-edge-mask graphs on 4+4 vertices, then 500 seeded random graphs
/// up to 7+7. Criteria 1 and 2 run over exactly this corpus.
fn bigraph_corpus() -> Vec<FiniteBigraph> {
    let mut graphs = Vec::with_capacity(1 << 16);
    for mask in 0u32..(1 << 16) {
        let edges: Vec<(usize, usize)> = (0..16)
            .filter(|bit| mask & (1 << bit) != 0)
            .map(|bit| (bit / 4, bit % 4))
            .collect();
        graphs.push(FiniteBigraph::new(4, 4, edges).expect("grid edges are valid"));
    }
    let mut rng = seeded_rng(0xACC0);
    for k in 0..500 {
        let left = 1 + k % 7;
        let right = 1 + (5 * k) % 7;
        let density = 0.1 + 0.11 * ((k % 8) as f64);
        graphs.push(random_bigraph(&mut rng, left, right, density));
    }
    graphs
}

/// 200 seeded proper symmetric graphs over Z_n (n <= 8) and Z^2, at most 4
/// orbits per side and 12 triples, every third one built deficient.
/// Criteria 3 and 4 run over exactly this corpus.
fn symgraph_corpus() -> Vec<SymGraph> {
    let mut rng = seeded_rng(0xACC3);
    let mut graphs = Vec::with_capacity(200);
    for k in 0..200usize {
        let desc = if k % 2 == 0 {
            GroupDescriptor::cyclic(2 + (k as u64 / 2) % 7)
        } else {
            GroupDescriptor::zd(2)
        };
        let orbits = 1 + k % 4;
        let deficient = orbits >= 2 && k % 3 == 0;
        let max_triples = (orbits + 2 + k % 7).min(12);
        graphs.push(random_proper_symgraph(&mut rng, desc, orbits, max_triples, deficient));
    }
    graphs
}

fn zd_coords(s: &FiniteSubset) -> Vec<Vec<i64>> {
    s.elements()
        .iter()
        .map(|g| match g {
            GroupElem::Zd(v) => v.clone(),
            other => panic!("expected a lattice element, got {other}"),
        })
        .collect()
}

#[test]
fn criterion_01_matching_against_the_exhaustive_oracle() {
    criterion(1, "matching oracle equivalence", Duration::from_secs(60), || {
        for g in &bigraph_corpus() {
            assert_eq!(
                max_matching(g).pairs().len(),
                max_matching_size_exhaustive(g),
                "disagreement on {g:?}"
            );
        }
    });
}

#[test]
fn criterion_02_hall_verdicts_match_left_coverage() {
    criterion(2, "finite Hall theorem", Duration::from_secs(60), || {
        for g in &bigraph_corpus() {
            let covered = max_matching(g).pairs().len();
            for side in [Side::Left, Side::Right] {
                let side_size = match side {
                    Side::Left => g.left_count(),
                    Side::Right => g.right_count(),
                };
                let ok = matches!(hall_check(g, side), HallOutcome::Satisfied);
                assert_eq!(ok, covered == side_size, "side {side:?} of {g:?}");
            }
        }
    });
}

#[test]
fn criterion_03_factor_round_trips_and_coverage_transfer() {
    criterion(3, "factor correspondence", Duration::from_secs(120), || {
        for sg in &symgraph_corpus() {
            let fac = factor(sg);
            let m = max_matching(&fac.underlying);
            let sm = lift(sg, &m, None).expect("factor matchings lift");
            assert_eq!(project(sg, &sm).expect("lifts project"), m, "project . lift != id");
            let again = lift(sg, &project(sg, &sm).unwrap(), None).unwrap();
            assert_eq!(again, sm, "lift . project != id");

            let perfect = is_perfect(&fac.underlying, &m).expect("sides are sized");
            for radius in 1..=4u32 {
                let window = ball(sg.descriptor(), radius).expect("window builds");
                let mat = materialize(sg, &window).expect("windows materialize");
                let finite = materialize_sym_matching(sg, &sm, &mat).expect("restriction is a matching");
                assert_eq!(
                    covers_interior(&mat, &finite),
                    perfect,
                    "coverage at radius {radius} must equal factor perfectness"
                );
            }
        }
    });
}

#[test]
fn criterion_04_perfect_factors_iff_no_window_violation() {
    criterion(4, "window Hall transfer", Duration::from_secs(120), || {
        for sg in &symgraph_corpus() {
            let fac = factor(sg);
            let perfect = is_perfect(&fac.underlying, &max_matching(&fac.underlying)).unwrap();
            let violated = (2..=6u32).any(|radius| {
                let window = ball(sg.descriptor(), radius).expect("window builds");
                let mat = materialize(sg, &window).expect("windows materialize");
                interior_hall_violation(&mat).is_some()
            });
            assert_eq!(perfect, !violated, "on {sg:?}");
        }
    });
}

#[test]
fn criterion_05_counterexample_certificate() {
    criterion(5, "counterexample certificate", Duration::from_secs(30), || {
        let bundle = standard_bundle();
        assert_eq!(bundle.translators.len(), 3);
        assert!(is_proper(&bundle.graph));

        for radius in 0..=3u32 {
            let window = ball(bundle.translators.descriptor(), radius).unwrap();
            let (mat, m) = explicit_matching(&bundle, &window).expect("explicit matching builds");
            assert!(covers_interior(&mat, &m), "uncovered interior at radius {radius}");
        }

        let fac = factor(&bundle.graph);
        assert_eq!(fac.underlying.left_count(), 3);
        assert_eq!(fac.underlying.right_count(), 6);
        assert_eq!(fac.underlying.edges().len(), 18, "factor must be complete 3x6");
        assert_eq!(max_matching(&fac.underlying).pairs().len(), 3);

        let witness = certify_no_symmetric_matching(&bundle).expect("certificate exists");
        assert_eq!(witness.side, Side::Right);
        assert_eq!(
            witness.subset.len() - witness.neighborhood_size,
            3,
            "right deficiency"
        );
    });
}

#[test]
fn criterion_06_paradox_verification_and_mutations() {
    criterion(6, "paradoxical decomposition", Duration::from_secs(30), || {
        assert_eq!(
            verify_paradox(&standard_f2_paradox(), 8).expect("verification runs"),
            None,
            "the standard doubling must verify on the radius-8 ball"
        );

        // Mutation 1: dropping the re-routing of the positive powers of `a`
        // leaves the identity uncovered.
        let offender = verify_paradox(&broken_paradox(), 8).expect("verification runs");
        assert_eq!(offender, Some(GroupElem::Free(vec![])));

        // Mutation 2: repeating an entry in the routing square makes two
        // right vertices claim one partner; the explicit matching must be
        // rejected rather than silently double-matched.
        let square = LatinSquare::unchecked(vec![vec![0, 1, 2], vec![0, 2, 0], vec![2, 0, 1]]);
        let bundle = build_counterexample(standard_f2_paradox(), square).unwrap();
        assert!(!is_proper(&bundle.graph));
        let window = ball(bundle.translators.descriptor(), 2).unwrap();
        match explicit_matching(&bundle, &window) {
            Err(Error::InvalidMatching(_)) => {}
            other => panic!("corrupted square went undetected: {other:?}"),
        }
    });
}

#[test]
fn criterion_07_folner_ratios() {
    criterion(7, "Folner numerics", Duration::from_secs(30), || {
        // Z^2 boxes against the generator cross U = {0, e1, e2}: the exact
        // ratio is (n+2)/n, strictly decreasing, below 1.04 at n = 64, and
        // must agree with dense product-set enumeration.
        let desc = GroupDescriptor::zd(2);
        let cross = FiniteSubset::new(
            desc,
            vec![
                GroupElem::Zd(vec![0, 0]),
                GroupElem::Zd(vec![1, 0]),
                GroupElem::Zd(vec![0, 1]),
            ],
        )
        .unwrap();
        let mut previous: Option<Ratio<u64>> = None;
        for n in 1..=64u64 {
            let f = zd_box(2, n).unwrap();
            let ratio = folner_ratio(&f, &cross).unwrap();
            assert_eq!(ratio, Ratio::new(n + 2, n), "closed form at side {n}");
            let dense = zd_product_size_dense(&zd_coords(&f), &zd_coords(&cross));
            assert_eq!(ratio, Ratio::new(dense as u64, n * n), "enumeration at side {n}");
            if let Some(prev) = previous {
                assert!(ratio < prev, "ratios must strictly decrease");
            }
            previous = Some(ratio);
        }
        assert!(previous.unwrap() < Ratio::new(104, 100), "side 64 must sit below 1.04");

        // Free rank-2 balls against the generator set U = {a, a⁻¹, b, b⁻¹}:
        // the asserted floor of 17/5 for every radius up to 6. The true
        // ratio is |B(r+1)|/|B(r)| = (2·3^(r+1)−1)/(2·3^r−1), which equals
        // 17/5 at r = 1 and then falls toward 3, so this clause fails at
        // r = 2 (53/17 ≈ 3.118); it is asserted as stated rather than
        // weakened to what would pass.
        let free2 = GroupDescriptor::free(2);
        let u = FiniteSubset::new(
            free2,
            ["a", "A", "b", "B"]
                .iter()
                .map(|w| free2.parse_elem(w).unwrap())
                .collect(),
        )
        .unwrap();
        let floor = Ratio::new(17u64, 5);
        for r in 0..=6u32 {
            let f = ball(&free2, r).unwrap();
            let ratio = folner_ratio(&f, &u).unwrap();
            assert!(
                ratio >= floor,
                "ball ratio at radius {r} is {ratio}, below the asserted 17/5 floor"
            );
        }
    });
}

#[test]
fn criterion_08_rational_twin_lattice_bottlenecks() {
    criterion(8, "twin lattice, rational", Duration::from_secs(60), || {
        let half = Ratio::new(1i128, 2);
        let shifted = RationalRotation::new(1, 0, 1, (half, half)).unwrap();
        match bottleneck_bound(&shifted, Ratio::new(99, 100)).unwrap() {
            BottleneckOutcome::Found { r_star_sq, .. } => {
                assert_eq!(r_star_sq, half, "shifted identity bottleneck is sqrt(1/2)")
            }
            BottleneckOutcome::Infeasible { .. } => panic!("shifted identity must be feasible"),
        }

        let zero = (Ratio::from_integer(0), Ratio::from_integer(0));
        let pinned = [
            (3i64, 4i64, 5i64, Ratio::new(1i128, 5)),
            (5, 12, 13, Ratio::new(4, 13)),
        ];
        for &(p, q, c, expected) in &pinned {
            let rot = RationalRotation::new(p, q, c, zero).unwrap();
            let live = match bottleneck_bound(&rot, Ratio::new(99 * c as i128, 100)).unwrap() {
                BottleneckOutcome::Found { r_star_sq, .. } => r_star_sq,
                BottleneckOutcome::Infeasible { .. } => panic!("({p},{q},{c}) must be feasible"),
            };
            let reference = torus_bottleneck_reference(p, q, c, zero);
            assert_eq!(live, reference, "({p},{q},{c}) quotient vs wraparound oracle");
            assert_eq!(live, expected, "({p},{q},{c}) pinned squared bottleneck");
        }
    });
}

#[test]
fn criterion_09_irrational_window_bounds() {
    criterion(9, "twin lattice, 45 degrees", Duration::from_secs(120), || {
        let angle = std::f64::consts::FRAC_PI_4;
        let mut last = 0.0f64;
        for radius in [5i64, 10, 15, 20, 25, 30] {
            let report = irrational_window_estimate(angle, (0.0, 0.0), radius).unwrap();
            let lower = report.lower_bound;
            assert!(
                lower + 1e-12 >= last,
                "lower bound fell from {last} to {lower} at radius {radius}"
            );
            assert!(
                lower <= 0.8558,
                "window lower bound {lower} exceeds the optimal-transport ceiling"
            );
            last = lower;
        }
        assert!(last >= 0.70, "radius-30 lower bound {last} is too weak");
    });
}

const K33: &str = r#"{"left":3,"right":3,"edges":[[0,0],[0,1],[0,2],[1,0],[1,1],[1,2],[2,0],[2,1],[2,2]]}"#;
const COMPLETE_3X6: &str = r#"{"left":3,"right":6,"edges":[[0,0],[0,1],[0,2],[0,3],[0,4],[0,5],[1,0],[1,1],[1,2],[1,3],[1,4],[1,5],[2,0],[2,1],[2,2],[2,3],[2,4],[2,5]]}"#;
const CYCLIC_TWO_ORBITS: &str = r#"{"group":{"family":"cyclic","param":6},"a_orbits":2,"b_orbits":2,"triples":[[0,"1",0],[1,"4",1]]}"#;

fn invoke(args: &[String]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symmatch"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn strip_timing(stdout: &[u8]) -> Vec<u8> {
    if stdout.first() == Some(&b'{') {
        let mut v: Value = serde_json::from_slice(stdout).expect("JSON report parses");
        v.as_object_mut()
            .expect("reports are objects")
            .remove("timing_ms")
            .expect("reports carry a timing field");
        serde_json::to_vec(&v).expect("stripped report serializes")
    } else {
        stdout.to_vec()
    }
}

#[test]
fn criterion_10_cli_determinism() {
    criterion(10, "CLI determinism", Duration::from_secs(120), || {
        let dir = tempfile::tempdir().unwrap();
        let file = |name: &str, contents: &str| -> String {
            let path = dir.path().join(name);
            std::fs::write(&path, contents).unwrap();
            path.to_str().unwrap().to_string()
        };
        let k33 = file("k33.json", K33);
        let wide = file("c36.json", COMPLETE_3X6);
        let cyc = file("cyc.json", CYCLIC_TWO_ORBITS);
        let bundle = file(
            "bundle.json",
            &serde_json::to_string(&standard_bundle().graph).unwrap(),
        );
        let angle = std::f64::consts::FRAC_PI_4.to_string();

        let corpus: Vec<Vec<&str>> = vec![
            vec!["match", &k33],
            vec!["match", &wide, "--require-perfect"],
            vec!["factor", &bundle],
            vec!["symmatch", &cyc, "--window", "3"],
            vec!["symmatch", &bundle],
            vec!["folner", "--group", "Z^2", "--steps", "6", "--format", "json"],
            vec!["folner", "--group", "F_2", "--steps", "4"],
            vec!["paradox", "--radius", "4"],
            vec!["paradox", "--radius", "4", "--corrupted"],
            vec!["counterexample"],
            vec!["counterexample", "--verify", "2"],
            vec!["twinlattice", "--pqc", "3", "4", "5"],
            vec!["twinlattice", "--pqc", "1", "0", "1", "--t", "1/2", "1/2", "--emit"],
            vec!["twinlattice", "--angle", &angle, "--window", "8"],
            vec!["selftest", "--seed", "11"],
        ];
        for args in &corpus {
            let args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
            let first = invoke(&args);
            let second = invoke(&args);
            assert_eq!(first.status.code(), second.status.code(), "exit codes: {args:?}");
            assert_eq!(
                strip_timing(&first.stdout),
                strip_timing(&second.stdout),
                "structured output changed between runs: {args:?}"
            );
            assert_eq!(first.stderr, second.stderr, "stderr changed: {args:?}");
        }
    });
}
