//! Quantitative (non-)amenability probes: Følner ratios over window
//! schedules, boundary witnesses, and an explicit doubling decomposition of
//! the rank-2 free group.
//!
//! All ratios are exact rationals over set cardinalities — no floating
//! point — so reports are reproducible bit for bit.

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::{
    ball, compose, inverse, product_set, right_translate, zd_box, FiniteSubset, GroupDescriptor,
    GroupElem,
};

/// `|F·U| / |F|`: how much a window grows when pushed by every element of
/// `U`. Values near 1 witness almost-invariance of `F` under `U`.
pub fn folner_ratio(f: &FiniteSubset, u: &FiniteSubset) -> Result<Ratio<u64>> {
    if f.is_empty() {
        return Err(Error::BadWindow("window F is empty".into()));
    }
    if u.is_empty() {
        return Err(Error::BadWindow("translator set U is empty".into()));
    }
    let fu = product_set(f, u)?;
    Ok(Ratio::new(fu.len() as u64, f.len() as u64))
}

/// `|F \ F·g| / |F|`: the fraction of the window displaced by a single right
/// translation.
pub fn boundary_ratio(f: &FiniteSubset, g: &GroupElem) -> Result<Ratio<u64>> {
    if f.is_empty() {
        return Err(Error::BadWindow("window F is empty".into()));
    }
    let fg = right_translate(f, g)?;
    let moved = f.elements().iter().filter(|x| !fg.contains(x)).count();
    Ok(Ratio::new(moved as u64, f.len() as u64))
}

/// The worst single-translation displacement over `U`, with the element
/// attaining it (ties broken toward the canonically first element).
pub fn folner_witness_translate(f: &FiniteSubset, u: &FiniteSubset) -> Result<(Ratio<u64>, GroupElem)> {
    if u.is_empty() {
        return Err(Error::BadWindow("translator set U is empty".into()));
    }
    let mut best: Option<(Ratio<u64>, GroupElem)> = None;
    for g in u.elements() {
        let r = boundary_ratio(f, g)?;
        match &best {
            Some((cur, _)) if *cur >= r => {}
            _ => best = Some((r, g.clone())),
        }
    }
    Ok(best.expect("U is non-empty"))
}

/// One window's worth of almost-invariance data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FolnerRow {
    pub label: String,
    pub f_size: usize,
    pub fu_size: usize,
    /// `|FU| / |F|`.
    #[serde(with = "crate::ratio_string")]
    pub ratio: Ratio<u64>,
    /// Worst displacement `|F \ Fg| / |F|` over `g ∈ U`.
    #[serde(with = "crate::ratio_string")]
    pub witness_ratio: Ratio<u64>,
    /// The displacing element attaining it.
    pub witness_elem: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FolnerReport {
    pub rows: Vec<FolnerRow>,
    /// Least `|FU|/|F|` seen so far across the schedule — an upper bound on
    /// the true infimum, which is 1 exactly on amenable groups.
    #[serde(with = "crate::ratio_string")]
    pub infimum_so_far: Ratio<u64>,
}

/// Runs the ratio and witness computations across a labelled window
/// schedule. The union bound `|FU| ≤ |F|·(1 + |U|·δ)`, with `δ` the worst
/// displacement, ties the two columns together; tests rely on it.
pub fn folner_report(
    windows: &[(String, FiniteSubset)],
    u: &FiniteSubset,
) -> Result<FolnerReport> {
    if windows.is_empty() {
        return Err(Error::BadWindow("empty window schedule".into()));
    }
    let mut rows = Vec::with_capacity(windows.len());
    let mut inf: Option<Ratio<u64>> = None;
    for (label, f) in windows {
        let ratio = folner_ratio(f, u)?;
        let (witness_ratio, witness_elem) = folner_witness_translate(f, u)?;
        inf = Some(match inf {
            Some(cur) if cur <= ratio => cur,
            _ => ratio,
        });
        rows.push(FolnerRow {
            label: label.clone(),
            f_size: f.len(),
            fu_size: product_set(f, u)?.len(),
            ratio,
            witness_ratio,
            witness_elem: witness_elem.to_string(),
        });
    }
    Ok(FolnerReport {
        rows,
        infimum_so_far: inf.expect("schedule is non-empty"),
    })
}

/// The natural window schedule for a group family: growing boxes on integer
/// lattices (side `1..=steps`), growing balls elsewhere (radius
/// `0..steps`).
pub fn standard_schedule(
    desc: &GroupDescriptor,
    steps: u32,
) -> Result<Vec<(String, FiniteSubset)>> {
    let mut out = Vec::new();
    match desc {
        GroupDescriptor::Zd { d } => {
            for side in 1..=steps as u64 {
                out.push((format!("box(side={side})"), zd_box(*d, side)?));
            }
        }
        _ => {
            for r in 0..steps {
                out.push((format!("ball(r={r})"), ball(desc, r)?));
            }
        }
    }
    Ok(out)
}

/// An explicit doubling of the rank-2 free group by right translations.
///
/// Two total classifiers chop `G` into finitely many pieces twice over —
/// once per copy — assigning every element a translator from the finite set
/// `F`. Validity means: the translated pieces of *both* copies together tile
/// `G` exactly once, i.e. the map `(x, copy) ↦ x·classify_copy(x)` is a
/// bijection `G ⊔ G → G`. No amenable group admits such a map.
///
/// The classifiers are plain function pointers on group elements (total, so
/// each copy's pieces partition `G` by construction); they must return
/// elements of `f` and panic on non-free-group input.
#[derive(Clone)]
pub struct ParadoxDecomp {
    /// The right translators in play.
    pub f: FiniteSubset,
    /// Piece assignment for the first copy.
    pub classify_a: fn(&GroupElem) -> GroupElem,
    /// Piece assignment for the second copy.
    pub classify_b: fn(&GroupElem) -> GroupElem,
}

impl std::fmt::Debug for ParadoxDecomp {
    fn fmt(&self, fm: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        fm.debug_struct("ParadoxDecomp").field("f", &self.f).finish()
    }
}

fn free_word(x: &GroupElem) -> &[i8] {
    match x {
        GroupElem::Free(w) => w,
        _ => panic!("paradox classifiers are defined on free-group elements"),
    }
}

fn ends_in(x: &GroupElem, letter: i8) -> bool {
    free_word(x).last() == Some(&letter)
}

fn is_positive_power_of_a(x: &GroupElem) -> bool {
    let w = free_word(x);
    !w.is_empty() && w.iter().all(|&l| l == 1)
}

fn classify_a_standard(x: &GroupElem) -> GroupElem {
    // Words ending in the first generator go untranslated — except its pure
    // positive powers, which are absorbed into the shifted piece so that the
    // shift can emit them one step earlier and cover the identity.
    if ends_in(x, 1) && !is_positive_power_of_a(x) {
        GroupElem::Free(vec![])
    } else {
        GroupElem::Free(vec![-1])
    }
}

fn classify_b_standard(x: &GroupElem) -> GroupElem {
    if ends_in(x, 2) {
        GroupElem::Free(vec![])
    } else {
        GroupElem::Free(vec![-2])
    }
}

fn classify_a_broken(x: &GroupElem) -> GroupElem {
    // Drops the positive-power exception: the identity then falls through
    // every piece of both copies, and verification must notice.
    if ends_in(x, 1) {
        GroupElem::Free(vec![])
    } else {
        GroupElem::Free(vec![-1])
    }
}

/// The translator set `{e, a⁻¹, b⁻¹}` shared by both standard classifiers.
fn standard_f() -> FiniteSubset {
    FiniteSubset::new(
        GroupDescriptor::free(2),
        vec![
            GroupElem::Free(vec![]),
            GroupElem::Free(vec![-1]),
            GroupElem::Free(vec![-2]),
        ],
    )
    .expect("fixed elements are valid")
}

/// The textbook doubling of the rank-2 free group, in right-translation
/// form: copy one tiles the `a`-side of the group (words ending in `a` or
/// `a⁻¹`, plus the identity), copy two tiles the `b`-side.
pub fn standard_f2_paradox() -> ParadoxDecomp {
    ParadoxDecomp {
        f: standard_f(),
        classify_a: classify_a_standard,
        classify_b: classify_b_standard,
    }
}

/// A deliberately faulty variant that forgets to re-route the positive
/// powers of `a`. Kept as a regression target: verification must reject it.
pub fn broken_paradox() -> ParadoxDecomp {
    ParadoxDecomp {
        f: standard_f(),
        classify_a: classify_a_broken,
        classify_b: classify_b_standard,
    }
}

/// Checks the doubling on a ball: every `y` with `|y| ≤ radius` must be hit
/// by exactly one translated piece across both copies, i.e. there is exactly
/// one pair `(copy, g ∈ F)` with `classify_copy(y∘g⁻¹) = g`. Classifier
/// outputs are also required to lie in `F`. Returns the first offending
/// element, if any.
pub fn verify_paradox(d: &ParadoxDecomp, radius: u32) -> Result<Option<GroupElem>> {
    let desc = *d.f.descriptor();
    if !matches!(desc, GroupDescriptor::Free { .. }) {
        return Err(Error::BadWindow(
            "doubling verification expects a free group".into(),
        ));
    }
    let window = ball(&desc, radius)?;
    for y in window.elements() {
        let mut hits = 0;
        for g in d.f.elements() {
            let pre = compose(&desc, y, &inverse(&desc, g)?)?;
            for classify in [d.classify_a, d.classify_b] {
                let assigned = classify(&pre);
                if !d.f.contains(&assigned) {
                    return Err(Error::Other(format!(
                        "classifier output {assigned} is outside the translator set"
                    )));
                }
                if assigned == *g {
                    hits += 1;
                }
            }
        }
        if hits != 1 {
            return Ok(Some(y.clone()));
        }
    }
    Ok(None)
}

/// Rows of `(word, copy-one translator, copy-two translator)` for display.
pub fn classification_table(
    d: &ParadoxDecomp,
    words: &[GroupElem],
) -> Vec<(String, String, String)> {
    words
        .iter()
        .map(|x| {
            (
                x.to_string(),
                (d.classify_a)(x).to_string(),
                (d.classify_b)(x).to_string(),
            )
        })
        .collect()
}
