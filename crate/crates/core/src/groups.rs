//! Finitely generated groups the rest of the crate works over: free abelian
//! `Z^d`, cyclic `Z_n`, and free groups `F_k` on reduced words.
//!
//! Elements have a canonical string form which doubles as their JSON
//! serialization: `Z^d` vectors print as `[x,y,...]`, cyclic residues as the
//! least non-negative representative (`"3"`), and free-group words as letter
//! strings (`"abA"`), lowercase for generators, uppercase for inverses, `"e"`
//! for the identity. The letter `e` is reserved for the identity and skipped
//! in the generator alphabet, so ranks up to 25 serialize unambiguously.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Generator alphabet for free groups; `e` is reserved for the identity.
const FREE_ALPHABET: &[u8; 25] = b"abcdfghijklmnopqrstuvwxyz";

/// Which group a set of elements lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupDescriptor {
    /// Free abelian group of rank `d`, elements are integer vectors.
    Zd { d: usize },
    /// Integers mod `n`, elements are least non-negative residues.
    Cyclic { n: u64 },
    /// Free group of the given rank, elements are reduced words.
    Free { rank: usize },
}

impl GroupDescriptor {
    pub fn zd(d: usize) -> Self {
        GroupDescriptor::Zd { d }
    }

    pub fn cyclic(n: u64) -> Self {
        GroupDescriptor::Cyclic { n }
    }

    pub fn free(rank: usize) -> Self {
        GroupDescriptor::Free { rank }
    }

    pub fn identity(&self) -> GroupElem {
        match *self {
            GroupDescriptor::Zd { d } => GroupElem::Zd(vec![0; d]),
            GroupDescriptor::Cyclic { .. } => GroupElem::Cyclic(0),
            GroupDescriptor::Free { .. } => GroupElem::Free(Vec::new()),
        }
    }

    /// Checks that `g` is a well-formed element of this group: right vector
    /// length, residue below the modulus, letters within rank and reduced.
    pub fn validate(&self, g: &GroupElem) -> Result<()> {
        let mismatch = || Error::DescriptorMismatch {
            expected: self.to_string(),
            found: g.to_string(),
        };
        match (*self, g) {
            (GroupDescriptor::Zd { d }, GroupElem::Zd(v)) => {
                if v.len() == d {
                    Ok(())
                } else {
                    Err(mismatch())
                }
            }
            (GroupDescriptor::Cyclic { n }, GroupElem::Cyclic(r)) => {
                if n == 0 {
                    Err(Error::BadModulus)
                } else if *r < n {
                    Ok(())
                } else {
                    Err(mismatch())
                }
            }
            (GroupDescriptor::Free { rank }, GroupElem::Free(word)) => {
                if rank == 0 || rank > FREE_ALPHABET.len() {
                    return Err(Error::BadRank(rank));
                }
                let in_rank = word
                    .iter()
                    .all(|&l| l != 0 && (l.unsigned_abs() as usize) <= rank);
                if in_rank && is_reduced(word) {
                    Ok(())
                } else {
                    Err(mismatch())
                }
            }
            _ => Err(mismatch()),
        }
    }

    /// Parses the canonical string form of an element. Cyclic residues may be
    /// given as any integer and are reduced mod `n`; free-group words must
    /// already be reduced.
    pub fn parse_elem(&self, text: &str) -> Result<GroupElem> {
        let bad = |reason: &str| Error::BadElement {
            descriptor: self.to_string(),
            text: text.to_string(),
            reason: reason.to_string(),
        };
        let elem = match *self {
            GroupDescriptor::Zd { d } => {
                let inner = text
                    .strip_prefix('[')
                    .and_then(|t| t.strip_suffix(']'))
                    .ok_or_else(|| bad("expected [x,y,...]"))?;
                let coords: Vec<i64> = if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|p| p.trim().parse::<i64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| bad(&e.to_string()))?
                };
                if coords.len() != d {
                    return Err(bad(&format!("expected {d} coordinates")));
                }
                GroupElem::Zd(coords)
            }
            GroupDescriptor::Cyclic { n } => {
                if n == 0 {
                    return Err(Error::BadModulus);
                }
                let v: i128 = text.trim().parse().map_err(|_| bad("expected an integer"))?;
                GroupElem::Cyclic(v.rem_euclid(n as i128) as u64)
            }
            GroupDescriptor::Free { rank } => {
                if rank == 0 || rank > FREE_ALPHABET.len() {
                    return Err(Error::BadRank(rank));
                }
                if text == "e" {
                    return Ok(GroupElem::Free(Vec::new()));
                }
                let mut word = Vec::with_capacity(text.len());
                for c in text.chars() {
                    let lower = c.to_ascii_lowercase();
                    let idx = FREE_ALPHABET
                        .iter()
                        .position(|&a| a as char == lower)
                        .ok_or_else(|| bad(&format!("unknown letter {c:?}")))?;
                    if idx + 1 > rank {
                        return Err(bad(&format!("letter {c:?} exceeds rank {rank}")));
                    }
                    let letter = (idx + 1) as i8;
                    word.push(if c.is_ascii_uppercase() { -letter } else { letter });
                }
                if !is_reduced(&word) {
                    return Err(bad("word is not reduced"));
                }
                GroupElem::Free(word)
            }
        };
        Ok(elem)
    }
}

impl fmt::Display for GroupDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupDescriptor::Zd { d } => write!(f, "Z^{d}"),
            GroupDescriptor::Cyclic { n } => write!(f, "Z_{n}"),
            GroupDescriptor::Free { rank } => write!(f, "F_{rank}"),
        }
    }
}

/// JSON form of a descriptor: `{"family": "free", "param": 2}`.
#[derive(Serialize, Deserialize)]
struct DescriptorRepr {
    family: String,
    param: u64,
}

impl Serialize for GroupDescriptor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (family, param) = match *self {
            GroupDescriptor::Zd { d } => ("zd", d as u64),
            GroupDescriptor::Cyclic { n } => ("cyclic", n),
            GroupDescriptor::Free { rank } => ("free", rank as u64),
        };
        DescriptorRepr {
            family: family.to_string(),
            param,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GroupDescriptor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = DescriptorRepr::deserialize(d)?;
        match repr.family.as_str() {
            "zd" => Ok(GroupDescriptor::Zd {
                d: repr.param as usize,
            }),
            "cyclic" => Ok(GroupDescriptor::Cyclic { n: repr.param }),
            "free" => Ok(GroupDescriptor::Free {
                rank: repr.param as usize,
            }),
            other => Err(serde::de::Error::custom(format!(
                "unknown group family {other:?}"
            ))),
        }
    }
}

/// A group element; see the module docs for the canonical string forms.
///
/// Free-group words store one signed letter per entry: `+k` is the `k`-th
/// generator (1-based), `-k` its inverse, and the word is always reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupElem {
    Zd(Vec<i64>),
    Cyclic(u64),
    Free(Vec<i8>),
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElem::Zd(v) => {
                write!(f, "[")?;
                for (k, x) in v.iter().enumerate() {
                    if k > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
            GroupElem::Cyclic(r) => write!(f, "{r}"),
            GroupElem::Free(word) => {
                if word.is_empty() {
                    return write!(f, "e");
                }
                for &l in word {
                    let c = FREE_ALPHABET[(l.unsigned_abs() as usize) - 1] as char;
                    if l < 0 {
                        write!(f, "{}", c.to_ascii_uppercase())?;
                    } else {
                        write!(f, "{c}")?;
                    }
                }
                Ok(())
            }
        }
    }
}

fn is_reduced(word: &[i8]) -> bool {
    word.windows(2).all(|w| w[0] != -w[1])
}

/// Concatenates two reduced words, cancelling across the seam.
fn reduce_concat(a: &[i8], b: &[i8]) -> Vec<i8> {
    let mut out: Vec<i8> = a.to_vec();
    for &l in b {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// `a ∘ b` in the group described by `desc`.
pub fn compose(desc: &GroupDescriptor, a: &GroupElem, b: &GroupElem) -> Result<GroupElem> {
    desc.validate(a)?;
    desc.validate(b)?;
    Ok(match (a, b) {
        (GroupElem::Zd(x), GroupElem::Zd(y)) => {
            GroupElem::Zd(x.iter().zip(y).map(|(p, q)| p + q).collect())
        }
        (GroupElem::Cyclic(x), GroupElem::Cyclic(y)) => {
            let n = match desc {
                GroupDescriptor::Cyclic { n } => *n,
                _ => unreachable!(),
            };
            GroupElem::Cyclic((x + y) % n)
        }
        (GroupElem::Free(x), GroupElem::Free(y)) => GroupElem::Free(reduce_concat(x, y)),
        _ => unreachable!("validate() rules out mixed variants"),
    })
}

/// `g⁻¹` in the group described by `desc`.
pub fn inverse(desc: &GroupDescriptor, g: &GroupElem) -> Result<GroupElem> {
    desc.validate(g)?;
    Ok(match g {
        GroupElem::Zd(v) => GroupElem::Zd(v.iter().map(|x| -x).collect()),
        GroupElem::Cyclic(r) => {
            let n = match desc {
                GroupDescriptor::Cyclic { n } => *n,
                _ => unreachable!(),
            };
            GroupElem::Cyclic(if *r == 0 { 0 } else { n - r })
        }
        GroupElem::Free(word) => GroupElem::Free(word.iter().rev().map(|l| -l).collect()),
    })
}

/// A finite set of elements of one group, kept sorted by canonical
/// serialization so that iteration order, JSON output, and "first element"
/// tie-breaks are all deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSubset {
    descriptor: GroupDescriptor,
    elements: Vec<GroupElem>,
}

impl FiniteSubset {
    /// Builds a subset, validating every element, deduplicating, and sorting
    /// canonically.
    pub fn new(descriptor: GroupDescriptor, elements: Vec<GroupElem>) -> Result<Self> {
        for e in &elements {
            descriptor.validate(e)?;
        }
        let mut tagged: Vec<(String, GroupElem)> =
            elements.into_iter().map(|e| (e.to_string(), e)).collect();
        tagged.sort_by(|a, b| a.0.cmp(&b.0));
        tagged.dedup_by(|a, b| a.0 == b.0);
        Ok(FiniteSubset {
            descriptor,
            elements: tagged.into_iter().map(|(_, e)| e).collect(),
        })
    }

    pub fn descriptor(&self) -> &GroupDescriptor {
        &self.descriptor
    }

    pub fn elements(&self) -> &[GroupElem] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        let key = g.to_string();
        self.elements
            .binary_search_by(|e| e.to_string().cmp(&key))
            .is_ok()
    }
}

/// The ball of the given radius around the identity in the word metric:
/// the L∞ box `[-r, r]^d` for `Z^d`, residues with representative of
/// absolute value `<= r` for cyclic groups (the whole group once
/// `2r + 1 >= n`), and reduced words of length `<= r` for free groups.
pub fn ball(desc: &GroupDescriptor, radius: u32) -> Result<FiniteSubset> {
    let elements = match *desc {
        GroupDescriptor::Zd { d } => {
            let r = radius as i64;
            let mut out = vec![Vec::new()];
            for _ in 0..d {
                let mut next = Vec::with_capacity(out.len() * (2 * radius as usize + 1));
                for v in &out {
                    for x in -r..=r {
                        let mut w = v.clone();
                        w.push(x);
                        next.push(w);
                    }
                }
                out = next;
            }
            out.into_iter().map(GroupElem::Zd).collect()
        }
        GroupDescriptor::Cyclic { n } => {
            if n == 0 {
                return Err(Error::BadModulus);
            }
            (0..n)
                .filter(|&x| x.min(n - x) <= radius as u64)
                .map(GroupElem::Cyclic)
                .collect()
        }
        GroupDescriptor::Free { rank } => {
            if rank == 0 || rank > FREE_ALPHABET.len() {
                return Err(Error::BadRank(rank));
            }
            let mut all: Vec<Vec<i8>> = vec![Vec::new()];
            let mut shell: Vec<Vec<i8>> = vec![Vec::new()];
            for _ in 0..radius {
                let mut next = Vec::with_capacity(shell.len() * (2 * rank - 1));
                for w in &shell {
                    for k in 1..=rank as i8 {
                        for letter in [k, -k] {
                            if w.last() != Some(&-letter) {
                                let mut v = w.clone();
                                v.push(letter);
                                next.push(v);
                            }
                        }
                    }
                }
                all.extend(next.iter().cloned());
                shell = next;
            }
            all.into_iter().map(GroupElem::Free).collect()
        }
    };
    FiniteSubset::new(*desc, elements)
}

/// The box `[0, side)^d` in `Z^d`; the window family used by the abelian
/// Folner probes.
pub fn zd_box(d: usize, side: u64) -> Result<FiniteSubset> {
    let mut out: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..d {
        let mut next = Vec::with_capacity(out.len() * side as usize);
        for v in &out {
            for x in 0..side as i64 {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    FiniteSubset::new(
        GroupDescriptor::Zd { d },
        out.into_iter().map(GroupElem::Zd).collect(),
    )
}

/// Right translate `F∘g = {f∘g : f ∈ F}`; always the same size as `F`.
pub fn right_translate(f: &FiniteSubset, g: &GroupElem) -> Result<FiniteSubset> {
    let desc = *f.descriptor();
    let translated = f
        .elements()
        .iter()
        .map(|x| compose(&desc, x, g))
        .collect::<Result<Vec<_>>>()?;
    FiniteSubset::new(desc, translated)
}

/// Product set `F∘U = {f∘u : f ∈ F, u ∈ U}` with duplicates removed.
pub fn product_set(f: &FiniteSubset, u: &FiniteSubset) -> Result<FiniteSubset> {
    if f.descriptor() != u.descriptor() {
        return Err(Error::SubsetDescriptorMismatch(
            f.descriptor().to_string(),
            u.descriptor().to_string(),
        ));
    }
    let desc = *f.descriptor();
    let mut out = Vec::with_capacity(f.len() * u.len());
    for x in f.elements() {
        for y in u.elements() {
            out.push(compose(&desc, x, y)?);
        }
    }
    FiniteSubset::new(desc, out)
}
