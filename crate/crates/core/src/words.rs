//! Boundary words over signed edge letters, regarded up to cyclic rotation.
//!
//! Two boundary words *match* when one is a rotation of the other or of its
//! inverse. Matching is decided through [`canonical_form`], which picks the
//! least sequence among all rotations of a word and of its inverse, so a
//! multiset of canonical forms is a complete signature for a word list.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::equivalence::Isomorphism;
use crate::model::SurfaceRegion;

/// Exponent of a letter. `Pos` orders before `Neg`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Power {
    Pos,
    Neg,
}

impl Power {
    pub fn negate(self) -> Self {
        match self {
            Power::Pos => Power::Neg,
            Power::Neg => Power::Pos,
        }
    }

    pub fn sign(self) -> i64 {
        match self {
            Power::Pos => 1,
            Power::Neg => -1,
        }
    }
}

/// A signed edge letter `B^{+1}` or `B^{-1}`.
///
/// Letters order by label first, then `Pos < Neg`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub label: String,
    pub power: Power,
}

impl Letter {
    pub fn pos(label: impl Into<String>) -> Self {
        Letter { label: label.into(), power: Power::Pos }
    }

    pub fn neg(label: impl Into<String>) -> Self {
        Letter { label: label.into(), power: Power::Neg }
    }

    pub fn inverse(&self) -> Self {
        Letter { label: self.label.clone(), power: self.power.negate() }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.power {
            Power::Pos => write!(f, "{}", self.label),
            Power::Neg => write!(f, "{}^-1", self.label),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WordError {
    #[error("cyclic words must contain at least one letter")]
    Empty,
}

/// A non-empty cyclic sequence of signed letters.
///
/// Equality is letter-for-letter on the stored rotation; use
/// [`rotate_equal`] or [`canonical_form`] for cyclic comparisons.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    pub fn new(letters: Vec<Letter>) -> Result<Self, WordError> {
        if letters.is_empty() {
            return Err(WordError::Empty);
        }
        Ok(CyclicWord(letters))
    }

    /// Parses the compact test notation `"a b^-1 c"`.
    ///
    /// Panics on empty input; intended for fixtures.
    pub fn from_notation(s: &str) -> Self {
        let letters = s
            .split_whitespace()
            .map(|tok| match tok.strip_suffix("^-1") {
                Some(label) => Letter::neg(label),
                None => Letter::pos(tok),
            })
            .collect();
        CyclicWord::new(letters).expect("fixture word must be non-empty")
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|l| l.label.as_str())
    }

    /// Rotation starting at `start`.
    pub fn rotated(&self, start: usize) -> Self {
        let n = self.0.len();
        CyclicWord((0..n).map(|i| self.0[(start + i) % n].clone()).collect())
    }

    /// Rewrites every letter through `f`; `None` from `f` aborts.
    pub fn try_map<F>(&self, mut f: F) -> Option<Self>
    where
        F: FnMut(&Letter) -> Option<Letter>,
    {
        let letters: Option<Vec<_>> = self.0.iter().map(&mut f).collect();
        letters.map(CyclicWord)
    }
}

impl fmt::Display for CyclicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// True iff some rotation of `w1` equals `w2` letter-for-letter.
pub fn rotate_equal(w1: &CyclicWord, w2: &CyclicWord) -> bool {
    if w1.len() != w2.len() {
        return false;
    }
    least_rotation(w1) == least_rotation(w2)
}

/// Letters reversed, every power negated.
pub fn invert(w: &CyclicWord) -> CyclicWord {
    CyclicWord(w.0.iter().rev().map(Letter::inverse).collect())
}

/// Start index of the lexicographically least rotation (Booth's algorithm).
pub fn least_rotation_index_by<T, F>(s: &[T], mut cmp: F) -> usize
where
    F: FnMut(&T, &T) -> Ordering,
{
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let at = |i: usize| &s[i % n];
    let mut failure: Vec<isize> = vec![-1; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = at(j);
        let mut i = failure[j - k - 1];
        while i != -1 && cmp(sj, at(k + i as usize + 1)) != Ordering::Equal {
            if cmp(sj, at(k + i as usize + 1)) == Ordering::Less {
                k = j - i as usize - 1;
            }
            i = failure[i as usize];
        }
        if i == -1 && cmp(sj, at(k)) != Ordering::Equal {
            if cmp(sj, at(k)) == Ordering::Less {
                k = j;
            }
            failure[j - k] = -1;
        } else {
            failure[j - k] = i + 1;
        }
    }
    k % n
}

/// The least rotation of `w` under the natural letter order.
pub fn least_rotation(w: &CyclicWord) -> CyclicWord {
    w.rotated(least_rotation_index_by(&w.0, Ord::cmp))
}

/// Least sequence among all rotations of `w` and of `invert(w)` under `order`.
pub fn canonical_form_by<F>(w: &CyclicWord, mut order: F) -> CyclicWord
where
    F: FnMut(&Letter, &Letter) -> Ordering,
{
    let fwd = w.rotated(least_rotation_index_by(&w.0, &mut order));
    let inv = invert(w);
    let bwd = inv.rotated(least_rotation_index_by(&inv.0, &mut order));
    match cmp_seq(&fwd.0, &bwd.0, &mut order) {
        Ordering::Greater => bwd,
        _ => fwd,
    }
}

/// [`canonical_form_by`] under the fixed letter order (label, then `+` before `-`).
pub fn canonical_form(w: &CyclicWord) -> CyclicWord {
    canonical_form_by(w, Ord::cmp)
}

/// Canonical form together with the orientation it was read in: `Pos` when
/// it is a rotation of `w`, `Neg` when only a rotation of `invert(w)`.
pub fn oriented_canonical_form(w: &CyclicWord) -> (CyclicWord, Power) {
    let fwd = least_rotation(w);
    let bwd = least_rotation(&invert(w));
    if bwd < fwd {
        (bwd, Power::Neg)
    } else {
        (fwd, Power::Pos)
    }
}

fn cmp_seq<F>(a: &[Letter], b: &[Letter], order: &mut F) -> Ordering
where
    F: FnMut(&Letter, &Letter) -> Ordering,
{
    for (x, y) in a.iter().zip(b) {
        match order(x, y) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    a.len().cmp(&b.len())
}

/// Sorted canonical forms of a region's words.
pub fn word_signature<'a, I>(words: I) -> Vec<CyclicWord>
where
    I: IntoIterator<Item = &'a CyclicWord>,
{
    let mut sig: Vec<_> = words.into_iter().map(canonical_form).collect();
    sig.sort();
    sig
}

/// Signature of `region` after translating its words through `iso`, or
/// `None` when `iso` misses one of its edges.
pub(crate) fn translated_signature(
    region: &SurfaceRegion,
    iso: &Isomorphism,
) -> Option<(i64, Vec<CyclicWord>)> {
    let words: Option<Vec<_>> = region.words.iter().map(|w| iso.translate_word(w)).collect();
    Some((region.genus_signed, word_signature(&words?)))
}

/// Same genus and a word bijection pairing each translated word of `l1`
/// with an equal or inverse word of `l2`.
pub fn lists_equivalent(l1: &SurfaceRegion, l2: &SurfaceRegion, iso: &Isomorphism) -> bool {
    match translated_signature(l1, iso) {
        Some(sig) => sig == (l2.genus_signed, word_signature(&l2.words)),
        None => false,
    }
}

/// A bijection `s1 id -> s2 id` of pairwise equivalent lists, if one exists.
///
/// Lists are grouped by their complete signature; any pairing inside a
/// signature class is valid, and lists are paired in id order.
pub fn slw_equivalent(
    s1: &[SurfaceRegion],
    s2: &[SurfaceRegion],
    iso: &Isomorphism,
) -> Option<BTreeMap<String, String>> {
    if s1.len() != s2.len() {
        return None;
    }
    let mut classes: BTreeMap<(i64, Vec<CyclicWord>), (Vec<&str>, Vec<&str>)> = BTreeMap::new();
    for r in s1 {
        let sig = translated_signature(r, iso)?;
        classes.entry(sig).or_default().0.push(&r.id);
    }
    for r in s2 {
        let sig = (r.genus_signed, word_signature(&r.words));
        classes.entry(sig).or_default().1.push(&r.id);
    }
    let mut out = BTreeMap::new();
    for (_, (mut left, mut right)) in classes {
        if left.len() != right.len() {
            return None;
        }
        left.sort();
        right.sort();
        for (a, b) in left.into_iter().zip(right) {
            out.insert(a.to_string(), b.to_string());
        }
    }
    Some(out)
}
