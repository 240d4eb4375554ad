//! Subsets of `[n]` as machine words and duplicate-free families of them.
//!
//! Element `i` of `[n]` (1-based, as in the usual notation) lives in bit
//! `i - 1`. Families keep their members sorted by numeric mask value, so
//! two families are equal exactly when their member vectors are equal.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ground set.
pub const MAX_N: usize = 64;

/// Size of the ground set `[n]`, `1 <= n <= 64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct GroundSize(u8);

impl GroundSize {
    pub fn new(n: usize) -> Result<Self> {
        if (1..=MAX_N).contains(&n) {
            Ok(GroundSize(n as u8))
        } else {
            Err(Error::GroundSize(n))
        }
    }

    #[inline]
    pub fn get(self) -> usize {
        self.0 as usize
    }

    /// Mask with every element of `[n]` set.
    #[inline]
    pub fn full_mask(self) -> SetMask {
        if self.0 as usize == MAX_N {
            SetMask(u64::MAX)
        } else {
            SetMask((1u64 << self.0) - 1)
        }
    }

    pub fn elements(self) -> impl Iterator<Item = usize> {
        1..=self.get()
    }
}

impl TryFrom<usize> for GroundSize {
    type Error = Error;
    fn try_from(n: usize) -> Result<Self> {
        GroundSize::new(n)
    }
}

impl From<GroundSize> for usize {
    fn from(n: GroundSize) -> usize {
        n.get()
    }
}

impl fmt::Display for GroundSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One subset of `[n]`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SetMask(pub u64);

impl SetMask {
    pub const EMPTY: SetMask = SetMask(0);

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    /// `{i}` for a 1-based element `i`.
    #[inline]
    pub fn singleton(i: usize) -> SetMask {
        debug_assert!((1..=MAX_N).contains(&i));
        SetMask(1u64 << (i - 1))
    }

    /// Builds a mask from 1-based elements, checking each against `n`.
    pub fn from_elements<I: IntoIterator<Item = usize>>(n: GroundSize, elems: I) -> Result<SetMask> {
        let mut m = 0u64;
        for e in elems {
            if e == 0 || e > n.get() {
                return Err(Error::ElementOutOfRange { element: e, n: n.get() });
            }
            m |= 1u64 << (e - 1);
        }
        Ok(SetMask(m))
    }

    /// `[a, b]` as a mask (empty when `a > b`).
    pub fn interval(a: usize, b: usize) -> SetMask {
        (a..=b).fold(SetMask::EMPTY, |m, i| m | SetMask::singleton(i))
    }

    pub fn checked(n: GroundSize, bits: u64) -> Result<SetMask> {
        let m = SetMask(bits);
        if m.fits(n) {
            Ok(m)
        } else {
            Err(Error::MaskOutOfRange { mask: bits, n: n.get() })
        }
    }

    #[inline]
    pub fn fits(self, n: GroundSize) -> bool {
        self.0 & !n.full_mask().0 == 0
    }

    #[inline]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        (1..=MAX_N).contains(&i) && self.0 >> (i - 1) & 1 == 1
    }

    #[inline]
    pub fn is_subset(self, other: SetMask) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn intersects(self, other: SetMask) -> bool {
        self.0 & other.0 != 0
    }

    /// `A + B`, the symmetric difference.
    #[inline]
    pub fn symmetric_difference(self, other: SetMask) -> SetMask {
        SetMask(self.0 ^ other.0)
    }

    /// Hamming distance `|A + B|`.
    #[inline]
    pub fn distance(self, other: SetMask) -> u32 {
        (self.0 ^ other.0).count_ones()
    }

    #[inline]
    pub fn with(self, i: usize) -> SetMask {
        self | SetMask::singleton(i)
    }

    #[inline]
    pub fn without(self, i: usize) -> SetMask {
        SetMask(self.0 & !SetMask::singleton(i).0)
    }

    /// 1-based elements in increasing order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        let mut rest = self.0;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(tz + 1)
            }
        })
    }

    /// Bitstring of length `n`, element 1 first.
    pub fn to_bitstring(self, n: GroundSize) -> String {
        (1..=n.get())
            .map(|i| if self.contains(i) { '1' } else { '0' })
            .collect()
    }
}

impl std::ops::BitOr for SetMask {
    type Output = SetMask;
    fn bitor(self, rhs: SetMask) -> SetMask {
        SetMask(self.0 | rhs.0)
    }
}

impl std::ops::BitAnd for SetMask {
    type Output = SetMask;
    fn bitand(self, rhs: SetMask) -> SetMask {
        SetMask(self.0 & rhs.0)
    }
}

impl std::ops::BitXor for SetMask {
    type Output = SetMask;
    fn bitxor(self, rhs: SetMask) -> SetMask {
        SetMask(self.0 ^ rhs.0)
    }
}

impl fmt::Display for SetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, e) in self.elements().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for SetMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `A + B` with ground-size checking.
pub fn symmetric_difference(n: GroundSize, a: SetMask, b: SetMask) -> Result<SetMask> {
    check_mask(n, a)?;
    check_mask(n, b)?;
    Ok(a.symmetric_difference(b))
}

/// `d(A, B) = |A + B|` with ground-size checking.
pub fn distance(n: GroundSize, a: SetMask, b: SetMask) -> Result<u32> {
    check_mask(n, a)?;
    check_mask(n, b)?;
    Ok(a.distance(b))
}

fn check_mask(n: GroundSize, m: SetMask) -> Result<()> {
    if m.fits(n) {
        Ok(())
    } else {
        Err(Error::MaskOutOfRange { mask: m.0, n: n.get() })
    }
}

/// Whether a coordinate must be present or absent in a restriction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Presence {
    Present,
    Absent,
}

/// One or two coordinates with a presence tag each, as in `F(i)`, `F(ī)`,
/// `F(i,j)`, `F(ī,j̄)` and `F(i,j̄)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    terms: Vec<(usize, Presence)>,
}

impl Restriction {
    pub fn new(terms: &[(usize, Presence)]) -> Result<Self> {
        if terms.is_empty() || terms.len() > 2 {
            return Err(crate::error::param("restriction names one or two coordinates"));
        }
        if terms.len() == 2 && terms[0].0 == terms[1].0 {
            return Err(Error::DuplicateCoordinate(terms[0].0));
        }
        Ok(Restriction { terms: terms.to_vec() })
    }

    pub fn present(i: usize) -> Self {
        Restriction { terms: vec![(i, Presence::Present)] }
    }

    pub fn absent(i: usize) -> Self {
        Restriction { terms: vec![(i, Presence::Absent)] }
    }

    pub fn terms(&self) -> &[(usize, Presence)] {
        &self.terms
    }
}

/// A duplicate-free family of subsets of `[n]`, members sorted by mask value.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SetFamily {
    n: GroundSize,
    members: Vec<SetMask>,
}

impl SetFamily {
    pub fn empty(n: GroundSize) -> Self {
        SetFamily { n, members: Vec::new() }
    }

    /// Strict constructor: rejects duplicates and out-of-range masks.
    pub fn new<I: IntoIterator<Item = SetMask>>(n: GroundSize, members: I) -> Result<Self> {
        let mut v: Vec<SetMask> = members.into_iter().collect();
        for &m in &v {
            check_mask(n, m)?;
        }
        v.sort_unstable();
        if let Some(w) = v.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateMember(w[0].to_string()));
        }
        Ok(SetFamily { n, members: v })
    }

    /// Collects masks, silently merging duplicates. Masks must fit `n`.
    pub fn from_masks<I: IntoIterator<Item = SetMask>>(n: GroundSize, members: I) -> Self {
        let mut v: Vec<SetMask> = members.into_iter().collect();
        debug_assert!(v.iter().all(|m| m.fits(n)));
        v.sort_unstable();
        v.dedup();
        SetFamily { n, members: v }
    }

    /// Convenience for tests and examples: members given as element lists.
    pub fn from_sets(n: usize, sets: &[&[usize]]) -> Result<Self> {
        let n = GroundSize::new(n)?;
        let masks = sets
            .iter()
            .map(|s| SetMask::from_elements(n, s.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        SetFamily::new(n, masks)
    }

    /// Every subset of `[n]` (only sensible for small `n`).
    pub fn power_set(n: GroundSize) -> Self {
        assert!(n.get() <= 24, "power set of [{n}] is too large");
        SetFamily { n, members: (0..1u64 << n.get()).map(SetMask).collect() }
    }

    #[inline]
    pub fn n(&self) -> GroundSize {
        self.n
    }

    #[inline]
    pub fn members(&self) -> &[SetMask] {
        &self.members
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains(&self, m: SetMask) -> bool {
        self.members.binary_search(&m).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, SetMask> {
        self.members.iter()
    }

    pub fn into_members(self) -> Vec<SetMask> {
        self.members
    }

    /// Whether every member of `self` is a member of `other`.
    pub fn is_subfamily_of(&self, other: &SetFamily) -> bool {
        // both sorted: merge walk
        let mut it = other.members.iter();
        'outer: for m in &self.members {
            for o in it.by_ref() {
                if o == m {
                    continue 'outer;
                }
                if o > m {
                    return false;
                }
            }
            return false;
        }
        true
    }

    pub fn insert(&mut self, m: SetMask) -> bool {
        debug_assert!(m.fits(self.n));
        match self.members.binary_search(&m) {
            Ok(_) => false,
            Err(pos) => {
                self.members.insert(pos, m);
                true
            }
        }
    }

    pub fn remove(&mut self, m: SetMask) -> bool {
        match self.members.binary_search(&m) {
            Ok(pos) => {
                self.members.remove(pos);
                true
            }
            Err(_) => false,
        }
    }

    /// `Δ(F)`: the largest pairwise distance; 0 for fewer than two members.
    pub fn diameter(&self) -> u32 {
        let m = &self.members;
        let mut best = 0;
        for (i, a) in m.iter().enumerate() {
            for b in &m[i + 1..] {
                best = best.max(a.distance(*b));
            }
        }
        best
    }

    /// Largest `|F ∪ F'|` over ordered pairs, `F = F'` included.
    pub fn max_union(&self) -> u32 {
        let m = &self.members;
        let mut best = 0;
        for (i, a) in m.iter().enumerate() {
            for b in &m[i..] {
                best = best.max((*a | *b).len());
            }
        }
        best
    }

    /// `F + S`.
    pub fn translate(&self, shift: SetMask) -> Result<SetFamily> {
        check_mask(self.n, shift)?;
        Ok(self.translate_unchecked(shift))
    }

    pub(crate) fn translate_unchecked(&self, shift: SetMask) -> SetFamily {
        SetFamily::from_masks(self.n, self.members.iter().map(|m| *m ^ shift))
    }

    /// The restricted subfamily, with the coordinates tagged present removed
    /// from every surviving member.
    pub fn restrict(&self, r: &Restriction) -> Result<SetFamily> {
        let mut must_have = SetMask::EMPTY;
        let mut must_miss = SetMask::EMPTY;
        for &(i, p) in r.terms() {
            if i == 0 || i > self.n.get() {
                return Err(Error::ElementOutOfRange { element: i, n: self.n.get() });
            }
            match p {
                Presence::Present => must_have = must_have.with(i),
                Presence::Absent => must_miss = must_miss.with(i),
            }
        }
        Ok(SetFamily::from_masks(
            self.n,
            self.members
                .iter()
                .filter(|m| must_have.is_subset(**m) && !m.intersects(must_miss))
                .map(|m| SetMask(m.0 & !must_have.0)),
        ))
    }

    /// `F_k`: members of size exactly `k`.
    pub fn slice(&self, k: u32) -> SetFamily {
        SetFamily {
            n: self.n,
            members: self.members.iter().copied().filter(|m| m.len() == k).collect(),
        }
    }

    /// Every ordered pair of members meets in at least `t` elements.
    pub fn is_t_intersecting(&self, t: u32) -> bool {
        let m = &self.members;
        m.iter().enumerate().all(|(i, a)| m[i..].iter().all(|b| (*a & *b).len() >= t))
    }

    /// Every `F ∈ self`, `G ∈ other` meet.
    pub fn is_cross_intersecting(&self, other: &SetFamily) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::GroundMismatch(self.n.get(), other.n.get()));
        }
        Ok(self.members.iter().all(|a| other.members.iter().all(|b| a.intersects(*b))))
    }

    /// Downward closed: `E ⊆ F ∈ 𝓕` implies `E ∈ 𝓕`. It suffices to check
    /// that removing any single element of a member stays inside.
    pub fn is_complex(&self) -> bool {
        self.members
            .iter()
            .all(|m| m.elements().all(|i| self.contains(m.without(i))))
    }

    /// `|F(i)|` and `|F(ī)|` for one coordinate.
    pub fn degree_split(&self, i: usize) -> (usize, usize) {
        let with = self.members.iter().filter(|m| m.contains(i)).count();
        (with, self.len() - with)
    }

    /// Applies a coordinate permutation; `perm[i - 1]` is the image of `i`.
    pub fn permute(&self, perm: &[usize]) -> Result<SetFamily> {
        let n = self.n.get();
        if perm.len() != n {
            return Err(crate::error::param(format!("permutation has length {} != n = {n}", perm.len())));
        }
        let mut seen = vec![false; n + 1];
        for &p in perm {
            if p == 0 || p > n || std::mem::replace(&mut seen[p], true) {
                return Err(crate::error::param("not a permutation of [n]"));
            }
        }
        Ok(SetFamily::from_masks(self.n, self.members.iter().map(|m| permute_mask(*m, perm))))
    }
}

/// Image of one mask under a 1-based permutation.
pub fn permute_mask(m: SetMask, perm: &[usize]) -> SetMask {
    m.elements().fold(SetMask::EMPTY, |acc, i| acc.with(perm[i - 1]))
}

impl fmt::Display for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, m) in self.members.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for SetFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SetFamily(n={}, {})", self.n, self)
    }
}

impl<'a> IntoIterator for &'a SetFamily {
    type Item = &'a SetMask;
    type IntoIter = std::slice::Iter<'a, SetMask>;
    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

/// All `k`-subsets of `[n]` in increasing mask order.
pub fn k_subsets(n: GroundSize, k: u32) -> Vec<SetMask> {
    let n = n.get() as u32;
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![SetMask::EMPTY];
    }
    let mut out = Vec::new();
    // Gosper's hack over masks with k bits, bounded by 2^n.
    let mut m: u64 = (1u64 << k) - 1;
    let limit: u128 = 1u128 << n;
    while (m as u128) < limit {
        out.push(SetMask(m));
        let c = m & m.wrapping_neg();
        let r = m.wrapping_add(c);
        if r == 0 {
            break;
        }
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}
