//! Exhaustive oracles for the cross-intersecting inequalities.
//!
//! For a fixed `F`, the largest `G` cross-intersecting it is the set of
//! all candidate sets meeting every member of `F`. Side conditions that
//! only limit `G` (at most `c` common members with `F`, a minimum size)
//! are met by deleting members of that companion, which cannot break
//! cross-intersection, so the optimum over `G` is read off directly:
//! `|companion \ F| + min(c, |companion ∩ F|)`. Only `F` is enumerated.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::binomial;
use crate::constructions::lex_family;
use crate::error::{param, Error, Result};
use crate::family::{k_subsets, GroundSize, SetFamily, SetMask};

/// Largest enumerated universe for `F`, as a power of two.
pub const LEMMA_ENUM_BITS: usize = 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LemmaKind {
    F16,
    H672,
    W231,
    HK32,
    LN,
    #[serde(rename = "LAST_I")]
    LastI,
    #[serde(rename = "LAST_II")]
    LastII,
}

impl LemmaKind {
    pub fn name(self) -> &'static str {
        match self {
            LemmaKind::F16 => "F16",
            LemmaKind::H672 => "H672",
            LemmaKind::W231 => "W231",
            LemmaKind::HK32 => "HK32",
            LemmaKind::LN => "LN",
            LemmaKind::LastI => "LAST_I",
            LemmaKind::LastII => "LAST_II",
        }
    }
}

impl fmt::Display for LemmaKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LemmaKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let k = match s.trim().to_ascii_uppercase().replace('-', "_").as_str() {
            "F16" => LemmaKind::F16,
            "H672" => LemmaKind::H672,
            "W231" => LemmaKind::W231,
            "HK32" => LemmaKind::HK32,
            "LN" => LemmaKind::LN,
            "LAST_I" => LemmaKind::LastI,
            "LAST_II" => LemmaKind::LastII,
            other => return Err(param(format!("unknown lemma {other:?}"))),
        };
        Ok(k)
    }
}

/// A lemma with its parameters. `k` defaults to 2 for HK32 and is unused
/// by the LAST pair; `t` is used by F16 and `l` by LN.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaId {
    pub kind: LemmaKind,
    pub n: usize,
    pub k: usize,
    pub t: usize,
    pub l: usize,
}

impl LemmaId {
    pub fn new(kind: LemmaKind, n: usize, k: Option<usize>, t: Option<usize>, l: Option<usize>) -> Result<Self> {
        let k = match kind {
            LemmaKind::HK32 => k.unwrap_or(2),
            LemmaKind::LastI | LemmaKind::LastII => k.unwrap_or(3),
            _ => k.ok_or_else(|| param(format!("{kind} needs k")))?,
        };
        let id = LemmaId { kind, n, k, t: t.unwrap_or(0), l: l.unwrap_or(0) };
        if kind == LemmaKind::LN && l.is_none() {
            return Err(param("LN needs l"));
        }
        id.check_window()?;
        Ok(id)
    }

    pub fn check_window(&self) -> Result<()> {
        let LemmaId { kind, n, k, t, l } = *self;
        let ok = match kind {
            LemmaKind::F16 => k >= 1 && n >= 2 * k + t,
            LemmaKind::H672 => k >= 1 && n >= 2 * k,
            LemmaKind::W231 => k >= 3 && n >= 2 * k,
            LemmaKind::HK32 => k == 2 && n >= 5,
            LemmaKind::LN => k >= 1 && l >= 1 && n > k + l,
            LemmaKind::LastI | LemmaKind::LastII => k == 3 && n >= 6,
        };
        if ok {
            GroundSize::new(n)?;
            Ok(())
        } else {
            Err(param(format!("{self} is outside the lemma's window")))
        }
    }
}

impl fmt::Display for LemmaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            LemmaKind::F16 => write!(f, "F16(n={},k={},t={})", self.n, self.k, self.t),
            LemmaKind::LN => write!(f, "LN(n={},k={},l={})", self.n, self.k, self.l),
            LemmaKind::LastI | LemmaKind::LastII => write!(f, "{}(n={})", self.kind, self.n),
            _ => write!(f, "{}(n={},k={})", self.kind, self.n, self.k),
        }
    }
}

/// One inequality checked by an oracle run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub bound: i128,
    /// Whether the optimum must stay strictly below `bound`.
    pub strict: bool,
    /// Best `|F| + |G|` found, with a pair attaining it.
    pub optimum: Option<usize>,
    pub witness: Option<(SetFamily, SetFamily)>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LemmaReport {
    pub lemma: LemmaId,
    pub checks: Vec<CheckResult>,
    /// Number of `F` examined (random trials for LN).
    pub explored: u64,
    pub pass: bool,
    /// First violating pair, if any.
    pub counterexample: Option<(SetFamily, SetFamily)>,
}

struct Check {
    name: &'static str,
    bound: i128,
    strict: bool,
    g_min: usize,
    /// Cap on `|F ∩ G|`; `None` leaves `G` unconstrained.
    common_cap: Option<usize>,
}

struct Oracle {
    n: GroundSize,
    uf: Vec<SetMask>,
    ug: Vec<SetMask>,
    /// `meets[i]`: companions (bitset over `ug`) meeting `uf[i]`.
    meets: Vec<u64>,
    /// `compat[i]`: members of `uf` that may sit in `F` together with `uf[i]`.
    compat: Vec<u64>,
    /// `same[i]`: bit of `uf[i]` inside `ug`, when the universes overlap.
    same: Vec<u64>,
    size_lo: usize,
    size_hi: usize,
    checks: Vec<Check>,
    best: Vec<Option<(usize, u64, u64)>>,
    explored: u64,
}

impl Oracle {
    fn new(n: GroundSize, kf: u32, kg: u32, min_common: Option<u32>, lo: usize, hi: usize, checks: Vec<Check>) -> Result<Self> {
        let uf = k_subsets(n, kf);
        let ug = k_subsets(n, kg);
        if uf.len() > LEMMA_ENUM_BITS {
            return Err(Error::CapExceeded(format!(
                "F ranges over 2^{} subfamilies, above 2^{LEMMA_ENUM_BITS}; shrink n",
                uf.len()
            )));
        }
        if ug.len() > 64 {
            return Err(Error::CapExceeded(format!("G ranges over {} sets, above 64; shrink n", ug.len())));
        }
        let meets = uf
            .iter()
            .map(|f| ug.iter().enumerate().filter(|(_, g)| f.intersects(**g)).fold(0u64, |a, (j, _)| a | 1 << j))
            .collect();
        let compat = uf
            .iter()
            .map(|a| {
                uf.iter()
                    .enumerate()
                    .filter(|(_, b)| min_common.is_none_or(|t| (*a & **b).len() >= t))
                    .fold(0u64, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        let same = uf
            .iter()
            .map(|f| ug.iter().position(|g| g == f).map_or(0, |j| 1u64 << j))
            .collect();
        let nchecks = checks.len();
        Ok(Oracle {
            n,
            uf,
            ug,
            meets,
            compat,
            same,
            size_lo: lo,
            size_hi: hi,
            checks,
            best: vec![None; nchecks],
            explored: 0,
        })
    }

    fn score(&mut self, fsel: u64, fsize: usize, gmax: u64, fin_g: u64) {
        self.explored += 1;
        for (ci, c) in self.checks.iter().enumerate() {
            let common = gmax & fin_g;
            let keep = c.common_cap.map_or(common.count_ones() as usize, |cap| cap.min(common.count_ones() as usize));
            let gsize = (gmax & !fin_g).count_ones() as usize + keep;
            if gsize < c.g_min {
                continue;
            }
            let total = fsize + gsize;
            let better = self.best[ci].is_none_or(|(b, _, _)| total > b);
            if better {
                // materialize G: everything outside F plus the first `keep` common members
                let mut g = gmax & !fin_g;
                let mut rest = common;
                for _ in 0..keep {
                    let low = rest & rest.wrapping_neg();
                    g |= low;
                    rest &= !low;
                }
                self.best[ci] = Some((total, fsel, g));
            }
        }
    }

    fn dfs(&mut self, i: usize, fsel: u64, fsize: usize, gmax: u64, fin_g: u64, allowed: u64) {
        if fsize >= self.size_lo && fsize >= 1 {
            self.score(fsel, fsize, gmax, fin_g);
        }
        if fsize == self.size_hi {
            return;
        }
        for j in i..self.uf.len() {
            if allowed >> j & 1 == 0 {
                continue;
            }
            self.dfs(
                j + 1,
                fsel | 1 << j,
                fsize + 1,
                gmax & self.meets[j],
                fin_g | self.same[j],
                allowed & self.compat[j],
            );
        }
    }

    fn run(mut self, lemma: LemmaId) -> LemmaReport {
        let all = if self.uf.len() == 64 { u64::MAX } else { (1u64 << self.uf.len()) - 1 };
        let full_g = if self.ug.len() == 64 { u64::MAX } else { (1u64 << self.ug.len()) - 1 };
        self.dfs(0, 0, 0, full_g, 0, all);
        let fam = |sel: u64, univ: &[SetMask]| {
            SetFamily::from_masks(self.n, univ.iter().enumerate().filter(|(j, _)| sel >> j & 1 == 1).map(|(_, m)| *m))
        };
        let mut checks = Vec::new();
        let mut counterexample = None;
        for (c, best) in self.checks.iter().zip(&self.best) {
            let witness = best.map(|(_, f, g)| (fam(f, &self.uf), fam(g, &self.ug)));
            let optimum = best.map(|b| b.0);
            let pass = optimum.is_none_or(|o| if c.strict { (o as i128) < c.bound } else { (o as i128) <= c.bound });
            if !pass && counterexample.is_none() {
                counterexample = witness.clone();
            }
            checks.push(CheckResult { name: c.name.to_string(), bound: c.bound, strict: c.strict, optimum, witness, pass });
        }
        LemmaReport {
            lemma,
            pass: checks.iter().all(|c| c.pass),
            checks,
            explored: self.explored,
            counterexample,
        }
    }
}

/// The lemma's right-hand side.
pub fn lemma_bound(lemma: &LemmaId) -> Option<i128> {
    let (n, k, t) = (lemma.n as i64, lemma.k as i64, lemma.t as i64);
    let c = |a, b| binomial::<i128>(a, b);
    match lemma.kind {
        LemmaKind::F16 => Some(c(n, k) - c(n - k - t, k) + 1),
        LemmaKind::H672 => Some(c(n, k) - c(n - k, k) + 1),
        LemmaKind::W231 => Some(c(n, k) - c(n - k, k) - c(n - k - 1, k - 1) + 2),
        LemmaKind::HK32 => Some(c(n, 2) - c(n - 2, 2) - c(n - 3, 1) + 2),
        LemmaKind::LastI => Some(c(n, 2) - c(n - 3, 2) + 1),
        LemmaKind::LastII => Some(c(n, 2) - c(n - 4, 1) + 1),
        LemmaKind::LN => None,
    }
}

/// Exhaustive optimum of `|F| + |G|` under the lemma's hypotheses.
pub fn cross_intersecting_max(lemma: &LemmaId) -> Result<LemmaReport> {
    lemma.check_window()?;
    let n = GroundSize::new(lemma.n)?;
    let bound = lemma_bound(lemma).ok_or_else(|| param("LN has no optimum; use verify_lemma"))?;
    let (k, nn) = (lemma.k, lemma.n);
    let main = |g_min, common_cap| Check { name: "bound", bound, strict: false, g_min, common_cap };
    let strict = |g_min, cap| Check { name: "strict", bound, strict: true, g_min, common_cap: Some(cap) };
    let usz = |k: usize| k as u32;
    let oracle = match lemma.kind {
        LemmaKind::F16 => Oracle::new(
            n,
            usz(k + lemma.t),
            usz(k),
            Some(usz(lemma.t + 1)),
            1,
            usize::MAX,
            vec![main(0, None)],
        )?,
        LemmaKind::H672 => {
            let mut checks = vec![main(1, None)];
            if nn > 2 * k {
                checks.push(strict(1, 0));
            }
            Oracle::new(n, usz(k), usz(k), None, 1, usize::MAX, checks)?
        }
        LemmaKind::W231 => {
            let mut checks = vec![main(2, None)];
            if nn > 2 * k {
                checks.push(strict(2, 1));
            }
            Oracle::new(n, usz(k), usz(k), None, 2, usize::MAX, checks)?
        }
        LemmaKind::HK32 => Oracle::new(n, 2, 2, None, 2, usize::MAX, vec![main(2, Some(2)), strict(2, 1)])?,
        LemmaKind::LastI => Oracle::new(n, 3, 2, None, 1, 2 * nn - 5, vec![main(0, None)])?,
        LemmaKind::LastII => Oracle::new(n, 3, 2, None, 2 * nn - 4, 3 * nn - 9, vec![main(0, None)])?,
        LemmaKind::LN => unreachable!(),
    };
    Ok(oracle.run(*lemma))
}

/// Random cross-intersecting pairs, checking that the lexicographic
/// families of the same sizes are cross-intersecting as well.
pub fn verify_ln(lemma: &LemmaId, trials: u64, seed: u64) -> Result<LemmaReport> {
    lemma.check_window()?;
    let n = GroundSize::new(lemma.n)?;
    let uf = k_subsets(n, lemma.k as u32);
    let ug = k_subsets(n, lemma.l as u32);
    if uf.len() > 1 << 16 || ug.len() > 1 << 16 {
        return Err(Error::CapExceeded("LN universes above 2^16 sets".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counterexample = None;
    for _ in 0..trials {
        let p: f64 = rng.gen_range(0.02..0.6);
        let f: Vec<SetMask> = uf.iter().copied().filter(|_| rng.gen_bool(p)).collect();
        let companion: Vec<SetMask> = ug.iter().copied().filter(|g| f.iter().all(|x| x.intersects(*g))).collect();
        let q: f64 = rng.gen_range(0.3..=1.0);
        let g: Vec<SetMask> = companion.into_iter().filter(|_| rng.gen_bool(q)).collect();
        let lf = lex_family(n.get(), lemma.k as u32, f.len())?;
        let lg = lex_family(n.get(), lemma.l as u32, g.len())?;
        if !lf.is_cross_intersecting(&lg)? {
            counterexample = Some((SetFamily::from_masks(n, f), SetFamily::from_masks(n, g)));
            break;
        }
    }
    Ok(LemmaReport {
        lemma: *lemma,
        checks: vec![],
        explored: trials,
        pass: counterexample.is_none(),
        counterexample,
    })
}

/// Default number of random trials for LN.
pub const LN_TRIALS: u64 = 10_000;

pub fn verify_lemma(lemma: &LemmaId, seed: u64) -> Result<LemmaReport> {
    match lemma.kind {
        LemmaKind::LN => verify_ln(lemma, LN_TRIALS, seed),
        _ => cross_intersecting_max(lemma),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(kind: LemmaKind, n: usize, k: Option<usize>, t: Option<usize>) -> LemmaId {
        LemmaId::new(kind, n, k, t, None).unwrap()
    }

    #[test]
    fn bound_values() {
        assert_eq!(lemma_bound(&id(LemmaKind::HK32, 5, None, None)), Some(7));
        assert_eq!(lemma_bound(&id(LemmaKind::H672, 6, Some(3), None)), Some(20));
        assert_eq!(lemma_bound(&id(LemmaKind::W231, 6, Some(3), None)), Some(20));
        assert_eq!(lemma_bound(&id(LemmaKind::LastI, 6, None, None)), Some(13));
        assert_eq!(lemma_bound(&id(LemmaKind::LastII, 6, None, None)), Some(14));
    }

    #[test]
    fn windows() {
        assert!(LemmaId::new(LemmaKind::W231, 5, Some(3), None, None).is_err());
        assert!(LemmaId::new(LemmaKind::HK32, 4, None, None, None).is_err());
        assert!(LemmaId::new(LemmaKind::F16, 4, Some(2), Some(1), None).is_err());
        assert!(LemmaId::new(LemmaKind::LN, 5, Some(3), None, Some(2)).is_err());
    }

    #[test]
    fn small_cases_pass() {
        let r = cross_intersecting_max(&id(LemmaKind::F16, 4, Some(1), Some(1))).unwrap();
        assert!(r.pass);
        let r = cross_intersecting_max(&id(LemmaKind::H672, 4, Some(2), None)).unwrap();
        assert!(r.pass);
        assert_eq!(r.checks[0].optimum, Some(6));
        let r = cross_intersecting_max(&id(LemmaKind::HK32, 5, None, None)).unwrap();
        assert!(r.pass, "{:?}", r.checks);
    }

    #[test]
    fn witness_is_feasible() {
        let r = cross_intersecting_max(&id(LemmaKind::H672, 5, Some(2), None)).unwrap();
        for c in &r.checks {
            let (f, g) = c.witness.as_ref().unwrap();
            assert!(f.is_cross_intersecting(g).unwrap());
            assert_eq!(f.len() + g.len(), c.optimum.unwrap());
            assert!(!f.is_empty() && !g.is_empty());
        }
    }
}
