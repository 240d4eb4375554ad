//! The acceptance matrix, shared by the `acceptance` test target and the
//! `report --suite acceptance` command.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{bound_ladder, evaluate, BoundId};
use crate::classify::{canonical_form, fits_ball};
use crate::compression::{compress_to_complex, down_shift};
use crate::constructions::{Template, TemplateKind};
use crate::error::Result;
use crate::family::{GroundSize, SetFamily, SetMask};
use crate::search::{
    enumerate_maximum_families, max_diameter_family, verify_lemma, LemmaId, LemmaKind, SearchConfig,
};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: String,
    pub title: String,
    pub pass: bool,
    pub detail: String,
    pub elapsed_ms: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "criterion {:<3} {}  {} ({} ms): {}",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.title,
            self.elapsed_ms,
            self.detail
        )
    }
}

type Check = fn(u64) -> Result<(bool, String)>;

/// `(id, title, check)` for every criterion, in order.
pub const CRITERIA: [(&str, &str, Check); 11] = [
    ("1", "construction identities", construction_identities),
    ("2", "compression identities", compression_identities),
    ("3", "down-shift laws", down_shift_laws),
    ("4", "level-1 exhaustive", level_one),
    ("5a", "level-2 exhaustive, classes as listed", level_two),
    ("5b", "level-2 (6,4): five distinct canonical forms", level_two_five_forms),
    ("6", "level-3 searches", level_three),
    ("7", "lemma oracles", lemma_oracles),
    ("8a", "bound ladder and evaluated spot values", bound_ladder_check),
    ("8b", "spot values 92/72/67 at (10,5) as stated", literal_spot_values),
    ("9", "classification soundness", classification_soundness),
];

pub fn run_criterion(index: usize, seed: u64) -> CriterionResult {
    let (id, title, check) = CRITERIA[index];
    let start = Instant::now();
    let (pass, detail) = match check(seed) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult { id: id.into(), title: title.into(), pass, detail, elapsed_ms: start.elapsed().as_millis() }
}

pub fn run_acceptance(seed: u64) -> Vec<CriterionResult> {
    (0..CRITERIA.len()).map(|i| run_criterion(i, seed)).collect()
}

fn bound(id: BoundId, n: usize, p: u32) -> BigInt {
    evaluate::<BigInt>(id, n as u64, p as u64).value
}

fn g(n: usize) -> GroundSize {
    GroundSize::new(n).expect("small ground size")
}

fn canon_of(kind: TemplateKind, n: usize, s: u32) -> Result<SetFamily> {
    canonical_form(&Template::standard(kind, n, s)?.build()?)
}

/// Builds, sizes and diameters of every construction inside its window.
pub fn construction_identities(_seed: u64) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let mut checked = 0;
    let mut check = |t: Template, want: BigInt, diam: Option<u32>| -> Result<()> {
        checked += 1;
        let fam = t.build()?;
        let size = BigInt::from(fam.len());
        let expected = BigInt::from(t.expected_size()?);
        if size != expected || size != want || diam.is_some_and(|s| fam.diameter() != s) {
            failures.push(format!("{t}: |build| {size}, expected {expected}, bound {want}, diameter {}", fam.diameter()));
        }
        Ok(())
    };
    for n in 4..=12usize {
        for s in 2..=(n as u32 - 2) {
            check(Template::standard(TemplateKind::K, n, s)?, bound(BoundId::Kleitman, n, s), Some(s))?;
            if BoundId::FranklDiam.in_window(n as u64, s as u64) {
                let fd = bound(BoundId::FranklDiam, n, s);
                check(Template::standard(TemplateKind::H, n, s)?, fd.clone(), Some(s))?;
                if s % 2 == 0 && s >= 4 {
                    check(Template::standard(TemplateKind::R, n, s)?, fd.clone(), Some(s))?;
                }
                if s == 4 {
                    for kind in [TemplateKind::Hstar, TemplateKind::Rstar, TemplateKind::Ustar] {
                        check(Template::standard(kind, n, s)?, fd.clone(), Some(s))?;
                    }
                }
                if s == 5 {
                    check(Template::standard(TemplateKind::T5, n, s)?, fd.clone(), Some(s))?;
                }
                if s == 2 {
                    check(Template::standard(TemplateKind::V, n, s)?, fd.clone(), Some(s))?;
                }
            }
            if BoundId::SecondStab.in_window(n as u64, s as u64) {
                let ss = evaluate::<BigInt>(BoundId::SecondStab, n as u64, s as u64);
                if s == 3 {
                    check(Template::standard(TemplateKind::M, n, s)?, ss.value.clone(), Some(3))?;
                } else if s % 2 == 1 {
                    check(Template::standard(TemplateKind::Q, n, s)?, ss.parts[1].clone(), Some(s))?;
                }
            }
        }
        for k in 2..=(n as u32) {
            if BoundId::Hm.in_window(n as u64, k as u64) {
                check(Template::standard(TemplateKind::HM, n, k)?, bound(BoundId::Hm, n, k), None)?;
            }
        }
    }
    let pass = failures.is_empty();
    let detail = if pass {
        format!("{checked} instances on n <= 12 match closed form, bound and diameter")
    } else {
        failures.join("; ")
    };
    Ok((pass, detail))
}

/// `S_y(R) = H`, `S_y(R*) = S_y(U*) = H*`, `S_c(V) = H(n,2)`.
pub fn compression_identities(_seed: u64) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let mut checked = 0;
    for n in 5..=10usize {
        let gn = g(n);
        for d in 2..=((n as u32 - 2) / 2) {
            let r_set = SetMask::interval(1, d as usize + 2);
            for y in r_set.elements() {
                checked += 1;
                let r = Template::R { n: gn, d, r_set, y }.build()?;
                let h = Template::H { n: gn, s: 2 * d, d_set: r_set.without(y), y: 1 }.build()?;
                if down_shift(&r, y)? != h {
                    failures.push(format!("S_{y}(R(n={n},2d={}))", 2 * d));
                }
            }
        }
        let pair = [1, 2];
        let hstar = Template::Hstar { n: gn, pair }.build()?;
        for y in 3..=n {
            checked += 2;
            if down_shift(&Template::Rstar { n: gn, pair, y }.build()?, y)? != hstar {
                failures.push(format!("S_{y}(R*(n={n}))"));
            }
            if down_shift(&Template::Ustar { n: gn, pair, y }.build()?, y)? != hstar {
                failures.push(format!("S_{y}(U*(n={n}))"));
            }
        }
        checked += 1;
        let v = Template::V { n: gn, points: [1, 2, 3] }.build()?;
        let h2 = Template::H { n: gn, s: 2, d_set: SetMask::interval(1, 2), y: 1 }.build()?;
        if down_shift(&v, 3)? != h2 {
            failures.push(format!("S_3(V(n={n}))"));
        }
    }
    let pass = failures.is_empty();
    Ok((pass, if pass { format!("{checked} identities hold for n in 5..=10") } else { failures.join("; ") }))
}

/// Random family with `n` in `lo..=hi` and at most `max_size` members.
pub fn random_family(rng: &mut ChaCha8Rng, lo: usize, hi: usize, max_size: usize) -> SetFamily {
    let n = rng.gen_range(lo..=hi);
    let cap = max_size.min(1 << n);
    let size = rng.gen_range(1..=cap);
    let mut members = BTreeSet::new();
    while members.len() < size {
        members.insert(SetMask(rng.gen_range(0..1u64 << n)));
    }
    SetFamily::from_masks(g(n), members)
}

/// Size, diameter and complex laws on random families.
pub fn down_shift_laws(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..10_000 {
        let f = random_family(&mut rng, 1, 10, 64);
        let j = rng.gen_range(1..=f.n().get());
        let shifted = down_shift(&f, j)?;
        if shifted.len() != f.len() || shifted.diameter() > f.diameter() {
            return Ok((false, format!("trial {trial}: S_{j} broke size or diameter on {f}")));
        }
        let (c, trace) = compress_to_complex(&f);
        if !c.is_complex() || !trace.fixpoint || c.len() != f.len() || c.diameter() > f.diameter() {
            return Ok((false, format!("trial {trial}: compression failed on {f}")));
        }
        if c.max_union() > c.diameter() {
            return Ok((false, format!("trial {trial}: complex {c} has a union above its diameter")));
        }
        let moved: usize = trace.steps.iter().map(|s| s.1).sum();
        let weight = |x: &SetFamily| x.iter().map(|m| m.len() as usize).sum::<usize>();
        if weight(&f) - weight(&c) != moved {
            return Ok((false, format!("trial {trial}: trace does not account for the weight drop")));
        }
    }
    Ok((true, "10000 random families (n <= 10, |F| <= 64)".into()))
}

pub fn level_one(_seed: u64) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let mut cells = 0;
    for n in 4..=7usize {
        for s in 2..=(n as u32 - 2) {
            cells += 1;
            let e = enumerate_maximum_families(&SearchConfig::new(n, s, 1)?)?;
            let o = &e.outcome;
            let want = bound(BoundId::Kleitman, n, s);
            let k = canon_of(TemplateKind::K, n, s)?;
            if !o.exhausted || BigInt::from(o.max_size) != want || o.witnesses != vec![k] {
                failures.push(format!("({n},{s}): max {} vs {want}, {} forms", o.max_size, o.witnesses.len()));
            }
        }
    }
    let pass = failures.is_empty();
    Ok((pass, if pass { format!("{cells} cells, max = KLEITMAN, unique form = K") } else { failures.join("; ") }))
}

fn listed_level_two(s: u32) -> Vec<TemplateKind> {
    match s {
        2 => vec![TemplateKind::H, TemplateKind::V],
        3 => vec![TemplateKind::H],
        4 => vec![TemplateKind::H, TemplateKind::R, TemplateKind::Hstar, TemplateKind::Rstar, TemplateKind::Ustar],
        5 => vec![TemplateKind::H, TemplateKind::T5],
        _ => vec![TemplateKind::H],
    }
}

pub fn level_two(_seed: u64) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (n, s) in [(6usize, 2u32), (6, 3), (6, 4), (7, 3), (7, 5)] {
        let e = enumerate_maximum_families(&SearchConfig::new(n, s, 2)?)?;
        let o = &e.outcome;
        let want = bound(BoundId::FranklDiam, n, s);
        let listed: BTreeSet<SetFamily> =
            listed_level_two(s).into_iter().map(|k| canon_of(k, n, s)).collect::<Result<_>>()?;
        let found: BTreeSet<SetFamily> = o.witnesses.iter().cloned().collect();
        if !o.exhausted || BigInt::from(o.max_size) != want || found != listed {
            failures.push(format!(
                "({n},{s}): max {} vs {want}, {} forms vs {} listed",
                o.max_size,
                found.len(),
                listed.len()
            ));
        }
        notes.push(format!("({n},{s}) max {} in {} forms", o.max_size, found.len()));
    }
    let pass = failures.is_empty();
    Ok((pass, if pass { notes.join(", ") } else { failures.join("; ") }))
}

pub fn level_two_five_forms(_seed: u64) -> Result<(bool, String)> {
    let e = enumerate_maximum_families(&SearchConfig::new(6, 4, 2)?)?;
    let forms = e.outcome.witnesses.len();
    let same = canon_of(TemplateKind::Rstar, 6, 4)? == canon_of(TemplateKind::Ustar, 6, 4)?;
    Ok((
        forms == 5,
        format!("found {forms} canonical forms; R*(6,4) and U*(6,4) share a canonical form: {same}"),
    ))
}

pub fn level_three(_seed: u64) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for n in [5usize, 6] {
        let e = enumerate_maximum_families(&SearchConfig::new(n, 3, 3)?)?;
        let o = &e.outcome;
        let m = canonical_form(&Template::M { n: g(n), j: 1, y: 2, x0: 3, x1: 4 }.build()?)?;
        if !o.exhausted || o.max_size != 8 || !o.witnesses.contains(&m) {
            failures.push(format!("({n},3): max {}, M among witnesses: {}", o.max_size, o.witnesses.contains(&m)));
        }
        notes.push(format!("({n},3) max {} in {} forms", o.max_size, o.witnesses.len()));
    }
    let o = max_diameter_family(&SearchConfig::new(6, 4, 3)?)?;
    let b = bound(BoundId::SecondStab, 6, 4);
    if !o.exhausted || BigInt::from(o.max_size) > b {
        failures.push(format!("(6,4): max {} vs SECOND_STAB {b}", o.max_size));
    }
    notes.push(format!("(6,4) max {} <= {b}", o.max_size));
    let pass = failures.is_empty();
    Ok((pass, if pass { notes.join(", ") } else { failures.join("; ") }))
}

pub fn lemma_oracles(seed: u64) -> Result<(bool, String)> {
    use LemmaKind::*;
    let cases = [
        LemmaId::new(HK32, 5, None, None, None)?,
        LemmaId::new(HK32, 6, None, None, None)?,
        LemmaId::new(W231, 6, Some(3), None, None)?,
        LemmaId::new(H672, 6, Some(3), None, None)?,
        LemmaId::new(H672, 4, Some(2), None, None)?,
        LemmaId::new(LastI, 6, None, None, None)?,
        LemmaId::new(LastII, 6, None, None, None)?,
        LemmaId::new(F16, 4, Some(1), Some(1), None)?,
        LemmaId::new(F16, 5, Some(2), Some(0), None)?,
        LemmaId::new(F16, 6, Some(2), Some(1), None)?,
        LemmaId::new(LN, 6, Some(3), None, Some(2))?,
    ];
    let mut failures = Vec::new();
    for id in cases {
        let r = verify_lemma(&id, seed)?;
        if !r.pass {
            failures.push(format!("{id}: {:?}", r.counterexample));
        }
    }
    let pass = failures.is_empty();
    Ok((pass, if pass { format!("{} lemma instances PASS", cases.len()) } else { failures.join("; ") }))
}

pub fn bound_ladder_check(_seed: u64) -> Result<(bool, String)> {
    let mut failures = Vec::new();
    for n in 5..=20u64 {
        for s in 3..=(n - 2) {
            let l = bound_ladder::<BigInt>(n, s)?;
            if !l.strictly_decreasing || l.rungs.len() != 3 {
                failures.push(format!("ladder ({n},{s}) not strictly decreasing"));
            }
        }
    }
    let spot = |n, s| [BoundId::Kleitman, BoundId::FranklDiam, BoundId::SecondStab].map(|id| bound(id, n, s));
    let want = |v: [i64; 3]| v.map(BigInt::from);
    if spot(10, 4) != want([56, 36, 31]) {
        failures.push(format!("(10,4) gives {:?}", spot(10, 4)));
    }
    if spot(10, 5) != want([92, 78, 74]) {
        failures.push(format!("(10,5) gives {:?}", spot(10, 5)));
    }
    let pass = failures.is_empty();
    Ok((pass, if pass { "strict on 3 <= s <= n-2 <= 18; (10,4) = 56/36/31, (10,5) = 92/78/74".into() } else { failures.join("; ") }))
}

pub fn literal_spot_values(_seed: u64) -> Result<(bool, String)> {
    let got = [BoundId::Kleitman, BoundId::FranklDiam, BoundId::SecondStab].map(|id| bound(id, 10, 5));
    let want = [92, 72, 67].map(BigInt::from);
    let show = |v: &[BigInt; 3]| format!("{}/{}/{}", v[0], v[1], v[2]);
    Ok((got == want, format!("evaluated {}, stated {}", show(&got), show(&want))))
}

pub fn classification_soundness(seed: u64) -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
    for trial in 0..1000 {
        let f = random_family(&mut rng, 1, 8, 40);
        let n = f.n().get();
        let shift = SetMask(rng.gen_range(0..1u64 << n));
        let mut perm: Vec<usize> = (1..=n).collect();
        perm.shuffle(&mut rng);
        let image = f.permute(&perm)?.translate(shift)?;
        if canonical_form(&f)? != canonical_form(&image)? {
            return Ok((false, format!("trial {trial}: canonical form differs on {f} under {perm:?} + {shift}")));
        }
    }
    for trial in 0..1000 {
        let f = random_family(&mut rng, 1, 6, 24);
        let n = f.n().get();
        let d = rng.gen_range(0..=n as u32);
        let brute = (0..1u64 << n).map(SetMask).any(|c| f.iter().all(|m| m.distance(c) <= d));
        let got = fits_ball(&f, d)?;
        let valid = got.is_none_or(|c| f.iter().all(|m| m.distance(c) <= d));
        if brute != got.is_some() || !valid {
            return Ok((false, format!("trial {trial}: fits_ball disagrees on {f} with d = {d}")));
        }
    }
    Ok((true, "1000 orbit triples (n <= 8), 1000 ball checks (n <= 6)".into()))
}

/// Total wall time of a suite run.
pub fn total_elapsed(results: &[CriterionResult]) -> Duration {
    Duration::from_millis(results.iter().map(|r| r.elapsed_ms as u64).sum())
}
