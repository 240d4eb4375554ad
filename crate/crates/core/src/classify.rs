//! Classification up to translation and coordinate permutation.
//!
//! Canonical form: translate so some member becomes `∅`, then assign
//! original coordinates to bit positions `0, 1, ...` one level at a time.
//! After `k` levels the members living inside the assigned coordinates
//! have final images `< 2^k`, and those images form a prefix of the sorted
//! image sequence. Appending the terminator `2^k` to that prefix gives a
//! key whose minimum every optimal completion must attain, so each level
//! keeps only the minimal-key states. Origins are limited to the members
//! with the smallest distance profile, which is itself an isometry
//! invariant, so the result is still constant on orbits.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{evaluate, BoundId, BoundValueOf};
use crate::constructions::{lex_family, Template, TemplateKind};
use crate::error::{param, Error, Result};
use crate::family::{k_subsets, permute_mask, SetFamily, SetMask};

/// Largest `n` accepted by `canonical_form`.
pub const CANONICAL_CAP: usize = 10;

/// Rough upper limit on membership probes for one `fits_template` call.
pub const FIT_WORK_CAP: u128 = 4_000_000_000;

/// Apply `perm` (1-based, `perm[i-1]` is the image of `i`) and then
/// translate by `shift`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IsometryWitness {
    pub shift: SetMask,
    pub perm: Vec<usize>,
}

impl IsometryWitness {
    pub fn identity(n: usize, shift: SetMask) -> Self {
        IsometryWitness { shift, perm: (1..=n).collect() }
    }

    pub fn apply(&self, f: &SetFamily) -> Result<SetFamily> {
        f.permute(&self.perm)?.translate(self.shift)
    }

    pub fn to_json(&self) -> Value {
        json!({ "shift": self.shift.elements().collect::<Vec<_>>(), "perm": self.perm })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ClassLabel {
    None,
    Match { template: Template, witness: IsometryWitness },
}

impl ClassLabel {
    pub fn is_none(&self) -> bool {
        matches!(self, ClassLabel::None)
    }

    pub fn template(&self) -> Option<&Template> {
        match self {
            ClassLabel::None => None,
            ClassLabel::Match { template, .. } => Some(template),
        }
    }

    pub fn kind(&self) -> Option<TemplateKind> {
        self.template().map(Template::kind)
    }

    pub fn to_json(&self) -> Value {
        match self {
            ClassLabel::None => json!({ "label": "none", "witness": Value::Null }),
            ClassLabel::Match { template, witness } => json!({
                "label": template.params_json(),
                "display": template.to_string(),
                "witness": witness.to_json(),
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    TranslateOnly,
    TranslateAndPermute,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "translate_only" | "translate-only" | "theorem" => Ok(Mode::TranslateOnly),
            "translate_and_permute" | "translate-and-permute" | "permute" => Ok(Mode::TranslateAndPermute),
            other => Err(param(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct CanonState {
    /// `(image so far, original coordinates still unassigned)` per member.
    pairs: Vec<(u64, u64)>,
    assigned: u64,
    shift: u64,
    /// `order[k]` is the original coordinate (0-based) sent to bit `k`.
    order: Vec<u8>,
}

/// Canonical representative together with the witness mapping `f` onto it.
pub fn canonical_form_with_witness(f: &SetFamily) -> Result<(SetFamily, IsometryWitness)> {
    let n = f.n();
    let nn = n.get();
    if nn > CANONICAL_CAP {
        return Err(Error::CapExceeded(format!("canonical form needs n <= {CANONICAL_CAP}, got {nn}")));
    }
    if f.is_empty() {
        return Ok((f.clone(), IsometryWitness::identity(nn, SetMask::EMPTY)));
    }
    let members: Vec<u64> = f.iter().map(|m| m.bits()).collect();

    // origins with the least sorted distance profile
    let profile = |o: u64| {
        let mut d: Vec<u32> = members.iter().map(|m| (m ^ o).count_ones()).collect();
        d.sort_unstable();
        d
    };
    let profiles: Vec<Vec<u32>> = members.iter().map(|&o| profile(o)).collect();
    let best = profiles.iter().min().unwrap();

    let mut states: BTreeSet<CanonState> = BTreeSet::new();
    let mut seen_translates = BTreeSet::new();
    for (o, p) in members.iter().zip(&profiles) {
        if p != best {
            continue;
        }
        let mut pairs: Vec<(u64, u64)> = members.iter().map(|m| (0, m ^ o)).collect();
        pairs.sort_unstable();
        if seen_translates.insert(pairs.clone()) {
            states.insert(CanonState { pairs, assigned: 0, shift: *o, order: Vec::new() });
        }
    }

    for k in 0..nn {
        let bit = 1u64 << k;
        let mut best_key: Option<Vec<u64>> = None;
        let mut next: BTreeMap<(u64, Vec<(u64, u64)>), CanonState> = BTreeMap::new();
        for st in &states {
            for c in 0..nn {
                let cb = 1u64 << c;
                if st.assigned & cb != 0 {
                    continue;
                }
                let mut pairs: Vec<(u64, u64)> = st
                    .pairs
                    .iter()
                    .map(|&(img, rest)| if rest & cb != 0 { (img | bit, rest & !cb) } else { (img, rest) })
                    .collect();
                pairs.sort_unstable();
                let mut key: Vec<u64> = pairs.iter().filter(|p| p.1 == 0).map(|p| p.0).collect();
                key.sort_unstable();
                key.push(bit << 1);
                match &best_key {
                    Some(b) if key > *b => continue,
                    Some(b) if key < *b => {
                        next.clear();
                        best_key = Some(key);
                    }
                    None => best_key = Some(key),
                    _ => {}
                }
                let assigned = st.assigned | cb;
                next.entry((assigned, pairs.clone())).or_insert_with(|| {
                    let mut order = st.order.clone();
                    order.push(c as u8);
                    CanonState { pairs, assigned, shift: st.shift, order }
                });
            }
        }
        states = next.into_values().collect();
    }

    let st = states.into_iter().next().expect("at least one state survives");
    let mut perm = vec![0usize; nn];
    for (pos, &c) in st.order.iter().enumerate() {
        perm[c as usize] = pos + 1;
    }
    let canon = SetFamily::from_masks(n, st.pairs.iter().map(|p| SetMask(p.0)));
    // canon = perm(f ^ shift) = perm(f) ^ perm(shift)
    let witness = IsometryWitness { shift: permute_mask(SetMask(st.shift), &perm), perm };
    Ok((canon, witness))
}

/// Orbit representative under translation and coordinate permutation.
pub fn canonical_form(f: &SetFamily) -> Result<SetFamily> {
    Ok(canonical_form_with_witness(f)?.0)
}

/// A center `c` with every member within distance `d`, searched among the
/// masks within distance `d` of the first member.
pub fn fits_ball(f: &SetFamily, d: u32) -> Result<Option<SetMask>> {
    let first = *f.members().first().ok_or(Error::EmptyFamily)?;
    let n = f.n();
    for r in 0..=d.min(n.get() as u32) {
        for t in k_subsets(n, r) {
            let c = first ^ t;
            if f.iter().all(|m| m.distance(c) <= d) {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

fn translate_into(f: &SetFamily, target: &SetFamily) -> Option<SetMask> {
    let first = *f.members().first()?;
    target
        .iter()
        .map(|&g| first ^ g)
        .find(|&shift| f.iter().all(|&m| target.contains(m ^ shift)))
}

/// Embeds `f` into some instance of `kind` at `(n, s)`.
///
/// Every kind except `Lex` has a parameter grid closed under coordinate
/// permutations, so both modes coincide there and the witness permutation
/// is the identity. `Lex` is matched against `L(n, s, |f|)` (`s` playing
/// the role of `k`); permute mode compares canonical forms.
pub fn fits_template(f: &SetFamily, kind: TemplateKind, s: u32, mode: Mode) -> Result<ClassLabel> {
    let n = f.n();
    if f.is_empty() {
        return Err(Error::EmptyFamily);
    }
    if kind == TemplateKind::Lex {
        let t = Template::Lex { n, k: s, m: f.len() };
        let lex = lex_family(n.get(), s, f.len())?;
        return Ok(match mode {
            Mode::TranslateOnly => match translate_into(f, &lex) {
                Some(shift) => ClassLabel::Match { template: t, witness: IsometryWitness::identity(n.get(), shift) },
                None => ClassLabel::None,
            },
            Mode::TranslateAndPermute => {
                let (cf, wf) = canonical_form_with_witness(f)?;
                let (cl, wl) = canonical_form_with_witness(&lex)?;
                if cf != cl {
                    ClassLabel::None
                } else {
                    // lex = inv_l(canon ^ shift_l) and canon = perm_f(f) ^ shift_f
                    let mut inv = vec![0usize; n.get()];
                    for (i, &p) in wl.perm.iter().enumerate() {
                        inv[p - 1] = i + 1;
                    }
                    let perm: Vec<usize> = wf.perm.iter().map(|&p| inv[p - 1]).collect();
                    let shift = permute_mask(wf.shift ^ wl.shift, &inv);
                    ClassLabel::Match { template: t, witness: IsometryWitness { shift, perm } }
                }
            }
        });
    }
    let grid = Template::grid_params(kind, n, s)?;
    if let Some(t) = grid.first() {
        let work = grid.len() as u128 * t.expected_size()? * f.len() as u128;
        if work > FIT_WORK_CAP {
            return Err(Error::CapExceeded(format!("fitting {kind} at n = {n}, s = {s} needs ~{work} probes")));
        }
    }
    for t in grid {
        if (f.len() as u128) > t.expected_size()? {
            continue;
        }
        let target = t.build()?;
        if let Some(shift) = translate_into(f, &target) {
            return Ok(ClassLabel::Match { template: t, witness: IsometryWitness::identity(n.get(), shift) });
        }
    }
    Ok(ClassLabel::None)
}

/// Second-level classes for diameter `s`, in declaration order.
pub fn second_classes(s: u32) -> Vec<TemplateKind> {
    use TemplateKind::*;
    match s {
        0 | 1 => vec![],
        2 => vec![H, V],
        3 => vec![H],
        4 => vec![H, Hstar, R, Rstar, Ustar],
        5 => vec![H, T5],
        s if s % 2 == 0 => vec![H, R],
        _ => vec![H],
    }
}

/// Kinds worth naming for a maximum family at diameter `s`.
pub fn candidate_kinds(s: u32) -> Vec<TemplateKind> {
    let mut kinds = vec![TemplateKind::K];
    kinds.extend(second_classes(s));
    if s == 3 {
        kinds.push(TemplateKind::M);
    }
    if s % 2 == 1 && s >= 3 {
        kinds.push(TemplateKind::Q);
    }
    kinds.sort();
    kinds.dedup();
    kinds
}

/// Every candidate kind `f` fits (translate-only), with the least
/// parameters for each.
pub fn matching_templates(f: &SetFamily, s: u32) -> Result<Vec<Template>> {
    let mut out = Vec::new();
    for kind in candidate_kinds(s) {
        if let Some(t) = fits_template(f, kind, s, Mode::TranslateOnly)?.template() {
            out.push(t.clone());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct LevelReport {
    pub n: usize,
    pub s: u32,
    pub size: usize,
    /// 1: inside a translated `K(n,s)`; 2: inside a listed second class;
    /// 3: outside all of them.
    pub level: u8,
    pub label: ClassLabel,
    /// The bound applying at level 3, with `s >= 3`.
    pub second_stab: Option<BoundValueOf<BigInt>>,
    pub within_second_stab: Option<bool>,
}

impl LevelReport {
    pub fn to_json(&self) -> Value {
        let mut v = self.label.to_json();
        v["level"] = json!(self.level);
        v["n"] = json!(self.n);
        v["s"] = json!(self.s);
        v["size"] = json!(self.size);
        if let Some(b) = &self.second_stab {
            v["second_stab"] = json!(b.value.to_string());
            v["within_second_stab"] = json!(self.within_second_stab);
        }
        v
    }
}

pub fn classify_extremal(f: &SetFamily, s: u32) -> Result<LevelReport> {
    classify_extremal_in(f, s, Mode::TranslateOnly)
}

/// [`classify_extremal`] with an explicit fitting mode.
pub fn classify_extremal_in(f: &SetFamily, s: u32, mode: Mode) -> Result<LevelReport> {
    let diameter = f.diameter();
    if diameter > s {
        return Err(Error::DiameterTooLarge { diameter, s });
    }
    let n = f.n().get();
    let report = |level, label| LevelReport {
        n,
        s,
        size: f.len(),
        level,
        label,
        second_stab: None,
        within_second_stab: None,
    };
    let k = fits_template(f, TemplateKind::K, s, mode)?;
    if !k.is_none() {
        return Ok(report(1, k));
    }
    for kind in second_classes(s) {
        let l = fits_template(f, kind, s, mode)?;
        if !l.is_none() {
            return Ok(report(2, l));
        }
    }
    let mut r = report(3, ClassLabel::None);
    if s >= 3 {
        let b = evaluate::<BigInt>(BoundId::SecondStab, n as u64, s as u64);
        r.within_second_stab = Some(BigInt::from(f.len()) <= b.value);
        r.second_stab = Some(b);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::GroundSize;

    fn fam(n: usize, sets: &[&[usize]]) -> SetFamily {
        SetFamily::from_sets(n, sets).unwrap()
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(canonical_form(&fam(4, &[&[2], &[2, 3]])).unwrap(), canonical_form(&fam(4, &[&[1], &[1, 2]])).unwrap());
        let v = Template::standard(TemplateKind::V, 4, 2).unwrap().build().unwrap();
        let w = fam(4, &[&[], &[1, 2], &[1, 3], &[2, 3]]);
        assert_eq!(canonical_form(&v).unwrap(), canonical_form(&w).unwrap());
        assert!(canonical_form(&SetFamily::empty(GroundSize::new(11).unwrap())).is_err());
    }

    #[test]
    fn canonical_witness_maps_onto_form() {
        let f = fam(5, &[&[1, 4], &[2, 4, 5], &[3], &[1, 2, 3, 4]]);
        let (c, w) = canonical_form_with_witness(&f).unwrap();
        assert_eq!(w.apply(&f).unwrap(), c);
        assert!(c.contains(SetMask::EMPTY));
    }

    #[test]
    fn ball_examples() {
        assert_eq!(fits_ball(&fam(3, &[&[], &[1], &[2]]), 1).unwrap(), Some(SetMask::EMPTY));
        let h = Template::standard(TemplateKind::H, 5, 2).unwrap().build().unwrap();
        assert_eq!(fits_ball(&h, 1).unwrap(), None);
        let a = SetMask(0b1010);
        assert_eq!(fits_ball(&SetFamily::from_masks(GroundSize::new(4).unwrap(), [a]), 0).unwrap(), Some(a));
    }

    #[test]
    fn template_fit_examples() {
        let g = GroundSize::new(6).unwrap();
        let t = Template::H { n: g, s: 4, d_set: SetMask::interval(1, 3), y: 1 };
        let mut h = t.build().unwrap();
        h.remove(SetMask::interval(1, 3));
        h.remove(SetMask::EMPTY);
        let l = fits_template(&h, TemplateKind::H, 4, Mode::TranslateOnly).unwrap();
        assert_eq!(l.template(), Some(&t));

        let k = Template::standard(TemplateKind::K, 6, 4).unwrap().build().unwrap();
        assert!(fits_template(&k, TemplateKind::H, 4, Mode::TranslateOnly).unwrap().is_none());

        let rstar = Template::standard(TemplateKind::Rstar, 6, 4).unwrap().build().unwrap();
        assert!(fits_template(&rstar, TemplateKind::Hstar, 4, Mode::TranslateOnly).unwrap().is_none());
        let shifted = crate::compression::down_shift(&rstar, 3).unwrap();
        assert!(!fits_template(&shifted, TemplateKind::Hstar, 4, Mode::TranslateOnly).unwrap().is_none());
    }

    #[test]
    fn lex_permute_mode() {
        let lex = lex_family(6, 3, 7).unwrap();
        let moved = lex.permute(&[3, 1, 2, 6, 5, 4]).unwrap().translate(SetMask(0b101)).unwrap();
        assert!(fits_template(&moved, TemplateKind::Lex, 3, Mode::TranslateOnly).unwrap().is_none());
        match fits_template(&moved, TemplateKind::Lex, 3, Mode::TranslateAndPermute).unwrap() {
            ClassLabel::Match { witness, .. } => assert_eq!(witness.apply(&moved).unwrap(), lex),
            ClassLabel::None => panic!("lex family not recognized"),
        }
    }

    #[test]
    fn levels() {
        let k = Template::standard(TemplateKind::K, 7, 5).unwrap().build().unwrap();
        assert_eq!(classify_extremal(&k, 5).unwrap().level, 1);
        let t = Template::standard(TemplateKind::T5, 7, 5).unwrap().build().unwrap();
        let r = classify_extremal(&t, 5).unwrap();
        assert_eq!((r.level, r.label.kind()), (2, Some(TemplateKind::T5)));
        let m = Template::standard(TemplateKind::M, 5, 3).unwrap().build().unwrap();
        let r = classify_extremal(&m, 3).unwrap();
        assert_eq!(r.level, 3);
        assert_eq!(r.second_stab.unwrap().value, BigInt::from(8));
        assert_eq!(r.within_second_stab, Some(true));
        assert!(classify_extremal(&k, 4).is_err());
    }
}
