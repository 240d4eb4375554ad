//! Builders for the named extremal families.
//!
//! Every template carries its distinguished points explicitly (the `D` of
//! `H`, the pair of `H*`, the triple of `T(n,5)`, ...). With the defaults
//! these are exactly the textbook definitions; letting them vary makes the
//! parameter grid of a kind closed under coordinate permutations, which
//! is what classification relies on.
//!
//! `T*(n,5)`, which appears only in passing in the literature, is treated
//! as `T(n,5)` here.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{ball_size, binomial};
use crate::error::{param, Error, Result};
use crate::family::{k_subsets, GroundSize, SetFamily, SetMask};

/// Largest family the builders will materialize.
pub const BUILD_CAP: u64 = 1 << 22;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TemplateKind {
    K,
    H,
    Hstar,
    T5,
    T3,
    HM,
    R,
    Rstar,
    Ustar,
    V,
    Q,
    M,
    Lex,
}

impl TemplateKind {
    pub const ALL: [TemplateKind; 13] = [
        TemplateKind::K,
        TemplateKind::H,
        TemplateKind::Hstar,
        TemplateKind::T5,
        TemplateKind::T3,
        TemplateKind::HM,
        TemplateKind::R,
        TemplateKind::Rstar,
        TemplateKind::Ustar,
        TemplateKind::V,
        TemplateKind::Q,
        TemplateKind::M,
        TemplateKind::Lex,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TemplateKind::K => "K",
            TemplateKind::H => "H",
            TemplateKind::Hstar => "Hstar",
            TemplateKind::T5 => "T5",
            TemplateKind::T3 => "T3",
            TemplateKind::HM => "HM",
            TemplateKind::R => "R",
            TemplateKind::Rstar => "Rstar",
            TemplateKind::Ustar => "Ustar",
            TemplateKind::V => "V",
            TemplateKind::Q => "Q",
            TemplateKind::M => "M",
            TemplateKind::Lex => "Lex",
        }
    }

    /// Diameter at which the kind is a fixed construction, if it is tied
    /// to one value of `s`.
    pub fn fixed_s(self) -> Option<u32> {
        match self {
            TemplateKind::Hstar | TemplateKind::Rstar | TemplateKind::Ustar => Some(4),
            TemplateKind::T5 => Some(5),
            TemplateKind::V => Some(2),
            TemplateKind::M => Some(3),
            _ => None,
        }
    }
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TemplateKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let k = match s.trim() {
            "K" | "k" => TemplateKind::K,
            "H" | "h" => TemplateKind::H,
            "Hstar" | "H*" | "hstar" => TemplateKind::Hstar,
            "T5" | "T" | "t5" => TemplateKind::T5,
            "T3" | "t3" => TemplateKind::T3,
            "HM" | "hm" => TemplateKind::HM,
            "R" | "r" => TemplateKind::R,
            "Rstar" | "R*" | "rstar" => TemplateKind::Rstar,
            "Ustar" | "U*" | "ustar" => TemplateKind::Ustar,
            "V" | "v" => TemplateKind::V,
            "Q" | "q" => TemplateKind::Q,
            "M" | "m" => TemplateKind::M,
            "Lex" | "L" | "lex" => TemplateKind::Lex,
            other => return Err(param(format!("unknown template kind {other:?}"))),
        };
        Ok(k)
    }
}

/// A fully parametrized construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Template {
    /// Ball of radius `⌊s/2⌋`, plus the `(d+1)`-sets through `y` when `s` is odd.
    K { n: GroundSize, s: u32, y: usize },
    /// `d_set` has `d + 1` elements; `y ∉ d_set` is used only for odd `s`.
    H { n: GroundSize, s: u32, d_set: SetMask, y: usize },
    Hstar { n: GroundSize, pair: [usize; 2] },
    T5 { n: GroundSize, triple: [usize; 3] },
    T3 { n: GroundSize, triple: [usize; 3] },
    /// `{F ∈ C([n],k): center ∈ F, F ∩ block ≠ ∅} ∪ {block}`.
    HM { n: GroundSize, k: u32, center: usize, block: SetMask },
    /// `r_set` has `d + 2` elements and contains `y`. The family itself
    /// does not depend on which `y ∈ r_set` is chosen; `y` matters for the
    /// down-shift identity `S_y(R) = H(D = R \ {y})`.
    R { n: GroundSize, d: u32, r_set: SetMask, y: usize },
    Rstar { n: GroundSize, pair: [usize; 2], y: usize },
    Ustar { n: GroundSize, pair: [usize; 2], y: usize },
    V { n: GroundSize, points: [usize; 3] },
    /// `d_set` has `d + 2` elements, `j ∈ d_set`, `y ∉ d_set`.
    Q { n: GroundSize, d: u32, j: usize, y: usize, d_set: SetMask },
    M { n: GroundSize, j: usize, y: usize, x0: usize, x1: usize },
    /// First `m` sets of `C([n],k)` in lexicographic order.
    Lex { n: GroundSize, k: u32, m: usize },
}

/// Loose, optional parameters as they arrive from the command line.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateArgs {
    pub s: Option<u32>,
    pub k: Option<u32>,
    pub m: Option<usize>,
    /// `D` for H and Q, the `R` set for R, the block of HM.
    pub set: Option<Vec<usize>>,
    pub y: Option<usize>,
    /// Pair for H*/R*/U*, triple for T5/T3/V, `j,y,x0,x1` for M, `j` for Q,
    /// center for HM.
    pub points: Option<Vec<usize>>,
}

fn interval_mask(a: usize, b: usize) -> SetMask {
    SetMask::interval(a, b)
}

impl Template {
    /// Builds a template from loose arguments, filling in the default
    /// distinguished points.
    pub fn from_args(kind: TemplateKind, n: GroundSize, a: &TemplateArgs) -> Result<Template> {
        let need_s = || a.s.ok_or_else(|| param(format!("{kind} needs s")));
        let set = |default: SetMask| -> Result<SetMask> {
            match &a.set {
                Some(v) => SetMask::from_elements(n, v.iter().copied()),
                None => Ok(default),
            }
        };
        let pts = |default: &[usize]| -> Vec<usize> { a.points.clone().unwrap_or_else(|| default.to_vec()) };
        let arr2 = |v: Vec<usize>| -> Result<[usize; 2]> {
            v.try_into().map_err(|_| param(format!("{kind} needs exactly two points")))
        };
        let arr3 = |v: Vec<usize>| -> Result<[usize; 3]> {
            v.try_into().map_err(|_| param(format!("{kind} needs exactly three points")))
        };
        let t = match kind {
            TemplateKind::K => Template::K { n, s: need_s()?, y: a.y.unwrap_or(1) },
            TemplateKind::H => {
                let s = need_s()?;
                let d = (s / 2) as usize;
                Template::H { n, s, d_set: set(interval_mask(1, d + 1))?, y: a.y.unwrap_or(d + 2) }
            }
            TemplateKind::Hstar => Template::Hstar { n, pair: arr2(pts(&[1, 2]))? },
            TemplateKind::T5 => Template::T5 { n, triple: arr3(pts(&[1, 2, 3]))? },
            TemplateKind::T3 => Template::T3 { n, triple: arr3(pts(&[1, 2, 3]))? },
            TemplateKind::HM => {
                let k = a.k.ok_or_else(|| param("HM needs k"))?;
                let center = pts(&[1]).first().copied().unwrap_or(1);
                Template::HM { n, k, center, block: set(interval_mask(2, k as usize + 1))? }
            }
            TemplateKind::R => {
                let s = need_s()?;
                if s % 2 == 1 {
                    return Err(param("R(n,s) needs even s"));
                }
                let d = s / 2;
                Template::R { n, d, r_set: set(interval_mask(1, d as usize + 2))?, y: a.y.unwrap_or(1) }
            }
            TemplateKind::Rstar => Template::Rstar { n, pair: arr2(pts(&[1, 2]))?, y: a.y.unwrap_or(3) },
            TemplateKind::Ustar => Template::Ustar { n, pair: arr2(pts(&[1, 2]))?, y: a.y.unwrap_or(3) },
            TemplateKind::V => Template::V { n, points: arr3(pts(&[1, 2, 3]))? },
            TemplateKind::Q => {
                let s = need_s()?;
                if s % 2 == 0 {
                    return Err(param("Q(n,s) needs odd s"));
                }
                let d = s / 2;
                let j = pts(&[1]).first().copied().unwrap_or(1);
                let d_set = set(interval_mask(1, d as usize + 2))?;
                Template::Q { n, d, j, y: a.y.unwrap_or(d as usize + 3), d_set }
            }
            TemplateKind::M => {
                let p = pts(&[1, 2, 3, 4]);
                let [j, y, x0, x1]: [usize; 4] =
                    p.try_into().map_err(|_| param("M needs four points j,y,x0,x1"))?;
                Template::M { n, j, y, x0, x1 }
            }
            TemplateKind::Lex => Template::Lex {
                n,
                k: a.k.ok_or_else(|| param("Lex needs k"))?,
                m: a.m.ok_or_else(|| param("Lex needs m"))?,
            },
        };
        t.validate()?;
        Ok(t)
    }

    /// Textbook instance of `kind` at `(n, s)`; `s` doubles as `k` for the
    /// uniform kinds.
    pub fn standard(kind: TemplateKind, n: usize, s: u32) -> Result<Template> {
        let n = GroundSize::new(n)?;
        let args = match kind {
            TemplateKind::HM | TemplateKind::T3 => TemplateArgs { k: Some(s), ..Default::default() },
            TemplateKind::Lex => return Err(param("Lex has no standard instance; use lex_family")),
            _ => TemplateArgs { s: Some(s), ..Default::default() },
        };
        Template::from_args(kind, n, &args)
    }

    pub fn kind(&self) -> TemplateKind {
        match self {
            Template::K { .. } => TemplateKind::K,
            Template::H { .. } => TemplateKind::H,
            Template::Hstar { .. } => TemplateKind::Hstar,
            Template::T5 { .. } => TemplateKind::T5,
            Template::T3 { .. } => TemplateKind::T3,
            Template::HM { .. } => TemplateKind::HM,
            Template::R { .. } => TemplateKind::R,
            Template::Rstar { .. } => TemplateKind::Rstar,
            Template::Ustar { .. } => TemplateKind::Ustar,
            Template::V { .. } => TemplateKind::V,
            Template::Q { .. } => TemplateKind::Q,
            Template::M { .. } => TemplateKind::M,
            Template::Lex { .. } => TemplateKind::Lex,
        }
    }

    pub fn n(&self) -> GroundSize {
        match *self {
            Template::K { n, .. }
            | Template::H { n, .. }
            | Template::Hstar { n, .. }
            | Template::T5 { n, .. }
            | Template::T3 { n, .. }
            | Template::HM { n, .. }
            | Template::R { n, .. }
            | Template::Rstar { n, .. }
            | Template::Ustar { n, .. }
            | Template::V { n, .. }
            | Template::Q { n, .. }
            | Template::M { n, .. }
            | Template::Lex { n, .. } => n,
        }
    }

    /// Diameter the construction is extremal for, when it has one.
    pub fn s(&self) -> Option<u32> {
        match *self {
            Template::K { s, .. } | Template::H { s, .. } => Some(s),
            Template::R { d, .. } => Some(2 * d),
            Template::Q { d, .. } => Some(2 * d + 1),
            _ => self.kind().fixed_s(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        let pt = |name: &str, p: usize| -> Result<()> {
            if p == 0 || p > n.get() {
                Err(param(format!("{name} = {p} outside [1, {n}]")))
            } else {
                Ok(())
            }
        };
        let distinct = |pts: &[usize]| -> Result<()> {
            for (i, a) in pts.iter().enumerate() {
                pt("point", *a)?;
                if pts[i + 1..].contains(a) {
                    return Err(param(format!("points {pts:?} must be distinct")));
                }
            }
            Ok(())
        };
        let sized = |name: &str, m: SetMask, want: u32| -> Result<()> {
            if !m.fits(n) {
                return Err(param(format!("{name} = {m} not inside [{n}]")));
            }
            if m.len() != want {
                return Err(param(format!("{name} = {m} must have {want} elements")));
            }
            Ok(())
        };
        match *self {
            Template::K { s, y, .. } => {
                if s % 2 == 1 {
                    pt("y", y)?;
                }
            }
            Template::H { s, d_set, y, .. } => {
                if s < 2 {
                    return Err(param("H(n,s) needs s >= 2"));
                }
                sized("D", d_set, s / 2 + 1)?;
                if s % 2 == 1 {
                    pt("y", y)?;
                    if d_set.contains(y) {
                        return Err(param("H(n,2d+1) needs y outside D"));
                    }
                }
            }
            Template::Hstar { pair, .. } => distinct(&pair)?,
            Template::T5 { triple, .. } | Template::T3 { triple, .. } => distinct(&triple)?,
            Template::HM { k, center, block, .. } => {
                if k == 0 {
                    return Err(param("HM needs k >= 1"));
                }
                pt("center", center)?;
                sized("block", block, k)?;
                if block.contains(center) {
                    return Err(param("HM block must avoid the center"));
                }
            }
            Template::R { d, r_set, y, .. } => {
                if d < 2 {
                    return Err(param("R(n,2d) needs d >= 2"));
                }
                sized("R", r_set, d + 2)?;
                pt("y", y)?;
                if !r_set.contains(y) {
                    return Err(param("R(n,2d) needs y in R"));
                }
            }
            Template::Rstar { pair, y, .. } | Template::Ustar { pair, y, .. } => {
                distinct(&[pair[0], pair[1], y])?
            }
            Template::V { points, .. } => distinct(&points)?,
            Template::Q { d, j, y, d_set, .. } => {
                if d < 1 {
                    return Err(param("Q(n,2d+1) needs d >= 1"));
                }
                distinct(&[j, y])?;
                sized("D", d_set, d + 2)?;
                if !d_set.contains(j) || d_set.contains(y) {
                    return Err(param("Q needs j in D and y outside D"));
                }
            }
            Template::M { j, y, x0, x1, .. } => distinct(&[j, y, x0, x1])?,
            Template::Lex { k, m, .. } => {
                if k as usize > n.get() {
                    return Err(param(format!("Lex needs k <= n, got k = {k}")));
                }
                let total = binomial::<i128>(n.get() as i64, k as i64);
                if m as i128 > total {
                    return Err(param(format!("Lex needs m <= C({n},{k}) = {total}, got {m}")));
                }
            }
        }
        Ok(())
    }

    /// Largest member size, used to bound enumeration in `build`.
    fn max_member_size(&self) -> u32 {
        match *self {
            Template::K { s, .. } => s / 2 + s % 2,
            Template::H { s, .. } => s / 2 + 1,
            Template::Hstar { .. } | Template::T5 { .. } | Template::T3 { .. } => 3,
            Template::HM { k, .. } => k,
            Template::R { d, .. } => d + 2,
            Template::Rstar { .. } => 3,
            Template::Ustar { .. } => 4,
            Template::V { .. } | Template::M { .. } => 3,
            Template::Q { d, .. } => d + 2,
            Template::Lex { k, .. } => k,
        }
    }

    /// Membership test defining the family.
    pub fn contains(&self, f: SetMask) -> bool {
        let size = f.len();
        match *self {
            Template::K { s, y, .. } => {
                let d = s / 2;
                size <= d || (s % 2 == 1 && size == d + 1 && f.contains(y))
            }
            Template::H { s, d_set, y, .. } => {
                let d = s / 2;
                if s % 2 == 0 {
                    size < d || f == d_set || (size == d && f.intersects(d_set))
                } else {
                    size <= d || f == d_set || (size == d + 1 && f.contains(y) && f.intersects(d_set))
                }
            }
            Template::Hstar { pair, .. } => {
                let p = pair_mask(pair);
                size <= 1 || (size == 2 && f.intersects(p)) || (size == 3 && p.is_subset(f))
            }
            Template::T5 { triple, .. } => size <= 2 || (size == 3 && (f & triple_mask(triple)).len() >= 2),
            Template::T3 { triple, .. } => size == 3 && (f & triple_mask(triple)).len() >= 2,
            Template::HM { k, center, block, .. } => {
                f == block || (size == k && f.contains(center) && f.intersects(block))
            }
            Template::R { d, r_set, .. } => {
                size + 2 <= d || f == r_set || ((size == d - 1 || size == d) && f.intersects(r_set))
            }
            Template::Rstar { pair, y, .. } => {
                let p = pair_mask(pair);
                let py = p.with(y);
                size <= 1
                    || (size == 2 && f.is_subset(py))
                    || (size == 3 && f.contains(y) && f.intersects(p))
                    || (size == 3 && p.is_subset(f))
            }
            Template::Ustar { pair, y, .. } => {
                let p = pair_mask(pair);
                let py = p.with(y);
                (size <= 1 && f.is_subset(py))
                    || (size == 2 && (f.contains(y) || f.intersects(p)))
                    || f == py
                    || (size == 4 && py.is_subset(f))
            }
            Template::V { points, .. } => {
                let t = triple_mask(points);
                (size == 1 && f.is_subset(t)) || f == t
            }
            Template::Q { d, y, d_set, .. } => {
                size < d
                    || f == d_set
                    || (size == d && f.intersects(d_set))
                    || (size == d + 1 && f.contains(y) && f.intersects(d_set))
            }
            Template::M { .. } => self.m_members().contains(&f),
            Template::Lex { n, k, m } => {
                size == k && lex_rank(n, f).is_some_and(|r| r < m as u128)
            }
        }
    }

    fn m_members(&self) -> [SetMask; 8] {
        let Template::M { j, y, x0, x1, .. } = *self else {
            unreachable!("m_members on a non-M template")
        };
        let s = SetMask::singleton;
        [
            SetMask::EMPTY,
            s(j),
            s(y),
            s(x0),
            s(y) | s(j),
            s(y) | s(x1),
            s(j) | s(x1),
            s(y) | s(j) | s(x0),
        ]
    }

    /// Materializes the family.
    pub fn build(&self) -> Result<SetFamily> {
        self.validate()?;
        let n = self.n();
        if let Template::Lex { k, m, .. } = *self {
            return lex_family(n.get(), k, m);
        }
        if let Template::M { .. } = self {
            return Ok(SetFamily::from_masks(n, self.m_members()));
        }
        let size = self.expected_size()?;
        if size > BUILD_CAP as u128 {
            return Err(Error::CapExceeded(format!("{self} has {size} members")));
        }
        let top = self.max_member_size().min(n.get() as u32);
        let enumerated = ball_size::<i128>(n.get() as i64, top as i64);
        if enumerated > (BUILD_CAP * 16) as i128 {
            return Err(Error::CapExceeded(format!("building {self} would scan {enumerated} sets")));
        }
        let masks = (0..=top)
            .flat_map(|k| k_subsets(n, k))
            .filter(|m| self.contains(*m));
        Ok(SetFamily::from_masks(n, masks))
    }

    /// Closed-form cardinality, computed without building the family.
    pub fn expected_size(&self) -> Result<u128> {
        self.validate()?;
        let n = self.n().get() as i64;
        let c = |a: i64, b: i64| binomial::<i128>(a, b);
        let ball = |d: i64| ball_size::<i128>(n, d);
        let v: i128 = match *self {
            Template::K { s, .. } => {
                let d = (s / 2) as i64;
                if s % 2 == 0 {
                    ball(d)
                } else {
                    ball(d) + c(n - 1, d)
                }
            }
            Template::H { s, .. } => {
                let d = (s / 2) as i64;
                if s % 2 == 0 {
                    ball(d - 1) + 1 + c(n, d) - c(n - d - 1, d)
                } else {
                    ball(d) + 1 + c(n - 1, d) - c(n - d - 2, d)
                }
            }
            Template::Hstar { .. } | Template::Rstar { .. } | Template::Ustar { .. } => 4 * n as i128 - 4,
            Template::T5 { .. } => ball(2) + 3 * (n as i128 - 3) + 1,
            Template::T3 { .. } => 3 * (n as i128 - 3) + 1,
            Template::HM { k, .. } => {
                let k = k as i64;
                c(n - 1, k - 1) - c(n - k - 1, k - 1) + 1
            }
            Template::R { d, .. } => {
                let d = d as i64;
                ball(d - 2) + 1 + c(n, d - 1) - c(n - d - 2, d - 1) + c(n, d) - c(n - d - 2, d)
            }
            Template::V { .. } => 4,
            Template::Q { d, .. } => {
                let d = d as i64;
                ball(d) + c(n - 1, d) - c(n - d - 2, d) - c(n - d - 3, d) + 1
            }
            Template::M { .. } => 8,
            Template::Lex { m, .. } => m as i128,
        };
        Ok(v.max(0) as u128)
    }

    /// Parameters as JSON, for echoing into output metadata.
    pub fn params_json(&self) -> Value {
        let elems = |m: SetMask| m.elements().collect::<Vec<_>>();
        let mut v = match *self {
            Template::K { s, y, .. } => json!({ "s": s, "y": y }),
            Template::H { s, d_set, y, .. } => {
                if s % 2 == 1 {
                    json!({ "s": s, "D": elems(d_set), "y": y })
                } else {
                    json!({ "s": s, "D": elems(d_set) })
                }
            }
            Template::Hstar { pair, .. } => json!({ "s": 4, "pair": pair }),
            Template::T5 { triple, .. } => json!({ "s": 5, "triple": triple }),
            Template::T3 { triple, .. } => json!({ "k": 3, "triple": triple }),
            Template::HM { k, center, block, .. } => json!({ "k": k, "center": center, "block": elems(block) }),
            Template::R { d, r_set, y, .. } => json!({ "s": 2 * d, "R": elems(r_set), "y": y }),
            Template::Rstar { pair, y, .. } => json!({ "s": 4, "pair": pair, "y": y }),
            Template::Ustar { pair, y, .. } => json!({ "s": 4, "pair": pair, "y": y }),
            Template::V { points, .. } => json!({ "s": 2, "points": points }),
            Template::Q { d, j, y, d_set, .. } => json!({ "s": 2 * d + 1, "j": j, "y": y, "D": elems(d_set) }),
            Template::M { j, y, x0, x1, .. } => json!({ "s": 3, "j": j, "y": y, "x0": x0, "x1": x1 }),
            Template::Lex { k, m, .. } => json!({ "k": k, "m": m }),
        };
        v["kind"] = json!(self.kind().name());
        v["n"] = json!(self.n().get());
        v
    }

    /// Every instance of `kind` at `(n, s)` over its distinguished-point
    /// parameters, deduplicated by the family they build. `s` doubles as
    /// `k` for HM and T3 (where only `k = 3` exists).
    pub fn grid(kind: TemplateKind, n: GroundSize, s: u32) -> Result<Vec<Template>> {
        let mut seen = HashSet::new();
        let mut unique = Vec::new();
        for t in Template::grid_params(kind, n, s)? {
            // distinct parameters can build the same family (M with j and
            // y swapped, R with another y); keep the first
            if seen.insert(t.build()?) {
                unique.push(t);
            }
        }
        Ok(unique)
    }

    /// Parameter grid in declaration order, without building or deduplicating.
    pub fn grid_params(kind: TemplateKind, n: GroundSize, s: u32) -> Result<Vec<Template>> {
        let nn = n.get();
        let pts = 1..=nn;
        let pairs = || -> Vec<[usize; 2]> {
            k_subsets(n, 2).into_iter().map(|m| {
                let v: Vec<usize> = m.elements().collect();
                [v[0], v[1]]
            }).collect()
        };
        let triples = || -> Vec<[usize; 3]> {
            k_subsets(n, 3).into_iter().map(|m| {
                let v: Vec<usize> = m.elements().collect();
                [v[0], v[1], v[2]]
            }).collect()
        };
        let d = s / 2;
        let mut out = Vec::new();
        match kind {
            TemplateKind::K => {
                if s % 2 == 1 {
                    out.extend(pts.map(|y| Template::K { n, s, y }));
                } else {
                    out.push(Template::K { n, s, y: 1 });
                }
            }
            TemplateKind::H => {
                if s < 2 || (d + 1) as usize > nn {
                    return Ok(out);
                }
                for d_set in k_subsets(n, d + 1) {
                    if s.is_multiple_of(2) {
                        out.push(Template::H { n, s, d_set, y: 1 });
                    } else {
                        out.extend(pts.clone().filter(|y| !d_set.contains(*y)).map(|y| Template::H { n, s, d_set, y }));
                    }
                }
            }
            TemplateKind::Hstar => out.extend(pairs().into_iter().map(|pair| Template::Hstar { n, pair })),
            TemplateKind::T5 => out.extend(triples().into_iter().map(|triple| Template::T5 { n, triple })),
            TemplateKind::T3 => out.extend(triples().into_iter().map(|triple| Template::T3 { n, triple })),
            TemplateKind::HM => {
                let k = s;
                if k == 0 || k as usize >= nn {
                    return Ok(out);
                }
                for center in pts {
                    for block in k_subsets(n, k) {
                        if !block.contains(center) {
                            out.push(Template::HM { n, k, center, block });
                        }
                    }
                }
            }
            TemplateKind::R => {
                if s % 2 == 1 || d < 2 || (d + 2) as usize > nn {
                    return Ok(out);
                }
                for r_set in k_subsets(n, d + 2) {
                    let y = r_set.elements().next().unwrap();
                    out.push(Template::R { n, d, r_set, y });
                }
            }
            TemplateKind::Rstar | TemplateKind::Ustar => {
                for pair in pairs() {
                    for y in pts.clone().filter(|y| !pair.contains(y)) {
                        out.push(if kind == TemplateKind::Rstar {
                            Template::Rstar { n, pair, y }
                        } else {
                            Template::Ustar { n, pair, y }
                        });
                    }
                }
            }
            TemplateKind::V => out.extend(triples().into_iter().map(|points| Template::V { n, points })),
            TemplateKind::Q => {
                if s.is_multiple_of(2) || d < 1 || (d + 3) as usize > nn {
                    return Ok(out);
                }
                for d_set in k_subsets(n, d + 2) {
                    for j in d_set.elements() {
                        for y in pts.clone().filter(|y| !d_set.contains(*y)) {
                            out.push(Template::Q { n, d, j, y, d_set });
                        }
                    }
                }
            }
            TemplateKind::M => {
                for j in pts.clone() {
                    for y in (j + 1)..=nn {
                        for x0 in pts.clone().filter(|x| *x != j && *x != y) {
                            for x1 in pts.clone().filter(|x| *x != j && *x != y && *x != x0) {
                                out.push(Template::M { n, j, y, x0, x1 });
                            }
                        }
                    }
                }
            }
            TemplateKind::Lex => return Err(param("Lex has no parameter grid; classify it in permute mode")),
        }
        Ok(out)
    }
}

fn pair_mask(p: [usize; 2]) -> SetMask {
    SetMask::singleton(p[0]) | SetMask::singleton(p[1])
}

fn triple_mask(t: [usize; 3]) -> SetMask {
    SetMask::singleton(t[0]) | SetMask::singleton(t[1]) | SetMask::singleton(t[2])
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        match *self {
            Template::K { s, y, .. } if s % 2 == 1 => write!(f, "K(n={n},s={s},y={y})"),
            Template::K { s, .. } => write!(f, "K(n={n},s={s})"),
            Template::H { s, d_set, y, .. } if s % 2 == 1 => write!(f, "H(n={n},s={s},D={d_set},y={y})"),
            Template::H { s, d_set, .. } => write!(f, "H(n={n},s={s},D={d_set})"),
            Template::Hstar { pair, .. } => write!(f, "H*(n={n},pair={{{},{}}})", pair[0], pair[1]),
            Template::T5 { triple: t, .. } => write!(f, "T(n={n},5,T={{{},{},{}}})", t[0], t[1], t[2]),
            Template::T3 { triple: t, .. } => write!(f, "T(n={n},3,T={{{},{},{}}})", t[0], t[1], t[2]),
            Template::HM { k, center, block, .. } => write!(f, "HM(n={n},k={k},x={center},B={block})"),
            Template::R { d, r_set, y, .. } => write!(f, "R(n={n},s={},R={r_set},y={y})", 2 * d),
            Template::Rstar { pair, y, .. } => write!(f, "R*(n={n},pair={{{},{}}},y={y})", pair[0], pair[1]),
            Template::Ustar { pair, y, .. } => write!(f, "U*(n={n},pair={{{},{}}},y={y})", pair[0], pair[1]),
            Template::V { points: p, .. } => write!(f, "V(n={n},{{{},{},{}}})", p[0], p[1], p[2]),
            Template::Q { d, j, y, d_set, .. } => write!(f, "Q(n={n},s={},j={j},y={y},D={d_set})", 2 * d + 1),
            Template::M { j, y, x0, x1, .. } => write!(f, "M(n={n},j={j},y={y},x0={x0},x1={x1})"),
            Template::Lex { k, m, .. } => write!(f, "L(n={n},k={k},m={m})"),
        }
    }
}

/// `F` precedes `G` iff `min(F \ G) < min(G \ F)`.
pub fn lex_precedes(f: SetMask, g: SetMask) -> bool {
    let only_f = f.bits() & !g.bits();
    let only_g = g.bits() & !f.bits();
    match (only_f, only_g) {
        (0, _) => false,
        (_, 0) => true,
        (a, b) => a.trailing_zeros() < b.trailing_zeros(),
    }
}

/// 0-based position of a `k`-set in the lexicographic order of `C([n],k)`.
pub fn lex_rank(n: GroundSize, f: SetMask) -> Option<u128> {
    if !f.fits(n) {
        return None;
    }
    let nn = n.get() as i64;
    let k = f.len() as i64;
    let mut rank: u128 = 0;
    let mut prev = 0i64;
    for (idx, e) in f.elements().enumerate() {
        let e = e as i64;
        let left = k - idx as i64 - 1;
        // count sets whose idx-th element is smaller than e
        for smaller in (prev + 1)..e {
            rank += binomial::<i128>(nn - smaller, left) as u128;
        }
        prev = e;
    }
    Some(rank)
}

/// `L(n,k,m)`: the first `m` `k`-sets in lexicographic order.
pub fn lex_family(n: usize, k: u32, m: usize) -> Result<SetFamily> {
    let ground = GroundSize::new(n)?;
    if k as usize > n {
        return Err(param(format!("Lex needs k <= n, got k = {k}")));
    }
    let total = binomial::<i128>(n as i64, k as i64);
    if m as i128 > total {
        return Err(param(format!("Lex needs m <= C({n},{k}) = {total}, got {m}")));
    }
    // walk k-tuples in lexicographic order directly
    let k = k as usize;
    let mut out = Vec::with_capacity(m);
    let mut idx: Vec<usize> = (1..=k).collect();
    while out.len() < m {
        out.push(idx.iter().fold(SetMask::EMPTY, |acc, &e| acc.with(e)));
        let mut pos = k;
        loop {
            if pos == 0 {
                break;
            }
            pos -= 1;
            if idx[pos] < n - (k - 1 - pos) {
                idx[pos] += 1;
                for q in pos + 1..k {
                    idx[q] = idx[q - 1] + 1;
                }
                break;
            }
            if pos == 0 {
                pos = usize::MAX;
                break;
            }
        }
        if pos == usize::MAX {
            break;
        }
    }
    Ok(SetFamily::from_masks(ground, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{evaluate, BoundId};

    fn g(n: usize) -> GroundSize {
        GroundSize::new(n).unwrap()
    }

    fn mask(n: usize, s: &[usize]) -> SetMask {
        SetMask::from_elements(g(n), s.iter().copied()).unwrap()
    }

    #[test]
    fn katona_ball_n6_s4() {
        let k = Template::standard(TemplateKind::K, 6, 4).unwrap().build().unwrap();
        assert_eq!(k.len(), 22);
        assert_eq!(k.slice(2).len(), 15);
        assert_eq!(k.max_union(), 4);
        assert_eq!(k.diameter(), 4);
    }

    #[test]
    fn h_n6_s4() {
        let t = Template::H { n: g(6), s: 4, d_set: mask(6, &[1, 2, 3]), y: 1 };
        let h = t.build().unwrap();
        assert_eq!(h.len(), 20);
        assert_eq!(h.diameter(), 4);
    }

    #[test]
    fn v_and_m_literal() {
        let v = Template::standard(TemplateKind::V, 5, 2).unwrap().build().unwrap();
        assert_eq!(v, SetFamily::from_sets(5, &[&[1], &[2], &[3], &[1, 2, 3]]).unwrap());
        let m = Template::M { n: g(5), j: 1, y: 2, x0: 3, x1: 4 }.build().unwrap();
        assert_eq!(m.len(), 8);
        assert_eq!(
            m,
            SetFamily::from_sets(5, &[&[], &[1], &[2], &[3], &[1, 2], &[2, 4], &[1, 4], &[1, 2, 3]]).unwrap()
        );
        assert_eq!(m.diameter(), 3);
    }

    #[test]
    fn expected_size_examples() {
        assert_eq!(Template::standard(TemplateKind::Hstar, 6, 4).unwrap().expected_size().unwrap(), 20);
        assert_eq!(Template::standard(TemplateKind::T5, 7, 5).unwrap().expected_size().unwrap(), 42);
        assert_eq!(Template::standard(TemplateKind::K, 7, 5).unwrap().expected_size().unwrap(), 44);
    }

    #[test]
    fn expected_size_matches_build_on_grid() {
        for n in 3..=10usize {
            for kind in TemplateKind::ALL {
                if kind == TemplateKind::Lex {
                    continue;
                }
                for s in 0..=n as u32 {
                    if let Ok(t) = Template::standard(kind, n, s) {
                        let built = t.build().unwrap();
                        assert_eq!(built.len() as u128, t.expected_size().unwrap(), "{t}");
                    }
                }
            }
        }
    }

    #[test]
    fn constructions_hit_their_bounds() {
        let v = |id, n: usize, s: u32| evaluate::<i128>(id, n as u64, s as u64).value as u128;
        for n in 6..=11usize {
            let t = |kind, s| Template::standard(kind, n, s).unwrap().expected_size().unwrap();
            assert_eq!(t(TemplateKind::Hstar, 4), v(BoundId::FranklDiam, n, 4));
            assert_eq!(t(TemplateKind::Rstar, 4), v(BoundId::FranklDiam, n, 4));
            assert_eq!(t(TemplateKind::Ustar, 4), v(BoundId::FranklDiam, n, 4));
            if n >= 7 {
                assert_eq!(t(TemplateKind::T5, 5), v(BoundId::FranklDiam, n, 5));
            }
            for s in 2..=(n as u32 - 2) {
                assert_eq!(t(TemplateKind::K, s), v(BoundId::Kleitman, n, s));
                assert_eq!(t(TemplateKind::H, s), v(BoundId::FranklDiam, n, s));
                if s % 2 == 0 && s >= 4 {
                    assert_eq!(t(TemplateKind::R, s), v(BoundId::FranklDiam, n, s));
                }
            }
        }
    }

    #[test]
    fn parameter_domain_errors() {
        let bad = Template::H { n: g(6), s: 4, d_set: mask(6, &[1, 2]), y: 1 };
        assert!(bad.build().is_err());
        let bad = Template::H { n: g(6), s: 5, d_set: mask(6, &[1, 2, 3]), y: 2 };
        assert!(bad.validate().is_err());
        let bad = Template::R { n: g(6), d: 2, r_set: mask(6, &[1, 2, 3, 4]), y: 5 };
        assert!(bad.validate().is_err());
        let bad = Template::Q { n: g(7), d: 2, j: 5, y: 6, d_set: mask(7, &[1, 2, 3, 4]) };
        assert!(bad.validate().is_err());
        assert!(Template::M { n: g(5), j: 1, y: 1, x0: 2, x1: 3 }.validate().is_err());
        // outside the theorem window is fine
        assert!(Template::standard(TemplateKind::H, 5, 4).unwrap().build().is_ok());
    }

    #[test]
    fn lex_examples() {
        assert_eq!(lex_family(4, 2, 3).unwrap(), SetFamily::from_sets(4, &[&[1, 2], &[1, 3], &[1, 4]]).unwrap());
        assert!(lex_family(5, 2, 0).unwrap().is_empty());
        assert!(lex_family(4, 2, 7).is_err());
    }

    #[test]
    fn lex_matches_comparator_sort() {
        // oracle: sort every 3-subset of [6] with the min-difference comparator
        let n = g(6);
        let mut all = k_subsets(n, 3);
        all.sort_by(|a, b| {
            if a == b {
                std::cmp::Ordering::Equal
            } else if lex_precedes(*a, *b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
        let first7 = SetFamily::from_masks(n, all[..7].iter().copied());
        assert_eq!(first7, lex_family(6, 3, 7).unwrap());
        assert_eq!(
            first7,
            SetFamily::from_sets(6, &[&[1, 2, 3], &[1, 2, 4], &[1, 2, 5], &[1, 2, 6], &[1, 3, 4], &[1, 3, 5], &[1, 3, 6]])
                .unwrap()
        );
        for (r, m) in all.iter().enumerate() {
            assert_eq!(lex_rank(n, *m), Some(r as u128));
        }
        for m in 0..=20 {
            assert_eq!(lex_family(6, 3, m).unwrap().members().len(), m);
        }
    }

    #[test]
    fn q_size_and_diameter() {
        for n in 7..=10 {
            let q = Template::standard(TemplateKind::Q, n, 5).unwrap();
            let fam = q.build().unwrap();
            assert_eq!(fam.len() as u128, q.expected_size().unwrap());
            assert_eq!(fam.diameter(), 5);
            let b = evaluate::<i128>(BoundId::SecondStab, n as u64, 5);
            assert_eq!(fam.len() as i128, b.parts[1]);
        }
    }

    #[test]
    fn hm_and_t3_are_intersecting() {
        let hm = Template::standard(TemplateKind::HM, 7, 3).unwrap().build().unwrap();
        assert!(hm.slice(3).is_t_intersecting(1));
        assert_eq!(hm.len() as i128, evaluate::<i128>(BoundId::Hm, 7, 3).value);
        let t3 = Template::standard(TemplateKind::T3, 7, 3).unwrap().build().unwrap();
        assert!(t3.is_t_intersecting(1));
        assert_eq!(t3.len(), 13);
    }

    #[test]
    fn grids_dedupe() {
        // swapping j and y in M gives the same family
        let m = Template::grid(TemplateKind::M, g(5), 3).unwrap();
        assert_eq!(m.len(), 5 * 4 / 2 * 3 * 2);
        assert_eq!(Template::grid(TemplateKind::K, g(6), 4).unwrap().len(), 1);
        assert_eq!(Template::grid(TemplateKind::K, g(6), 3).unwrap().len(), 6);
        assert_eq!(Template::grid(TemplateKind::R, g(6), 4).unwrap().len(), 15);
    }
}
