//! Exact evaluators for the intersection, union and diameter bounds.
//!
//! All arithmetic is generic over [`ExactInt`]; the crate root fixes the
//! default to `BigInt`. `i128` also works and is exact for `n` up to about
//! 120.

use std::fmt;
use std::str::FromStr;

use num_traits::{Num, Signed};
use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};

/// Signed integer type with exact arithmetic.
pub trait ExactInt: Clone + Ord + Num + Signed + From<u64> + fmt::Display + fmt::Debug {}

impl<T> ExactInt for T where T: Clone + Ord + Num + Signed + From<u64> + fmt::Display + fmt::Debug {}

/// `C(a, b)`, zero when `b < 0` or `a < b`.
pub fn binomial<T: ExactInt>(a: i64, b: i64) -> T {
    if b < 0 || a < b {
        return T::zero();
    }
    let b = b.min(a - b);
    let mut acc = T::one();
    for i in 0..b {
        // C(a, i) * (a - i) / (i + 1) = C(a, i + 1), exact at every step
        acc = acc * T::from((a - i) as u64) / T::from((i + 1) as u64);
    }
    acc
}

/// `Σ_{i=0}^{d} C(n, i)`, the size of a radius-`d` Hamming ball.
pub fn ball_size<T: ExactInt>(n: i64, d: i64) -> T {
    (0..=d).fold(T::zero(), |acc, i| acc + binomial::<T>(n, i))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BoundId {
    /// `C(n-1, k-1)` for intersecting `k`-uniform families.
    #[serde(rename = "EKR")]
    Ekr,
    /// Non-trivial intersecting families.
    #[serde(rename = "HM")]
    Hm,
    /// Intersecting families that are neither EKR nor HM.
    #[serde(rename = "HK")]
    Hk,
    #[serde(rename = "KATONA")]
    Katona,
    #[serde(rename = "FRANKL_UNION")]
    FranklUnion,
    #[serde(rename = "LI_WU")]
    LiWu,
    #[serde(rename = "KLEITMAN")]
    Kleitman,
    #[serde(rename = "FRANKL_DIAM")]
    FranklDiam,
    #[serde(rename = "GLX_A")]
    GlxA,
    #[serde(rename = "GLX_B")]
    GlxB,
    #[serde(rename = "SECOND_STAB")]
    SecondStab,
}

impl BoundId {
    pub const ALL: [BoundId; 11] = [
        BoundId::Ekr,
        BoundId::Hm,
        BoundId::Hk,
        BoundId::Katona,
        BoundId::FranklUnion,
        BoundId::LiWu,
        BoundId::Kleitman,
        BoundId::FranklDiam,
        BoundId::GlxA,
        BoundId::GlxB,
        BoundId::SecondStab,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundId::Ekr => "EKR",
            BoundId::Hm => "HM",
            BoundId::Hk => "HK",
            BoundId::Katona => "KATONA",
            BoundId::FranklUnion => "FRANKL_UNION",
            BoundId::LiWu => "LI_WU",
            BoundId::Kleitman => "KLEITMAN",
            BoundId::FranklDiam => "FRANKL_DIAM",
            BoundId::GlxA => "GLX_A",
            BoundId::GlxB => "GLX_B",
            BoundId::SecondStab => "SECOND_STAB",
        }
    }

    /// Whether the second parameter is a uniformity `k` (otherwise `s`).
    pub fn takes_k(self) -> bool {
        matches!(self, BoundId::Ekr | BoundId::Hm | BoundId::Hk)
    }

    pub fn param_name(self) -> &'static str {
        if self.takes_k() {
            "k"
        } else {
            "s"
        }
    }

    /// Parameter window in which the underlying theorem is stated.
    pub fn in_window(self, n: u64, p: u64) -> bool {
        let s_range = |lo: u64| p >= lo && p + 2 <= n;
        match self {
            BoundId::Ekr => p >= 2 && n >= 2 * p,
            BoundId::Hm => p >= 2 && n > 2 * p,
            BoundId::Hk => p >= 3 && n > 2 * p,
            BoundId::Katona | BoundId::FranklUnion | BoundId::Kleitman | BoundId::FranklDiam => s_range(2),
            BoundId::LiWu => s_range(4),
            BoundId::SecondStab => s_range(3),
            BoundId::GlxA | BoundId::GlxB => p % 2 == 1,
        }
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        BoundId::ALL
            .into_iter()
            .find(|b| b.name() == key)
            .ok_or_else(|| param(format!("unknown bound id {s:?}")))
    }
}

/// One evaluated bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundValueOf<T> {
    pub id: BoundId,
    pub n: u64,
    /// `s` or `k`, see [`BoundId::param_name`].
    pub param: u64,
    pub value: T,
    pub in_validity_window: bool,
    /// Sub-expressions when the bound is a maximum of several (the odd
    /// second-stability case); empty otherwise.
    pub parts: Vec<T>,
}

/// Evaluates `id` at `(n, p)` where `p` is `s` or `k`. Out-of-window
/// parameters are evaluated anyway and flagged.
pub fn evaluate<T: ExactInt>(id: BoundId, n: u64, p: u64) -> BoundValueOf<T> {
    let ni = n as i64;
    let pi = p as i64;
    let d = pi / 2;
    let odd = p % 2 == 1;
    let c = |a: i64, b: i64| binomial::<T>(a, b);
    let ball = |d: i64| ball_size::<T>(ni, d);
    let two = || T::from(2u64);
    let one = T::one;

    // s-union / diameter ladder, shared by the union and diameter theorems
    let level1 = || {
        if odd {
            ball(d) + c(ni - 1, d)
        } else {
            ball(d)
        }
    };
    let level2 = || {
        if odd {
            ball(d) + c(ni - 1, d) - c(ni - d - 2, d) + one()
        } else {
            ball(d) - c(ni - d - 1, d) + one()
        }
    };
    let level3_even = || ball(d) - c(ni - d - 1, d) - c(ni - d - 2, d - 1) + two();
    let level3_odd_a = || ball(d) + c(ni - 1, d) - c(ni - d - 2, d) - c(ni - d - 3, d - 1) + two();
    let level3_odd_b = || ball(d) + c(ni - 1, d) - c(ni - d - 2, d) - c(ni - d - 3, d) + one();

    let mut parts = Vec::new();
    let value = match id {
        BoundId::Ekr => c(ni - 1, pi - 1),
        BoundId::Hm => c(ni - 1, pi - 1) - c(ni - pi - 1, pi - 1) + one(),
        BoundId::Hk => c(ni - 1, pi - 1) - c(ni - pi - 1, pi - 1) - c(ni - pi - 2, pi - 2) + two(),
        BoundId::Katona | BoundId::Kleitman => level1(),
        BoundId::FranklUnion | BoundId::FranklDiam => level2(),
        BoundId::LiWu => {
            if odd {
                level3_odd_a()
            } else {
                level3_even()
            }
        }
        BoundId::GlxA => two() * ball(d) - two() * c(ni - 5 * d - 1, d),
        BoundId::GlxB => two() * ball_size::<T>(ni - 1, d) - c(ni - d - 2, d) + one(),
        BoundId::SecondStab => {
            if p == 3 {
                T::from(8u64)
            } else if odd {
                let a = level3_odd_a();
                let b = level3_odd_b();
                let m = a.clone().max(b.clone());
                parts = vec![a, b];
                m
            } else {
                level3_even()
            }
        }
    };
    BoundValueOf { id, n, param: p, value, in_validity_window: id.in_window(n, p), parts }
}

/// The three-level stability ladder at `(n, s)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ladder<T> {
    pub n: u64,
    pub s: u64,
    /// KLEITMAN, FRANKL_DIAM and, for `s >= 3`, SECOND_STAB.
    pub rungs: Vec<BoundValueOf<T>>,
    pub strictly_decreasing: bool,
}

pub fn bound_ladder<T: ExactInt>(n: u64, s: u64) -> Result<Ladder<T>> {
    if !(s >= 2 && s + 2 <= n) {
        return Err(param(format!("ladder needs 2 <= s <= n - 2, got n = {n}, s = {s}")));
    }
    let mut rungs = vec![evaluate::<T>(BoundId::Kleitman, n, s), evaluate::<T>(BoundId::FranklDiam, n, s)];
    if s >= 3 {
        rungs.push(evaluate::<T>(BoundId::SecondStab, n, s));
    }
    let strictly_decreasing = rungs.windows(2).all(|w| w[0].value > w[1].value);
    Ok(Ladder { n, s, rungs, strictly_decreasing })
}
