//! Independent reference computations checked against the library.

use std::collections::HashMap;

use diamfam::bounds::{ball_size, binomial};
use diamfam::classify::Mode;
use diamfam::io::{parse_any, to_json, to_text};
use diamfam::search::{level_exclusions, max_diameter_family, SearchConfig};
use diamfam::{
    canonical_form, evaluate, fits_template, BigInt, BoundId, GroundSize, SetFamily, SetMask, Template, TemplateKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pascal(rows: usize) -> Vec<Vec<u128>> {
    let mut t = vec![vec![1u128]];
    for a in 1..=rows {
        let prev = &t[a - 1];
        let mut row = vec![1u128; a + 1];
        for b in 1..a {
            row[b] = prev[b - 1] + prev[b];
        }
        t.push(row);
    }
    t
}

fn c(t: &[Vec<u128>], a: i64, b: i64) -> u128 {
    if a < 0 || b < 0 || b > a {
        0
    } else {
        t[a as usize][b as usize]
    }
}

#[test]
fn binomial_matches_pascal() {
    let t = pascal(64);
    for a in 0..=64i64 {
        for b in -2..=66i64 {
            let want = c(&t, a, b);
            assert_eq!(binomial::<BigInt>(a, b), BigInt::from(want), "C({a},{b})");
            assert_eq!(binomial::<i128>(a, b), want as i128, "C({a},{b})");
        }
    }
}

#[test]
fn bounds_match_pascal_formulas() {
    let t = pascal(64);
    let ball = |n: i64, d: i64| (0..=d).map(|i| c(&t, n, i)).sum::<u128>();
    for n in 4..=40i64 {
        assert_eq!(ball_size::<i128>(n, 2) as u128, ball(n, 2));
        for s in 2..=(n - 2) {
            let d = s / 2;
            let kleitman = if s % 2 == 0 { ball(n, d) } else { ball(n, d) + c(&t, n - 1, d) };
            assert_eq!(evaluate::<BigInt>(BoundId::Kleitman, n as u64, s as u64).value, BigInt::from(kleitman));
        }
        for k in 2..=(n / 2) {
            let hm = c(&t, n - 1, k - 1) - c(&t, n - k - 1, k - 1) + 1;
            assert_eq!(evaluate::<BigInt>(BoundId::Hm, n as u64, k as u64).value, BigInt::from(hm), "HM({n},{k})");
        }
    }
    // Spot values derived by hand from the three closed forms.
    let v = |id, n, s| evaluate::<BigInt>(id, n, s).value;
    assert_eq!(v(BoundId::Kleitman, 10, 4), BigInt::from(56));
    assert_eq!(v(BoundId::FranklDiam, 10, 4), BigInt::from(36));
    assert_eq!(v(BoundId::SecondStab, 10, 4), BigInt::from(31));
    assert_eq!(v(BoundId::FranklDiam, 6, 3), BigInt::from(10));
    assert_eq!(v(BoundId::FranklDiam, 7, 5), BigInt::from(42));
}

/// Plain branch and bound over all cliques, checking exclusions only on
/// cliques that would improve the incumbent.
struct Naive {
    adj: Vec<u64>,
    n: GroundSize,
    s: u32,
    excluded: Vec<TemplateKind>,
    best: usize,
}

impl Naive {
    fn admissible(&self, clique: &[SetMask]) -> bool {
        let f = SetFamily::from_masks(self.n, clique.iter().copied());
        self.excluded
            .iter()
            .all(|&k| fits_template(&f, k, self.s, Mode::TranslateOnly).unwrap().is_none())
    }

    fn go(&mut self, clique: &mut Vec<SetMask>, cand: u64) {
        if clique.len() > self.best && self.admissible(clique) {
            self.best = clique.len();
        }
        let mut rest = cand;
        while rest != 0 {
            if clique.len() + rest.count_ones() as usize <= self.best {
                return;
            }
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            clique.push(SetMask(v as u64));
            self.go(clique, rest & self.adj[v]);
            clique.pop();
        }
    }
}

fn naive_max(n: usize, s: u32, level: u8) -> usize {
    let g = GroundSize::new(n).unwrap();
    let verts = 1usize << n;
    let adj: Vec<u64> = (0..verts)
        .map(|a| {
            (0..verts)
                .filter(|&b| b != a && ((a ^ b) as u64).count_ones() <= s)
                .fold(0u64, |m, b| m | 1 << b)
        })
        .collect();
    let excluded = level_exclusions(level, s).unwrap();
    let mut search = Naive { adj, n: g, s, excluded, best: 0 };
    if level == 1 {
        // Full 2^n-vertex graph.
        let all = if verts == 64 { u64::MAX } else { (1u64 << verts) - 1 };
        search.go(&mut Vec::new(), all);
    } else {
        // Admissibility is translation invariant, so some maximum family
        // contains the empty set.
        let adj0 = search.adj[0];
        search.go(&mut vec![SetMask::EMPTY], adj0);
    }
    search.best
}

#[test]
fn search_matches_naive_clique_oracle() {
    for n in 4..=5 {
        for s in 2..=(n as u32 - 2) {
            for level in 1..=3u8 {
                let fast = max_diameter_family(&SearchConfig::new(n, s, level).unwrap()).unwrap();
                assert!(fast.exhausted);
                assert_eq!(fast.max_size, naive_max(n, s, level), "n = {n}, s = {s}, level {level}");
            }
        }
    }
}

/// Lexicographically least sorted member list over all `2^n n!` isometries.
fn orbit_min(f: &SetFamily) -> Vec<u64> {
    let n = f.n().get();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<u64>> = None;
    loop {
        for shift in 0..(1u64 << n) {
            let mut img: Vec<u64> = f
                .iter()
                .map(|m| {
                    let b = m.bits() ^ shift;
                    (0..n).filter(|&i| b >> i & 1 == 1).fold(0u64, |acc, i| acc | 1 << perm[i])
                })
                .collect();
            img.sort_unstable();
            if best.as_ref().is_none_or(|b| img < *b) {
                best = Some(img);
            }
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    best.unwrap()
}

fn next_permutation(p: &mut [usize]) -> bool {
    let Some(i) = (1..p.len()).rev().find(|&i| p[i - 1] < p[i]) else {
        return false;
    };
    let j = (i..p.len()).rev().find(|&j| p[j] > p[i - 1]).unwrap();
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Same partition into orbits as the brute-force orbit minimum.
fn assert_same_partition(fams: &[SetFamily]) {
    let mut by_brute: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut by_canon: HashMap<SetFamily, usize> = HashMap::new();
    for (i, f) in fams.iter().enumerate() {
        let a = *by_brute.entry(orbit_min(f)).or_insert(i);
        let b = *by_canon.entry(canonical_form(f).unwrap()).or_insert(i);
        assert_eq!(a, b, "{f}");
    }
}

#[test]
fn canonical_form_matches_brute_force_orbits() {
    let g3 = GroundSize::new(3).unwrap();
    let all3: Vec<SetFamily> = (1u64..256)
        .map(|bits| SetFamily::from_masks(g3, (0..8u64).filter(|v| bits >> v & 1 == 1).map(SetMask)))
        .collect();
    assert_same_partition(&all3);

    let g4 = GroundSize::new(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut fams = Vec::new();
    for _ in 0..600 {
        let size = rng.gen_range(1..=8);
        let f = SetFamily::from_masks(g4, (0..size).map(|_| SetMask(rng.gen_range(0..16u64))));
        // Pair each family with a random image so orbits get hit twice.
        let shift = SetMask(rng.gen_range(0..16u64));
        let mut perm = vec![1, 2, 3, 4];
        for i in (1..4).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        let img = f.translate(shift).unwrap().permute(&perm).unwrap();
        fams.push(f);
        fams.push(img);
    }
    assert_same_partition(&fams);
}

#[test]
fn text_and_json_round_trip_every_template() {
    for n in 5..=8usize {
        let g = GroundSize::new(n).unwrap();
        for kind in TemplateKind::ALL {
            if kind == TemplateKind::Lex {
                continue;
            }
            for s in 2..=(n as u32 - 2) {
                let Ok(grid) = Template::grid(kind, g, s) else { continue };
                for t in grid {
                    let f = t.build().unwrap();
                    assert_eq!(parse_any(&to_text(&f)).unwrap(), f, "{t}");
                    assert_eq!(parse_any(&to_json(&f, Some(t.params_json()))).unwrap(), f, "{t}");
                }
            }
        }
    }
}
