//! Maximum diameter-bounded families as maximum cliques.
//!
//! Vertices are candidate members, edges join masks at distance `<= s`.
//! Branch-and-bound uses greedy colouring bounds. Forbidden classes are
//! expanded up front into "instances": every translate of every template
//! in the class, as a vertex bitset. A clique is admissible iff no instance
//! contains it, and a subtree is cut as soon as one instance contains the
//! current clique together with every remaining candidate.
//!
//! With `fix_origin`, `∅` is forced into the clique (every family has a
//! translate containing it) and members are limited to `|F| <= s`.
//! Branching then goes over orbits of the coordinate permutations that
//! fix every chosen member: the coordinates are split into cells by the
//! chosen sets, and two candidates are equivalent when they meet each cell
//! in the same number of points. One representative per orbit suffices
//! because the graph, the candidate set and the instance list are all
//! invariant under that group.

use std::collections::{BTreeSet, HashSet};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::classify::{canonical_form, matching_templates, second_classes, CANONICAL_CAP};
use crate::constructions::{Template, TemplateKind};
use crate::error::{param, Error, Result};
use crate::family::{GroundSize, SetFamily, SetMask};

/// Largest `n` the search accepts.
pub const SEARCH_MAX_N: usize = 10;
/// Cap on `instances x vertex words`.
const INSTANCE_WORK_CAP: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "value")]
pub enum Target {
    FindMax,
    /// Looks for an admissible family larger than the given bound.
    ProveUpperBound(usize),
    /// Every admissible family of exactly this size.
    EnumerateSize(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub n: usize,
    pub s: u32,
    pub level: u8,
    pub exclusions: Vec<TemplateKind>,
    pub target: Target,
    pub fix_origin: bool,
    /// With `FindMax`, also collect every maximum family.
    pub enumerate: bool,
    pub time_limit: Option<Duration>,
}

/// Classes forbidden at each level.
pub fn level_exclusions(level: u8, s: u32) -> Result<Vec<TemplateKind>> {
    match level {
        1 => Ok(vec![]),
        2 => Ok(vec![TemplateKind::K]),
        3 => {
            let mut v = vec![TemplateKind::K];
            v.extend(second_classes(s));
            Ok(v)
        }
        other => Err(param(format!("level must be 1, 2 or 3, got {other}"))),
    }
}

impl SearchConfig {
    pub fn new(n: usize, s: u32, level: u8) -> Result<Self> {
        let cfg = SearchConfig {
            n,
            s,
            level,
            exclusions: level_exclusions(level, s)?,
            target: Target::FindMax,
            fix_origin: true,
            enumerate: false,
            time_limit: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn enumerating(mut self) -> Self {
        self.enumerate = true;
        self
    }

    pub fn with_target(mut self, target: Target) -> Self {
        self.target = target;
        self
    }

    pub fn with_fix_origin(mut self, on: bool) -> Self {
        self.fix_origin = on;
        self
    }

    pub fn with_time_limit(mut self, limit: Option<Duration>) -> Self {
        self.time_limit = limit;
        self
    }

    pub fn validate(&self) -> Result<()> {
        GroundSize::new(self.n)?;
        if self.n > SEARCH_MAX_N {
            return Err(Error::CapExceeded(format!("search needs n <= {SEARCH_MAX_N}, got {}", self.n)));
        }
        if self.s < 2 || self.s as usize + 2 > self.n {
            return Err(param(format!("search needs 2 <= s <= n-2, got n = {}, s = {}", self.n, self.s)));
        }
        match self.target {
            Target::ProveUpperBound(0) | Target::EnumerateSize(0) => Err(param("bound and size must be >= 1")),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Largest admissible family seen; exact when `exhausted`.
    pub max_size: usize,
    /// Canonical forms, sorted.
    pub witnesses: Vec<SetFamily>,
    pub exhausted: bool,
    pub nodes_explored: u64,
    /// For `ProveUpperBound`: whether no larger admissible family exists.
    pub bound_holds: Option<bool>,
}

type Bits = Vec<u64>;

fn bit_set(b: &mut [u64], i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn bit_clear(b: &mut [u64], i: usize) {
    b[i / 64] &= !(1 << (i % 64));
}

fn count(b: &[u64]) -> usize {
    b.iter().map(|w| w.count_ones() as usize).sum()
}

fn is_empty(b: &[u64]) -> bool {
    b.iter().all(|w| *w == 0)
}

fn ones(b: &[u64]) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(wi, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let t = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(wi * 64 + t)
        })
    })
}

fn and(a: &[u64], b: &[u64]) -> Bits {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

struct Graph {
    n: GroundSize,
    verts: Vec<SetMask>,
    adj: Vec<Bits>,
    /// `inst_of[v]`: instances containing vertex `v`.
    inst_of: Vec<Bits>,
    /// `instances[i]`: vertex bitset of instance `i`.
    instances: Vec<Bits>,
}

fn build_graph(cfg: &SearchConfig) -> Result<Graph> {
    let n = GroundSize::new(cfg.n)?;
    let mut verts: Vec<SetMask> = (0..1u64 << cfg.n)
        .map(SetMask)
        .filter(|m| !cfg.fix_origin || m.len() <= cfg.s)
        .collect();
    verts.sort_by_key(|m| (m.len(), m.bits()));
    let nv = verts.len();
    let words = nv.div_ceil(64);
    let index = |m: SetMask| verts.binary_search_by_key(&(m.len(), m.bits()), |v| (v.len(), v.bits())).ok();
    let mut adj = vec![vec![0u64; words]; nv];
    for i in 0..nv {
        for j in 0..nv {
            if i != j && verts[i].distance(verts[j]) <= cfg.s {
                bit_set(&mut adj[i], j);
            }
        }
    }

    let mut seen: HashSet<Bits> = HashSet::new();
    let mut instances = Vec::new();
    for &kind in &cfg.exclusions {
        for t in Template::grid(kind, n, cfg.s)? {
            let fam = t.build()?;
            let shifts: Vec<SetMask> = if cfg.fix_origin {
                fam.members().to_vec()
            } else {
                (0..1u64 << cfg.n).map(SetMask).collect()
            };
            for shift in shifts {
                let mut b = vec![0u64; words];
                for &m in fam.iter() {
                    if let Some(i) = index(m ^ shift) {
                        bit_set(&mut b, i);
                    }
                }
                if seen.insert(b.clone()) {
                    instances.push(b);
                    if instances.len() * words > INSTANCE_WORK_CAP {
                        return Err(Error::CapExceeded("too many exclusion instances".into()));
                    }
                }
            }
        }
    }
    let iwords = instances.len().div_ceil(64).max(1);
    let mut inst_of = vec![vec![0u64; iwords]; nv];
    for (k, inst) in instances.iter().enumerate() {
        for v in ones(inst) {
            bit_set(&mut inst_of[v], k);
        }
    }
    Ok(Graph { n, verts, adj, inst_of, instances })
}

struct Search<'a> {
    cfg: &'a SearchConfig,
    g: Graph,
    best: usize,
    found: Vec<Vec<usize>>,
    nodes: u64,
    deadline: Option<Instant>,
    aborted: bool,
}

impl Search<'_> {
    /// Smallest size still worth reaching from a node.
    fn threshold(&self) -> usize {
        match self.cfg.target {
            Target::FindMax if self.cfg.enumerate => self.best.max(1),
            Target::FindMax | Target::ProveUpperBound(_) => self.best + 1,
            Target::EnumerateSize(m) => m,
        }
    }

    fn record(&mut self, clique: &[usize]) {
        let size = clique.len();
        match self.cfg.target {
            Target::EnumerateSize(m) => {
                if size == m {
                    self.found.push(clique.to_vec());
                }
            }
            _ => {
                if size > self.best {
                    self.best = size;
                    self.found.clear();
                }
                if size == self.best && (self.cfg.enumerate || self.found.is_empty()) {
                    self.found.push(clique.to_vec());
                }
            }
        }
        if let Target::EnumerateSize(_) = self.cfg.target {
            self.best = self.best.max(size);
        }
    }

    /// Greedy colouring of `cand`; vertices in colour order with colours.
    fn colour(&self, cand: &[u64]) -> (Vec<usize>, Vec<usize>) {
        let mut left = cand.to_vec();
        let mut order = Vec::with_capacity(count(cand));
        let mut colours = Vec::with_capacity(order.capacity());
        let mut c = 0;
        while !is_empty(&left) {
            c += 1;
            let mut q = left.clone();
            loop {
                let Some(v) = ones(&q).next() else { break };
                bit_clear(&mut q, v);
                bit_clear(&mut left, v);
                for (w, a) in q.iter_mut().zip(&self.g.adj[v]) {
                    *w &= !a;
                }
                order.push(v);
                colours.push(c);
            }
        }
        (order, colours)
    }

    fn colour_bound(&self, cand: &[u64]) -> usize {
        self.colour(cand).1.last().copied().unwrap_or(0)
    }

    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes.is_multiple_of(4096) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.aborted = true;
                }
            }
        }
        self.aborted
    }

    /// Some live instance swallows the clique and all candidates.
    fn swallowed(&self, cand: &[u64], alive: &[u64]) -> bool {
        ones(alive).any(|k| cand.iter().zip(&self.g.instances[k]).all(|(c, i)| c & !i == 0))
    }

    fn visit(&mut self, clique: &mut Vec<usize>, v: usize, cand: &[u64], alive: &[u64], cells: Option<&[u64]>) {
        clique.push(v);
        let alive2 = and(alive, &self.g.inst_of[v]);
        let free = is_empty(&alive2);
        if free {
            self.record(clique);
        }
        let at_cap = matches!(self.cfg.target, Target::EnumerateSize(m) if clique.len() >= m);
        let cand2 = and(cand, &self.g.adj[v]);
        if !at_cap && !is_empty(&cand2) && (free || !self.swallowed(&cand2, &alive2)) {
            let cells2 = cells.map(|c| refine(c, self.g.verts[v]));
            self.expand(clique, cand2, &alive2, cells2.as_deref());
        }
        clique.pop();
    }

    fn expand(&mut self, clique: &mut Vec<usize>, mut cand: Bits, alive: &[u64], cells: Option<&[u64]>) {
        if self.tick() {
            return;
        }
        let (order, colours) = self.colour(&cand);
        let top = colours.last().copied().unwrap_or(0);
        if clique.len() + top < self.threshold() {
            return;
        }
        let orbits = cells.map(|c| self.orbits(&cand, c)).filter(|o| o.len() < order.len());
        match orbits {
            None => {
                // plain colour-ordered branching
                for idx in (0..order.len()).rev() {
                    if self.aborted || clique.len() + colours[idx] < self.threshold() {
                        return;
                    }
                    let v = order[idx];
                    self.visit(clique, v, &cand, alive, cells);
                    bit_clear(&mut cand, v);
                }
            }
            Some(orbits) => {
                for orbit in orbits {
                    if self.aborted {
                        return;
                    }
                    self.visit(clique, orbit[0], &cand, alive, cells);
                    for &v in &orbit {
                        bit_clear(&mut cand, v);
                    }
                    if is_empty(&cand) || clique.len() + self.colour_bound(&cand) < self.threshold() {
                        return;
                    }
                }
            }
        }
    }

    /// Candidate orbits under the cell stabilizer, larger sets first; each
    /// orbit lists its vertices in vertex order.
    fn orbits(&self, cand: &[u64], cells: &[u64]) -> Vec<Vec<usize>> {
        let mut groups: std::collections::BTreeMap<(std::cmp::Reverse<u32>, Vec<u32>), Vec<usize>> =
            std::collections::BTreeMap::new();
        for v in ones(cand) {
            let m = self.g.verts[v].bits();
            let sig: Vec<u32> = cells.iter().map(|c| (m & c).count_ones()).collect();
            groups.entry((std::cmp::Reverse(m.count_ones()), sig)).or_default().push(v);
        }
        groups.into_values().collect()
    }
}

fn refine(cells: &[u64], m: SetMask) -> Vec<u64> {
    let mut out = Vec::with_capacity(cells.len() + 1);
    for &c in cells {
        for part in [c & m.bits(), c & !m.bits()] {
            if part != 0 {
                out.push(part);
            }
        }
    }
    out
}

/// Runs the configured search.
pub fn max_diameter_family(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let g = build_graph(cfg)?;
    let nv = g.verts.len();
    let words = nv.div_ceil(64);
    let iwords = g.instances.len().div_ceil(64).max(1);
    let mut all_inst = vec![0u64; iwords];
    for k in 0..g.instances.len() {
        bit_set(&mut all_inst, k);
    }
    let best = match cfg.target {
        Target::ProveUpperBound(b) => b,
        _ => 0,
    };
    let mut search = Search {
        cfg,
        g,
        best,
        found: Vec::new(),
        nodes: 0,
        deadline: cfg.time_limit.map(|d| start + d),
        aborted: false,
    };
    let mut clique = Vec::new();
    if cfg.fix_origin {
        let mut cand = vec![0u64; words];
        for v in 1..nv {
            bit_set(&mut cand, v);
        }
        let cells = [search.g.n.full_mask().bits()];
        let alive = search.g.inst_of[0].clone();
        clique.push(0);
        if is_empty(&alive) {
            search.record(&clique);
        }
        if !search.swallowed(&cand, &alive) || is_empty(&alive) {
            search.expand(&mut clique, cand, &alive, Some(&cells));
        }
    } else {
        let mut cand = vec![0u64; words];
        for v in 0..nv {
            bit_set(&mut cand, v);
        }
        search.expand(&mut clique, cand, &all_inst, None);
    }

    let exhausted = !search.aborted;
    let n = search.g.n;
    let found = std::mem::take(&mut search.found);
    let mut witnesses = BTreeSet::new();
    for c in found {
        let fam = SetFamily::from_masks(n, c.iter().map(|&v| search.g.verts[v]));
        let canon = if n.get() <= CANONICAL_CAP { canonical_form(&fam)? } else { fam };
        witnesses.insert(canon);
    }
    let (max_size, bound_holds) = match cfg.target {
        Target::ProveUpperBound(b) => {
            let over = search.best > b;
            (if over { search.best } else { 0 }, Some(!over && exhausted))
        }
        _ => (search.best, None),
    };
    Ok(SearchOutcome {
        max_size,
        witnesses: witnesses.into_iter().collect(),
        exhausted,
        nodes_explored: search.nodes,
        bound_holds,
    })
}

/// Maximum families with the named classes each one fits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub outcome: SearchOutcome,
    /// `labels[i]` belongs to `outcome.witnesses[i]`.
    pub labels: Vec<Vec<Template>>,
}

/// Full enumeration of maximum families, canonicalized and labelled.
pub fn enumerate_maximum_families(cfg: &SearchConfig) -> Result<Enumeration> {
    let mut c = cfg.clone();
    c.target = Target::FindMax;
    c.enumerate = true;
    let outcome = max_diameter_family(&c)?;
    let labels = outcome
        .witnesses
        .iter()
        .map(|w| matching_templates(w, cfg.s))
        .collect::<Result<Vec<_>>>()?;
    Ok(Enumeration { outcome, labels })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let o = max_diameter_family(&SearchConfig::new(4, 2, 1).unwrap()).unwrap();
        assert_eq!((o.max_size, o.exhausted), (5, true));
        let o = max_diameter_family(&SearchConfig::new(6, 3, 2).unwrap()).unwrap();
        assert_eq!(o.max_size, 10);
        let o = max_diameter_family(&SearchConfig::new(5, 3, 3).unwrap()).unwrap();
        assert_eq!(o.max_size, 8);
    }

    #[test]
    fn fix_origin_agrees() {
        for n in 4..=5 {
            for s in 2..=(n as u32 - 2) {
                for level in 1..=3 {
                    let on = SearchConfig::new(n, s, level).unwrap();
                    let off = on.clone().with_fix_origin(false);
                    let a = max_diameter_family(&on).unwrap();
                    let b = max_diameter_family(&off).unwrap();
                    assert_eq!(a.max_size, b.max_size, "n={n} s={s} level={level}");
                }
            }
        }
    }

    #[test]
    fn upper_bound_and_exact_size_modes() {
        let cfg = SearchConfig::new(6, 3, 2).unwrap();
        let o = max_diameter_family(&cfg.clone().with_target(Target::ProveUpperBound(10))).unwrap();
        assert_eq!(o.bound_holds, Some(true));
        let o = max_diameter_family(&cfg.clone().with_target(Target::ProveUpperBound(9))).unwrap();
        assert_eq!((o.bound_holds, o.max_size), (Some(false), 10));
        let o = max_diameter_family(&cfg.with_target(Target::EnumerateSize(10))).unwrap();
        let all = enumerate_maximum_families(&SearchConfig::new(6, 3, 2).unwrap()).unwrap();
        assert_eq!(o.witnesses, all.outcome.witnesses);
        assert!(all.labels.iter().all(|l| l.iter().any(|t| t.kind() == TemplateKind::H)));
    }

    #[test]
    fn config_guards() {
        assert!(SearchConfig::new(6, 1, 1).is_err());
        assert!(SearchConfig::new(6, 5, 1).is_err());
        assert!(SearchConfig::new(11, 4, 1).is_err());
        assert!(SearchConfig::new(6, 4, 4).is_err());
    }
}
