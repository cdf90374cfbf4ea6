//! Exhaustive and randomized maximizers, canonical forms and brute-force counts.
//!
//! Cross objectives enumerate `F` over subsets of the `k`-layer and pair it with
//! `G*(F)`, the `k`-sets meeting every member of `F`. Both objectives are monotone in
//! each family, so only pairs with `F = G*(G*(F))` need to be evaluated. Intersecting
//! and antichain objectives enumerate maximal cliques of a compatibility graph.
//! Cross-Sperner pairs are enumerated as the closed sets of the Galois connection
//! `X ↦ {Y : Y incomparable with every member of X}` on the nontrivial subsets.
//!
//! Among maximizers the witness with the lexicographically smallest sorted bitmask
//! lists is kept, then brought to canonical form (`n <= 8`), so results do not depend on
//! the number of workers.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bits::{bit_positions, KSubsets};
use crate::error::{domain, Error, Result};
use crate::family::{relabel_subset, Family, GroundSet, Subset};
use crate::formulas::{binom, CountValue};
use crate::text::member_strings;

/// Largest `k`-layer the cross objectives enumerate exhaustively.
pub const MAX_CROSS_LAYER: usize = 24;
/// Largest ground set for which witnesses are canonicalized under all permutations.
pub const MAX_CANONICAL_N: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Objective {
    MaxWedgeCross,
    MaxICross,
    MaxITIntersecting,
    MaxIAntichain,
    MaxICrossSperner,
}

impl Objective {
    pub const ALL: [Objective; 5] = [
        Objective::MaxWedgeCross,
        Objective::MaxICross,
        Objective::MaxITIntersecting,
        Objective::MaxIAntichain,
        Objective::MaxICrossSperner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Objective::MaxWedgeCross => "max_wedge_cross",
            Objective::MaxICross => "max_I_cross",
            Objective::MaxITIntersecting => "max_I_t_intersecting",
            Objective::MaxIAntichain => "max_I_antichain",
            Objective::MaxICrossSperner => "max_I_cross_sperner",
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(o) = Objective::ALL.iter().find(|o| o.name() == s) {
            return Ok(*o);
        }
        Ok(match s {
            "wedge_cross" => Objective::MaxWedgeCross,
            "I_cross" | "cross" => Objective::MaxICross,
            "t_intersecting" | "I_t_intersecting" => Objective::MaxITIntersecting,
            "antichain" | "I_antichain" => Objective::MaxIAntichain,
            "cross_sperner" | "I_cross_sperner" => Objective::MaxICrossSperner,
            _ => return domain(format!("unknown objective {s:?}")),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Exhaustive,
    /// `budget` random trials (default 10 000), each from its own generator stream.
    Randomized,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchProblem {
    pub objective: Objective,
    pub n: usize,
    pub k: Option<usize>,
    pub t: Option<usize>,
    /// Restrict cross and intersecting searches to families containing `[k]`.
    pub symmetry_reduction: bool,
    pub seed: u64,
    /// Node budget (exhaustive) or trial count (randomized).
    pub budget: Option<u64>,
    pub workers: usize,
    pub mode: SearchMode,
}

impl SearchProblem {
    pub fn new(objective: Objective, n: usize) -> Self {
        SearchProblem {
            objective,
            n,
            k: None,
            t: None,
            symmetry_reduction: false,
            seed: 0,
            budget: None,
            workers: 1,
            mode: SearchMode::Exhaustive,
        }
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn t(mut self, t: usize) -> Self {
        self.t = Some(t);
        self
    }

    pub fn symmetry_reduction(mut self, on: bool) -> Self {
        self.symmetry_reduction = on;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn randomized(mut self) -> Self {
        self.mode = SearchMode::Randomized;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Single(Family),
    Pair(Family, Family),
}

impl Witness {
    pub fn families(&self) -> Vec<&Family> {
        match self {
            Witness::Single(f) => vec![f],
            Witness::Pair(f, g) => vec![f, g],
        }
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.families()
                .into_iter()
                .map(|f| json!(member_strings(f)))
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchResult {
    pub objective: Objective,
    pub value: CountValue,
    pub witness: Witness,
    pub nodes_explored: u64,
    pub exhaustive: bool,
    pub seed: u64,
}

impl SearchResult {
    pub fn to_json(&self) -> Value {
        json!({
            "objective": self.objective.name(),
            "value": self.value.to_string(),
            "witness": self.witness.to_json(),
            "exhaustive": self.exhaustive,
            "nodes": self.nodes_explored,
            "seed": self.seed,
        })
    }
}

/// Best value found so far, ties broken towards the smallest key.
#[derive(Clone, Debug, Default)]
struct Best {
    value: usize,
    key: Option<Vec<Vec<u64>>>,
}

impl Best {
    fn offer(&mut self, value: usize, key: impl FnOnce() -> Vec<Vec<u64>>) {
        match &self.key {
            Some(_) if value < self.value => {}
            Some(old) if value == self.value => {
                let key = key();
                if key < *old {
                    self.key = Some(key);
                }
            }
            _ => {
                self.value = value;
                self.key = Some(key());
            }
        }
    }

    fn merge(mut self, other: Best) -> Best {
        if let Some(key) = other.key {
            self.offer(other.value, || key);
        }
        self
    }
}

fn distinct_count(values: &mut Vec<u64>) -> usize {
    values.sort_unstable();
    values.dedup();
    values.len()
}

fn masks_of(bits: u64, table: &[u64]) -> Vec<u64> {
    bit_positions(bits).map(|i| table[i]).collect()
}

/// Runs the search.
pub fn maximize(p: &SearchProblem) -> Result<SearchResult> {
    let ground = GroundSet::new(p.n)?;
    let needs_k = matches!(
        p.objective,
        Objective::MaxWedgeCross | Objective::MaxICross | Objective::MaxITIntersecting
    );
    let k = if needs_k {
        let k = p
            .k
            .ok_or_else(|| Error::Domain(format!("{} needs k", p.objective)))?;
        if k == 0 || k > p.n {
            return domain(format!("need 1 <= k <= n, got k={k}, n={}", p.n));
        }
        k
    } else {
        0
    };
    let t = match p.objective {
        Objective::MaxITIntersecting => {
            let t = p.t.unwrap_or(1);
            if t == 0 || t > k {
                return domain(format!("need 1 <= t <= k, got t={t}"));
            }
            t
        }
        _ => 0,
    };
    let (best, nodes, exhaustive) = match (p.mode, p.objective) {
        (SearchMode::Exhaustive, Objective::MaxWedgeCross) => cross_exhaustive(p, ground, k, true)?,
        (SearchMode::Exhaustive, Objective::MaxICross) => cross_exhaustive(p, ground, k, false)?,
        (SearchMode::Exhaustive, Objective::MaxITIntersecting) => {
            t_intersecting_exhaustive(p, ground, k, t)?
        }
        (SearchMode::Exhaustive, Objective::MaxIAntichain) => antichain_exhaustive(p, ground)?,
        (SearchMode::Exhaustive, Objective::MaxICrossSperner) => {
            cross_sperner_exhaustive(p, ground)?
        }
        (SearchMode::Randomized, obj) => randomized_search(p, ground, obj, k, t)?,
    };
    let key = best.key.unwrap_or_else(|| match p.objective {
        Objective::MaxITIntersecting | Objective::MaxIAntichain => vec![vec![]],
        _ => vec![vec![], vec![]],
    });
    let mut families: Vec<Family> = key
        .iter()
        .map(|list| Family::new(ground, list.iter().map(|&b| Subset::from_bits(b))))
        .collect::<Result<_>>()?;
    if p.n <= MAX_CANONICAL_N {
        families = canonical_form(&families.iter().collect::<Vec<_>>());
    }
    if k > 0 {
        families = families
            .into_iter()
            .map(|f| f.with_uniformity(k))
            .collect::<Result<_>>()?;
    }
    let witness = if families.len() == 2 {
        let g = families.pop().unwrap();
        Witness::Pair(families.pop().unwrap(), g)
    } else {
        Witness::Single(families.pop().unwrap())
    };
    Ok(SearchResult {
        objective: p.objective,
        value: CountValue::from(best.value),
        witness,
        nodes_explored: nodes,
        exhaustive,
        seed: p.seed,
    })
}

fn cross_exhaustive(
    p: &SearchProblem,
    ground: GroundSet,
    k: usize,
    wedge: bool,
) -> Result<(Best, u64, bool)> {
    let n = ground.n();
    let m = binom(n as i64, k as i64);
    if m > MAX_CROSS_LAYER.into() {
        return domain(format!(
            "C({n},{k}) = {m} exceeds {MAX_CROSS_LAYER}; use randomized mode"
        ));
    }
    let layer: Vec<u64> = KSubsets::new(n, k).collect();
    let m = layer.len();
    let full: u32 = if m == 0 { 0 } else { u32::MAX >> (32 - m) };
    let disj: Vec<u32> = layer
        .iter()
        .map(|&a| {
            layer
                .iter()
                .enumerate()
                .filter(|(_, &b)| a & b == 0)
                .fold(0u32, |acc, (j, _)| acc | 1 << j)
        })
        .collect();
    let partner = |f: u32| -> u32 {
        let mut hit = 0u32;
        let mut rest = f;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            hit |= disj[i];
            rest &= rest - 1;
        }
        full & !hit
    };
    let (base, shift, free) = if p.symmetry_reduction && m > 0 {
        (1u32, 1u32, m - 1)
    } else {
        (0u32, 0u32, m)
    };
    let total: u64 = 1u64 << free;
    let limit = p.budget.map_or(total, |b| b.min(total));
    let workers = (p.workers.max(1) as u64).min(limit.max(1));
    let chunk = limit.div_ceil(workers);

    let scan = |lo: u64, hi: u64| -> Best {
        let mut best = Best::default();
        let mut buf = Vec::with_capacity(m * m);
        for j in lo..hi {
            let f = base | ((j as u32) << shift);
            let g = partner(f);
            if partner(g) != f {
                continue;
            }
            buf.clear();
            for i in bit_positions(f as u64) {
                for jj in bit_positions(g as u64) {
                    if wedge || i != jj {
                        buf.push(layer[i] & layer[jj]);
                    }
                }
            }
            let value = distinct_count(&mut buf);
            best.offer(value, || {
                vec![masks_of(f as u64, &layer), masks_of(g as u64, &layer)]
            });
        }
        best
    };

    let best = if workers <= 1 {
        scan(0, limit)
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let lo = w * chunk;
                    let hi = ((w + 1) * chunk).min(limit);
                    let scan = &scan;
                    s.spawn(move || scan(lo, hi))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("search worker panicked"))
                .fold(Best::default(), Best::merge)
        })
    };
    Ok((best, limit, limit == total))
}

/// Fixed-width bitset over graph vertices.
#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(len: usize) -> Self {
        Bits(vec![0; len.div_ceil(64).max(1)])
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn unset(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn or(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a | b).collect())
    }

    fn count_and(&self, other: &Bits) -> u32 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(w, &word)| bit_positions(word).map(move |b| w * 64 + b))
    }
}

/// Maximal cliques by Bron–Kerbosch with pivoting. Calls `visit` on each maximal clique
/// and returns `false` when the node budget ran out first.
struct CliqueSearch<'a> {
    adj: &'a [Bits],
    nodes: u64,
    budget: Option<u64>,
}

impl CliqueSearch<'_> {
    fn run(&mut self, r: &mut Vec<usize>, p: Bits, x: Bits, visit: &mut dyn FnMut(&[usize])) -> bool {
        self.nodes += 1;
        if self.budget.is_some_and(|b| self.nodes > b) {
            return false;
        }
        if p.is_empty() {
            if x.is_empty() {
                visit(r);
            }
            return true;
        }
        let union = p.or(&x);
        let pivot = union
            .iter()
            .max_by_key(|&u| p.count_and(&self.adj[u]))
            .unwrap();
        let candidates: Vec<usize> = p.and_not(&self.adj[pivot]).iter().collect();
        let (mut p, mut x) = (p, x);
        for v in candidates {
            r.push(v);
            let ok = self.run(r, p.and(&self.adj[v]), x.and(&self.adj[v]), visit);
            r.pop();
            if !ok {
                return false;
            }
            p.unset(v);
            x.set(v);
        }
        true
    }
}

/// Maximizes distinct intersections over maximal cliques of `compatible` on `vertices`.
/// With `anchor`, only cliques containing that vertex are visited.
fn clique_maximize(
    vertices: &[u64],
    compatible: impl Fn(u64, u64) -> bool,
    anchor: Option<usize>,
    budget: Option<u64>,
) -> (Best, u64, bool) {
    let len = vertices.len();
    let adj: Vec<Bits> = (0..len)
        .map(|i| {
            let mut b = Bits::empty(len);
            for j in 0..len {
                if i != j && compatible(vertices[i], vertices[j]) {
                    b.set(j);
                }
            }
            b
        })
        .collect();
    let mut all = Bits::empty(len);
    for i in 0..len {
        all.set(i);
    }
    let mut best = Best::default();
    let mut buf = Vec::new();
    let mut visit = |clique: &[usize]| {
        buf.clear();
        for (a, &i) in clique.iter().enumerate() {
            for &j in &clique[a + 1..] {
                buf.push(vertices[i] & vertices[j]);
            }
        }
        let value = distinct_count(&mut buf);
        best.offer(value, || {
            let mut masks: Vec<u64> = clique.iter().map(|&i| vertices[i]).collect();
            masks.sort_unstable();
            vec![masks]
        });
    };
    let mut search = CliqueSearch {
        adj: &adj,
        nodes: 0,
        budget,
    };
    let complete = match anchor {
        Some(v) if len > 0 => {
            let mut r = vec![v];
            search.run(&mut r, adj[v].clone(), Bits::empty(len), &mut visit)
        }
        _ => search.run(&mut Vec::new(), all, Bits::empty(len), &mut visit),
    };
    (best, search.nodes, complete)
}

fn t_intersecting_exhaustive(
    p: &SearchProblem,
    ground: GroundSet,
    k: usize,
    t: usize,
) -> Result<(Best, u64, bool)> {
    let n = ground.n();
    let size = binom(n as i64, k as i64);
    if size > 4096u32.into() {
        return domain(format!("C({n},{k}) = {size} vertices is too many; use randomized mode"));
    }
    let layer: Vec<u64> = KSubsets::new(n, k).collect();
    let anchor = p.symmetry_reduction.then_some(0);
    let t = t as u32;
    Ok(clique_maximize(
        &layer,
        |a, b| (a & b).count_ones() >= t,
        anchor,
        p.budget,
    ))
}

fn antichain_exhaustive(p: &SearchProblem, ground: GroundSet) -> Result<(Best, u64, bool)> {
    let n = ground.n();
    if n > 6 || (n == 6 && p.budget.is_none()) {
        return domain(format!(
            "antichain search over 2^[{n}] is infeasible without a budget; use randomized mode"
        ));
    }
    let all: Vec<u64> = (0..1u64 << n).collect();
    let incomparable = |a: u64, b: u64| a & b != a && a & b != b;
    Ok(clique_maximize(&all, incomparable, None, p.budget))
}

/// Galois closure data for cross-Sperner pairs over the subsets other than `∅` and `[n]`.
struct SpernerLattice {
    universe: Vec<u64>,
    incomparable: Vec<u64>,
    full: u64,
}

impl SpernerLattice {
    fn new(n: usize) -> Self {
        let universe: Vec<u64> = (1..(1u64 << n) - 1).collect();
        let u = universe.len();
        let full = if u == 0 { 0 } else { u64::MAX >> (64 - u) };
        let incomparable = universe
            .iter()
            .map(|&a| {
                universe
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| a & b != a && a & b != b)
                    .fold(0u64, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        SpernerLattice {
            universe,
            incomparable,
            full,
        }
    }

    fn partner(&self, x: u64) -> u64 {
        bit_positions(x).fold(self.full, |acc, i| acc & self.incomparable[i])
    }

    fn closure(&self, x: u64) -> u64 {
        self.partner(self.partner(x))
    }

    /// Next closed set after `a` in lectic order.
    fn next(&self, a: u64) -> Option<u64> {
        let mut a = a;
        for i in (0..self.universe.len()).rev() {
            let bit = 1u64 << i;
            if a & bit != 0 {
                a &= !bit;
            } else {
                let b = self.closure(a | bit);
                if (b & !a) & (bit - 1) == 0 {
                    return Some(b);
                }
            }
        }
        None
    }

    fn value(&self, a: u64, b: u64, buf: &mut Vec<u64>) -> usize {
        buf.clear();
        for i in bit_positions(a) {
            for j in bit_positions(b) {
                buf.push(self.universe[i] & self.universe[j]);
            }
        }
        distinct_count(buf)
    }
}

fn cross_sperner_exhaustive(p: &SearchProblem, ground: GroundSet) -> Result<(Best, u64, bool)> {
    let n = ground.n();
    if n > 6 || (n == 6 && p.budget.is_none()) {
        return domain(format!(
            "cross-Sperner search over 2^[{n}] is infeasible without a budget; use randomized mode"
        ));
    }
    let lattice = SpernerLattice::new(n);
    let mut best = Best::default();
    let mut buf = Vec::new();
    let mut nodes = 0u64;
    let mut current = Some(lattice.closure(0));
    let mut complete = true;
    while let Some(a) = current {
        if p.budget.is_some_and(|b| nodes >= b) {
            complete = false;
            break;
        }
        nodes += 1;
        let b = lattice.partner(a);
        if a != 0 && b != 0 {
            let value = lattice.value(a, b, &mut buf);
            best.offer(value, || {
                vec![masks_of(a, &lattice.universe), masks_of(b, &lattice.universe)]
            });
        }
        current = lattice.next(a);
    }
    Ok((best, nodes, complete))
}

fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn randomized_search(
    p: &SearchProblem,
    ground: GroundSet,
    objective: Objective,
    k: usize,
    t: usize,
) -> Result<(Best, u64, bool)> {
    let n = ground.n();
    let trials = p.budget.unwrap_or(10_000);
    let mut best = Best::default();
    let mut buf = Vec::new();
    match objective {
        Objective::MaxWedgeCross | Objective::MaxICross | Objective::MaxITIntersecting => {
            if binom(n as i64, k as i64) > (1u32 << 16).into() {
                return domain("randomized search needs C(n,k) <= 65536");
            }
            let layer: Vec<u64> = KSubsets::new(n, k).collect();
            for trial in 0..trials {
                let mut rng = trial_rng(p.seed, trial);
                if objective == Objective::MaxITIntersecting {
                    let mut order = layer.clone();
                    order.shuffle(&mut rng);
                    let mut fam: Vec<u64> = Vec::new();
                    for a in order {
                        if fam.iter().all(|&b| (a & b).count_ones() as usize >= t) {
                            fam.push(a);
                        }
                    }
                    fam.sort_unstable();
                    buf.clear();
                    for (i, &a) in fam.iter().enumerate() {
                        for &b in &fam[i + 1..] {
                            buf.push(a & b);
                        }
                    }
                    let value = distinct_count(&mut buf);
                    best.offer(value, || vec![fam.clone()]);
                    continue;
                }
                let seeds = rng.random_range(1..=4usize);
                let f0: Vec<u64> = (0..seeds)
                    .map(|_| layer[rng.random_range(0..layer.len())])
                    .collect();
                let meet = |fam: &[u64]| -> Vec<u64> {
                    layer
                        .iter()
                        .copied()
                        .filter(|&a| fam.iter().all(|&b| a & b != 0))
                        .collect()
                };
                let g = meet(&f0);
                let f = meet(&g);
                buf.clear();
                for &a in &f {
                    for &b in &g {
                        if objective == Objective::MaxWedgeCross || a != b {
                            buf.push(a & b);
                        }
                    }
                }
                let value = distinct_count(&mut buf);
                best.offer(value, || vec![f.clone(), g.clone()]);
            }
        }
        Objective::MaxIAntichain => {
            if n > 16 {
                return domain("randomized antichain search needs n <= 16");
            }
            let all: Vec<u64> = (0..1u64 << n).collect();
            for trial in 0..trials {
                let mut rng = trial_rng(p.seed, trial);
                let mut order = all.clone();
                order.shuffle(&mut rng);
                let mut fam: Vec<u64> = Vec::new();
                for a in order {
                    if fam.iter().all(|&b| a & b != a && a & b != b) {
                        fam.push(a);
                    }
                }
                fam.sort_unstable();
                buf.clear();
                for (i, &a) in fam.iter().enumerate() {
                    for &b in &fam[i + 1..] {
                        buf.push(a & b);
                    }
                }
                let value = distinct_count(&mut buf);
                best.offer(value, || vec![fam.clone()]);
            }
        }
        Objective::MaxICrossSperner => {
            if !(2..=16).contains(&n) {
                return domain("randomized cross-Sperner search needs 2 <= n <= 16");
            }
            let full = (1u64 << n) - 1;
            let middle: Vec<u64> = (1..full).collect();
            let incomparable = |a: u64, b: u64| a & b != a && a & b != b;
            let partner = |fam: &[u64]| -> Vec<u64> {
                middle
                    .iter()
                    .copied()
                    .filter(|&y| fam.iter().all(|&x| incomparable(x, y)))
                    .collect()
            };
            for trial in 0..trials {
                let mut rng = trial_rng(p.seed, trial);
                let seeds = rng.random_range(1..=3usize);
                let a0: Vec<u64> = (0..seeds)
                    .map(|_| middle[rng.random_range(0..middle.len())])
                    .collect();
                let b = partner(&a0);
                if b.is_empty() {
                    continue;
                }
                let a = partner(&b);
                buf.clear();
                for &x in &a {
                    for &y in &b {
                        buf.push(x & y);
                    }
                }
                let value = distinct_count(&mut buf);
                best.offer(value, || vec![a.clone(), b.clone()]);
            }
        }
    }
    Ok((best, trials, false))
}

/// Lexicographically smallest sorted member lists over all relabelings of `[n]` for
/// `n <= 8`; the families are merely sorted for larger `n`.
pub fn canonical_form(families: &[&Family]) -> Vec<Family> {
    let Some(first) = families.first() else {
        return Vec::new();
    };
    let n = first.n();
    let lists: Vec<Vec<u64>> = families
        .iter()
        .map(|f| f.iter().map(|s| s.bits()).collect())
        .collect();
    let best = if n <= MAX_CANONICAL_N {
        let mut best = lists.clone();
        let mut perm: Vec<usize> = (1..=n).collect();
        let mut consider = |perm: &[usize]| {
            let cand: Vec<Vec<u64>> = lists
                .iter()
                .map(|l| {
                    let mut v: Vec<u64> = l
                        .iter()
                        .map(|&b| relabel_subset(Subset::from_bits(b), perm).bits())
                        .collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            if cand < best {
                best = cand;
            }
        };
        // Heap's algorithm.
        let mut c = vec![0usize; n];
        consider(&perm);
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                consider(&perm);
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        best
    } else {
        lists
    };
    best.into_iter()
        .zip(families)
        .map(|(l, f)| {
            let out = Family::new(f.ground(), l.into_iter().map(Subset::from_bits))
                .expect("relabeling stays inside the ground set");
            match f.declared_uniformity() {
                Some(k) => out.with_uniformity(k).expect("uniformity is preserved"),
                None => out,
            }
        })
        .collect()
}

/// Whether two families (or tuples of families) agree up to a relabeling of `[n]`.
/// Decided by canonical forms, so limited to `n <= 8`.
pub fn isomorphic(a: &[&Family], b: &[&Family]) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    if let (Some(x), Some(y)) = (a.first(), b.first()) {
        if x.n() != y.n() {
            return Ok(false);
        }
        if x.n() > MAX_CANONICAL_N {
            return domain(format!("isomorphism test needs n <= {MAX_CANONICAL_N}"));
        }
    }
    Ok(canonical_form(a) == canonical_form(b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BruteKind {
    /// All `F ∩ G`, `F ∈ 𝓕`, `G ∈ 𝓖`.
    Wedge,
    /// `F ∩ G` with `F ≠ G`.
    IPair,
    /// `F ∩ F'` with `F ≠ F'` inside one family.
    ISelf,
}

impl FromStr for BruteKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wedge" => Ok(BruteKind::Wedge),
            "I_pair" => Ok(BruteKind::IPair),
            "I_self" => Ok(BruteKind::ISelf),
            _ => domain(format!("unknown count kind {s:?}")),
        }
    }
}

/// Direct double-loop count into a hash set.
pub fn brute_count(kind: BruteKind, f: &Family, g: Option<&Family>) -> Result<CountValue> {
    let other = match kind {
        BruteKind::ISelf => f,
        _ => g.ok_or_else(|| Error::Domain("this count needs a second family".into()))?,
    };
    if other.n() != f.n() {
        return domain(format!("ground sets differ: [{}] vs [{}]", f.n(), other.n()));
    }
    let mut seen: HashSet<u64> = HashSet::new();
    for a in f.members() {
        for b in other.members() {
            if kind != BruteKind::Wedge && a == b {
                continue;
            }
            seen.insert(a.bits() & b.bits());
        }
    }
    Ok(CountValue::from(seen.len()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{distinct_intersections, is_cross_intersecting, is_cross_sperner};

    fn fam(n: usize, lists: &[&[usize]]) -> Family {
        Family::from_lists(GroundSet::new(n).unwrap(), lists).unwrap()
    }

    fn value(p: &SearchProblem) -> u64 {
        maximize(p).unwrap().value.to_u64().unwrap()
    }

    #[test]
    fn brute_counts() {
        let s1 = fam(4, &[&[1, 2], &[1, 3], &[1, 4]]);
        assert_eq!(brute_count(BruteKind::Wedge, &s1, Some(&s1)).unwrap().to_u64(), Some(4));
        let single = fam(4, &[&[1, 2]]);
        assert_eq!(brute_count(BruteKind::ISelf, &single, None).unwrap().to_u64(), Some(0));
        assert!(brute_count(BruteKind::Wedge, &s1, None).is_err());
        assert!(brute_count(BruteKind::IPair, &s1, Some(&fam(5, &[&[1]]))).is_err());
    }

    #[test]
    fn cross_small() {
        for n in 4..=6 {
            let p = SearchProblem::new(Objective::MaxICross, n).k(2);
            let r = maximize(&p).unwrap();
            assert_eq!(r.value.to_u64(), Some(4), "n={n}");
            assert!(r.exhaustive);
            let Witness::Pair(f, g) = &r.witness else { panic!() };
            assert!(is_cross_intersecting(f, g).unwrap());
            assert_eq!(distinct_intersections(f, g).unwrap().len(), 4);
        }
    }

    #[test]
    fn cross_workers_and_symmetry_agree() {
        let base = SearchProblem::new(Objective::MaxICross, 6).k(2);
        let r1 = maximize(&base).unwrap();
        let r4 = maximize(&base.clone().workers(4)).unwrap();
        assert_eq!(r1, r4);
        let rs = maximize(&base.clone().symmetry_reduction(true).workers(3)).unwrap();
        assert_eq!(rs.value, r1.value);
        assert_eq!(rs.witness, r1.witness);
        assert_eq!(rs.nodes_explored * 2, r1.nodes_explored);
    }

    #[test]
    fn wedge_cross_small() {
        // Two full stars on the same centre give Σ_{i<=k-1} C(n-1, i) intersections.
        let p = SearchProblem::new(Objective::MaxWedgeCross, 5).k(2);
        assert!(value(&p) >= 5);
        // At n = 4 two copies of the triangle beat the star: {1,2,3,12,13,23}.
        let p = SearchProblem::new(Objective::MaxWedgeCross, 4).k(2);
        let r = maximize(&p).unwrap();
        assert_eq!(r.value.to_u64(), Some(6));
        let Witness::Pair(f, g) = &r.witness else { panic!() };
        assert_eq!(brute_count(BruteKind::Wedge, f, Some(g)).unwrap().to_u64(), Some(6));
    }

    #[test]
    fn cross_infeasible() {
        let p = SearchProblem::new(Objective::MaxICross, 8).k(2);
        assert!(maximize(&p).is_err());
        let r = maximize(&p.clone().randomized().budget(50)).unwrap();
        assert!(!r.exhaustive);
        assert!(r.value.to_u64().unwrap() >= 4);
    }

    #[test]
    fn budget_truncates() {
        let p = SearchProblem::new(Objective::MaxICross, 5).k(2).budget(10);
        let r = maximize(&p).unwrap();
        assert!(!r.exhaustive);
        assert_eq!(r.nodes_explored, 10);
    }

    #[test]
    fn triangle_is_best_intersecting() {
        let p = SearchProblem::new(Objective::MaxITIntersecting, 6).k(2).t(1);
        let r = maximize(&p).unwrap();
        assert_eq!(r.value.to_u64(), Some(3));
        assert!(r.exhaustive);
        let Witness::Single(w) = &r.witness else { panic!() };
        assert_eq!(w, &fam(6, &[&[1, 2], &[1, 3], &[2, 3]]));
        let rs = maximize(&p.clone().symmetry_reduction(true)).unwrap();
        assert_eq!(rs.value, r.value);
    }

    #[test]
    fn cross_sperner_small() {
        for (n, expect) in [(2, 1), (3, 3), (4, 9)] {
            let r = maximize(&SearchProblem::new(Objective::MaxICrossSperner, n)).unwrap();
            assert_eq!(r.value.to_u64(), Some(expect), "n={n}");
            assert!(r.exhaustive);
            let Witness::Pair(a, b) = &r.witness else { panic!() };
            assert!(is_cross_sperner(a, b).unwrap());
            assert_eq!(
                brute_count(BruteKind::IPair, a, Some(b)).unwrap().to_u64(),
                Some(expect)
            );
        }
        assert!(maximize(&SearchProblem::new(Objective::MaxICrossSperner, 6)).is_err());
    }

    /// Plain enumeration of every `A`, paired with its maximal partner.
    fn plain_cross_sperner(n: usize) -> usize {
        let middle: Vec<u64> = (1..(1u64 << n) - 1).collect();
        let inc = |a: u64, b: u64| a & b != a && a & b != b;
        let mut best = 0;
        for sel in 1u64..(1 << middle.len()) {
            let a: Vec<u64> = bit_positions(sel).map(|i| middle[i]).collect();
            let b: Vec<u64> = middle
                .iter()
                .copied()
                .filter(|&y| a.iter().all(|&x| inc(x, y)))
                .collect();
            let seen: HashSet<u64> = a
                .iter()
                .flat_map(|&x| b.iter().map(move |&y| x & y))
                .collect();
            best = best.max(seen.len());
        }
        best
    }

    #[test]
    fn closure_enumeration_matches_plain_enumeration() {
        for n in 2..=4 {
            let r = maximize(&SearchProblem::new(Objective::MaxICrossSperner, n)).unwrap();
            assert_eq!(r.value.to_u64(), Some(plain_cross_sperner(n) as u64));
        }
    }

    #[test]
    fn antichain_small() {
        // Middle layer of 2^[3] has three pairwise intersections.
        let r = maximize(&SearchProblem::new(Objective::MaxIAntichain, 3)).unwrap();
        assert_eq!(r.value.to_u64(), Some(3));
        assert!(r.exhaustive);
    }

    #[test]
    fn canonical_forms() {
        let a = fam(5, &[&[4, 5], &[3, 5], &[3, 4]]);
        let c = canonical_form(&[&a]);
        assert_eq!(c[0], fam(5, &[&[1, 2], &[1, 3], &[2, 3]]));
        let b = fam(5, &[&[1, 2], &[1, 3], &[1, 4]]);
        assert!(!isomorphic(&[&a], &[&b]).unwrap());
        assert!(isomorphic(&[&a], &[&fam(5, &[&[1, 5], &[2, 5], &[1, 2]])]).unwrap());
    }

    #[test]
    fn objective_names() {
        for o in Objective::ALL {
            assert_eq!(o.name().parse::<Objective>().unwrap(), o);
        }
        assert_eq!("cross_sperner".parse::<Objective>().unwrap(), Objective::MaxICrossSperner);
    }
}
