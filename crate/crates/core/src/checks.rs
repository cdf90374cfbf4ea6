//! Randomized and exhaustive checks of known bounds on small instances.

use std::fmt;
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bits::{bit_positions, KSubsets};
use crate::error::{domain, Error, Result};
use crate::family::{distinct_intersections, shade, Family, GroundSet, Subset};
use crate::formulas::{binom, eval, FormulaId, Params};
use crate::transversal::{k_sets_meeting_all, matching_number, saturate_pair, saturate_t};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    /// The `(k-1)`-layer of `I(F,G)` of a saturated cross-intersecting pair has `ν <= 4`.
    LayerMatching,
    /// `|F||G| <= C(n-1,k-1)²` for cross-intersecting pairs.
    CrossProduct,
    /// `|F| <= ν(F)·C(n-1,k-1)`, checked where `n >= (ν(F)+1)k`.
    MatchingBound,
    /// Nontrivial intersecting families have at most `C(n-1,k-1) - C(n-k-1,k-1) + 1` members.
    HiltonMilner,
    /// Intersecting families have at most `C(n-1,k-1)` members.
    Ekr,
    /// An antichain `A` of `2^[n]` has `(2^n - |I(A)|)² > 2^n`.
    AntichainIntersections,
}

impl Property {
    pub const ALL: [Property; 6] = [
        Property::LayerMatching,
        Property::CrossProduct,
        Property::MatchingBound,
        Property::HiltonMilner,
        Property::Ekr,
        Property::AntichainIntersections,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::LayerMatching => "prop21_nu_le4",
            Property::CrossProduct => "pyber",
            Property::MatchingBound => "emc",
            Property::HiltonMilner => "hm",
            Property::Ekr => "ekr",
            Property::AntichainIntersections => "prop53_antichain",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown property {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub property: Property,
    pub n: usize,
    pub k: Option<usize>,
    /// Instances generated.
    pub trials: u64,
    /// Instances the property applied to (for example nontrivial families only).
    pub checked: u64,
    /// Instances outside the property's parameter range that would violate it.
    pub out_of_range_violations: u64,
    pub passed: bool,
    pub counterexample: Option<String>,
    pub exhaustive: bool,
    pub seed: Option<u64>,
}

impl CheckReport {
    fn new(property: Property, n: usize, k: Option<usize>, exhaustive: bool, seed: Option<u64>) -> Self {
        CheckReport {
            property,
            n,
            k,
            trials: 0,
            checked: 0,
            out_of_range_violations: 0,
            passed: true,
            counterexample: None,
            exhaustive,
            seed,
        }
    }

    fn fail(&mut self, what: String) {
        if self.passed {
            self.passed = false;
            self.counterexample = Some(what);
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "property": self.property.name(),
            "n": self.n,
            "k": self.k,
            "trials": self.trials,
            "checked": self.checked,
            "out_of_range_violations": self.out_of_range_violations,
            "passed": self.passed,
            "counterexample": self.counterexample,
            "exhaustive": self.exhaustive,
            "seed": self.seed,
        })
    }
}

/// Generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn random_k_sets(layer: &[Subset], count: usize, rng: &mut ChaCha8Rng) -> Vec<Subset> {
    (0..count).map(|_| *layer.choose(rng).unwrap()).collect()
}

/// A saturated cross-intersecting pair grown from a few random seed sets.
pub fn random_saturated_pair(
    ground: GroundSet,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(Family, Family)> {
    if k == 0 || k > ground.n() {
        return domain("need 1 <= k <= n");
    }
    let layer: Vec<Subset> = ground.k_subsets(k).collect();
    loop {
        let count = rng.random_range(1..=4);
        let g0 = Family::uniform(ground, k, random_k_sets(&layer, count, rng))?;
        let partners = k_sets_meeting_all(&g0, k);
        if partners.is_empty() {
            continue;
        }
        let count = rng.random_range(1..=4.min(partners.len()));
        let f0 = Family::uniform(ground, k, random_k_sets(&partners, count, rng))?;
        return saturate_pair(&f0, &g0);
    }
}

/// A maximal `t`-intersecting family grown from a few random seed sets.
pub fn random_saturated_t_family(
    ground: GroundSet,
    k: usize,
    t: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Family> {
    if t == 0 || t > k || k > ground.n() {
        return domain("need 1 <= t <= k <= n");
    }
    let mut layer: Vec<Subset> = ground.k_subsets(k).collect();
    layer.shuffle(rng);
    let target = rng.random_range(1..=3usize);
    let mut seeds: Vec<Subset> = Vec::new();
    for a in layer {
        if seeds.len() == target {
            break;
        }
        if seeds.iter().all(|b| a.common(*b) >= t) {
            seeds.push(a);
        }
    }
    saturate_t(&Family::uniform(ground, k, seeds)?, t)
}

/// A maximal intersecting family built by a random greedy sweep of the `k`-layer.
fn random_maximal_intersecting(layer: &[Subset], rng: &mut ChaCha8Rng) -> Vec<Subset> {
    let mut order = layer.to_vec();
    order.shuffle(rng);
    let mut fam: Vec<Subset> = Vec::new();
    for a in order {
        if fam.iter().all(|b| a.meets(*b)) {
            fam.push(a);
        }
    }
    fam
}

fn count_u64(v: &crate::formulas::CountValue) -> u64 {
    v.to_u64().expect("bound fits in u64")
}

/// `(2^n - |I|)² > 2^n` and `|I| < 2^n`.
pub fn antichain_bound_holds(n: usize, intersections: u64) -> bool {
    let total = 1u128 << n;
    let i = intersections as u128;
    i < total && (total - i) * (total - i) > total
}

/// Samples `trials` instances and checks `property` on each.
pub fn randomized_check(
    property: Property,
    n: usize,
    k: Option<usize>,
    trials: u64,
    seed: u64,
) -> Result<CheckReport> {
    if trials == 0 {
        return domain("trials must be at least 1");
    }
    let ground = GroundSet::new(n)?;
    let mut report = CheckReport::new(property, n, k, false, Some(seed));
    if property == Property::AntichainIntersections {
        if n > 16 {
            return domain("antichain sampling needs n <= 16");
        }
        let all: Vec<Subset> = (0..1u64 << n).map(Subset::from_bits).collect();
        for trial in 0..trials {
            let mut rng = trial_rng(seed, trial);
            let mut order = all.clone();
            order.shuffle(&mut rng);
            // Random antichain: greedy on a random prefix of a shuffled power set.
            let keep = rng.random_range(1..=order.len());
            let mut fam: Vec<Subset> = Vec::new();
            for a in order.into_iter().take(keep) {
                if fam.iter().all(|b| !a.comparable(*b)) {
                    fam.push(a);
                }
            }
            let f = Family::new(ground, fam)?;
            let i = distinct_intersections(&f, &f)?.len() as u64;
            report.trials += 1;
            report.checked += 1;
            if !antichain_bound_holds(n, i) {
                report.fail(format!("antichain of size {} with |I| = {i}", f.len()));
            }
        }
        return Ok(report);
    }
    let k = k.ok_or_else(|| Error::Domain(format!("{property} needs k")))?;
    if k == 0 || k > n {
        return domain(format!("need 1 <= k <= n, got k={k}"));
    }
    if matches!(property, Property::CrossProduct | Property::Ekr | Property::LayerMatching) && n < 2 * k {
        return domain(format!("{property} needs n >= 2k"));
    }
    if property == Property::HiltonMilner && n <= 2 * k {
        return domain("hm needs n > 2k");
    }
    let params = Params::new().n(n as i64).k(k as i64);
    let ekr = count_u64(&eval(FormulaId::Ekr, &params)?);
    let layer: Vec<Subset> = ground.k_subsets(k).collect();
    for trial in 0..trials {
        let mut rng = trial_rng(seed, trial);
        report.trials += 1;
        match property {
            Property::LayerMatching => {
                let (f, g) = random_saturated_pair(ground, k, &mut rng)?;
                let h = distinct_intersections(&f, &g)?.level(k - 1);
                let nu = matching_number(&h);
                report.checked += 1;
                if nu > 4 {
                    report.fail(format!("saturated pair with |F|={}, |G|={} has ν = {nu}", f.len(), g.len()));
                }
            }
            Property::CrossProduct => {
                let (f, g) = random_saturated_pair(ground, k, &mut rng)?;
                report.checked += 1;
                if (f.len() as u64) * (g.len() as u64) > ekr * ekr {
                    report.fail(format!("|F|·|G| = {}·{} > {}", f.len(), g.len(), ekr * ekr));
                }
            }
            Property::MatchingBound => {
                let size = rng.random_range(1..=layer.len().min(60));
                let f = Family::uniform(ground, k, random_k_sets(&layer, size, &mut rng))?;
                let nu = matching_number(&f) as u64;
                let violated = f.len() as u64 > nu * ekr;
                if n as u64 >= (nu + 1) * k as u64 {
                    report.checked += 1;
                    if violated {
                        report.fail(format!("|F| = {} > ν·C(n-1,k-1) = {}", f.len(), nu * ekr));
                    }
                } else if violated {
                    report.out_of_range_violations += 1;
                }
            }
            Property::Ekr | Property::HiltonMilner => {
                let fam = random_maximal_intersecting(&layer, &mut rng);
                let common = fam.iter().fold(ground.full(), |acc, s| acc.intersection(*s));
                if property == Property::Ekr {
                    report.checked += 1;
                    if fam.len() as u64 > ekr {
                        report.fail(format!("intersecting family of size {} > {ekr}", fam.len()));
                    }
                } else if common.is_empty() {
                    let hm = count_u64(&eval(FormulaId::HiltonMilner, &params)?);
                    report.checked += 1;
                    if fam.len() as u64 > hm {
                        report.fail(format!("nontrivial intersecting family of size {} > {hm}", fam.len()));
                    }
                }
            }
            Property::AntichainIntersections => unreachable!(),
        }
    }
    Ok(report)
}

/// Exhaustive check of EKR, Hilton–Milner, the cross product bound and the matching
/// bound over every family of `k`-sets of `[n]`, for `C(n,k) <= 24`. Each bound is only
/// checked where it applies: EKR and the product bound for `n >= 2k`, Hilton–Milner for
/// `n > 2k`.
pub fn exhaustive_cited_bounds(n: usize, k: usize) -> Result<Vec<CheckReport>> {
    let ground = GroundSet::new(n)?;
    if k == 0 || k > n {
        return domain("need 1 <= k <= n");
    }
    if binom(n as i64, k as i64) > 24u32.into() {
        return domain("exhaustive bound checks need C(n,k) <= 24");
    }
    let layer: Vec<u64> = KSubsets::new(n, k).collect();
    let m = layer.len();
    let full: u32 = u32::MAX >> (32 - m);
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
    let params = Params::new().n(n as i64).k(k as i64);
    let ekr = count_u64(&eval(FormulaId::Ekr, &params)?);
    let hm = count_u64(&eval(FormulaId::HiltonMilner, &params)?);

    let size = 1usize << m;
    // Per-mask dynamic programmes keyed on removing the lowest member.
    let mut nu = vec![0u8; size];
    let mut hit = vec![0u32; size];
    let mut intersecting = vec![true; size];
    let mut common = vec![ground.full().bits(); size];

    let mut ekr_r = CheckReport::new(Property::Ekr, n, Some(k), true, None);
    let mut hm_r = CheckReport::new(Property::HiltonMilner, n, Some(k), true, None);
    let mut pyber_r = CheckReport::new(Property::CrossProduct, n, Some(k), true, None);
    let mut emc_r = CheckReport::new(Property::MatchingBound, n, Some(k), true, None);
    let show = |mask: u32| -> String {
        bit_positions(mask as u64)
            .map(|i| format!("{{{}}}", Subset::from_bits(layer[i])))
            .collect::<Vec<_>>()
            .join(" ")
    };
    for mask in 1..size {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        nu[mask] = nu[rest].max(1 + nu[rest & disj[low] as usize]);
        hit[mask] = hit[rest] | disj[low];
        intersecting[mask] = intersecting[rest] && (rest as u32 & disj[low]) == 0;
        common[mask] = common[rest] & layer[low];
        let len = mask.count_ones() as u64;

        emc_r.trials += 1;
        let violated = len > nu[mask] as u64 * ekr;
        if n >= (nu[mask] as usize + 1) * k {
            emc_r.checked += 1;
            if violated {
                emc_r.fail(show(mask as u32));
            }
        } else if violated {
            emc_r.out_of_range_violations += 1;
        }
        if n >= 2 * k {
            if intersecting[mask] {
                ekr_r.trials += 1;
                ekr_r.checked += 1;
                if len > ekr {
                    ekr_r.fail(show(mask as u32));
                }
            }
            let partner = full & !hit[mask];
            pyber_r.trials += 1;
            pyber_r.checked += 1;
            if len * partner.count_ones() as u64 > ekr * ekr {
                pyber_r.fail(format!("{} with partner {}", show(mask as u32), show(partner)));
            }
        }
        if n > 2 * k && intersecting[mask] {
            hm_r.trials += 1;
            if common[mask] == 0 {
                hm_r.checked += 1;
                if len > hm {
                    hm_r.fail(show(mask as u32));
                }
            }
        }
    }
    Ok(vec![ekr_r, hm_r, pyber_r, emc_r])
}

/// Outcome of the shade check: number of families examined and the first failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadeReport {
    pub families: u64,
    pub failure: Option<Family>,
}

/// `|shade(A)| >= |A|` for every `a`-uniform `A` with `a < n/2`, over all `n <= n_max`.
pub fn exhaustive_shade(n_max: usize) -> Result<ShadeReport> {
    if n_max > 6 {
        return domain("exhaustive shade check needs n <= 6");
    }
    let mut report = ShadeReport {
        families: 0,
        failure: None,
    };
    for n in 1..=n_max {
        let ground = GroundSet::new(n)?;
        for a in (0..n).filter(|a| 2 * a < n) {
            let layer: Vec<Subset> = ground.k_subsets(a).collect();
            for sel in 1u64..(1u64 << layer.len()) {
                let fam = Family::uniform(ground, a, bit_positions(sel).map(|i| layer[i]))?;
                report.families += 1;
                if shade(&fam)?.len() < fam.len() && report.failure.is_none() {
                    report.failure = Some(fam);
                }
            }
        }
    }
    Ok(report)
}

/// Every antichain of `2^[n]` (the empty one included), for `n <= 5`.
pub fn all_antichains(n: usize) -> Result<Vec<Family>> {
    if n > 5 {
        return domain("antichain enumeration needs n <= 5");
    }
    let ground = GroundSet::new(n)?;
    let total = 1u64 << n;
    let mut out = Vec::new();
    let mut current: Vec<u64> = Vec::new();
    fn walk(next: u64, total: u64, current: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        out.push(current.clone());
        for s in next..total {
            if current.iter().all(|&b| s & b != s && s & b != b) {
                current.push(s);
                walk(s + 1, total, current, out);
                current.pop();
            }
        }
    }
    let mut raw = Vec::new();
    walk(0, total, &mut current, &mut raw);
    for list in raw {
        out.push(Family::new(ground, list.into_iter().map(Subset::from_bits))?);
    }
    Ok(out)
}

/// Checks the antichain intersection bound on every antichain of `2^[n]`.
pub fn exhaustive_antichain_bound(n: usize) -> Result<CheckReport> {
    let mut report = CheckReport::new(Property::AntichainIntersections, n, None, true, None);
    for a in all_antichains(n)? {
        let i = distinct_intersections(&a, &a)?.len() as u64;
        report.trials += 1;
        report.checked += 1;
        if !antichain_bound_holds(n, i) {
            report.fail(crate::text::member_strings(&a).join(" | "));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transversal::is_saturated_pair;

    #[test]
    fn antichain_counts_are_dedekind_numbers() {
        let counts: Vec<usize> = (1..=4).map(|n| all_antichains(n).unwrap().len()).collect();
        assert_eq!(counts, vec![3, 6, 20, 168]);
    }

    #[test]
    fn antichain_bound_arithmetic() {
        // 2^4 = 16: |I| = 11 gives 25 > 16, |I| = 12 gives 16, not > 16.
        assert!(antichain_bound_holds(4, 11));
        assert!(!antichain_bound_holds(4, 12));
        assert!(!antichain_bound_holds(2, 4));
    }

    #[test]
    fn exhaustive_bounds_small() {
        for n in 4..=6 {
            for r in exhaustive_cited_bounds(n, 2).unwrap() {
                assert!(r.passed, "{:?}", r);
            }
        }
        let reports = exhaustive_cited_bounds(5, 2).unwrap();
        // Triangles are the only nontrivial intersecting graphs on [5].
        assert_eq!(reports[1].checked, 10);
        // K5 minus an edge has ν = 2 and 9 > 2·4 edges; n = 5 < (2+1)·2 puts it out of range.
        assert!(reports[3].out_of_range_violations > 0);
        assert!(exhaustive_cited_bounds(8, 2).is_err());
    }

    #[test]
    fn random_pairs_are_saturated() {
        let ground = GroundSet::new(8).unwrap();
        for trial in 0..20 {
            let mut rng = trial_rng(3, trial);
            let (f, g) = random_saturated_pair(ground, 2, &mut rng).unwrap();
            assert!(is_saturated_pair(&f, &g).unwrap());
        }
    }

    #[test]
    fn random_checks_pass_small() {
        for p in [
            Property::LayerMatching,
            Property::CrossProduct,
            Property::MatchingBound,
            Property::HiltonMilner,
            Property::Ekr,
        ] {
            let r = randomized_check(p, 8, Some(3), 30, 11).unwrap();
            assert!(r.passed, "{r:?}");
        }
        let r = randomized_check(Property::AntichainIntersections, 5, None, 30, 1).unwrap();
        assert!(r.passed);
        assert!(randomized_check(Property::Ekr, 5, Some(3), 3, 0).is_err());
    }

    #[test]
    fn deterministic_in_seed() {
        let a = randomized_check(Property::MatchingBound, 7, Some(2), 25, 9).unwrap();
        let b = randomized_check(Property::MatchingBound, 7, Some(2), 25, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shade_small() {
        let r = exhaustive_shade(4).unwrap();
        assert!(r.failure.is_none());
        assert!(r.families > 0);
    }
}
