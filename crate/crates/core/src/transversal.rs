//! Transversals, covering and matching numbers, saturation and bases.

use std::collections::BTreeMap;

use serde_json::{json, Value};

use crate::bits::bit_positions;
use crate::error::{domain, Result};
use crate::family::{
    disjoint_pair, is_cross_intersecting, same_ground, t_violation, Family, Subset,
};
use crate::text::member_strings;

/// All `T ⊆ [n]` with `|T| <= max_size` and `|T ∩ F| >= t` for every member `F`.
pub fn transversal_family(f: &Family, t: usize, max_size: usize) -> Result<Family> {
    if f.is_empty() {
        return domain("transversal family of the empty family is every subset; refusing");
    }
    if t == 0 {
        return domain("t must be at least 1");
    }
    let n = f.n();
    if max_size > n {
        return domain(format!("max_size {max_size} exceeds n = {n}"));
    }
    let ground = f.ground();
    let mut members = Vec::new();
    for size in 0..=max_size {
        members.extend(
            ground
                .k_subsets(size)
                .filter(|s| f.iter().all(|m| m.common(*s) >= t)),
        );
    }
    Ok(Family::new(ground, members).expect("subsets of the ground set"))
}

/// Inclusion-minimal members.
pub fn minimal_sets(f: &Family) -> Family {
    f.filter(|s| !f.iter().any(|o| o.is_proper_subset_of(s)))
}

fn cover_search(members: &[Subset], t: usize, chosen: u64, forbidden: u64, budget: usize) -> bool {
    // Most constrained uncovered member: fewest available elements relative to its need.
    let mut pick: Option<(u64, usize)> = None;
    let mut slack_best = usize::MAX;
    for m in members {
        let have = (m.bits() & chosen).count_ones() as usize;
        if have >= t {
            continue;
        }
        let need = t - have;
        let avail = m.bits() & !chosen & !forbidden;
        let avail_n = avail.count_ones() as usize;
        if avail_n < need || need > budget {
            return false;
        }
        let slack = avail_n - need;
        if slack < slack_best {
            slack_best = slack;
            pick = Some((avail, need));
        }
    }
    let Some((avail, _)) = pick else {
        return true;
    };
    let mut forbidden = forbidden;
    for x in bit_positions(avail) {
        let bit = 1u64 << x;
        if cover_search(members, t, chosen | bit, forbidden, budget - 1) {
            return true;
        }
        forbidden |= bit;
    }
    false
}

/// `τ_t(F)`: the size of a smallest set meeting every member in at least `t` elements.
pub fn covering_number(f: &Family, t: usize) -> Result<usize> {
    if f.is_empty() {
        return domain("covering number of the empty family is not defined here");
    }
    if t == 0 {
        return domain("t must be at least 1");
    }
    let min = f.min_size().unwrap_or(0);
    if t > min {
        return domain(format!(
            "no t-transversal exists: t = {t} exceeds the smallest member size {min}"
        ));
    }
    for size in t..=f.n() {
        if cover_search(f.members(), t, 0, 0, size) {
            return Ok(size);
        }
    }
    unreachable!("the ground set itself is a t-transversal when t <= min member size")
}

fn matching_search(avail: &[Subset], current: usize, best: &mut usize) {
    if current + avail.len() <= *best {
        return;
    }
    if avail.is_empty() {
        *best = current;
        return;
    }
    // Union-based bound: pairwise disjoint sets of size >= min fit into the union.
    let union = avail.iter().fold(0u64, |acc, s| acc | s.bits()).count_ones() as usize;
    let min = avail.iter().map(|s| s.len()).min().unwrap_or(1).max(1);
    if current + union / min <= *best {
        return;
    }
    // Branch on the element lying in the fewest available members.
    let mut counts = [0usize; 64];
    for s in avail {
        for i in bit_positions(s.bits()) {
            counts[i] += 1;
        }
    }
    let x = (0..64)
        .filter(|&i| counts[i] > 0)
        .min_by_key(|&i| counts[i])
        .expect("nonempty members");
    let bit = 1u64 << x;
    for s in avail.iter().filter(|s| s.bits() & bit != 0) {
        let rest: Vec<Subset> = avail.iter().copied().filter(|o| !o.meets(*s)).collect();
        matching_search(&rest, current + 1, best);
    }
    let rest: Vec<Subset> = avail.iter().copied().filter(|o| o.bits() & bit == 0).collect();
    matching_search(&rest, current, best);
}

/// `ν(F)`: the largest number of pairwise disjoint members.
pub fn matching_number(f: &Family) -> usize {
    let has_empty = f.contains(Subset::EMPTY);
    let nonempty: Vec<Subset> = f.iter().copied().filter(|s| !s.is_empty()).collect();
    let mut best = 0;
    matching_search(&nonempty, 0, &mut best);
    best + usize::from(has_empty)
}

fn pair_uniformity(f: &Family, g: &Family) -> Result<usize> {
    let kf = f.rank_if_uniform();
    let kg = g.rank_if_uniform();
    match (kf, kg) {
        (Some(a), Some(b)) if a == b => Ok(a),
        (Some(a), None) if g.is_empty() => Ok(a),
        (None, Some(b)) if f.is_empty() => Ok(b),
        _ => domain("both families must be k-uniform for the same k"),
    }
}

fn family_uniformity(f: &Family) -> Result<usize> {
    f.rank_if_uniform()
        .ok_or_else(|| crate::Error::Domain("family must be k-uniform with known k".into()))
}

/// The `k`-sets meeting every member of `g`.
pub(crate) fn k_sets_meeting_all(g: &Family, k: usize) -> Vec<Subset> {
    g.ground()
        .k_subsets(k)
        .filter(|s| g.iter().all(|m| m.meets(*s)))
        .collect()
}

/// Grows a cross-intersecting pair of `k`-uniform families to a saturated pair by
/// alternately adding every `k`-set that meets all of the other side (F side first).
pub fn saturate_pair(f: &Family, g: &Family) -> Result<(Family, Family)> {
    same_ground(f, g)?;
    let k = pair_uniformity(f, g)?;
    if let Some((a, b)) = disjoint_pair(f, g) {
        return domain(format!("families are not cross-intersecting: {{{a}}} ∩ {{{b}}} = ∅"));
    }
    let ground = f.ground();
    let mut f_cur = f.clone().with_uniformity(k)?;
    let mut g_cur = g.clone().with_uniformity(k)?;
    loop {
        let f_next = Family::uniform(ground, k, k_sets_meeting_all(&g_cur, k))?.union(&f_cur)?;
        let g_next = Family::uniform(ground, k, k_sets_meeting_all(&f_next, k))?.union(&g_cur)?;
        let done = f_next == f_cur && g_next == g_cur;
        f_cur = f_next;
        g_cur = g_next;
        if done {
            return Ok((f_cur, g_cur));
        }
    }
}

/// `true` if no `k`-set can be added to either side without breaking cross-intersection.
pub fn is_saturated_pair(f: &Family, g: &Family) -> Result<bool> {
    let k = pair_uniformity(f, g)?;
    if !is_cross_intersecting(f, g)? {
        return Ok(false);
    }
    let f_ok = k_sets_meeting_all(g, k).iter().all(|s| f.contains(*s));
    let g_ok = k_sets_meeting_all(f, k).iter().all(|s| g.contains(*s));
    Ok(f_ok && g_ok)
}

fn t_extension_candidate(f: &Family, k: usize, t: usize) -> Option<Subset> {
    f.ground()
        .k_subsets(k)
        .find(|h| !f.contains(*h) && f.iter().all(|m| m.common(*h) >= t))
}

/// Grows a `t`-intersecting `k`-uniform family to a maximal one. Sweeps the `k`-sets in
/// bitmask order and adds each one that is `t`-intersecting with everything present.
pub fn saturate_t(f: &Family, t: usize) -> Result<Family> {
    let k = family_uniformity(f)?;
    if t == 0 || t > k {
        return domain(format!("t must lie in 1..=k (t = {t}, k = {k})"));
    }
    if let Some((a, b)) = t_violation(f, t) {
        return domain(format!("family is not {t}-intersecting: {{{a}}}, {{{b}}}"));
    }
    let mut members: Vec<Subset> = f.members().to_vec();
    loop {
        let mut added = false;
        for h in f.ground().k_subsets(k) {
            if members.contains(&h) {
                continue;
            }
            if members.iter().all(|m| m.common(h) >= t) {
                members.push(h);
                added = true;
            }
        }
        if !added {
            break;
        }
    }
    Family::uniform(f.ground(), k, members)
}

/// `true` if `f` is `t`-intersecting and no further `k`-set can be added.
pub fn is_saturated_t(f: &Family, t: usize) -> Result<bool> {
    let k = family_uniformity(f)?;
    Ok(t_violation(f, t).is_none() && t_extension_candidate(f, k, t).is_none())
}

/// The bases `(B(F), B(G))` of a saturated cross-intersecting pair: `B(F)` is the set of
/// minimal transversals of `G` of size at most `k`, and symmetrically.
pub fn basis_pair(f: &Family, g: &Family) -> Result<(Family, Family)> {
    same_ground(f, g)?;
    let k = pair_uniformity(f, g)?;
    if let Some((a, b)) = disjoint_pair(f, g) {
        return domain(format!("families are not cross-intersecting: {{{a}}} ∩ {{{b}}} = ∅"));
    }
    if !is_saturated_pair(f, g)? {
        return domain("pair is not saturated; run saturate_pair first");
    }
    let bf = minimal_sets(&transversal_family(g, 1, k)?);
    let bg = minimal_sets(&transversal_family(f, 1, k)?);
    Ok((bf, bg))
}

/// The basis of a saturated `t`-intersecting family: its minimal `t`-transversals of size
/// at most `k`.
pub fn basis_t(f: &Family, t: usize) -> Result<Family> {
    let k = family_uniformity(f)?;
    if t == 0 || t > k {
        return domain(format!("t must lie in 1..=k (t = {t}, k = {k})"));
    }
    if let Some((a, b)) = t_violation(f, t) {
        return domain(format!("family is not {t}-intersecting: {{{a}}}, {{{b}}}"));
    }
    if let Some(h) = t_extension_candidate(f, k, t) {
        return domain(format!("family is not saturated: {{{h}}} can be added"));
    }
    Ok(minimal_sets(&transversal_family(f, t, k)?))
}

/// A basis split by member size together with the matching split of the family it
/// generates. A member lands on level `ℓ` when the largest basis set it contains has size `ℓ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisPartition {
    pub basis_levels: BTreeMap<usize, Family>,
    pub family_levels: BTreeMap<usize, Family>,
    /// Smallest basis set size.
    pub s: usize,
    /// Largest basis set size.
    pub r: usize,
}

impl BasisPartition {
    pub fn to_json(&self) -> Value {
        let levels: Vec<Value> = self
            .basis_levels
            .iter()
            .map(|(size, basis)| {
                let members = self
                    .family_levels
                    .get(size)
                    .map(member_strings)
                    .unwrap_or_default();
                json!({"size": size, "basis": member_strings(basis), "members": members})
            })
            .collect();
        json!({"s": self.s, "r": self.r, "levels": levels})
    }
}

/// Splits `f` by the size of the largest member of `basis` contained in each set.
pub fn partition_by_basis(f: &Family, basis: &Family) -> Result<BasisPartition> {
    same_ground(f, basis)?;
    if basis.is_empty() {
        return domain("basis is empty");
    }
    let mut basis_levels: BTreeMap<usize, Vec<Subset>> = BTreeMap::new();
    for b in basis {
        basis_levels.entry(b.len()).or_default().push(*b);
    }
    let mut family_levels: BTreeMap<usize, Vec<Subset>> = BTreeMap::new();
    for m in f {
        let level = basis.iter().filter(|b| b.is_subset_of(*m)).map(|b| b.len()).max();
        match level {
            Some(l) => family_levels.entry(l).or_default().push(*m),
            None => return domain(format!("member {{{m}}} contains no basis set")),
        }
    }
    let ground = f.ground();
    let s = *basis_levels.keys().next().unwrap();
    let r = *basis_levels.keys().next_back().unwrap();
    let k = f.declared_uniformity();
    Ok(BasisPartition {
        basis_levels: basis_levels
            .into_iter()
            .map(|(l, v)| (l, Family::from_sorted_unchecked(ground, v, Some(l))))
            .collect(),
        family_levels: family_levels
            .into_iter()
            .map(|(l, v)| (l, Family::from_sorted_unchecked(ground, v, k)))
            .collect(),
        s,
        r,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{is_antichain, upward_closure, GroundSet};

    fn g(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    fn star(n: usize, k: usize, t: &[usize]) -> Family {
        let ts = Subset::of(t);
        g(n).layer(k).filter(|s| ts.is_subset_of(s))
    }

    fn frankl(n: usize, k: usize, t: usize) -> Family {
        let core = Subset::prefix(t + 2);
        g(n).layer(k).filter(|s| s.common(core) > t)
    }

    #[test]
    fn transversals_of_a_star() {
        let s1 = star(5, 2, &[1]);
        let tr = transversal_family(&s1, 1, 2).unwrap();
        let expect = Family::from_lists(
            g(5),
            &[&[1], &[1, 2], &[1, 3], &[1, 4], &[1, 5]],
        )
        .unwrap();
        assert_eq!(tr, expect);
        let one = Family::from_lists(g(4), &[&[1, 2]]).unwrap();
        assert_eq!(
            transversal_family(&one, 1, 1).unwrap(),
            Family::from_lists(g(4), &[&[1], &[2]]).unwrap()
        );
        assert!(transversal_family(&Family::empty(g(4)), 1, 2).is_err());
        assert!(transversal_family(&one, 1, 5).is_err());
    }

    #[test]
    fn t_intersecting_family_is_its_own_transversal() {
        let a = frankl(7, 3, 1);
        assert!(a.is_subfamily_of(&transversal_family(&a, 1, 3).unwrap()));
    }

    #[test]
    fn covering_numbers() {
        assert_eq!(covering_number(&star(6, 3, &[1]), 1).unwrap(), 1);
        assert_eq!(covering_number(&frankl(6, 3, 1), 1).unwrap(), 2);
        assert_eq!(covering_number(&frankl(10, 4, 2), 2).unwrap(), 3);
        assert!(covering_number(&Family::empty(g(4)), 1).is_err());
        assert!(covering_number(&star(4, 2, &[1]), 3).is_err());
    }

    #[test]
    fn covering_number_matches_brute_force() {
        let fam = frankl(8, 3, 1).union(&star(8, 3, &[7, 8])).unwrap();
        for t in 1..=2 {
            let brute = (0..=8)
                .find(|&d| g(8).k_subsets(d).any(|s| fam.iter().all(|m| m.common(s) >= t)))
                .unwrap();
            assert_eq!(covering_number(&fam, t).unwrap(), brute);
        }
    }

    #[test]
    fn matching_numbers() {
        let four = Family::from_lists(g(8), &[&[1, 2], &[3, 4], &[5, 6], &[7, 8]]).unwrap();
        assert_eq!(matching_number(&four), 4);
        assert_eq!(matching_number(&frankl(8, 3, 1)), 1);
        assert_eq!(matching_number(&Family::empty(g(3))), 0);
        let with_empty = Family::from_lists(g(3), &[&[], &[1], &[1, 2]]).unwrap();
        assert_eq!(matching_number(&with_empty), 2);
        // Perfect matching in K6 edges.
        assert_eq!(matching_number(&g(6).layer(2)), 3);
        assert_eq!(matching_number(&g(7).layer(3)), 2);
    }

    #[test]
    fn saturating_stars_and_matchings() {
        let s1 = star(6, 2, &[1]);
        let (f, gg) = saturate_pair(&s1, &s1).unwrap();
        assert_eq!((f, gg), (s1.clone(), s1.clone()));
        let a = Family::from_lists(g(6), &[&[1, 2], &[3, 4]]).unwrap();
        let b = Family::from_lists(g(6), &[&[1, 3], &[2, 4]]).unwrap();
        let (fa, fb) = saturate_pair(&a, &b).unwrap();
        assert!(a.is_subfamily_of(&fa) && b.is_subfamily_of(&fb));
        assert!(is_saturated_pair(&fa, &fb).unwrap());
        assert!(is_cross_intersecting(&fa, &fb).unwrap());
        assert!(saturate_pair(&a, &a).is_err());
    }

    #[test]
    fn saturate_t_examples() {
        let a = frankl(8, 3, 1);
        assert_eq!(saturate_t(&a, 1).unwrap(), a);
        let single = Family::uniform(g(6), 2, [Subset::of(&[1, 2])]).unwrap();
        let sat = saturate_t(&single, 1).unwrap();
        assert_eq!(
            sat,
            Family::from_lists(g(6), &[&[1, 2], &[1, 3], &[2, 3]]).unwrap()
        );
        assert!(is_saturated_t(&sat, 1).unwrap());
        let bad = Family::from_lists(g(4), &[&[1, 2], &[3, 4]]).unwrap();
        assert!(saturate_t(&bad, 1).is_err());
    }

    #[test]
    fn bases_of_saturated_pairs() {
        let s1 = star(6, 2, &[1]);
        let (bf, bg) = basis_pair(&s1, &s1).unwrap();
        let one = Family::from_lists(g(6), &[&[1]]).unwrap();
        assert_eq!((bf, bg), (one.clone(), one));
        let a = Family::from_lists(g(6), &[&[1, 2], &[3, 4]]).unwrap();
        let b = Family::from_lists(g(6), &[&[1, 3], &[2, 4]]).unwrap();
        assert!(basis_pair(&a, &b).is_err());
        let (fa, fb) = saturate_pair(&a, &b).unwrap();
        let (ba, bb) = basis_pair(&fa, &fb).unwrap();
        assert!(is_antichain(&ba) && is_antichain(&bb));
        assert!(is_cross_intersecting(&ba, &bb).unwrap());
        assert_eq!(upward_closure(&ba, 2), fa);
        assert_eq!(upward_closure(&bb, 2), fb);
    }

    #[test]
    fn t_basis_of_frankl_family() {
        let a = frankl(8, 3, 1);
        let b = basis_t(&a, 1).unwrap();
        assert_eq!(b, Family::from_lists(g(8), &[&[1, 2], &[1, 3], &[2, 3]]).unwrap());
        let s = star(7, 4, &[1, 2]);
        let bs = basis_t(&s, 2).unwrap();
        assert_eq!(bs, Family::from_lists(g(7), &[&[1, 2]]).unwrap());
        assert!(basis_t(&frankl(8, 3, 1).filter(|s| s != Subset::of(&[1, 2, 3])), 1).is_err());
    }

    #[test]
    fn partition_levels() {
        let s1 = star(5, 2, &[1]);
        let p = partition_by_basis(&s1, &Family::from_lists(g(5), &[&[1]]).unwrap()).unwrap();
        assert_eq!((p.s, p.r), (1, 1));
        assert_eq!(p.family_levels[&1], s1);

        let a = frankl(8, 4, 1);
        let b = basis_t(&a, 1).unwrap();
        let p = partition_by_basis(&a, &b).unwrap();
        assert_eq!(p.family_levels.len(), 1);
        assert_eq!(p.family_levels[&2], a);
        let json = p.to_json();
        assert_eq!(json["s"], 2);
        assert_eq!(json["levels"][0]["basis"][0], "1,2");

        let stray = Family::from_lists(g(5), &[&[4, 5]]).unwrap();
        assert!(partition_by_basis(&stray, &Family::from_lists(g(5), &[&[1]]).unwrap()).is_err());
    }

    #[test]
    fn partition_mixed_levels() {
        // Basis {1} and {2,3}: sets containing 1 and {2,3} land on level 2.
        let basis = Family::from_lists(g(5), &[&[1], &[2, 3]]).unwrap();
        let f = upward_closure(&basis, 3);
        let p = partition_by_basis(&f, &basis).unwrap();
        let total: usize = p.family_levels.values().map(|x| x.len()).sum();
        assert_eq!(total, f.len());
        assert!(p.family_levels[&2].iter().all(|s| Subset::of(&[2, 3]).is_subset_of(*s)));
        assert!(p.family_levels[&1].iter().all(|s| !Subset::of(&[2, 3]).is_subset_of(*s)));
    }
}
