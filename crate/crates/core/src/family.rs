//! Ground sets, subsets and families of subsets, plus the elementary operators on them.
//!
//! A [`Subset`] is a bitmask where bit `i - 1` stands for element `i` of the ground set
//! `[n] = {1, ..., n}`. A [`Family`] keeps its members sorted by bitmask value and free of
//! duplicates, so two families are equal exactly when their member lists are equal.

use std::collections::HashSet;
use std::fmt;

use crate::bits::{bit_positions, low_mask, KSubsets};
use crate::error::{domain, Result};

/// Largest supported ground set.
pub const MAX_N: usize = 64;

/// The ground set `[n]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundSet {
    n: u8,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_N {
            return domain(format!("ground set size must be in 1..={MAX_N}, got {n}"));
        }
        Ok(GroundSet { n: n as u8 })
    }

    pub fn n(self) -> usize {
        self.n as usize
    }

    /// The subset `[n]` itself.
    pub fn full(self) -> Subset {
        Subset(low_mask(self.n()))
    }

    pub fn contains(self, s: Subset) -> bool {
        s.0 & !low_mask(self.n()) == 0
    }

    /// All `k`-subsets of `[n]` in bitmask order.
    pub fn k_subsets(self, k: usize) -> impl Iterator<Item = Subset> {
        KSubsets::new(self.n(), k).map(Subset)
    }

    /// The full layer `binom([n], k)` as a `k`-uniform family.
    pub fn layer(self, k: usize) -> Family {
        Family::from_sorted_unchecked(self, self.k_subsets(k).collect(), Some(k))
    }

    /// Every subset of `[n]`; only sensible for small `n`.
    pub fn power_set(self) -> Family {
        assert!(self.n() <= 24, "power set of [{}] is too large", self.n());
        let members = (0..1u64 << self.n()).map(Subset).collect();
        Family::from_sorted_unchecked(self, members, None)
    }
}

/// A subset of the ground set, stored as a bitmask (bit `i - 1` represents element `i`).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(pub u64);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u64) -> Self {
        Subset(bits)
    }

    /// Builds a subset from 1-based element labels. Panics on labels outside `1..=64`.
    pub fn of(elements: &[usize]) -> Self {
        let mut bits = 0u64;
        for &e in elements {
            assert!((1..=MAX_N).contains(&e), "element {e} outside 1..=64");
            bits |= 1 << (e - 1);
        }
        Subset(bits)
    }

    /// `{1, ..., m}`.
    pub fn prefix(m: usize) -> Self {
        Subset(low_mask(m))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, element: usize) -> bool {
        (1..=MAX_N).contains(&element) && self.0 >> (element - 1) & 1 == 1
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_proper_subset_of(self, other: Subset) -> bool {
        self != other && self.is_subset_of(other)
    }

    pub fn comparable(self, other: Subset) -> bool {
        self.is_subset_of(other) || other.is_subset_of(self)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn meets(self, other: Subset) -> bool {
        self.0 & other.0 != 0
    }

    pub fn common(self, other: Subset) -> usize {
        (self.0 & other.0).count_ones() as usize
    }

    pub fn with(self, element: usize) -> Subset {
        self.union(Subset::of(&[element]))
    }

    pub fn without(self, element: usize) -> Subset {
        self.difference(Subset::of(&[element]))
    }

    /// 1-based elements in increasing order.
    pub fn elements(self) -> impl Iterator<Item = usize> {
        bit_positions(self.0).map(|i| i + 1)
    }

    pub fn to_vec(self) -> Vec<usize> {
        self.elements().collect()
    }

    /// Largest element, if any.
    pub fn max_element(self) -> Option<usize> {
        (self.0 != 0).then(|| 64 - self.0.leading_zeros() as usize)
    }
}

/// Comma-separated ascending element list; the empty set prints as the empty string.
impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for e in self.elements() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
            first = false;
        }
        Ok(())
    }
}

/// A duplicate-free, bitmask-ordered collection of subsets of one ground set.
/// Equality and hashing look at the ground set and the members only; the declared
/// uniformity is metadata.
#[derive(Clone, Debug)]
pub struct Family {
    ground: GroundSet,
    members: Vec<Subset>,
    uniformity: Option<usize>,
}

impl PartialEq for Family {
    fn eq(&self, other: &Self) -> bool {
        self.ground == other.ground && self.members == other.members
    }
}

impl Eq for Family {}

impl std::hash::Hash for Family {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.ground.hash(state);
        self.members.hash(state);
    }
}

impl Family {
    /// Builds a family, sorting and deduplicating the members.
    pub fn new(ground: GroundSet, members: impl IntoIterator<Item = Subset>) -> Result<Self> {
        let mut members: Vec<Subset> = members.into_iter().collect();
        if let Some(bad) = members.iter().find(|s| !ground.contains(**s)) {
            return domain(format!(
                "set {{{bad}}} has elements outside [{}]",
                ground.n()
            ));
        }
        members.sort_unstable();
        members.dedup();
        Ok(Family {
            ground,
            members,
            uniformity: None,
        })
    }

    /// Builds a family whose members must all have exactly `k` elements.
    pub fn uniform(
        ground: GroundSet,
        k: usize,
        members: impl IntoIterator<Item = Subset>,
    ) -> Result<Self> {
        let mut f = Family::new(ground, members)?;
        if k > ground.n() {
            return domain(format!("uniformity {k} exceeds n = {}", ground.n()));
        }
        if let Some(bad) = f.members.iter().find(|s| s.len() != k) {
            return domain(format!("set {{{bad}}} does not have {k} elements"));
        }
        f.uniformity = Some(k);
        Ok(f)
    }

    /// Builds a family from 1-based element lists.
    pub fn from_lists(ground: GroundSet, lists: &[&[usize]]) -> Result<Self> {
        for list in lists {
            if let Some(e) = list.iter().find(|&&e| e == 0 || e > ground.n()) {
                return domain(format!("element {e} outside [{}]", ground.n()));
            }
        }
        Family::new(ground, lists.iter().map(|l| Subset::of(l)))
    }

    pub fn empty(ground: GroundSet) -> Self {
        Family {
            ground,
            members: Vec::new(),
            uniformity: None,
        }
    }

    pub(crate) fn from_sorted_unchecked(
        ground: GroundSet,
        members: Vec<Subset>,
        uniformity: Option<usize>,
    ) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(members.iter().all(|s| ground.contains(*s)));
        Family {
            ground,
            members,
            uniformity,
        }
    }

    pub(crate) fn from_unsorted_unchecked(
        ground: GroundSet,
        mut members: Vec<Subset>,
        uniformity: Option<usize>,
    ) -> Self {
        members.sort_unstable();
        members.dedup();
        Family::from_sorted_unchecked(ground, members, uniformity)
    }

    pub fn ground(&self) -> GroundSet {
        self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.n()
    }

    pub fn members(&self) -> &[Subset] {
        &self.members
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Subset> {
        self.members.iter()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, s: Subset) -> bool {
        self.members.binary_search(&s).is_ok()
    }

    /// The declared uniformity, if the family was built as `k`-uniform.
    pub fn declared_uniformity(&self) -> Option<usize> {
        self.uniformity
    }

    /// The common member size: the declared uniformity, or the size shared by all members
    /// of a nonempty family.
    pub fn rank_if_uniform(&self) -> Option<usize> {
        if self.uniformity.is_some() {
            return self.uniformity;
        }
        let first = self.members.first()?.len();
        self.members.iter().all(|s| s.len() == first).then_some(first)
    }

    /// Returns the same members with declared uniformity `k`.
    pub fn with_uniformity(self, k: usize) -> Result<Self> {
        Family::uniform(self.ground, k, self.members)
    }

    /// Largest member size (0 for the empty family).
    pub fn rank(&self) -> usize {
        self.members.iter().map(|s| s.len()).max().unwrap_or(0)
    }

    /// Smallest member size, `None` for the empty family.
    pub fn min_size(&self) -> Option<usize> {
        self.members.iter().map(|s| s.len()).min()
    }

    /// Union of all members.
    pub fn support(&self) -> Subset {
        Subset(self.members.iter().fold(0, |acc, s| acc | s.0))
    }

    /// Members of size exactly `size`.
    pub fn level(&self, size: usize) -> Family {
        let members = self.members.iter().copied().filter(|s| s.len() == size).collect();
        Family::from_sorted_unchecked(self.ground, members, Some(size))
    }

    /// Members of size at most `size`.
    pub fn up_to_level(&self, size: usize) -> Family {
        let members = self.members.iter().copied().filter(|s| s.len() <= size).collect();
        Family::from_sorted_unchecked(self.ground, members, None)
    }

    pub fn filter(&self, mut keep: impl FnMut(Subset) -> bool) -> Family {
        let members = self.members.iter().copied().filter(|s| keep(*s)).collect();
        Family::from_sorted_unchecked(self.ground, members, self.uniformity)
    }

    /// Set union of two families over the same ground set.
    pub fn union(&self, other: &Family) -> Result<Family> {
        same_ground(self, other)?;
        let mut members = self.members.clone();
        members.extend_from_slice(&other.members);
        let uniformity = match (self.rank_if_uniform(), other.rank_if_uniform()) {
            (Some(a), Some(b)) if a == b => self.uniformity.and(other.uniformity),
            _ => None,
        };
        Ok(Family::from_unsorted_unchecked(self.ground, members, uniformity))
    }

    /// Members of `self` that are also members of `other`.
    pub fn common_members(&self, other: &Family) -> Result<Family> {
        same_ground(self, other)?;
        Ok(self.filter(|s| other.contains(s)))
    }

    pub fn is_subfamily_of(&self, other: &Family) -> bool {
        self.ground == other.ground && self.members.iter().all(|s| other.contains(*s))
    }

    /// Applies a permutation of the ground set; `perm[i]` is the image of element `i + 1`
    /// (1-based).
    pub fn relabel(&self, perm: &[usize]) -> Result<Family> {
        let n = self.n();
        if perm.len() != n {
            return domain(format!("permutation has length {}, expected {n}", perm.len()));
        }
        let mut seen = vec![false; n + 1];
        for &p in perm {
            if p == 0 || p > n || seen[p] {
                return domain("relabeling is not a permutation of [n]");
            }
            seen[p] = true;
        }
        let members = self.members.iter().map(|s| relabel_subset(*s, perm)).collect();
        Ok(Family::from_unsorted_unchecked(self.ground, members, self.uniformity))
    }
}

/// Image of `s` under a 1-based permutation table.
pub fn relabel_subset(s: Subset, perm: &[usize]) -> Subset {
    let mut bits = 0u64;
    for i in bit_positions(s.0) {
        bits |= 1 << (perm[i] - 1);
    }
    Subset(bits)
}

impl<'a> IntoIterator for &'a Family {
    type Item = &'a Subset;
    type IntoIter = std::slice::Iter<'a, Subset>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.members.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{{{s}}}")?;
        }
        f.write_str("}")
    }
}

pub(crate) fn same_ground(a: &Family, b: &Family) -> Result<()> {
    if a.ground != b.ground {
        return domain(format!(
            "families live on different ground sets ([{}] vs [{}])",
            a.n(),
            b.n()
        ));
    }
    Ok(())
}

fn collect_intersections(f: &Family, g: &Family, skip_equal: bool) -> Family {
    let mut seen = HashSet::with_capacity(f.len().max(g.len()));
    for &a in &f.members {
        for &b in &g.members {
            if skip_equal && a == b {
                continue;
            }
            seen.insert(a.intersection(b));
        }
    }
    Family::from_unsorted_unchecked(f.ground, seen.into_iter().collect(), None)
}

/// `F ∧ G`: every intersection `F ∩ G` with `F ∈ f`, `G ∈ g`.
pub fn wedge(f: &Family, g: &Family) -> Result<Family> {
    same_ground(f, g)?;
    Ok(collect_intersections(f, g, false))
}

/// `I(F, G)`: intersections `F ∩ G` over pairs with `F != G`. With `f == g` this is `I(F)`.
pub fn distinct_intersections(f: &Family, g: &Family) -> Result<Family> {
    same_ground(f, g)?;
    Ok(collect_intersections(f, g, true))
}

/// Every member of `f` meets every member of `g`. Vacuously true if either is empty.
pub fn is_cross_intersecting(f: &Family, g: &Family) -> Result<bool> {
    same_ground(f, g)?;
    Ok(f.members.iter().all(|a| g.members.iter().all(|b| a.meets(*b))))
}

/// First pair `(F, G)` with `F ∩ G = ∅`, if any.
pub fn disjoint_pair(f: &Family, g: &Family) -> Option<(Subset, Subset)> {
    f.members
        .iter()
        .find_map(|a| g.members.iter().find(|b| !a.meets(**b)).map(|b| (*a, *b)))
}

/// All pairs of members (including a member with itself) share at least `t` elements.
pub fn is_t_intersecting(f: &Family, t: usize) -> bool {
    t_violation(f, t).is_none()
}

/// First pair of members sharing fewer than `t` elements.
pub fn t_violation(f: &Family, t: usize) -> Option<(Subset, Subset)> {
    let m = &f.members;
    for i in 0..m.len() {
        for j in i..m.len() {
            if m[i].common(m[j]) < t {
                return Some((m[i], m[j]));
            }
        }
    }
    None
}

/// No member contains another.
pub fn is_antichain(f: &Family) -> bool {
    comparable_pair(f).is_none()
}

pub(crate) fn comparable_pair(f: &Family) -> Option<(Subset, Subset)> {
    let m = &f.members;
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if m[i].comparable(m[j]) {
                return Some((m[i], m[j]));
            }
        }
    }
    None
}

/// No member of `a` contains or is contained in a member of `b`.
pub fn is_cross_sperner(a: &Family, b: &Family) -> Result<bool> {
    same_ground(a, b)?;
    Ok(a.members.iter().all(|x| b.members.iter().all(|y| !x.comparable(*y))))
}

/// The shade of an `a`-uniform family: all `(a+1)`-sets containing some member.
pub fn shade(a: &Family) -> Result<Family> {
    let size = match a.rank_if_uniform() {
        Some(size) => size,
        None => return domain("shade needs a uniform family with known member size"),
    };
    let n = a.n();
    if size >= n {
        return domain(format!("shade of a {size}-uniform family over [{n}] is undefined"));
    }
    let mut out = HashSet::new();
    for &s in &a.members {
        for i in 0..n {
            if s.0 >> i & 1 == 0 {
                out.insert(Subset(s.0 | 1 << i));
            }
        }
    }
    Ok(Family::from_unsorted_unchecked(
        a.ground,
        out.into_iter().collect(),
        Some(size + 1),
    ))
}

/// `(F(i), F(ī))`: the link `{F \ {i} : i ∈ F}` and the deletion `{F : i ∉ F}`.
pub fn link_and_delete(f: &Family, i: usize) -> Result<(Family, Family)> {
    if i == 0 || i > f.n() {
        return domain(format!("element {i} outside [{}]", f.n()));
    }
    let bit = Subset::of(&[i]);
    let mut link = Vec::new();
    let mut del = Vec::new();
    for &s in &f.members {
        if s.meets(bit) {
            link.push(s.difference(bit));
        } else {
            del.push(s);
        }
    }
    let link_k = f.uniformity.and_then(|k| k.checked_sub(1));
    Ok((
        Family::from_unsorted_unchecked(f.ground, link, link_k),
        Family::from_sorted_unchecked(f.ground, del, f.uniformity),
    ))
}

/// The `k`-sets of `[n]` containing at least one member of `b`.
pub fn upward_closure(b: &Family, k: usize) -> Family {
    let ground = b.ground();
    let members = ground
        .k_subsets(k)
        .filter(|s| b.iter().any(|m| m.is_subset_of(*s)))
        .collect();
    Family::from_sorted_unchecked(ground, members, Some(k))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize) -> GroundSet {
        GroundSet::new(n).unwrap()
    }

    fn fam(n: usize, lists: &[&[usize]]) -> Family {
        Family::from_lists(g(n), lists).unwrap()
    }

    #[test]
    fn ground_bounds() {
        assert!(GroundSet::new(0).is_err());
        assert!(GroundSet::new(65).is_err());
        assert_eq!(GroundSet::new(64).unwrap().full().len(), 64);
    }

    #[test]
    fn family_is_canonical() {
        let a = fam(4, &[&[3, 4], &[1, 2], &[2, 1]]);
        let b = fam(4, &[&[1, 2], &[3, 4]]);
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert!(Family::from_lists(g(3), &[&[4]]).is_err());
        assert!(Family::uniform(g(4), 2, [Subset::of(&[1])]).is_err());
    }

    #[test]
    fn wedge_of_star_with_itself() {
        let s1 = fam(4, &[&[1, 2], &[1, 3], &[1, 4]]);
        let w = wedge(&s1, &s1).unwrap();
        assert_eq!(w, fam(4, &[&[1], &[1, 2], &[1, 3], &[1, 4]]));
    }

    #[test]
    fn wedge_trivial_cases() {
        let a = fam(4, &[&[1, 2]]);
        assert_eq!(wedge(&a, &a).unwrap(), a);
        let b = fam(4, &[&[3, 4]]);
        assert_eq!(wedge(&a, &b).unwrap().members(), &[Subset::EMPTY]);
        assert!(wedge(&a, &fam(5, &[&[1]])).is_err());
    }

    #[test]
    fn distinct_intersections_examples() {
        let a1 = fam(4, &[&[1, 2], &[3, 4]]);
        let a2 = fam(4, &[&[1, 3], &[2, 4]]);
        assert_eq!(
            distinct_intersections(&a1, &a2).unwrap(),
            fam(4, &[&[1], &[2], &[3], &[4]])
        );
        let single = fam(4, &[&[1, 2]]);
        assert!(distinct_intersections(&single, &single).unwrap().is_empty());
        let tri = fam(3, &[&[1, 2], &[1, 3], &[2, 3]]);
        assert_eq!(
            distinct_intersections(&tri, &tri).unwrap(),
            fam(3, &[&[1], &[2], &[3]])
        );
    }

    #[test]
    fn intersecting_predicates() {
        let a = fam(4, &[&[1, 2]]);
        let b = fam(4, &[&[3, 4]]);
        assert!(!is_cross_intersecting(&a, &b).unwrap());
        assert!(is_cross_intersecting(&Family::empty(g(4)), &b).unwrap());
        let tri = fam(3, &[&[1, 2], &[1, 3], &[2, 3]]);
        assert!(is_t_intersecting(&tri, 1));
        assert!(!is_t_intersecting(&tri, 2));
        assert!(is_t_intersecting(&fam(5, &[&[1, 2, 3]]), 3));
        assert!(!is_t_intersecting(&fam(5, &[&[1, 2, 3]]), 4));
        assert!(is_t_intersecting(&Family::empty(g(5)), 7));
    }

    #[test]
    fn antichain_predicate() {
        assert!(is_antichain(&g(5).layer(2)));
        assert!(!is_antichain(&fam(3, &[&[1], &[1, 2]])));
        assert!(is_antichain(&Family::empty(g(3))));
    }

    #[test]
    fn shade_examples() {
        let a = Family::uniform(g(3), 1, [Subset::of(&[1])]).unwrap();
        assert_eq!(shade(&a).unwrap(), fam(3, &[&[1, 2], &[1, 3]]));
        for n in 2..=6 {
            for k in 0..n {
                assert_eq!(shade(&g(n).layer(k)).unwrap(), g(n).layer(k + 1));
            }
        }
        assert!(shade(&fam(3, &[&[1], &[1, 2]])).is_err());
        assert!(shade(&g(3).layer(3)).is_err());
    }

    #[test]
    fn link_delete() {
        let s1 = fam(4, &[&[1, 2], &[1, 3], &[1, 4]]);
        let (link, del) = link_and_delete(&s1, 1).unwrap();
        assert_eq!(link, fam(4, &[&[2], &[3], &[4]]));
        assert!(del.is_empty());
        let f = fam(5, &[&[1, 2], &[2, 3]]);
        let (link, del) = link_and_delete(&f, 5).unwrap();
        assert!(link.is_empty());
        assert_eq!(del, f);
        assert!(link_and_delete(&f, 6).is_err());
        assert!(link_and_delete(&f, 0).is_err());
    }

    #[test]
    fn relabel_checks_permutation() {
        let f = fam(3, &[&[1, 2]]);
        assert_eq!(f.relabel(&[3, 1, 2]).unwrap(), fam(3, &[&[1, 3]]));
        assert!(f.relabel(&[1, 1, 2]).is_err());
        assert!(f.relabel(&[1, 2]).is_err());
    }

    #[test]
    fn subset_display() {
        assert_eq!(Subset::of(&[3, 1, 10]).to_string(), "1,3,10");
        assert_eq!(Subset::EMPTY.to_string(), "");
        assert_eq!(Subset::of(&[64]).max_element(), Some(64));
    }
}
