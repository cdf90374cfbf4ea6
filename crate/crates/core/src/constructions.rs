//! Named extremal families and gadgets.
//!
//! External names (command line, reports): `star`, `A1`, `A2`, `A3`, `Ankt`,
//! `prop21_tight`, `antichain_52`, `cross_sperner_54`.

use std::fmt;
use std::str::FromStr;

use serde_json::{json, Value};

use crate::error::{domain, Error, Result};
use crate::family::{
    comparable_pair, disjoint_pair, distinct_intersections, is_antichain, is_cross_intersecting,
    is_cross_sperner, t_violation, Family, GroundSet, Subset,
};
use crate::transversal::matching_number;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstructionName {
    /// All `k`-sets containing a fixed set `T`.
    Star,
    /// The first family of the four-star pair; building it returns the whole pair.
    FourStarFirst,
    /// The second family of the four-star pair; building it returns the whole pair.
    FourStarSecond,
    /// `{A : |A ∩ [3]| >= 2}`.
    TwoOfThree,
    /// `{A : |A ∩ [t+2]| >= t+1}`.
    Frankl,
    /// Pair whose intersections contain four pairwise disjoint `(k-1)`-sets.
    MatchingTight,
    /// The full layer `binom([n], n - ℓ)`.
    LayerAntichain,
    /// Cross-Sperner pair built from a partition `[n] = X ∪ Y`.
    PartitionCrossSperner,
}

impl ConstructionName {
    pub const ALL: [ConstructionName; 8] = [
        ConstructionName::Star,
        ConstructionName::FourStarFirst,
        ConstructionName::FourStarSecond,
        ConstructionName::TwoOfThree,
        ConstructionName::Frankl,
        ConstructionName::MatchingTight,
        ConstructionName::LayerAntichain,
        ConstructionName::PartitionCrossSperner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstructionName::Star => "star",
            ConstructionName::FourStarFirst => "A1",
            ConstructionName::FourStarSecond => "A2",
            ConstructionName::TwoOfThree => "A3",
            ConstructionName::Frankl => "Ankt",
            ConstructionName::MatchingTight => "prop21_tight",
            ConstructionName::LayerAntichain => "antichain_52",
            ConstructionName::PartitionCrossSperner => "cross_sperner_54",
        }
    }
}

impl fmt::Display for ConstructionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstructionName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ConstructionName::ALL
            .iter()
            .copied()
            .find(|c| c.name() == s || (s == "A1/A2" && *c == ConstructionName::FourStarFirst))
            .ok_or_else(|| Error::Domain(format!("unknown construction {s:?}")))
    }
}

/// A construction request. Unused parameters are ignored; missing required ones are a
/// domain error.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionSpec {
    pub name: ConstructionName,
    pub n: usize,
    pub k: Option<usize>,
    pub t: Option<usize>,
    /// The fixed set of a star (default `{1}`).
    pub center: Option<Subset>,
    /// The `X` side of the partition (default `[⌊n/2⌋]`).
    pub x: Option<Subset>,
    pub ell: Option<usize>,
}

impl ConstructionSpec {
    pub fn new(name: ConstructionName, n: usize) -> Self {
        ConstructionSpec {
            name,
            n,
            k: None,
            t: None,
            center: None,
            x: None,
            ell: None,
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

    pub fn center(mut self, c: Subset) -> Self {
        self.center = Some(c);
        self
    }

    pub fn x(mut self, x: Subset) -> Self {
        self.x = Some(x);
        self
    }

    pub fn ell(mut self, ell: usize) -> Self {
        self.ell = Some(ell);
        self
    }

    fn need_k(&self) -> Result<usize> {
        self.k
            .ok_or_else(|| Error::Domain(format!("{} needs k", self.name)))
    }

    fn need_t(&self) -> Result<usize> {
        self.t
            .ok_or_else(|| Error::Domain(format!("{} needs t", self.name)))
    }

    pub fn params_json(&self) -> Value {
        let mut v = json!({ "name": self.name.name(), "n": self.n });
        let obj = v.as_object_mut().unwrap();
        if let Some(k) = self.k {
            obj.insert("k".into(), json!(k));
        }
        if let Some(t) = self.t {
            obj.insert("t".into(), json!(t));
        }
        if let Some(c) = self.center {
            obj.insert("T".into(), json!(c.to_string()));
        }
        if let Some(x) = self.x {
            obj.insert("X".into(), json!(x.to_string()));
        }
        if let Some(l) = self.ell {
            obj.insert("ell".into(), json!(l));
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    Single(Family),
    Pair(Family, Family),
}

impl Construction {
    pub fn families(&self) -> Vec<&Family> {
        match self {
            Construction::Single(f) => vec![f],
            Construction::Pair(f, g) => vec![f, g],
        }
    }

    pub fn single(self) -> Option<Family> {
        match self {
            Construction::Single(f) => Some(f),
            Construction::Pair(..) => None,
        }
    }

    pub fn pair(self) -> Option<(Family, Family)> {
        match self {
            Construction::Pair(f, g) => Some((f, g)),
            Construction::Single(_) => None,
        }
    }
}

/// All `k`-subsets of `[n]` containing `center`.
pub fn star(ground: GroundSet, k: usize, center: Subset) -> Result<Family> {
    if !ground.contains(center) {
        return domain(format!("star center {{{center}}} is not inside [{}]", ground.n()));
    }
    if center.len() > k || k > ground.n() {
        return domain(format!("star needs |T| <= k <= n, got |T|={}, k={k}", center.len()));
    }
    let rest = ground.full().difference(center);
    let members = crate::bits::KSubsets::new(rest.len(), k - center.len()).map(|m| {
        let mut bits = center.bits();
        for (j, e) in rest.elements().enumerate() {
            if m >> j & 1 == 1 {
                bits |= 1 << (e - 1);
            }
        }
        Subset::from_bits(bits)
    });
    Family::uniform(ground, k, members)
}

fn union_of_stars(ground: GroundSet, k: usize, centers: &[&[usize]]) -> Result<Family> {
    let mut out = Family::empty(ground).with_uniformity(k)?;
    for c in centers {
        let c = Subset::of(c);
        if c.len() <= k {
            out = out.union(&star(ground, k, c)?)?;
        }
    }
    Ok(out)
}

/// `{A ∈ binom([n], k) : |A ∩ [m]| >= threshold}`.
fn threshold_family(ground: GroundSet, k: usize, m: usize, threshold: usize) -> Result<Family> {
    let prefix = Subset::prefix(m);
    Family::uniform(
        ground,
        k,
        ground.k_subsets(k).filter(|a| a.common(prefix) >= threshold),
    )
}

fn four_star_pair(n: usize, k: usize) -> Result<(Family, Family)> {
    if k < 2 || k > n || !(n >= 6 || (k == 2 && n >= 4)) {
        return domain(format!(
            "A1/A2 need k >= 2, k <= n and n >= 6 (n >= 4 allowed for k = 2), got n={n}, k={k}"
        ));
    }
    let ground = GroundSet::new(n)?;
    let a1 = union_of_stars(ground, k, &[&[1, 2], &[3, 4], &[1, 4, 5], &[2, 3, 6]])?;
    let a2 = union_of_stars(ground, k, &[&[1, 3], &[2, 4], &[1, 4, 6], &[2, 3, 5]])?;
    Ok((a1, a2))
}

fn matching_tight_pair(n: usize, k: usize) -> Result<(Family, Family)> {
    if k < 2 || n < 4 || n < 4 * (k - 1) {
        return domain(format!(
            "prop21_tight needs k >= 2 and n >= max(4, 4(k-1)), got n={n}, k={k}"
        ));
    }
    let ground = GroundSet::new(n)?;
    let blocks: Vec<Subset> = (0..4)
        .map(|i| Subset::prefix((i + 1) * (k - 1)).difference(Subset::prefix(i * (k - 1))))
        .collect();
    let d: Vec<usize> = blocks.iter().map(|b| b.elements().next().unwrap()).collect();
    let xs = [d[2], d[2], d[1], d[0]];
    let ys = [d[1], d[0], d[0], d[2]];
    let f = (0..4).map(|i| blocks[i].with(xs[i]));
    let g = (0..4).map(|i| blocks[i].with(ys[i]));
    Ok((
        Family::uniform(ground, k, f)?,
        Family::uniform(ground, k, g)?,
    ))
}

fn partition_pair(n: usize, x: Subset) -> Result<(Family, Family)> {
    let ground = GroundSet::new(n)?;
    if !ground.contains(x) || x.is_empty() || x == ground.full() {
        return domain("cross_sperner_54 needs X to be a nonempty proper subset of [n]");
    }
    let y = ground.full().difference(x);
    // Proper subsets of a mask, as sub-masks excluding the mask itself.
    let proper = |m: Subset| {
        let bits = m.bits();
        let mut out = Vec::new();
        let mut s = bits;
        loop {
            s = s.wrapping_sub(1) & bits;
            out.push(Subset::from_bits(s));
            if s == 0 {
                break;
            }
        }
        out
    };
    let a = Family::new(ground, proper(x).into_iter().map(|s| s.union(y)))?;
    let b = Family::new(ground, proper(y).into_iter().map(|s| s.union(x)))?;
    Ok((a, b))
}

/// Builds the named construction.
pub fn construct(spec: &ConstructionSpec) -> Result<Construction> {
    let n = spec.n;
    let ground = GroundSet::new(n)?;
    match spec.name {
        ConstructionName::Star => {
            let center = spec.center.unwrap_or(Subset::of(&[1]));
            Ok(Construction::Single(star(ground, spec.need_k()?, center)?))
        }
        ConstructionName::FourStarFirst | ConstructionName::FourStarSecond => {
            let (a, b) = four_star_pair(n, spec.need_k()?)?;
            Ok(Construction::Pair(a, b))
        }
        ConstructionName::TwoOfThree => {
            let k = spec.need_k()?;
            if k < 2 || n < 3 || k > n {
                return domain(format!("A3 needs k >= 2, n >= 3, k <= n, got n={n}, k={k}"));
            }
            Ok(Construction::Single(threshold_family(ground, k, 3, 2)?))
        }
        ConstructionName::Frankl => {
            let (k, t) = (spec.need_k()?, spec.need_t()?);
            if t < 1 || k < t + 1 || n < t + 2 || k > n {
                return domain(format!(
                    "Ankt needs t >= 1, k >= t+1, n >= t+2, k <= n, got n={n}, k={k}, t={t}"
                ));
            }
            Ok(Construction::Single(threshold_family(ground, k, t + 2, t + 1)?))
        }
        ConstructionName::MatchingTight => {
            let (f, g) = matching_tight_pair(n, spec.need_k()?)?;
            Ok(Construction::Pair(f, g))
        }
        ConstructionName::LayerAntichain => {
            let ell = spec.ell.unwrap_or(n / 3);
            if 2 * ell > n {
                return domain(format!("antichain_52 needs ell <= n/2, got ell={ell}"));
            }
            Ok(Construction::Single(ground.layer(n - ell)))
        }
        ConstructionName::PartitionCrossSperner => {
            let x = spec.x.unwrap_or(Subset::prefix(n / 2));
            let (a, b) = partition_pair(n, x)?;
            Ok(Construction::Pair(a, b))
        }
    }
}

/// Result of checking a construction against the property it is advertised to have.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionReport {
    pub name: ConstructionName,
    pub check: &'static str,
    pub passed: bool,
    /// Offending members, when the check fails.
    pub witness: Option<(Subset, Subset)>,
    pub sizes: Vec<usize>,
    /// `|I(F,G)|` for pairs, `|I(F)|` for single families.
    pub distinct_intersections: usize,
    /// Matching number of the `(k-1)`-layer of `I(F,G)`, for the matching-tight pair.
    pub layer_matching: Option<usize>,
}

impl ConstructionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name.name(),
            "check": self.check,
            "passed": self.passed,
            "witness": self.witness.map(|(a, b)| vec![a.to_string(), b.to_string()]),
            "sizes": self.sizes,
            "distinct_intersections": self.distinct_intersections,
            "layer_matching": self.layer_matching,
        })
    }
}

/// Builds `spec` and runs its advertised predicate.
pub fn verify_construction(spec: &ConstructionSpec) -> Result<ConstructionReport> {
    let built = construct(spec)?;
    let sizes = built.families().iter().map(|f| f.len()).collect();
    let (check, witness, inter, layer_matching) = match (&built, spec.name) {
        (Construction::Pair(f, g), ConstructionName::PartitionCrossSperner) => {
            let bad = f
                .iter()
                .flat_map(|&a| g.iter().map(move |&b| (a, b)))
                .find(|(a, b)| a.comparable(*b));
            debug_assert_eq!(bad.is_none(), is_cross_sperner(f, g)?);
            ("cross_sperner", bad, distinct_intersections(f, g)?.len(), None)
        }
        (Construction::Pair(f, g), name) => {
            debug_assert!(is_cross_intersecting(f, g).is_ok());
            let i = distinct_intersections(f, g)?;
            let nu = (name == ConstructionName::MatchingTight)
                .then(|| matching_number(&i.level(spec.k.unwrap_or(1) - 1)));
            ("cross_intersecting", disjoint_pair(f, g), i.len(), nu)
        }
        (Construction::Single(f), ConstructionName::LayerAntichain) => {
            debug_assert_eq!(comparable_pair(f).is_none(), is_antichain(f));
            ("antichain", comparable_pair(f), distinct_intersections(f, f)?.len(), None)
        }
        (Construction::Single(f), name) => {
            let t = match name {
                ConstructionName::Star => spec.center.map_or(1, |c| c.len()),
                ConstructionName::TwoOfThree => 1,
                _ => spec.t.unwrap_or(1),
            };
            let check = if t == 1 { "intersecting" } else { "t_intersecting" };
            (check, t_violation(f, t), distinct_intersections(f, f)?.len(), None)
        }
    };
    Ok(ConstructionReport {
        name: spec.name,
        check,
        passed: witness.is_none(),
        witness,
        sizes,
        distinct_intersections: inter,
        layer_matching,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(n: usize, lists: &[&[usize]]) -> Family {
        Family::from_lists(GroundSet::new(n).unwrap(), lists).unwrap()
    }

    #[test]
    fn four_star_pair_at_k2() {
        for n in 4..9 {
            let spec = ConstructionSpec::new(ConstructionName::FourStarFirst, n).k(2);
            let (a, b) = construct(&spec).unwrap().pair().unwrap();
            assert_eq!(a, fam(n, &[&[1, 2], &[3, 4]]));
            assert_eq!(b, fam(n, &[&[1, 3], &[2, 4]]));
        }
        let spec = ConstructionSpec::new(ConstructionName::FourStarFirst, 5).k(3);
        assert!(construct(&spec).is_err());
    }

    #[test]
    fn frankl_and_triangle() {
        let spec = ConstructionSpec::new(ConstructionName::Frankl, 5).k(2).t(1);
        let f = construct(&spec).unwrap().single().unwrap();
        assert_eq!(f, fam(5, &[&[1, 2], &[1, 3], &[2, 3]]));
        let spec = ConstructionSpec::new(ConstructionName::TwoOfThree, 5).k(2);
        assert_eq!(construct(&spec).unwrap().single().unwrap(), f);
        assert!(construct(&ConstructionSpec::new(ConstructionName::Frankl, 3).k(2).t(2)).is_err());
    }

    #[test]
    fn stars() {
        let spec = ConstructionSpec::new(ConstructionName::Star, 4).k(2);
        let f = construct(&spec).unwrap().single().unwrap();
        assert_eq!(f, fam(4, &[&[1, 2], &[1, 3], &[1, 4]]));
        let g = star(GroundSet::new(6).unwrap(), 3, Subset::of(&[2, 5])).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.iter().all(|s| s.contains(2) && s.contains(5) && s.len() == 3));
        assert!(star(GroundSet::new(4).unwrap(), 1, Subset::of(&[1, 2])).is_err());
    }

    #[test]
    fn matching_tight_k2() {
        let spec = ConstructionSpec::new(ConstructionName::MatchingTight, 4).k(2);
        let (f, g) = construct(&spec).unwrap().pair().unwrap();
        assert_eq!(f, fam(4, &[&[1, 3], &[2, 3], &[1, 4]]));
        assert_eq!(g, fam(4, &[&[1, 2], &[1, 3], &[3, 4]]));
        let r = verify_construction(&spec).unwrap();
        assert!(r.passed);
        assert_eq!(r.layer_matching, Some(4));
    }

    #[test]
    fn matching_tight_general() {
        for k in 2..6 {
            let n = 4 * (k - 1) + 1;
            let spec = ConstructionSpec::new(ConstructionName::MatchingTight, n).k(k);
            let r = verify_construction(&spec).unwrap();
            assert!(r.passed, "k={k}");
            assert_eq!(r.layer_matching, Some(4), "k={k}");
            if k >= 3 {
                assert_eq!(r.sizes, vec![4, 4]);
            }
        }
        assert!(construct(&ConstructionSpec::new(ConstructionName::MatchingTight, 7).k(3)).is_err());
    }

    #[test]
    fn verify_examples() {
        let r = verify_construction(&ConstructionSpec::new(ConstructionName::FourStarFirst, 10).k(3))
            .unwrap();
        assert!(r.passed);
        let r = verify_construction(&ConstructionSpec::new(ConstructionName::Frankl, 10).k(4).t(2))
            .unwrap();
        assert!(r.passed);
        assert_eq!(r.check, "t_intersecting");
        let spec = ConstructionSpec::new(ConstructionName::PartitionCrossSperner, 4)
            .x(Subset::of(&[1, 2]));
        let r = verify_construction(&spec).unwrap();
        assert!(r.passed);
        assert_eq!(r.distinct_intersections, 9);
        assert_eq!(r.sizes, vec![3, 3]);
        let r = verify_construction(&ConstructionSpec::new(ConstructionName::LayerAntichain, 6))
            .unwrap();
        assert!(r.passed);
        assert_eq!(r.distinct_intersections, 35);
    }

    #[test]
    fn partition_pair_shape() {
        let spec = ConstructionSpec::new(ConstructionName::PartitionCrossSperner, 3);
        let (a, b) = construct(&spec).unwrap().pair().unwrap();
        assert_eq!(a, fam(3, &[&[2, 3]]));
        assert_eq!(b, fam(3, &[&[1], &[1, 2], &[1, 3]]));
        let bad = ConstructionSpec::new(ConstructionName::PartitionCrossSperner, 3).x(Subset::prefix(3));
        assert!(construct(&bad).is_err());
    }

    #[test]
    fn names_round_trip() {
        for c in ConstructionName::ALL {
            assert_eq!(c.name().parse::<ConstructionName>().unwrap(), c);
        }
    }
}
