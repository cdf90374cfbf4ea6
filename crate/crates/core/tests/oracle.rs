//! Closed forms against an enumeration that shares no code with the library: families
//! are built from their definitions as sorted element lists.

use std::collections::HashSet;

use xsect::constructions::{construct, ConstructionName, ConstructionSpec};
use xsect::formulas::{eval, CountValue, FormulaId, Params};
use xsect::search::{brute_count, BruteKind};
use xsect::{Family, GroundSet, Subset};

fn k_sets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for e in start..=n {
            cur.push(e);
            go(e + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(1, n, k, &mut Vec::new(), &mut out);
    out
}

fn meet(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().filter(|x| b.contains(x)).copied().collect()
}

fn contains_all(a: &[usize], c: &[usize]) -> bool {
    c.iter().all(|x| a.contains(x))
}

fn distinct(f: &[Vec<usize>], g: &[Vec<usize>]) -> u64 {
    let mut seen = HashSet::new();
    for a in f {
        for b in g {
            if a != b {
                seen.insert(meet(a, b));
            }
        }
    }
    seen.len() as u64
}

fn four_stars(n: usize, k: usize, centers: &[&[usize]]) -> Vec<Vec<usize>> {
    k_sets(n, k)
        .into_iter()
        .filter(|a| centers.iter().any(|c| contains_all(a, c)))
        .collect()
}

fn count(v: u64) -> CountValue {
    CountValue::from_u64(v)
}

fn p(n: usize, k: usize) -> Params {
    Params::new().n(n as i64).k(k as i64)
}

#[test]
fn four_star_pair_by_definition() {
    for k in 2..=4 {
        for n in 6.max(2 * k)..=10 {
            let a1 = four_stars(n, k, &[&[1, 2], &[3, 4], &[1, 4, 5], &[2, 3, 6]]);
            let a2 = four_stars(n, k, &[&[1, 3], &[2, 4], &[1, 4, 6], &[2, 3, 5]]);
            let expected = eval(FormulaId::DistinctA1A2, &p(n, k)).unwrap();
            assert_eq!(count(distinct(&a1, &a2)), expected, "n={n} k={k}");
        }
    }
}

#[test]
fn frankl_families_by_definition() {
    for t in 1..=3 {
        for k in (t + 1)..=4 {
            for n in (2 * k - t + 1)..=10 {
                let core: Vec<usize> = (1..=t + 2).collect();
                let fam: Vec<Vec<usize>> = k_sets(n, k)
                    .into_iter()
                    .filter(|a| meet(a, &core).len() > t)
                    .collect();
                let expected = eval(FormulaId::DistinctFrankl, &p(n, k).t(t as i64)).unwrap();
                assert_eq!(count(distinct(&fam, &fam)), expected, "n={n} k={k} t={t}");
            }
        }
    }
}

#[test]
fn star_wedge_by_definition() {
    for k in 1..=4 {
        for n in (2 * k - 1).max(2)..=10 {
            let s1 = four_stars(n, k, &[&[1]]);
            let s2 = four_stars(n, k, &[&[2]]);
            let w = |f: &[Vec<usize>]| -> HashSet<Vec<usize>> {
                f.iter().flat_map(|a| f.iter().map(move |b| meet(a, b))).collect()
            };
            let w1 = w(&s1);
            assert_eq!(count(w1.len() as u64), eval(FormulaId::WedgeStar, &p(n, k)).unwrap());
            let union = w1.union(&w(&s2)).count() as u64;
            assert_eq!(count(union), eval(FormulaId::TwoStarWedge, &p(n, k)).unwrap());
        }
    }
}

#[test]
fn small_n_falls_outside_the_closed_forms() {
    // Below n = 2k - 1 the layer cannot realize every intersection.
    let s1 = four_stars(4, 3, &[&[1]]);
    let w: HashSet<Vec<usize>> = s1.iter().flat_map(|a| s1.iter().map(move |b| meet(a, b))).collect();
    assert!(count(w.len() as u64) < eval(FormulaId::WedgeStar, &p(4, 3)).unwrap());
}

#[test]
fn library_brute_count_examples() {
    let spec = ConstructionSpec::new(ConstructionName::FourStarFirst, 7).k(3);
    let (a1, a2) = construct(&spec).unwrap().pair().unwrap();
    assert_eq!(brute_count(BruteKind::IPair, &a1, Some(&a2)).unwrap(), count(24));
    assert_eq!(eval(FormulaId::DistinctA1A2, &p(7, 3)).unwrap(), count(24));

    let ground = GroundSet::new(4).unwrap();
    let s1 = xsect::constructions::star(ground, 2, Subset::of(&[1])).unwrap();
    assert_eq!(brute_count(BruteKind::Wedge, &s1, Some(&s1)).unwrap(), count(4));

    let single = Family::from_lists(ground, &[&[1, 2]]).unwrap();
    assert_eq!(brute_count(BruteKind::ISelf, &single, None).unwrap(), count(0));
}

#[test]
fn constructions_match_definitions() {
    let spec = ConstructionSpec::new(ConstructionName::Frankl, 8).k(3).t(1);
    let f = construct(&spec).unwrap().single().unwrap();
    let by_def = k_sets(8, 3).into_iter().filter(|a| meet(a, &[1, 2, 3]).len() >= 2).count();
    assert_eq!(f.len(), by_def);
    // C(3,2)·C(5,1) + C(3,3)·C(5,0)
    assert_eq!(by_def, 16);
}
