//! Invariants checked on random instances.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use xsect::branching::{min_covering_level, run_branching_t, SelectionRule};
use xsect::checks::{random_saturated_pair, random_saturated_t_family, trial_rng};
use xsect::family::distinct_intersections;
use xsect::search::{canonical_form, maximize, Objective, SearchProblem, Witness};
use xsect::transversal::{basis_t, is_saturated_pair};
use xsect::{Family, GroundSet, Subset};

fn layer(n: usize, k: usize) -> Vec<Subset> {
    GroundSet::new(n).unwrap().k_subsets(k).collect()
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut perm: Vec<usize> = (1..=n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    perm
}

fn pair_value(f: &Family, g: &Family) -> usize {
    distinct_intersections(f, g).unwrap().len()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // Enlarging G to every k-set that meets all of F never loses an intersection.
    #[test]
    fn maximal_partner_dominates(n in 4usize..=7, k in 2usize..=3, pick in any::<u64>(), sub in any::<u64>()) {
        prop_assume!(2 * k <= n + 1);
        let ground = GroundSet::new(n).unwrap();
        let all = layer(n, k);
        let f: Vec<Subset> = all.iter().enumerate()
            .filter(|(i, _)| pick >> (i % 64) & 1 == 1).map(|(_, s)| *s).take(5).collect();
        prop_assume!(!f.is_empty());
        let g_star: Vec<Subset> = all.iter().copied().filter(|a| f.iter().all(|b| a.meets(*b))).collect();
        let g: Vec<Subset> = g_star.iter().enumerate()
            .filter(|(i, _)| sub >> (i % 64) & 1 == 1).map(|(_, s)| *s).collect();
        let f = Family::uniform(ground, k, f).unwrap();
        let g = Family::uniform(ground, k, g).unwrap();
        let g_star = Family::uniform(ground, k, g_star).unwrap();
        let small = distinct_intersections(&f, &g).unwrap();
        let big = distinct_intersections(&f, &g_star).unwrap();
        prop_assert!(small.is_subfamily_of(&big));
    }

    #[test]
    fn optimum_survives_relabeling(n in 4usize..=6, seed in any::<u64>()) {
        let r = maximize(&SearchProblem::new(Objective::MaxICross, n).k(2)).unwrap();
        let Witness::Pair(f, g) = &r.witness else { panic!("pair witness expected") };
        let perm = permutation(n, seed);
        let (pf, pg) = (f.relabel(&perm).unwrap(), g.relabel(&perm).unwrap());
        prop_assert_eq!(pair_value(&pf, &pg), pair_value(f, g));
        prop_assert_eq!(canonical_form(&[&pf, &pg]), canonical_form(&[f, g]));
        let reduced = maximize(&SearchProblem::new(Objective::MaxICross, n).k(2).symmetry_reduction(true)).unwrap();
        prop_assert_eq!(reduced.value, r.value);
    }

    #[test]
    fn randomized_search_is_deterministic(n in 5usize..=7, seed in any::<u64>()) {
        let problem = SearchProblem::new(Objective::MaxICross, n).k(2).seed(seed).budget(40).randomized();
        let a = maximize(&problem).unwrap();
        let b = maximize(&problem.clone().workers(3)).unwrap();
        prop_assert_eq!(a.to_json(), b.to_json());
    }

    #[test]
    fn random_pairs_are_saturated(n in 4usize..=8, k in 2usize..=3, seed in any::<u64>()) {
        prop_assume!(2 * k <= n);
        let ground = GroundSet::new(n).unwrap();
        let (f, g) = random_saturated_pair(ground, k, &mut trial_rng(seed, 0)).unwrap();
        prop_assert!(is_saturated_pair(&f, &g).unwrap());
    }

    // Conservation and coverage hold whichever uncovered member is branched on.
    #[test]
    fn branching_ignores_selection_order(seed in any::<u64>(), rule_seed in any::<u64>(), t in 1usize..=2) {
        let (k, n) = if t == 1 { (3, 7) } else { (4, 8) };
        let ground = GroundSet::new(n).unwrap();
        let f = random_saturated_t_family(ground, k, t, &mut trial_rng(seed, 0)).unwrap();
        let b = basis_t(&f, t).unwrap();
        prop_assume!(b.min_size().is_some_and(|s| s > t));
        let Some(r) = min_covering_level(&b, t) else { return Ok(()) };
        let det = run_branching_t(&b, t, k, r, SelectionRule::Deterministic).unwrap();
        let rnd = run_branching_t(&b, t, k, r, SelectionRule::Random(rule_seed)).unwrap();
        prop_assert!(det.passed());
        prop_assert!(rnd.passed());
        prop_assert_eq!(det.lambda, rnd.lambda);
    }
}

#[test]
fn worker_count_does_not_change_exhaustive_result() {
    for obj in [Objective::MaxICross, Objective::MaxWedgeCross] {
        let one = maximize(&SearchProblem::new(obj, 5).k(2)).unwrap();
        for w in [2, 3, 8] {
            let many = maximize(&SearchProblem::new(obj, 5).k(2).workers(w)).unwrap();
            assert_eq!(one.to_json(), many.to_json(), "{obj:?} with {w} workers");
        }
    }
}
