//! The acceptance suite: twelve end-to-end checks tying constructions, closed forms,
//! searches and invariant suites together. Each criterion reports PASS or FAIL with a
//! short detail line and its running time, and fails if it exceeds its time limit.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use crate::branching::{min_covering_level, run_branching_cross, run_branching_t, SelectionRule};
use crate::checks::{
    exhaustive_antichain_bound, exhaustive_cited_bounds, exhaustive_shade, random_saturated_pair,
    random_saturated_t_family, randomized_check, trial_rng, Property,
};
use crate::constructions::{construct, star, verify_construction, ConstructionName, ConstructionSpec};
use crate::error::Result;
use crate::family::{wedge, GroundSet, Subset};
use crate::formulas::{eval, inequality_grid, CountValue, FormulaId, Params};
use crate::search::{brute_count, isomorphic, maximize, BruteKind, Objective, SearchProblem};
use crate::transversal::{basis_pair, basis_t};

pub const DEFAULT_SEED: u64 = 0x5eed_2024;

/// Criterion ids, names and time limits.
pub const CRITERIA: [(usize, &str, u64); 12] = [
    (1, "four-star pair distinct intersections", 10),
    (2, "Frankl family distinct intersections", 10),
    (3, "two-of-three family distinct intersections", 10),
    (4, "star wedge and two-star union", 10),
    (5, "layer matching of saturated pairs", 60),
    (6, "branching conservation", 120),
    (7, "auxiliary inequality grid", 60),
    (8, "cross-Sperner maximum, even n", 300),
    (9, "cross-Sperner probe, n = 3", 300),
    (10, "shade and antichain bounds", 60),
    (11, "small-space optima", 120),
    (12, "cited bounds", 60),
];

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    /// One line, `PASS [id] name: detail (secs)`.
    pub fn line(&self) -> String {
        format!(
            "{} [{}] {}: {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }

    pub fn to_json(&self) -> Value {
        json!({
            "id": self.id,
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": self.elapsed.as_secs_f64(),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub workers: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: DEFAULT_SEED,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

/// Runs criterion `id`. Errors from the library count as failures.
pub fn run_criterion(id: usize, cfg: SuiteConfig) -> Option<Outcome> {
    let &(_, name, limit) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let result = match id {
        1 => four_star_agreement(),
        2 => frankl_agreement(),
        3 => two_of_three_agreement(),
        4 => star_wedges(),
        5 => layer_matching(cfg),
        6 => branching_conservation(cfg),
        7 => inequality_sweep(),
        8 => cross_sperner_even(cfg),
        9 => cross_sperner_odd(cfg),
        10 => shade_and_antichains(),
        11 => small_optima(cfg),
        12 => cited_bounds(cfg),
        _ => return None,
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    if elapsed > Duration::from_secs(limit) {
        passed = false;
        detail.push_str(&format!("; exceeded time limit of {limit} s"));
    }
    Some(Outcome {
        id,
        name,
        passed,
        detail,
        elapsed,
    })
}

pub fn run_all(cfg: SuiteConfig) -> Vec<Outcome> {
    CRITERIA
        .iter()
        .filter_map(|c| run_criterion(c.0, cfg))
        .collect()
}

type Verdict = Result<(bool, String)>;

fn p(n: usize, k: usize) -> Params {
    Params::new().n(n as i64).k(k as i64)
}

/// Tallies exact comparisons and remembers the first mismatch.
#[derive(Default)]
struct Agreement {
    cases: usize,
    mismatch: Option<String>,
}

impl Agreement {
    fn compare(&mut self, label: String, brute: &CountValue, formula: &CountValue) {
        self.cases += 1;
        if brute != formula && self.mismatch.is_none() {
            self.mismatch = Some(format!("{label}: enumeration {brute}, formula {formula}"));
        }
    }

    fn verdict(self) -> (bool, String) {
        match self.mismatch {
            None => (true, format!("{} cases agree", self.cases)),
            Some(m) => (false, m),
        }
    }
}

fn four_star_agreement() -> Verdict {
    let mut acc = Agreement::default();
    for k in 2..=5 {
        for n in 6.max(2 * k)..=12 {
            let spec = ConstructionSpec::new(ConstructionName::FourStarFirst, n).k(k);
            let (a1, a2) = construct(&spec)?.pair().expect("pair construction");
            let brute = brute_count(BruteKind::IPair, &a1, Some(&a2))?;
            acc.compare(format!("n={n} k={k}"), &brute, &eval(FormulaId::DistinctA1A2, &p(n, k))?);
        }
    }
    Ok(acc.verdict())
}

fn frankl_agreement() -> Verdict {
    let mut acc = Agreement::default();
    for t in 1..=3 {
        for k in (t + 1)..=5 {
            for n in (2 * k - t + 1)..=12 {
                let spec = ConstructionSpec::new(ConstructionName::Frankl, n).k(k).t(t);
                let f = construct(&spec)?.single().expect("single construction");
                let brute = brute_count(BruteKind::ISelf, &f, None)?;
                let formula = eval(FormulaId::DistinctFrankl, &p(n, k).t(t as i64))?;
                acc.compare(format!("n={n} k={k} t={t}"), &brute, &formula);
            }
        }
    }
    Ok(acc.verdict())
}

fn two_of_three_agreement() -> Verdict {
    let mut acc = Agreement::default();
    for k in 2..=4 {
        for n in 3.max(2 * k - 1)..=12 {
            let spec = ConstructionSpec::new(ConstructionName::TwoOfThree, n).k(k);
            let f = construct(&spec)?.single().expect("single construction");
            let brute = brute_count(BruteKind::ISelf, &f, None)?;
            acc.compare(format!("n={n} k={k}"), &brute, &eval(FormulaId::DistinctA3, &p(n, k))?);
        }
    }
    Ok(acc.verdict())
}

fn star_wedges() -> Verdict {
    let mut acc = Agreement::default();
    for k in 1..=5 {
        for n in (2 * k - 1).max(2)..=12 {
            let ground = GroundSet::new(n)?;
            let s1 = star(ground, k, Subset::of(&[1]))?;
            let w1 = wedge(&s1, &s1)?;
            let brute = CountValue::from_u64(w1.len() as u64);
            acc.compare(format!("wedge n={n} k={k}"), &brute, &eval(FormulaId::WedgeStar, &p(n, k))?);
            if k <= 4 {
                let s2 = star(ground, k, Subset::of(&[2]))?;
                let union: HashSet<Subset> = w1.iter().chain(wedge(&s2, &s2)?.iter()).copied().collect();
                let brute = CountValue::from_u64(union.len() as u64);
                acc.compare(format!("union n={n} k={k}"), &brute, &eval(FormulaId::TwoStarWedge, &p(n, k))?);
            }
        }
    }
    Ok(acc.verdict())
}

fn layer_matching(cfg: SuiteConfig) -> Verdict {
    let mut parts = Vec::new();
    let mut ok = true;
    for (k, n) in [(2, 8), (3, 10)] {
        let r = randomized_check(Property::LayerMatching, n, Some(k), 10_000, cfg.seed)?;
        ok &= r.passed && r.checked == 10_000;
        parts.push(match &r.counterexample {
            None => format!("k={k} n={n}: {} pairs with ν <= 4", r.checked),
            Some(c) => format!("k={k} n={n}: {c}"),
        });
        let spec = ConstructionSpec::new(ConstructionName::MatchingTight, n).k(k);
        let tight = verify_construction(&spec)?;
        ok &= tight.passed && tight.layer_matching == Some(4);
        parts.push(format!("tight pair ν = {:?}", tight.layer_matching.unwrap_or(0)));
    }
    Ok((ok, parts.join("; ")))
}

const NEEDED_INSTANCES: usize = 50;
const MAX_ATTEMPTS: u64 = 2_000;

fn branching_conservation(cfg: SuiteConfig) -> Verdict {
    let mut failure: Option<String> = None;
    let mut note = |what: String| {
        if failure.is_none() {
            failure = Some(what);
        }
    };

    // Cross-intersecting pairs: branch on whichever basis has a covering level.
    let mut pairs = 0;
    for (k, n) in [(3, 7), (3, 8)] {
        let ground = GroundSet::new(n)?;
        let mut done = 0;
        for trial in 0..MAX_ATTEMPTS {
            if done == NEEDED_INSTANCES {
                break;
            }
            let mut rng = trial_rng(cfg.seed, trial);
            let (f, g) = random_saturated_pair(ground, k, &mut rng)?;
            let (bf, bg) = basis_pair(&f, &g)?;
            let order = [(&bf, &bg), (&bg, &bf)];
            let Some((b1, b2, r)) = order
                .into_iter()
                .filter(|(b1, _)| b1.min_size().is_some_and(|s| s >= 2))
                .find_map(|(b1, b2)| min_covering_level(b1, 1).map(|r| (b1, b2, r)))
            else {
                continue;
            };
            let rep = run_branching_cross(b1, b2, k, r, SelectionRule::Deterministic)?;
            if !rep.passed() {
                note(format!("cross k={k} n={n} trial {trial}: {}", rep.to_json(false)));
            }
            done += 1;
        }
        pairs += done;
    }

    let mut singles = 0;
    for (t, k, n) in [(1, 3, 7), (2, 4, 8)] {
        let ground = GroundSet::new(n)?;
        let mut done = 0;
        for trial in 0..MAX_ATTEMPTS {
            if done == NEEDED_INSTANCES {
                break;
            }
            let mut rng = trial_rng(cfg.seed ^ 0x7, trial);
            let f = random_saturated_t_family(ground, k, t, &mut rng)?;
            let b = basis_t(&f, t)?;
            if b.min_size().is_none_or(|s| s <= t) {
                continue;
            }
            let Some(r) = min_covering_level(&b, t) else {
                continue;
            };
            let rep = run_branching_t(&b, t, k, r, SelectionRule::Deterministic)?;
            if !rep.passed() {
                note(format!("t={t} k={k} n={n} trial {trial}: {}", rep.to_json(false)));
            }
            done += 1;
        }
        singles += done;
    }

    let enough = pairs >= 2 * NEEDED_INSTANCES && singles >= 2 * NEEDED_INSTANCES;
    let ok = enough && failure.is_none();
    let detail = match failure {
        Some(f) => f,
        None if !enough => format!("only {pairs} pairs and {singles} families generated"),
        None => format!("{pairs} pairs and {singles} t-intersecting families conserve weight 1"),
    };
    Ok((ok, detail))
}

fn inequality_sweep() -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (ineq, tally) in inequality_grid(200, 20) {
        ok &= tally.failures.is_empty() && tally.checked > 0;
        parts.push(match tally.failures.first() {
            None => format!("{}: {} points", ineq.name(), tally.checked),
            Some(f) => format!("{}: fails at {}", ineq.name(), f.to_json()),
        });
    }
    Ok((ok, parts.join(", ")))
}

fn cross_sperner(n: usize, cfg: SuiteConfig) -> Result<crate::search::SearchResult> {
    maximize(
        &SearchProblem::new(Objective::MaxICrossSperner, n)
            .workers(cfg.workers)
            .seed(cfg.seed),
    )
}

fn cross_sperner_even(cfg: SuiteConfig) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [2, 4] {
        let r = cross_sperner(n, cfg)?;
        let expected = eval(FormulaId::CrossSpernerEven, &Params::new().n(n as i64))?;
        ok &= r.exhaustive && r.value == expected;
        parts.push(format!(
            "n={n}: {} (closed form {expected}, exhaustive {})",
            r.value, r.exhaustive
        ));
    }
    Ok((ok, parts.join(", ")))
}

fn cross_sperner_odd(cfg: SuiteConfig) -> Verdict {
    let r = cross_sperner(3, cfg)?;
    let conj = eval(FormulaId::CrossSpernerOddConjecture, &Params::new().n(3))?;
    let relation = if r.value == conj { "agrees" } else { "disagrees" };
    Ok((
        r.exhaustive,
        format!(
            "m(3) = {} (exhaustive {}), conjectured {conj}: {relation}",
            r.value, r.exhaustive
        ),
    ))
}

fn shade_and_antichains() -> Verdict {
    let shade = exhaustive_shade(5)?;
    let anti = exhaustive_antichain_bound(4)?;
    let mut detail = match &shade.failure {
        None => format!("{} uniform families expand", shade.families),
        Some(f) => format!("shade smaller than family for {}", crate::text::format_family(f)),
    };
    detail.push_str(&match &anti.counterexample {
        None => format!("; {} antichains of 2^[4] satisfy the bound", anti.checked),
        Some(c) => format!("; antichain bound fails for {c}"),
    });
    Ok((shade.failure.is_none() && anti.passed, detail))
}

fn small_optima(cfg: SuiteConfig) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in 4..=6 {
        let r = maximize(
            &SearchProblem::new(Objective::MaxICross, n)
                .k(2)
                .workers(cfg.workers)
                .seed(cfg.seed),
        )?;
        let expected = eval(FormulaId::DistinctA1A2, &p(n, 2))?;
        ok &= r.exhaustive && r.value == expected && r.value == CountValue::from_u64(4);
        parts.push(format!("cross n={n}: {}", r.value));
    }
    let r = maximize(
        &SearchProblem::new(Objective::MaxITIntersecting, 6)
            .k(2)
            .t(1)
            .workers(cfg.workers)
            .seed(cfg.seed),
    )?;
    let a3 = construct(&ConstructionSpec::new(ConstructionName::TwoOfThree, 6).k(2))?
        .single()
        .expect("single construction");
    let iso = isomorphic(&r.witness.families(), &[&a3])?;
    ok &= r.exhaustive && r.value == CountValue::from_u64(3) && iso;
    parts.push(format!("intersecting n=6: {} (two-of-three witness {iso})", r.value));
    Ok((ok, parts.join(", ")))
}

fn cited_bounds(cfg: SuiteConfig) -> Verdict {
    let mut ok = true;
    let mut exhaustive = 0;
    let mut first_failure = None;
    for n in 2..=7 {
        for r in exhaustive_cited_bounds(n, 2)? {
            exhaustive += r.checked;
            if !r.passed {
                ok = false;
                first_failure.get_or_insert(format!("{} at n={n}: {:?}", r.property, r.counterexample));
            }
        }
    }
    let mut random = 0;
    for prop in [
        Property::Ekr,
        Property::HiltonMilner,
        Property::CrossProduct,
        Property::MatchingBound,
    ] {
        let r = randomized_check(prop, 10, Some(3), 1_000, cfg.seed)?;
        random += r.checked;
        if !r.passed {
            ok = false;
            first_failure.get_or_insert(format!("{prop} at k=3 n=10: {:?}", r.counterexample));
        }
    }
    let detail = first_failure.unwrap_or_else(|| {
        format!("{exhaustive} exhaustive and {random} random instances within bounds")
    });
    Ok((ok, detail))
}
