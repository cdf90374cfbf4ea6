//! Exact evaluation of the closed-form counts and bounds, and of the auxiliary
//! binomial inequalities, in arbitrary precision.
//!
//! Every sum `Σ_{0<=i<=j}` with `j < 0` is empty and evaluates to 0, and `C(m, i)` is 0
//! whenever `m < 0`, `i < 0` or `i > m`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde_json::{Map, Value};

use crate::error::{domain, Error, Result};

/// An exact nonnegative count.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CountValue(pub BigUint);

impl CountValue {
    pub fn from_u64(v: u64) -> Self {
        CountValue(BigUint::from(v))
    }

    pub fn as_big(&self) -> &BigUint {
        &self.0
    }

    /// The value as `u64`, if it fits.
    pub fn to_u64(&self) -> Option<u64> {
        u64::try_from(&self.0).ok()
    }
}

impl From<usize> for CountValue {
    fn from(v: usize) -> Self {
        CountValue(BigUint::from(v))
    }
}

impl From<u64> for CountValue {
    fn from(v: u64) -> Self {
        CountValue(BigUint::from(v))
    }
}

impl fmt::Display for CountValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// `C(m, i)`, zero outside `0 <= i <= m`.
pub fn binom(m: i64, i: i64) -> BigUint {
    if m < 0 || i < 0 || i > m {
        return BigUint::zero();
    }
    let i = i.min(m - i) as u64;
    let m = m as u64;
    let mut acc = BigUint::one();
    for j in 0..i {
        acc *= m - j;
        acc /= j + 1;
    }
    acc
}

/// `Σ_{0<=i<=j} C(m, i)`.
pub fn partial_sum(m: i64, j: i64) -> BigUint {
    if j < 0 || m < 0 {
        return BigUint::zero();
    }
    let mut acc = BigUint::zero();
    let mut term = BigUint::one();
    for i in 0..=j.min(m) {
        if i > 0 {
            term = term * (m - i + 1) as u64 / i as u64;
        }
        acc += &term;
    }
    acc
}

fn pow2(e: i64) -> BigUint {
    BigUint::one() << (e as u64)
}

fn pow(base: i64, e: i64) -> BigUint {
    BigUint::from(base as u64).pow(e as u32)
}

fn big(v: i64) -> BigUint {
    BigUint::from(v as u64)
}

/// Named parameters shared by formulas and inequalities.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Params {
    pub n: Option<i64>,
    pub k: Option<i64>,
    pub t: Option<i64>,
    pub ell: Option<i64>,
    pub m: Option<i64>,
    pub p: Option<i64>,
    pub x: Option<i64>,
}

macro_rules! setter {
    ($name:ident) => {
        pub fn $name(mut self, v: i64) -> Self {
            self.$name = Some(v);
            self
        }
    };
}

impl Params {
    pub fn new() -> Self {
        Self::default()
    }

    setter!(n);
    setter!(k);
    setter!(t);
    setter!(ell);
    setter!(m);
    setter!(p);
    setter!(x);

    /// Sets a parameter by name (`n`, `k`, `t`, `ell`/`l`, `m`, `p`, `x`).
    pub fn set(&mut self, key: &str, v: i64) -> Result<()> {
        let slot = match key {
            "n" => &mut self.n,
            "k" => &mut self.k,
            "t" => &mut self.t,
            "ell" | "l" => &mut self.ell,
            "m" | "nu" => &mut self.m,
            "p" => &mut self.p,
            "x" => &mut self.x,
            other => return domain(format!("unknown parameter {other:?}")),
        };
        *slot = Some(v);
        Ok(())
    }

    fn get(v: Option<i64>, name: &str) -> Result<i64> {
        v.ok_or_else(|| Error::Domain(format!("missing parameter {name}")))
    }

    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (key, v) in [
            ("n", self.n),
            ("k", self.k),
            ("t", self.t),
            ("ell", self.ell),
            ("m", self.m),
            ("p", self.p),
            ("x", self.x),
        ] {
            if let Some(v) = v {
                map.insert(key.into(), Value::from(v));
            }
        }
        Value::Object(map)
    }
}

/// Identifiers of the closed forms. The string names are the external identifiers used
/// by the command line and in reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormulaId {
    Binom,
    PartialSum,
    /// Intersections of the full star with itself.
    WedgeStar,
    /// Distinct intersections of the four-star pair.
    DistinctA1A2,
    /// Distinct intersections of `A(n,k,t)`.
    DistinctFrankl,
    /// Distinct intersections of `A₃ = {|A ∩ [3]| >= 2}`.
    DistinctA3,
    /// Union of the wedges of two full stars.
    TwoStarWedge,
    /// Bound for a `k`-uniform and a `(k-1)`-uniform cross-intersecting pair.
    MixedUniformBound,
    /// Bound when one side of the pair is a star.
    StarSideBound,
    Ekr,
    HiltonMilner,
    CrossProduct,
    MatchingBound,
    /// Distinct intersections of the `[t]`-star.
    DistinctStarT,
    /// Level weight function for the cross-intersecting branching argument.
    FCross,
    /// Level weight function for the `t`-intersecting branching argument.
    FT,
    /// Cross-Sperner maximum for even `n`.
    CrossSpernerEven,
    /// Distinct intersections of the layer `binom([n], n - ℓ)`.
    LayerAntichain,
    /// Conjectured cross-Sperner maximum for odd `n`.
    CrossSpernerOddConjecture,
    /// Intersections of the partition-based cross-Sperner pair.
    CrossSpernerPartition,
}

impl FormulaId {
    pub const ALL: [FormulaId; 20] = [
        FormulaId::Binom,
        FormulaId::PartialSum,
        FormulaId::WedgeStar,
        FormulaId::DistinctA1A2,
        FormulaId::DistinctFrankl,
        FormulaId::DistinctA3,
        FormulaId::TwoStarWedge,
        FormulaId::MixedUniformBound,
        FormulaId::StarSideBound,
        FormulaId::Ekr,
        FormulaId::HiltonMilner,
        FormulaId::CrossProduct,
        FormulaId::MatchingBound,
        FormulaId::DistinctStarT,
        FormulaId::FCross,
        FormulaId::FT,
        FormulaId::CrossSpernerEven,
        FormulaId::LayerAntichain,
        FormulaId::CrossSpernerOddConjecture,
        FormulaId::CrossSpernerPartition,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FormulaId::Binom => "binom",
            FormulaId::PartialSum => "partial_sum",
            FormulaId::WedgeStar => "wedge_star_13",
            FormulaId::DistinctA1A2 => "I_A1A2_15",
            FormulaId::DistinctFrankl => "I_Ankt_17",
            FormulaId::DistinctA3 => "I_A3_case31",
            FormulaId::TwoStarWedge => "lemma22_rhs",
            FormulaId::MixedUniformBound => "lemma33_rhs",
            FormulaId::StarSideBound => "cor34_rhs",
            FormulaId::Ekr => "ekr_bound",
            FormulaId::HiltonMilner => "hm_bound",
            FormulaId::CrossProduct => "pyber_bound",
            FormulaId::MatchingBound => "emc_bound",
            FormulaId::DistinctStarT => "I_star_t",
            FormulaId::FCross => "f_cross",
            FormulaId::FT => "f_t",
            FormulaId::CrossSpernerEven => "m_even_55",
            FormulaId::LayerAntichain => "example52",
            FormulaId::CrossSpernerOddConjecture => "m_odd_conjecture",
            FormulaId::CrossSpernerPartition => "cross_sperner_54",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FormulaId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(id) = FormulaId::ALL.iter().find(|id| id.name() == s) {
            return Ok(*id);
        }
        let alias = match s {
            "wedge_star" => FormulaId::WedgeStar,
            "I_A1A2" => FormulaId::DistinctA1A2,
            "I_Ankt" => FormulaId::DistinctFrankl,
            "I_A3" => FormulaId::DistinctA3,
            "lemma22" => FormulaId::TwoStarWedge,
            "lemma33" => FormulaId::MixedUniformBound,
            "cor34" => FormulaId::StarSideBound,
            "ekr" => FormulaId::Ekr,
            "hm" => FormulaId::HiltonMilner,
            "pyber" => FormulaId::CrossProduct,
            "emc" => FormulaId::MatchingBound,
            "m_even" => FormulaId::CrossSpernerEven,
            "m_odd" => FormulaId::CrossSpernerOddConjecture,
            _ => return domain(format!("unknown formula id {s:?}")),
        };
        Ok(alias)
    }
}

fn need_range(cond: bool, what: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        domain(format!("parameters out of range: {what}"))
    }
}

/// Evaluates a closed form exactly.
pub fn eval(id: FormulaId, params: &Params) -> Result<CountValue> {
    let n = || Params::get(params.n, "n");
    let k = || Params::get(params.k, "k");
    let t = || Params::get(params.t, "t");
    let ell = || Params::get(params.ell, "ell");
    let ps = partial_sum;
    let value = match id {
        FormulaId::Binom => {
            let (n, k) = (n()?, k()?);
            need_range(n >= 0 && k >= 0, "n >= 0, k >= 0")?;
            binom(n, k)
        }
        FormulaId::PartialSum => {
            let (n, k) = (n()?, k()?);
            need_range(n >= 0, "n >= 0")?;
            ps(n, k)
        }
        FormulaId::WedgeStar => {
            let (n, k) = (n()?, k()?);
            need_range(1 <= k && k <= n, "1 <= k <= n")?;
            ps(n - 1, k - 1)
        }
        FormulaId::DistinctA1A2 => {
            let (n, k) = (n()?, k()?);
            need_range(
                k >= 2 && k <= n && (n >= 6 || (k == 2 && n >= 4)),
                "k >= 2, k <= n and n >= 6 (n >= 4 when k = 2)",
            )?;
            let m = n - 4;
            BigUint::from(4u32) * ps(m, k - 2)
                + BigUint::from(6u32) * ps(m, k - 3)
                + BigUint::from(4u32) * ps(m, k - 4)
                + ps(m, k - 5)
                + BigUint::from(2u32) * ps(n - 6, k - 3)
                + ps(n - 6, k - 4)
        }
        FormulaId::DistinctFrankl => {
            let (n, k, t) = (n()?, k()?, t()?);
            need_range(t >= 1 && k > t && n >= t + 2 && n >= k, "t >= 1, k > t, n >= max(t+2, k)")?;
            let m = n - t - 2;
            binom(t + 2, t) * ps(m, k - t - 1) + binom(t + 2, t + 1) * ps(m, k - t - 2)
                + ps(m, k - t - 3)
        }
        FormulaId::DistinctA3 => {
            let (n, k) = (n()?, k()?);
            need_range(k >= 2 && n >= 3 && n >= k, "k >= 2, n >= max(3, k)")?;
            let m = n - 3;
            BigUint::from(3u32) * ps(m, k - 2) + BigUint::from(3u32) * ps(m, k - 3) + ps(m, k - 4)
        }
        FormulaId::TwoStarWedge => {
            let (n, k) = (n()?, k()?);
            need_range(k >= 1 && n >= 2 && k <= n, "1 <= k <= n, n >= 2")?;
            BigUint::from(2u32) * ps(n - 2, k - 1) + ps(n - 2, k - 2)
        }
        FormulaId::MixedUniformBound => {
            let (n, k) = (n()?, k()?);
            need_range(k >= 1 && n >= k, "1 <= k <= n")?;
            BigUint::from(2u32) * binom(n - 1, k - 2)
                + big(2 * k + 1) * binom(n - 1, k - 3)
                + ps(n, k - 3)
        }
        FormulaId::StarSideBound => {
            let (n, k) = (n()?, k()?);
            need_range(k >= 1 && n >= 2 && n >= k, "1 <= k <= n, n >= 2")?;
            BigUint::from(2u32) * ps(n - 1, k - 2)
                + binom(n - 2, k - 2)
                + big(2 * k + 1) * binom(n - 2, k - 3)
        }
        FormulaId::Ekr => {
            let (n, k) = (n()?, k()?);
            need_range(1 <= k && k <= n, "1 <= k <= n")?;
            binom(n - 1, k - 1)
        }
        FormulaId::HiltonMilner => {
            let (n, k) = (n()?, k()?);
            need_range(1 <= k && k <= n, "1 <= k <= n")?;
            binom(n - 1, k - 1) + BigUint::one() - binom(n - k - 1, k - 1)
        }
        FormulaId::CrossProduct => {
            let (n, k) = (n()?, k()?);
            need_range(1 <= k && k <= n, "1 <= k <= n")?;
            let e = binom(n - 1, k - 1);
            &e * &e
        }
        FormulaId::MatchingBound => {
            let (n, k, m) = (n()?, k()?, Params::get(params.m, "m")?);
            need_range(1 <= k && k <= n && m >= 0, "1 <= k <= n, m >= 0")?;
            big(m) * binom(n - 1, k - 1)
        }
        FormulaId::DistinctStarT => {
            let (n, k, t) = (n()?, k()?, t()?);
            need_range(1 <= t && t <= k && k <= n, "1 <= t <= k <= n")?;
            ps(n - t, k - t - 1)
        }
        FormulaId::FCross => {
            let (n, k, l) = (n()?, k()?, ell()?);
            need_range(2 <= l && l <= k && k <= n, "2 <= ell <= k <= n")?;
            pow2(l) * big(l * l) * pow(k, l - 2) * ps(n - 1, k - l)
        }
        FormulaId::FT => {
            let (n, k, t, l) = (n()?, k()?, t()?, ell()?);
            need_range(1 <= t && t < l && l <= k && k <= n, "1 <= t < ell <= k <= n")?;
            let upper: BigUint = (t..=l).map(|j| binom(l, j)).sum();
            upper * binom(l, t) * big(l) * pow(k, l - t - 1) * ps(n - t, k - l)
        }
        FormulaId::CrossSpernerEven => {
            let n = n()?;
            need_range(n >= 2 && n % 2 == 0 && n <= 4096, "n even, 2 <= n <= 4096")?;
            pow2(n) + BigUint::one() - (pow2(n / 2) << 1u32)
        }
        FormulaId::LayerAntichain => {
            let n = n()?;
            let l = params.ell.unwrap_or(n / 3);
            need_range(n >= 1 && l >= 0 && 2 * l <= n && n <= 4096, "n >= 1, 0 <= 2*ell <= n")?;
            pow2(n) - ps(n, l) - ps(n, n - 2 * l - 1)
        }
        FormulaId::CrossSpernerOddConjecture => {
            let n = n()?;
            need_range(n >= 1 && n % 2 == 1 && n <= 4096, "n odd, 1 <= n <= 4096")?;
            let d = n / 2;
            pow2(n) + BigUint::one() - pow2(d + 1) - pow2(d)
        }
        FormulaId::CrossSpernerPartition => {
            let n = n()?;
            let x = Params::get(params.x, "x")?;
            need_range(1 <= x && x < n && n <= 4096, "1 <= x < n")?;
            pow2(n) + BigUint::one() - pow2(x) - pow2(n - x)
        }
    };
    Ok(CountValue(value))
}

/// The four auxiliary binomial inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Inequality {
    /// `C(n,k) <= (n-p)/(n-p(k+1)) · C(n-p,k)`.
    BinomialShrink,
    /// `Σ_{i<=k-ℓ} C(n-t,i) <= (n-t-p)/(n-t-pk) · Σ_{i<=k-ℓ} C(n-t-p,i)`.
    PartialSumShrink,
    /// `Σ_{i<=k-ℓ-1} C(n-t,i) <= k/(n-t-k) · Σ_{i<=k-ℓ} C(n-t,i)`.
    PartialSumRatio,
    /// `Σ_{t<=j<=ℓ} C(ℓ,j) >= 1/(2t+2) · Σ_{t<=j<=ℓ+1} C(ℓ+1,j)` for `ℓ >= t+1`.
    UpperTailRatio,
}

impl Inequality {
    pub const ALL: [Inequality; 4] = [
        Inequality::BinomialShrink,
        Inequality::PartialSumShrink,
        Inequality::PartialSumRatio,
        Inequality::UpperTailRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Inequality::BinomialShrink => "ineq_1_7",
            Inequality::PartialSumShrink => "ineq_1_8",
            Inequality::PartialSumRatio => "ineq_1_9",
            Inequality::UpperTailRatio => "ineq_1_10",
        }
    }
}

impl FromStr for Inequality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Inequality::ALL
            .iter()
            .copied()
            .find(|i| i.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown inequality id {s:?}")))
    }
}

fn upper_tail(l: i64, t: i64) -> BigUint {
    (t..=l).map(|j| binom(l, j)).sum()
}

/// Shared parameter constraints: all given values positive, `k > ℓ`, `k > t`, `n > 2k + p`.
fn check_constraints(ineq: Inequality, params: &Params) -> Result<()> {
    for (name, v) in [
        ("n", params.n),
        ("k", params.k),
        ("t", params.t),
        ("ell", params.ell),
        ("p", params.p),
    ] {
        if let Some(v) = v {
            need_range(v >= 1, &format!("{name} must be positive"))?;
        }
    }
    if let (Some(k), Some(l)) = (params.k, params.ell) {
        need_range(k > l, "k > ell")?;
    }
    if let (Some(k), Some(t)) = (params.k, params.t) {
        need_range(k > t, "k > t")?;
    }
    if let (Some(n), Some(k)) = (params.n, params.k) {
        let p = params.p.unwrap_or(1);
        need_range(n > 2 * k + p, "n > 2k + p")?;
    }
    if ineq == Inequality::UpperTailRatio {
        need_range(Params::get(params.ell, "ell")? > Params::get(params.t, "t")?, "ell >= t + 1")?;
    }
    Ok(())
}

/// Decides one inequality exactly by cross-multiplying. A non-positive denominator on
/// the right-hand side is reported as a domain error since the fraction is then not a
/// positive factor.
pub fn check_inequality(ineq: Inequality, params: &Params) -> Result<bool> {
    check_constraints(ineq, params)?;
    let n = || Params::get(params.n, "n");
    let k = || Params::get(params.k, "k");
    let t = || Params::get(params.t, "t");
    let l = || Params::get(params.ell, "ell");
    let p = || Params::get(params.p, "p");
    match ineq {
        Inequality::BinomialShrink => {
            let (n, k, p) = (n()?, k()?, p()?);
            let den = n - p * (k + 1);
            need_range(den > 0, "n - p(k+1) > 0")?;
            Ok(binom(n, k) * big(den) <= big(n - p) * binom(n - p, k))
        }
        Inequality::PartialSumShrink => {
            let (n, k, t, l, p) = (n()?, k()?, t()?, l()?, p()?);
            let den = n - t - p * k;
            need_range(den > 0, "n - t - pk > 0")?;
            Ok(partial_sum(n - t, k - l) * big(den)
                <= big(n - t - p) * partial_sum(n - t - p, k - l))
        }
        Inequality::PartialSumRatio => {
            let (n, k, t, l) = (n()?, k()?, t()?, l()?);
            let den = n - t - k;
            need_range(den > 0, "n - t - k > 0")?;
            Ok(partial_sum(n - t, k - l - 1) * big(den) <= big(k) * partial_sum(n - t, k - l))
        }
        Inequality::UpperTailRatio => {
            let (t, l) = (t()?, l()?);
            Ok(big(2 * t + 2) * upper_tail(l, t) >= upper_tail(l + 1, t))
        }
    }
}

/// Outcome of sweeping one inequality over a parameter grid.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InequalityTally {
    pub checked: u64,
    pub out_of_domain: u64,
    pub failures: Vec<Params>,
}

/// Integer types the grid sweep can run on.
trait GridNum: Clone + Ord + std::ops::Mul<Output = Self> + From<u64> {
    fn from_big(b: &BigUint) -> Self;
}

impl GridNum for u128 {
    fn from_big(b: &BigUint) -> Self {
        u128::try_from(b).expect("grid value checked to fit")
    }
}

impl GridNum for BigUint {
    fn from_big(b: &BigUint) -> Self {
        b.clone()
    }
}

/// Sweeps all four inequalities over `n <= n_max`, `k <= k_max` and every `ℓ, t, p`
/// satisfying the shared constraints. Points whose denominator is non-positive are
/// counted in `out_of_domain`. Inequalities that do not depend on `p` are evaluated once
/// per remaining parameter tuple.
pub fn inequality_grid(n_max: i64, k_max: i64) -> Vec<(Inequality, InequalityTally)> {
    let n_max = n_max.max(0);
    let k_max = k_max.max(0);
    // Largest product formed is a partial sum (or binomial) times a factor <= n_max.
    let largest = partial_sum(n_max, k_max) * big(n_max + 1);
    if largest.bits() < 127 {
        grid_with::<u128>(n_max, k_max)
    } else {
        grid_with::<BigUint>(n_max, k_max)
    }
}

fn grid_with<N: GridNum>(n_max: i64, k_max: i64) -> Vec<(Inequality, InequalityTally)> {
    let binoms: Vec<Vec<BigUint>> = (0..=n_max)
        .map(|m| (0..=k_max).map(|i| binom(m, i)).collect())
        .collect();
    let sums: Vec<Vec<N>> = binoms
        .iter()
        .map(|row| {
            let mut acc = BigUint::zero();
            row.iter()
                .map(|b| {
                    acc += b;
                    N::from_big(&acc)
                })
                .collect()
        })
        .collect();
    let binoms: Vec<Vec<N>> = binoms
        .iter()
        .map(|row| row.iter().map(N::from_big).collect())
        .collect();
    let zero = N::from(0u64);
    let ps = |m: i64, j: i64| -> N {
        if j < 0 || m < 0 {
            zero.clone()
        } else {
            sums[m as usize][j.min(k_max) as usize].clone()
        }
    };
    let bn = |m: i64, i: i64| -> N { binoms[m as usize][i as usize].clone() };
    let num = |v: i64| N::from(v as u64);

    let mut shrink = InequalityTally::default();
    let mut ps_shrink = InequalityTally::default();
    let mut ratio = InequalityTally::default();
    let mut tail = InequalityTally::default();

    for k in 2..=k_max {
        for n in (2 * k + 2)..=n_max {
            for p in 1..(n - 2 * k) {
                let den = n - p * (k + 1);
                if den <= 0 {
                    shrink.out_of_domain += 1;
                } else {
                    shrink.checked += 1;
                    if bn(n, k) * num(den) > num(n - p) * bn(n - p, k) {
                        shrink.failures.push(Params::new().n(n).k(k).p(p));
                    }
                }
                for t in 1..k {
                    let den = n - t - p * k;
                    if den <= 0 {
                        ps_shrink.out_of_domain += (k - 1) as u64;
                        continue;
                    }
                    for l in 1..k {
                        ps_shrink.checked += 1;
                        let lhs = ps(n - t, k - l) * num(den);
                        let rhs = num(n - t - p) * ps(n - t - p, k - l);
                        if lhs > rhs {
                            ps_shrink.failures.push(Params::new().n(n).k(k).t(t).ell(l).p(p));
                        }
                    }
                }
            }
            for t in 1..k {
                for l in 1..k {
                    ratio.checked += 1;
                    let lhs = ps(n - t, k - l - 1) * num(n - t - k);
                    let rhs = num(k) * ps(n - t, k - l);
                    if lhs > rhs {
                        ratio.failures.push(Params::new().n(n).k(k).t(t).ell(l));
                    }
                }
            }
        }
        // Upper-tail inequality: only (t, ℓ) matter, and k must exceed ℓ with room for n.
        if 2 * k + 2 <= n_max {
            for t in 1..k {
                for l in (t + 1)..k {
                    tail.checked += 1;
                    let ok = check_inequality(
                        Inequality::UpperTailRatio,
                        &Params::new().t(t).ell(l),
                    )
                    .unwrap_or(false);
                    if !ok {
                        tail.failures.push(Params::new().k(k).t(t).ell(l));
                    }
                }
            }
        }
    }
    vec![
        (Inequality::BinomialShrink, shrink),
        (Inequality::PartialSumShrink, ps_shrink),
        (Inequality::PartialSumRatio, ratio),
        (Inequality::UpperTailRatio, tail),
    ]
}

/// Which level weight function to inspect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    Cross,
    T,
}

/// `true` iff the level weight function is non-increasing in `ℓ` over its range
/// (`2..=k` for the cross version, `t+1..=k` for the `t` version).
pub fn f_monotone_check(kind: WeightKind, n: i64, k: i64, t: Option<i64>) -> Result<bool> {
    let values: Vec<CountValue> = match kind {
        WeightKind::Cross => (2..=k)
            .map(|l| eval(FormulaId::FCross, &Params::new().n(n).k(k).ell(l)))
            .collect::<Result<_>>()?,
        WeightKind::T => {
            let t = t.ok_or_else(|| Error::Domain("missing parameter t".into()))?;
            ((t + 1)..=k)
                .map(|l| eval(FormulaId::FT, &Params::new().n(n).k(k).t(t).ell(l)))
                .collect::<Result<_>>()?
        }
    };
    Ok(values.windows(2).all(|w| w[0] >= w[1]))
}

/// Smallest `n` at which the monotonicity claim is made: `5k²` for the cross version,
/// `⌈4(t+2)²k²/3⌉` for the `t` version.
pub fn monotone_threshold(kind: WeightKind, k: i64, t: i64) -> i64 {
    match kind {
        WeightKind::Cross => 5 * k * k,
        WeightKind::T => {
            let num = 4 * (t + 2) * (t + 2) * k * k;
            (num + 2) / 3
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(id: FormulaId, p: Params) -> u64 {
        eval(id, &p).unwrap().to_u64().unwrap()
    }

    #[test]
    fn binomials_and_partial_sums() {
        assert_eq!(binom(5, 2), BigUint::from(10u32));
        assert_eq!(binom(5, 6), BigUint::zero());
        assert_eq!(binom(-1, 0), BigUint::zero());
        assert_eq!(partial_sum(4, 4), BigUint::from(16u32));
        assert_eq!(partial_sum(4, 9), BigUint::from(16u32));
        assert_eq!(partial_sum(4, -1), BigUint::zero());
        assert_eq!(binom(200, 100).to_string().len(), 59);
        assert_eq!(ev(FormulaId::Binom, Params::new().n(5).k(2)), 10);
    }

    #[test]
    fn spot_values() {
        assert_eq!(ev(FormulaId::DistinctA1A2, Params::new().n(7).k(3)), 24);
        assert_eq!(ev(FormulaId::WedgeStar, Params::new().n(4).k(2)), 4);
        assert_eq!(ev(FormulaId::CrossSpernerEven, Params::new().n(4)), 9);
        assert_eq!(ev(FormulaId::CrossSpernerEven, Params::new().n(2)), 1);
        assert_eq!(ev(FormulaId::DistinctFrankl, Params::new().n(5).k(2).t(1)), 3);
        assert_eq!(ev(FormulaId::CrossSpernerOddConjecture, Params::new().n(3)), 3);
        assert_eq!(ev(FormulaId::CrossSpernerOddConjecture, Params::new().n(5)), 21);
        assert_eq!(ev(FormulaId::CrossSpernerPartition, Params::new().n(4).x(2)), 9);
        assert_eq!(ev(FormulaId::LayerAntichain, Params::new().n(3)), 3);
        assert_eq!(ev(FormulaId::LayerAntichain, Params::new().n(6)), 35);
    }

    #[test]
    fn empty_sum_convention() {
        for n in 4..40 {
            assert_eq!(ev(FormulaId::DistinctA1A2, Params::new().n(n).k(2)), 4);
        }
        assert_eq!(ev(FormulaId::DistinctStarT, Params::new().n(9).k(3).t(3)), 0);
    }

    #[test]
    fn bad_parameters() {
        assert!(eval(FormulaId::DistinctA1A2, &Params::new().n(5).k(3)).is_err());
        assert!(eval(FormulaId::DistinctA1A2, &Params::new().n(7)).is_err());
        assert!(eval(FormulaId::CrossSpernerEven, &Params::new().n(3)).is_err());
        assert!(eval(FormulaId::CrossSpernerOddConjecture, &Params::new().n(4)).is_err());
        assert!(eval(FormulaId::FCross, &Params::new().n(9).k(3).ell(1)).is_err());
        assert!(eval(FormulaId::LayerAntichain, &Params::new().n(4).ell(3)).is_err());
    }

    #[test]
    fn ids_round_trip_through_names() {
        for id in FormulaId::ALL {
            assert_eq!(id.name().parse::<FormulaId>().unwrap(), id);
        }
        assert_eq!("I_A1A2".parse::<FormulaId>().unwrap(), FormulaId::DistinctA1A2);
        assert!("nope".parse::<FormulaId>().is_err());
    }

    #[test]
    fn hilton_milner_below_ekr() {
        for n in 5..20 {
            for k in 2..(n / 2) {
                let p = Params::new().n(n).k(k);
                assert!(ev(FormulaId::HiltonMilner, p) <= ev(FormulaId::Ekr, p));
            }
        }
    }

    #[test]
    fn inequality_examples() {
        let p = Params::new().n(20).k(4).p(2);
        assert!(check_inequality(Inequality::BinomialShrink, &p).unwrap());
        let p = Params::new().t(1).ell(2);
        assert!(check_inequality(Inequality::UpperTailRatio, &p).unwrap());
        // 3 = C(2,1) + C(2,2) and 7 = C(3,1) + C(3,2) + C(3,3); 4·3 >= 7.
        assert_eq!(upper_tail(2, 1), BigUint::from(3u32));
        assert_eq!(upper_tail(3, 1), BigUint::from(7u32));
    }

    #[test]
    fn inequality_constraints() {
        let p = Params::new().n(10).k(4).p(2);
        assert!(check_inequality(Inequality::BinomialShrink, &p).is_err());
        let p = Params::new().n(40).k(4).p(20);
        assert!(check_inequality(Inequality::BinomialShrink, &p).is_err());
        let p = Params::new().n(30).k(4).t(4).ell(1).p(1);
        assert!(check_inequality(Inequality::PartialSumShrink, &p).is_err());
        let p = Params::new().t(2).ell(2);
        assert!(check_inequality(Inequality::UpperTailRatio, &p).is_err());
        let p = Params::new().n(40).k(5).t(2).ell(3).p(3);
        assert!(check_inequality(Inequality::PartialSumShrink, &p).unwrap());
        assert!(check_inequality(Inequality::PartialSumRatio, &p).unwrap());
    }

    #[test]
    fn grid_agrees_with_single_checks_on_small_grid() {
        let grid = inequality_grid(30, 5);
        for (ineq, tally) in &grid {
            assert!(tally.failures.is_empty(), "{ineq:?}");
            assert!(tally.checked > 0);
        }
        let mut direct = 0;
        for k in 2..=5i64 {
            for n in 1..=30 {
                for p in 1..=30 {
                    let ps = Params::new().n(n).k(k).p(p);
                    if let Ok(ok) = check_inequality(Inequality::BinomialShrink, &ps) {
                        assert!(ok);
                        direct += 1;
                    }
                }
            }
        }
        assert_eq!(grid[0].1.checked, direct);
    }

    #[test]
    fn grid_backends_agree() {
        assert_eq!(grid_with::<u128>(40, 6), grid_with::<BigUint>(40, 6));
    }

    #[test]
    fn monotonicity_examples() {
        let k = 3;
        let n = monotone_threshold(WeightKind::Cross, k, 0);
        assert_eq!(n, 45);
        assert!(f_monotone_check(WeightKind::Cross, n, k, None).unwrap());
        let n = monotone_threshold(WeightKind::T, 4, 2);
        assert_eq!(n, 342);
        assert!(f_monotone_check(WeightKind::T, n, 4, Some(2)).unwrap());
        // Below threshold nothing is claimed; just make sure it evaluates.
        f_monotone_check(WeightKind::Cross, 7, 3, None).unwrap();
        assert!(f_monotone_check(WeightKind::T, 50, 4, None).is_err());
    }
}
