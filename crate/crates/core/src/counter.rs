//! The exact census: the indicator `𝟙(f, f′)`, the 3-adic exponents `μ`, the
//! discriminant datum `D(d, f, f′)`, the inner sums `S(X, f, f′)` and the
//! Heisenberg sum split into its fourteen classes.
//!
//! Everything here is integer arithmetic. `raw_total` is the double sum before
//! the final division by `108 = 2²·3³`, so integrality stays observable.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::analytic::ksum::KSummer;
use crate::arith::{ifourth_root, isixth_root, primes_one_mod};
use crate::charspace::{
    chi_eval_with, enumerate_deltas, enumerate_v, is_linearly_independent, linear_combination, CubicCharacters,
    SupportFunction,
};
use crate::eisenstein::{CharValue, StandardPrimeTable};
use crate::error::{HeisError, Result};

/// Largest supported `X`.
pub const X_MAX: u128 = 1_000_000_000_000_000_000;

/// How a `d` divisible by 3 is weighted in `S(X, f, f′)`: `2^{ω*(d)}` ignores
/// the prime 3, `2^{ω(d)}` counts it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
#[derive(Default)]
pub enum WeightMode {
    OmegaStar,
    #[default]
    OmegaFull,
}

impl WeightMode {
    fn three_weight(self) -> u128 {
        match self {
            WeightMode::OmegaStar => 1,
            WeightMode::OmegaFull => 2,
        }
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WeightMode::OmegaStar => "omega-star",
            WeightMode::OmegaFull => "omega-full",
        })
    }
}

impl FromStr for WeightMode {
    type Err = HeisError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('_', "-").as_str() {
            "omega-star" => Ok(WeightMode::OmegaStar),
            "omega-full" => Ok(WeightMode::OmegaFull),
            _ => Err(HeisError::InvalidArgument(format!("unknown weight mode {s:?}"))),
        }
    }
}

/// One of the classes `C1 … C14`: `C1…C7` have `3 ∤ d`, `C8…C14` have `3 | d`,
/// and the row within each half follows the `μ(f, f′)` case split.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsumClass(u8);

impl SubsumClass {
    pub const ALL: [SubsumClass; 14] = {
        let mut all = [SubsumClass(1); 14];
        let mut i = 0;
        while i < 14 {
            all[i] = SubsumClass(i as u8 + 1);
            i += 1;
        }
        all
    };

    pub fn new(id: u8) -> Result<Self> {
        if (1..=14).contains(&id) {
            Ok(SubsumClass(id))
        } else {
            Err(HeisError::InvalidArgument(format!("no subsum class C{id}")))
        }
    }

    pub fn id(self) -> u8 {
        self.0
    }

    /// Row `1..=7` of the `μ` case split.
    pub fn row(self) -> u8 {
        (self.0 - 1) % 7 + 1
    }

    pub fn three_divides_d(self) -> bool {
        self.0 > 7
    }

    fn index(self) -> usize {
        usize::from(self.0 - 1)
    }
}

impl fmt::Display for SubsumClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C{}", self.0)
    }
}

impl FromStr for SubsumClass {
    type Err = HeisError;

    fn from_str(s: &str) -> Result<Self> {
        let digits = s.strip_prefix(['C', 'c']).unwrap_or(s);
        let id = digits
            .parse::<u8>()
            .map_err(|_| HeisError::InvalidArgument(format!("bad subsum class {s:?}")))?;
        SubsumClass::new(id)
    }
}

impl Serialize for SubsumClass {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// `d / gcd(d, a)`: the largest squarefree divisor of `d` prime to `a`.
pub fn free(d: u64, a: u64) -> Result<u64> {
    if !crate::arith::is_squarefree(d) {
        return Err(HeisError::NotSquarefree(d));
    }
    Ok(d / num_integer::gcd(d, a))
}

fn require_independent(f: &SupportFunction, f2: &SupportFunction) -> Result<()> {
    if is_linearly_independent(f, f2) {
        Ok(())
    } else {
        Err(HeisError::DependentPair)
    }
}

/// The `r`-factor of the indicator: `Σ_{f(r)z + f′(r)z′ = 0} χ(zf + z′f′)(r)`,
/// which is `1 + v + v²` for `v` the value on a generator of the kernel.
fn local_factor<C: CubicCharacters + ?Sized>(chars: &C, f: &SupportFunction, f2: &SupportFunction, r: u64) -> u8 {
    let (a, b) = (f.get(r), f2.get(r));
    // Kernel generator (z, z′) of a·z + b·z′ = 0.
    let (z, z2) = if a == 0 { (1, 0) } else { ((3 - (b * a) % 3) % 3, 1) };
    let g = linear_combination(z, f, z2, f2);
    debug_assert_eq!(g.get(r), 0);
    let v = chi_eval_with(chars, &g, i128::from(r));
    debug_assert_ne!(v, CharValue::Zero, "kernel combinations vanish at r");
    v.one_plus_v_plus_v2().unwrap_or(0)
}

/// `𝟙(f, f′) ∈ {0, 1}`.
pub fn indicator(f: &SupportFunction, f2: &SupportFunction) -> Result<u8> {
    indicator_with(&crate::charspace::DirectChars, f, f2)
}

pub fn indicator_with<C: CubicCharacters + ?Sized>(chars: &C, f: &SupportFunction, f2: &SupportFunction) -> Result<u8> {
    require_independent(f, f2)?;
    let all_three = union_supp3(f, f2)
        .into_iter()
        .all(|r| local_factor(chars, f, f2, r) == 3);
    Ok(u8::from(all_three))
}

fn union_supp3(f: &SupportFunction, f2: &SupportFunction) -> Vec<u64> {
    let mut u: Vec<u64> = f.supp3().chain(f2.supp3()).collect();
    u.sort_unstable();
    u.dedup();
    u
}

/// Row `1..=7` of the `μ(f, f′)` table together with its exponent of 3.
fn mu_row<C: CubicCharacters + ?Sized>(chars: &C, f: &SupportFunction, f2: &SupportFunction) -> (u8, u32) {
    let (e, e2) = (f.three(), f2.three());
    let is_one = |g: &SupportFunction| chi_eval_with(chars, g, 3).is_one();
    match (e, e2) {
        (0, 0) => (1, 0),
        (0, _) if is_one(f) => (2, 8),
        (0, _) => (3, 12),
        (_, 0) if is_one(f2) => (4, 12),
        (_, 0) => (5, 16),
        _ => {
            let g = linear_combination(e2, f, 2 * e % 3, f2);
            debug_assert_eq!(g.three(), 0);
            if is_one(&g) {
                (6, 12)
            } else {
                (7, 16)
            }
        }
    }
}

/// Exponent of 3 in `μ(f, f′)`.
pub fn mu(f: &SupportFunction, f2: &SupportFunction) -> Result<u32> {
    require_independent(f, f2)?;
    Ok(mu_row(&crate::charspace::DirectChars, f, f2).1)
}

/// Exponent of 3 in `μ(f, f′, d)`.
pub fn mu_d(f: &SupportFunction, f2: &SupportFunction, three_divides_d: bool) -> Result<u32> {
    if three_divides_d && f.three() == 0 && f2.three() == 0 {
        require_independent(f, f2)?;
        return Ok(12);
    }
    mu(f, f2)
}

fn mu_d_from_row(row: u8, mu: u32, three_divides_d: bool) -> u32 {
    if three_divides_d && row == 1 {
        12
    } else {
        mu
    }
}

/// `D(d, f, f′) = Δ(f)⁶ · free(Δ(f′), Δ(f))⁴ · μ(f, f′, d)`.
pub fn big_d(f: &SupportFunction, f2: &SupportFunction, three_divides_d: bool) -> Result<u128> {
    let e = mu_d(f, f2, three_divides_d)?;
    big_d_from_parts(f.delta(), f2.delta(), e)
}

fn big_d_from_parts(delta: u64, delta2: u64, mu_exp: u32) -> Result<u128> {
    let ovf = || HeisError::Overflow("D(d, f, f')");
    let fr = u128::from(free(delta2, delta)?);
    u128::from(delta)
        .checked_pow(6)
        .and_then(|v| v.checked_mul(fr.checked_pow(4)?))
        .and_then(|v| v.checked_mul(3u128.checked_pow(mu_exp)?))
        .ok_or_else(ovf)
}

pub fn classify(f: &SupportFunction, f2: &SupportFunction, three_divides_d: bool) -> Result<SubsumClass> {
    require_independent(f, f2)?;
    let (row, _) = mu_row(&crate::charspace::DirectChars, f, f2);
    Ok(SubsumClass(row + if three_divides_d { 7 } else { 0 }))
}

/// Rejects `X = 0` and `X` above [`X_MAX`].
pub fn check_x(x: u128) -> Result<()> {
    if x == 0 {
        return Err(HeisError::InvalidArgument("X must be at least 1".into()));
    }
    if x > X_MAX {
        return Err(HeisError::OutOfRange {
            what: "X",
            value: x,
            limit: X_MAX,
        });
    }
    Ok(())
}

/// `M = ⌊(X / D)^{1/6}⌋`, the bound on `free(d, 3)`.
fn m_bound(x: u128, d: u128) -> u64 {
    isixth_root(x / d) as u64
}

/// `S(X, f, f′) = K₂(M₁) + w₃·K₂(M₃)`, where `M_c` bounds `free(d, 3)` for the
/// two `d`-classes and `K₂` runs over `m ∈ N_3*` prime to `Δ(f)Δ(f′)`.
pub fn s_sum(x: u128, f: &SupportFunction, f2: &SupportFunction, mode: WeightMode) -> Result<u128> {
    check_x(x)?;
    let excluded = union_supp3(f, f2);
    let mut total = 0u128;
    for three in [false, true] {
        let d = big_d(f, f2, three)?;
        if d > x {
            continue;
        }
        let m = m_bound(x, d);
        let k = KSummer::new(m, 3)?.k_excluding(m, &excluded);
        total += if three { mode.three_weight() * k } else { k };
    }
    Ok(total)
}

/// One nonzero contribution to the Heisenberg sum: a pair `(f, f′)` with
/// `𝟙 = 1` restricted to one `d`-class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Term {
    pub f: SupportFunction,
    pub f_prime: SupportFunction,
    pub three_divides_d: bool,
    pub big_d: u128,
    pub class: SubsumClass,
    /// `3^{|supp₃ f ∪ supp₃ f′|}`.
    pub weight: u128,
    /// The part of `S(X, f, f′)` coming from this `d`-class.
    pub s_part: u128,
}

impl Term {
    pub fn contribution(&self) -> u128 {
        self.weight * self.s_part
    }

    fn sort_key(&self) -> (u64, u64, &SupportFunction, &SupportFunction, bool) {
        (
            self.f.delta(),
            self.f_prime.delta(),
            &self.f,
            &self.f_prime,
            self.three_divides_d,
        )
    }
}

/// Largest prime that can occur in a support below `X`.
pub fn census_prime_limit(x: u128) -> u64 {
    // Δ(f) <= X^{1/6}; primes only in f′ satisfy q⁴ <= X / 7⁶ (f(3) = 0) or
    // q⁴ <= X / 3^12 (f(3) ≠ 0), and 7⁶ < 3^12.
    ((isixth_root(x)).max(ifourth_root(x / 117_649)) as u64).max(7)
}

/// Least `μ` exponent compatible with `(f(3), f′(3)) = (η, η′)`.
fn mu_min<C: CubicCharacters + ?Sized>(chars: &C, f: &SupportFunction, eta2: u8) -> u32 {
    match (f.three(), eta2) {
        (0, 0) => 0,
        (0, _) if chi_eval_with(chars, f, 3).is_one() => 8,
        _ => 12,
    }
}

/// Squarefree products `<= bound` of `primes` (ascending list), as prime lists.
fn squarefree_products(primes: &[u64], bound: u64) -> Vec<Vec<u64>> {
    fn go(primes: &[u64], bound: u64, acc: &mut Vec<u64>, prod: u64, out: &mut Vec<Vec<u64>>) {
        out.push(acc.clone());
        for (i, &p) in primes.iter().enumerate() {
            if p > bound / prod {
                break;
            }
            acc.push(p);
            go(&primes[i + 1..], bound, acc, prod * p, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(primes, bound, &mut Vec::new(), 1, &mut out);
    out
}

/// All nonzero contributions at `X`, in deterministic order.
pub fn enumerate_terms(x: u128, mode: WeightMode) -> Result<Vec<Term>> {
    check_x(x)?;
    let chars = StandardPrimeTable::build(census_prime_limit(x))?;
    enumerate_terms_with(x, mode, &chars)
}

/// As [`enumerate_terms`], reusing a table that covers [`census_prime_limit`].
pub fn enumerate_terms_with(x: u128, mode: WeightMode, chars: &StandardPrimeTable) -> Result<Vec<Term>> {
    check_x(x)?;
    let need = census_prime_limit(x);
    if chars.limit() < need {
        return Err(HeisError::OutOfRange {
            what: "prime table limit",
            value: u128::from(need),
            limit: u128::from(chars.limit()),
        });
    }
    let split_primes = primes_one_mod(chars.limit(), 3);
    let deltas = enumerate_deltas(isixth_root(x) as u64);
    // K₂ arguments never exceed X^{1/6} / 3^{4/3} (the smallest D is 3^8).
    let ksum = KSummer::new(isixth_root(x / 6561).max(1) as u64, 3)?;

    let per_delta: Vec<Vec<Term>> = deltas
        .par_iter()
        .map(|dl| terms_for_delta(x, mode, chars, &split_primes, &ksum, &dl.factors))
        .collect::<Result<_>>()?;
    let mut terms: Vec<Term> = per_delta.into_iter().flatten().collect();
    terms.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    Ok(terms)
}

fn terms_for_delta(
    x: u128,
    mode: WeightMode,
    chars: &StandardPrimeTable,
    split_primes: &[u64],
    ksum: &KSummer,
    factors: &[u64],
) -> Result<Vec<Term>> {
    let delta: u64 = factors.iter().product();
    let delta6 = u128::from(delta).pow(6);
    let dl = crate::charspace::DeltaIndex {
        delta,
        factors: factors.to_vec(),
    };
    let mut out = Vec::new();
    for f in enumerate_v(&dl, false).into_iter().filter(|f| !f.is_zero()) {
        for eta2 in 0u8..3 {
            let base = delta6 * 3u128.pow(mu_min(chars, &f, eta2));
            if base > x {
                continue;
            }
            let bound = ifourth_root(x / base) as u64;
            // A prime only in f′ has local factor 1 + χ(f)(q) + χ(f)(q)².
            let candidates: Vec<u64> = split_primes
                .iter()
                .copied()
                .take_while(|&q| q <= bound)
                .filter(|q| !factors.contains(q))
                .filter(|&q| chi_eval_with(chars, &f, i128::from(q)).is_one())
                .collect();
            for outside in squarefree_products(&candidates, bound) {
                for shared_mask in 0u32..(1 << factors.len()) {
                    let mut support: Vec<u64> = factors
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| shared_mask >> i & 1 == 1)
                        .map(|(_, &p)| p)
                        .chain(outside.iter().copied())
                        .collect();
                    support.sort_unstable();
                    for values in 0u32..(1 << support.len()) {
                        let body = support
                            .iter()
                            .enumerate()
                            .map(|(i, &p)| (p, if values >> i & 1 == 1 { 2 } else { 1 }));
                        let f2 = SupportFunction::from_sorted(std::iter::once((3, eta2)).chain(body));
                        if !is_linearly_independent(&f, &f2) {
                            continue;
                        }
                        pair_terms(x, mode, chars, ksum, &f, &f2, &mut out)?;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn pair_terms(
    x: u128,
    mode: WeightMode,
    chars: &StandardPrimeTable,
    ksum: &KSummer,
    f: &SupportFunction,
    f2: &SupportFunction,
    out: &mut Vec<Term>,
) -> Result<()> {
    let (row, mu) = mu_row(chars, f, f2);
    let d1 = big_d_from_parts(f.delta(), f2.delta(), mu_d_from_row(row, mu, false))?;
    // The 3 | d class never has a smaller D.
    if d1 > x {
        return Ok(());
    }
    let union = union_supp3(f, f2);
    if !union.iter().all(|&r| local_factor(chars, f, f2, r) == 3) {
        return Ok(());
    }
    let weight = 3u128.pow(union.len() as u32);
    for three in [false, true] {
        let d = big_d_from_parts(f.delta(), f2.delta(), mu_d_from_row(row, mu, three))?;
        if d > x {
            continue;
        }
        let m = m_bound(x, d);
        let k = ksum.k_excluding(m, &union);
        out.push(Term {
            f: f.clone(),
            f_prime: f2.clone(),
            three_divides_d: three,
            big_d: d,
            class: SubsumClass(row + if three { 7 } else { 0 }),
            weight,
            s_part: if three { mode.three_weight() * k } else { k },
        });
    }
    Ok(())
}

/// `raw_total / 108`, exact when divisible and otherwise a reduced fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Count {
    Exact(u128),
    Fraction { num: u128, den: u128 },
}

impl Count {
    pub fn from_raw(raw: u128) -> Self {
        let g = num_integer::gcd(raw, 108);
        if g == 108 {
            Count::Exact(raw / 108)
        } else {
            Count::Fraction {
                num: raw / g,
                den: 108 / g,
            }
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Count::Exact(n) => n as f64,
            Count::Fraction { num, den } => num as f64 / den as f64,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Exact(n) => write!(f, "{n}"),
            Count::Fraction { num, den } => write!(f, "{num}/{den}"),
        }
    }
}

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Count::Exact(n) => s.serialize_u128(*n),
            Count::Fraction { .. } => s.collect_str(self),
        }
    }
}

/// Raw per-class sums `C1 … C14`, serialized in class order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Subsums(pub [u128; 14]);

impl Subsums {
    pub fn get(&self, c: SubsumClass) -> u128 {
        self.0[c.index()]
    }

    pub fn total(&self) -> u128 {
        self.0.iter().sum()
    }
}

impl Serialize for Subsums {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(14))?;
        for c in SubsumClass::ALL {
            map.serialize_entry(&c.to_string(), &self.get(c))?;
        }
        map.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountReport {
    pub x: u128,
    pub weight_mode: WeightMode,
    pub raw_total: u128,
    pub count: Count,
    pub divisible_by_108: bool,
    pub subsums: Subsums,
}

impl CountReport {
    pub fn from_terms(x: u128, mode: WeightMode, terms: &[Term]) -> Self {
        let mut subsums = Subsums::default();
        for t in terms {
            subsums.0[t.class.index()] += t.contribution();
        }
        let raw_total = subsums.total();
        CountReport {
            x,
            weight_mode: mode,
            raw_total,
            count: Count::from_raw(raw_total),
            divisible_by_108: raw_total % 108 == 0,
            subsums,
        }
    }

    pub const CSV_HEADER: &'static str =
        "x,weight_mode,raw_total,count,divisible_by_108,C1,C2,C3,C4,C5,C6,C7,C8,C9,C10,C11,C12,C13,C14";

    pub fn csv_row(&self) -> String {
        let mut row = format!(
            "{},{},{},{},{}",
            self.x, self.weight_mode, self.raw_total, self.count, self.divisible_by_108
        );
        for v in self.subsums.0 {
            row.push(',');
            row.push_str(&v.to_string());
        }
        row
    }
}

pub fn heis_total(x: u128, mode: WeightMode) -> Result<CountReport> {
    let terms = enumerate_terms(x, mode)?;
    Ok(CountReport::from_terms(x, mode, &terms))
}

pub fn heis_total_with(x: u128, mode: WeightMode, chars: &StandardPrimeTable) -> Result<CountReport> {
    let terms = enumerate_terms_with(x, mode, chars)?;
    Ok(CountReport::from_terms(x, mode, &terms))
}

pub fn heis_subsum(x: u128, class: SubsumClass, mode: WeightMode) -> Result<u128> {
    Ok(heis_total(x, mode)?.subsums.get(class))
}
