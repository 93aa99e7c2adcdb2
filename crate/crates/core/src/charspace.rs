//! Support functions `f: P_3 → F_3`, their product cubic characters
//! `χ(f) = ∏ χ_p^{f(p)}`, conductors and enumeration of `V(Δ)`, `V*(Δ)`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, mod_pow, prime_factors};
use crate::eisenstein::{chi_nine, standard_decompose, CharValue, StandardPrime, StandardPrimeTable};
use crate::error::{HeisError, Result};

/// Membership in `P_3 = {3} ∪ {p ≡ 1 mod 3}`.
pub fn in_p3(p: u64) -> bool {
    p == 3 || (p % 3 == 1 && is_prime(p))
}

/// A finitely supported `f: P_3 → F_3`, stored as increasing `(prime, value)`
/// pairs with values in `{1, 2}`. The zero function is the empty list.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<(u64, u8)>", into = "Vec<(u64, u8)>")]
pub struct SupportFunction {
    entries: Vec<(u64, u8)>,
}

impl TryFrom<Vec<(u64, u8)>> for SupportFunction {
    type Error = HeisError;

    fn try_from(v: Vec<(u64, u8)>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<SupportFunction> for Vec<(u64, u8)> {
    fn from(f: SupportFunction) -> Self {
        f.entries
    }
}

impl SupportFunction {
    /// Values are reduced mod 3 and zeros dropped; primes must lie in `P_3`
    /// and appear at most once.
    pub fn new(entries: impl IntoIterator<Item = (u64, u8)>) -> Result<Self> {
        let mut v: Vec<(u64, u8)> = entries.into_iter().collect();
        v.sort_by_key(|e| e.0);
        for w in v.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(HeisError::DuplicatePrime(w[0].0));
            }
        }
        if let Some(&(p, _)) = v.iter().find(|e| !in_p3(e.0)) {
            return Err(HeisError::NotInP3(p));
        }
        Ok(Self::from_sorted(v.into_iter().map(|(p, x)| (p, x % 3))))
    }

    /// Caller guarantees sorted, distinct primes in `P_3`.
    pub(crate) fn from_sorted(entries: impl IntoIterator<Item = (u64, u8)>) -> Self {
        let entries: Vec<_> = entries.into_iter().filter(|e| e.1 % 3 != 0).collect();
        debug_assert!(entries.windows(2).all(|w| w[0].0 < w[1].0));
        Self { entries }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// `η·1_{3}`.
    pub fn at_three(eta: u8) -> Self {
        Self::from_sorted([(3, eta % 3)])
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(u64, u8)] {
        &self.entries
    }

    pub fn get(&self, p: u64) -> u8 {
        self.entries
            .binary_search_by_key(&p, |e| e.0)
            .map_or(0, |i| self.entries[i].1)
    }

    /// `f(3)`.
    pub fn three(&self) -> u8 {
        match self.entries.first() {
            Some(&(3, v)) => v,
            _ => 0,
        }
    }

    /// `supp_3 f`: the support without the prime 3.
    pub fn supp3(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.0).filter(|&p| p != 3)
    }

    pub fn delta(&self) -> u64 {
        self.supp3().product()
    }

    pub fn scale(&self, z: u8) -> Self {
        Self::from_sorted(self.entries.iter().map(|&(p, v)| (p, (v * (z % 3)) % 3)))
    }

    /// The same function with `f(3)` replaced by `eta`.
    pub fn with_three(&self, eta: u8) -> Self {
        linear_combination(1, &self.without_three(), 1, &Self::at_three(eta))
    }

    pub fn without_three(&self) -> Self {
        Self::from_sorted(self.entries.iter().copied().filter(|e| e.0 != 3))
    }
}

impl fmt::Display for SupportFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (p, v)) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}:{v}")?;
        }
        write!(f, "}}")
    }
}

/// `z·f + z′·f′` computed pointwise in `F_3`.
pub fn linear_combination(z: u8, f: &SupportFunction, z2: u8, f2: &SupportFunction) -> SupportFunction {
    let (a, b) = (&f.entries, &f2.entries);
    let (mut i, mut k) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() || k < b.len() {
        let pa = a.get(i).map_or(u64::MAX, |e| e.0);
        let pb = b.get(k).map_or(u64::MAX, |e| e.0);
        let p = pa.min(pb);
        let mut v = 0u8;
        if pa == p {
            v += a[i].1 * (z % 3);
            i += 1;
        }
        if pb == p {
            v += b[k].1 * (z2 % 3);
            k += 1;
        }
        out.push((p, v % 3));
    }
    SupportFunction::from_sorted(out)
}

pub fn is_linearly_independent(f: &SupportFunction, f2: &SupportFunction) -> bool {
    !f.is_zero() && !f2.is_zero() && *f2 != *f && *f2 != f.scale(2)
}

/// A squarefree `Δ` whose prime factors are all `≡ 1 (mod 3)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DeltaIndex {
    pub delta: u64,
    pub factors: Vec<u64>,
}

impl DeltaIndex {
    pub fn new(delta: u64) -> Result<Self> {
        if delta == 0 || !crate::arith::is_squarefree(delta) {
            return Err(HeisError::NotSquarefree(delta));
        }
        let factors = prime_factors(delta);
        if let Some(&p) = factors.iter().find(|&&p| p % 3 != 1) {
            return Err(HeisError::NotSplitPrime(p));
        }
        Ok(Self { delta, factors })
    }

    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }
}

pub fn delta(f: &SupportFunction) -> DeltaIndex {
    let factors: Vec<u64> = f.supp3().collect();
    DeltaIndex {
        delta: factors.iter().product(),
        factors,
    }
}

/// All `f` with `supp_3 f` equal to the factors of `Δ`; with `star` only those
/// with `f(3) = 0`, otherwise all three choices of `f(3)`.
pub fn enumerate_v(delta: &DeltaIndex, star: bool) -> Vec<SupportFunction> {
    let w = delta.factors.len();
    let threes: &[u8] = if star { &[0] } else { &[0, 1, 2] };
    let mut out = Vec::with_capacity(threes.len() << w);
    for &eta in threes {
        for mask in 0u32..(1 << w) {
            let body = delta
                .factors
                .iter()
                .enumerate()
                .map(|(i, &p)| (p, if mask >> i & 1 == 1 { 2 } else { 1 }));
            out.push(SupportFunction::from_sorted(std::iter::once((3, eta)).chain(body)));
        }
    }
    out
}

/// Every `Δ ∈ N_3*` with `Δ <= limit`, ascending.
pub fn enumerate_deltas(limit: u64) -> Vec<DeltaIndex> {
    let n = limit as usize;
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut k = i;
            while k <= n {
                if spf[k] == 0 {
                    spf[k] = i as u32;
                }
                k += i;
            }
        }
    }
    let mut out = Vec::new();
    'outer: for m in 1..=n {
        let mut rest = m;
        let mut factors = Vec::new();
        while rest > 1 {
            let p = spf[rest] as usize;
            rest /= p;
            if p % 3 != 1 || rest % p == 0 {
                continue 'outer;
            }
            factors.push(p as u64);
        }
        out.push(DeltaIndex {
            delta: m as u64,
            factors,
        });
    }
    out
}

/// A source of the single-prime characters `χ_p` (`χ_3` for `p = 3`).
pub trait CubicCharacters {
    fn chi_prime(&self, p: u64, n: i128) -> CharValue;
}

/// Recomputes the standard decomposition on every call. Slow, but shares no state.
#[derive(Clone, Copy, Debug, Default)]
pub struct DirectChars;

impl CubicCharacters for DirectChars {
    fn chi_prime(&self, p: u64, n: i128) -> CharValue {
        if p == 3 {
            return chi_nine(n);
        }
        standard_decompose(p).expect("support primes lie in P_3").chi(n)
    }
}

impl CubicCharacters for StandardPrimeTable {
    fn chi_prime(&self, p: u64, n: i128) -> CharValue {
        if p == 3 {
            return chi_nine(n);
        }
        match self.get(p) {
            Some(sp) => sp.chi(n),
            None => DirectChars.chi_prime(p, n),
        }
    }
}

/// Full residue tables `a ↦ χ_q(a)` for a fixed set of primes; `O(1)` lookups.
#[derive(Clone, Debug, Default)]
pub struct CharTable {
    // 3 encodes zero, otherwise the exponent of j.
    tables: HashMap<u64, Vec<u8>>,
}

impl CharTable {
    pub fn new<'a>(primes: impl IntoIterator<Item = &'a StandardPrime>) -> Self {
        let mut tables = HashMap::new();
        tables.insert(3, (0..9).map(|a| encode(chi_nine(a))).collect());
        for sp in primes {
            tables.insert(sp.p, residue_table(sp));
        }
        Self { tables }
    }

    pub fn for_limit(limit: u64) -> Result<Self> {
        Ok(Self::new(StandardPrimeTable::build(limit)?.primes()))
    }

    pub fn contains(&self, p: u64) -> bool {
        self.tables.contains_key(&p)
    }

    /// Residue table of `χ_p` (length `p`, or 9 for `p = 3`); the entry 3 marks zero.
    pub fn table(&self, p: u64) -> Option<&[u8]> {
        self.tables.get(&p).map(Vec::as_slice)
    }
}

fn encode(v: CharValue) -> u8 {
    match v {
        CharValue::Zero => 3,
        CharValue::Root(e) => e,
    }
}

/// Walks powers of a generator of `F_q^*`, so the table costs `O(q)`.
fn residue_table(sp: &StandardPrime) -> Vec<u8> {
    let q = sp.p;
    let gen = primitive_root(q);
    let eg = match sp.chi(i128::from(gen)) {
        CharValue::Root(e) => e,
        CharValue::Zero => unreachable!("a generator is a unit"),
    };
    let mut table = vec![3u8; q as usize];
    let mut x = 1u64;
    let mut e = 0u8;
    for _ in 0..q - 1 {
        table[x as usize] = e;
        x = (u128::from(x) * u128::from(gen) % u128::from(q)) as u64;
        e = (e + eg) % 3;
    }
    table
}

fn primitive_root(q: u64) -> u64 {
    let factors = prime_factors(q - 1);
    (2..q)
        .find(|&g| factors.iter().all(|&r| mod_pow(g, (q - 1) / r, q) != 1))
        .expect("F_q^* is cyclic")
}

impl CubicCharacters for CharTable {
    fn chi_prime(&self, p: u64, n: i128) -> CharValue {
        match self.tables.get(&p) {
            Some(t) => {
                let m = if p == 3 { 9 } else { t.len() as i128 };
                match t[n.rem_euclid(m) as usize] {
                    3 => CharValue::Zero,
                    e => CharValue::Root(e),
                }
            }
            None => DirectChars.chi_prime(p, n),
        }
    }
}

/// `χ(f)(m)` with the convention `χ(0) = 1`.
pub fn chi_eval(f: &SupportFunction, m: i128) -> CharValue {
    chi_eval_with(&DirectChars, f, m)
}

pub fn chi_eval_with<C: CubicCharacters + ?Sized>(chars: &C, f: &SupportFunction, m: i128) -> CharValue {
    if f.entries.iter().any(|&(p, _)| m % i128::from(p) == 0) {
        return CharValue::Zero;
    }
    f.entries
        .iter()
        .fold(CharValue::ONE, |acc, &(p, v)| acc * chars.chi_prime(p, m).pow(v))
}

/// The conductor of `χ(f)`: `Δ(f)`, times 9 when `f(3) ≠ 0`.
pub fn conductor(f: &SupportFunction) -> u64 {
    if f.three() != 0 {
        9 * f.delta()
    } else {
        f.delta()
    }
}
