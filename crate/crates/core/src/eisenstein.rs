//! Exact arithmetic in the Eisenstein integers `Z[j]`, `j = (-1 + i√3)/2`,
//! standard decompositions of split primes and the cubic residue symbol.
//!
//! Elements are stored as `a + b·j` with `i128` coefficients. Every operation
//! is checked; coefficients below `2^62` in absolute value never overflow in a
//! single product or norm.

use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::ops::{Mul, Neg};
use std::path::Path;

use num_complex::Complex;
use num_traits::{Float, FloatConst};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, mod_pow};
use crate::error::{HeisError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EisensteinInt {
    pub a: i128,
    pub b: i128,
}

impl fmt::Display for EisensteinInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b < 0 {
            write!(f, "{}-{}j", self.a, -self.b)
        } else {
            write!(f, "{}+{}j", self.a, self.b)
        }
    }
}

impl EisensteinInt {
    pub const ZERO: Self = Self { a: 0, b: 0 };
    pub const ONE: Self = Self { a: 1, b: 0 };
    pub const J: Self = Self { a: 0, b: 1 };

    pub const fn new(a: i128, b: i128) -> Self {
        Self { a, b }
    }

    pub const fn from_int(a: i128) -> Self {
        Self { a, b: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// `a² − ab + b²`.
    pub fn norm(&self) -> Result<i128> {
        let ovf = || HeisError::Overflow("Eisenstein norm");
        let aa = self.a.checked_mul(self.a).ok_or_else(ovf)?;
        let ab = self.a.checked_mul(self.b).ok_or_else(ovf)?;
        let bb = self.b.checked_mul(self.b).ok_or_else(ovf)?;
        aa.checked_sub(ab).and_then(|v| v.checked_add(bb)).ok_or_else(ovf)
    }

    /// Complex conjugate: `conj(a + bj) = (a − b) − bj`.
    pub fn conj(&self) -> Result<Self> {
        let a = self.a.checked_sub(self.b).ok_or(HeisError::Overflow("conjugate"))?;
        let b = self.b.checked_neg().ok_or(HeisError::Overflow("conjugate"))?;
        Ok(Self { a, b })
    }

    pub fn checked_add(&self, o: &Self) -> Option<Self> {
        Some(Self {
            a: self.a.checked_add(o.a)?,
            b: self.b.checked_add(o.b)?,
        })
    }

    pub fn checked_sub(&self, o: &Self) -> Option<Self> {
        Some(Self {
            a: self.a.checked_sub(o.a)?,
            b: self.b.checked_sub(o.b)?,
        })
    }

    /// `(a + bj)(c + dj) = (ac − bd) + (ad + bc − bd) j`, using `j² = −1 − j`.
    pub fn checked_mul(&self, o: &Self) -> Option<Self> {
        let ac = self.a.checked_mul(o.a)?;
        let bd = self.b.checked_mul(o.b)?;
        let ad = self.a.checked_mul(o.b)?;
        let bc = self.b.checked_mul(o.a)?;
        Some(Self {
            a: ac.checked_sub(bd)?,
            b: ad.checked_add(bc)?.checked_sub(bd)?,
        })
    }

    /// Multiplication by `j`: `j(a + bj) = −b + (a − b) j`.
    pub fn mul_j(&self) -> Option<Self> {
        Some(Self {
            a: self.b.checked_neg()?,
            b: self.a.checked_sub(self.b)?,
        })
    }

    /// The six associates `u·z`, `u ∈ {1, j, j², −1, −j, −j²}`, in that order.
    pub fn associates(&self) -> Result<[Self; 6]> {
        let ovf = || HeisError::Overflow("associates");
        let z1 = *self;
        let zj = z1.mul_j().ok_or_else(ovf)?;
        let zj2 = zj.mul_j().ok_or_else(ovf)?;
        Ok([
            z1,
            zj,
            zj2,
            z1.checked_neg_opt().ok_or_else(ovf)?,
            zj.checked_neg_opt().ok_or_else(ovf)?,
            zj2.checked_neg_opt().ok_or_else(ovf)?,
        ])
    }

    fn checked_neg_opt(&self) -> Option<Self> {
        Some(Self {
            a: self.a.checked_neg()?,
            b: self.b.checked_neg()?,
        })
    }

    /// `≡ 2 (mod 3)`, i.e. `a ≡ 2` and `b ≡ 0 (mod 3)`.
    pub fn is_primary(&self) -> bool {
        self.a.rem_euclid(3) == 2 && self.b.rem_euclid(3) == 0
    }

    /// Euclidean division: `n = q·d + rem` with `N(rem) < N(d)`.
    ///
    /// `q` rounds each coordinate of `n·conj(d)/N(d)` to the nearest integer,
    /// ties toward zero.
    pub fn divrem(&self, d: &Self) -> Result<(Self, Self)> {
        if d.is_zero() {
            return Err(HeisError::DivisionByZero);
        }
        let ovf = || HeisError::Overflow("divrem");
        let nd = d.norm()?;
        let num = self.checked_mul(&d.conj()?).ok_or_else(ovf)?;
        let q = Self {
            a: round_div(num.a, nd),
            b: round_div(num.b, nd),
        };
        let rem = self.checked_sub(&q.checked_mul(d).ok_or_else(ovf)?).ok_or_else(ovf)?;
        debug_assert!(rem.norm()? < nd);
        Ok((q, rem))
    }

    pub fn rem(&self, d: &Self) -> Result<Self> {
        Ok(self.divrem(d)?.1)
    }

    /// Whether `self` divides `z` in `Z[j]`.
    pub fn divides(&self, z: &Self) -> Result<bool> {
        if self.is_zero() {
            return Ok(z.is_zero());
        }
        let n = self.norm()?;
        let t = z
            .checked_mul(&self.conj()?)
            .ok_or(HeisError::Overflow("divisibility test"))?;
        Ok(t.a % n == 0 && t.b % n == 0)
    }

    /// A greatest common divisor (defined up to units).
    pub fn gcd(&self, other: &Self) -> Result<Self> {
        let (mut x, mut y) = (*self, *other);
        while !y.is_zero() {
            let r = x.rem(&y)?;
            x = y;
            y = r;
        }
        Ok(x)
    }

    pub fn to_complex<F: Float + FloatConst>(&self) -> Complex<F> {
        let a = F::from(self.a).unwrap();
        let b = F::from(self.b).unwrap();
        let half = F::from(0.5).unwrap();
        let s3 = F::from(3.0).unwrap().sqrt();
        Complex::new(a - half * b, half * s3 * b)
    }
}

impl Mul for EisensteinInt {
    type Output = EisensteinInt;

    fn mul(self, rhs: Self) -> Self {
        self.checked_mul(&rhs).expect("Eisenstein product overflow")
    }
}

impl Neg for EisensteinInt {
    type Output = EisensteinInt;

    fn neg(self) -> Self {
        self.checked_neg_opt().expect("Eisenstein negation overflow")
    }
}

fn round_div(x: i128, m: i128) -> i128 {
    debug_assert!(m > 0);
    let q = x / m;
    let r = x % m;
    if 2 * r.unsigned_abs() > m.unsigned_abs() {
        q + x.signum()
    } else {
        q
    }
}

/// The unique associate of `z` that is primary.
pub fn primary_associate(z: &EisensteinInt) -> Result<EisensteinInt> {
    if z.norm()? % 3 == 0 {
        return Err(HeisError::NotCoprimeToThree(z.to_string()));
    }
    let assoc = z.associates()?;
    let mut found = assoc.iter().filter(|u| u.is_primary());
    let first = *found
        .next()
        .expect("some associate of an element prime to 3 is primary");
    debug_assert!(found.next().is_none(), "primary associate must be unique");
    Ok(first)
}

/// A value of a cubic Dirichlet character: zero or `j^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CharValue {
    Zero,
    Root(u8),
}

impl CharValue {
    pub const ONE: CharValue = CharValue::Root(0);

    pub fn root(e: i64) -> Self {
        CharValue::Root(e.rem_euclid(3) as u8)
    }

    pub fn is_one(&self) -> bool {
        *self == CharValue::Root(0)
    }

    /// Power with the `z^0 = 1` convention (so `Zero^0 = 1`).
    pub fn pow(self, k: u8) -> Self {
        match (self, k % 3) {
            (_, 0) => CharValue::ONE,
            (CharValue::Zero, _) => CharValue::Zero,
            (CharValue::Root(e), k) => CharValue::Root((e * k) % 3),
        }
    }

    pub fn conj(self) -> Self {
        match self {
            CharValue::Zero => CharValue::Zero,
            CharValue::Root(e) => CharValue::Root((3 - e) % 3),
        }
    }

    /// `1 + v + v²`: 3 when `v = 1`, 0 for the primitive cube roots, `None` for zero.
    pub fn one_plus_v_plus_v2(self) -> Option<u8> {
        match self {
            CharValue::Zero => None,
            CharValue::Root(0) => Some(3),
            CharValue::Root(_) => Some(0),
        }
    }

    pub fn to_complex<F: Float + FloatConst>(self) -> Complex<F> {
        match self {
            CharValue::Zero => Complex::new(F::zero(), F::zero()),
            CharValue::Root(e) => {
                let theta = F::TAU() * F::from(e).unwrap() / F::from(3.0).unwrap();
                Complex::new(theta.cos(), theta.sin())
            }
        }
    }
}

impl Mul for CharValue {
    type Output = CharValue;

    fn mul(self, rhs: Self) -> Self {
        match (self, rhs) {
            (CharValue::Root(a), CharValue::Root(b)) => CharValue::Root((a + b) % 3),
            _ => CharValue::Zero,
        }
    }
}

impl fmt::Display for CharValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharValue::Zero => write!(f, "0"),
            CharValue::Root(0) => write!(f, "1"),
            CharValue::Root(1) => write!(f, "j"),
            CharValue::Root(_) => write!(f, "j^2"),
        }
    }
}

/// A split prime `p = π·conj(π)` with `π` primary, `Im π > 0`, and the image
/// `r` of `j` in `Z[j]/(π) ≅ F_p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StandardPrime {
    pub p: u64,
    pub pi: EisensteinInt,
    pub r: u64,
}

impl fmt::Display for StandardPrime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p={} pi={} r={}", self.p, self.pi, self.r)
    }
}

impl StandardPrime {
    /// Checks every invariant; used by the cache loader and the tests.
    pub fn validate(&self) -> std::result::Result<(), String> {
        let p = self.p;
        if p % 3 != 1 || !is_prime(p) {
            return Err(format!("{p} is not a prime congruent to 1 mod 3"));
        }
        if self.pi.norm().map_err(|e| e.to_string())? != i128::from(p) {
            return Err(format!("norm of {} is not {p}", self.pi));
        }
        if !self.pi.is_primary() {
            return Err(format!("{} is not primary", self.pi));
        }
        if self.pi.b <= 0 {
            return Err(format!("{} has non-positive imaginary part", self.pi));
        }
        if self.r < 2 || self.r > p - 2 {
            return Err(format!("r = {} outside [2, p-2]", self.r));
        }
        let r = u128::from(self.r);
        if (r * r + r + 1) % u128::from(p) != 0 {
            return Err(format!("r = {} is not a cube root of unity mod {p}", self.r));
        }
        let j_minus_r = EisensteinInt::new(-(self.r as i128), 1);
        if !self.pi.divides(&j_minus_r).map_err(|e| e.to_string())? {
            return Err(format!("{} does not divide j - {}", self.pi, self.r));
        }
        Ok(())
    }

    /// Reduction `Z[j] → F_p`, `a + bj ↦ a + b·r`.
    pub fn to_fp(&self, z: &EisensteinInt) -> u64 {
        let p = i128::from(self.p);
        let a = z.a.rem_euclid(p) as u128;
        let b = z.b.rem_euclid(p) as u128;
        ((a + b * u128::from(self.r)) % u128::from(self.p)) as u64
    }

    /// `χ_p(n) = (n/π)_3` for a rational integer `n`.
    pub fn chi(&self, n: i128) -> CharValue {
        let n = n.rem_euclid(i128::from(self.p)) as u64;
        self.symbol_of_residue(n)
    }

    fn symbol_of_residue(&self, n: u64) -> CharValue {
        if n == 0 {
            return CharValue::Zero;
        }
        let v = mod_pow(n, (self.p - 1) / 3, self.p);
        if v == 1 {
            CharValue::Root(0)
        } else if v == self.r {
            CharValue::Root(1)
        } else {
            debug_assert_eq!(
                u128::from(v),
                u128::from(self.r) * u128::from(self.r) % u128::from(self.p)
            );
            CharValue::Root(2)
        }
    }
}

/// Standard decomposition of a prime `p ≡ 1 (mod 3)`.
pub fn standard_decompose(p: u64) -> Result<StandardPrime> {
    if p % 3 != 1 || !is_prime(p) || p >= (1u64 << 62) {
        return Err(HeisError::NotSplitPrime(p));
    }
    let e = (p - 1) / 3;
    // Smallest g >= 2 whose (p-1)/3 power is a primitive cube root of unity.
    let omega = (2..p)
        .map(|g| mod_pow(g, e, p))
        .find(|&w| w != 1)
        .expect("a non-cube exists modulo p");
    let pp = EisensteinInt::from_int(i128::from(p));
    let g = pp.gcd(&EisensteinInt::new(i128::from(omega), -1))?;
    debug_assert_eq!(g.norm()?, i128::from(p));
    let mut pi = primary_associate(&g)?;
    if pi.b < 0 {
        pi = pi.conj()?;
    }
    let omega2 = mod_pow(omega, 2, p);
    let r = [omega, omega2]
        .into_iter()
        .find(|&r| pi.divides(&EisensteinInt::new(-(r as i128), 1)).unwrap_or(false))
        .expect("exactly one cube root of unity is the image of j");
    let sp = StandardPrime { p, pi, r };
    debug_assert!(sp.validate().is_ok());
    Ok(sp)
}

/// `(α/π)_3` via the image of `α` in `F_p`.
pub fn cubic_symbol(alpha: &EisensteinInt, sp: &StandardPrime) -> CharValue {
    sp.symbol_of_residue(sp.to_fp(alpha))
}

/// `(α/π)_3` via Euler's criterion computed entirely in `Z[j]/(π)`.
pub fn cubic_symbol_euler(alpha: &EisensteinInt, sp: &StandardPrime) -> Result<CharValue> {
    let p = i128::from(sp.p);
    let pi = sp.pi;
    let reduced = EisensteinInt::new(alpha.a.rem_euclid(p), alpha.b.rem_euclid(p));
    let base = reduced.rem(&pi)?;
    if base.is_zero() {
        return Ok(CharValue::Zero);
    }
    let mut acc = EisensteinInt::ONE;
    let mut b = base;
    let mut k = (sp.p - 1) / 3;
    let ovf = || HeisError::Overflow("cubic symbol");
    while k > 0 {
        if k & 1 == 1 {
            acc = acc.checked_mul(&b).ok_or_else(ovf)?.rem(&pi)?;
        }
        b = b.checked_mul(&b).ok_or_else(ovf)?.rem(&pi)?;
        k >>= 1;
    }
    let mut jm = EisensteinInt::ONE;
    for m in 0..3u8 {
        if pi.divides(&acc.checked_sub(&jm).ok_or_else(ovf)?)? {
            return Ok(CharValue::Root(m));
        }
        jm = jm.mul_j().ok_or_else(ovf)?;
    }
    unreachable!("α^((p−1)/3) is a cube root of unity modulo π")
}

/// `χ_p(n)` for a prime `p ≡ 1 (mod 3)`.
pub fn chi_p(p: u64, n: i128) -> Result<CharValue> {
    Ok(standard_decompose(p)?.chi(n))
}

/// The cubic character modulo 9 with `χ_3(2) = j`.
pub fn chi_nine(n: i128) -> CharValue {
    match n.rem_euclid(9) {
        1 | 8 => CharValue::Root(0),
        2 | 7 => CharValue::Root(1),
        4 | 5 => CharValue::Root(2),
        _ => CharValue::Zero,
    }
}

/// Sorted table of standard primes, optionally persisted as a TSV cache
/// (`p<TAB>a<TAB>b<TAB>r`, one record per line, no header).
#[derive(Clone, Debug, Default)]
pub struct StandardPrimeTable {
    primes: Vec<StandardPrime>,
    limit: u64,
}

pub const CACHE_FILE_NAME: &str = "standard_primes.tsv";

impl StandardPrimeTable {
    pub fn build(limit: u64) -> Result<Self> {
        let ps = crate::arith::primes_one_mod(limit, 3);
        let primes = ps.into_iter().map(standard_decompose).collect::<Result<Vec<_>>>()?;
        Ok(Self { primes, limit })
    }

    pub fn from_primes(mut primes: Vec<StandardPrime>, limit: u64) -> Self {
        primes.sort_by_key(|s| s.p);
        Self { primes, limit }
    }

    /// Loads `dir/standard_primes.tsv` when it covers `limit`, otherwise builds
    /// the table and rewrites the cache. Without a directory this is `build`.
    pub fn load_or_build(limit: u64, dir: Option<&Path>) -> Result<Self> {
        let Some(dir) = dir else {
            return Self::build(limit);
        };
        let path = dir.join(CACHE_FILE_NAME);
        if path.exists() {
            let cached = read_cache(&path)?;
            let covered = cached.last().map_or(0, |s| s.p);
            // The cache is a prefix of the split primes; it covers `limit` if the
            // next split prime after its last entry exceeds `limit`.
            let mut next = covered + 1;
            while next <= limit && !(next % 3 == 1 && is_prime(next)) {
                next += 1;
            }
            if next > limit {
                let primes: Vec<_> = cached.into_iter().filter(|s| s.p <= limit).collect();
                return Ok(Self { primes, limit });
            }
        }
        let table = Self::build(limit)?;
        std::fs::create_dir_all(dir)?;
        write_cache(&path, &table.primes)?;
        Ok(table)
    }

    pub fn primes(&self) -> &[StandardPrime] {
        &self.primes
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn get(&self, p: u64) -> Option<&StandardPrime> {
        self.primes
            .binary_search_by_key(&p, |s| s.p)
            .ok()
            .map(|i| &self.primes[i])
    }
}

pub fn write_cache(path: &Path, primes: &[StandardPrime]) -> Result<()> {
    let tmp = path.with_extension("tsv.tmp");
    {
        let mut w = std::io::BufWriter::new(std::fs::File::create(&tmp)?);
        for s in primes {
            writeln!(w, "{}\t{}\t{}\t{}", s.p, s.pi.a, s.pi.b, s.r)?;
        }
        w.flush()?;
    }
    std::fs::rename(tmp, path)?;
    Ok(())
}

/// Reads a cache file, revalidating every record and the sort order.
pub fn read_cache(path: &Path) -> Result<Vec<StandardPrime>> {
    let reader = BufReader::new(std::fs::File::open(path)?);
    let mut out: Vec<StandardPrime> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let bad = |reason: String| HeisError::CorruptCache { line: lineno, reason };
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", fields.len())));
        }
        let p: u64 = fields[0].parse().map_err(|_| bad("bad p".into()))?;
        let a: i128 = fields[1].parse().map_err(|_| bad("bad a".into()))?;
        let b: i128 = fields[2].parse().map_err(|_| bad("bad b".into()))?;
        let r: u64 = fields[3].parse().map_err(|_| bad("bad r".into()))?;
        let sp = StandardPrime {
            p,
            pi: EisensteinInt::new(a, b),
            r,
        };
        sp.validate().map_err(bad)?;
        if out.last().is_some_and(|prev| prev.p >= p) {
            return Err(bad("records not strictly sorted by p".into()));
        }
        out.push(sp);
    }
    Ok(out)
}
