//! Reference implementations used as oracles by the integration tests. They
//! follow the definitions by brute force and share no code path with the
//! library beyond its public types.

#![allow(dead_code)]

use std::collections::BTreeMap;

use heis_core::SupportFunction;

pub fn pow_mod(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn sieve(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut comp = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !comp[i] {
            out.push(i as u64);
            let mut k = i * i;
            while k <= n {
                comp[k] = true;
                k += i;
            }
        }
    }
    out
}

/// Eisenstein integers as pairs `(a, b) = a + bj` with `j² = −1 − j`.
pub fn eis_mul(x: (i128, i128), y: (i128, i128)) -> (i128, i128) {
    let (a, b) = x;
    let (c, d) = y;
    (a * c - b * d, a * d + b * c - b * d)
}

pub fn eis_norm(x: (i128, i128)) -> i128 {
    x.0 * x.0 - x.0 * x.1 + x.1 * x.1
}

pub fn eis_conj(x: (i128, i128)) -> (i128, i128) {
    (x.0 - x.1, -x.1)
}

/// The unique `π = a + bj` with norm `p`, `a ≡ 2`, `b ≡ 0 (mod 3)` and
/// `b > 0`, found by scanning a box, together with every `r` in `1..p` such
/// that `π | j − r`.
pub fn lattice_decompose(p: u64) -> (Vec<(i128, i128)>, Vec<u64>) {
    let p = p as i128;
    let bound = 2 * ((p as f64).sqrt() as i128) + 2;
    let mut found = Vec::new();
    for a in -bound..=bound {
        for b in 1..=bound {
            if a.rem_euclid(3) == 2 && b % 3 == 0 && eis_norm((a, b)) == p {
                found.push((a, b));
            }
        }
    }
    let mut rs = Vec::new();
    if let Some(&pi) = found.first() {
        // π | z  ⇔  z·conj(π) ≡ 0 coordinatewise mod p.
        for r in 1..p {
            let z = eis_mul((-r, 1), eis_conj(pi));
            if z.0 % p == 0 && z.1 % p == 0 {
                rs.push(r as u64);
            }
        }
    }
    (found, rs)
}

/// Exponent `k` with `n^{(q−1)/3} ≡ r^k (mod q)`; `None` when `q | n`.
pub fn rational_exponent(q: u64, r: u64, n: i128) -> Option<u8> {
    let qq = q as i128;
    let n = n.rem_euclid(qq) as u128;
    if n == 0 {
        return None;
    }
    let t = pow_mod(n, u128::from((q - 1) / 3), u128::from(q));
    let r = u128::from(r);
    if t == 1 {
        Some(0)
    } else if t == r {
        Some(1)
    } else if t == r * r % u128::from(q) {
        Some(2)
    } else {
        panic!("{n}^((q-1)/3) mod {q} is not a cube root of unity")
    }
}

/// The order-3 character mod 9 with `χ(2) = j`, as an exponent.
pub fn nine_exponent(n: i128) -> Option<u8> {
    match n.rem_euclid(9) {
        1 | 8 => Some(0),
        2 | 7 => Some(1),
        4 | 5 => Some(2),
        _ => None,
    }
}

/// `r` of the standard decomposition for every split prime up to `limit`.
pub struct Oracle {
    pub r: BTreeMap<u64, u64>,
}

impl Oracle {
    pub fn new(limit: u64) -> Self {
        let r = sieve(limit)
            .into_iter()
            .filter(|p| p % 3 == 1)
            .map(|p| {
                let (pis, rs) = lattice_decompose(p);
                assert_eq!((pis.len(), rs.len()), (1, 1), "decomposition of {p}");
                (p, rs[0])
            })
            .collect();
        Self { r }
    }

    /// Exponent of `χ_p(n)`, `p ∈ P_3`.
    pub fn chi_prime(&self, p: u64, n: i128) -> Option<u8> {
        if p == 3 {
            nine_exponent(n)
        } else {
            rational_exponent(p, self.r[&p], n)
        }
    }

    /// Exponent of `χ(f)(n) = ∏ χ_p(n)^{f(p)}`; `None` is the value zero.
    pub fn chi(&self, f: &[(u64, u8)], n: i128) -> Option<u8> {
        let mut e = 0u32;
        for &(p, v) in f {
            if v % 3 == 0 {
                continue;
            }
            e += u32::from(self.chi_prime(p, n)?) * u32::from(v);
        }
        Some((e % 3) as u8)
    }

    /// The indicator by direct expansion: for each prime `r ≠ 3` of the joint
    /// support, the average over the kernel of `(z, z′) ↦ z f(r) + z′ f′(r)` of
    /// `χ(z f + z′ f′)(r)`, as complex numbers; the product is rounded.
    pub fn indicator(&self, f: &[(u64, u8)], f2: &[(u64, u8)]) -> u8 {
        let get = |g: &[(u64, u8)], p: u64| g.iter().find(|e| e.0 == p).map_or(0, |e| e.1);
        let mut union: Vec<u64> = f
            .iter()
            .chain(f2)
            .map(|e| e.0)
            .filter(|&p| p != 3 && get(f, p) + get(f2, p) > 0)
            .collect();
        union.sort_unstable();
        union.dedup();
        let (mut re, mut im) = (1.0f64, 0.0f64);
        for &r in &union {
            let (mut sr, mut si) = (0.0, 0.0);
            for z in 0..3u8 {
                for z2 in 0..3u8 {
                    if (z * get(f, r) + z2 * get(f2, r)) % 3 != 0 {
                        continue;
                    }
                    let g = combine(z, f, z2, f2);
                    let e = self.chi(&g, r as i128).expect("kernel combinations vanish at r");
                    let theta = std::f64::consts::TAU * f64::from(e) / 3.0;
                    sr += theta.cos();
                    si += theta.sin();
                }
            }
            let (a, b) = (re * sr - im * si, re * si + im * sr);
            re = a / 3.0;
            im = b / 3.0;
        }
        assert!(im.abs() < 1e-9, "imaginary part {im}");
        let v = re.round();
        assert!((re - v).abs() < 1e-9 && (v == 0.0 || v == 1.0), "indicator value {re}");
        v as u8
    }

    /// The power of 3 in `μ(f, f′)`, row by row.
    pub fn mu(&self, f: &[(u64, u8)], f2: &[(u64, u8)]) -> (u8, u32) {
        let at3 = |g: &[(u64, u8)]| g.iter().find(|e| e.0 == 3).map_or(0, |e| e.1);
        let (a, b) = (at3(f), at3(f2));
        let one_at_3 = |g: &[(u64, u8)]| self.chi(g, 3) == Some(0);
        match (a, b) {
            (0, 0) => (1, 0),
            (0, _) if one_at_3(f) => (2, 8),
            (0, _) => (3, 12),
            (_, 0) if one_at_3(f2) => (4, 12),
            (_, 0) => (5, 16),
            _ if one_at_3(&combine(b, f, (2 * a) % 3, f2)) => (6, 12),
            _ => (7, 16),
        }
    }
}

pub fn combine(z: u8, f: &[(u64, u8)], z2: u8, f2: &[(u64, u8)]) -> Vec<(u64, u8)> {
    let mut m: BTreeMap<u64, u8> = BTreeMap::new();
    for &(p, v) in f {
        *m.entry(p).or_default() += z * v;
    }
    for &(p, v) in f2 {
        *m.entry(p).or_default() += z2 * v;
    }
    m.into_iter().map(|(p, v)| (p, v % 3)).filter(|e| e.1 != 0).collect()
}

pub fn independent(f: &[(u64, u8)], f2: &[(u64, u8)]) -> bool {
    (0..3u8).all(|z| (0..3u8).all(|z2| (z == 0 && z2 == 0) || !combine(z, f, z2, f2).is_empty()))
}

fn delta(f: &[(u64, u8)]) -> u64 {
    f.iter().filter(|e| e.0 != 3).map(|e| e.0).product()
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Squarefree products of split primes up to `n`, with their prime lists.
pub fn split_squarefree(n: u64) -> Vec<(u64, Vec<u64>)> {
    (1..=n)
        .filter_map(|m| {
            let mut k = m;
            let mut ps = Vec::new();
            let mut d = 2;
            while d * d <= k {
                if k % d == 0 {
                    k /= d;
                    if k % d == 0 || d % 3 != 1 {
                        return None;
                    }
                    ps.push(d);
                }
                d += 1;
            }
            if k > 1 {
                if k % 3 != 1 {
                    return None;
                }
                ps.push(k);
            }
            Some((m, ps))
        })
        .collect()
}

/// All support functions over a given prime list, `f(3)` ranging over `F_3`.
fn functions_on(primes: &[u64]) -> Vec<Vec<(u64, u8)>> {
    let mut out = Vec::new();
    for eta in 0..3u8 {
        for bits in 0u32..(1 << primes.len()) {
            let mut f = Vec::new();
            if eta > 0 {
                f.push((3, eta));
            }
            for (i, &p) in primes.iter().enumerate() {
                f.push((p, if bits >> i & 1 == 1 { 2 } else { 1 }));
            }
            f.sort_unstable();
            out.push(f);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ScanTerm {
    pub f: Vec<(u64, u8)>,
    pub f2: Vec<(u64, u8)>,
    pub three_divides_d: bool,
    pub big_d: u128,
    /// 1..=14.
    pub class: u8,
    pub contribution_star: u128,
    pub contribution_full: u128,
}

fn sixth_root(y: u128) -> u128 {
    let mut m = 0u128;
    while (m + 1).pow(6) <= y {
        m += 1;
    }
    m
}

/// Every nonzero contribution at `X`, by scanning all `f` with `Δ(f) <= X^{1/6}`
/// and all `f′` with `Δ(f′) <= X^{1/4}`.
pub fn exhaustive_scan(x: u128, oracle: &Oracle) -> Vec<ScanTerm> {
    let mut d6 = 1u64;
    while u128::from(d6 + 1).pow(6) <= x {
        d6 += 1;
    }
    let mut d4 = 1u64;
    while u128::from(d4 + 1).pow(4) <= x {
        d4 += 1;
    }
    let deltas = split_squarefree(d4);
    let fs: Vec<Vec<(u64, u8)>> = deltas
        .iter()
        .filter(|(m, _)| *m <= d6)
        .flat_map(|(_, ps)| functions_on(ps))
        .filter(|f| !f.is_empty())
        .collect();
    let f2s: Vec<Vec<(u64, u8)>> = deltas
        .iter()
        .flat_map(|(_, ps)| functions_on(ps))
        .filter(|f| !f.is_empty())
        .collect();
    let ds = split_squarefree(sixth_root(x) as u64);
    let mut out = Vec::new();
    for f in &fs {
        let df = delta(f);
        for f2 in &f2s {
            let df2 = delta(f2);
            let free = df2 / gcd(df2, df);
            let base = u128::from(df).pow(6) * u128::from(free).pow(4);
            if base > x || !independent(f, f2) {
                continue;
            }
            let (row, mu) = oracle.mu(f, f2);
            if base * 3u128.pow(mu) > x {
                continue;
            }
            if oracle.indicator(f, f2) == 0 {
                continue;
            }
            let union = {
                let mut u: Vec<u64> = f.iter().chain(f2).map(|e| e.0).filter(|&p| p != 3).collect();
                u.sort_unstable();
                u.dedup();
                u
            };
            let weight = 3u128.pow(union.len() as u32);
            for three in [false, true] {
                let mu_d = if three && row == 1 { 12 } else { mu };
                let big_d = base * 3u128.pow(mu_d);
                if big_d > x {
                    continue;
                }
                // d = m or 3m with m split and squarefree, coprime to Δ(f)Δ(f′),
                // and free(d, 3)⁶ = m⁶ <= X / D.
                let (mut star, mut full) = (0u128, 0u128);
                for (m, ps) in &ds {
                    if u128::from(*m).pow(6) * big_d > x || ps.iter().any(|p| union.contains(p)) {
                        continue;
                    }
                    let w = 1u128 << ps.len();
                    star += w;
                    full += if three { 2 * w } else { w };
                }
                if star == 0 {
                    continue;
                }
                out.push(ScanTerm {
                    f: f.clone(),
                    f2: f2.clone(),
                    three_divides_d: three,
                    big_d,
                    class: row + if three { 7 } else { 0 },
                    contribution_star: weight * star,
                    contribution_full: weight * full,
                });
            }
        }
    }
    out.sort();
    out
}

pub fn entries(f: &SupportFunction) -> Vec<(u64, u8)> {
    f.entries().iter().copied().filter(|e| e.1 != 0).collect()
}
