//! Integer helpers shared by the exact modules: modular powers, primality,
//! exact integer roots, prime sieves and compensated floating sums.

use num_traits::{Float, PrimInt, Unsigned};

/// `base^exp mod m` with 128-bit intermediates.
pub fn mod_pow(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let m128 = u128::from(m);
    let mut acc: u128 = 1;
    let mut b = u128::from(base) % m128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m128;
        }
        b = b * b % m128;
        exp >>= 1;
    }
    acc as u64
}

/// Deterministic Miller-Rabin for the full `u64` range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = mod_pow(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = (u128::from(x) * u128::from(x) % u128::from(n)) as u64;
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime factors of `n` in increasing order (trial division).
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

pub fn is_squarefree(mut n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut p = 2u64;
    while p.saturating_mul(p) <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

/// Largest `m` with `m^n <= y`.
///
/// Starts from a floating estimate, then settles with exact checked powers, so
/// the answer never depends on floating rounding.
pub fn iroot<T>(y: T, n: u32) -> T
where
    T: PrimInt + Unsigned,
{
    assert!(n >= 1, "root index must be positive");
    if n == 1 || y <= T::one() {
        return y;
    }
    // `m^n <= y` without overflow.
    let fits = |m: T| -> bool {
        let mut acc = T::one();
        for _ in 0..n {
            match acc.checked_mul(&m) {
                Some(v) if v <= y => acc = v,
                _ => return false,
            }
        }
        true
    };
    // Integer Newton iteration from above: x_{k+1} = ((n-1) x_k + y / x_k^{n-1}) / n.
    let bits = T::zero().count_zeros() - y.leading_zeros();
    let mut x = T::one() << ((bits / n + 1) as usize);
    let nn = T::from(n).unwrap();
    let n1 = T::from(n - 1).unwrap();
    loop {
        let mut pow = T::one();
        let mut overflow = false;
        for _ in 0..n - 1 {
            match pow.checked_mul(&x) {
                Some(v) => pow = v,
                None => {
                    overflow = true;
                    break;
                }
            }
        }
        let quotient = if overflow { T::zero() } else { y / pow };
        let next = (n1 * x + quotient) / nn;
        if next >= x {
            break;
        }
        x = next;
    }
    while !fits(x) {
        x = x - T::one();
    }
    while fits(x + T::one()) {
        x = x + T::one();
    }
    x
}

/// Largest `m` with `m^6 <= y`.
pub fn isixth_root(y: u128) -> u128 {
    iroot(y, 6)
}

/// Largest `m` with `m^4 <= y`.
pub fn ifourth_root(y: u128) -> u128 {
    iroot(y, 4)
}

/// All primes `<= limit` (plain Eratosthenes).
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Primes `p <= limit` with `p ≡ 1 (mod modulus)`, from a segmented sieve so the
/// memory footprint stays at `O(sqrt(limit))` plus the output.
pub fn primes_one_mod(limit: u64, modulus: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime(limit, |p| {
        if p % modulus == 1 {
            out.push(p);
        }
    });
    out
}

/// Calls `visit` on every prime `<= limit` in increasing order.
pub fn for_each_prime(limit: u64, mut visit: impl FnMut(u64)) {
    if limit < 2 {
        return;
    }
    const SEGMENT: u64 = 1 << 18;
    let root = iroot(limit, 2);
    let base = primes_up_to(root);
    let mut low = 2u64;
    let mut mark = vec![false; SEGMENT as usize];
    while low <= limit {
        let high = limit.min(low + SEGMENT - 1);
        let len = (high - low + 1) as usize;
        mark[..len].iter_mut().for_each(|m| *m = false);
        for &p in &base {
            if p * p > high {
                break;
            }
            let start = (p * p).max(low.div_ceil(p) * p);
            let mut k = start;
            while k <= high {
                mark[(k - low) as usize] = true;
                k += p;
            }
        }
        for (i, &composite) in mark[..len].iter().enumerate() {
            if !composite {
                visit(low + i as u64);
            }
        }
        low = high + 1;
    }
}

/// Neumaier-compensated running sum; deterministic for a fixed summation order.
#[derive(Clone, Copy, Debug)]
pub struct CompensatedSum<F> {
    sum: F,
    carry: F,
}

impl<F: Float> Default for CompensatedSum<F> {
    fn default() -> Self {
        Self::new()
    }
}

impl<F: Float> CompensatedSum<F> {
    pub fn new() -> Self {
        Self {
            sum: F::zero(),
            carry: F::zero(),
        }
    }

    pub fn add(&mut self, x: F) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> F {
        self.sum + self.carry
    }
}

impl<F: Float> std::iter::FromIterator<F> for CompensatedSum<F> {
    fn from_iter<I: IntoIterator<Item = F>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}
