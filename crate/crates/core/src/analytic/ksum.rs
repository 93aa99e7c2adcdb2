//! The multiplicative sum `K(x; ℓ, d) = Σ (ℓ−1)^{ω(n)}` over squarefree
//! `n <= x` built from primes `≡ 1 (mod ℓ)` and coprime to `d`.

use num_rational::Ratio;

use crate::arith::{for_each_prime, is_prime, prime_factors};
use crate::error::{HeisError, Result};

/// Largest `x` accepted by [`k_direct`]; the prime list grows linearly in `x`.
pub const K_DIRECT_MAX: u64 = 1_000_000_000;

/// Reusable prime list for repeated `K` evaluations below a fixed limit.
#[derive(Clone, Debug)]
pub struct KSummer {
    ell: u64,
    limit: u64,
    primes: Vec<u64>,
}

impl KSummer {
    pub fn new(limit: u64, ell: u64) -> Result<Self> {
        if !is_prime(ell) {
            return Err(HeisError::InvalidArgument(format!("ell = {ell} is not prime")));
        }
        if limit > K_DIRECT_MAX {
            return Err(HeisError::OutOfRange {
                what: "x",
                value: u128::from(limit),
                limit: u128::from(K_DIRECT_MAX),
            });
        }
        let mut primes = Vec::new();
        for_each_prime(limit, |p| {
            if p % ell == 1 {
                primes.push(p);
            }
        });
        Ok(Self { ell, limit, primes })
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `K(x; ℓ, d)` for `x <= limit`, excluding the primes listed in `excluded`.
    pub fn k_excluding(&self, x: u64, excluded: &[u64]) -> u128 {
        assert!(x <= self.limit, "x beyond the sieved range");
        if x == 0 {
            return 0;
        }
        let allowed: Vec<u64>;
        let primes: &[u64] = if excluded.iter().any(|q| self.primes.binary_search(q).is_ok()) {
            allowed = self.primes.iter().copied().filter(|p| !excluded.contains(p)).collect();
            &allowed
        } else {
            &self.primes
        };
        let end = primes.partition_point(|&p| p <= x);
        dfs(&primes[..end], x, 1, 1, u128::from(self.ell - 1))
    }

    pub fn k(&self, x: u64, d: u64) -> u128 {
        self.k_excluding(x, &prime_factors(d))
    }
}

// Counts `m` itself, then every extension `m·p·…` with increasing primes. When
// `p` is the last prime that fits, the remaining primes are counted in bulk.
fn dfs(primes: &[u64], x: u64, m: u64, weight: u128, unit: u128) -> u128 {
    let mut total = weight;
    let cap = x / m;
    for (i, &p) in primes.iter().enumerate() {
        if p > cap {
            break;
        }
        let rest = &primes[i + 1..];
        match rest.first() {
            Some(&next) if next <= cap / p => {
                total += dfs(rest, x, m * p, weight * unit, unit);
            }
            _ => {
                let count = primes[i..].partition_point(|&q| q <= cap) as u128;
                total += weight * unit * count;
                break;
            }
        }
    }
    total
}

/// `K(x; ℓ, d)` computed from scratch.
pub fn k_direct(x: u64, ell: u64, d: u64) -> Result<u128> {
    Ok(KSummer::new(x, ell)?.k(x, d))
}

/// `ψ_ℓ(d) = ∏_{p | d} (1 + (ℓ−1)/p)^{−1}`, exactly.
pub fn psi_ell(d: u64, ell: u64) -> Result<Ratio<u128>> {
    if d == 0 || !crate::arith::is_squarefree(d) {
        return Err(HeisError::NotSquarefree(d));
    }
    Ok(prime_factors(d)
        .into_iter()
        .map(|p| Ratio::new(u128::from(p), u128::from(p + ell - 1)))
        .fold(Ratio::from_integer(1), |acc, r| acc * r))
}
