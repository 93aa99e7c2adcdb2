//! `α_ℓ = ℓ/(ℓ+1) ∏_p (1 + 1/p + Σ_k χ_k(p)/p)(1 − 1/p)`, the residue constant
//! of `K(x; ℓ, d)`. The product converges only conditionally, so it is
//! multiplied and divided by `∏_k L(1, χ_k)`; what is left has factors
//! `1 + O(p^{-2})`.

use num_complex::Complex;

use super::lfunc::{l_one_psi3, DirichletCharacter};
use super::{from_u64, lit, Real};
use crate::arith::{for_each_prime, is_prime, mod_pow, prime_factors, CompensatedSum};
use crate::error::{HeisError, Result};

/// A value with an estimate of the truncation error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Truncated<F> {
    pub value: F,
    pub tail: F,
}

/// `α_3` with primes up to `p_max`:
/// `(3/4) L(1, (·/3)) · (8/9) · ∏_{p ≡ 1} (1 − 3/p² + 2/p³) · ∏_{p ≡ 2} (1 − 1/p²)`.
pub fn alpha3<F: Real>(p_max: u64) -> Truncated<F> {
    let mut log = CompensatedSum::<F>::new();
    for_each_prime(p_max, |p| {
        let x = from_u64::<F>(p).recip();
        let factor = match p % 3 {
            0 => lit::<F>(8.0 / 9.0),
            1 => F::one() - lit::<F>(3.0) * x * x + lit::<F>(2.0) * x * x * x,
            _ => F::one() - x * x,
        };
        log.add(factor.ln());
    });
    let value = lit::<F>(0.75) * l_one_psi3::<F>() * log.value().exp();
    Truncated {
        value,
        tail: value * product_tail::<F>(p_max, 2.0),
    }
}

/// Relative size of `∏_{p > P} (1 + O(c/p²))`, roughly `c/(P log P)`.
fn product_tail<F: Real>(p_max: u64, c: f64) -> F {
    let p = from_u64::<F>(p_max.max(3));
    lit::<F>(c) / (p * p.ln())
}

/// `α_ℓ` for any odd prime `ℓ`, renormalized by the `ℓ − 2` nonprincipal
/// characters mod `ℓ` (all primitive since `ℓ` is prime).
pub fn alpha_ell<F: Real>(ell: u64, p_max: u64) -> Result<Truncated<F>> {
    if ell < 3 || !is_prime(ell) {
        return Err(HeisError::InvalidArgument(format!("ell = {ell} must be an odd prime")));
    }
    let g = primitive_root(ell);
    // Discrete logarithms base g.
    let mut ind = vec![0u64; ell as usize];
    let mut x = 1u64;
    for k in 0..ell - 1 {
        ind[x as usize] = k;
        x = x * g % ell;
    }
    let order = ell - 1;
    let root = |k: u64| {
        let theta = F::TAU() * from_u64::<F>(k % order) / from_u64::<F>(order);
        Complex::new(theta.cos(), theta.sin())
    };
    let chars: Vec<DirichletCharacter<F>> = (1..order)
        .map(|k| {
            DirichletCharacter::new(
                (0..ell)
                    .map(|a| {
                        if a == 0 {
                            Complex::new(F::zero(), F::zero())
                        } else {
                            root(k * ind[a as usize])
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    let l_product = chars
        .iter()
        .fold(Complex::new(F::one(), F::zero()), |acc, c| acc * c.l_one_closed());

    let mut log = CompensatedSum::<F>::new();
    for_each_prime(p_max, |p| {
        let x = from_u64::<F>(p).recip();
        let mut first = Complex::new(F::one() + x, F::zero());
        let mut renorm = Complex::new(F::one(), F::zero());
        for c in &chars {
            let v = c.value(p) * x;
            first = first + v;
            renorm = renorm * (Complex::new(F::one(), F::zero()) - v);
        }
        let factor = first * (F::one() - x) * renorm;
        log.add(factor.re.ln());
    });
    let value = from_u64::<F>(ell) / from_u64::<F>(ell + 1) * l_product.re * log.value().exp();
    Ok(Truncated {
        value,
        tail: value * product_tail::<F>(p_max, (ell * ell) as f64),
    })
}

fn primitive_root(q: u64) -> u64 {
    let fs = prime_factors(q - 1);
    (2..q)
        .find(|&g| fs.iter().all(|&r| mod_pow(g, (q - 1) / r, q) != 1))
        .expect("prime modulus has a primitive root")
}
