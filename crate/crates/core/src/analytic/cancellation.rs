//! Empirical cancellation in sums over split primes `p ≤ x` of
//! `M(p) = χ(f)(p)^{ε₁ + 2ε₂} · ∏_{r | Δ(f)} χ_p(r)^{e₁ᵣ + 2e₂ᵣ}`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::Serialize;

use super::lfunc::{cube_roots, exponent_at, support_tables};
use super::{from_u64, Real};
use crate::arith::primes_one_mod;
use crate::charspace::SupportFunction;
use crate::eisenstein::{standard_decompose, CharValue};
use crate::error::{HeisError, Result};

pub const CANCELLATION_X_MAX: u64 = 1_000_000_000;

/// Exponents `(ε₁, ε₂)` and `(e₁ᵣ, e₂ᵣ)` for the primes `r` listed; unlisted
/// support primes get `(0, 0)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CancellationPattern {
    pub eps: [u8; 2],
    pub exps: Vec<(u64, [u8; 2])>,
}

impl CancellationPattern {
    pub fn validate(&self, f: &SupportFunction) -> Result<()> {
        let bad = |m: &str| Err(HeisError::BadPattern(m.to_string()));
        if f.is_zero() {
            return Err(HeisError::ZeroFunction);
        }
        if f.three() != 0 {
            return bad("f(3) must be 0");
        }
        if self.eps[0] + self.eps[1] > 1 {
            return bad("eps1 + eps2 must be at most 1");
        }
        let mut total = 0u32;
        for (i, &(r, [e1, e2])) in self.exps.iter().enumerate() {
            if f.get(r) == 0 || r == 3 {
                return bad(&format!("{r} is not in supp_3 f"));
            }
            if self.exps[..i].iter().any(|e| e.0 == r) {
                return bad(&format!("{r} listed twice"));
            }
            if e1 + e2 > 1 {
                return bad(&format!("e1 + e2 must be at most 1 at {r}"));
            }
            total += u32::from(e1 + e2);
        }
        if total == 0 {
            return bad("some e1r + e2r must be 1");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CancellationSum<F: Real + Serialize> {
    pub x: u64,
    /// Number of primes summed over.
    pub count: u64,
    pub sum_re: F,
    pub sum_im: F,
}

impl<F: Real + Serialize> CancellationSum<F> {
    pub fn sum(&self) -> Complex<F> {
        Complex::new(self.sum_re, self.sum_im)
    }

    /// `|Σ M(p)| / #{p}`.
    pub fn normalized(&self) -> F {
        if self.count == 0 {
            F::zero()
        } else {
            self.sum().norm() / from_u64::<F>(self.count)
        }
    }
}

/// The sum over `p ≡ 1 (mod 3)`, `p ≤ x`, `p ∤ Δ(f)`. Values are counted per
/// cube root exactly, so the result does not depend on thread scheduling.
pub fn char_cancellation<F: Real + Serialize>(
    f: &SupportFunction,
    pattern: &CancellationPattern,
    x: u64,
) -> Result<CancellationSum<F>> {
    pattern.validate(f)?;
    if x > CANCELLATION_X_MAX {
        return Err(HeisError::OutOfRange {
            what: "x",
            value: u128::from(x),
            limit: u128::from(CANCELLATION_X_MAX),
        });
    }
    let chars = super::lfunc::chars_for(f)?;
    let tables = support_tables(f, &chars)?;
    let f_exp = pattern.eps[0] + 2 * pattern.eps[1];
    let r_exps: Vec<(u64, u8)> = f
        .supp3()
        .map(|r| {
            let e = pattern
                .exps
                .iter()
                .find(|e| e.0 == r)
                .map_or(0, |e| e.1[0] + 2 * e.1[1]);
            (r, e)
        })
        .collect();
    let primes: Vec<u64> = primes_one_mod(x, 3).into_iter().filter(|p| f.get(*p) == 0).collect();
    let counts = primes
        .par_chunks(4096)
        .map(|chunk| chunk_counts(chunk, &tables, f_exp, &r_exps))
        .collect::<Result<Vec<[u64; 3]>>>()?
        .into_iter()
        .fold([0u64; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
    let roots = cube_roots::<F>();
    let sum = (0..3).fold(Complex::new(F::zero(), F::zero()), |acc, i| {
        acc + roots[i] * from_u64::<F>(counts[i])
    });
    Ok(CancellationSum {
        x,
        count: primes.len() as u64,
        sum_re: sum.re,
        sum_im: sum.im,
    })
}

fn chunk_counts(chunk: &[u64], tables: &[(&[u8], u64, u8)], f_exp: u8, r_exps: &[(u64, u8)]) -> Result<[u64; 3]> {
    let mut counts = [0u64; 3];
    for &p in chunk {
        let ef = exponent_at(tables, p);
        debug_assert_ne!(ef, 3);
        let mut e = u32::from(ef * f_exp);
        if r_exps.iter().any(|&(_, k)| k != 0) {
            let sp = standard_decompose(p)?;
            for &(r, k) in r_exps {
                if let CharValue::Root(v) = sp.chi(i128::from(r)) {
                    e += u32::from(v * k);
                }
            }
        }
        counts[(e % 3) as usize] += 1;
    }
    Ok(counts)
}

/// `Σ_{p ≤ x} (p/3)` over all primes, the classical real-character comparison.
pub fn legendre3_prime_sum(x: u64) -> (i64, u64) {
    let mut s = 0i64;
    let mut n = 0u64;
    crate::arith::for_each_prime(x, |p| {
        s += i64::from(super::lfunc::psi3(p));
        n += 1;
    });
    (s, n)
}
