//! The Euler products `P(f)` and the constants `H_0, H_1, H′_1, H_2`,
//! `c(Heis_3)` and `C_Heis*`.
//!
//! `P(f) = ∏_{p ∈ P_3*} (1 + 2(χ(f)(p) + χ(2f)(p))/(p+2) + 2/(√p (p+2)))`
//! converges only through cancellation of `χ(f)`. It is evaluated as
//! `|L(1, χ)|² |L(1, ψχ)|² ∏_p R(p)` with `ψ = (·/3)`: the two L-functions
//! carry the `1/p` part and the residual factors `R(p)` are `1 + O(p^{-3/2})`.

use num_complex::Complex;
use rayon::prelude::*;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use super::alpha::{alpha3, Truncated};
use super::lfunc::{cube_roots, cubic_character, exponent_at, psi3, support_tables};
use super::{from_u64, lit, Real};
use crate::arith::{for_each_prime, CompensatedSum};
use crate::charspace::{chi_eval_with, enumerate_deltas, enumerate_v, CharTable, DeltaIndex, SupportFunction};
use crate::error::{HeisError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationParams {
    pub delta_max: u64,
    pub p_max: u64,
    pub series_terms: u64,
}

impl Default for TruncationParams {
    fn default() -> Self {
        Self {
            delta_max: 2000,
            p_max: 1_000_000,
            series_terms: 1_000_000,
        }
    }
}

impl TruncationParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("delta_max", self.delta_max),
            ("p_max", self.p_max),
            ("series_terms", self.series_terms),
        ] {
            if v < 2 {
                return Err(HeisError::InvalidArgument(format!("{name} must be at least 2")));
            }
        }
        Ok(())
    }
}

/// Primes up to `p_max` and character tables for every prime `<= delta_max`,
/// shared read-only by all Euler products.
pub struct EulerContext {
    primes: Vec<u64>,
    chars: CharTable,
    p_max: u64,
}

impl EulerContext {
    pub fn new(params: &TruncationParams) -> Result<Self> {
        params.validate()?;
        let mut primes = Vec::new();
        for_each_prime(params.p_max, |p| primes.push(p));
        Ok(Self {
            primes,
            chars: CharTable::for_limit(params.delta_max.max(7))?,
            p_max: params.p_max,
        })
    }

    pub fn chars(&self) -> &CharTable {
        &self.chars
    }
}

/// Both evaluations of the inner product for one `f`.
#[derive(Clone, Copy, Debug)]
pub struct EulerValues<F> {
    /// `P(f)` as written in the definition of `H_0`.
    pub p: F,
    /// The two-product form `∏ (1 + 2s/(p+2)) · ∏_{p ∤ Δ} (1 + 2/(√p (p + 2 + 2s)))`.
    pub p_split: F,
    /// Relative truncation error estimate for the prime cutoff.
    pub tail: F,
}

/// Evaluates `P(f)` for `f ≠ 0` with support primes covered by `ctx`.
pub fn euler_values<F: Real>(f: &SupportFunction, ctx: &EulerContext) -> Result<EulerValues<F>> {
    let l1 = cubic_character::<F>(f, &ctx.chars, false)?.l_one_closed();
    let l2 = cubic_character::<F>(f, &ctx.chars, true)?.l_one_closed();
    let tables = support_tables(f, &ctx.chars)?;
    let roots = cube_roots::<F>();
    let (one, two) = (F::one(), lit::<F>(2.0));
    let mut log_p = CompensatedSum::<F>::new();
    let mut log_split = CompensatedSum::<F>::new();
    for &p in &ctx.primes {
        let e = exponent_at(&tables, p);
        let pf = from_u64::<F>(p);
        let chi = if e == 3 {
            Complex::new(F::zero(), F::zero())
        } else {
            roots[usize::from(e)]
        };
        let psi = lit::<F>(f64::from(psi3(p)));
        let renorm = (Complex::new(one, F::zero()) - chi / pf).norm_sqr()
            * (Complex::new(one, F::zero()) - chi * psi / pf).norm_sqr();
        let (raw, split) = if p % 3 == 1 {
            let s = two * chi.re;
            let sq = pf.sqrt();
            let raw = one + two * s / (pf + two) + two / (sq * (pf + two));
            let split_tail = if e == 3 {
                one
            } else {
                one + two / (sq * (pf + two + two * s))
            };
            (raw, (one + two * s / (pf + two)) * split_tail)
        } else {
            (one, one)
        };
        log_p.add((raw * renorm).ln());
        log_split.add((split * renorm).ln());
    }
    let l_part = l1.norm_sqr() * l2.norm_sqr();
    let pm = from_u64::<F>(ctx.p_max);
    let tail = two / (pm.sqrt() * pm.ln()) + lit::<F>(10.0) / (pm * pm.ln());
    Ok(EulerValues {
        p: l_part * log_p.value().exp(),
        p_split: l_part * log_split.value().exp(),
        tail,
    })
}

/// `P(f)` with its relative tail estimate.
pub fn euler_product_p<F: Real>(f: &SupportFunction, params: &TruncationParams) -> Result<Truncated<F>> {
    if f.is_zero() {
        return Err(HeisError::ZeroFunction);
    }
    let limit = f.supp3().max().unwrap_or(7).max(params.delta_max);
    let ctx = EulerContext::new(&TruncationParams {
        delta_max: limit,
        ..*params
    })?;
    let v = euler_values::<F>(f, &ctx)?;
    Ok(Truncated {
        value: v.p,
        tail: v.p * v.tail,
    })
}

/// `λ(Δ) = ∏_{p | Δ} (1 + 2/(√p (p+2)))^{-1}`.
pub fn lambda<F: Real>(delta: &DeltaIndex) -> F {
    delta
        .factors
        .iter()
        .map(|&p| {
            let pf = from_u64::<F>(p);
            (F::one() + lit::<F>(2.0) / (pf.sqrt() * (pf + lit::<F>(2.0)))).recip()
        })
        .fold(F::one(), |a, b| a * b)
}

fn psi3_weight<F: Real>(delta: &DeltaIndex) -> F {
    delta
        .factors
        .iter()
        .map(|&p| from_u64::<F>(p) / from_u64::<F>(p + 2))
        .fold(F::one(), |a, b| a * b)
}

/// Per-`Δ` contributions, kept separate so the merge order is fixed.
#[derive(Clone, Copy, Debug, Default)]
struct DeltaTerms<F> {
    delta: u64,
    h0: F,
    h1: F,
    h1_prime: F,
    h2: F,
    star_split: F,
}

fn delta_terms<F: Real>(dl: &DeltaIndex, ctx: &EulerContext) -> Result<DeltaTerms<F>> {
    let base =
        psi3_weight::<F>(dl) * lit::<F>(3f64.powi(dl.omega() as i32)) / from_u64::<F>(dl.delta).powf(lit::<F>(1.5));
    let w = lambda::<F>(dl) * base;
    let mut t = DeltaTerms {
        delta: dl.delta,
        h0: F::zero(),
        h1: F::zero(),
        h1_prime: F::zero(),
        h2: F::zero(),
        star_split: F::zero(),
    };
    for f in enumerate_v(dl, true) {
        if dl.delta > 1 {
            let v = euler_values::<F>(&f, ctx)?;
            t.h0 = t.h0 + w * v.p;
            if chi_eval_with(&ctx.chars, &f, 3).is_one() {
                t.h1 = t.h1 + w * v.p;
            } else {
                t.h1_prime = t.h1_prime + w * v.p;
            }
            t.star_split = t.star_split + base * v.p_split;
        }
        for eta in 1..=2 {
            let v = euler_values::<F>(&f.with_three(eta), ctx)?;
            t.h2 = t.h2 + w * v.p;
        }
    }
    Ok(t)
}

/// Everything the constant pipeline reports.
#[derive(Clone, Debug, Serialize)]
pub struct ConstantReport<F: Real + Serialize> {
    pub alpha3: F,
    pub h0: F,
    pub h1: F,
    pub h1_prime: F,
    pub h2: F,
    /// `2^{-2}(32/3⁶ H_0 + 8/3⁶ H_1 + 10/3⁷ H_2) α_3`.
    pub c_heis3: F,
    /// `C_Heis*` from the two-product form.
    pub c_heis_star: F,
    /// `C_Heis* = 2^{-2} 3^{-3} α_3 H_0`.
    pub c_heis_star_from_h0: F,
    /// `c(Heis_3)` with the `C8…C14` constants doubled, matching the census
    /// under the full `ω(d)` weight.
    pub c_heis3_full_omega: F,
    /// `C^{(C1)} … C^{(C14)}`.
    pub subsum_constants: ClassConstants<F>,
    pub tails: Tails<F>,
    pub params: TruncationParams,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Tails<F: Real + Serialize> {
    pub alpha3: F,
    /// Relative error of each Euler product from the prime cutoff.
    pub euler_product: F,
    pub h0: F,
    pub h1: F,
    pub h1_prime: F,
    pub h2: F,
}

#[derive(Clone, Copy, Debug)]
pub struct ClassConstants<F>(pub [F; 14]);

impl<F: Real + Serialize> Serialize for ClassConstants<F> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(14))?;
        for (i, v) in self.0.iter().enumerate() {
            map.serialize_entry(&format!("C{}", i + 1), v)?;
        }
        map.end()
    }
}

/// The class constants in terms of `H_0, H_1, H_2`.
pub fn class_constants<F: Real>(h0: F, h1: F, h2: F) -> [F; 14] {
    let c = |x: f64| lit::<F>(x);
    let low = [
        h0,
        c(2.0 / 9.0) * h1,
        c(2.0 / 27.0) * (h0 - h1),
        h2 / c(81.0),
        c(2.0 / 243.0) * h2,
        c(2.0 / 81.0) * h2,
        c(4.0 / 243.0) * h2,
    ];
    let mut all = [F::zero(); 14];
    all[..7].copy_from_slice(&low);
    all[7..].copy_from_slice(&low);
    all[7] = h0 / c(27.0);
    all
}

/// Sum of the last dyadic block `(N/2, N]` over `√2 − 1`: the tail of a series
/// whose blocks shrink like `N^{-1/2}`.
fn dyadic_tail<F: Real>(terms: &[DeltaTerms<F>], delta_max: u64, pick: impl Fn(&DeltaTerms<F>) -> F) -> F {
    let block: CompensatedSum<F> = terms.iter().filter(|t| t.delta > delta_max / 2).map(&pick).collect();
    block.value() / (lit::<F>(2.0).sqrt() - F::one())
}

pub fn h_constants<F: Real + Serialize>(params: &TruncationParams) -> Result<ConstantReport<F>> {
    let ctx = EulerContext::new(params)?;
    let deltas = enumerate_deltas(params.delta_max);
    let terms: Vec<DeltaTerms<F>> = deltas
        .par_iter()
        .map(|dl| delta_terms::<F>(dl, &ctx))
        .collect::<Result<_>>()?;
    let total = |pick: fn(&DeltaTerms<F>) -> F| terms.iter().map(pick).collect::<CompensatedSum<F>>().value();
    let h0 = total(|t| t.h0);
    let h1 = total(|t| t.h1);
    let h1_prime = total(|t| t.h1_prime);
    let h2 = total(|t| t.h2);
    let star_split = total(|t| t.star_split);

    let alpha = alpha3::<F>(params.p_max);
    let a = alpha.value;
    let c = |x: f64| lit::<F>(x);
    let c_heis3 = c(0.25) * (c(32.0 / 729.0) * h0 + c(8.0 / 729.0) * h1 + c(10.0 / 2187.0) * h2) * a;
    let norm = c(1.0 / 108.0) * a;
    let classes = class_constants(h0, h1, h2);
    let low: F = classes[..7].iter().copied().sum();
    let high: F = classes[7..].iter().copied().sum();
    let pm = from_u64::<F>(params.p_max);
    Ok(ConstantReport {
        alpha3: a,
        h0,
        h1,
        h1_prime,
        h2,
        c_heis3,
        c_heis_star: norm * star_split,
        c_heis_star_from_h0: norm * h0,
        c_heis3_full_omega: norm * (low + c(2.0) * high),
        subsum_constants: ClassConstants(classes),
        tails: Tails {
            alpha3: alpha.tail,
            euler_product: c(2.0) / (pm.sqrt() * pm.ln()) + c(10.0) / (pm * pm.ln()),
            h0: dyadic_tail(&terms, params.delta_max, |t| t.h0),
            h1: dyadic_tail(&terms, params.delta_max, |t| t.h1),
            h1_prime: dyadic_tail(&terms, params.delta_max, |t| t.h1_prime),
            h2: dyadic_tail(&terms, params.delta_max, |t| t.h2),
        },
        params: *params,
    })
}
