//! `L(1, χ)` for primitive Dirichlet characters: closed forms through Gauss
//! sums, and a truncated Dirichlet series averaged over one period as oracle.

use num_complex::Complex;

use super::{from_u64, lit, Real};
use crate::arith::CompensatedSum;
use crate::charspace::{conductor, CharTable, SupportFunction};
use crate::eisenstein::StandardPrimeTable;
use crate::error::{HeisError, Result};

/// A Dirichlet character given by its values on `0..q`.
#[derive(Clone, Debug)]
pub struct DirichletCharacter<F> {
    modulus: u64,
    values: Vec<Complex<F>>,
}

impl<F: Real> DirichletCharacter<F> {
    pub fn new(values: Vec<Complex<F>>) -> Self {
        Self {
            modulus: values.len() as u64,
            values,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn value(&self, n: u64) -> Complex<F> {
        self.values[(n % self.modulus) as usize]
    }

    pub fn is_even(&self) -> bool {
        let at_minus_one = self.values[self.values.len() - 1];
        at_minus_one.re > F::zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.values.iter().map(Complex::conj).collect())
    }

    /// `τ(χ) = Σ_a χ(a) e(a/q)`.
    pub fn gauss_sum(&self) -> Complex<F> {
        let q = from_u64::<F>(self.modulus);
        let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
        for (a, v) in self.values.iter().enumerate() {
            if v.re == F::zero() && v.im == F::zero() {
                continue;
            }
            let theta = F::TAU() * from_u64::<F>(a as u64) / q;
            let z = *v * Complex::new(theta.cos(), theta.sin());
            re.add(z.re);
            im.add(z.im);
        }
        Complex::new(re.value(), im.value())
    }

    /// Closed form of `L(1, χ)`, valid for primitive nonprincipal `χ`:
    /// even `χ`: `−(τ/q) Σ χ̄(a) log(2 sin(πa/q))`; odd `χ`: `(πiτ/q²) Σ χ̄(a) a`.
    pub fn l_one_closed(&self) -> Complex<F> {
        let q = from_u64::<F>(self.modulus);
        let tau = self.gauss_sum();
        let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
        let even = self.is_even();
        for (a, v) in self.values.iter().enumerate().skip(1) {
            let c = v.conj();
            let w = if even {
                let s = (F::PI() * from_u64::<F>(a as u64) / q).sin();
                (lit::<F>(2.0) * s).ln()
            } else {
                from_u64::<F>(a as u64)
            };
            re.add(c.re * w);
            im.add(c.im * w);
        }
        let sum = Complex::new(re.value(), im.value());
        if even {
            -(tau / q) * sum
        } else {
            Complex::new(F::zero(), F::PI()) * tau / (q * q) * sum
        }
    }

    /// `Σ_{n <= N} χ(n)/n` averaged over `N ∈ [terms, terms + q)`; the averaging
    /// removes the `O(q/N)` oscillation of the raw partial sums.
    pub fn l_one_series(&self, terms: u64) -> Complex<F> {
        let q = self.modulus;
        let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
        let (mut avg_re, mut avg_im) = (CompensatedSum::new(), CompensatedSum::new());
        for n in 1..terms + q {
            let v = self.value(n) / from_u64::<F>(n);
            re.add(v.re);
            im.add(v.im);
            if n >= terms {
                avg_re.add(re.value());
                avg_im.add(im.value());
            }
        }
        let qf = from_u64::<F>(q);
        Complex::new(avg_re.value() / qf, avg_im.value() / qf)
    }
}

/// The real character `(·/3)`.
pub fn psi3(n: u64) -> i8 {
    match n % 3 {
        1 => 1,
        2 => -1,
        _ => 0,
    }
}

/// `χ(f)` (or `(·/3)·χ(f)` when `twist`) on its conductor, with residue
/// tables from `chars`; every support prime of `f` must be in `chars`.
pub fn cubic_character<F: Real>(f: &SupportFunction, chars: &CharTable, twist: bool) -> Result<DirichletCharacter<F>> {
    if f.is_zero() {
        return Err(HeisError::ZeroFunction);
    }
    let base = conductor(f);
    let q = if twist && !base.is_multiple_of(3) {
        3 * base
    } else {
        base
    };
    let exps = exponent_table(f, chars, q)?;
    let roots = cube_roots::<F>();
    let values = exps
        .iter()
        .enumerate()
        .map(|(a, &e)| {
            if e == 3 {
                return Complex::new(F::zero(), F::zero());
            }
            let r = roots[usize::from(e)];
            if twist {
                r * lit::<F>(f64::from(psi3(a as u64)))
            } else {
                r
            }
        })
        .collect();
    Ok(DirichletCharacter::new(values))
}

pub(crate) fn cube_roots<F: Real>() -> [Complex<F>; 3] {
    let h = lit::<F>(0.5);
    let s = lit::<F>(3.0).sqrt() * h;
    [
        Complex::new(F::one(), F::zero()),
        Complex::new(-h, s),
        Complex::new(-h, -s),
    ]
}

/// Exponents of `χ(f)(a)` for `a ∈ 0..q` (3 marks zero).
pub fn exponent_table(f: &SupportFunction, chars: &CharTable, q: u64) -> Result<Vec<u8>> {
    let tables = support_tables(f, chars)?;
    Ok((0..q).map(|a| exponent_at(&tables, a)).collect())
}

/// `(table, modulus, f(p))` for each support prime.
pub(crate) fn support_tables<'a>(f: &SupportFunction, chars: &'a CharTable) -> Result<Vec<(&'a [u8], u64, u8)>> {
    f.entries()
        .iter()
        .map(|&(p, v)| {
            chars
                .table(p)
                .map(|t| (t, t.len() as u64, v))
                .ok_or_else(|| HeisError::InvalidArgument(format!("no character table for {p}")))
        })
        .collect()
}

#[inline]
pub(crate) fn exponent_at(tables: &[(&[u8], u64, u8)], a: u64) -> u8 {
    let mut e = 0u8;
    for &(t, m, v) in tables {
        let x = t[(a % m) as usize];
        if x == 3 {
            return 3;
        }
        e += x * v;
    }
    e % 3
}

/// Character tables for the support primes of `f`.
pub fn chars_for(f: &SupportFunction) -> Result<CharTable> {
    let limit = f.supp3().max().unwrap_or(7);
    let table = StandardPrimeTable::build(limit)?;
    let sps: Vec<_> = f.supp3().filter_map(|p| table.get(p).copied()).collect();
    Ok(CharTable::new(sps.iter()))
}

/// `L(1, χ(f))` from the closed form.
pub fn l_one_cubic<F: Real>(f: &SupportFunction) -> Result<Complex<F>> {
    Ok(cubic_character::<F>(f, &chars_for(f)?, false)?.l_one_closed())
}

/// `L(1, (·/3)) = π / 3^{3/2}`.
pub fn l_one_psi3<F: Real>() -> F {
    F::PI() / lit::<F>(27.0).sqrt()
}

pub fn psi3_character<F: Real>() -> DirichletCharacter<F> {
    DirichletCharacter::new(
        (0..3u64)
            .map(|a| Complex::new(lit::<F>(f64::from(psi3(a))), F::zero()))
            .collect(),
    )
}
