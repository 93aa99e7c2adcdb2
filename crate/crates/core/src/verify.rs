//! Self-check suites run by `heis verify`. Each suite counts the checks it
//! performed and collects a description of every failure.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::analytic::alpha::alpha3;
use crate::analytic::ksum::{psi_ell, KSummer};
use crate::arith::{mod_pow, primes_one_mod};
use crate::charspace::{linear_combination, SupportFunction};
use crate::counter::{heis_total, indicator_with, SubsumClass, WeightMode};
use crate::eisenstein::{
    cubic_symbol, cubic_symbol_euler, CharValue, EisensteinInt, StandardPrime, StandardPrimeTable,
};
use crate::error::{HeisError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Reciprocity,
    Symbols,
    Indicator,
    Integrality,
    SubsumIdentities,
    Ksum,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Reciprocity,
        Suite::Symbols,
        Suite::Indicator,
        Suite::Integrality,
        Suite::SubsumIdentities,
        Suite::Ksum,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Reciprocity => "reciprocity",
            Suite::Symbols => "symbols",
            Suite::Indicator => "indicator",
            Suite::Integrality => "integrality",
            Suite::SubsumIdentities => "subsum-identities",
            Suite::Ksum => "ksum",
        }
    }

    /// Bound used when none is given: a norm, a prime, an `X` or an `x`.
    pub fn default_bound(self) -> u128 {
        match self {
            Suite::Reciprocity => 10_000,
            Suite::Symbols => 10_000,
            Suite::Indicator => 200,
            Suite::Integrality => 10_000_000_000_000_000,
            Suite::SubsumIdentities => 1_000_000_000_000_000_000,
            Suite::Ksum => 10_000_000,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = HeisError;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| HeisError::InvalidArgument(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub bound: u128,
    pub checks: u64,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

struct Tally {
    checks: u64,
    failures: Vec<String>,
}

impl Tally {
    fn new() -> Self {
        Self {
            checks: 0,
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 100 {
            self.failures.push(what());
        }
    }
}

pub fn run_suite(suite: Suite, bound: Option<u128>, table: Option<&StandardPrimeTable>) -> Result<SuiteReport> {
    let bound = bound.unwrap_or_else(|| suite.default_bound());
    let small = |what: &'static str, limit: u128| -> Result<u64> {
        if bound > limit {
            Err(HeisError::OutOfRange {
                what,
                value: bound,
                limit,
            })
        } else {
            Ok(bound as u64)
        }
    };
    let mut t = Tally::new();
    match suite {
        Suite::Reciprocity => reciprocity(small("bound", 1_000_000)?, table, &mut t)?,
        Suite::Symbols => symbols(small("bound", 10_000_000)?, table, &mut t)?,
        Suite::Indicator => indicator_suite(small("bound", 2_000)?, &mut t)?,
        Suite::Integrality => integrality(bound, &mut t)?,
        Suite::SubsumIdentities => subsum_identities(bound, &mut t)?,
        Suite::Ksum => ksum(small("bound", 100_000_000)?, &mut t)?,
    }
    Ok(SuiteReport {
        suite,
        bound,
        checks: t.checks,
        failures: t.failures,
    })
}

fn table_for(limit: u64, table: Option<&StandardPrimeTable>) -> Result<StandardPrimeTable> {
    match table {
        Some(tb) if tb.limit() >= limit => Ok(StandardPrimeTable::from_primes(
            tb.primes().iter().copied().filter(|s| s.p <= limit).collect(),
            limit,
        )),
        _ => StandardPrimeTable::build(limit),
    }
}

/// The prime `conj(π)` with `j ↦ r²`.
fn conjugate_prime(sp: &StandardPrime) -> Result<StandardPrime> {
    Ok(StandardPrime {
        p: sp.p,
        pi: sp.pi.conj()?,
        r: (u128::from(sp.r) * u128::from(sp.r) % u128::from(sp.p)) as u64,
    })
}

/// `(π/ρ)_3 = (ρ/π)_3` for distinct primary primes of norm `<= bound`, both
/// `π` and `conj(π)` included.
fn reciprocity(bound: u64, table: Option<&StandardPrimeTable>, t: &mut Tally) -> Result<()> {
    let table = table_for(bound, table)?;
    let mut primes = Vec::new();
    for sp in table.primes() {
        t.check(sp.validate().is_ok(), || format!("invalid standard prime {sp}"));
        primes.push(*sp);
        primes.push(conjugate_prime(sp)?);
    }
    for (i, a) in primes.iter().enumerate() {
        for b in &primes[i + 1..] {
            if a.p == b.p {
                continue;
            }
            let ab = cubic_symbol(&a.pi, b);
            let ba = cubic_symbol(&b.pi, a);
            t.check(ab == ba, || {
                format!("({}/{})_3 = {ab} but ({}/{})_3 = {ba}", a.pi, b.pi, b.pi, a.pi)
            });
        }
    }
    Ok(())
}

/// Both symbol codepaths agree, and `χ_q(r) = 1` exactly when `r` is a cube mod `q`.
fn symbols(bound: u64, table: Option<&StandardPrimeTable>, t: &mut Tally) -> Result<()> {
    let table = table_for(bound, table)?;
    for sp in table.primes() {
        for (a, b) in [(2i128, 0i128), (5, 7), (-11, 3), (1234, -567), (sp.p as i128, 1)] {
            let alpha = EisensteinInt::new(a, b);
            let fp = cubic_symbol(&alpha, sp);
            let euler = cubic_symbol_euler(&alpha, sp)?;
            t.check(fp == euler, || {
                format!("symbol of {alpha} mod {}: {fp} vs {euler}", sp.pi)
            });
        }
        for r in 1..=100u64 {
            let cube = mod_pow(r, (sp.p - 1) / 3, sp.p) == 1;
            let v = sp.chi(i128::from(r));
            t.check(v.is_one() == cube || v == CharValue::Zero, || {
                format!("chi_{}({r}) = {v}", sp.p)
            });
        }
    }
    Ok(())
}

/// `𝟙 ∈ {0,1}`, symmetry and invariance under `GL_2(F_3)` for pairs of
/// single-prime functions over `{3} ∪ {q ≡ 1 mod 3, q <= bound}` and their sums.
fn indicator_suite(bound: u64, t: &mut Tally) -> Result<()> {
    let table = StandardPrimeTable::build(bound.max(7))?;
    let mut primes = vec![3u64];
    primes.extend(primes_one_mod(bound, 3));
    let singles: Vec<SupportFunction> = primes
        .iter()
        .flat_map(|&p| [1u8, 2].map(|v| SupportFunction::new([(p, v)]).expect("prime in P_3")))
        .collect();
    let matrices: Vec<[u8; 4]> = (0..81u32)
        .map(|k| [(k % 3) as u8, (k / 3 % 3) as u8, (k / 9 % 3) as u8, (k / 27 % 3) as u8])
        .filter(|m| (u32::from(m[0]) * u32::from(m[3]) + 2 * u32::from(m[1]) * u32::from(m[2])) % 3 != 0)
        .collect();
    for f in &singles {
        for g in &singles {
            for f2 in [g.clone(), linear_combination(1, f, 1, g)] {
                let Ok(v) = indicator_with(&table, f, &f2) else {
                    continue;
                };
                t.check(v <= 1, || format!("1({f}, {f2}) = {v}"));
                let w = indicator_with(&table, &f2, f)?;
                t.check(v == w, || format!("1({f}, {f2}) = {v} but 1({f2}, {f}) = {w}"));
                for m in &matrices {
                    let a = linear_combination(m[0], f, m[1], &f2);
                    let b = linear_combination(m[2], f, m[3], &f2);
                    let u = indicator_with(&table, &a, &b)?;
                    t.check(u == v, || format!("1 changes under {m:?} at ({f}, {f2})"));
                }
            }
        }
    }
    Ok(())
}

fn grid(x_max: u128, points: usize) -> Result<Vec<u128>> {
    crate::analytic::ratio::log_grid(1_000_000_000.min(x_max), x_max, points)
}

fn integrality(x_max: u128, t: &mut Tally) -> Result<()> {
    let mut last = 0u128;
    for x in grid(x_max, 20)? {
        let r = heis_total(x, WeightMode::OmegaFull)?;
        t.check(r.divisible_by_108, || {
            format!("raw total {} at X = {x} is not divisible by 108", r.raw_total)
        });
        t.check(r.raw_total >= last, || format!("census decreases at X = {x}"));
        last = r.raw_total;
    }
    Ok(())
}

fn subsum_identities(x_max: u128, t: &mut Tally) -> Result<()> {
    for x in grid(x_max, 5)? {
        for mode in [WeightMode::OmegaStar, WeightMode::OmegaFull] {
            let r = heis_total(x, mode)?;
            t.check(r.subsums.total() == r.raw_total, || {
                format!("subsums do not add up at X = {x}")
            });
            let low = heis_total(x / 3u128.pow(12), mode);
            let c1 = match low {
                Ok(l) => l.subsums.get(SubsumClass::ALL[0]),
                Err(_) => 0,
            };
            let c8 = r.subsums.get(SubsumClass::ALL[7]);
            let factor = if mode == WeightMode::OmegaStar { 1 } else { 2 };
            t.check(c8 == factor * c1, || {
                format!("C8({x}) = {c8} vs C1(X/3^12) = {c1} ({mode})")
            });
            if mode == WeightMode::OmegaStar {
                for i in 1..7 {
                    let (a, b) = (r.subsums.0[i], r.subsums.0[i + 7]);
                    t.check(a == b, || format!("C{} = {a} but C{} = {b} at X = {x}", i + 1, i + 8));
                }
            }
        }
    }
    Ok(())
}

/// `K(x; 3, d) ≈ α_3 ψ_3(d) x` within 2%.
fn ksum(x: u64, t: &mut Tally) -> Result<()> {
    let alpha = alpha3::<f64>(1_000_000).value;
    let summer = KSummer::new(x, 3)?;
    for d in [1u64, 7, 91, 7 * 13 * 19] {
        let psi = psi_ell(d, 3)?;
        let main = alpha * (*psi.numer() as f64 / *psi.denom() as f64) * x as f64;
        let k = summer.k(x, d) as f64;
        let dev = (k / main - 1.0).abs();
        t.check(dev <= 0.02, || format!("K({x}; 3, {d}) deviates by {dev:.4}"));
    }
    Ok(())
}
