//! Acceptance criteria, one line of output each. Runs without the libtest
//! harness so the lines are always printed.

mod common;

use std::collections::{HashMap, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{
    combine, eis_conj, eis_mul, eis_norm, exhaustive_scan, lattice_decompose, pow_mod, sieve, split_squarefree, Oracle,
};
use heis_core::analytic::alpha::alpha3;
use heis_core::analytic::lfunc::{cubic_character, l_one_psi3};
use heis_core::charspace::CharTable;
use heis_core::counter::{indicator_with, Count};
use heis_core::{
    char_cancellation, chi_p, cubic_symbol, cubic_symbol_euler, enumerate_terms, h_constants, heis_subsum, heis_total,
    k_direct, linear_combination, log_grid, psi_ell, ratio_report, CancellationPattern, CharValue, ConstantReport,
    EisensteinInt, StandardPrime, StandardPrimeTable, SubsumClass, SupportFunction, TruncationParams, WeightMode,
};

struct Outcome {
    ok: bool,
    detail: String,
}

/// Collects failures; the first few are kept for the report line.
#[derive(Default)]
struct Checks {
    count: u64,
    failures: Vec<String>,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn outcome(self, summary: String) -> Outcome {
        let ok = self.failures.is_empty();
        let detail = if ok {
            format!("{summary}; {} checks", self.count)
        } else {
            let shown: Vec<_> = self.failures.iter().take(3).cloned().collect();
            format!(
                "{} of {} checks failed: {}",
                self.failures.len(),
                self.count,
                shown.join("; ")
            )
        };
        Outcome { ok, detail }
    }
}

fn sf(e: &[(u64, u8)]) -> SupportFunction {
    SupportFunction::new(e.iter().copied()).unwrap()
}

fn exponent(v: CharValue) -> Option<u8> {
    match v {
        CharValue::Root(k) => Some(k),
        CharValue::Zero => None,
    }
}

fn constants() -> &'static ConstantReport {
    static REPORT: OnceLock<ConstantReport> = OnceLock::new();
    REPORT.get_or_init(|| h_constants::<f64>(&TruncationParams::default()).unwrap())
}

/// `α^{(q²−1)/3}` in `Z[j]/(q)` for an inert prime `q`, as an exponent of `j`.
fn inert_symbol(alpha: (i128, i128), q: i128) -> Option<u8> {
    let reduce = |z: (i128, i128)| (z.0.rem_euclid(q), z.1.rem_euclid(q));
    let mut base = reduce(alpha);
    if base == (0, 0) {
        return None;
    }
    let mut e = (q * q - 1) / 3;
    let mut acc = (1, 0);
    while e > 0 {
        if e & 1 == 1 {
            acc = reduce(eis_mul(acc, base));
        }
        base = reduce(eis_mul(base, base));
        e >>= 1;
    }
    match acc {
        (1, 0) => Some(0),
        (0, 1) => Some(1),
        z if z == (q - 1, q - 1) => Some(2),
        z => panic!("{z:?} is not a cube root of unity mod {q}"),
    }
}

fn criterion_1() -> Outcome {
    let mut c = Checks::default();
    let table = StandardPrimeTable::build(1_000_000).unwrap();
    let expected: Vec<u64> = sieve(1_000_000).into_iter().filter(|p| p % 3 == 1).collect();
    c.check(table.primes().len() == expected.len(), || "table size".into());
    for (sp, &p) in table.primes().iter().zip(&expected) {
        let (a, b) = (sp.pi.a, sp.pi.b);
        let (pp, r) = (i128::from(p), i128::from(sp.r));
        let z = eis_mul((-r, 1), eis_conj((a, b)));
        c.check(
            sp.p == p
                && eis_norm((a, b)) == pp
                && a.rem_euclid(3) == 2
                && b.rem_euclid(3) == 0
                && b > 0
                && (r * r + r + 1) % pp == 0
                && z.0 % pp == 0
                && z.1 % pp == 0,
            || format!("invariants of {sp}"),
        );
    }
    let small: Vec<StandardPrime> = table.primes().iter().copied().filter(|s| s.p <= 10_000).collect();
    for sp in &small {
        let (pis, rs) = lattice_decompose(sp.p);
        c.check(pis == [(sp.pi.a, sp.pi.b)] && rs == [sp.r], || {
            format!("lattice search at {}", sp.p)
        });
    }

    // Reciprocity between split primes, both π and conj(π), and against the
    // inert primes q ≡ 2 (mod 3) of norm q² <= 10⁴.
    let mut primes = Vec::new();
    for sp in &small {
        primes.push(*sp);
        primes.push(StandardPrime {
            p: sp.p,
            pi: sp.pi.conj().unwrap(),
            r: sp.r * sp.r % sp.p,
        });
    }
    for (i, x) in primes.iter().enumerate() {
        for y in &primes[i + 1..] {
            if x.p != y.p {
                let (xy, yx) = (cubic_symbol(&x.pi, y), cubic_symbol(&y.pi, x));
                c.check(xy == yx, || format!("({}/{}) vs ({}/{})", x.pi, y.pi, y.pi, x.pi));
            }
        }
    }
    for q in sieve(100).into_iter().filter(|q| q % 3 == 2) {
        for x in &primes {
            let lhs = exponent(cubic_symbol(&EisensteinInt::from_int(i128::from(q)), x));
            let rhs = inert_symbol((x.pi.a, x.pi.b), i128::from(q));
            c.check(lhs == rhs, || format!("({q}/{}) vs ({}/{q})", x.pi, x.pi));
        }
    }

    // Both symbol codepaths, and the image of α in F_p raised to (p − 1)/3.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0003);
    for _ in 0..10_000 {
        let sp = table.primes()[rng.gen_range(0..table.primes().len())];
        let alpha = EisensteinInt::new(
            rng.gen_range(-1_000_000_000_000i128..=1_000_000_000_000),
            rng.gen_range(-1_000_000_000_000i128..=1_000_000_000_000),
        );
        let fp = cubic_symbol(&alpha, &sp);
        let euler = cubic_symbol_euler(&alpha, &sp).unwrap();
        let p = i128::from(sp.p);
        let image = (alpha.a + alpha.b * i128::from(sp.r)).rem_euclid(p);
        let naive = common::rational_exponent(sp.p, sp.r, image);
        c.check(fp == euler && exponent(fp) == naive, || {
            format!("symbol of {alpha} mod {}", sp.pi)
        });
    }

    for q in expected.iter().copied().take_while(|&q| q <= 10_000) {
        let cubes: HashSet<u64> = (1..q)
            .map(|x| pow_mod(u128::from(x), 3, u128::from(q)) as u64)
            .collect();
        for r in 1..=100u64 {
            let v = chi_p(q, i128::from(r)).unwrap();
            let want = if r % q == 0 {
                None
            } else {
                Some(cubes.contains(&(r % q)))
            };
            c.check(exponent(v).map(|e| e == 0) == want, || format!("chi_{q}({r}) = {v}"));
        }
    }
    c.outcome(format!("{} standard primes up to 10^6", table.primes().len()))
}

fn criterion_2() -> Outcome {
    let mut ps = vec![3u64];
    ps.extend(sieve(200).into_iter().filter(|q| q % 3 == 1));
    let oracle = Oracle::new(200);
    let table = StandardPrimeTable::build(200).unwrap();
    // Every nonzero function supported on at most two of these primes.
    let mut fs: Vec<Vec<(u64, u8)>> = Vec::new();
    for (i, &p) in ps.iter().enumerate() {
        for v in 1..3u8 {
            fs.push(vec![(p, v)]);
            for &q in &ps[i + 1..] {
                for w in 1..3u8 {
                    fs.push(vec![(p, v), (q, w)]);
                }
            }
        }
    }
    let sfs: Vec<SupportFunction> = fs.iter().map(|f| sf(f)).collect();
    let gl2: Vec<[u8; 4]> = (0..81u8)
        .map(|k| [k % 3, k / 3 % 3, k / 9 % 3, k / 27])
        .filter(|m| (m[0] * m[3] + 2 * m[1] * m[2]) % 3 != 0)
        .collect();
    // 𝟙 on a span is verified once over all 48 of its ordered bases; every
    // other pair from the same span is then checked against that value.
    let mut spans: HashMap<Vec<Vec<(u64, u8)>>, u8> = HashMap::new();
    let mut c = Checks::default();
    let mut ones = 0u64;
    for (i, f) in sfs.iter().enumerate() {
        for (k, g) in sfs.iter().enumerate() {
            if !common::independent(&fs[i], &fs[k]) {
                continue;
            }
            let v = indicator_with(&table, f, g).unwrap();
            ones += u64::from(v);
            c.check(v <= 1, || format!("1({f}, {g}) = {v}"));
            c.check(indicator_with(&table, g, f).unwrap() == v, || {
                format!("asymmetric at ({f}, {g})")
            });
            c.check(oracle.indicator(&fs[i], &fs[k]) == v, || {
                format!("oracle disagrees at ({f}, {g})")
            });
            let mut key: Vec<Vec<(u64, u8)>> = (0..9u8)
                .filter(|&z| z != 0)
                .map(|z| combine(z % 3, &fs[i], z / 3, &fs[k]))
                .collect();
            key.sort();
            match spans.get(&key) {
                Some(&w) => c.check(w == v, || format!("span of ({f}, {g}) has indicator {w}")),
                None => {
                    for m in &gl2 {
                        let a = linear_combination(m[0], f, m[1], g);
                        let b = linear_combination(m[2], f, m[3], g);
                        c.check(indicator_with(&table, &a, &b).unwrap() == v, || {
                            format!("{m:?} moves ({f}, {g})")
                        });
                    }
                    spans.insert(key, v);
                }
            }
        }
    }
    c.outcome(format!(
        "{} functions, {} spans, indicator 1 on {ones} ordered pairs",
        fs.len(),
        spans.len()
    ))
}

fn criterion_3() -> Outcome {
    let mut c = Checks::default();
    // The exhaustive scan first, then the library.
    let oracle = Oracle::new(2_000);
    let scan = exhaustive_scan(6_000_000_000_000, &oracle);
    let scan_star: u128 = scan.iter().map(|t| t.contribution_star).sum();
    let scan_full: u128 = scan.iter().map(|t| t.contribution_full).sum();
    c.check((scan_star, scan_full) == (72, 108), || {
        format!("scan gives {scan_star}, {scan_full}")
    });
    let star = heis_total(6_000_000_000_000, WeightMode::OmegaStar).unwrap();
    let full = heis_total(6_000_000_000_000, WeightMode::OmegaFull).unwrap();
    c.check(
        star.raw_total == scan_star && !star.raw_total.is_multiple_of(108) && !star.divisible_by_108,
        || format!("OMEGA_STAR raw total {}", star.raw_total),
    );
    c.check(full.raw_total == scan_full && full.count == Count::Exact(1), || {
        format!("OMEGA_FULL count {}", full.count)
    });

    let low = heis_total(1_000_000_000, WeightMode::OmegaFull).unwrap();
    c.check(low.raw_total == 0 && low.count == Count::Exact(0), || {
        "heis_total(10^9) is not 0".into()
    });
    let grid = log_grid(1_000_000_000, 10_000_000_000_000_000, 20).unwrap();
    c.check(grid.len() == 20, || "grid size".into());
    let mut last = 0u128;
    let mut counts = Vec::new();
    for &x in &grid {
        let r = heis_total(x, WeightMode::OmegaFull).unwrap();
        c.check(r.raw_total.is_multiple_of(108) && r.divisible_by_108, || {
            format!("108 does not divide {} at X = {x}", r.raw_total)
        });
        c.check(r.raw_total >= last, || format!("decrease at X = {x}"));
        last = r.raw_total;
        counts.push(r.count.to_string());
    }
    c.outcome(format!(
        "6e12: STAR raw {} (mod 108 = {}), FULL count {}; counts on grid {}",
        star.raw_total,
        star.raw_total % 108,
        full.count,
        counts.join(" ")
    ))
}

fn criterion_4() -> Outcome {
    let mut c = Checks::default();
    let grid = log_grid(1_000_000_000_000, 1_000_000_000_000_000_000, 5).unwrap();
    let class = |k: usize| SubsumClass::ALL[k - 1];
    let mut nontrivial_pairs = 0;
    let mut nontrivial_c8 = 0;
    for &x in &grid {
        for mode in [WeightMode::OmegaStar, WeightMode::OmegaFull] {
            let terms = enumerate_terms(x, mode).unwrap();
            let total: u128 = terms.iter().map(|t| t.contribution()).sum();
            let subs: Vec<u128> = (1..=14).map(|k| heis_subsum(x, class(k), mode).unwrap()).collect();
            c.check(subs.iter().sum::<u128>() == total, || {
                format!("sum of subsums at X = {x} ({mode})")
            });
            c.check(heis_total(x, mode).unwrap().raw_total == total, || {
                format!("total at X = {x}")
            });
            let c1_low = heis_subsum(x / 3u128.pow(12), class(1), mode).unwrap();
            let factor = if mode == WeightMode::OmegaStar { 1 } else { 2 };
            c.check(subs[7] == factor * c1_low, || {
                format!("C8({x}) = {} vs C1(X/3^12) = {c1_low} ({mode})", subs[7])
            });
            if subs[7] > 0 {
                nontrivial_c8 += 1;
            }
            for k in 2..=7 {
                let (a, b) = (subs[k - 1], subs[k + 6]);
                c.check(b == factor * a, || {
                    format!("C{} = {b} vs C{k} = {a} at X = {x} ({mode})", k + 7)
                });
                if mode == WeightMode::OmegaStar && a > 0 {
                    nontrivial_pairs += 1;
                }
            }
        }
    }
    c.outcome(format!(
        "grid {:?}; {nontrivial_pairs} nonzero C2..C7 pairings; C8 nonzero at {nontrivial_c8} of 10 points (first C1 value lies above 3^-12 * 10^18)",
        grid
    ))
}

fn criterion_5() -> Outcome {
    let mut c = Checks::default();
    let alpha = alpha3::<f64>(1_000_000).value;
    let dev = |x: u64, d: u64| {
        let psi = psi_ell(d, 3).unwrap();
        let main = alpha * (*psi.numer() as f64 / *psi.denom() as f64) * x as f64;
        (k_direct(x, 3, d).unwrap() as f64 / main - 1.0).abs()
    };
    let mut shown = Vec::new();
    for d in [1u64, 7, 91] {
        let (d5, d7) = (dev(100_000, d), dev(10_000_000, d));
        c.check(d7 <= 0.02, || format!("deviation {d7:.2e} at d = {d}"));
        c.check(d7 < d5, || format!("deviation grows for d = {d}: {d5:.2e} -> {d7:.2e}"));
        shown.push(format!("d={d}: {d5:.1e} -> {d7:.1e}"));
    }
    for (x, d, want) in [(10u64, 1u64, 3u128), (100, 1, 27), (100, 7, 21)] {
        let k = k_direct(x, 3, d).unwrap();
        c.check(k == want, || format!("K({x}; 3, {d}) = {k}, expected {want}"));
    }
    c.outcome(format!("alpha3 = {alpha:.10}; {}", shown.join(", ")))
}

/// `Σ χ(n)/n` averaged over the cutoffs `N ∈ [n, n + q)`.
fn series(values: &[Complex64], n: usize) -> Complex64 {
    let q = values.len();
    let mut s = Complex64::new(0.0, 0.0);
    let mut avg = Complex64::new(0.0, 0.0);
    for k in 1..n + q {
        s += values[k % q] / k as f64;
        if k >= n {
            avg += s;
        }
    }
    avg / q as f64
}

fn criterion_6() -> Outcome {
    let mut c = Checks::default();
    let (a1, a2) = (alpha3::<f64>(1_000_000).value, alpha3::<f64>(2_000_000).value);
    c.check((a1 - a2).abs() <= 1e-4, || {
        format!("alpha3 moves by {:.2e}", (a1 - a2).abs())
    });

    let psi: Vec<Complex64> = (0..3).map(|a| Complex64::new([0.0, 1.0, -1.0][a], 0.0)).collect();
    let l_psi = series(&psi, 2_000_000).re;
    c.check(
        (l_psi - 0.60459979).abs() <= 1e-6 && (l_one_psi3::<f64>() - l_psi).abs() <= 1e-6,
        || format!("L(1, psi) = {l_psi}"),
    );

    // Every cubic character and its twist by (·/3) with conductor <= 500.
    let oracle = Oracle::new(500);
    let chars = CharTable::new(StandardPrimeTable::build(500).unwrap().primes());
    let mut worst = 0.0f64;
    let mut n_chars = 0;
    for (m, primes) in split_squarefree(500) {
        for eta in 0..3u8 {
            for bits in 0u32..(1 << primes.len()) {
                let mut f: Vec<(u64, u8)> = primes
                    .iter()
                    .enumerate()
                    .map(|(i, &p)| (p, 1 + (bits >> i & 1) as u8))
                    .collect();
                if eta > 0 {
                    f.insert(0, (3, eta));
                }
                if f.is_empty() {
                    continue;
                }
                for twist in [false, true] {
                    let q = m * if eta > 0 {
                        9
                    } else if twist {
                        3
                    } else {
                        1
                    };
                    if q > 500 {
                        continue;
                    }
                    let values: Vec<Complex64> = (0..q)
                        .map(|a| {
                            let s = if twist { [0.0, 1.0, -1.0][(a % 3) as usize] } else { 1.0 };
                            match oracle.chi(&f, i128::from(a)) {
                                Some(e) => Complex64::from_polar(s, std::f64::consts::TAU * f64::from(e) / 3.0),
                                None => Complex64::new(0.0, 0.0),
                            }
                        })
                        .collect();
                    let closed = cubic_character::<f64>(&sf(&f), &chars, twist).unwrap();
                    c.check(closed.modulus() == q, || format!("conductor of {f:?}"));
                    let diff = (closed.l_one_closed() - series(&values, 4_000_000)).norm();
                    worst = worst.max(diff);
                    n_chars += 1;
                    c.check(diff <= 1e-6, || {
                        format!("L(1) of {f:?} (twist {twist}) differs by {diff:.2e}")
                    });
                }
            }
        }
    }

    let r = constants();
    c.check((r.h0 - r.h1 - r.h1_prime).abs() <= 1e-12 * r.h0, || {
        format!("H0 - H1 - H1' = {:.2e}", r.h0 - r.h1 - r.h1_prime)
    });
    c.check(r.h0 > 0.0, || "H0 <= 0".into());
    let rel = (r.c_heis_star - r.c_heis_star_from_h0).abs() / r.c_heis_star_from_h0;
    c.check(rel <= 1e-3, || format!("C_Heis* forms differ by {rel:.2e}"));
    c.check(r.c_heis3 > 0.0, || "c(Heis_3) <= 0".into());
    c.outcome(format!(
        "alpha3 {a1:.8} (doubling moves {:.1e}); L(1,psi) {l_psi:.8}; {n_chars} characters, worst L gap {worst:.1e}; H0 {:.6} H1 {:.6} H1' {:.6} H2 {:.6}; C_Heis* forms differ {rel:.1e}; c(Heis3) {:.6e}",
        (a1 - a2).abs(),
        r.h0,
        r.h1,
        r.h1_prime,
        r.h2,
        r.c_heis3
    ))
}

fn criterion_7() -> Outcome {
    let mut c = Checks::default();
    let cst = constants().c_heis3;
    let grid = log_grid(1_000_000_000_000, 10_000_000_000_000_000, 9).unwrap();
    let rows = ratio_report(&grid, WeightMode::OmegaFull, cst).unwrap();
    println!("    x,count,ratio,ratio_over_c");
    for r in &rows {
        println!("    {},{},{:.4e},{:.4}", r.x, r.count, r.ratio, r.ratio_over_c);
    }
    let max = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    c.check(max <= 10.0 * cst, || format!("N(X)/X^(1/4) reaches {max:.3e}"));
    // Below the first discriminant the count is 0 and the ratio carries no
    // information, so the factor-10 comparison is made where N(X) > 0.
    let populated: Vec<_> = rows.iter().filter(|r| r.count.as_f64() > 0.0).collect();
    c.check(rows.last().is_some_and(|r| r.count.as_f64() > 0.0), || {
        "N(10^16) = 0".into()
    });
    for r in &populated {
        c.check((0.1..=10.0).contains(&r.ratio_over_c), || {
            format!("ratio/c = {:.3} at X = {}", r.ratio_over_c, r.x)
        });
    }
    c.outcome(format!(
        "c = {cst:.4e}; max ratio {max:.3e}; ratio/c in [{:.3}, {:.3}] on the {} points with N > 0",
        populated.iter().map(|r| r.ratio_over_c).fold(f64::INFINITY, f64::min),
        populated.iter().map(|r| r.ratio_over_c).fold(0.0, f64::max),
        populated.len()
    ))
}

fn criterion_8() -> Outcome {
    let mut c = Checks::default();
    let patterns = [
        (
            sf(&[(7, 1)]),
            CancellationPattern {
                eps: [0, 0],
                exps: vec![(7, [1, 0])],
            },
        ),
        (
            sf(&[(7, 1), (13, 1)]),
            CancellationPattern {
                eps: [1, 0],
                exps: vec![(13, [0, 1])],
            },
        ),
        (
            sf(&[(19, 2)]),
            CancellationPattern {
                eps: [0, 1],
                exps: vec![(19, [1, 0])],
            },
        ),
    ];
    let mut shown = Vec::new();
    for (f, pat) in &patterns {
        let a = char_cancellation::<f64>(f, pat, 100_000).unwrap().normalized();
        let b = char_cancellation::<f64>(f, pat, 10_000_000).unwrap().normalized();
        c.check(b < a, || format!("no decrease for {f}: {a:.3e} -> {b:.3e}"));
        shown.push(format!("{f}: {a:.2e} -> {b:.2e}"));
    }
    c.outcome(shown.join(", "))
}

/// Number, name, check and time budget in seconds.
type Criterion = (u8, &'static str, fn() -> Outcome, u64);

fn main() {
    let criteria: [Criterion; 8] = [
        (1, "exact arithmetic", criterion_1, 60),
        (2, "indicator", criterion_2, 60),
        (3, "census integrality", criterion_3, 300),
        (4, "subsum identities", criterion_4, 300),
        (5, "tauberian", criterion_5, 120),
        (6, "constant pipeline", criterion_6, 600),
        (7, "asymptotic trend", criterion_7, 600),
        (8, "cancellation", criterion_8, 600),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (id, name, run, budget) in criteria {
        let key = format!("criterion_{id}");
        if !filter.is_empty() && !filter.iter().any(|f| key.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let mut outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| Outcome {
            ok: false,
            detail: format!(
                "panicked: {}",
                e.downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default()
            ),
        });
        let elapsed = start.elapsed();
        if elapsed > Duration::from_secs(budget) {
            outcome.ok = false;
            outcome.detail.push_str(&format!("; over the {budget} s budget"));
        }
        if !outcome.ok {
            failed += 1;
        }
        println!(
            "acceptance {id} {name}: {} ({}; {:.1} s)",
            if outcome.ok { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64()
        );
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
