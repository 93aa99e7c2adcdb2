//! `heis`: command-line front end for the Heisenberg census and its constant.

mod numparse;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use heis_core::{
    alpha_ell, census_prime_limit, chi_p, enumerate_terms_with, h_constants, heis_total_with, k_direct, log_grid,
    psi_ell, ratio_report, run_suite, standard_decompose, CharValue, ConstantReport, CountReport, HeisError, RatioRow,
    StandardPrimeTable, Suite, SuiteReport, Term, TruncationParams, WeightMode,
};
use numparse::{parse_exact, parse_u64, parse_usize};

#[derive(Parser, Debug)]
#[command(name = "heis", version, about = "Census of nonic Heisenberg fields by discriminant")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Args, Debug)]
struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    /// Directory for the standard-prime cache.
    #[arg(long, global = true, env = "HEIS_CACHE_DIR")]
    cache_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    OmegaStar,
    OmegaFull,
}

impl From<Mode> for WeightMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::OmegaStar => WeightMode::OmegaStar,
            Mode::OmegaFull => WeightMode::OmegaFull,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Reciprocity,
    Symbols,
    Indicator,
    Integrality,
    SubsumIdentities,
    Ksum,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Reciprocity => Suite::Reciprocity,
            SuiteArg::Symbols => Suite::Symbols,
            SuiteArg::Indicator => Suite::Indicator,
            SuiteArg::Integrality => Suite::Integrality,
            SuiteArg::SubsumIdentities => Suite::SubsumIdentities,
            SuiteArg::Ksum => Suite::Ksum,
        }
    }
}

#[derive(Args, Debug)]
struct CensusArgs {
    /// Discriminant bound; scientific notation is accepted when exact.
    #[arg(long, value_parser = parse_exact)]
    x: u128,
    #[arg(long, value_enum, default_value_t = Mode::OmegaFull)]
    weight_mode: Mode,
}

#[derive(Args, Debug)]
struct ConstantArgs {
    #[arg(long, value_parser = parse_u64)]
    delta_max: Option<u64>,
    #[arg(long, value_parser = parse_u64)]
    p_max: Option<u64>,
    #[arg(long, value_parser = parse_u64)]
    series_terms: Option<u64>,
}

impl ConstantArgs {
    fn params(&self) -> TruncationParams {
        let d = TruncationParams::default();
        TruncationParams {
            delta_max: self.delta_max.unwrap_or(d.delta_max),
            p_max: self.p_max.unwrap_or(d.p_max),
            series_terms: self.series_terms.unwrap_or(d.series_terms),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// N(Heis_3, X) with its raw total and subsums.
    Count(CensusArgs),
    /// The fourteen subsums C1..C14.
    Subsums(CensusArgs),
    /// Every nonzero contribution, in deterministic order.
    Terms {
        #[command(flatten)]
        census: CensusArgs,
        /// Emit at most this many terms.
        #[arg(long, value_parser = parse_usize)]
        limit: Option<usize>,
    },
    /// The constant c(Heis_3) and its ingredients.
    Constant(ConstantArgs),
    /// K(x; ell, d) against its main term.
    Ksum {
        #[arg(long, value_parser = parse_u64)]
        x: u64,
        #[arg(long, value_parser = parse_u64)]
        ell: u64,
        #[arg(long, value_parser = parse_u64, default_value = "1")]
        d: u64,
    },
    /// The cubic residue character chi_p(n).
    Symbol {
        #[arg(long, value_parser = parse_u64)]
        p: u64,
        #[arg(long, allow_hyphen_values = true)]
        n: i128,
    },
    /// The standard decomposition p = pi * conj(pi).
    Decompose {
        #[arg(long, value_parser = parse_u64)]
        p: u64,
    },
    /// Run a self-check suite; exits 1 on any failure.
    Verify {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        #[arg(long, value_parser = parse_exact)]
        bound: Option<u128>,
    },
    /// N(X) / X^{1/4} over a log-spaced grid, compared with c(Heis_3).
    Report {
        #[arg(long, value_parser = parse_exact)]
        x_min: u128,
        #[arg(long, value_parser = parse_exact)]
        x_max: u128,
        #[arg(long, value_parser = parse_usize)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Mode::OmegaFull)]
        weight_mode: Mode,
        /// Use this constant instead of recomputing it.
        #[arg(long)]
        c_estimate: Option<f64>,
    },
}

#[derive(Debug)]
enum Failure {
    Domain(HeisError),
    /// A verification suite ran and found failures; the report is still printed.
    Checks,
}

impl From<HeisError> for Failure {
    fn from(e: HeisError) -> Self {
        Failure::Domain(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Domain(e.into())
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Checks) => ExitCode::from(1),
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(usize::from(n))
            .build_global()
            .map_err(|e| HeisError::InvalidArgument(e.to_string()))?;
    }
    let g = &cli.global;
    let mut failed = false;
    let text = match &cli.command {
        Command::Count(a) | Command::Subsums(a) => {
            let report = census(a, g)?;
            let subsums_only = matches!(cli.command, Command::Subsums(_));
            render_count(&report, g.format, subsums_only)
        }
        Command::Terms { census: a, limit } => {
            let table = census_table(a.x, g)?;
            let mut terms = enumerate_terms_with(a.x, a.weight_mode.into(), &table)?;
            if let Some(n) = limit {
                terms.truncate(*n);
            }
            render_terms(&terms, g.format)
        }
        Command::Constant(a) => render_constant(&h_constants::<f64>(&a.params())?, g.format),
        Command::Ksum { x, ell, d } => render_ksum(*x, *ell, *d, g.format)?,
        Command::Symbol { p, n } => render_symbol(*p, *n, g.format)?,
        Command::Decompose { p } => render_decompose(*p, g.format)?,
        Command::Verify { suite, bound } => {
            let suite = Suite::from(*suite);
            let table = match (suite, &g.cache_dir) {
                (Suite::Reciprocity | Suite::Symbols, Some(dir)) => {
                    let b = bound.unwrap_or_else(|| suite.default_bound());
                    Some(StandardPrimeTable::load_or_build(
                        u64::try_from(b).unwrap_or(u64::MAX),
                        Some(dir),
                    )?)
                }
                _ => None,
            };
            let report = run_suite(suite, *bound, table.as_ref())?;
            failed = !report.passed();
            render_verify(&report, g.format)
        }
        Command::Report {
            x_min,
            x_max,
            points,
            weight_mode,
            c_estimate,
        } => {
            let c = match c_estimate {
                Some(c) => *c,
                None => h_constants::<f64>(&TruncationParams::default())?.c_heis3,
            };
            let grid = log_grid(*x_min, *x_max, *points)?;
            render_report(&ratio_report(&grid, (*weight_mode).into(), c)?, g.format)
        }
    };
    emit(&text, g)?;
    if failed {
        Err(Failure::Checks)
    } else {
        Ok(())
    }
}

fn emit(text: &str, g: &Global) -> std::io::Result<()> {
    match &g.out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn census_table(x: u128, g: &Global) -> Result<StandardPrimeTable, HeisError> {
    heis_core::counter::check_x(x)?;
    StandardPrimeTable::load_or_build(census_prime_limit(x), g.cache_dir.as_deref())
}

fn census(a: &CensusArgs, g: &Global) -> Result<CountReport, HeisError> {
    let table = census_table(a.x, g)?;
    heis_total_with(a.x, a.weight_mode.into(), &table)
}

fn json<T: Serialize + ?Sized>(v: &T) -> String {
    let mut s = serde_json::to_string(v).expect("report types serialize");
    s.push('\n');
    s
}

fn render_count(r: &CountReport, format: Format, subsums_only: bool) -> String {
    match (format, subsums_only) {
        (Format::Json, false) => json(r),
        (Format::Json, true) => json(&r.subsums),
        (Format::Csv, false) => format!("{}\n{}\n", CountReport::CSV_HEADER, r.csv_row()),
        (Format::Csv, true) => {
            let mut s = String::from("class,value\n");
            for (i, v) in r.subsums.0.iter().enumerate() {
                let _ = writeln!(s, "C{},{v}", i + 1);
            }
            s
        }
        (Format::Text, false) => format!(
            "X={} weight_mode={} raw_total={} count={} divisible_by_108={}\n",
            r.x, r.weight_mode, r.raw_total, r.count, r.divisible_by_108
        ),
        (Format::Text, true) => {
            let mut s = String::new();
            for (i, v) in r.subsums.0.iter().enumerate() {
                let _ = writeln!(s, "C{}={v}", i + 1);
            }
            s
        }
    }
}

fn render_terms(terms: &[Term], format: Format) -> String {
    match format {
        Format::Json => json(terms),
        Format::Csv => {
            let mut s = String::from("f,f_prime,three_divides_d,big_d,class,weight,s_part,contribution\n");
            for t in terms {
                let _ = writeln!(
                    s,
                    "\"{}\",\"{}\",{},{},{},{},{},{}",
                    t.f,
                    t.f_prime,
                    t.three_divides_d,
                    t.big_d,
                    t.class,
                    t.weight,
                    t.s_part,
                    t.contribution()
                );
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for t in terms {
                let _ = writeln!(
                    s,
                    "f={} f'={} 3|d={} D={} {} weight={} S={}",
                    t.f, t.f_prime, t.three_divides_d, t.big_d, t.class, t.weight, t.s_part
                );
            }
            s
        }
    }
}

fn render_constant(r: &ConstantReport, format: Format) -> String {
    let mut rows: Vec<(String, f64)> = vec![
        ("alpha3".into(), r.alpha3),
        ("h0".into(), r.h0),
        ("h1".into(), r.h1),
        ("h1_prime".into(), r.h1_prime),
        ("h2".into(), r.h2),
        ("c_heis3".into(), r.c_heis3),
        ("c_heis_star".into(), r.c_heis_star),
        ("c_heis_star_from_h0".into(), r.c_heis_star_from_h0),
        ("c_heis3_full_omega".into(), r.c_heis3_full_omega),
    ];
    rows.extend(
        r.subsum_constants
            .0
            .iter()
            .enumerate()
            .map(|(i, &v)| (format!("C{}", i + 1), v)),
    );
    match format {
        Format::Json => json(r),
        Format::Csv => {
            let mut s = String::from("name,value\n");
            for (k, v) in rows {
                let _ = writeln!(s, "{k},{v:e}");
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for (k, v) in rows {
                let _ = writeln!(s, "{k} = {v:.10e}");
            }
            let p = &r.params;
            let _ = writeln!(
                s,
                "delta_max = {} p_max = {} series_terms = {}",
                p.delta_max, p.p_max, p.series_terms
            );
            s
        }
    }
}

#[derive(Serialize)]
struct KsumReport {
    x: u64,
    ell: u64,
    d: u64,
    k: u128,
    main_term: f64,
    relative_deviation: f64,
}

fn render_ksum(x: u64, ell: u64, d: u64, format: Format) -> Result<String, HeisError> {
    let psi = psi_ell(d, ell)?;
    let k = k_direct(x, ell, d)?;
    let alpha = alpha_ell::<f64>(ell, 1_000_000)?.value;
    let main_term = alpha * (*psi.numer() as f64 / *psi.denom() as f64) * x as f64;
    let r = KsumReport {
        x,
        ell,
        d,
        k,
        main_term,
        relative_deviation: k as f64 / main_term - 1.0,
    };
    Ok(match format {
        Format::Json => json(&r),
        Format::Csv => format!(
            "x,ell,d,k,main_term,relative_deviation\n{},{},{},{},{:e},{:e}\n",
            r.x, r.ell, r.d, r.k, r.main_term, r.relative_deviation
        ),
        Format::Text => format!(
            "K({}; {}, {}) = {}  main term {:.6e}  relative deviation {:+.3e}\n",
            r.x, r.ell, r.d, r.k, r.main_term, r.relative_deviation
        ),
    })
}

#[derive(Serialize)]
struct SymbolReport {
    p: u64,
    n: String,
    value: String,
    /// `k` with `χ_p(n) = j^k`, absent when `p | n`.
    exponent: Option<u8>,
}

fn render_symbol(p: u64, n: i128, format: Format) -> Result<String, HeisError> {
    let v = chi_p(p, n)?;
    let r = SymbolReport {
        p,
        n: n.to_string(),
        value: v.to_string(),
        exponent: match v {
            CharValue::Root(k) => Some(k),
            CharValue::Zero => None,
        },
    };
    Ok(match format {
        Format::Json => json(&r),
        Format::Csv => format!("p,n,value\n{},{},{}\n", r.p, r.n, r.value),
        Format::Text => format!("chi_{}({}) = {}\n", r.p, r.n, r.value),
    })
}

#[derive(Serialize)]
struct DecomposeReport {
    p: u64,
    a: i128,
    b: i128,
    r: u64,
}

fn render_decompose(p: u64, format: Format) -> Result<String, HeisError> {
    let sp = standard_decompose(p)?;
    let r = DecomposeReport {
        p,
        a: sp.pi.a,
        b: sp.pi.b,
        r: sp.r,
    };
    Ok(match format {
        Format::Json => json(&r),
        Format::Csv => format!("p,a,b,r\n{},{},{},{}\n", r.p, r.a, r.b, r.r),
        Format::Text => format!("{sp}\n"),
    })
}

fn render_verify(r: &SuiteReport, format: Format) -> String {
    match format {
        Format::Json => json(r),
        Format::Csv => format!(
            "suite,bound,checks,failures\n{},{},{},{}\n",
            r.suite,
            r.bound,
            r.checks,
            r.failures.len()
        ),
        Format::Text => {
            let mut s = format!(
                "{} bound={} checks={} failures={} {}\n",
                r.suite,
                r.bound,
                r.checks,
                r.failures.len(),
                if r.passed() { "PASS" } else { "FAIL" }
            );
            for f in &r.failures {
                let _ = writeln!(s, "  {f}");
            }
            s
        }
    }
}

fn render_report(rows: &[RatioRow], format: Format) -> String {
    match format {
        Format::Json => json(rows),
        Format::Csv => {
            let mut s = format!("{}\n", RatioRow::CSV_HEADER);
            for row in rows {
                let _ = writeln!(s, "{}", row.csv_row());
            }
            s
        }
        Format::Text => {
            let mut s = format!("{:>22} {:>10} {:>12} {:>12}\n", "X", "N(X)", "N/X^(1/4)", "ratio/c");
            for row in rows {
                let _ = writeln!(
                    s,
                    "{:>22} {:>10} {:>12.4e} {:>12.4}",
                    row.x,
                    row.count.to_string(),
                    row.ratio,
                    row.ratio_over_c
                );
            }
            s
        }
    }
}
