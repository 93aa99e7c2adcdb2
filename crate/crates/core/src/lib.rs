//! Exact census of nonic Heisenberg extensions of `Q` by discriminant, and the
//! numeric pipeline for the leading constant of its asymptotic.

pub mod analytic;
pub mod arith;
pub mod charspace;
pub mod counter;
pub mod eisenstein;
pub mod error;
pub mod verify;

pub use analytic::alpha::{alpha3, alpha_ell};
pub use analytic::cancellation::{char_cancellation, CancellationPattern};
pub use analytic::constants::{euler_product_p, h_constants, TruncationParams};
pub use analytic::ksum::{k_direct, psi_ell};
pub use analytic::lfunc::l_one_cubic;
pub use analytic::ratio::{log_grid, ratio_report, RatioRow};
pub use charspace::{
    chi_eval, delta, enumerate_deltas, enumerate_v, is_linearly_independent, linear_combination, DeltaIndex,
    SupportFunction,
};
pub use counter::{
    big_d, census_prime_limit, classify, enumerate_terms, enumerate_terms_with, free, heis_subsum, heis_total,
    heis_total_with, indicator, mu, mu_d, s_sum, CountReport, SubsumClass, Term, WeightMode,
};
pub use eisenstein::{
    chi_nine, chi_p, cubic_symbol, cubic_symbol_euler, primary_associate, standard_decompose, CharValue, EisensteinInt,
    StandardPrime, StandardPrimeTable,
};
pub use error::{HeisError, Result};
pub use verify::{run_suite, Suite, SuiteReport};

/// The constant report at the precision the crate computes in.
pub type ConstantReport = analytic::constants::ConstantReport<f64>;
pub type CancellationSum = analytic::cancellation::CancellationSum<f64>;
