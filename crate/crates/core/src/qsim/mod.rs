//! Exact classical simulation of Simon's algorithm.

mod recover;
mod spectrum;
mod table;
mod theory;

use thiserror::Error;

use crate::gf2::Gf2Error;

pub use recover::{
    simon_recover, simon_recover_default, step_count, CandidateVerifier, FixedFamily,
    OracleFamily, PeriodCheck, SimonFailure, SimonOutcome, MAX_KERNEL_DIMENSION,
    PERIOD_CHECK_POINTS,
};
pub use spectrum::{
    fwht, indicator_spectrum, simon_sample, simon_sample_raw, subroutine_distribution,
    PreimageSpectrum,
};
pub use table::{tabulate, FunctionTable};
pub use theory::{
    epsilon, exact_orthogonality_probability, orthogonal_character_mean, orthogonal_character_sum, repetitions_for,
    success_bound,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QsimError {
    #[error("width {0} outside the supported range")]
    WidthOverflow(u32),
    #[error("expected width {expected}, got {actual}")]
    WidthMismatch { expected: u32, actual: u32 },
    #[error("table has {actual} entries, expected {expected}")]
    TableLength { expected: usize, actual: usize },
    #[error("output {value:#x} at input {input:#x} exceeds {out_width} bits")]
    OutputTooWide { input: u32, value: u32, out_width: u32 },
    #[error("f(x ^ {period:#x}) != f(x) at x = {input:#x}")]
    PromiseViolation { input: u32, period: u32 },
    #[error("p0 = {0} is not below 1")]
    InvalidProbability(f64),
    #[error("repetition multiplier {0} must be positive")]
    InvalidMultiplier(f64),
    #[error("oracle failure: {0}")]
    Oracle(String),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}
