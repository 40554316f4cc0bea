use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::spectrum::simon_sample_raw;
use super::{FunctionTable, QsimError};
use crate::gf2::{mask, BitWord, Gf2Matrix};
use crate::rng::{rng_from_seed, stream, SimRng};

/// Largest kernel dimension whose nonzero vectors are all tried.
pub const MAX_KERNEL_DIMENSION: u32 = 8;

/// Number of random points the default verifier checks.
pub const PERIOD_CHECK_POINTS: u32 = 64;

/// Source of the function table queried by each subroutine step.
///
/// Every table drawn from one family must share the same hidden period.
pub trait OracleFamily: Sync {
    fn in_width(&self) -> u32;

    fn out_width(&self) -> u32;

    /// The table for one step. Nonce-randomized families draw a fresh nonce
    /// from `step_rng`; the others return the same table every time.
    fn fresh(&self, step_rng: &mut SimRng) -> Result<Arc<FunctionTable>, QsimError>;

    /// Superposition queries charged per step.
    fn query_cost(&self) -> u64 {
        1
    }
}

/// A family that always yields the same table.
#[derive(Clone, Debug)]
pub struct FixedFamily {
    table: Arc<FunctionTable>,
}

impl FixedFamily {
    pub fn new(table: FunctionTable) -> Self {
        table.prepare();
        Self {
            table: Arc::new(table),
        }
    }

    pub fn table(&self) -> &FunctionTable {
        &self.table
    }
}

impl OracleFamily for FixedFamily {
    fn in_width(&self) -> u32 {
        self.table.in_width()
    }

    fn out_width(&self) -> u32 {
        self.table.out_width()
    }

    fn fresh(&self, _: &mut SimRng) -> Result<Arc<FunctionTable>, QsimError> {
        Ok(Arc::clone(&self.table))
    }
}

/// Decides whether a kernel vector is the hidden period.
pub trait CandidateVerifier {
    fn accept(&mut self, candidate: BitWord) -> bool;

    /// Classical or tabulation queries spent so far.
    fn queries(&self) -> u64 {
        0
    }
}

impl<F: FnMut(BitWord) -> bool> CandidateVerifier for F {
    fn accept(&mut self, candidate: BitWord) -> bool {
        self(candidate)
    }
}

/// Tests `f(x) = f(x ⊕ candidate)` on random points of one fresh table.
///
/// The table is drawn on first use and charged as a single query.
pub struct PeriodCheck<'a> {
    family: &'a dyn OracleFamily,
    points: u32,
    rng: SimRng,
    table: Option<Arc<FunctionTable>>,
    queries: u64,
}

impl<'a> PeriodCheck<'a> {
    pub fn new(family: &'a dyn OracleFamily, seed: u64) -> Self {
        Self {
            family,
            points: PERIOD_CHECK_POINTS,
            rng: rng_from_seed(seed),
            table: None,
            queries: 0,
        }
    }
}

impl CandidateVerifier for PeriodCheck<'_> {
    fn accept(&mut self, candidate: BitWord) -> bool {
        if self.table.is_none() {
            match self.family.fresh(&mut self.rng) {
                Ok(t) => self.table = Some(t),
                Err(_) => return false,
            }
            self.queries += self.family.query_cost();
        }
        let table = self.table.as_ref().expect("table drawn");
        let m = mask(table.in_width());
        let s = candidate.value();
        (0..self.points).all(|_| {
            let x = self.rng.gen::<u32>() & m;
            table.eval(x) == table.eval(x ^ s)
        })
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}

/// Why a recovery produced no period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SimonFailure {
    /// The samples span everything: no nonzero candidate. This is also the
    /// verdict that the oracle has no hidden period.
    DimensionZero,
    /// Too many candidates to enumerate.
    RankDeficient { dimension: u32 },
    /// Every candidate was tried and rejected.
    VerifierRejected,
}

impl SimonFailure {
    pub fn tag(&self) -> &'static str {
        match self {
            SimonFailure::DimensionZero => "dimension 0",
            SimonFailure::RankDeficient { .. } => "rank-deficient",
            SimonFailure::VerifierRejected => "verifier-rejected",
        }
    }
}

impl fmt::Display for SimonFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimonFailure::RankDeficient { dimension } => {
                write!(f, "rank-deficient (kernel dimension {dimension})")
            }
            other => f.write_str(other.tag()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimonOutcome {
    /// Measured vectors, ordered by step index.
    pub samples: Vec<BitWord>,
    /// Kernel vectors in the order they were offered to the verifier.
    pub candidates: Vec<BitWord>,
    pub recovered: Option<BitWord>,
    pub steps_used: u64,
    pub kernel_dimension: u32,
    pub failure_reason: Option<SimonFailure>,
    pub superposition_queries: u64,
    pub verification_queries: u64,
}

impl SimonOutcome {
    pub fn succeeded(&self) -> bool {
        self.recovered.is_some()
    }
}

/// `ceil(c · n)` with a small tolerance for products such as `6.0 * 8.0`.
pub fn step_count(c: f64, n: u32) -> u64 {
    (c * n as f64 - 1e-9).ceil().max(1.0) as u64
}

/// Runs `ceil(c·n)` subroutine steps on tables from `family` and solves for
/// the period.
///
/// Steps use independent streams derived from one draw of `rng`, run in
/// parallel, and are collected in step order, so the outcome depends only on
/// the state of `rng`.
pub fn simon_recover(
    family: &dyn OracleFamily,
    c: f64,
    verifier: &mut dyn CandidateVerifier,
    rng: &mut SimRng,
) -> Result<SimonOutcome, QsimError> {
    let n = family.in_width();
    if !(c > 0.0) || !c.is_finite() {
        return Err(QsimError::InvalidMultiplier(c));
    }
    let steps = step_count(c, n);
    let master = rng.next_u64();
    let raw: Vec<u32> = (0..steps)
        .into_par_iter()
        .map(|i| {
            let mut step_rng = stream(master, i);
            let table = family.fresh(&mut step_rng)?;
            if table.in_width() != n {
                return Err(QsimError::WidthMismatch {
                    expected: n,
                    actual: table.in_width(),
                });
            }
            Ok(simon_sample_raw(&table, &mut step_rng))
        })
        .collect::<Result<_, _>>()?;

    let samples: Vec<BitWord> = raw
        .iter()
        .map(|&y| BitWord::new(n, y).expect("sample fits width"))
        .collect();
    let matrix = Gf2Matrix::from_raw(n, raw)?;
    let basis = matrix.kernel_basis();
    let dimension = basis.len() as u32;

    let mut outcome = SimonOutcome {
        samples,
        candidates: Vec::new(),
        recovered: None,
        steps_used: steps,
        kernel_dimension: dimension,
        failure_reason: None,
        superposition_queries: steps * family.query_cost(),
        verification_queries: 0,
    };

    if dimension == 0 {
        outcome.failure_reason = Some(SimonFailure::DimensionZero);
    } else if dimension > MAX_KERNEL_DIMENSION {
        outcome.failure_reason = Some(SimonFailure::RankDeficient { dimension });
    } else {
        for combo in 1u32..1 << dimension {
            let v = basis
                .iter()
                .enumerate()
                .filter(|(i, _)| combo >> i & 1 == 1)
                .fold(0u32, |acc, (_, b)| acc ^ b.value());
            let candidate = BitWord::new(n, v).expect("kernel vector fits width");
            outcome.candidates.push(candidate);
            if verifier.accept(candidate) {
                outcome.recovered = Some(candidate);
                break;
            }
        }
        if outcome.recovered.is_none() {
            outcome.failure_reason = Some(SimonFailure::VerifierRejected);
        }
    }
    outcome.verification_queries = verifier.queries();
    Ok(outcome)
}

/// `simon_recover` with the default period-check verifier.
pub fn simon_recover_default(
    family: &dyn OracleFamily,
    c: f64,
    rng: &mut SimRng,
) -> Result<SimonOutcome, QsimError> {
    let mut verifier = PeriodCheck::new(family, rng.next_u64());
    simon_recover(family, c, &mut verifier, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::tabulate;

    #[test]
    fn recovers_two_bit_period() {
        let family = FixedFamily::new(FunctionTable::from_values(2, 1, vec![0, 1, 1, 0]).unwrap());
        let mut rng = rng_from_seed(3);
        let out = simon_recover_default(&family, 10.0, &mut rng).unwrap();
        assert_eq!(out.recovered, Some(BitWord::new(2, 0b11).unwrap()));
        assert_eq!(out.steps_used, 20);
        assert_eq!(out.superposition_queries, 20);
        assert_eq!(out.verification_queries, 1);
        assert!(out.samples.iter().all(|y| y.value() == 0 || y.value() == 3));
    }

    #[test]
    fn rejecting_verifier_lists_candidates() {
        // constant on 2 bits: every sample is zero, kernel is everything
        let family = FixedFamily::new(tabulate(|_| 0, 2, 1).unwrap());
        let mut rng = rng_from_seed(9);
        let mut reject = |_: BitWord| false;
        let out = simon_recover(&family, 6.0, &mut reject, &mut rng).unwrap();
        assert_eq!(out.kernel_dimension, 2);
        assert_eq!(out.candidates.len(), 3);
        assert_eq!(out.recovered, None);
        assert_eq!(out.failure_reason, Some(SimonFailure::VerifierRejected));
    }

    #[test]
    fn constant_oracle_is_rank_deficient() {
        let family = FixedFamily::new(tabulate(|_| 0, 12, 1).unwrap());
        let mut rng = rng_from_seed(1);
        let out = simon_recover_default(&family, 6.0, &mut rng).unwrap();
        assert_eq!(out.failure_reason, Some(SimonFailure::RankDeficient { dimension: 12 }));
        assert_eq!(out.failure_reason.unwrap().tag(), "rank-deficient");
    }

    #[test]
    fn bijection_gives_dimension_zero_verdict() {
        let family = FixedFamily::new(tabulate(|x| (x * 37 + 11) & 0xff, 8, 8).unwrap());
        let mut rng = rng_from_seed(11);
        let out = simon_recover_default(&family, 6.0, &mut rng).unwrap();
        assert_eq!(out.failure_reason, Some(SimonFailure::DimensionZero));
        assert_eq!(out.verification_queries, 0);
    }

    #[test]
    fn outcome_depends_only_on_rng_state() {
        let s = 0b1011_0110u32;
        let family = FixedFamily::new(tabulate(move |x| x.min(x ^ s), 8, 8).unwrap());
        let a = simon_recover_default(&family, 6.0, &mut rng_from_seed(4)).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| simon_recover_default(&family, 6.0, &mut rng_from_seed(4)).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.recovered.map(|r| r.value()), Some(s));
    }

    #[test]
    fn rejects_bad_multiplier() {
        let family = FixedFamily::new(tabulate(|x| x, 2, 2).unwrap());
        let mut rng = rng_from_seed(0);
        assert!(simon_recover_default(&family, 0.0, &mut rng).is_err());
    }
}
