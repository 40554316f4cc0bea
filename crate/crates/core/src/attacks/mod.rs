//! Superposition attacks: Simon-function builders, recovery, classical
//! post-processing, forgeries and query accounting.

mod audit;
mod forgery;
mod instance;

use std::fmt;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constructions::{ConstructionError, FeistelMode, HashKind};
use crate::gf2::{mask, BitWord, Gf2Error};
use crate::modes::ModeError;
use crate::primitives::{CipherKind, PrimitiveError};
use crate::qsim::{simon_recover, success_bound, QsimError, SimonFailure};
use crate::rng::SimRng;

pub use audit::{
    classical_baseline, constant_control_audit, epsilon_audit, BaselineResult, EpsilonAudit,
    MAX_AUDIT_WIDTH,
};
pub use forgery::{make_forgeries, Forgery, ForgeryBatch, ForgeryOrigin};
pub use instance::{instantiate, Instance, SimonFamily};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AttackKind {
    Feistel3,
    EvenMansour,
    Lrw,
    CbcMac,
    #[serde(rename = "pmac-1")]
    Pmac1,
    #[serde(rename = "pmac-2")]
    Pmac2,
    Gmac,
    Gcm,
    OcbAuth,
    OcbEnc,
    Slide,
}

impl AttackKind {
    pub const ALL: [AttackKind; 11] = [
        AttackKind::Feistel3,
        AttackKind::EvenMansour,
        AttackKind::Lrw,
        AttackKind::CbcMac,
        AttackKind::Pmac1,
        AttackKind::Pmac2,
        AttackKind::Gmac,
        AttackKind::Gcm,
        AttackKind::OcbAuth,
        AttackKind::OcbEnc,
        AttackKind::Slide,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AttackKind::Feistel3 => "feistel3",
            AttackKind::EvenMansour => "even-mansour",
            AttackKind::Lrw => "lrw",
            AttackKind::CbcMac => "cbc-mac",
            AttackKind::Pmac1 => "pmac-1",
            AttackKind::Pmac2 => "pmac-2",
            AttackKind::Gmac => "gmac",
            AttackKind::Gcm => "gcm",
            AttackKind::OcbAuth => "ocb-auth",
            AttackKind::OcbEnc => "ocb-enc",
            AttackKind::Slide => "slide",
        }
    }

    /// Attacked construction or mode.
    pub fn target(self) -> &'static str {
        match self {
            AttackKind::Feistel3 => "three-round Feistel network",
            AttackKind::EvenMansour => "Even-Mansour cipher",
            AttackKind::Lrw => "LRW tweakable cipher (XEX or Gray offsets)",
            AttackKind::CbcMac => "encrypt-last-block CBC-MAC",
            AttackKind::Pmac1 => "PMAC",
            AttackKind::Pmac2 => "PMAC",
            AttackKind::Gmac => "GMAC",
            AttackKind::Gcm => "GCM",
            AttackKind::OcbAuth => "OCB",
            AttackKind::OcbEnc => "OCB",
            AttackKind::Slide => "key-alternating cipher with identical rounds",
        }
    }

    /// The Simon function and what its period yields.
    pub fn technique(self) -> &'static str {
        match self {
            AttackKind::Feistel3 => "distinguisher: b,x -> y_R ^ a_b has period 1||R1(a0)^R1(a1)",
            AttackKind::EvenMansour => "key recovery: x -> E(x) ^ P(x) has period k1",
            AttackKind::Lrw => "distinguisher and L recovery: E_t0(x) ^ E_t1(x) has period h(t0)^h(t1)",
            AttackKind::CbcMac => "forgery: b,x -> MAC(a_b||x) has period 1||E(a0)^E(a1)",
            AttackKind::Pmac1 => "forgery: b,x -> MAC(a_b||x) has period 1||E(a0^D0)^E(a1^D0)",
            AttackKind::Pmac2 => "forgery and L recovery: m -> MAC(m||m||0) has period D0^D1",
            AttackKind::Gmac => "forgery and H recovery: b,x -> GMAC(N, a_b||x) has period 1||(a0^a1)H for every nonce",
            AttackKind::Gcm => "forgery on associated data through the empty-message GMAC path",
            AttackKind::OcbAuth => "forgery on associated data: a -> tag(N, a||a, empty) has period D0^D1",
            AttackKind::OcbEnc => "forgery by block swap: m -> c1^c2 of (m||m) has period D1^D2",
            AttackKind::Slide => "key recovery: P(E(x))^x and E(P(x))^x have period 1||k",
        }
    }

    /// Whether the Simon domain carries an extra selector bit.
    pub fn has_selector(self) -> bool {
        matches!(
            self,
            AttackKind::Feistel3
                | AttackKind::CbcMac
                | AttackKind::Pmac1
                | AttackKind::Gmac
                | AttackKind::Gcm
                | AttackKind::Slide
        )
    }

    /// Whether every subroutine step sees a fresh oracle-chosen nonce.
    pub fn nonce_randomized(self) -> bool {
        matches!(
            self,
            AttackKind::Gmac | AttackKind::Gcm | AttackKind::OcbAuth | AttackKind::OcbEnc
        )
    }

    pub fn forges(self) -> bool {
        matches!(
            self,
            AttackKind::CbcMac
                | AttackKind::Pmac1
                | AttackKind::Pmac2
                | AttackKind::Gmac
                | AttackKind::Gcm
                | AttackKind::OcbAuth
                | AttackKind::OcbEnc
        )
    }

    pub fn supports_null_model(self) -> bool {
        matches!(self, AttackKind::Feistel3 | AttackKind::Lrw)
    }

    /// Supported block widths (half width for Feistel).
    pub fn width_range(self) -> (u32, u32) {
        match self {
            AttackKind::Feistel3 => (2, 12),
            AttackKind::Lrw => (5, 20),
            _ => (4, 20),
        }
    }
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AttackKind {
    type Err = AttackError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AttackKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| AttackError::UnknownAttack(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttackError {
    #[error("unknown attack {0:?}")]
    UnknownAttack(String),
    #[error("width {width} outside {min}..={max} for {kind}")]
    Width { kind: AttackKind, width: u32, min: u32, max: u32 },
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("{0} has no null model")]
    NoNullModel(AttackKind),
    #[error(transparent)]
    Qsim(#[from] QsimError),
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

/// Everything that determines one attack instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackSpec {
    pub kind: AttackKind,
    pub width: u32,
    /// Seed for keys, permutations and oracle nonces.
    pub seed: u64,
    pub alpha0: u32,
    pub alpha1: u32,
    pub tweak0: u64,
    pub tweak1: u64,
    pub c: f64,
    pub cipher: CipherKind,
    pub hash: HashKind,
    pub feistel_mode: FeistelMode,
    pub slide_rounds: u32,
    /// Replace the construction by a structureless ideal primitive.
    pub null_model: bool,
}

pub const DEFAULT_C: f64 = 6.0;
pub const DEFAULT_SLIDE_ROUNDS: u32 = 9;

impl AttackSpec {
    pub fn new(kind: AttackKind, width: u32, seed: u64) -> Self {
        Self {
            kind,
            width,
            seed,
            alpha0: 0,
            alpha1: 1,
            tweak0: 0,
            tweak1: 1,
            c: DEFAULT_C,
            cipher: CipherKind::RandomPerm,
            hash: HashKind::Xex,
            feistel_mode: FeistelMode::PermutationRounds,
            slide_rounds: DEFAULT_SLIDE_ROUNDS,
            null_model: false,
        }
    }

    /// Width of the Simon domain: `n`, or `n + 1` with a selector bit.
    pub fn simon_width(&self) -> u32 {
        self.width + self.kind.has_selector() as u32
    }

    pub fn validate(&self) -> Result<(), AttackError> {
        let (min, max) = self.kind.width_range();
        if self.width < min || self.width > max {
            return Err(AttackError::Width {
                kind: self.kind,
                width: self.width,
                min,
                max,
            });
        }
        let m = mask(self.width);
        if self.alpha0 == self.alpha1 || self.alpha0 & !m != 0 || self.alpha1 & !m != 0 {
            return Err(AttackError::Parameters(format!(
                "alpha0 {:#x} and alpha1 {:#x} must be distinct {}-bit values",
                self.alpha0, self.alpha1, self.width
            )));
        }
        let tweaks = 1u64 << crate::constructions::DEFAULT_TWEAK_WIDTH;
        if self.tweak0 == self.tweak1 || self.tweak0 >= tweaks || self.tweak1 >= tweaks {
            return Err(AttackError::Parameters(format!(
                "tweaks {} and {} must be distinct and below {tweaks}",
                self.tweak0, self.tweak1
            )));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(AttackError::Parameters(format!("c = {} must be positive", self.c)));
        }
        if self.slide_rounds == 0 {
            return Err(AttackError::Parameters("slide rounds must be at least 1".into()));
        }
        if self.cipher == CipherKind::ToySpn && self.width % 4 != 0 {
            return Err(AttackError::Parameters(format!(
                "toy-spn needs a width divisible by 4, got {}",
                self.width
            )));
        }
        if self.null_model && !self.kind.supports_null_model() {
            return Err(AttackError::NoNullModel(self.kind));
        }
        Ok(())
    }

    /// The success lower bound `success_bound(½, c, simon_width)`.
    pub fn theoretical_bound(&self) -> f64 {
        success_bound(0.5, self.c, self.simon_width())
    }
}

/// A labelled secret recovered by the attack.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecoveredValue {
    pub label: String,
    pub value: BitWord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AttackReport {
    pub spec: AttackSpec,
    /// Period found by Simon's algorithm, over the full Simon domain.
    pub period: Option<BitWord>,
    pub recovered: Vec<RecoveredValue>,
    pub kernel_dimension: u32,
    pub subroutine_steps: u64,
    pub superposition_queries: u64,
    /// Queries spent testing kernel candidates.
    pub verification_queries: u64,
    /// Other classical queries: post-processing checks and forgery sources.
    pub classical_queries: u64,
    pub total_queries: u64,
    pub forgeries: Vec<Forgery>,
    pub forgery_shortfall: Option<String>,
    pub success: bool,
    pub failure: Option<String>,
    pub theoretical_bound: f64,
}

impl AttackReport {
    pub fn verified_forgeries(&self) -> usize {
        self.forgeries.iter().filter(|f| f.verified).count()
    }

    pub fn recovered_value(&self, label: &str) -> Option<u32> {
        self.recovered
            .iter()
            .find(|r| r.label == label)
            .map(|r| r.value.value())
    }
}

/// Runs one attack. Construction randomness comes from `spec.seed`; the
/// quantum measurements and classical query choices come from `rng`.
///
/// Recovery failures are reported with `success = false`; only invalid
/// specs and internal errors return `Err`.
pub fn run_attack(spec: &AttackSpec, rng: &mut SimRng) -> Result<AttackReport, AttackError> {
    let inst = instantiate(spec)?;
    let family = inst.family()?;
    let mut verifier = inst.verifier(&family, rng.next_u64());
    let outcome = simon_recover(&family, spec.c, verifier.as_mut(), rng)?;
    drop(verifier);

    let mut report = AttackReport {
        spec: spec.clone(),
        period: outcome.recovered,
        recovered: Vec::new(),
        kernel_dimension: outcome.kernel_dimension,
        subroutine_steps: outcome.steps_used,
        superposition_queries: outcome.superposition_queries,
        verification_queries: outcome.verification_queries,
        classical_queries: 0,
        total_queries: 0,
        forgeries: Vec::new(),
        forgery_shortfall: None,
        success: false,
        failure: outcome.failure_reason.as_ref().map(|f| f.tag().to_string()),
        theoretical_bound: spec.theoretical_bound(),
    };

    if spec.null_model {
        // the correct verdict for a structureless oracle is an empty kernel
        report.success = outcome.failure_reason == Some(SimonFailure::DimensionZero);
    } else if let Some(period) = outcome.recovered {
        match inst.post_process(period.value(), rng) {
            Ok(post) => {
                report.recovered = post.recovered;
                report.success = post.checked;
                if !post.checked {
                    report.failure = Some("classical check rejected the recovered secret".into());
                }
                if let (true, Some(secret)) = (spec.kind.forges(), post.forge_secret) {
                    let needed = inst.queries_total() + 1;
                    let batch = make_forgeries(&inst, secret, needed, rng)?;
                    report.forgery_shortfall = batch.shortfall;
                    report.forgeries = batch.forgeries;
                    let total = inst.queries_total();
                    let all_verified = report.forgeries.iter().all(|f| f.verified);
                    report.success = all_verified && report.forgeries.len() as u64 > total;
                    if !report.success {
                        report.failure = Some(format!(
                            "{} forgeries ({} verified) against {} queries",
                            report.forgeries.len(),
                            report.verified_forgeries(),
                            total
                        ));
                    }
                }
            }
            Err(reason) => report.failure = Some(reason),
        }
    }

    report.total_queries = inst.queries_total();
    report.classical_queries = report
        .total_queries
        .saturating_sub(report.superposition_queries + report.verification_queries);
    Ok(report)
}
