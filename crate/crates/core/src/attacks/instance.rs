use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use rand::{Rng, RngCore};

use super::{AttackError, AttackKind, AttackSpec, RecoveredValue};
use crate::constructions::{
    EvenMansour, Feistel3, IdealTweakable, LrwCipher, SlideCipher, TweakableCipher,
    DEFAULT_TWEAK_WIDTH,
};
use crate::gf2::{mask, BitWord, FieldContext};
use crate::modes::{CbcMac, Gcm, Gmac, NonceScheme, Ocb, Oracle, Pmac, QueryCounter};
use crate::primitives::{keyed_family, random_perm, BlockCipher, KeyedCipher, KeyedFamily, ToyPerm};
use crate::qsim::{CandidateVerifier, FunctionTable, OracleFamily, PeriodCheck, QsimError};
use crate::rng::{rng_from_seed, SimRng};

pub(super) enum Target {
    Feistel(Oracle<Box<dyn BlockCipher>>),
    EvenMansour {
        oracle: Oracle<EvenMansour>,
        perm: Arc<ToyPerm>,
    },
    Lrw(Oracle<Box<dyn TweakableCipher>>),
    CbcMac(Oracle<CbcMac>),
    Pmac(Oracle<Pmac>),
    Gmac(Oracle<Gmac>),
    Gcm(Oracle<Gcm>),
    Ocb(Oracle<Ocb>),
    Slide {
        oracle: Oracle<SlideCipher>,
        perm: Arc<ToyPerm>,
    },
}

/// A keyed attack target plus the ground truth needed to grade the attack.
///
/// The attack itself only goes through the counting oracle and public
/// components; the ground truth is kept for reports and tests.
pub struct Instance {
    spec: AttackSpec,
    target: Target,
    ctx: FieldContext,
    planted: Option<u32>,
    truth: Vec<RecoveredValue>,
}

/// Classical results derived from a recovered period.
pub(super) struct PostProcess {
    pub recovered: Vec<RecoveredValue>,
    pub checked: bool,
    pub forge_secret: Option<u32>,
}

fn value(label: &str, width: u32, v: u32) -> RecoveredValue {
    RecoveredValue {
        label: label.to_string(),
        value: BitWord::new(width, v).expect("value fits width"),
    }
}

// keys with E_k(0) = 0 give a zero offset mask or hash key
fn draw_key(
    family: &KeyedFamily,
    rng: &mut SimRng,
    avoid: Option<u32>,
) -> Result<KeyedCipher, AttackError> {
    let n = family.width();
    loop {
        let k = rng.gen::<u32>() & mask(n);
        if Some(k) == avoid {
            continue;
        }
        let cipher = family.cipher(BitWord::new(n, k)?)?;
        if cipher.encrypt(0) != 0 {
            return Ok(cipher);
        }
    }
}

fn nonzero(rng: &mut SimRng, width: u32) -> u32 {
    loop {
        let v = rng.gen::<u32>() & mask(width);
        if v != 0 {
            return v;
        }
    }
}

/// Builds the keyed target for `spec`. All key material comes from
/// `spec.seed`.
pub fn instantiate(spec: &AttackSpec) -> Result<Instance, AttackError> {
    spec.validate()?;
    let n = spec.width;
    let (a0, a1) = (spec.alpha0, spec.alpha1);
    let ctx = FieldContext::new(n)?;
    let mut rng = rng_from_seed(spec.seed);
    let key_seed = rng.next_u64();
    let oracle_seed = rng.next_u64();
    let keyed = || keyed_family(n, spec.cipher, key_seed);
    let sel = 1u32 << n;

    let (target, planted, truth) = match spec.kind {
        AttackKind::Feistel3 => {
            if spec.null_model {
                let e: Box<dyn BlockCipher> = Box::new(random_perm(2 * n, key_seed)?);
                (Target::Feistel(Oracle::new(Arc::new(e), oracle_seed)), None, vec![])
            } else {
                let f3 = Feistel3::random(n, spec.feistel_mode, key_seed)?;
                let delta = f3.round(1).apply(a0) ^ f3.round(1).apply(a1);
                let e: Box<dyn BlockCipher> = Box::new(f3);
                (
                    Target::Feistel(Oracle::new(Arc::new(e), oracle_seed)),
                    Some(sel | delta),
                    vec![value("delta", n, delta)],
                )
            }
        }
        AttackKind::EvenMansour => {
            let perm = Arc::new(random_perm(n, key_seed)?);
            let k1 = nonzero(&mut rng, n);
            let k2 = rng.gen::<u32>() & mask(n);
            let em = EvenMansour::new(Arc::clone(&perm), BitWord::new(n, k1)?, BitWord::new(n, k2)?)?;
            (
                Target::EvenMansour {
                    oracle: Oracle::new(Arc::new(em), oracle_seed),
                    perm,
                },
                Some(k1),
                vec![value("k1", n, k1), value("k2", n, k2)],
            )
        }
        AttackKind::Lrw => {
            if spec.null_model {
                let e: Box<dyn TweakableCipher> =
                    Box::new(IdealTweakable::new(n, DEFAULT_TWEAK_WIDTH, key_seed)?);
                (Target::Lrw(Oracle::new(Arc::new(e), oracle_seed)), None, vec![])
            } else {
                let cipher = draw_key(&keyed()?, &mut rng, None)?;
                let lrw = LrwCipher::new(cipher, spec.hash, DEFAULT_TWEAK_WIDTH)?;
                let s = lrw.offset(spec.tweak0)? ^ lrw.offset(spec.tweak1)?;
                let l = lrw.l().value();
                let e: Box<dyn TweakableCipher> = Box::new(lrw);
                (
                    Target::Lrw(Oracle::new(Arc::new(e), oracle_seed)),
                    Some(s),
                    vec![value("L", n, l)],
                )
            }
        }
        AttackKind::CbcMac => {
            let fam = keyed()?;
            let k = draw_key(&fam, &mut rng, None)?;
            let k_final = draw_key(&fam, &mut rng, Some(k.key().value()))?;
            let delta = k.encrypt(a0) ^ k.encrypt(a1);
            let mac = CbcMac::new(k, k_final)?;
            (
                Target::CbcMac(Oracle::new(Arc::new(mac), oracle_seed)),
                Some(sel | delta),
                vec![value("delta", n, delta)],
            )
        }
        AttackKind::Pmac1 | AttackKind::Pmac2 => {
            let k = draw_key(&keyed()?, &mut rng, None)?;
            let mac = Pmac::new(k.clone())?;
            let (planted, truth) = if spec.kind == AttackKind::Pmac1 {
                let d0 = mac.offset(0);
                let delta = k.encrypt(a0 ^ d0) ^ k.encrypt(a1 ^ d0);
                (sel | delta, value("delta", n, delta))
            } else {
                (mac.offset(0) ^ mac.offset(1), value("L", n, mac.l()))
            };
            (
                Target::Pmac(Oracle::new(Arc::new(mac), oracle_seed)),
                Some(planted),
                vec![truth],
            )
        }
        AttackKind::Gmac => {
            let mac = Gmac::new(draw_key(&keyed()?, &mut rng, None)?)?;
            let h = mac.h();
            (
                Target::Gmac(Oracle::new(Arc::new(mac), oracle_seed)),
                Some(sel | ctx.mul(a0 ^ a1, h)),
                vec![value("H", n, h)],
            )
        }
        AttackKind::Gcm => {
            let gcm = Gcm::new(draw_key(&keyed()?, &mut rng, None)?)?;
            let h = gcm.h();
            (
                Target::Gcm(Oracle::new(Arc::new(gcm), oracle_seed)),
                Some(sel | ctx.mul(a0 ^ a1, h)),
                vec![value("H", n, h)],
            )
        }
        AttackKind::OcbAuth | AttackKind::OcbEnc => {
            let ocb = Ocb::new(draw_key(&keyed()?, &mut rng, None)?)?;
            let planted = if spec.kind == AttackKind::OcbAuth {
                ocb.ad_offset(0) ^ ocb.ad_offset(1)
            } else {
                ocb.message_offset(0, 1) ^ ocb.message_offset(0, 2)
            };
            let l = ocb.l();
            (
                Target::Ocb(Oracle::new(Arc::new(ocb), oracle_seed)),
                Some(planted),
                vec![value("L", n, l)],
            )
        }
        AttackKind::Slide => {
            let perm = Arc::new(random_perm(n, key_seed)?);
            let k = nonzero(&mut rng, n);
            let sc = SlideCipher::new(Arc::clone(&perm), BitWord::new(n, k)?, spec.slide_rounds)?;
            (
                Target::Slide {
                    oracle: Oracle::new(Arc::new(sc), oracle_seed),
                    perm,
                },
                Some(sel | k),
                vec![value("k", n, k)],
            )
        }
    };

    Ok(Instance {
        spec: spec.clone(),
        target,
        ctx,
        planted,
        truth,
    })
}

impl Instance {
    pub fn spec(&self) -> &AttackSpec {
        &self.spec
    }

    pub(super) fn target(&self) -> &Target {
        &self.target
    }

    pub fn field(&self) -> &FieldContext {
        &self.ctx
    }

    /// The period hidden in the Simon function, if the target has one.
    pub fn planted_period(&self) -> Option<BitWord> {
        self.planted
            .map(|s| BitWord::new(self.simon_width(), s).expect("period fits width"))
    }

    /// Secrets a successful attack should recover, by label.
    pub fn ground_truth(&self) -> &[RecoveredValue] {
        &self.truth
    }

    pub fn simon_width(&self) -> u32 {
        self.spec.simon_width()
    }

    pub fn counter(&self) -> &QueryCounter {
        match &self.target {
            Target::Feistel(o) => o.counter(),
            Target::EvenMansour { oracle, .. } => oracle.counter(),
            Target::Lrw(o) => o.counter(),
            Target::CbcMac(o) => o.counter(),
            Target::Pmac(o) => o.counter(),
            Target::Gmac(o) => o.counter(),
            Target::Gcm(o) => o.counter(),
            Target::Ocb(o) => o.counter(),
            Target::Slide { oracle, .. } => oracle.counter(),
        }
    }

    pub fn queries_total(&self) -> u64 {
        self.counter().total()
    }

    /// Oracle calls per evaluation of the Simon function.
    pub fn step_cost(&self) -> u64 {
        match self.spec.kind {
            AttackKind::Lrw => 2,
            _ => 1,
        }
    }

    fn nonce_width(&self) -> Option<u32> {
        match &self.target {
            Target::Gmac(o) => Some(o.scheme().nonce_width()),
            Target::Gcm(o) => Some(o.scheme().nonce_width()),
            Target::Ocb(o) => Some(o.scheme().nonce_width()),
            _ => None,
        }
    }

    /// The Simon function under `nonce` (ignored by nonce-free targets),
    /// evaluated on the keyed scheme directly and not charged.
    pub fn simon_eval(&self, nonce: u32, x: u32) -> u32 {
        let n = self.spec.width;
        let m = mask(n);
        let lo = x & m;
        let alpha = if x >> n & 1 == 0 {
            self.spec.alpha0
        } else {
            self.spec.alpha1
        };
        match &self.target {
            Target::Feistel(o) => o.scheme().encrypt(alpha << n | lo) & m ^ alpha,
            Target::EvenMansour { oracle, perm } => oracle.scheme().encrypt(x) ^ perm.apply(x),
            Target::Lrw(o) => {
                let e = o.scheme();
                e.encrypt_tweaked(self.spec.tweak0, x) ^ e.encrypt_tweaked(self.spec.tweak1, x)
            }
            Target::CbcMac(o) => o.scheme().tag_raw(&[alpha, lo]),
            Target::Pmac(o) => match self.spec.kind {
                AttackKind::Pmac1 => o.scheme().tag_raw(&[alpha, lo]),
                _ => o.scheme().tag_raw(&[x, x, 0]),
            },
            Target::Gmac(o) => o.scheme().tag_raw(nonce, &[alpha, lo]),
            Target::Gcm(o) => o.scheme().tag_raw(nonce, &[alpha, lo], &[]),
            Target::Ocb(o) => match self.spec.kind {
                AttackKind::OcbAuth => o.scheme().auth_tag_raw(nonce, &[x, x]),
                _ => {
                    let (c, _) = o.scheme().seal_raw(nonce, &[], &[x, x]);
                    c[0] ^ c[1]
                }
            },
            Target::Slide { oracle, perm } => {
                let e = oracle.scheme();
                if x >> n & 1 == 0 {
                    perm.apply(e.encrypt(lo)) ^ lo
                } else {
                    e.encrypt(perm.apply(lo)) ^ lo
                }
            }
        }
    }

    /// Truth table of the Simon function under `nonce`, not charged.
    pub fn simon_table(&self, nonce: u32) -> Result<FunctionTable, QsimError> {
        FunctionTable::tabulate(self.simon_width(), self.spec.width, |x| self.simon_eval(nonce, x))
    }

    fn charge_superposition(&self) {
        for _ in 0..self.step_cost() {
            match &self.target {
                Target::Feistel(o) => o.counter().charge_superposition(),
                Target::EvenMansour { oracle, .. } => oracle.counter().charge_superposition(),
                Target::Lrw(o) => o.counter().charge_superposition(),
                Target::CbcMac(o) => o.counter().charge_superposition(),
                Target::Pmac(o) => o.counter().charge_superposition(),
                Target::Gmac(o) => o.counter().charge_superposition(),
                Target::Gcm(o) => o.counter().charge_superposition(),
                Target::Ocb(o) => o.counter().charge_superposition(),
                Target::Slide { oracle, .. } => oracle.counter().charge_superposition(),
            }
        }
    }

    fn charge_classical(&self) {
        for _ in 0..self.step_cost() {
            match &self.target {
                Target::Feistel(o) => o.counter().charge_classical(),
                Target::EvenMansour { oracle, .. } => oracle.counter().charge_classical(),
                Target::Lrw(o) => o.counter().charge_classical(),
                Target::CbcMac(o) => o.counter().charge_classical(),
                Target::Pmac(o) => o.counter().charge_classical(),
                Target::Gmac(o) => o.counter().charge_classical(),
                Target::Gcm(o) => o.counter().charge_classical(),
                Target::Ocb(o) => o.counter().charge_classical(),
                Target::Slide { oracle, .. } => oracle.counter().charge_classical(),
            }
        }
    }

    /// One superposition query of the Simon function. Nonce-based targets
    /// draw the nonce from `step_rng` on the oracle side.
    pub fn superposition_table(&self, step_rng: &mut SimRng) -> Result<FunctionTable, QsimError> {
        let nonce = match self.nonce_width() {
            Some(w) => step_rng.gen::<u32>() & mask(w),
            None => 0,
        };
        let table = self.simon_table(nonce)?;
        self.charge_superposition();
        Ok(table)
    }

    /// One classical evaluation of the Simon function. `None` for targets
    /// whose oracle picks the nonce.
    pub fn classical_eval(&self, x: u32) -> Option<u32> {
        if self.spec.kind.nonce_randomized() {
            return None;
        }
        self.charge_classical();
        Some(self.simon_eval(0, x))
    }

    /// The oracle family handed to Simon's algorithm.
    pub fn family(&self) -> Result<SimonFamily<'_>, QsimError> {
        let fixed = if self.spec.kind.nonce_randomized() {
            None
        } else {
            // tabulated once; every later step is still charged
            let table = self.superposition_table(&mut rng_from_seed(0))?;
            table.prepare();
            Some(Arc::new(table))
        };
        Ok(SimonFamily {
            inst: self,
            fixed,
            handed_over: AtomicBool::new(false),
        })
    }

    /// Candidate test used during recovery.
    pub fn verifier<'a>(
        &'a self,
        family: &'a SimonFamily<'a>,
        seed: u64,
    ) -> Box<dyn CandidateVerifier + 'a> {
        match &self.target {
            Target::Feistel(oracle) => Box::new(FeistelCheck {
                oracle,
                width: self.spec.width,
                alpha0: self.spec.alpha0,
                alpha1: self.spec.alpha1,
                rng: rng_from_seed(seed),
                queries: 0,
            }),
            _ => Box::new(PeriodCheck::new(family, seed)),
        }
    }

    /// Turns a recovered period into the attacked secrets.
    pub(super) fn post_process(&self, period: u32, rng: &mut SimRng) -> Result<PostProcess, String> {
        let spec = &self.spec;
        let n = spec.width;
        let m = mask(n);
        let lo = period & m;
        if spec.kind.has_selector() && period >> n & 1 == 0 {
            return Err("period lacks the selector bit".into());
        }
        let ctx = &self.ctx;
        let inv = |a: u32| ctx.inv(a).ok_or_else(|| format!("{a:#x} is not invertible"));
        let mut out = PostProcess {
            recovered: Vec::new(),
            checked: true,
            forge_secret: None,
        };
        match (&self.target, spec.kind) {
            (Target::Feistel(_), _) => out.recovered.push(value("delta", n, lo)),
            (Target::EvenMansour { oracle, perm }, _) => {
                let k1 = period;
                let x0 = rng.gen::<u32>() & m;
                let k2 = oracle.encrypt(x0) ^ perm.apply(x0 ^ k1);
                let x1 = rng.gen::<u32>() & m;
                out.checked = oracle.encrypt(x1) == perm.apply(x1 ^ k1) ^ k2;
                out.recovered.push(value("k1", n, k1));
                out.recovered.push(value("k2", n, k2));
            }
            (Target::Lrw(oracle), _) => {
                let c0 = spec.hash.coefficient(ctx, spec.tweak0);
                let c1 = spec.hash.coefficient(ctx, spec.tweak1);
                let l = ctx.mul(period, inv(c0 ^ c1)?);
                let h0 = ctx.mul(c0, l);
                out.checked = oracle.encrypt_tweaked(spec.tweak0, h0) == l ^ h0;
                out.recovered.push(value("L", n, l));
            }
            (_, AttackKind::CbcMac | AttackKind::Pmac1) => {
                out.recovered.push(value("delta", n, lo));
                out.forge_secret = Some(lo);
            }
            (_, AttackKind::Pmac2 | AttackKind::OcbAuth) => {
                out.recovered.push(value("L", n, ctx.mul(period, inv(2)?)));
                out.forge_secret = Some(period);
            }
            (_, AttackKind::OcbEnc) => {
                out.recovered.push(value("L", n, period));
                out.forge_secret = Some(period);
            }
            (_, AttackKind::Gmac | AttackKind::Gcm) => {
                let h = ctx.mul(lo, inv(spec.alpha0 ^ spec.alpha1)?);
                out.recovered.push(value("H", n, h));
                out.forge_secret = Some(h);
            }
            (Target::Slide { oracle, perm }, _) => {
                let sim = SlideCipher::new(
                    Arc::clone(perm),
                    BitWord::new(n, lo).map_err(|e| e.to_string())?,
                    spec.slide_rounds,
                )
                .map_err(|e| e.to_string())?;
                let x = rng.gen::<u32>() & m;
                out.checked = oracle.encrypt(x) == sim.encrypt(x);
                out.recovered.push(value("k", n, lo));
            }
            _ => unreachable!("target and kind always agree"),
        }
        Ok(out)
    }
}

/// Simon-function tables as seen by Simon's algorithm.
pub struct SimonFamily<'a> {
    inst: &'a Instance,
    fixed: Option<Arc<FunctionTable>>,
    handed_over: AtomicBool,
}

impl OracleFamily for SimonFamily<'_> {
    fn in_width(&self) -> u32 {
        self.inst.simon_width()
    }

    fn out_width(&self) -> u32 {
        self.inst.spec.width
    }

    fn fresh(&self, step_rng: &mut SimRng) -> Result<Arc<FunctionTable>, QsimError> {
        match &self.fixed {
            Some(table) => {
                // the first hand-over was charged when the table was built
                if self.handed_over.swap(true, Ordering::SeqCst) {
                    self.inst.charge_superposition();
                }
                Ok(Arc::clone(table))
            }
            None => Ok(Arc::new(self.inst.superposition_table(step_rng)?)),
        }
    }

    fn query_cost(&self) -> u64 {
        self.inst.step_cost()
    }
}

/// Two classical queries per candidate: with `δ` the candidate's low half,
/// the right output halves of `(α0, x)` and `(α1, x ⊕ δ)` differ by `α0 ⊕ α1`.
struct FeistelCheck<'a> {
    oracle: &'a Oracle<Box<dyn BlockCipher>>,
    width: u32,
    alpha0: u32,
    alpha1: u32,
    rng: SimRng,
    queries: u64,
}

impl CandidateVerifier for FeistelCheck<'_> {
    fn accept(&mut self, candidate: BitWord) -> bool {
        let n = self.width;
        let m = mask(n);
        let c = candidate.value();
        if c >> n & 1 == 0 {
            return false;
        }
        let x = self.rng.gen::<u32>() & m;
        let y0 = self.oracle.encrypt(self.alpha0 << n | x) & m;
        let y1 = self.oracle.encrypt(self.alpha1 << n | (x ^ c & m)) & m;
        self.queries += 2;
        y0 ^ y1 == self.alpha0 ^ self.alpha1
    }

    fn queries(&self) -> u64 {
        self.queries
    }
}
