//! Keyed constructions built from the toy primitives.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{gray, mask, BitWord, FieldContext, Gf2Error, MAX_WIDTH};
use crate::primitives::{
    random_func, random_perm, BlockCipher, KeyedCipher, PrimitiveError, ToyFunc, ToyPerm,
};
use crate::rng::derive_seed;

/// Default number of tweak bits for LRW.
pub const DEFAULT_TWEAK_WIDTH: u32 = 4;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConstructionError {
    #[error("expected width {expected}, got {actual}")]
    WidthMismatch { expected: u32, actual: u32 },
    #[error("width {0} unsupported by this construction")]
    Width(u32),
    #[error("tweak {tweak} outside 0..{limit}")]
    TweakOutOfRange { tweak: u64, limit: u64 },
    #[error("offset function is not injective on {tweak_width}-bit tweaks")]
    NonInjectiveTweak { tweak_width: u32 },
    #[error("slide cipher needs at least one round")]
    NoRounds,
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

fn expect_width(expected: u32, w: BitWord) -> Result<u32, ConstructionError> {
    if w.width() != expected {
        return Err(ConstructionError::WidthMismatch {
            expected,
            actual: w.width(),
        });
    }
    Ok(w.value())
}

fn word(width: u32, v: u32) -> BitWord {
    BitWord::new(width, v).expect("value fits width")
}

/// `P(x ⊕ k1) ⊕ k2` for a public permutation `P`.
#[derive(Clone, Debug)]
pub struct EvenMansour {
    perm: Arc<ToyPerm>,
    k1: u32,
    k2: u32,
}

impl EvenMansour {
    pub fn new(perm: Arc<ToyPerm>, k1: BitWord, k2: BitWord) -> Result<Self, ConstructionError> {
        let n = perm.width();
        Ok(Self {
            k1: expect_width(n, k1)?,
            k2: expect_width(n, k2)?,
            perm,
        })
    }

    pub fn perm(&self) -> &ToyPerm {
        &self.perm
    }

    pub fn k1(&self) -> BitWord {
        word(self.width(), self.k1)
    }

    pub fn k2(&self) -> BitWord {
        word(self.width(), self.k2)
    }
}

impl BlockCipher for EvenMansour {
    fn width(&self) -> u32 {
        self.perm.width()
    }

    #[inline]
    fn encrypt(&self, x: u32) -> u32 {
        self.perm.apply(x ^ self.k1) ^ self.k2
    }

    fn decrypt(&self, y: u32) -> u32 {
        self.perm.invert(y ^ self.k2) ^ self.k1
    }
}

pub fn em_encrypt(em: &EvenMansour, x: BitWord) -> Result<BitWord, ConstructionError> {
    let v = expect_width(em.width(), x)?;
    Ok(word(em.width(), em.encrypt(v)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeistelMode {
    PermutationRounds,
    FunctionRounds,
}

#[derive(Clone, Debug)]
pub enum RoundFunction {
    Perm(Arc<ToyPerm>),
    Func(Arc<ToyFunc>),
}

impl RoundFunction {
    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        match self {
            RoundFunction::Perm(p) => p.apply(x),
            RoundFunction::Func(f) => f.apply(x),
        }
    }
}

/// Three-round balanced Feistel network on `2·half_width` bits.
///
/// Round `i` maps `(u, v)` to `(v ⊕ R_i(u), u)`; the output is `(u3, v3)`.
/// Packed blocks carry the left half in the high bits.
#[derive(Clone, Debug)]
pub struct Feistel3 {
    half_width: u32,
    rounds: [RoundFunction; 3],
    mode: FeistelMode,
}

impl Feistel3 {
    /// Random round functions seeded from `seed`.
    pub fn random(half_width: u32, mode: FeistelMode, seed: u64) -> Result<Self, ConstructionError> {
        if half_width == 0 || 2 * half_width > MAX_WIDTH {
            return Err(ConstructionError::Width(half_width));
        }
        let round = |i: u64| -> Result<RoundFunction, PrimitiveError> {
            let s = derive_seed(seed, i);
            Ok(match mode {
                FeistelMode::PermutationRounds => RoundFunction::Perm(Arc::new(random_perm(half_width, s)?)),
                FeistelMode::FunctionRounds => {
                    RoundFunction::Func(Arc::new(random_func(half_width, half_width, s)?))
                }
            })
        };
        Ok(Self {
            half_width,
            rounds: [round(0)?, round(1)?, round(2)?],
            mode,
        })
    }

    pub fn half_width(&self) -> u32 {
        self.half_width
    }

    pub fn mode(&self) -> FeistelMode {
        self.mode
    }

    /// `R_i` for `i` in `1..=3`.
    pub fn round(&self, i: usize) -> &RoundFunction {
        &self.rounds[i - 1]
    }

    pub fn encrypt_halves(&self, xl: u32, xr: u32) -> (u32, u32) {
        let (mut u, mut v) = (xl, xr);
        for r in &self.rounds {
            (u, v) = (v ^ r.apply(u), u);
        }
        (u, v)
    }

    pub fn decrypt_halves(&self, yl: u32, yr: u32) -> (u32, u32) {
        let (mut u, mut v) = (yl, yr);
        for r in self.rounds.iter().rev() {
            (u, v) = (v, u ^ r.apply(v));
        }
        (u, v)
    }
}

impl BlockCipher for Feistel3 {
    fn width(&self) -> u32 {
        2 * self.half_width
    }

    fn encrypt(&self, x: u32) -> u32 {
        let n = self.half_width;
        let (yl, yr) = self.encrypt_halves(x >> n, x & mask(n));
        yl << n | yr
    }

    fn decrypt(&self, y: u32) -> u32 {
        let n = self.half_width;
        let (xl, xr) = self.decrypt_halves(y >> n, y & mask(n));
        xl << n | xr
    }
}

pub fn feistel3_encrypt(
    f3: &Feistel3,
    xl: BitWord,
    xr: BitWord,
) -> Result<(BitWord, BitWord), ConstructionError> {
    let n = f3.half_width;
    let (yl, yr) = f3.encrypt_halves(expect_width(n, xl)?, expect_width(n, xr)?);
    Ok((word(n, yl), word(n, yr)))
}

/// A block cipher with a small tweak space.
pub trait TweakableCipher: Send + Sync {
    fn width(&self) -> u32;
    fn tweak_width(&self) -> u32;
    fn encrypt_tweaked(&self, tweak: u64, x: u32) -> u32;
    fn decrypt_tweaked(&self, tweak: u64, y: u32) -> u32;
}

impl<T: TweakableCipher + ?Sized> TweakableCipher for Box<T> {
    fn width(&self) -> u32 {
        (**self).width()
    }

    fn tweak_width(&self) -> u32 {
        (**self).tweak_width()
    }

    fn encrypt_tweaked(&self, tweak: u64, x: u32) -> u32 {
        (**self).encrypt_tweaked(tweak, x)
    }

    fn decrypt_tweaked(&self, tweak: u64, y: u32) -> u32 {
        (**self).decrypt_tweaked(tweak, y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HashKind {
    /// `h(t) = 2^t · L`
    Xex,
    /// `h(t) = γ(t+1) · L`
    Gray,
}

impl HashKind {
    /// Field coefficient `c(t)` with `h(t) = c(t) · L`.
    pub fn coefficient(self, ctx: &FieldContext, t: u64) -> u32 {
        match self {
            HashKind::Xex => ctx.double_times(1, t),
            HashKind::Gray => (gray(t + 1) as u32) & mask(ctx.width()),
        }
    }
}

/// `Ẽ_{t,k}(x) = E_k(x ⊕ h(t)) ⊕ h(t)` with `L = E_k(0)`.
#[derive(Clone, Debug)]
pub struct LrwCipher {
    cipher: KeyedCipher,
    ctx: FieldContext,
    hash_kind: HashKind,
    l: u32,
    tweak_width: u32,
    offsets: Vec<u32>,
}

impl LrwCipher {
    pub fn new(
        cipher: KeyedCipher,
        hash_kind: HashKind,
        tweak_width: u32,
    ) -> Result<Self, ConstructionError> {
        let n = cipher.width();
        if tweak_width == 0 || tweak_width > 16 {
            return Err(ConstructionError::NonInjectiveTweak { tweak_width });
        }
        if hash_kind == HashKind::Gray && tweak_width >= n {
            // γ(t+1) must stay below 2^n for every tweak
            return Err(ConstructionError::NonInjectiveTweak { tweak_width });
        }
        let ctx = FieldContext::new(n)?;
        let l = cipher.encrypt(0);
        let offsets: Vec<u32> = (0..1u64 << tweak_width)
            .map(|t| ctx.mul(hash_kind.coefficient(&ctx, t), l))
            .collect();
        let mut sorted = offsets.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != offsets.len() {
            return Err(ConstructionError::NonInjectiveTweak { tweak_width });
        }
        Ok(Self {
            cipher,
            ctx,
            hash_kind,
            l,
            tweak_width,
            offsets,
        })
    }

    pub fn hash_kind(&self) -> HashKind {
        self.hash_kind
    }

    pub fn field(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn l(&self) -> BitWord {
        word(self.cipher.width(), self.l)
    }

    pub fn cipher(&self) -> &KeyedCipher {
        &self.cipher
    }

    pub fn offset(&self, tweak: u64) -> Result<u32, ConstructionError> {
        self.offsets
            .get(tweak as usize)
            .copied()
            .ok_or(ConstructionError::TweakOutOfRange {
                tweak,
                limit: self.offsets.len() as u64,
            })
    }
}

impl TweakableCipher for LrwCipher {
    fn width(&self) -> u32 {
        self.cipher.width()
    }

    fn tweak_width(&self) -> u32 {
        self.tweak_width
    }

    /// Panics on an unsupported tweak; use `lrw_encrypt` for checked access.
    fn encrypt_tweaked(&self, tweak: u64, x: u32) -> u32 {
        let h = self.offsets[tweak as usize];
        self.cipher.encrypt(x ^ h) ^ h
    }

    fn decrypt_tweaked(&self, tweak: u64, y: u32) -> u32 {
        let h = self.offsets[tweak as usize];
        self.cipher.decrypt(y ^ h) ^ h
    }
}

pub fn lrw_encrypt(lrw: &LrwCipher, tweak: u64, x: BitWord) -> Result<BitWord, ConstructionError> {
    let h = lrw.offset(tweak)?;
    let v = expect_width(lrw.width(), x)?;
    Ok(word(lrw.width(), lrw.cipher.encrypt(v ^ h) ^ h))
}

/// An independent random permutation per tweak.
#[derive(Clone, Debug)]
pub struct IdealTweakable {
    width: u32,
    tweak_width: u32,
    perms: Vec<ToyPerm>,
}

impl IdealTweakable {
    pub fn new(width: u32, tweak_width: u32, seed: u64) -> Result<Self, ConstructionError> {
        if tweak_width > 8 {
            return Err(ConstructionError::NonInjectiveTweak { tweak_width });
        }
        let perms = (0..1u64 << tweak_width)
            .map(|t| random_perm(width, derive_seed(seed, t)))
            .collect::<Result<_, _>>()?;
        Ok(Self {
            width,
            tweak_width,
            perms,
        })
    }
}

impl TweakableCipher for IdealTweakable {
    fn width(&self) -> u32 {
        self.width
    }

    fn tweak_width(&self) -> u32 {
        self.tweak_width
    }

    fn encrypt_tweaked(&self, tweak: u64, x: u32) -> u32 {
        self.perms[tweak as usize].apply(x)
    }

    fn decrypt_tweaked(&self, tweak: u64, y: u32) -> u32 {
        self.perms[tweak as usize].invert(y)
    }
}

/// Key-alternating cipher with identical rounds: `r` times `x ← P(x ⊕ k)`,
/// then a final `⊕ k`.
#[derive(Clone, Debug)]
pub struct SlideCipher {
    perm: Arc<ToyPerm>,
    k: u32,
    rounds: u32,
}

impl SlideCipher {
    pub fn new(perm: Arc<ToyPerm>, k: BitWord, rounds: u32) -> Result<Self, ConstructionError> {
        if rounds == 0 {
            return Err(ConstructionError::NoRounds);
        }
        Ok(Self {
            k: expect_width(perm.width(), k)?,
            perm,
            rounds,
        })
    }

    pub fn perm(&self) -> &ToyPerm {
        &self.perm
    }

    pub fn key(&self) -> BitWord {
        word(self.width(), self.k)
    }

    pub fn rounds(&self) -> u32 {
        self.rounds
    }
}

impl BlockCipher for SlideCipher {
    fn width(&self) -> u32 {
        self.perm.width()
    }

    fn encrypt(&self, x: u32) -> u32 {
        let mut y = x;
        for _ in 0..self.rounds {
            y = self.perm.apply(y ^ self.k);
        }
        y ^ self.k
    }

    fn decrypt(&self, y: u32) -> u32 {
        let mut x = y ^ self.k;
        for _ in 0..self.rounds {
            x = self.perm.invert(x) ^ self.k;
        }
        x
    }
}

pub fn slide_encrypt(sc: &SlideCipher, x: BitWord) -> Result<BitWord, ConstructionError> {
    let v = expect_width(sc.width(), x)?;
    Ok(word(sc.width(), sc.encrypt(v)))
}
