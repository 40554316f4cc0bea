//! Seeded toy-width ideal primitives and a small SPN.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{mask, BitWord, Gf2Error, MAX_WIDTH};
use crate::rng::{derive_seed, rng_from_seed};

/// Widest key space a random-permutation family will build tables for.
pub const MAX_FAMILY_WIDTH: u32 = 20;

const SPN_ROUNDS: u32 = 4;

/// 4-bit S-box with maximum differential probability 1/4.
pub const SBOX: [u8; 16] = [
    0xc, 0x5, 0x6, 0xb, 0x9, 0x0, 0xa, 0xd, 0x3, 0xe, 0xf, 0x8, 0x4, 0x7, 0x1, 0x2,
];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PrimitiveError {
    #[error("width {0} outside 1..=24")]
    Width(u32),
    #[error("toy SPN width {0} is not a positive multiple of 4")]
    SpnWidth(u32),
    #[error("random-permutation family width {0} exceeds {MAX_FAMILY_WIDTH}")]
    FamilyWidth(u32),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

fn check_width(width: u32) -> Result<(), PrimitiveError> {
    if width == 0 || width > MAX_WIDTH {
        Err(PrimitiveError::Width(width))
    } else {
        Ok(())
    }
}

/// An invertible map on `width`-bit blocks.
pub trait BlockCipher: Send + Sync {
    fn width(&self) -> u32;
    fn encrypt(&self, x: u32) -> u32;
    fn decrypt(&self, y: u32) -> u32;
}

impl<T: BlockCipher + ?Sized> BlockCipher for Box<T> {
    fn width(&self) -> u32 {
        (**self).width()
    }

    fn encrypt(&self, x: u32) -> u32 {
        (**self).encrypt(x)
    }

    fn decrypt(&self, y: u32) -> u32 {
        (**self).decrypt(y)
    }
}

/// A seeded uniformly random permutation stored as forward and inverse
/// tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyPerm {
    width: u32,
    forward: Vec<u32>,
    backward: Vec<u32>,
    seed: u64,
}

/// Fisher–Yates shuffle of `0..2^width` driven by `seed`.
pub fn random_perm(width: u32, seed: u64) -> Result<ToyPerm, PrimitiveError> {
    check_width(width)?;
    let mut rng = rng_from_seed(seed);
    let mut forward: Vec<u32> = (0..1u32 << width).collect();
    forward.shuffle(&mut rng);
    let mut backward = vec![0u32; forward.len()];
    for (x, &y) in forward.iter().enumerate() {
        backward[y as usize] = x as u32;
    }
    Ok(ToyPerm {
        width,
        forward,
        backward,
        seed,
    })
}

impl ToyPerm {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn forward(&self) -> &[u32] {
        &self.forward
    }

    pub fn backward(&self) -> &[u32] {
        &self.backward
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.forward[x as usize]
    }

    #[inline]
    pub fn invert(&self, y: u32) -> u32 {
        self.backward[y as usize]
    }

    pub fn apply_word(&self, x: BitWord) -> Result<BitWord, PrimitiveError> {
        word_op(self.width, x, |v| self.apply(v))
    }
}

impl BlockCipher for ToyPerm {
    fn width(&self) -> u32 {
        self.width
    }

    fn encrypt(&self, x: u32) -> u32 {
        self.apply(x)
    }

    fn decrypt(&self, y: u32) -> u32 {
        self.invert(y)
    }
}

fn word_op(
    width: u32,
    x: BitWord,
    op: impl Fn(u32) -> u32,
) -> Result<BitWord, PrimitiveError> {
    if x.width() != width {
        return Err(Gf2Error::WidthMismatch {
            left: width,
            right: x.width(),
        }
        .into());
    }
    Ok(BitWord::new(width, op(x.value()))?)
}

/// A seeded uniformly random function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToyFunc {
    width_in: u32,
    width_out: u32,
    table: Vec<u32>,
    seed: u64,
}

pub fn random_func(width_in: u32, width_out: u32, seed: u64) -> Result<ToyFunc, PrimitiveError> {
    check_width(width_in)?;
    check_width(width_out)?;
    let mut rng = rng_from_seed(seed);
    let m = mask(width_out);
    let table = (0..1u32 << width_in).map(|_| rng.gen::<u32>() & m).collect();
    Ok(ToyFunc {
        width_in,
        width_out,
        table,
        seed,
    })
}

impl ToyFunc {
    pub fn width_in(&self) -> u32 {
        self.width_in
    }

    pub fn width_out(&self) -> u32 {
        self.width_out
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn table(&self) -> &[u32] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.table[x as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CipherKind {
    RandomPerm,
    ToySpn,
}

impl CipherKind {
    pub fn name(self) -> &'static str {
        match self {
            CipherKind::RandomPerm => "random-perm",
            CipherKind::ToySpn => "toy-spn",
        }
    }
}

/// Four rounds of key xor, S-box layer and bit permutation, then a final key
/// xor. Round keys are rotations of the master key tweaked by the round
/// index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ToySpn {
    width: u32,
    round_keys: [u32; SPN_ROUNDS as usize + 1],
    sbox_inv: [u8; 16],
}

fn rotl(x: u32, r: u32, width: u32) -> u32 {
    let r = r % width;
    if r == 0 {
        x
    } else {
        ((x << r) | (x >> (width - r))) & mask(width)
    }
}

impl ToySpn {
    pub fn new(width: u32, key: u32) -> Result<Self, PrimitiveError> {
        if width == 0 || width % 4 != 0 || width > MAX_WIDTH {
            return Err(PrimitiveError::SpnWidth(width));
        }
        let mut round_keys = [0u32; SPN_ROUNDS as usize + 1];
        for (i, rk) in round_keys.iter_mut().enumerate() {
            *rk = rotl(key, 3 * i as u32, width) ^ (i as u32 & mask(width));
        }
        let mut sbox_inv = [0u8; 16];
        for (x, &y) in SBOX.iter().enumerate() {
            sbox_inv[y as usize] = x as u8;
        }
        Ok(Self {
            width,
            round_keys,
            sbox_inv,
        })
    }

    fn substitute(&self, x: u32, table: &[u8; 16]) -> u32 {
        (0..self.width / 4).fold(0, |acc, i| {
            acc | (table[(x >> (4 * i) & 0xf) as usize] as u32) << (4 * i)
        })
    }

    // bit j of nibble i moves to position j·q + i, q the nibble count
    fn permute(&self, x: u32, inverse: bool) -> u32 {
        let q = self.width / 4;
        let mut out = 0;
        for i in 0..q {
            for j in 0..4 {
                let (from, to) = (4 * i + j, j * q + i);
                let (from, to) = if inverse { (to, from) } else { (from, to) };
                out |= (x >> from & 1) << to;
            }
        }
        out
    }
}

impl BlockCipher for ToySpn {
    fn width(&self) -> u32 {
        self.width
    }

    fn encrypt(&self, mut x: u32) -> u32 {
        for r in 0..SPN_ROUNDS as usize {
            x ^= self.round_keys[r];
            x = self.substitute(x, &SBOX);
            x = self.permute(x, false);
        }
        x ^ self.round_keys[SPN_ROUNDS as usize]
    }

    fn decrypt(&self, mut y: u32) -> u32 {
        y ^= self.round_keys[SPN_ROUNDS as usize];
        for r in (0..SPN_ROUNDS as usize).rev() {
            y = self.permute(y, true);
            y = self.substitute(y, &self.sbox_inv);
            y ^= self.round_keys[r];
        }
        y
    }
}

#[derive(Clone, Debug)]
enum CipherImpl {
    Table(Arc<ToyPerm>),
    Spn(ToySpn),
}

/// `E_k` for one key of a family.
#[derive(Clone, Debug)]
pub struct KeyedCipher {
    key: BitWord,
    inner: CipherImpl,
}

impl KeyedCipher {
    pub fn key(&self) -> BitWord {
        self.key
    }

    pub fn kind(&self) -> CipherKind {
        match self.inner {
            CipherImpl::Table(_) => CipherKind::RandomPerm,
            CipherImpl::Spn(_) => CipherKind::ToySpn,
        }
    }

    pub fn encrypt_word(&self, x: BitWord) -> Result<BitWord, PrimitiveError> {
        word_op(self.width(), x, |v| self.encrypt(v))
    }

    pub fn decrypt_word(&self, y: BitWord) -> Result<BitWord, PrimitiveError> {
        word_op(self.width(), y, |v| self.decrypt(v))
    }
}

impl BlockCipher for KeyedCipher {
    fn width(&self) -> u32 {
        self.key.width()
    }

    #[inline]
    fn encrypt(&self, x: u32) -> u32 {
        match &self.inner {
            CipherImpl::Table(p) => p.apply(x),
            CipherImpl::Spn(s) => s.encrypt(x),
        }
    }

    #[inline]
    fn decrypt(&self, y: u32) -> u32 {
        match &self.inner {
            CipherImpl::Table(p) => p.invert(y),
            CipherImpl::Spn(s) => s.decrypt(y),
        }
    }
}

/// Keyed block cipher family; `cipher(k)` gives `E_k`.
///
/// Random-permutation keys get independent tables built on first use and
/// cached.
#[derive(Debug)]
pub struct KeyedFamily {
    width: u32,
    kind: CipherKind,
    master_seed: u64,
    cache: Mutex<HashMap<u32, Arc<ToyPerm>>>,
}

pub fn keyed_family(
    width: u32,
    kind: CipherKind,
    master_seed: u64,
) -> Result<KeyedFamily, PrimitiveError> {
    check_width(width)?;
    match kind {
        CipherKind::RandomPerm if width > MAX_FAMILY_WIDTH => {
            return Err(PrimitiveError::FamilyWidth(width))
        }
        CipherKind::ToySpn if width % 4 != 0 => return Err(PrimitiveError::SpnWidth(width)),
        _ => {}
    }
    Ok(KeyedFamily {
        width,
        kind,
        master_seed,
        cache: Mutex::new(HashMap::new()),
    })
}

impl KeyedFamily {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn kind(&self) -> CipherKind {
        self.kind
    }

    /// Seed of the table used for `key` in the random-permutation kind.
    pub fn key_seed(&self, key: u32) -> u64 {
        derive_seed(self.master_seed, key as u64)
    }

    pub fn cipher(&self, key: BitWord) -> Result<KeyedCipher, PrimitiveError> {
        if key.width() != self.width {
            return Err(Gf2Error::WidthMismatch {
                left: self.width,
                right: key.width(),
            }
            .into());
        }
        let inner = match self.kind {
            CipherKind::RandomPerm => {
                let mut cache = self.cache.lock().expect("cache lock");
                let perm = match cache.get(&key.value()) {
                    Some(p) => Arc::clone(p),
                    None => {
                        let p = Arc::new(random_perm(self.width, self.key_seed(key.value()))?);
                        cache.insert(key.value(), Arc::clone(&p));
                        p
                    }
                };
                CipherImpl::Table(perm)
            }
            CipherKind::ToySpn => CipherImpl::Spn(ToySpn::new(self.width, key.value())?),
        };
        Ok(KeyedCipher { key, inner })
    }
}
