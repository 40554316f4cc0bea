use super::{check_blocks, ModeError, NonceScheme, Oracle, Sealed};
use crate::gf2::{gray, mask, FieldContext};
use crate::primitives::{BlockCipher, KeyedCipher};

/// OCB over full blocks with an `n`-bit nonce and `Φ(N) = E_k(N)`.
///
/// Message block `j` (from 1) uses `Δ^N_j = Φ(N) ⊕ γ(j+1)·L`; associated
/// block `i` (from 0) uses the nonce-free `Δ_i = γ(i+1)·L`. The tag is
/// `E_k(Φ(N) ⊕ γ(ℓ+1)·L ⊕ 3L ⊕ Σ m_j) ⊕ Σ E_k(a_i ⊕ Δ_i)`, an empty sum
/// being zero.
#[derive(Clone, Debug)]
pub struct Ocb {
    e: KeyedCipher,
    ctx: FieldContext,
    l: u32,
    l3: u32,
}

pub type OcbSealed = Sealed;

impl Ocb {
    pub fn new(e: KeyedCipher) -> Result<Self, ModeError> {
        let ctx = FieldContext::new(e.width())?;
        let l = e.encrypt(0);
        Ok(Self {
            l3: ctx.mul(3, l),
            e,
            ctx,
            l,
        })
    }

    pub fn width(&self) -> u32 {
        self.e.width()
    }

    pub fn field(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn gray_offset(&self, i: usize) -> u32 {
        self.ctx.mul(gray(i as u64) as u32 & mask(self.width()), self.l)
    }

    /// Offset of associated block `i` (0-indexed).
    pub fn ad_offset(&self, i: usize) -> u32 {
        self.gray_offset(i + 1)
    }

    /// Offset of message block `j` (1-indexed) under nonce `N`.
    pub fn message_offset(&self, nonce: u32, j: usize) -> u32 {
        self.e.encrypt(nonce) ^ self.gray_offset(j + 1)
    }

    pub fn ad_sum(&self, ad: &[u32]) -> u32 {
        ad.iter()
            .enumerate()
            .fold(0, |acc, (i, &a)| acc ^ self.e.encrypt(a ^ self.ad_offset(i)))
    }

    fn tag_core(&self, phi: u32, ad: &[u32], msg_sum: u32, len: usize) -> u32 {
        let tag_offset = phi ^ self.gray_offset(len + 1) ^ self.l3;
        self.e.encrypt(tag_offset ^ msg_sum) ^ self.ad_sum(ad)
    }

    /// Seal without range checks.
    pub fn seal_raw(&self, nonce: u32, ad: &[u32], msg: &[u32]) -> (Vec<u32>, u32) {
        let phi = self.e.encrypt(nonce);
        let ct = msg
            .iter()
            .enumerate()
            .map(|(j, &m)| {
                let d = phi ^ self.gray_offset(j + 2);
                self.e.encrypt(m ^ d) ^ d
            })
            .collect();
        let sum = msg.iter().fold(0, |a, &m| a ^ m);
        (ct, self.tag_core(phi, ad, sum, msg.len()))
    }

    /// Tag of `(N, A, ε)`.
    pub fn auth_tag_raw(&self, nonce: u32, ad: &[u32]) -> u32 {
        self.tag_core(self.e.encrypt(nonce), ad, 0, 0)
    }

    fn check(&self, nonce: u32, ad: &[u32], text: &[u32]) -> Result<(), ModeError> {
        let n = self.width();
        if nonce & !mask(n) != 0 {
            return Err(ModeError::NonceTooWide { width: n, nonce });
        }
        // γ(i) must fit n bits for every offset index in use
        let longest = ad.len().max(text.len() + 1) + 1;
        if longest as u64 >= 1u64 << (n - 1) {
            return Err(ModeError::LengthOverflow(longest));
        }
        check_blocks(n, ad)?;
        check_blocks(n, text)
    }

    pub fn seal(&self, nonce: u32, ad: &[u32], msg: &[u32]) -> Result<(Vec<u32>, u32), ModeError> {
        self.check(nonce, ad, msg)?;
        Ok(self.seal_raw(nonce, ad, msg))
    }

    pub fn open(&self, nonce: u32, ad: &[u32], ct: &[u32], tag: u32) -> Option<Vec<u32>> {
        self.check(nonce, ad, ct).ok()?;
        let phi = self.e.encrypt(nonce);
        let msg: Vec<u32> = ct
            .iter()
            .enumerate()
            .map(|(j, &c)| {
                let d = phi ^ self.gray_offset(j + 2);
                self.e.decrypt(c ^ d) ^ d
            })
            .collect();
        let sum = msg.iter().fold(0, |a, &m| a ^ m);
        (self.tag_core(phi, ad, sum, msg.len()) == tag).then_some(msg)
    }
}

impl NonceScheme for Ocb {
    fn nonce_width(&self) -> u32 {
        self.width()
    }
}

impl Oracle<Ocb> {
    pub fn seal(&self, ad: &[u32], msg: &[u32]) -> Result<Sealed, ModeError> {
        let nonce = self.draw_nonce();
        self.classical(|ocb| {
            ocb.seal(nonce, ad, msg).map(|(ciphertext, tag)| Sealed {
                nonce,
                ciphertext,
                tag,
            })
        })
    }
}
