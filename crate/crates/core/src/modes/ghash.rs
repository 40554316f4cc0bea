use super::{check_blocks, raw_blocks, word, ModeError, NonceScheme, Oracle, Sealed};
use crate::gf2::{mask, BitWord, FieldContext};
use crate::primitives::{BlockCipher, KeyedCipher};

/// Horner evaluation `Σ b_i · H^(ℓ-i+1)`; no length block is appended.
pub fn ghash(ctx: &FieldContext, h: u32, blocks: &[u32]) -> u32 {
    blocks.iter().fold(0, |acc, &b| ctx.mul(acc ^ b, h))
}

/// GMAC with an `(n-1)`-bit nonce: `GHASH(M ‖ len(M)) ⊕ E_k(N ‖ 1)`.
///
/// The length block is the block count. For the fixed-length messages used
/// by attacks it adds a constant and leaves every period intact.
#[derive(Clone, Debug)]
pub struct Gmac {
    e: KeyedCipher,
    ctx: FieldContext,
    h: u32,
}

impl Gmac {
    pub fn new(e: KeyedCipher) -> Result<Self, ModeError> {
        if e.width() < 2 {
            return Err(ModeError::Width(e.width()));
        }
        let ctx = FieldContext::new(e.width())?;
        let h = e.encrypt(0);
        Ok(Self { e, ctx, h })
    }

    pub fn width(&self) -> u32 {
        self.e.width()
    }

    pub fn field(&self) -> &FieldContext {
        &self.ctx
    }

    /// `H = E_k(0)`.
    pub fn h(&self) -> u32 {
        self.h
    }

    #[inline]
    pub fn tag_raw(&self, nonce: u32, blocks: &[u32]) -> u32 {
        let body = ghash(&self.ctx, self.h, blocks);
        let len = blocks.len() as u32 & mask(self.width());
        self.ctx.mul(body ^ len, self.h) ^ self.e.encrypt(nonce << 1 | 1)
    }

    pub fn tag(&self, nonce: u32, blocks: &[u32]) -> Result<u32, ModeError> {
        let n = self.width();
        if nonce & !mask(n - 1) != 0 {
            return Err(ModeError::NonceTooWide { width: n - 1, nonce });
        }
        if blocks.len() as u64 > mask(n) as u64 {
            return Err(ModeError::LengthOverflow(blocks.len()));
        }
        check_blocks(n, blocks)?;
        Ok(self.tag_raw(nonce, blocks))
    }
}

impl NonceScheme for Gmac {
    fn nonce_width(&self) -> u32 {
        self.width() - 1
    }
}

pub fn gmac(k: &KeyedCipher, nonce: BitWord, m: &[BitWord]) -> Result<BitWord, ModeError> {
    let mac = Gmac::new(k.clone())?;
    if nonce.width() != mac.width() - 1 {
        return Err(ModeError::WidthMismatch {
            expected: mac.width() - 1,
            actual: nonce.width(),
        });
    }
    let blocks = raw_blocks(mac.width(), m)?;
    Ok(word(mac.width(), mac.tag(nonce.value(), &blocks)?))
}

impl Oracle<Gmac> {
    /// Tags `blocks` under a nonce chosen by the oracle: `(nonce, tag)`.
    pub fn tag(&self, blocks: &[u32]) -> Result<(u32, u32), ModeError> {
        let nonce = self.draw_nonce();
        self.classical(|mac| mac.tag(nonce, blocks).map(|t| (nonce, t)))
    }
}

/// GCM with an `(n-2)`-bit nonce and a 2-bit block counter.
///
/// Counter 1 masks the tag; counters 2 and 3 encrypt, so messages hold at
/// most two blocks. The length block packs `len(C)` in the high half and
/// `len(A)` in the low half. With an empty message the tag equals
/// `gmac(N ‖ 0, A)`.
#[derive(Clone, Debug)]
pub struct Gcm {
    gmac: Gmac,
}

impl Gcm {
    pub const MAX_BLOCKS: usize = 2;

    pub fn new(e: KeyedCipher) -> Result<Self, ModeError> {
        if e.width() < 4 {
            return Err(ModeError::Width(e.width()));
        }
        Ok(Self {
            gmac: Gmac::new(e)?,
        })
    }

    pub fn width(&self) -> u32 {
        self.gmac.width()
    }

    pub fn h(&self) -> u32 {
        self.gmac.h
    }

    pub fn field(&self) -> &FieldContext {
        &self.gmac.ctx
    }

    fn length_block(&self, len_a: usize, len_c: usize) -> Result<u32, ModeError> {
        let half = self.width() / 2;
        for len in [len_a, len_c] {
            if len as u64 > mask(half) as u64 {
                return Err(ModeError::LengthOverflow(len));
            }
        }
        Ok((len_c as u32) << half | len_a as u32)
    }

    #[inline]
    fn counter_block(&self, nonce: u32, ctr: u32) -> u32 {
        self.gmac.e.encrypt(nonce << 2 | ctr)
    }

    /// Tag over `A ‖ C ‖ lengths`, unchecked.
    pub fn tag_raw(&self, nonce: u32, ad: &[u32], ct: &[u32]) -> u32 {
        let half = self.width() / 2;
        let len = (ct.len() as u32) << half | ad.len() as u32;
        let ctx = &self.gmac.ctx;
        let h = self.gmac.h;
        let acc = ghash(ctx, h, ad);
        let acc = ct.iter().fold(acc, |acc, &c| ctx.mul(acc ^ c, h));
        ctx.mul(acc ^ len, h) ^ self.counter_block(nonce, 1)
    }

    fn check(&self, nonce: u32, ad: &[u32], text: &[u32]) -> Result<(), ModeError> {
        let n = self.width();
        if nonce & !mask(n - 2) != 0 {
            return Err(ModeError::NonceTooWide { width: n - 2, nonce });
        }
        if text.len() > Self::MAX_BLOCKS {
            return Err(ModeError::CounterOverflow { blocks: text.len() });
        }
        self.length_block(ad.len(), text.len())?;
        check_blocks(n, ad)?;
        check_blocks(n, text)
    }

    fn keystream(&self, nonce: u32, text: &[u32]) -> Vec<u32> {
        text.iter()
            .enumerate()
            .map(|(i, &b)| b ^ self.counter_block(nonce, 2 + i as u32))
            .collect()
    }

    pub fn seal(&self, nonce: u32, ad: &[u32], msg: &[u32]) -> Result<(Vec<u32>, u32), ModeError> {
        self.check(nonce, ad, msg)?;
        let ct = self.keystream(nonce, msg);
        let tag = self.tag_raw(nonce, ad, &ct);
        Ok((ct, tag))
    }

    pub fn open(&self, nonce: u32, ad: &[u32], ct: &[u32], tag: u32) -> Option<Vec<u32>> {
        self.check(nonce, ad, ct).ok()?;
        (self.tag_raw(nonce, ad, ct) == tag).then(|| self.keystream(nonce, ct))
    }
}

impl NonceScheme for Gcm {
    fn nonce_width(&self) -> u32 {
        self.width() - 2
    }
}

impl Oracle<Gcm> {
    pub fn seal(&self, ad: &[u32], msg: &[u32]) -> Result<Sealed, ModeError> {
        let nonce = self.draw_nonce();
        self.classical(|gcm| {
            gcm.seal(nonce, ad, msg).map(|(ciphertext, tag)| Sealed {
                nonce,
                ciphertext,
                tag,
            })
        })
    }
}
