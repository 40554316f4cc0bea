use super::{check_blocks, raw_blocks, word, ModeError, Oracle};
use crate::gf2::BitWord;
use crate::primitives::{BlockCipher, KeyedCipher};

/// Encrypt-last-block CBC-MAC: `x_i = E_k(x_{i-1} ⊕ m_i)` from `x_0 = 0`,
/// tag `E_{k'}(x_ℓ)`.
#[derive(Clone, Debug)]
pub struct CbcMac {
    e: KeyedCipher,
    e_final: KeyedCipher,
}

impl CbcMac {
    pub fn new(e: KeyedCipher, e_final: KeyedCipher) -> Result<Self, ModeError> {
        if e.width() != e_final.width() {
            return Err(ModeError::WidthMismatch {
                expected: e.width(),
                actual: e_final.width(),
            });
        }
        Ok(Self { e, e_final })
    }

    pub fn width(&self) -> u32 {
        self.e.width()
    }

    pub fn inner(&self) -> &KeyedCipher {
        &self.e
    }

    /// Unchecked tag on raw blocks.
    #[inline]
    pub fn tag_raw(&self, blocks: &[u32]) -> u32 {
        let x = blocks.iter().fold(0, |x, &m| self.e.encrypt(x ^ m));
        self.e_final.encrypt(x)
    }

    pub fn tag(&self, blocks: &[u32]) -> Result<u32, ModeError> {
        if blocks.is_empty() {
            return Err(ModeError::EmptyMessage);
        }
        check_blocks(self.width(), blocks)?;
        Ok(self.tag_raw(blocks))
    }
}

pub fn cbc_mac(k: &KeyedCipher, k_prime: &KeyedCipher, m: &[BitWord]) -> Result<BitWord, ModeError> {
    let mac = CbcMac::new(k.clone(), k_prime.clone())?;
    let blocks = raw_blocks(mac.width(), m)?;
    Ok(word(mac.width(), mac.tag(&blocks)?))
}

impl Oracle<CbcMac> {
    pub fn tag(&self, blocks: &[u32]) -> Result<u32, ModeError> {
        self.classical(|mac| mac.tag(blocks))
    }
}
