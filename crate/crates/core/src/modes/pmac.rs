use super::{check_blocks, raw_blocks, word, ModeError, Oracle};
use crate::gf2::{gray, BitWord, FieldContext};
use crate::primitives::{BlockCipher, KeyedCipher};

/// PMAC over full blocks.
///
/// Blocks `0..ℓ-1` are encrypted under offsets `Δ_i = γ(i+1)·L`; the last
/// block enters the sum directly. The final call is `E_k(· ⊕ 3L)`.
#[derive(Clone, Debug)]
pub struct Pmac {
    e: KeyedCipher,
    ctx: FieldContext,
    l: u32,
    l3: u32,
}

impl Pmac {
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

    /// `L = E_k(0)`.
    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn offset(&self, i: usize) -> u32 {
        self.ctx.mul(gray(i as u64 + 1) as u32, self.l)
    }

    pub fn tag_raw(&self, blocks: &[u32]) -> u32 {
        let (last, head) = blocks.split_last().expect("nonempty message");
        let sum = head
            .iter()
            .enumerate()
            .fold(*last, |acc, (i, &m)| acc ^ self.e.encrypt(m ^ self.offset(i)));
        self.e.encrypt(sum ^ self.l3)
    }

    pub fn tag(&self, blocks: &[u32]) -> Result<u32, ModeError> {
        if blocks.is_empty() {
            return Err(ModeError::EmptyMessage);
        }
        check_blocks(self.width(), blocks)?;
        Ok(self.tag_raw(blocks))
    }
}

pub fn pmac(k: &KeyedCipher, m: &[BitWord]) -> Result<BitWord, ModeError> {
    let mac = Pmac::new(k.clone())?;
    let blocks = raw_blocks(mac.width(), m)?;
    Ok(word(mac.width(), mac.tag(&blocks)?))
}

impl Oracle<Pmac> {
    pub fn tag(&self, blocks: &[u32]) -> Result<u32, ModeError> {
        self.classical(|mac| mac.tag(blocks))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::primitives::{keyed_family, CipherKind};

    fn mac(width: u32, seed: u64) -> Pmac {
        let fam = keyed_family(width, CipherKind::RandomPerm, seed).unwrap();
        Pmac::new(fam.cipher(BitWord::new(width, 5).unwrap()).unwrap()).unwrap()
    }

    #[test]
    fn two_block_shape() {
        let m = mac(8, 1);
        let d0 = m.offset(0);
        assert_eq!(d0, m.l());
        for (m1, m2) in [(0, 0), (3, 200), (255, 17)] {
            let inner = m2 ^ m.e.encrypt(m1 ^ d0);
            assert_eq!(m.tag(&[m1, m2]).unwrap(), m.e.encrypt(inner ^ m.ctx.mul(3, m.l)));
        }
        assert_eq!(m.tag(&[]), Err(ModeError::EmptyMessage));
    }

    #[test]
    fn repeated_block_period() {
        for seed in 0..20 {
            let m = mac(8, seed);
            let s = m.offset(0) ^ m.offset(1);
            let f = |x| m.tag(&[x, x, 0]).unwrap();
            assert!((0..256).all(|x| f(x ^ s) == f(x)));
            // L from the period: (γ(1) ⊕ γ(2))^-1 = 2^-1
            let ctx = m.field();
            assert_eq!(ctx.mul(s, ctx.inv(1 ^ 3).unwrap()), m.l());
        }
    }

    #[test]
    fn word_api_matches() {
        let fam = keyed_family(8, CipherKind::RandomPerm, 2).unwrap();
        let k = fam.cipher(BitWord::new(8, 5).unwrap()).unwrap();
        let words: Vec<BitWord> = [1, 2, 3].iter().map(|&v| BitWord::new(8, v).unwrap()).collect();
        assert_eq!(pmac(&k, &words).unwrap().value(), mac(8, 2).tag(&[1, 2, 3]).unwrap());
    }
}
