//! Toy-width MAC and authenticated-encryption modes with query-counting
//! oracles.
//!
//! Messages are slices of raw block values; every entry must fit the block
//! width. Offsets follow `Δ_i = γ(i+1) · L` with `L = E_k(0)`, so no offset is
//! zero.

mod cbc;
mod ghash;
mod ocb;
mod oracle;
mod pmac;

use thiserror::Error;

use crate::gf2::{mask, BitWord, Gf2Error};
use crate::primitives::PrimitiveError;

pub use cbc::{cbc_mac, CbcMac};
pub use ghash::{ghash, gmac, Gcm, Gmac};
pub use ocb::{Ocb, OcbSealed};
pub use oracle::{NonceScheme, Oracle, QueryCounter, Sealed};
pub use pmac::{pmac, Pmac};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModeError {
    #[error("message must not be empty")]
    EmptyMessage,
    #[error("block {value:#x} exceeds {width} bits")]
    BlockTooWide { width: u32, value: u32 },
    #[error("expected width {expected}, got {actual}")]
    WidthMismatch { expected: u32, actual: u32 },
    #[error("nonce {nonce:#x} exceeds {width} bits")]
    NonceTooWide { width: u32, nonce: u32 },
    #[error("{blocks} blocks exceed the counter space")]
    CounterOverflow { blocks: usize },
    #[error("length {0} does not fit the length block")]
    LengthOverflow(usize),
    #[error("width {0} too small for this mode")]
    Width(u32),
    #[error(transparent)]
    Primitive(#[from] PrimitiveError),
    #[error(transparent)]
    Gf2(#[from] Gf2Error),
}

pub(crate) fn check_blocks(width: u32, blocks: &[u32]) -> Result<(), ModeError> {
    match blocks.iter().find(|&&b| b & !mask(width) != 0) {
        Some(&value) => Err(ModeError::BlockTooWide { width, value }),
        None => Ok(()),
    }
}

pub(crate) fn raw_blocks(width: u32, blocks: &[BitWord]) -> Result<Vec<u32>, ModeError> {
    blocks
        .iter()
        .map(|b| {
            if b.width() == width {
                Ok(b.value())
            } else {
                Err(ModeError::WidthMismatch {
                    expected: width,
                    actual: b.width(),
                })
            }
        })
        .collect()
}

pub(crate) fn word(width: u32, v: u32) -> BitWord {
    BitWord::new(width, v).expect("value fits width")
}
