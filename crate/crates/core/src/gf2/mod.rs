//! Bit strings, GF(2) linear algebra and GF(2^n) arithmetic.

mod bitword;
mod field;
mod matrix;

use thiserror::Error;

pub use bitword::{dot, BitWord, MAX_WIDTH};
pub use field::{doubling, field_inv, field_mul, gray, is_irreducible, FieldContext};
pub use matrix::{kernel_basis, Gf2Matrix};

pub(crate) use bitword::{mask, parity};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("width {0} outside 1..=24")]
    WidthOutOfRange(u32),
    #[error("value {value:#x} does not fit in {width} bits")]
    ValueTooWide { width: u32, value: u32 },
    #[error("mixed widths {left} and {right}")]
    WidthMismatch { left: u32, right: u32 },
    #[error("polynomial {poly:#x} is not an irreducible polynomial of degree {width}")]
    ReduciblePolynomial { width: u32, poly: u32 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
}
