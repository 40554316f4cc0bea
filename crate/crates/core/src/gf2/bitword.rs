use std::fmt;

use serde::{Deserialize, Serialize};

use super::Gf2Error;

/// Largest supported word width in bits.
pub const MAX_WIDTH: u32 = 24;

/// An n-bit string with `1 <= n <= 24`. Bit 0 is the least significant bit.
///
/// Plaintext blocks, keys, periods and measurement outcomes all use this
/// type at API boundaries. Hot loops work on the raw `u32` value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitWord {
    width: u32,
    value: u32,
}

#[inline]
pub(crate) fn mask(width: u32) -> u32 {
    if width >= 32 {
        u32::MAX
    } else {
        (1u32 << width) - 1
    }
}

pub(crate) fn check_width(width: u32) -> Result<(), Gf2Error> {
    if width == 0 || width > MAX_WIDTH {
        Err(Gf2Error::WidthOutOfRange(width))
    } else {
        Ok(())
    }
}

impl BitWord {
    pub fn new(width: u32, value: u32) -> Result<Self, Gf2Error> {
        check_width(width)?;
        if value & !mask(width) != 0 {
            return Err(Gf2Error::ValueTooWide { width, value });
        }
        Ok(Self { width, value })
    }

    /// Builds a word, dropping any bits at or above `width`.
    pub fn truncated(width: u32, value: u32) -> Result<Self, Gf2Error> {
        check_width(width)?;
        Ok(Self {
            width,
            value: value & mask(width),
        })
    }

    pub fn zero(width: u32) -> Result<Self, Gf2Error> {
        Self::new(width, 0)
    }

    #[inline]
    pub fn width(self) -> u32 {
        self.width
    }

    #[inline]
    pub fn value(self) -> u32 {
        self.value
    }

    pub fn is_zero(self) -> bool {
        self.value == 0
    }

    pub fn bit(self, index: u32) -> bool {
        index < self.width && (self.value >> index) & 1 == 1
    }

    fn same_width(self, other: Self) -> Result<(), Gf2Error> {
        if self.width != other.width {
            Err(Gf2Error::WidthMismatch {
                left: self.width,
                right: other.width,
            })
        } else {
            Ok(())
        }
    }

    pub fn xor(self, other: Self) -> Result<Self, Gf2Error> {
        self.same_width(other)?;
        Ok(Self {
            width: self.width,
            value: self.value ^ other.value,
        })
    }

    /// Inner product over GF(2): parity of the bitwise AND.
    pub fn dot(self, other: Self) -> Result<bool, Gf2Error> {
        self.same_width(other)?;
        Ok(parity(self.value & other.value))
    }

    /// `self ‖ low`: `self` occupies the high bits of the result.
    pub fn concat(self, low: Self) -> Result<Self, Gf2Error> {
        let width = self.width + low.width;
        check_width(width)?;
        Ok(Self {
            width,
            value: (self.value << low.width) | low.value,
        })
    }

    /// Splits into `(high, low)` where `low` has `low_width` bits.
    pub fn split(self, low_width: u32) -> Result<(Self, Self), Gf2Error> {
        if low_width == 0 || low_width >= self.width {
            return Err(Gf2Error::WidthOutOfRange(low_width));
        }
        let high = Self {
            width: self.width - low_width,
            value: self.value >> low_width,
        };
        let low = Self {
            width: low_width,
            value: self.value & mask(low_width),
        };
        Ok((high, low))
    }
}

#[inline]
pub(crate) fn parity(x: u32) -> bool {
    x.count_ones() & 1 == 1
}

/// Inner product `x · y` over GF(2).
pub fn dot(x: BitWord, y: BitWord) -> Result<bool, Gf2Error> {
    x.dot(y)
}

impl fmt::Debug for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:0width$b}", self.value, width = self.width as usize)
    }
}

impl fmt::Display for BitWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.width.div_ceil(4) as usize;
        write!(f, "0x{:0digits$x}", self.value, digits = digits)
    }
}
