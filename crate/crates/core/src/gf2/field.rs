use super::bitword::{check_width, mask};
use super::{BitWord, Gf2Error};

/// Reduction polynomials per width, bit `i` set for the `x^i` term.
const REDUCTION_POLYS: [u32; 24] = [
    0b11,                                  // x + 1
    0b111,                                 // x^2 + x + 1
    0b1011,                                // x^3 + x + 1
    0b1_0011,                              // x^4 + x + 1
    0b10_0101,                             // x^5 + x^2 + 1
    0b100_0011,                            // x^6 + x + 1
    0b1000_0011,                           // x^7 + x + 1
    0b1_0001_1011,                         // x^8 + x^4 + x^3 + x + 1
    (1 << 9) | (1 << 4) | 1,               // x^9 + x^4 + 1
    (1 << 10) | (1 << 3) | 1,              // x^10 + x^3 + 1
    (1 << 11) | (1 << 2) | 1,              // x^11 + x^2 + 1
    (1 << 12) | (1 << 3) | 1,              // x^12 + x^3 + 1
    (1 << 13) | 0b1_1011,                  // x^13 + x^4 + x^3 + x + 1
    (1 << 14) | 0b10_1011,                 // x^14 + x^5 + x^3 + x + 1
    (1 << 15) | 0b11,                      // x^15 + x + 1
    (1 << 16) | 0b10_1011,                 // x^16 + x^5 + x^3 + x + 1
    (1 << 17) | (1 << 3) | 1,              // x^17 + x^3 + 1
    (1 << 18) | (1 << 7) | 1,              // x^18 + x^7 + 1
    (1 << 19) | 0b10_0111,                 // x^19 + x^5 + x^2 + x + 1
    (1 << 20) | (1 << 3) | 1,              // x^20 + x^3 + 1
    (1 << 21) | (1 << 2) | 1,              // x^21 + x^2 + 1
    (1 << 22) | 0b11,                      // x^22 + x + 1
    (1 << 23) | (1 << 5) | 1,              // x^23 + x^5 + 1
    (1 << 24) | 0b1_1011,                  // x^24 + x^4 + x^3 + x + 1
];

fn degree(p: u64) -> u32 {
    63 - p.leading_zeros()
}

fn poly_rem(mut a: u64, b: u64) -> u64 {
    let db = degree(b);
    while a != 0 && degree(a) >= db {
        a ^= b << (degree(a) - db);
    }
    a
}

/// Exhaustive trial division by every polynomial of degree `1..=deg/2`.
pub fn is_irreducible(poly: u64) -> bool {
    if poly < 2 {
        return false;
    }
    let deg = degree(poly);
    for d in 1..=deg / 2 {
        for low in 0..(1u64 << d) {
            if poly_rem(poly, (1u64 << d) | low) == 0 {
                return false;
            }
        }
    }
    true
}

/// Arithmetic in GF(2^width) modulo a fixed irreducible polynomial.
///
/// Element "2" is the polynomial `x`, binary `10`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldContext {
    width: u32,
    poly: u32,
}

impl FieldContext {
    /// The built-in field for `width`.
    pub fn new(width: u32) -> Result<Self, Gf2Error> {
        check_width(width)?;
        Self::with_poly(width, REDUCTION_POLYS[width as usize - 1])
    }

    /// A field with a caller-chosen reduction polynomial, which must have
    /// degree `width` and be irreducible.
    pub fn with_poly(width: u32, poly: u32) -> Result<Self, Gf2Error> {
        check_width(width)?;
        if degree(poly as u64) != width || !is_irreducible(poly as u64) {
            return Err(Gf2Error::ReduciblePolynomial { width, poly });
        }
        Ok(Self { width, poly })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn reduction_poly(&self) -> u32 {
        self.poly
    }

    /// Multiplies by `x`.
    #[inline]
    pub fn xtime(&self, a: u32) -> u32 {
        let shifted = a << 1;
        if shifted >> self.width & 1 == 1 {
            shifted ^ self.poly
        } else {
            shifted
        }
    }

    /// Carryless product reduced modulo the field polynomial, on raw values.
    #[inline]
    pub fn mul(&self, mut a: u32, mut b: u32) -> u32 {
        let mut acc = 0;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a = self.xtime(a);
        }
        acc
    }

    pub fn pow(&self, mut base: u32, mut exp: u64) -> u32 {
        let mut acc = 1 & mask(self.width);
        while exp != 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Raw inverse; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            return None;
        }
        // a^(2^n - 2) = a^-1 in the multiplicative group of order 2^n - 1
        Some(self.pow(a, (1u64 << self.width) - 2))
    }

    /// `a · x^t`.
    pub fn double_times(&self, a: u32, t: u64) -> u32 {
        (0..t).fold(a, |acc, _| self.xtime(acc))
    }

    fn check(&self, a: BitWord) -> Result<(), Gf2Error> {
        if a.width() != self.width {
            return Err(Gf2Error::WidthMismatch {
                left: self.width,
                right: a.width(),
            });
        }
        Ok(())
    }

    fn word(&self, value: u32) -> BitWord {
        BitWord::new(self.width, value).expect("field element fits width")
    }

    pub fn element(&self, value: u32) -> Result<BitWord, Gf2Error> {
        BitWord::new(self.width, value)
    }
}

pub fn field_mul(ctx: &FieldContext, a: BitWord, b: BitWord) -> Result<BitWord, Gf2Error> {
    ctx.check(a)?;
    ctx.check(b)?;
    Ok(ctx.word(ctx.mul(a.value(), b.value())))
}

pub fn field_inv(ctx: &FieldContext, a: BitWord) -> Result<BitWord, Gf2Error> {
    ctx.check(a)?;
    ctx.inv(a.value())
        .map(|v| ctx.word(v))
        .ok_or(Gf2Error::ZeroInverse)
}

/// `a` multiplied `t` times by the field element `x`.
pub fn doubling(ctx: &FieldContext, a: BitWord, t: u64) -> Result<BitWord, Gf2Error> {
    ctx.check(a)?;
    Ok(ctx.word(ctx.double_times(a.value(), t)))
}

/// Binary-reflected Gray code.
#[inline]
pub fn gray(i: u64) -> u64 {
    i ^ (i >> 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gf(width: u32) -> FieldContext {
        FieldContext::new(width).unwrap()
    }

    fn el(ctx: &FieldContext, v: u32) -> BitWord {
        ctx.element(v).unwrap()
    }

    // Schoolbook product then long division; shares no code with `mul`.
    fn reference_mul(width: u32, poly: u32, a: u32, b: u32) -> u32 {
        let mut prod = 0u64;
        for i in 0..width {
            if b >> i & 1 == 1 {
                prod ^= (a as u64) << i;
            }
        }
        poly_rem(prod, poly as u64) as u32
    }

    #[test]
    fn builtin_polynomials_are_irreducible() {
        for width in 1..=24 {
            let ctx = gf(width);
            assert_eq!(degree(ctx.reduction_poly() as u64), width);
        }
    }

    #[test]
    fn reducible_polynomial_rejected() {
        // x^4 + 1 = (x + 1)^4
        assert!(FieldContext::with_poly(4, 0b1_0001).is_err());
        // x^2 + x + 1 is degree 2, not 3
        assert!(FieldContext::with_poly(3, 0b111).is_err());
        assert!(is_irreducible(0b1011));
        assert!(!is_irreducible(0b1111)); // x^3 + x^2 + x + 1 = (x + 1)^3
    }

    #[test]
    fn gf8_examples() {
        let ctx = gf(3);
        assert_eq!(ctx.reduction_poly(), 0b1011);
        assert_eq!(field_mul(&ctx, el(&ctx, 0b010), el(&ctx, 0b110)).unwrap(), el(&ctx, 0b111));
        assert_eq!(field_inv(&ctx, el(&ctx, 0b010)).unwrap(), el(&ctx, 0b101));
        assert_eq!(field_inv(&ctx, el(&ctx, 0b001)).unwrap(), el(&ctx, 0b001));
        assert_eq!(field_inv(&ctx, el(&ctx, 0)), Err(Gf2Error::ZeroInverse));
        assert_eq!(doubling(&ctx, el(&ctx, 0b100), 1).unwrap(), el(&ctx, 0b011));
        for a in 0..8 {
            assert_eq!(field_mul(&ctx, el(&ctx, a), el(&ctx, 1)).unwrap(), el(&ctx, a));
            assert_eq!(field_mul(&ctx, el(&ctx, a), el(&ctx, 0)).unwrap(), el(&ctx, 0));
            assert_eq!(doubling(&ctx, el(&ctx, a), 0).unwrap(), el(&ctx, a));
        }
    }

    #[test]
    fn width_mismatch_rejected() {
        let ctx = gf(4);
        let a = BitWord::new(3, 1).unwrap();
        assert!(field_mul(&ctx, a, a).is_err());
        assert!(field_inv(&ctx, a).is_err());
    }

    #[test]
    fn field_axioms_exhaustive_small() {
        for width in [3u32, 4] {
            let ctx = gf(width);
            let n = 1u32 << width;
            for a in 0..n {
                for b in 0..n {
                    assert_eq!(ctx.mul(a, b), ctx.mul(b, a));
                    assert_eq!(ctx.mul(a, b), reference_mul(width, ctx.poly, a, b));
                    for c in 0..n {
                        assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
                        assert_eq!(ctx.mul(a, b ^ c), ctx.mul(a, b) ^ ctx.mul(a, c));
                    }
                }
            }
        }
    }

    #[test]
    fn field_axioms_sampled_gf256() {
        let ctx = gf(8);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100_000 {
            let (a, b, c) = (rng.gen_range(0..256), rng.gen_range(0..256), rng.gen_range(0..256));
            assert_eq!(ctx.mul(a, b), ctx.mul(b, a));
            assert_eq!(ctx.mul(ctx.mul(a, b), c), ctx.mul(a, ctx.mul(b, c)));
            assert_eq!(ctx.mul(a, b ^ c), ctx.mul(a, b) ^ ctx.mul(a, c));
        }
    }

    #[test]
    fn inverses_exhaustive_up_to_width_8() {
        for width in 1..=8 {
            let ctx = gf(width);
            for a in 1..1u32 << width {
                assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), 1, "width {width} a {a}");
            }
        }
    }

    #[test]
    fn gray_examples_and_adjacency() {
        assert_eq!(gray(0), 0);
        assert_eq!(gray(2), 3);
        for i in 0..1u64 << 20 {
            assert_eq!((gray(i) ^ gray(i + 1)).count_ones(), 1);
        }
    }

    proptest! {
        #[test]
        fn doubling_recurrence(width in 2u32..=24, a in any::<u32>(), t in 0u64..64) {
            let ctx = gf(width);
            let a = a & mask(width);
            prop_assert_eq!(ctx.double_times(a, t + 1), ctx.mul(ctx.double_times(a, t), 0b10));
        }

        #[test]
        fn mul_matches_reference(width in 1u32..=24, a in any::<u32>(), b in any::<u32>()) {
            let ctx = gf(width);
            let (a, b) = (a & mask(width), b & mask(width));
            prop_assert_eq!(ctx.mul(a, b), reference_mul(width, ctx.poly, a, b));
        }
    }
}
