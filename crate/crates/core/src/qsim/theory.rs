//! Closed-form quantities used as independent checks on the sampler and as
//! diagnostics for recovery.

use rayon::prelude::*;

use super::{FunctionTable, QsimError};
use crate::gf2::{parity, BitWord};

fn check_width(f: &FunctionTable, w: BitWord) -> Result<(), QsimError> {
    if w.width() != f.in_width() {
        return Err(QsimError::WidthMismatch {
            expected: f.in_width(),
            actual: w.width(),
        });
    }
    Ok(())
}

/// `Pr_y[y · t = 0] = ½(1 + Pr_x[f(x) = f(x ⊕ t)])`, with the collision
/// probability counted by brute force.
pub fn exact_orthogonality_probability(f: &FunctionTable, t: BitWord) -> Result<f64, QsimError> {
    check_width(f, t)?;
    let hits = f.collision_count(t.value());
    Ok(0.5 * (1.0 + hits as f64 / f.len() as f64))
}

/// `Σ_{y ∈ t⊥} (-1)^{x·y}` by direct summation. Widths up to 12.
pub fn orthogonal_character_sum(t: BitWord, x: BitWord) -> Result<i64, QsimError> {
    if t.width() != x.width() {
        return Err(QsimError::WidthMismatch {
            expected: t.width(),
            actual: x.width(),
        });
    }
    if t.width() > 12 {
        return Err(QsimError::WidthOverflow(t.width()));
    }
    let width = t.width();
    let (t, x) = (t.value(), x.value());
    Ok((0..1u32 << width)
        .filter(|&y| !parity(y & t))
        .map(|y| if parity(x & y) { -1 } else { 1 })
        .sum())
}

/// `g(x) = 2^-n Σ_{y ∈ t⊥} (-1)^{x·y}`.
pub fn orthogonal_character_mean(t: BitWord, x: BitWord) -> Result<f64, QsimError> {
    let sum = orthogonal_character_sum(t, x)?;
    Ok(sum as f64 / (1u64 << t.width()) as f64)
}

/// `ε(f, s)`: the largest collision probability `Pr_x[f(x) = f(x ⊕ t)]` over
/// shifts `t ∉ {0, s}`. Zero when no such shift exists.
///
/// `s` must be a period of `f`.
pub fn epsilon(f: &FunctionTable, s: BitWord) -> Result<f64, QsimError> {
    check_width(f, s)?;
    let s = s.value();
    if let Some(x) = (0..f.len() as u32).find(|&x| f.eval(x) != f.eval(x ^ s)) {
        return Err(QsimError::PromiseViolation { input: x, period: s });
    }
    let worst = (1..f.len() as u32)
        .into_par_iter()
        .filter(|&t| t != s)
        .map(|t| f.collision_count(t))
        .max()
        .unwrap_or(0);
    Ok(worst as f64 / f.len() as f64)
}

/// Lower bound `1 - (2((1 + p0)/2)^c)^n` on the probability that `cn`
/// subroutine runs determine `s`. Returned unclamped.
pub fn success_bound(p0: f64, c: f64, n: u32) -> f64 {
    let base = 2.0 * ((1.0 + p0) / 2.0).powf(c);
    1.0 - base.powi(n as i32)
}

/// `ceil(3 / (1 - p0))`.
pub fn repetitions_for(p0: f64) -> Result<u32, QsimError> {
    if !(p0 < 1.0) || p0.is_nan() {
        return Err(QsimError::InvalidProbability(p0));
    }
    // the tolerance keeps exact quotients such as 3/(1/3) from rounding up
    Ok((3.0 / (1.0 - p0) - 1e-9).ceil().max(0.0) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::tabulate;

    fn w(width: u32, v: u32) -> BitWord {
        BitWord::new(width, v).unwrap()
    }

    #[test]
    fn orthogonality_examples() {
        let f = FunctionTable::from_values(2, 1, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(exact_orthogonality_probability(&f, w(2, 0b11)).unwrap(), 1.0);
        assert_eq!(exact_orthogonality_probability(&f, w(2, 0b01)).unwrap(), 0.5);
        assert_eq!(exact_orthogonality_probability(&f, w(2, 0)).unwrap(), 1.0);
        assert!(exact_orthogonality_probability(&f, w(3, 0)).is_err());
    }

    #[test]
    fn character_sum_examples() {
        assert_eq!(orthogonal_character_mean(w(3, 0b011), w(3, 0)).unwrap(), 0.5);
        assert_eq!(orthogonal_character_mean(w(3, 0b011), w(3, 0b011)).unwrap(), 0.5);
        assert_eq!(orthogonal_character_mean(w(3, 0b011), w(3, 0b001)).unwrap(), 0.0);
        assert_eq!(orthogonal_character_mean(w(3, 0), w(3, 0)).unwrap(), 1.0);
        assert!(orthogonal_character_sum(w(13, 0), w(13, 0)).is_err());
    }

    #[test]
    fn epsilon_examples() {
        let f = FunctionTable::from_values(2, 1, vec![0, 1, 1, 0]).unwrap();
        assert_eq!(epsilon(&f, w(2, 0b11)).unwrap(), 0.0);
        let constant = tabulate(|_| 0, 4, 1).unwrap();
        assert_eq!(epsilon(&constant, w(4, 0b0110)).unwrap(), 1.0);
        assert!(matches!(
            epsilon(&f, w(2, 0b01)),
            Err(QsimError::PromiseViolation { .. })
        ));
    }

    #[test]
    fn bound_examples() {
        assert!((success_bound(0.0, 2.0, 1) - 0.5).abs() < 1e-15);
        assert!((success_bound(0.5, 6.0, 8) - 0.999_74).abs() < 1e-5);
        let mut last = f64::NEG_INFINITY;
        for c in 2..20 {
            let b = success_bound(0.5, c as f64, 8);
            assert!(b >= last);
            last = b;
        }
    }

    #[test]
    fn repetition_examples() {
        assert_eq!(repetitions_for(0.0).unwrap(), 3);
        assert_eq!(repetitions_for(0.5).unwrap(), 6);
        assert_eq!(repetitions_for(2.0 / 3.0).unwrap(), 9);
        assert!(repetitions_for(1.0).is_err());
    }
}
