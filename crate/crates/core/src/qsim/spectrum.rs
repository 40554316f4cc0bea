//! Exact sampling of one run of Simon's quantum subroutine.
//!
//! After the oracle query and the measurement of the output register with
//! outcome `v`, the input register holds the uniform superposition over
//! `S = f^-1(v)`. A Hadamard layer then measures `y` with probability
//! `W(y)^2 / (2^m |S|)` where `W(y) = Σ_{x∈S} (-1)^{x·y}`.
//!
//! Rather than transforming the indicator of `S` over all `2^m` points, the
//! sampler works in the span `D` of `{x ⊕ z : x ∈ S}` for a fixed `z ∈ S`.
//! `W(y)` only depends on the inner products of `y` with a basis of `D`, so a
//! transform over `2^dim(D)` coordinates gives the same spectrum. For exact
//! Simon promises `S` is a coset and no transform is needed at all.

use rand::Rng;

use super::FunctionTable;
use crate::gf2::{mask, parity, BitWord};

/// In-place unnormalized Walsh–Hadamard transform; `a.len()` must be a power
/// of two.
pub fn fwht(a: &mut [i64]) {
    let n = a.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in a.chunks_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (u, v) in lo.iter_mut().zip(hi.iter_mut()) {
                let (p, q) = (*u, *v);
                *u = p + q;
                *v = p - q;
            }
        }
        h *= 2;
    }
}

/// `W(y) = Σ_{x∈S} (-1)^{x·y}` for every `y`, by a transform over all
/// `2^width` points.
pub fn indicator_spectrum(width: u32, members: &[u32]) -> Vec<i64> {
    let mut a = vec![0i64; 1usize << width];
    for &x in members {
        a[x as usize] = 1;
    }
    fwht(&mut a);
    a
}

/// The measurement distribution of `y` given a fixed preimage set `S`.
#[derive(Clone, Debug)]
pub struct PreimageSpectrum {
    width: u32,
    size: u64,
    // reduced basis of D; row i owns pivot bit pivots[i]
    rows: Vec<u32>,
    pivots: Vec<u32>,
    // W'(c)^2 per coordinate vector c; None when S is a coset of D
    weights: Option<Vec<u64>>,
}

impl PreimageSpectrum {
    /// `members` must be nonempty, distinct and below `2^width`.
    pub fn new(width: u32, members: &[u32]) -> Self {
        assert!(!members.is_empty(), "preimage set is empty");
        let z = members[0];

        // rows kept sorted by leading bit, descending
        let mut rows: Vec<u32> = Vec::new();
        for &x in members {
            let mut d = x ^ z;
            for &r in &rows {
                d = d.min(d ^ r);
            }
            if d != 0 {
                let at = rows.partition_point(|&r| r > d);
                rows.insert(at, d);
            }
        }
        let pivots: Vec<u32> = rows.iter().map(|r| 31 - r.leading_zeros()).collect();
        for i in 0..rows.len() {
            let bit = 1u32 << pivots[i];
            for j in 0..rows.len() {
                if j != i && rows[j] & bit != 0 {
                    rows[j] ^= rows[i];
                }
            }
        }

        let k = rows.len();
        let size = members.len() as u64;
        let weights = if size == 1u64 << k {
            None
        } else {
            let mut a = vec![0i64; 1usize << k];
            for &x in members {
                a[Self::coords(&pivots, x ^ z)] = 1;
            }
            fwht(&mut a);
            Some(a.iter().map(|&w| (w * w) as u64).collect())
        };

        Self {
            width,
            size,
            rows,
            pivots,
            weights,
        }
    }

    /// Spectrum of the preimage of `value` under `f`, if nonempty.
    pub fn of_value(f: &FunctionTable, value: u32) -> Option<Self> {
        let members = f.preimage(value);
        (!members.is_empty()).then(|| Self::new(f.in_width(), &members))
    }

    // coordinates of d ∈ D in the reduced basis are its pivot bits
    fn coords(pivots: &[u32], d: u32) -> usize {
        pivots
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &p)| acc | ((d >> p & 1) as usize) << i)
    }

    fn syndrome(&self, y: u32) -> usize {
        self.rows
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &r)| acc | (parity(r & y) as usize) << i)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// `|S|`.
    pub fn size(&self) -> u64 {
        self.size
    }

    /// Dimension of the span of differences within `S`.
    pub fn dimension(&self) -> u32 {
        self.rows.len() as u32
    }

    /// `W(y)^2`.
    pub fn weight(&self, y: u32) -> u64 {
        let c = self.syndrome(y);
        match &self.weights {
            Some(w) => w[c],
            None if c == 0 => self.size * self.size,
            None => 0,
        }
    }

    /// `Pr[y | S] = W(y)^2 / (2^m |S|)`.
    pub fn probability(&self, y: u32) -> f64 {
        self.weight(y) as f64 / ((1u64 << self.width) as f64 * self.size as f64)
    }

    /// Draws `y` exactly from the measurement distribution.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        // The mass of syndrome class c is W'(c)^2 / |S| · 2^-k; all 2^(m-k)
        // members of a class are equally likely.
        let c = match &self.weights {
            None => 0,
            Some(w) => {
                let total = (1u64 << self.rows.len()) * self.size;
                let mut r = rng.gen_range(0..total);
                let mut chosen = w.len() - 1;
                for (i, &wi) in w.iter().enumerate() {
                    if r < wi {
                        chosen = i;
                        break;
                    }
                    r -= wi;
                }
                chosen
            }
        };
        let mut y = rng.gen::<u32>() & mask(self.width);
        for (i, (&r, &p)) in self.rows.iter().zip(&self.pivots).enumerate() {
            if parity(r & y) != (c >> i & 1 == 1) {
                y ^= 1 << p;
            }
        }
        y
    }
}

/// One run of the subroutine on raw values.
pub fn simon_sample_raw<R: Rng + ?Sized>(f: &FunctionTable, rng: &mut R) -> u32 {
    let x = rng.gen::<u32>() & mask(f.in_width());
    let spectrum = PreimageSpectrum::new(f.in_width(), &f.preimage(f.eval(x)));
    spectrum.sample(rng)
}

/// One run of Simon's subroutine: the measured `y`.
pub fn simon_sample<R: Rng + ?Sized>(f: &FunctionTable, rng: &mut R) -> BitWord {
    BitWord::new(f.in_width(), simon_sample_raw(f, rng)).expect("sample fits width")
}

/// `Pr[y]` for every `y`: `Σ_v W_v(y)^2 / 2^(2m)` over the output values `v`.
///
/// Built from the sampler's own spectra, so it is exactly the distribution
/// that `simon_sample` draws from.
pub fn subroutine_distribution(f: &FunctionTable) -> Vec<f64> {
    let m = f.in_width();
    let n = 1usize << m;
    let mut acc = vec![0u64; n];
    for (_, members) in f.classes() {
        let spectrum = PreimageSpectrum::new(m, &members);
        for (y, slot) in acc.iter_mut().enumerate() {
            *slot += spectrum.weight(y as u32);
        }
    }
    let denom = (n as f64) * (n as f64);
    acc.into_iter().map(|a| a as f64 / denom).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::tabulate;
    use crate::rng::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn fwht_of_delta_is_flat() {
        let mut a = vec![0i64; 8];
        a[0] = 1;
        fwht(&mut a);
        assert_eq!(a, vec![1; 8]);
    }

    #[test]
    fn two_bit_periodic_example() {
        let f = FunctionTable::from_values(2, 1, vec![0, 1, 1, 0]).unwrap();
        let dist = subroutine_distribution(&f);
        assert_eq!(dist, vec![0.5, 0.0, 0.0, 0.5]);
        let mut rng = rng_from_seed(5);
        let mut seen = [0u32; 4];
        for _ in 0..2000 {
            seen[simon_sample_raw(&f, &mut rng) as usize] += 1;
        }
        assert_eq!(seen[1] + seen[2], 0);
        assert!(seen[0] > 850 && seen[3] > 850);
    }

    #[test]
    fn constant_function_always_measures_zero() {
        let f = tabulate(|_| 3, 5, 2).unwrap();
        let mut rng = rng_from_seed(1);
        for _ in 0..100 {
            assert_eq!(simon_sample_raw(&f, &mut rng), 0);
        }
        let dist = subroutine_distribution(&f);
        assert_eq!(dist[0], 1.0);
    }

    #[test]
    fn bijection_is_uniform() {
        let f = tabulate(|x| x ^ 0b101, 3, 3).unwrap();
        assert!(subroutine_distribution(&f).iter().all(|&p| p == 0.125));
    }

    #[test]
    fn sampler_frequencies_match_probabilities() {
        // a non-coset preimage set exercises the weighted branch
        let spectrum = PreimageSpectrum::new(4, &[0b0000, 0b0011, 0b0101]);
        assert!(spectrum.weights.is_some());
        let mut rng = rng_from_seed(77);
        let trials = 200_000;
        let mut counts = [0u32; 16];
        for _ in 0..trials {
            counts[spectrum.sample(&mut rng) as usize] += 1;
        }
        for y in 0..16u32 {
            let p = spectrum.probability(y);
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            let observed = counts[y as usize] as f64 / trials as f64;
            assert!((observed - p).abs() <= 5.0 * sigma + 1e-12, "y={y}");
        }
    }

    proptest! {
        // The compact spectrum agrees with a full-domain transform.
        #[test]
        fn compact_weights_match_full_transform(
            width in 1u32..=9,
            raw in prop::collection::btree_set(any::<u32>(), 1..12),
        ) {
            let members: Vec<u32> = raw.iter().map(|x| x & mask(width)).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
            let spectrum = PreimageSpectrum::new(width, &members);
            let full = indicator_spectrum(width, &members);
            for y in 0..1u32 << width {
                let w = full[y as usize];
                prop_assert_eq!(spectrum.weight(y), (w * w) as u64);
            }
            let total: f64 = (0..1u32 << width).map(|y| spectrum.probability(y)).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }

        #[test]
        fn samples_lie_in_support(width in 1u32..=8, seed in any::<u64>()) {
            let mut rng = rng_from_seed(seed);
            let f = tabulate(|x| (x.wrapping_mul(0x9e37) >> 3) & 3, width, 2).unwrap();
            for _ in 0..20 {
                let x = rng.gen::<u32>() & mask(width);
                let spectrum = PreimageSpectrum::new(width, &f.preimage(f.eval(x)));
                let y = spectrum.sample(&mut rng);
                prop_assert!(spectrum.weight(y) > 0);
            }
        }
    }
}
