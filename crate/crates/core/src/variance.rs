//! Population variance of box vertices, computed directly or tracked
//! incrementally through single-coordinate flips.
//!
//! The incremental form keeps `v1 = mean(x_i^2)` and `v2 = mean(x_i)`, so that
//! `V(x) = v1 - v2^2`. Flipping coordinate `i` from `old` to `new` changes the
//! pair by `((new^2 - old^2) / n, (new - old) / n)`, which is O(1).

use crate::error::Result;
use crate::model::{Instance, SignVector};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Population variance `(1/n) * sum (x_i - mean)^2` of a slice, in one pass.
///
/// Values are shifted by the first element before accumulating so that a
/// large common offset does not cancel catastrophically.
pub fn variance_of(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n <= 1 {
        return 0.0;
    }
    let shift = xs[0];
    let mut s1 = CompensatedSum::new();
    let mut s2 = CompensatedSum::new();
    for &x in xs {
        let d = x - shift;
        s1.add(d);
        s2.add(d * d);
    }
    let nf = n as f64;
    let mean = s1.value() / nf;
    (s2.value() / nf - mean * mean).max(0.0)
}

/// Variance of the vertex selected by `signs`, evaluated from scratch.
pub fn variance_direct(instance: &Instance, signs: &SignVector) -> Result<f64> {
    signs.check_len(instance.len())?;
    let n = instance.len();
    if n == 1 {
        return Ok(0.0);
    }
    let shift = instance.endpoint(0, signs.get(0));
    let mut s1 = CompensatedSum::new();
    let mut s2 = CompensatedSum::new();
    for (i, s) in signs.iter().enumerate() {
        let d = instance.endpoint(i, s) - shift;
        s1.add(d);
        s2.add(d * d);
    }
    let nf = n as f64;
    let mean = s1.value() / nf;
    Ok((s2.value() / nf - mean * mean).max(0.0))
}

/// `(mean of lowers, mean of uppers)`: the range of attainable means.
pub fn mean_bounds(instance: &Instance) -> (f64, f64) {
    let n = instance.len() as f64;
    let lo: CompensatedSum = instance.lower().iter().copied().collect();
    let up: CompensatedSum = instance.upper().iter().copied().collect();
    (lo.value() / n, up.value() / n)
}

/// Running `(v1, v2)` pair for the current vertex of an enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceState {
    pub v1: f64,
    pub v2: f64,
    pub comp1: f64,
    pub comp2: f64,
}

impl VarianceState {
    /// State of the all-upper vertex.
    pub fn at_upper(instance: &Instance) -> Self {
        let n = instance.len() as f64;
        let sq: CompensatedSum = instance.upper().iter().map(|u| u * u).collect();
        let lin: CompensatedSum = instance.upper().iter().copied().collect();
        VarianceState {
            v1: sq.value() / n,
            v2: lin.value() / n,
            comp1: 0.0,
            comp2: 0.0,
        }
    }

    /// Adds `(d1, d2)` to `(v1, v2)` with compensation.
    #[inline]
    pub fn apply(&mut self, d1: f64, d2: f64) {
        let t = self.v1 + d1;
        if self.v1.abs() >= d1.abs() {
            self.comp1 += (self.v1 - t) + d1;
        } else {
            self.comp1 += (d1 - t) + self.v1;
        }
        self.v1 = t;

        let t = self.v2 + d2;
        if self.v2.abs() >= d2.abs() {
            self.comp2 += (self.v2 - t) + d2;
        } else {
            self.comp2 += (d2 - t) + self.v2;
        }
        self.v2 = t;
    }

    /// Moves coordinate `i` to the endpoint selected by `new_sign`. The caller
    /// guarantees it currently sits at the opposite endpoint.
    pub fn flip(&mut self, instance: &Instance, i: usize, new_sign: i8) -> Result<()> {
        instance.check_index(i)?;
        if new_sign != 1 && new_sign != -1 {
            return Err(crate::Error::InvalidSign(new_sign));
        }
        let (d1, d2) = flip_delta(instance, i, new_sign);
        self.apply(d1, d2);
        Ok(())
    }

    #[inline]
    pub fn mean_square(&self) -> f64 {
        self.v1 + self.comp1
    }

    #[inline]
    pub fn mean(&self) -> f64 {
        self.v2 + self.comp2
    }

    /// `V = v1 - v2^2`.
    #[inline]
    pub fn value(&self) -> f64 {
        let m = self.mean();
        self.mean_square() - m * m
    }
}

/// Change of `(v1, v2)` when coordinate `i` moves to the endpoint `new_sign`.
#[inline]
pub fn flip_delta(instance: &Instance, i: usize, new_sign: i8) -> (f64, f64) {
    let n = instance.len() as f64;
    let new = instance.endpoint(i, new_sign);
    let old = instance.endpoint(i, -new_sign);
    ((new * new - old * old) / n, (new - old) / n)
}

/// Functional form of [`VarianceState::flip`].
pub fn state_flip(
    state: VarianceState,
    instance: &Instance,
    i: usize,
    new_sign: i8,
) -> Result<VarianceState> {
    let mut s = state;
    s.flip(instance, i, new_sign)?;
    Ok(s)
}

/// Functional form of [`VarianceState::at_upper`].
pub fn state_init_upper(instance: &Instance) -> VarianceState {
    VarianceState::at_upper(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::vertex_from_signs;

    fn inst(pairs: &[(f64, f64)]) -> Instance {
        Instance::new(
            pairs.iter().map(|p| p.0).collect(),
            pairs.iter().map(|p| p.1).collect(),
        )
        .unwrap()
    }

    fn signs(s: &[i8]) -> SignVector {
        SignVector::new(s.to_vec()).unwrap()
    }

    #[test]
    fn direct_examples() {
        let one = inst(&[(-4.0, 9.0)]);
        assert_eq!(variance_direct(&one, &signs(&[1])).unwrap(), 0.0);
        assert_eq!(variance_direct(&one, &signs(&[-1])).unwrap(), 0.0);

        let flat = inst(&[(3.0, 3.0), (3.0, 3.0), (3.0, 3.0)]);
        assert_eq!(variance_direct(&flat, &signs(&[1, -1, 1])).unwrap(), 0.0);

        let two = inst(&[(0.0, 1.0), (0.0, 1.0)]);
        assert_eq!(variance_direct(&two, &signs(&[-1, 1])).unwrap(), 0.25);
        assert!(variance_direct(&two, &signs(&[1])).is_err());
    }

    #[test]
    fn init_upper_examples() {
        let two = inst(&[(0.0, 1.0), (0.0, 1.0)]);
        let s = state_init_upper(&two);
        assert_eq!((s.v1, s.v2, s.value()), (1.0, 1.0, 0.0));

        let zero = inst(&[(0.0, 0.0)]);
        let s = state_init_upper(&zero);
        assert_eq!((s.v1, s.v2), (0.0, 0.0));

        let apart = inst(&[(0.0, 1.0), (10.0, 11.0)]);
        let s = state_init_upper(&apart);
        assert_eq!((s.v1, s.v2, s.value()), (61.0, 6.0, 25.0));
    }

    #[test]
    fn flip_examples() {
        let two = inst(&[(0.0, 1.0), (0.0, 1.0)]);
        let s = state_flip(state_init_upper(&two), &two, 0, -1).unwrap();
        assert_eq!((s.mean_square(), s.mean(), s.value()), (0.5, 0.5, 0.25));

        let back = state_flip(s, &two, 0, 1).unwrap();
        let start = state_init_upper(&two);
        assert!((back.mean_square() - start.mean_square()).abs() <= 1e-12);
        assert!((back.mean() - start.mean()).abs() <= 1e-12);

        let degenerate = inst(&[(2.0, 2.0), (0.0, 1.0)]);
        let s0 = state_init_upper(&degenerate);
        let s1 = state_flip(s0, &degenerate, 0, -1).unwrap();
        assert_eq!(s0, s1);

        assert!(matches!(
            state_flip(s0, &degenerate, 2, 1),
            Err(crate::Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn mean_bounds_examples() {
        assert_eq!(mean_bounds(&inst(&[(0.0, 1.0), (10.0, 11.0)])), (5.0, 6.0));
        assert_eq!(mean_bounds(&inst(&[(1.5, 1.5), (1.5, 1.5)])), (1.5, 1.5));
        assert_eq!(mean_bounds(&inst(&[(0.0, 2.0)])), (0.0, 2.0));
    }

    #[test]
    fn direct_matches_textbook_two_pass() {
        let x = inst(&[(0.3, 1.7), (-2.0, 5.0), (4.0, 4.5), (1e3, 1e3 + 1.0)]);
        for bits in 0..16u64 {
            let s = SignVector::from_lex_index(4, bits);
            let v = vertex_from_signs(&x, &s).unwrap();
            let mean = v.iter().sum::<f64>() / 4.0;
            let expect = v.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / 4.0;
            let got = variance_direct(&x, &s).unwrap();
            assert!((got - expect).abs() <= 1e-9 * expect.max(1.0));
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::new();
        s.add(1e16);
        for _ in 0..1000 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 1000.0);
    }
}
