//! Domain types: closed intervals, problem instances and box vertices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed interval `[lower, upper]` with finite bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        check_bounds(0, lower, upper)?;
        Ok(Interval { lower, upper })
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.upper - self.lower)
    }
}

fn check_bounds(index: usize, lower: f64, upper: f64) -> Result<()> {
    if !lower.is_finite() || !upper.is_finite() {
        return Err(Error::NonFinite {
            index,
            lower,
            upper,
        });
    }
    if lower > upper {
        return Err(Error::InvertedInterval {
            index,
            lower,
            upper,
        });
    }
    Ok(())
}

/// `n >= 1` intervals together with their centers and radii.
///
/// The bounds are the source of truth; centers and radii are derived once at
/// construction and never change afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    lower: Vec<f64>,
    upper: Vec<f64>,
    center: Vec<f64>,
    radius: Vec<f64>,
}

impl Instance {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.is_empty() {
            return Err(Error::EmptyInstance);
        }
        for (i, (&lo, &up)) in lower.iter().zip(&upper).enumerate() {
            check_bounds(i, lo, up)?;
        }
        let center = lower
            .iter()
            .zip(&upper)
            .map(|(&lo, &up)| 0.5 * lo + 0.5 * up)
            .collect();
        let radius = lower
            .iter()
            .zip(&upper)
            .map(|(&lo, &up)| 0.5 * (up - lo))
            .collect();
        Ok(Instance {
            lower,
            upper,
            center,
            radius,
        })
    }

    pub fn from_intervals(intervals: &[Interval]) -> Result<Self> {
        Self::new(
            intervals.iter().map(|iv| iv.lower).collect(),
            intervals.iter().map(|iv| iv.upper).collect(),
        )
    }

    /// Builds `[c_i - r_i, c_i + r_i]` for each pair.
    pub fn from_center_radius(centers: &[f64], radii: &[f64]) -> Result<Self> {
        if centers.len() != radii.len() {
            return Err(Error::DimensionMismatch {
                expected: centers.len(),
                got: radii.len(),
            });
        }
        if let Some(i) = radii.iter().position(|r| *r < 0.0) {
            return Err(Error::domain(format!("radius {i} is negative")));
        }
        Self::new(
            centers.iter().zip(radii).map(|(c, r)| c - r).collect(),
            centers.iter().zip(radii).map(|(c, r)| c + r).collect(),
        )
    }

    /// Every interval shifted by `-shift`. Variance is translation invariant,
    /// so this is used to keep running sums well conditioned.
    pub fn translated(&self, shift: f64) -> Result<Self> {
        Self::new(
            self.lower.iter().map(|x| x - shift).collect(),
            self.upper.iter().map(|x| x - shift).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.lower.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lower.is_empty()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> &[f64] {
        &self.radius
    }

    pub fn interval(&self, i: usize) -> Interval {
        Interval {
            lower: self.lower[i],
            upper: self.upper[i],
        }
    }

    pub fn intervals(&self) -> impl Iterator<Item = Interval> + '_ {
        (0..self.len()).map(|i| self.interval(i))
    }

    /// Endpoint of coordinate `i` selected by `sign` (`-1` lower, `+1` upper).
    #[inline]
    pub fn endpoint(&self, i: usize, sign: i8) -> f64 {
        if sign < 0 {
            self.lower[i]
        } else {
            self.upper[i]
        }
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.len() {
            Err(Error::IndexOutOfRange {
                index: i,
                n: self.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// An element of `{-1, +1}^n` selecting the lower (`-1`) or upper (`+1`)
/// endpoint of each coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct SignVector(Vec<i8>);

impl SignVector {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if let Some(&s) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::InvalidSign(s));
        }
        Ok(SignVector(signs))
    }

    pub fn all_upper(n: usize) -> Self {
        SignVector(vec![1; n])
    }

    pub fn all_lower(n: usize) -> Self {
        SignVector(vec![-1; n])
    }

    /// Decodes bit `n - 1 - i` of `bits` as coordinate `i` (set bit = `+1`),
    /// so increasing `bits` walks sign vectors in lexicographic order.
    pub fn from_lex_index(n: usize, bits: u64) -> Self {
        SignVector(
            (0..n)
                .map(|i| if bits >> (n - 1 - i) & 1 == 1 { 1 } else { -1 })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> i8 {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, sign: i8) {
        debug_assert!(sign == 1 || sign == -1);
        self.0[i] = sign;
    }

    pub fn flip(&mut self, i: usize) {
        self.0[i] = -self.0[i];
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = i8> + '_ {
        self.0.iter().copied()
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            Err(Error::DimensionMismatch {
                expected: n,
                got: self.len(),
            })
        } else {
            Ok(())
        }
    }
}

impl TryFrom<Vec<i8>> for SignVector {
    type Error = Error;

    fn try_from(v: Vec<i8>) -> Result<Self> {
        SignVector::new(v)
    }
}

impl From<SignVector> for Vec<i8> {
    fn from(s: SignVector) -> Self {
        s.0
    }
}

impl fmt::Display for SignVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, s) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("]")
    }
}

/// The box vertex `x_i = center_i + s_i * radius_i`, returned as the exact
/// endpoint values.
pub fn vertex_from_signs(instance: &Instance, signs: &SignVector) -> Result<Vec<f64>> {
    signs.check_len(instance.len())?;
    Ok(signs
        .iter()
        .enumerate()
        .map(|(i, s)| instance.endpoint(i, s))
        .collect())
}
