//! Scalar abstraction shared by every table, belief and operator.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssign, ToPrimitive};

/// Floating point type usable as a Q-value / probability: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssign + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Tolerance used when checking that a vector is a probability distribution.
    fn dist_tol() -> Self;

    /// Lossy conversion from an `f64` literal or config value.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).unwrap_or_else(Self::infinity)
    }
}

impl Scalar for f64 {
    #[inline]
    fn dist_tol() -> Self {
        1e-9
    }
}

// f32 carries ~7 significant digits, so 1e-9 is not attainable after a
// handful of additions.
impl Scalar for f32 {
    #[inline]
    fn dist_tol() -> Self {
        1e-5
    }
}

/// Index of the largest element, lowest index on ties.
pub fn argmax<S: Scalar>(values: &[S]) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, bv)) if v <= bv => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Index of the smallest element, lowest index on ties.
pub fn argmin<S: Scalar>(values: &[S]) -> Option<usize> {
    let mut best: Option<(usize, S)> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some((_, bv)) if v >= bv => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

pub fn max_of<S: Scalar>(values: &[S]) -> S {
    values.iter().copied().fold(S::neg_infinity(), S::max)
}

/// True when `p` is nonnegative and sums to one within [`Scalar::dist_tol`].
pub fn is_distribution<S: Scalar>(p: &[S]) -> bool {
    !p.is_empty()
        && p.iter().all(|&x| x >= S::zero() && x.is_finite())
        && (p.iter().copied().sum::<S>() - S::one()).abs() <= S::dist_tol()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_breaks_ties_low() {
        assert_eq!(argmax(&[5.0, 5.0]), Some(0));
        assert_eq!(argmax(&[1.0, 3.0, 2.0]), Some(1));
        assert_eq!(argmax::<f64>(&[]), None);
        assert_eq!(argmin(&[0.5f32, 0.5]), Some(0));
        assert_eq!(argmin(&[0.6, 0.4]), Some(1));
    }

    #[test]
    fn distribution_check() {
        assert!(is_distribution(&[0.25, 0.75]));
        assert!(!is_distribution(&[0.25, 0.7]));
        assert!(!is_distribution(&[-0.1, 1.1]));
        assert!(is_distribution(&[1.0f32 / 3.0, 1.0 / 3.0, 1.0 / 3.0]));
    }
}
