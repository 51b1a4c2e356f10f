//! Coefficient scalars.
//!
//! All engine arithmetic is generic over a field of coefficients described
//! through num-traits bounds. The shipped instantiation is exact rationals
//! (`crate::Rat`); `f32`/`f64` satisfy the bounds as well but are unsuitable
//! for Gröbner zero tests and are not used by the product paths.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::Num;

/// A field scalar: exact ring operations plus division and negation.
pub trait Scalar: Num + Neg<Output = Self> + Clone + PartialEq + Debug + Display + Send + Sync {
    /// Embeds a small signed integer.
    fn from_int(v: i64) -> Self {
        let mut acc = Self::zero();
        let one = Self::one();
        let n = v.unsigned_abs();
        for _ in 0..n {
            acc = acc + one.clone();
        }
        if v < 0 {
            -acc
        } else {
            acc
        }
    }

    /// Embeds a rational n/d. Panics on d = 0.
    fn from_ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Self::from_int(n) / Self::from_int(d)
    }

    /// Binomial coefficient C(n, k) as a field element.
    fn binomial(n: u32, k: u32) -> Self {
        if k > n {
            return Self::zero();
        }
        let mut acc = Self::one();
        for j in 0..k {
            acc = acc * Self::from_int((n - j) as i64) / Self::from_int((j + 1) as i64);
        }
        acc
    }

    /// Falling factorial n·(n−1)···(n−k+1) as a field element.
    fn falling(n: u32, k: u32) -> Self {
        if k > n {
            return Self::zero();
        }
        let mut acc = Self::one();
        for j in 0..k {
            acc = acc * Self::from_int((n - j) as i64);
        }
        acc
    }

    /// Rescales a coefficient row by a nonzero scalar into a canonical
    /// "primitive" form, to keep Gröbner intermediates small. The default is
    /// the identity; exact rationals clear denominators and content.
    fn normalize_row(coeffs: &mut [Self]) {
        let _ = coeffs;
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

impl Scalar for num_rational::BigRational {
    fn normalize_row(coeffs: &mut [Self]) {
        use num_integer::Integer;
        use num_traits::{One, Signed, Zero};
        if coeffs.is_empty() {
            return;
        }
        let mut den_lcm = num_bigint::BigInt::one();
        for c in coeffs.iter() {
            den_lcm = den_lcm.lcm(c.denom());
        }
        let mut num_gcd = num_bigint::BigInt::zero();
        for c in coeffs.iter() {
            num_gcd = num_gcd.gcd(&(c.numer() * (&den_lcm / c.denom())));
        }
        if num_gcd.is_zero() || (num_gcd.is_one() && den_lcm.is_one()) {
            return;
        }
        let factor = num_rational::BigRational::new(den_lcm, num_gcd.abs());
        for c in coeffs.iter_mut() {
            *c = c.clone() * factor.clone();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn int_embedding() {
        assert_eq!(BigRational::from_int(-3), BigRational::from_ratio(-6, 2));
        assert_eq!(f64::from_int(4), 4.0);
    }

    #[test]
    fn binomials() {
        assert_eq!(BigRational::binomial(5, 2), BigRational::from_int(10));
        assert_eq!(BigRational::binomial(3, 5), BigRational::from_int(0));
        assert_eq!(BigRational::falling(4, 2), BigRational::from_int(12));
    }
}
