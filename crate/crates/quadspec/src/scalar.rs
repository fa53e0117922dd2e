//! Scalar abstraction and the exact ħ²-polynomial scalar.
//!
//! The structure-constant bookkeeping only needs ring operations, so the core
//! types are generic over [`Scalar`]. Floating point (`f32`/`f64`) is used for
//! solving and matrix work; `BigRational` and [`HbarPoly`] instantiate the
//! same types exactly for the coefficient identities (Jacobi constraints,
//! semiclassical ħ² limit) that must hold as rational equalities.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Ring scalar: everything the algebra core needs from its coefficients.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
        + Neg<Output = T>
{
}

/// Exact rational from an integer pair.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Polynomial in ħ² with exact rational coefficients: `coeffs[i]` multiplies ħ^(2i).
///
/// This is the scalar type of the exact quantum catalog: every §7-style
/// structure constant is a short polynomial in ħ², and the semiclassical
/// check compares the ħ² coefficient against the classical constant exactly.
#[derive(Clone, Debug, Default)]
pub struct HbarPoly {
    coeffs: Vec<BigRational>,
}

impl HbarPoly {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        let mut p = HbarPoly { coeffs };
        p.trim();
        p
    }

    pub fn constant(c: BigRational) -> Self {
        HbarPoly::new(vec![c])
    }

    /// The monomial c·ħ^(2·power).
    pub fn term(power: usize, c: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); power + 1];
        coeffs[power] = c;
        HbarPoly::new(coeffs)
    }

    /// Coefficient of ħ^(2i).
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Evaluate at a numeric ħ.
    pub fn to_f64(&self, hbar: f64) -> f64 {
        let h2 = hbar * hbar;
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * h2 + rational_to_f64(c);
        }
        acc
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    // Good enough for catalog-sized numerators; avoids num-rational's
    // ToPrimitive rounding subtleties for huge values we never produce.
    let num = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let den = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    num / den
}

impl PartialEq for HbarPoly {
    fn eq(&self, other: &Self) -> bool {
        let n = self.coeffs.len().max(other.coeffs.len());
        (0..n).all(|i| self.coeff(i) == other.coeff(i))
    }
}

impl Add for HbarPoly {
    type Output = HbarPoly;
    fn add(self, rhs: HbarPoly) -> HbarPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        HbarPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for HbarPoly {
    type Output = HbarPoly;
    fn sub(self, rhs: HbarPoly) -> HbarPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        HbarPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for HbarPoly {
    type Output = HbarPoly;
    fn mul(self, rhs: HbarPoly) -> HbarPoly {
        if self.coeffs.is_empty() || rhs.coeffs.is_empty() {
            return HbarPoly::default();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        HbarPoly::new(out)
    }
}

impl Neg for HbarPoly {
    type Output = HbarPoly;
    fn neg(self) -> HbarPoly {
        HbarPoly::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl Zero for HbarPoly {
    fn zero() -> Self {
        HbarPoly::default()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }
}

impl One for HbarPoly {
    fn one() -> Self {
        HbarPoly::constant(BigRational::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hbar_poly_arithmetic() {
        // (1 + 2ħ²)·(3ħ²) = 3ħ² + 6ħ⁴
        let a = HbarPoly::new(vec![rat(1, 1), rat(2, 1)]);
        let b = HbarPoly::term(1, rat(3, 1));
        let p = a * b;
        assert_eq!(p.coeff(0), rat(0, 1));
        assert_eq!(p.coeff(1), rat(3, 1));
        assert_eq!(p.coeff(2), rat(6, 1));
    }

    #[test]
    fn hbar_poly_eval() {
        // 2ħ² − ħ⁴ at ħ = 2 → 8 − 16 = −8
        let p = HbarPoly::new(vec![rat(0, 1), rat(2, 1), rat(-1, 1)]);
        assert_eq!(p.to_f64(2.0), -8.0);
    }

    #[test]
    fn trailing_zero_normalization() {
        let a = HbarPoly::new(vec![rat(1, 1), rat(0, 1)]);
        let b = HbarPoly::constant(rat(1, 1));
        assert_eq!(a, b);
        assert!(HbarPoly::new(vec![rat(0, 1)]).is_zero());
    }
}
