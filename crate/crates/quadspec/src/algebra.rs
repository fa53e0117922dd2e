//! Quadratic algebras with energy-dependent structure constants.
//!
//! Both the classical Poisson algebra
//!   {A,B}=C, {A,C}=αA²+2γAB+δ(H)A+ε(H)B+ζ(H), ...
//! and its quantum associative counterpart
//!   [A,B]=C, [A,C]=αA²+γ{A,B}+δ(H)A+ε(H)B+ζ(H), ...
//! are described by the same constant set (α, γ, a, δ, ε, ζ, d, z) plus the
//! Casimir value K(H). The Hamiltonian only ever enters through its scalar
//! eigenvalue E, so the energy-dependent constants are stored as low-degree
//! polynomials in E.

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;
use crate::{Error, Result};

/// Polynomial in the energy E, degree ≤ 3 (the Casimir expansion
/// k0 + k1·E + k2·E² + k3·E³ is the maximal case).
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyPolynomial<T: Scalar> {
    coeffs: Vec<T>,
}

impl<T: Scalar> EnergyPolynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() > 4 {
            return Err(Error::DegreeTooHigh {
                got: coeffs.len() - 1,
                max: 3,
            });
        }
        Ok(EnergyPolynomial { coeffs })
    }

    pub fn zero() -> Self {
        EnergyPolynomial { coeffs: vec![] }
    }

    pub fn constant(c: T) -> Self {
        EnergyPolynomial { coeffs: vec![c] }
    }

    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).cloned().unwrap_or_else(T::zero)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Horner evaluation at E.
    pub fn eval(&self, e: &T) -> T {
        let mut acc = T::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * e.clone() + c.clone();
        }
        acc
    }

    /// Map the coefficients into another scalar ring.
    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> EnergyPolynomial<U> {
        EnergyPolynomial {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }
}

/// Evaluate Σ cᵢ Eⁱ (operation form of [`EnergyPolynomial::eval`]).
pub fn eval_energy_poly<T: Scalar>(poly: &EnergyPolynomial<T>, e: &T) -> T {
    poly.eval(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Classical,
    Quantum,
}

/// The independent constants of the quadratic algebra. The dependent
/// constants of the pre-Jacobi form (b = −γ, c = −α, e = −δ) are implied and
/// never stored; β must already be rotated to zero.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadraticAlgebra<T: Scalar> {
    pub alpha: T,
    pub gamma: T,
    pub a: T,
    pub delta: EnergyPolynomial<T>,
    pub epsilon: EnergyPolynomial<T>,
    pub zeta: EnergyPolynomial<T>,
    pub d: EnergyPolynomial<T>,
    pub z: EnergyPolynomial<T>,
    pub casimir: EnergyPolynomial<T>,
    pub flavor: Flavor,
    pub hbar: Option<T>,
}

impl<T: Scalar> QuadraticAlgebra<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: T,
        gamma: T,
        a: T,
        delta: EnergyPolynomial<T>,
        epsilon: EnergyPolynomial<T>,
        zeta: EnergyPolynomial<T>,
        d: EnergyPolynomial<T>,
        z: EnergyPolynomial<T>,
        casimir: EnergyPolynomial<T>,
        flavor: Flavor,
        hbar: Option<T>,
    ) -> Result<Self> {
        check_degree(&delta, 1)?;
        check_degree(&epsilon, 1)?;
        check_degree(&zeta, 2)?;
        check_degree(&d, 1)?;
        check_degree(&z, 2)?;
        check_degree(&casimir, 3)?;
        Ok(QuadraticAlgebra {
            alpha,
            gamma,
            a,
            delta,
            epsilon,
            zeta,
            d,
            z,
            casimir,
            flavor,
            hbar,
        })
    }

    /// K(E).
    pub fn casimir_value(&self, e: &T) -> T {
        self.casimir.eval(e)
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> QuadraticAlgebra<U> {
        QuadraticAlgebra {
            alpha: f(&self.alpha),
            gamma: f(&self.gamma),
            a: f(&self.a),
            delta: self.delta.map(&f),
            epsilon: self.epsilon.map(&f),
            zeta: self.zeta.map(&f),
            d: self.d.map(&f),
            z: self.z.map(&f),
            casimir: self.casimir.map(&f),
            flavor: self.flavor,
            hbar: self.hbar.as_ref().map(f),
        }
    }
}

fn check_degree<T: Scalar>(p: &EnergyPolynomial<T>, max: usize) -> Result<()> {
    // Only *stored* nonzero coefficients count toward the degree.
    for (i, c) in p.coeffs().iter().enumerate() {
        if i > max && !c.is_zero() {
            return Err(Error::DegreeTooHigh { got: i, max });
        }
    }
    Ok(())
}

/// The raw constant set of the pre-Jacobi quadratic algebra, as a user would
/// transcribe it: includes the dependent constants b, c, e and the rotation
/// parameter β.
#[derive(Clone, Debug)]
pub struct RawAlgebra<T: Scalar> {
    pub alpha: T,
    pub beta: T,
    pub gamma: T,
    pub a: T,
    pub b: T,
    pub c: T,
    pub delta: EnergyPolynomial<T>,
    pub epsilon: EnergyPolynomial<T>,
    pub zeta: EnergyPolynomial<T>,
    pub d: EnergyPolynomial<T>,
    pub e: EnergyPolynomial<T>,
    pub z: EnergyPolynomial<T>,
    pub casimir: EnergyPolynomial<T>,
    pub flavor: Flavor,
    pub hbar: Option<T>,
}

/// Enforce the Jacobi-derived constraints b = −γ, c = −α, e = −δ
/// (coefficientwise) and β = 0, then discard the dependent constants.
pub fn validate_algebra<T: Scalar>(raw: RawAlgebra<T>) -> Result<QuadraticAlgebra<T>> {
    if !raw.beta.is_zero() {
        return Err(Error::NonzeroBeta);
    }
    if raw.b.clone() + raw.gamma.clone() != T::zero() {
        return Err(Error::JacobiViolation {
            identity: "b = -gamma",
            index: 0,
        });
    }
    if raw.c.clone() + raw.alpha.clone() != T::zero() {
        return Err(Error::JacobiViolation {
            identity: "c = -alpha",
            index: 0,
        });
    }
    let n = raw.e.coeffs().len().max(raw.delta.coeffs().len());
    for i in 0..n {
        if raw.e.coeff(i) + raw.delta.coeff(i) != T::zero() {
            return Err(Error::JacobiViolation {
                identity: "e = -delta",
                index: i,
            });
        }
    }
    QuadraticAlgebra::new(
        raw.alpha,
        raw.gamma,
        raw.a,
        raw.delta,
        raw.epsilon,
        raw.zeta,
        raw.d,
        raw.z,
        raw.casimir,
        raw.flavor,
        raw.hbar,
    )
}

/// On-disk JSON form of a floating-point algebra. Missing trailing
/// coefficients default to zero.
#[derive(Serialize, Deserialize)]
struct AlgebraJson {
    #[serde(default)]
    alpha: f64,
    #[serde(default)]
    gamma: f64,
    #[serde(default)]
    a: f64,
    #[serde(default)]
    delta: Vec<f64>,
    #[serde(default)]
    epsilon: Vec<f64>,
    #[serde(default)]
    zeta: Vec<f64>,
    #[serde(default)]
    d: Vec<f64>,
    #[serde(default)]
    z: Vec<f64>,
    #[serde(default)]
    casimir: Vec<f64>,
    flavor: Flavor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hbar: Option<f64>,
}

impl QuadraticAlgebra<f64> {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let j: AlgebraJson =
            serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))?;
        let poly = |v: Vec<f64>, max: usize, name: &str| -> Result<EnergyPolynomial<f64>> {
            if v.len() > max + 1 {
                return Err(Error::Schema(format!(
                    "\"{name}\" has degree {} but at most {} is allowed",
                    v.len() - 1,
                    max
                )));
            }
            Ok(EnergyPolynomial { coeffs: v })
        };
        if j.flavor == Flavor::Quantum && j.hbar.is_none_or(|h| h <= 0.0) {
            return Err(Error::Schema(
                "quantum algebras require a positive \"hbar\"".into(),
            ));
        }
        QuadraticAlgebra::new(
            j.alpha,
            j.gamma,
            j.a,
            poly(j.delta, 1, "delta")?,
            poly(j.epsilon, 1, "epsilon")?,
            poly(j.zeta, 2, "zeta")?,
            poly(j.d, 1, "d")?,
            poly(j.z, 2, "z")?,
            poly(j.casimir, 3, "casimir")?,
            j.flavor,
            j.hbar,
        )
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(AlgebraJson {
            alpha: self.alpha,
            gamma: self.gamma,
            a: self.a,
            delta: self.delta.coeffs().to_vec(),
            epsilon: self.epsilon.coeffs().to_vec(),
            zeta: self.zeta.coeffs().to_vec(),
            d: self.d.coeffs().to_vec(),
            z: self.z.coeffs().to_vec(),
            casimir: self.casimir.coeffs().to_vec(),
            flavor: self.flavor,
            hbar: self.hbar,
        })
        .expect("algebra serialization cannot fail")
    }
}
