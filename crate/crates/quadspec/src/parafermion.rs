//! Deformed-parafermionic realization of the quadratic algebra.
//!
//! The generators are realized on a deformed oscillator {b, b†, N} with
//! structure function Φ: A = A(N), B = b(N) + b†ρ(N) + ρ(N)b. The diagonal
//! functions A(N), b(N) are fixed by the algebra relations; ρ is a gauge
//! choice that makes Φ a polynomial. Two cases:
//!
//! * Case 1 (γ ≠ 0): A is quadratic in (N+u), b has a pole at (N+u)² = 1/4,
//!   ρ ∝ 1/(γ⁸ (N+u)(1+N+u)(1+2(N+u))²), Φ has degree ≤ 6.
//! * Case 2 (γ = 0, ε(E) > 0): A is linear in (N+u), ρ = 1, Φ has degree ≤ 4.
//!
//! The defining recurrences are exposed as residuals so the closed-form Φ can
//! be tested against an independent re-derivation.

use num_traits::Float;

use crate::algebra::QuadraticAlgebra;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Case {
    /// γ ≠ 0.
    Case1,
    /// γ = 0 and ε(E) > 0.
    Case2,
}

/// Absolute tolerance below which a Case-1 denominator factor counts as a pole.
const POLE_TOL: f64 = 1e-12;

fn fl<F: Float>(x: f64) -> F {
    F::from(x).expect("constant conversion")
}

/// Decide which construction applies for this algebra at energy E.
pub fn select_case<F: Float + std::fmt::Debug>(
    algebra: &QuadraticAlgebra<F>,
    e: F,
) -> Result<Case> {
    if algebra.gamma != F::zero() {
        return Ok(Case::Case1);
    }
    let eps = algebra.epsilon.eval(&e);
    if eps > F::zero() {
        Ok(Case::Case2)
    } else {
        Err(Error::UnsupportedCase {
            epsilon: eps.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Evaluatable structure function Φ(x; u, E) together with the diagonal data
/// A(N), b(N), ρ(N) of the realization. Constants are pre-evaluated at E.
#[derive(Clone, Debug)]
pub struct StructureFunction<F: Float> {
    pub case: Case,
    pub u: F,
    pub e: F,
    /// Casimir value K(E), an explicit parameter of the Case-1 Φ.
    pub k: F,
    alpha: F,
    gamma: F,
    a: F,
    delta: F,
    epsilon: F,
    zeta: F,
    d: F,
    z: F,
}

impl<F: Float + std::fmt::Debug> StructureFunction<F> {
    pub fn new(algebra: &QuadraticAlgebra<F>, u: F, e: F) -> Result<Self> {
        let case = select_case(algebra, e)?;
        Ok(StructureFunction {
            case,
            u,
            e,
            k: algebra.casimir_value(&e),
            alpha: algebra.alpha,
            gamma: algebra.gamma,
            a: algebra.a,
            delta: algebra.delta.eval(&e),
            epsilon: algebra.epsilon.eval(&e),
            zeta: algebra.zeta.eval(&e),
            d: algebra.d.eval(&e),
            z: algebra.z.eval(&e),
        })
    }

    /// Diagonal eigenvalue A(x) at real lattice coordinate x.
    pub fn a_at(&self, x: F) -> F {
        let m = x + self.u;
        match self.case {
            Case::Case1 => {
                let g = self.gamma;
                g / fl(2.0) * (m * m - fl::<F>(0.25) - self.epsilon / (g * g))
            }
            Case::Case2 => self.epsilon.sqrt() * m,
        }
    }

    /// A(n) for integer n ≥ 0 (the spectrum of the generator A).
    pub fn a_diag(&self, n: usize) -> F {
        self.a_at(fl(n as f64))
    }

    fn delta_a(&self, x: F) -> F {
        self.a_at(x + F::one()) - self.a_at(x)
    }

    /// Diagonal part b(x) of the generator B.
    pub fn b_at(&self, x: F) -> Result<F> {
        let m = x + self.u;
        match self.case {
            Case::Case2 => {
                let s = self.epsilon.sqrt();
                Ok(-self.alpha * m * m - self.delta / s * m - self.zeta / self.epsilon)
            }
            Case::Case1 => {
                let den = m * m - fl::<F>(0.25);
                if den.abs() < fl(POLE_TOL) {
                    return Err(Error::PoleAtLattice {
                        factor: "(n+u)^2 - 1/4",
                        n: x.to_f64().unwrap_or(f64::NAN),
                    });
                }
                let (al, ga, de, ep, ze) =
                    (self.alpha, self.gamma, self.delta, self.epsilon, self.zeta);
                let g2 = ga * ga;
                Ok(-al * den / fl(4.0) + (al * ep - de * ga) / (fl::<F>(2.0) * g2)
                    - (al * ep * ep - fl::<F>(2.0) * de * ep * ga + fl::<F>(4.0) * g2 * ze)
                        / (fl::<F>(4.0) * g2 * g2)
                        / den)
            }
        }
    }

    pub fn b_diag(&self, n: usize) -> Result<F> {
        self.b_at(fl(n as f64))
    }

    /// Gauge function ρ(x).
    pub fn rho_at(&self, x: F) -> Result<F> {
        match self.case {
            Case::Case2 => Ok(F::one()),
            Case::Case1 => {
                let m = x + self.u;
                let f1 = m;
                let f2 = F::one() + m;
                let f3 = F::one() + fl::<F>(2.0) * m;
                for (f, name) in [(f1, "(n+u)"), (f2, "(1+n+u)"), (f3, "(1+2(n+u))")] {
                    if f.abs() < fl(POLE_TOL) {
                        return Err(Error::PoleAtLattice {
                            factor: name,
                            n: x.to_f64().unwrap_or(f64::NAN),
                        });
                    }
                }
                let g2 = self.gamma * self.gamma;
                let g8 = g2 * g2 * g2 * g2;
                Ok((fl::<F>(3.0 * 4096.0) * g8 * f1 * f2 * f3 * f3).recip())
            }
        }
    }

    pub fn rho(&self, n: usize) -> Result<F> {
        self.rho_at(fl(n as f64))
    }

    /// The structure function Φ(x), evaluated term by term from the printed
    /// closed forms (degree ≤ 6 for Case 1, ≤ 4 for Case 2).
    pub fn phi(&self, x: F) -> F {
        let (al, ga, de, ep, ze, a, d, z, k) = (
            self.alpha,
            self.gamma,
            self.delta,
            self.epsilon,
            self.zeta,
            self.a,
            self.d,
            self.z,
            self.k,
        );
        match self.case {
            Case::Case1 => {
                // m = 2(x+u); powers of γ precomputed.
                let m = fl::<F>(2.0) * (x + self.u);
                let one = F::one();
                let g2 = ga * ga;
                let g3 = g2 * ga;
                let g4 = g2 * g2;
                let g5 = g4 * ga;
                let g6 = g4 * g2;
                let g8 = g4 * g4;
                let mm1 = m - one;
                let mm1_2 = mm1 * mm1;
                let mm1_4 = mm1_2 * mm1_2;
                let mm3 = m - fl(3.0);
                let mp1 = m + one;

                let t1 = fl::<F>(-3072.0) * g6 * k * mm1_2;
                let t2 = fl::<F>(-48.0)
                    * g6
                    * (al * al * ep - al * de * ga + a * ep * ga - d * g2)
                    * mm3
                    * mm1_4
                    * mp1;
                let t3 = g8 * (fl::<F>(3.0) * al * al + fl::<F>(4.0) * a * ga)
                    * mm3
                    * mm3
                    * mm1_4
                    * mp1
                    * mp1;
                let q = al * ep * ep - fl::<F>(2.0) * de * ep * ga + fl::<F>(4.0) * g2 * ze;
                let t4 = fl::<F>(768.0) * q * q;
                let t5 = fl::<F>(32.0)
                    * g4
                    * mm1_2
                    * (-one - fl::<F>(6.0) * m + fl::<F>(3.0) * m * m)
                    * (fl::<F>(3.0) * al * al * ep * ep - fl::<F>(6.0) * al * de * ep * ga
                        + fl::<F>(2.0) * a * ep * ep * ga
                        + fl::<F>(2.0) * de * de * g2
                        - fl::<F>(4.0) * d * ep * g2
                        + fl::<F>(8.0) * g3 * z
                        + fl::<F>(4.0) * al * g2 * ze);
                let t6 = fl::<F>(-256.0)
                    * g2
                    * mm1_2
                    * (fl::<F>(3.0) * al * al * ep * ep * ep
                        - fl::<F>(9.0) * al * de * ep * ep * ga
                        + a * ep * ep * ep * ga
                        + fl::<F>(6.0) * de * de * ep * g2
                        - fl::<F>(3.0) * d * ep * ep * g2
                        + fl::<F>(2.0) * de * de * g4
                        + fl::<F>(2.0) * d * ep * g4
                        + fl::<F>(12.0) * ep * g3 * z
                        - fl::<F>(4.0) * g5 * z
                        + fl::<F>(12.0) * al * ep * g2 * ze
                        - fl::<F>(12.0) * de * g3 * ze
                        + fl::<F>(4.0) * al * g4 * ze);
                t1 + t2 + t3 + t4 + t5 + t6
            }
            Case::Case2 => {
                let m = x + self.u;
                let s = ep.sqrt();
                let ds = de / s;
                let ze_ep = ze / ep;
                let c0 = fl::<F>(0.25) * (-k / ep - z / s - ds * ze_ep + ze_ep * ze_ep);
                let c1 = -(fl::<F>(3.0) * d - a * s - fl::<F>(3.0) * al * ds
                    + fl::<F>(3.0) * ds * ds
                    - fl::<F>(6.0) * z / s
                    + fl::<F>(6.0) * al * ze_ep
                    - fl::<F>(6.0) * ds * ze_ep)
                    / fl(12.0);
                let c2 = fl::<F>(0.25)
                    * (al * al + d - a * s - fl::<F>(3.0) * al * ds + ds * ds
                        + fl::<F>(2.0) * al * ze_ep);
                let c3 = -(fl::<F>(3.0) * al * al - a * s - fl::<F>(3.0) * al * ds) / fl(6.0);
                let c4 = fl::<F>(0.25) * al * al;
                (((c4 * m + c3) * m + c2) * m + c1) * m + c0
            }
        }
    }

    /// Monomial coefficients of Φ in x (via Newton divided differences over
    /// the integer nodes 0..=deg; exact for polynomials up to rounding).
    pub fn phi_coeffs(&self) -> Vec<F> {
        let deg = match self.case {
            Case::Case1 => 6,
            Case::Case2 => 4,
        };
        let nodes: Vec<F> = (0..=deg).map(|i| fl(i as f64)).collect();
        let mut dd: Vec<F> = nodes.iter().map(|&x| self.phi(x)).collect();
        // Divided-difference table (in place; integer nodes).
        for level in 1..=deg {
            for i in (level..=deg).rev() {
                dd[i] = (dd[i] - dd[i - 1]) / (nodes[i] - nodes[i - level]);
            }
        }
        // Expand the Newton form Σ dd[j] Π_{i<j} (x − i) to monomials.
        let mut coeffs = vec![F::zero(); deg + 1];
        let mut basis = vec![F::zero(); deg + 1]; // Π (x − i), monomial form
        basis[0] = F::one();
        let mut blen = 1;
        for (j, &c) in dd.iter().enumerate() {
            for (i, &b) in basis.iter().take(blen).enumerate() {
                coeffs[i] = coeffs[i] + c * b;
            }
            if j < deg {
                // basis *= (x − j)
                let xj = nodes[j];
                let mut next = vec![F::zero(); blen + 1];
                for i in 0..blen {
                    next[i + 1] = next[i + 1] + basis[i];
                    next[i] = next[i] - xj * basis[i];
                }
                basis[..=blen].copy_from_slice(&next);
                blen += 1;
            }
        }
        coeffs
    }

    /// Normalization scale for constraint residuals: the largest coefficient
    /// magnitude of Φ (at least 1, so an identically tiny Φ is not inflated).
    pub fn phi_scale(&self) -> F {
        let mut s = F::one();
        for c in self.phi_coeffs() {
            if c.abs() > s {
                s = c.abs();
            }
        }
        s
    }

    /// Residual of eq. (ΔA)² = γ(A(x+1)+A(x)) + ε at x, normalized.
    pub fn eqn1_residual(&self, x: F) -> F {
        let da = self.delta_a(x);
        let lhs = da * da;
        let rhs = self.gamma * (self.a_at(x + F::one()) + self.a_at(x)) + self.epsilon;
        let scale = lhs.abs().max(rhs.abs()).max(F::one());
        (lhs - rhs) / scale
    }

    /// Residual of αA² + 2γAb + δA + εb + ζ = 0 at x, normalized.
    pub fn eqn2_residual(&self, x: F) -> Result<F> {
        let a = self.a_at(x);
        let b = self.b_at(x)?;
        let terms = [
            self.alpha * a * a,
            fl::<F>(2.0) * self.gamma * a * b,
            self.delta * a,
            self.epsilon * b,
            self.zeta,
        ];
        let sum = terms.iter().fold(F::zero(), |acc, &t| acc + t);
        let scale = terms
            .iter()
            .fold(F::one(), |acc: F, &t| acc.max(t.abs()));
        Ok(sum / scale)
    }

    /// Normalized residuals (r1, r2) of the two defining recurrences that Φ
    /// solves: the [B,C]-relation recurrence and the Casimir recurrence.
    pub fn phi_recurrence_residual(&self, x: F) -> Result<(F, F)> {
        let one = F::one();
        let (al, ga, de, ep, ze, a, d, z, k) = (
            self.alpha,
            self.gamma,
            self.delta,
            self.epsilon,
            self.zeta,
            self.a,
            self.d,
            self.z,
            self.k,
        );
        let av = self.a_at(x);
        let bv = self.b_at(x)?;
        let rho0 = self.rho_at(x)?;
        let rho_m1 = self.rho_at(x - one)?;
        let phi0 = self.phi(x);
        let phi1 = self.phi(x + one);
        let da0 = self.delta_a(x);
        let da_m1 = self.delta_a(x - one);

        // eq. "basic1"
        let l1 = fl::<F>(2.0) * phi1 * (da0 + ga / fl(2.0)) * rho0;
        let l2 = -fl::<F>(2.0) * phi0 * (da_m1 - ga / fl(2.0)) * rho_m1;
        let rhs1 = a * av * av - ga * bv * bv - fl::<F>(2.0) * al * av * bv + d * av - de * bv + z;
        let scale1 = l1.abs().max(l2.abs()).max(rhs1.abs()).max(one);
        let r1 = (l1 + l2 - rhs1) / scale1;

        // eq. "basic2"
        let g2e = ga * ga - ep - fl::<F>(2.0) * ga * av;
        let t = [
            phi1 * (g2e - da0 * da0) * rho0,
            phi0 * (g2e - da_m1 * da_m1) * rho_m1,
            -fl::<F>(2.0) * al * av * av * bv,
            g2e * bv * bv,
            fl::<F>(2.0) * (al * ga - de) * av * bv,
            (ga * de - fl::<F>(2.0) * ze) * bv,
            fl::<F>(2.0 / 3.0) * a * av * av * av,
            (d + a * ga / fl(3.0) + al * al) * av * av,
            (a * ep / fl(3.0) + al * de + fl::<F>(2.0) * z) * av,
        ];
        let sum = t.iter().fold(F::zero(), |acc, &v| acc + v);
        let scale2 = t
            .iter()
            .fold(k.abs().max(one), |acc: F, &v| acc.max(v.abs()));
        let r2 = (sum - k) / scale2;
        Ok((r1, r2))
    }
}

#[cfg(test)]
mod tests {
    use crate::algebra::{EnergyPolynomial, Flavor, QuadraticAlgebra};

    use super::*;

    fn ep(v: &[f64]) -> EnergyPolynomial<f64> {
        EnergyPolynomial::new(v.to_vec()).unwrap()
    }

    /// Potential i quantum at ħ = ω = 1, μ1 = μ2 = 3/4 (k1 = k2 = 1).
    fn potential_i_algebra() -> QuadraticAlgebra<f64> {
        QuadraticAlgebra::new(
            8.0,
            0.0,
            0.0,
            ep(&[0.0, -16.0]),
            ep(&[16.0]),
            ep(&[-16.0]),
            ep(&[16.0]),
            ep(&[0.0, -16.0]),
            // K = 16(μ2−μ1)²ω² + 32(μ1+μ2)ω² − 32ω² + (64μ1 − 48)E²
            ep(&[16.0, 0.0, 0.0]),
            Flavor::Quantum,
            Some(1.0),
        )
        .unwrap()
    }

    #[test]
    fn case_selection() {
        let alg = potential_i_algebra();
        assert_eq!(select_case(&alg, 4.0).unwrap(), Case::Case2);
        let mut alg1 = alg.clone();
        alg1.gamma = 2.0;
        assert_eq!(select_case(&alg1, 4.0).unwrap(), Case::Case1);
        let mut alg2 = alg;
        alg2.epsilon = ep(&[-1.0]);
        assert!(matches!(
            select_case(&alg2, 4.0),
            Err(Error::UnsupportedCase { .. })
        ));
    }

    #[test]
    fn a_diag_case2_examples() {
        // branch (+,+): u = 1, E = 4 at p = 0 → A(m) = 4(m+1)
        let alg = potential_i_algebra();
        let sf = StructureFunction::new(&alg, 1.0, 4.0).unwrap();
        assert!((sf.a_diag(0) - 4.0).abs() < 1e-12);
        let sf0 = StructureFunction::new(&alg, 0.0, 4.0).unwrap();
        assert_eq!(sf0.a_diag(0), 0.0);
    }

    #[test]
    fn b_diag_case2_example() {
        // ζ = −16, δ(E) = −16E, α = 8, ε = 16; E = 4, u = 1, n = 0
        // b = −8·1 − (−64/4)·1 − (−16/16) = 9
        let alg = potential_i_algebra();
        let sf = StructureFunction::new(&alg, 1.0, 4.0).unwrap();
        assert!((sf.b_diag(0).unwrap() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn rho_case1_example() {
        // γ = 1, u = 1, n = 0 → 1/(3·4096·1·2·9)
        let alg = QuadraticAlgebra::new(
            0.0,
            1.0,
            0.0,
            ep(&[]),
            ep(&[]),
            ep(&[]),
            ep(&[]),
            ep(&[]),
            ep(&[]),
            Flavor::Quantum,
            Some(1.0),
        )
        .unwrap();
        let sf = StructureFunction::new(&alg, 1.0, 0.0).unwrap();
        let expected = 1.0 / (3.0 * 4096.0 * 1.0 * 2.0 * 9.0);
        assert!((sf.rho(0).unwrap() - expected).abs() < 1e-18);
        let sf0 = StructureFunction::new(&alg, 0.0, 0.0).unwrap();
        assert!(matches!(sf0.rho(0), Err(Error::PoleAtLattice { .. })));
    }

    #[test]
    fn phi_matches_printed_factored_form_potential_i() {
        // p = 1, branch (+,+): u = 1, E = 6; printed Φ(x) = 16x(2−x+... )
        // at k1 = k2 = 1: Φ(x) = 16x(p+1−x)(x+1)(p+1−x+1); Φ(1) = 64, Φ(2) = 0.
        let alg = potential_i_algebra();
        let sf = StructureFunction::new(&alg, 1.0, 6.0).unwrap();
        assert!((sf.phi(1.0) - 64.0).abs() < 1e-9, "Phi(1) = {}", sf.phi(1.0));
        assert!(sf.phi(2.0).abs() < 1e-9);
        assert!(sf.phi(0.0).abs() < 1e-9);
    }

    #[test]
    fn phi_coeffs_reproduce_phi() {
        let alg = potential_i_algebra();
        let sf = StructureFunction::new(&alg, 1.0, 6.0).unwrap();
        let c = sf.phi_coeffs();
        for &x in &[0.3, 1.7, 2.9] {
            let horner = c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci);
            assert!((horner - sf.phi(x)).abs() < 1e-8 * sf.phi_scale());
        }
    }

    #[test]
    fn recurrences_vanish_on_catalog_solution() {
        let alg = potential_i_algebra();
        let sf = StructureFunction::new(&alg, 1.0, 6.0).unwrap();
        for &x in &[1.0, 0.37, 1.62] {
            let (r1, r2) = sf.phi_recurrence_residual(x).unwrap();
            assert!(r1.abs() < 1e-12, "r1({x}) = {r1}");
            assert!(r2.abs() < 1e-12, "r2({x}) = {r2}");
            assert!(sf.eqn1_residual(x).abs() < 1e-12);
            assert!(sf.eqn2_residual(x).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn perturbed_phi_detected() {
        // The Casimir recurrence (basic2) distinguishes the true Φ from
        // Φ + c: evaluate its unnormalized defect with a bumped Φ.
        let alg = potential_i_algebra();
        let sf = StructureFunction::new(&alg, 1.0, 6.0).unwrap();
        let x = 1.0;
        let basic2_defect = |bump: f64| -> f64 {
            let av = sf.a_at(x);
            let bv = sf.b_at(x).unwrap();
            let rho0 = sf.rho_at(x).unwrap();
            let rho_m1 = sf.rho_at(x - 1.0).unwrap();
            let phi0 = sf.phi(x) + bump;
            let phi1 = sf.phi(x + 1.0) + bump;
            let da0 = sf.a_at(x + 1.0) - sf.a_at(x);
            let da_m1 = sf.a_at(x) - sf.a_at(x - 1.0);
            let (al, ga, de, ep, ze, a, d, z) = (
                sf.alpha, sf.gamma, sf.delta, sf.epsilon, sf.zeta, sf.a, sf.d, sf.z,
            );
            let g2e = ga * ga - ep - 2.0 * ga * av;
            let sum = phi1 * (g2e - da0 * da0) * rho0
                + phi0 * (g2e - da_m1 * da_m1) * rho_m1
                - 2.0 * al * av * av * bv
                + g2e * bv * bv
                + 2.0 * (al * ga - de) * av * bv
                + (ga * de - 2.0 * ze) * bv
                + (2.0 / 3.0) * a * av * av * av
                + (d + a * ga / 3.0 + al * al) * av * av
                + (a * ep / 3.0 + al * de + 2.0 * z) * av;
            sum - sf.k
        };
        let scale = sf.phi_scale();
        assert!(basic2_defect(0.0).abs() < 1e-9 * scale);
        assert!(basic2_defect(1.0).abs() > 1e-3 * scale);
    }
}
