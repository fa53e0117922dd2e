//! The four catalog potentials: observables, classical and quantum structure
//! constants, Casimirs, closed-form spectra, and branch admissibility.
//!
//! Constants are stored exactly — classical ones as rationals in the supplied
//! parameters, quantum ones as polynomials in ħ² — so the Jacobi constraints
//! and the semiclassical correspondence (the ħ² coefficient of each quantum
//! constant equals minus the classical constant) are checked as exact
//! rational identities. Floating-point algebras for the solver and matrix
//! layers are downcasts of the exact ones.
//!
//! Two constants are carried in a form that differs from the most commonly
//! quoted one because the numerical closure checks (classical Poisson
//! residuals, Moyal-bracket verification, matrix residuals) single them out:
//! potential i's classical z = 16(μ2−μ1)H and quantum z = −16ħ²(μ2−μ1)H −
//! 16ħ⁴H, and the ħ⁴ group of potential i's quantum Casimir, which restores
//! an ω² factor on the (μ1+μ2) term. Similarly, potential iii's
//! representation shift is u = (1 + ε1k1 + ε2k2)/2 and potential ii's energy
//! uses εk/2: these are the unique values solving Φ(0) = Φ(p+1) = 0, as the
//! verification layers confirm.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{EnergyPolynomial, Flavor, QuadraticAlgebra};
use crate::classical::{ClassicalObservables, Observable};
use crate::scalar::{rat, rational_to_f64, HbarPoly};
use crate::{AlgebraExact, AlgebraHbar, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PotentialId {
    I,
    II,
    III,
    IV,
}

impl PotentialId {
    pub const ALL: [PotentialId; 4] = [
        PotentialId::I,
        PotentialId::II,
        PotentialId::III,
        PotentialId::IV,
    ];
}

impl fmt::Display for PotentialId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PotentialId::I => "i",
            PotentialId::II => "ii",
            PotentialId::III => "iii",
            PotentialId::IV => "iv",
        };
        f.write_str(s)
    }
}

impl FromStr for PotentialId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "i" | "1" => Ok(PotentialId::I),
            "ii" | "2" => Ok(PotentialId::II),
            "iii" | "3" => Ok(PotentialId::III),
            "iv" | "4" => Ok(PotentialId::IV),
            other => Err(Error::UnknownPotential(other.to_string())),
        }
    }
}

/// Physical parameters. Interpretation per potential:
/// i: (ω, μ1, μ2, ħ); ii: (ω, μ, ħ); iii/iv: (k Coulomb, μ1, μ2, ħ).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Params {
    pub hbar: f64,
    pub omega: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu: f64,
    pub k: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            hbar: 1.0,
            omega: 1.0,
            mu1: 0.0,
            mu2: 0.0,
            mu: 0.0,
            k: 1.0,
        }
    }
}

/// Solution branch labels: sign pairs (potentials i, iii), a single sign
/// (potential ii), or the two u-branches of potential iv.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Branch {
    Signs(i8, i8),
    Sign(i8),
    U1,
    U2,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sgn = |s: i8| if s >= 0 { '+' } else { '-' };
        match self {
            Branch::Signs(a, b) => write!(f, "{}{}", sgn(*a), sgn(*b)),
            Branch::Sign(a) => write!(f, "{}", sgn(*a)),
            Branch::U1 => f.write_str("u1"),
            Branch::U2 => f.write_str("u2"),
        }
    }
}

impl FromStr for Branch {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "++" => Ok(Branch::Signs(1, 1)),
            "+-" => Ok(Branch::Signs(1, -1)),
            "-+" => Ok(Branch::Signs(-1, 1)),
            "--" => Ok(Branch::Signs(-1, -1)),
            "+" => Ok(Branch::Sign(1)),
            "-" => Ok(Branch::Sign(-1)),
            "u1" => Ok(Branch::U1),
            "u2" => Ok(Branch::U2),
            other => Err(Error::InvalidParams(format!("unknown branch \"{other}\""))),
        }
    }
}

/// All branch labels defined for a potential.
pub fn branches_for(id: PotentialId) -> Vec<Branch> {
    match id {
        PotentialId::I | PotentialId::III => vec![
            Branch::Signs(1, 1),
            Branch::Signs(1, -1),
            Branch::Signs(-1, 1),
            Branch::Signs(-1, -1),
        ],
        PotentialId::II => vec![Branch::Sign(1), Branch::Sign(-1)],
        PotentialId::IV => vec![Branch::U1, Branch::U2],
    }
}

/// Fully populated catalog entry.
#[derive(Clone)]
pub struct PotentialSpec {
    pub id: PotentialId,
    pub params: Params,
    /// Reparameterized constants: (k1, k2) for i/iii, (k, 0) for ii,
    /// (λ, ν²) for iv.
    pub k1: f64,
    pub k2: f64,
    pub classical: QuadraticAlgebra<f64>,
    pub quantum: QuadraticAlgebra<f64>,
    pub classical_exact: AlgebraExact,
    pub quantum_exact: AlgebraHbar,
    pub observables: ClassicalObservables,
}

/// One closed-form spectrum entry.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ClosedForm {
    pub e: f64,
    pub u: f64,
    /// Potential iv only: the positive cubic root ε = √(−2E)/ħ.
    pub eps: Option<f64>,
    /// Set when the branch's cubic has more than one positive root.
    pub multiple_roots: bool,
}

fn br(x: f64) -> BigRational {
    BigRational::from_float(x)
        .unwrap_or_else(|| panic!("parameter {x} is not finite"))
}

fn hp(terms: &[(usize, BigRational)]) -> HbarPoly {
    terms
        .iter()
        .fold(HbarPoly::zero(), |acc, (p, c)| acc + HbarPoly::term(*p, c.clone()))
}

fn epx(coeffs: Vec<BigRational>) -> EnergyPolynomial<BigRational> {
    EnergyPolynomial::new(coeffs).expect("catalog degree")
}

fn eph(coeffs: Vec<HbarPoly>) -> EnergyPolynomial<HbarPoly> {
    EnergyPolynomial::new(coeffs).expect("catalog degree")
}

/// μ ↔ k reparameterizations (§7): potentials i/ii use μ = (k²−1/4)ħ²,
/// potential iii uses μ = (ħ²/2)(k²−1/4).
pub fn k_from_mu(id: PotentialId, mu: f64, hbar: f64) -> Result<f64> {
    let h2 = hbar * hbar;
    let k2 = match id {
        PotentialId::I | PotentialId::II => mu / h2 + 0.25,
        PotentialId::III => 2.0 * mu / h2 + 0.25,
        PotentialId::IV => {
            return Err(Error::InvalidParams(
                "potential iv has no mu/k reparameterization; use lambda/nu".into(),
            ))
        }
    };
    if k2 < 0.0 {
        return Err(Error::InvalidParams(format!(
            "mu = {mu} makes k imaginary (k^2 = {k2})"
        )));
    }
    Ok(k2.sqrt())
}

pub fn mu_from_k(id: PotentialId, k: f64, hbar: f64) -> Result<f64> {
    let h2 = hbar * hbar;
    match id {
        PotentialId::I | PotentialId::II => Ok((k * k - 0.25) * h2),
        PotentialId::III => Ok((k * k - 0.25) * h2 / 2.0),
        PotentialId::IV => Err(Error::InvalidParams(
            "potential iv has no mu/k reparameterization; use lambda/nu".into(),
        )),
    }
}

pub fn get_potential(id: PotentialId, params: &Params) -> Result<PotentialSpec> {
    if params.hbar <= 0.0 {
        return Err(Error::InvalidParams("hbar must be positive".into()));
    }
    match id {
        PotentialId::I | PotentialId::II => {
            if params.omega <= 0.0 {
                return Err(Error::InvalidParams("omega must be positive".into()));
            }
        }
        PotentialId::III | PotentialId::IV => {
            if params.k == 0.0 {
                return Err(Error::InvalidParams(
                    "Coulomb strength k must be nonzero".into(),
                ));
            }
        }
    }

    let h = br(params.hbar);
    let (k1, k2);
    let (classical_exact, quantum_exact, observables);
    match id {
        PotentialId::I => {
            k1 = k_from_mu(id, params.mu1, params.hbar)?;
            k2 = k_from_mu(id, params.mu2, params.hbar)?;
            let (w, m1, m2) = (br(params.omega), br(params.mu1), br(params.mu2));
            let w2 = &w * &w;
            classical_exact = QuadraticAlgebra::new(
                rat(-8, 1),
                BigRational::zero(),
                BigRational::zero(),
                epx(vec![rat(0, 1), rat(16, 1)]),
                epx(vec![rat(-16, 1) * &w2]),
                epx(vec![rat(16, 1) * (&m1 + &m2) * &w2]),
                epx(vec![]),
                epx(vec![rat(0, 1), rat(16, 1) * (&m2 - &m1)]),
                epx(vec![
                    rat(-16, 1) * (&m2 - &m1) * (&m2 - &m1) * &w2,
                    rat(0, 1),
                    rat(-64, 1) * &m1,
                ]),
                Flavor::Classical,
                None,
            )?;
            quantum_exact = QuadraticAlgebra::new(
                hp(&[(1, rat(8, 1))]),
                HbarPoly::zero(),
                HbarPoly::zero(),
                eph(vec![HbarPoly::zero(), hp(&[(1, rat(-16, 1))])]),
                eph(vec![hp(&[(1, rat(16, 1) * &w2)])]),
                eph(vec![hp(&[
                    (1, rat(-16, 1) * (&m1 + &m2) * &w2),
                    (2, rat(8, 1) * &w2),
                ])]),
                eph(vec![hp(&[(2, rat(16, 1))])]),
                eph(vec![
                    HbarPoly::zero(),
                    hp(&[(1, rat(-16, 1) * (&m2 - &m1)), (2, rat(-16, 1))]),
                ]),
                eph(vec![
                    hp(&[
                        (1, rat(16, 1) * (&m2 - &m1) * (&m2 - &m1) * &w2),
                        (2, rat(32, 1) * (&m1 + &m2) * &w2),
                        (3, rat(-32, 1) * &w2),
                    ]),
                    HbarPoly::zero(),
                    hp(&[(1, rat(64, 1) * &m1), (2, rat(-48, 1))]),
                ]),
                Flavor::Quantum,
                Some(hp(&[(0, h.clone())])),
            )?;
            let (om, mu1, mu2) = (params.omega, params.mu1, params.mu2);
            observables = ClassicalObservables {
                h: Observable::new(move |v| {
                    (v[2] * v[2]
                        + v[3] * v[3]
                        + (v[0] * v[0] + v[1] * v[1]) * (om * om)
                        + (v[0] * v[0]).recip() * mu1
                        + (v[1] * v[1]).recip() * mu2)
                        * 0.5
                }),
                a: Observable::new(move |v| {
                    v[2] * v[2] + v[0] * v[0] * (om * om) + (v[0] * v[0]).recip() * mu1
                }),
                b: Observable::new(move |v| {
                    let lz = v[0] * v[3] - v[1] * v[2];
                    lz * lz
                        + (v[0] * v[0] + v[1] * v[1])
                            * ((v[0] * v[0]).recip() * mu1 + (v[1] * v[1]).recip() * mu2)
                }),
            };
        }
        PotentialId::II => {
            k1 = k_from_mu(id, params.mu, params.hbar)?;
            k2 = 0.0;
            let (w, m) = (br(params.omega), br(params.mu));
            let w2 = &w * &w;
            classical_exact = QuadraticAlgebra::new(
                BigRational::zero(),
                BigRational::zero(),
                rat(-6, 1),
                epx(vec![]),
                epx(vec![rat(-16, 1) * &w2]),
                epx(vec![]),
                epx(vec![rat(0, 1), rat(16, 1)]),
                epx(vec![rat(8, 1) * &m * &w2, rat(0, 1), rat(-8, 1)]),
                epx(vec![]),
                Flavor::Classical,
                None,
            )?;
            quantum_exact = QuadraticAlgebra::new(
                HbarPoly::zero(),
                HbarPoly::zero(),
                hp(&[(1, rat(6, 1))]),
                eph(vec![]),
                eph(vec![hp(&[(1, rat(16, 1) * &w2)])]),
                eph(vec![]),
                eph(vec![HbarPoly::zero(), hp(&[(1, rat(-16, 1))])]),
                eph(vec![
                    hp(&[(1, rat(-8, 1) * &m * &w2), (2, rat(6, 1) * &w2)]),
                    HbarPoly::zero(),
                    hp(&[(1, rat(8, 1))]),
                ]),
                eph(vec![HbarPoly::zero(), hp(&[(2, rat(64, 1) * &w2)])]),
                Flavor::Quantum,
                Some(hp(&[(0, h.clone())])),
            )?;
            let (om, mu) = (params.omega, params.mu);
            observables = ClassicalObservables {
                h: Observable::new(move |v| {
                    (v[2] * v[2]
                        + v[3] * v[3]
                        + (v[0] * v[0] * 4.0 + v[1] * v[1]) * (om * om)
                        + (v[1] * v[1]).recip() * mu)
                        * 0.5
                }),
                a: Observable::new(move |v| v[2] * v[2] + v[0] * v[0] * (4.0 * om * om)),
                b: Observable::new(move |v| {
                    let lz = v[0] * v[3] - v[1] * v[2];
                    lz * v[3] + v[0] / (v[1] * v[1]) * mu - v[0] * v[1] * v[1] * (om * om)
                }),
            };
        }
        PotentialId::III => {
            k1 = k_from_mu(id, params.mu1, params.hbar)?;
            k2 = k_from_mu(id, params.mu2, params.hbar)?;
            let (kc, m1, m2) = (br(params.k), br(params.mu1), br(params.mu2));
            let kc2 = &kc * &kc;
            classical_exact = QuadraticAlgebra::new(
                BigRational::zero(),
                rat(-2, 1),
                BigRational::zero(),
                epx(vec![]),
                epx(vec![]),
                epx(vec![&kc * (&m1 - &m2)]),
                epx(vec![rat(0, 1), rat(-8, 1)]),
                epx(vec![-(&kc2) * rat(1, 2), rat(4, 1) * (&m1 + &m2)]),
                epx(vec![
                    -(&kc2) * (&m1 + &m2),
                    rat(2, 1) * (&m1 - &m2) * (&m1 - &m2),
                ]),
                Flavor::Classical,
                None,
            )?;
            quantum_exact = QuadraticAlgebra::new(
                HbarPoly::zero(),
                hp(&[(1, rat(2, 1))]),
                HbarPoly::zero(),
                eph(vec![]),
                eph(vec![hp(&[(2, rat(-1, 1))])]),
                eph(vec![hp(&[(1, -(&kc) * (&m1 - &m2))])]),
                eph(vec![HbarPoly::zero(), hp(&[(1, rat(8, 1))])]),
                eph(vec![
                    hp(&[(1, &kc2 * rat(1, 2))]),
                    hp(&[(1, rat(-4, 1) * (&m1 + &m2)), (2, rat(1, 1))]),
                ]),
                eph(vec![
                    hp(&[(1, &kc2 * (&m1 + &m2)), (2, &kc2 * rat(1, 2))]),
                    hp(&[
                        (1, rat(-2, 1) * (&m1 - &m2) * (&m1 - &m2)),
                        (2, rat(-2, 1) * (&m1 + &m2)),
                        (3, rat(1, 1)),
                    ]),
                ]),
                Flavor::Quantum,
                Some(hp(&[(0, h.clone())])),
            )?;
            let (kc, mu1, mu2) = (params.k, params.mu1, params.mu2);
            observables = ClassicalObservables {
                h: Observable::new(move |v| {
                    let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
                    (v[2] * v[2]
                        + v[3] * v[3]
                        + r.recip() * kc
                        + r.recip() * ((r + v[0]).recip() * mu1 + (r - v[0]).recip() * mu2))
                        * 0.5
                }),
                a: Observable::new(move |v| {
                    let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
                    let lz = v[0] * v[3] - v[1] * v[2];
                    lz * lz + r * ((r + v[0]).recip() * mu1 + (r - v[0]).recip() * mu2)
                }),
                b: Observable::new(move |v| {
                    let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
                    let lz = v[0] * v[3] - v[1] * v[2];
                    lz * v[3] - (r - v[0]) / ((r + v[0]) * r) * (0.5 * mu1)
                        + (r + v[0]) / ((r - v[0]) * r) * (0.5 * mu2)
                        + v[0] / r * (0.5 * kc)
                }),
            };
        }
        PotentialId::IV => {
            // λ = k/ħ², ν_i = μ_i/ħ² for the spectrum side.
            let h2f = params.hbar * params.hbar;
            k1 = params.k / h2f;
            k2 = (params.mu1 / h2f).powi(2) + (params.mu2 / h2f).powi(2);
            let (kc, m1, m2) = (br(params.k), br(params.mu1), br(params.mu2));
            let kc2 = &kc * &kc;
            let msq = &m1 * &m1 + &m2 * &m2;
            classical_exact = QuadraticAlgebra::new(
                BigRational::zero(),
                BigRational::zero(),
                BigRational::zero(),
                epx(vec![]),
                epx(vec![rat(0, 1), rat(2, 1)]),
                epx(vec![-(&m1) * &m2 * rat(1, 2)]),
                epx(vec![rat(0, 1), rat(-2, 1)]),
                epx(vec![(&m1 * &m1 - &m2 * &m2) * rat(1, 4)]),
                epx(vec![-(&kc) * &msq * rat(1, 4), -(&kc2) * rat(1, 2)]),
                Flavor::Classical,
                None,
            )?;
            quantum_exact = QuadraticAlgebra::new(
                HbarPoly::zero(),
                HbarPoly::zero(),
                HbarPoly::zero(),
                eph(vec![]),
                eph(vec![HbarPoly::zero(), hp(&[(1, rat(-2, 1))])]),
                eph(vec![hp(&[(1, &m1 * &m2 * rat(1, 2))])]),
                eph(vec![HbarPoly::zero(), hp(&[(1, rat(2, 1))])]),
                eph(vec![hp(&[(1, -(&m1 * &m1 - &m2 * &m2) * rat(1, 4))])]),
                eph(vec![
                    hp(&[(1, &kc * &msq * rat(1, 4))]),
                    hp(&[(1, &kc2 * rat(1, 2))]),
                    hp(&[(2, rat(1, 1))]),
                ]),
                Flavor::Quantum,
                Some(hp(&[(0, h.clone())])),
            )?;
            let (kc, mu1, mu2) = (params.k, params.mu1, params.mu2);
            observables = ClassicalObservables {
                h: Observable::new(move |v| {
                    let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
                    (v[2] * v[2]
                        + v[3] * v[3]
                        + r.recip() * kc
                        + (r + v[0]).sqrt() / r * mu1
                        + (r - v[0]).sqrt() / r * mu2)
                        * 0.5
                }),
                a: Observable::new(move |v| {
                    let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
                    let lz = v[1] * v[2] - v[0] * v[3];
                    lz * v[3] + (r - v[0]) * (r + v[0]).sqrt() / r * (0.5 * mu1)
                        - (r + v[0]) * (r - v[0]).sqrt() / r * (0.5 * mu2)
                        - v[0] / r * (0.5 * kc)
                }),
                b: Observable::new(move |v| {
                    let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
                    let lz = v[0] * v[3] - v[1] * v[2];
                    lz * v[2] - v[0] * (r - v[0]).sqrt() / r * (0.5 * mu1)
                        + v[0] * (r + v[0]).sqrt() / r * (0.5 * mu2)
                        - v[1] / r * (0.5 * kc)
                }),
            };
        }
    }

    let hbar = params.hbar;
    let classical = classical_exact.map(rational_to_f64);
    let mut quantum = quantum_exact.map(|p| p.to_f64(hbar));
    quantum.hbar = Some(hbar);
    Ok(PotentialSpec {
        id,
        params: *params,
        k1,
        k2,
        classical,
        quantum,
        classical_exact,
        quantum_exact,
        observables,
    })
}

/// The printed branch admissibility constraints. Returns the violated
/// constraint string on failure.
pub fn check_admissible(id: PotentialId, branch: Branch, k1: f64, k2: f64) -> Result<()> {
    let fail = |c: String| Error::InadmissibleBranch {
        branch: branch.to_string(),
        constraint: c,
    };
    match (id, branch) {
        (PotentialId::I, Branch::Signs(e1, e2)) => {
            let (s1, s2) = (f64::from(e1) * k1, f64::from(e2) * k2);
            if s1 <= -1.0 {
                return Err(fail(format!("eps1*k1 = {s1} must be > -1")));
            }
            if s2 <= -1.0 {
                return Err(fail(format!("eps2*k2 = {s2} must be > -1")));
            }
            Ok(())
        }
        (PotentialId::II, Branch::Sign(e)) => {
            let s = f64::from(e) * k1;
            if s <= -1.0 {
                return Err(fail(format!("eps*k = {s} must be > -1")));
            }
            Ok(())
        }
        (PotentialId::III, Branch::Signs(e1, e2)) => {
            let (s1, s2) = (f64::from(e1) * k1, f64::from(e2) * k2);
            if s1 <= -1.0 {
                return Err(fail(format!("eps1*k1 = {s1} must be > -1")));
            }
            if s2 <= -1.0 {
                return Err(fail(format!("eps2*k2 = {s2} must be > -1")));
            }
            if s1 + s2 <= -1.0 {
                return Err(fail(format!("eps1*k1 + eps2*k2 = {} must be > -1", s1 + s2)));
            }
            Ok(())
        }
        (PotentialId::IV, Branch::U1 | Branch::U2) => Ok(()),
        _ => Err(Error::InvalidParams(format!(
            "branch {branch} does not apply to potential {id}"
        ))),
    }
}

/// All real roots of c3·t³ + c2·t² + c1·t + c0 (companion-matrix eigenvalues,
/// Newton-polished).
pub fn real_cubic_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    assert!(c3 != 0.0, "leading coefficient must be nonzero");
    let (b, c, d) = (c2 / c3, c1 / c3, c0 / c3);
    let companion =
        DMatrix::from_row_slice(3, 3, &[0.0, 0.0, -d, 1.0, 0.0, -c, 0.0, 1.0, -b]);
    let eig = companion.complex_eigenvalues();
    let scale = 1.0_f64.max(b.abs()).max(c.abs()).max(d.abs());
    let mut roots: Vec<f64> = Vec::new();
    for ev in eig.iter() {
        if ev.im.abs() > 1e-8 * scale.max(ev.re.abs()) {
            continue;
        }
        // Newton polish on the original cubic.
        let mut t = ev.re;
        for _ in 0..50 {
            let f = ((c3 * t + c2) * t + c1) * t + c0;
            let fp = (3.0 * c3 * t + 2.0 * c2) * t + c1;
            if fp == 0.0 {
                break;
            }
            let step = f / fp;
            t -= step;
            if step.abs() < 1e-16 * t.abs().max(1.0) {
                break;
            }
        }
        if !roots.iter().any(|r| (r - t).abs() < 1e-9 * t.abs().max(1.0)) {
            roots.push(t);
        }
    }
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    roots
}

/// Closed-form spectrum values for one (p, branch). Potential iv returns one
/// entry per positive cubic root; the others exactly one entry.
pub fn closed_form_energy(
    id: PotentialId,
    p: usize,
    branch: Branch,
    params: &Params,
) -> Result<Vec<ClosedForm>> {
    let spec = get_potential(id, params)?;
    closed_form_energy_for(&spec, p, branch)
}

pub fn closed_form_energy_for(
    spec: &PotentialSpec,
    p: usize,
    branch: Branch,
) -> Result<Vec<ClosedForm>> {
    let (hbar, id) = (spec.params.hbar, spec.id);
    check_admissible(id, branch, spec.k1, spec.k2)?;
    let pf = p as f64;
    match (id, branch) {
        (PotentialId::I, Branch::Signs(e1, e2)) => {
            let (s1, s2) = (f64::from(e1) * spec.k1, f64::from(e2) * spec.k2);
            Ok(vec![ClosedForm {
                e: 2.0 * hbar * spec.params.omega * (pf + 1.0 + (s1 + s2) / 2.0),
                u: (1.0 + s1) / 2.0,
                eps: None,
                multiple_roots: false,
            }])
        }
        (PotentialId::II, Branch::Sign(e)) => {
            let s = f64::from(e) * spec.k1;
            Ok(vec![ClosedForm {
                e: 2.0 * hbar * spec.params.omega * (pf + 1.0 + s / 2.0),
                u: 0.5,
                eps: None,
                multiple_roots: false,
            }])
        }
        (PotentialId::III, Branch::Signs(e1, e2)) => {
            let s = f64::from(e1) * spec.k1 + f64::from(e2) * spec.k2;
            let denom = 2.0 * (pf + 1.0) + s;
            Ok(vec![ClosedForm {
                e: -spec.params.k * spec.params.k / (2.0 * hbar * hbar * denom * denom),
                u: (1.0 + s) / 2.0,
                eps: None,
                multiple_roots: false,
            }])
        }
        (PotentialId::IV, b @ (Branch::U1 | Branch::U2)) => {
            let h2 = hbar * hbar;
            let lambda = spec.params.k / h2;
            let (nu1, nu2) = (spec.params.mu1 / h2, spec.params.mu2 / h2);
            let nusq = nu1 * nu1 + nu2 * nu2;
            let roots = match b {
                Branch::U1 => real_cubic_roots(2.0 * (pf + 1.0), -2.0 * lambda, 0.0, nusq),
                _ => real_cubic_roots(2.0 * (pf + 1.0), 2.0 * lambda, 0.0, -nusq),
            };
            let positive: Vec<f64> = roots.into_iter().filter(|t| *t > 1e-12).collect();
            let multiple = positive.len() > 1;
            Ok(positive
                .into_iter()
                .map(|t| {
                    let t3 = t * t * t;
                    let u = match b {
                        Branch::U1 => (nu2 * nu2 - lambda * t * t + t3) / (2.0 * t3),
                        _ => -(nu1 * nu1 - lambda * t * t - t3) / (2.0 * t3),
                    };
                    ClosedForm {
                        e: -h2 * t * t / 2.0,
                        u,
                        eps: Some(t),
                        multiple_roots: multiple,
                    }
                })
                .collect())
        }
        _ => unreachable!("check_admissible filters mismatched branches"),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HbarCheck {
    pub constant: &'static str,
    pub classical_nonzero: bool,
    pub pass: bool,
}

/// Exact semiclassical correspondence: the ħ² coefficient of each quantum
/// constant must equal −1 × the classical constant, as a rational identity.
pub fn hbar_limit_check(id: PotentialId, params: &Params) -> Result<Vec<HbarCheck>> {
    let spec = get_potential(id, params)?;
    let q = &spec.quantum_exact;
    let c = &spec.classical_exact;
    let mut out = Vec::new();
    let mut scalar = |name: &'static str, qv: &HbarPoly, cv: &BigRational| {
        out.push(HbarCheck {
            constant: name,
            classical_nonzero: !cv.is_zero(),
            pass: qv.coeff(1) == -cv.clone(),
        });
    };
    scalar("alpha", &q.alpha, &c.alpha);
    scalar("gamma", &q.gamma, &c.gamma);
    scalar("a", &q.a, &c.a);
    let mut poly = |name: &'static str,
                    qp: &EnergyPolynomial<HbarPoly>,
                    cp: &EnergyPolynomial<BigRational>| {
        let n = qp.coeffs().len().max(cp.coeffs().len());
        let pass = (0..n).all(|i| qp.coeff(i).coeff(1) == -cp.coeff(i));
        let nz = cp.coeffs().iter().any(|x| !x.is_zero());
        out.push(HbarCheck {
            constant: name,
            classical_nonzero: nz,
            pass,
        });
    };
    poly("delta", &q.delta, &c.delta);
    poly("epsilon", &q.epsilon, &c.epsilon);
    poly("zeta", &q.zeta, &c.zeta);
    poly("d", &q.d, &c.d);
    poly("z", &q.z, &c.z);
    poly("casimir", &q.casimir, &c.casimir);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn potential_i_quantum_table_at_unit_parameters() {
        // ħ = ω = 1, μ1 = μ2 = 3/4: α = 8, ε = 16, δ(E) = −16E,
        // ζ = −16·(3/2)+8 = −16, d = 16, z(E) = −16E.
        let params = Params {
            mu1: 0.75,
            mu2: 0.75,
            ..Params::default()
        };
        let spec = get_potential(PotentialId::I, &params).unwrap();
        let q = &spec.quantum;
        assert_eq!(q.alpha, 8.0);
        assert_eq!(q.epsilon.coeff(0), 16.0);
        assert_eq!(q.delta.coeff(1), -16.0);
        assert_eq!(q.zeta.coeff(0), -16.0);
        assert_eq!(q.d.coeff(0), 16.0);
        assert_eq!(q.z.coeff(1), -16.0);
        assert_eq!(q.z.coeff(0), 0.0);
        assert!((spec.k1 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn potential_iii_quantum_table() {
        // ħ = 1, k = 1, μ1 = μ2 = 0 → γ = 2, ε = −1, ζ = 0, d(E) = 8E
        let params = Params {
            k: 1.0,
            ..Params::default()
        };
        let spec = get_potential(PotentialId::III, &params).unwrap();
        let q = &spec.quantum;
        assert_eq!(q.gamma, 2.0);
        assert_eq!(q.epsilon.coeff(0), -1.0);
        assert_eq!(q.zeta.coeff(0), 0.0);
        assert_eq!(q.d.coeff(1), 8.0);
        assert!((spec.k1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn casimir_values() {
        // potential i classical, μ1 = μ2 = 1, ω = 1, E = 2 → −256
        let params = Params {
            mu1: 1.0,
            mu2: 1.0,
            ..Params::default()
        };
        let spec = get_potential(PotentialId::I, &params).unwrap();
        assert_eq!(spec.classical.casimir_value(&2.0), -256.0);
        // potential ii: quantum K = 64ħ⁴ω²E vanishes at E = 0; classical K ≡ 0
        let spec2 = get_potential(PotentialId::II, &Params::default()).unwrap();
        assert_eq!(spec2.quantum.casimir_value(&0.0), 0.0);
        assert_eq!(spec2.quantum.casimir_value(&1.0), 64.0);
        for e in [-3.0, 0.0, 2.5] {
            assert_eq!(spec2.classical.casimir_value(&e), 0.0);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let params = Params {
            mu1: -1.0,
            ..Params::default()
        };
        assert!(matches!(
            get_potential(PotentialId::I, &params),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn mu_k_round_trip() {
        for id in [PotentialId::I, PotentialId::II, PotentialId::III] {
            for mu in [0.0, 0.11, 0.75, 2.0] {
                let k = k_from_mu(id, mu, 1.5).unwrap();
                let back = mu_from_k(id, k, 1.5).unwrap();
                assert!((mu - back).abs() < 1e-12, "{id} mu={mu} back={back}");
            }
        }
    }

    #[test]
    fn closed_forms_match_printed_spectra() {
        // i: ħ=ω=1, k1=k2=1, branch (+,+), p=0..2 → E = 4, 6, 8
        let params = Params {
            mu1: 0.75,
            mu2: 0.75,
            ..Params::default()
        };
        for (p, want) in [(0, 4.0), (1, 6.0), (2, 8.0)] {
            let cf = closed_form_energy(PotentialId::I, p, Branch::Signs(1, 1), &params).unwrap();
            assert!((cf[0].e - want).abs() < 1e-12);
            assert!((cf[0].u - 1.0).abs() < 1e-12);
        }
        // iii: ħ=k=1, μ1=μ2=0, branch (+,+), p=0 → E = −1/18
        let cf = closed_form_energy(PotentialId::III, 0, Branch::Signs(1, 1), &Params::default())
            .unwrap();
        assert!((cf[0].e - (-1.0 / 18.0)).abs() < 1e-15);
        // ii: ħ=ω=1, μ=3/4 (k=1), branch +, p=0 → E = 3
        let p2 = Params {
            mu: 0.75,
            ..Params::default()
        };
        let cf = closed_form_energy(PotentialId::II, 0, Branch::Sign(1), &p2).unwrap();
        assert!((cf[0].e - 3.0).abs() < 1e-12);
    }

    #[test]
    fn potential_iv_cubic_roots() {
        // ħ=1, λ=2, ν²=2 (ν1=ν2=1), p=0 → ε ∈ {1, (1+√5)/2}
        let params = Params {
            k: 2.0,
            mu1: 1.0,
            mu2: 1.0,
            ..Params::default()
        };
        let cf = closed_form_energy(PotentialId::IV, 0, Branch::U1, &params).unwrap();
        let eps: Vec<f64> = cf.iter().map(|c| c.eps.unwrap()).collect();
        assert_eq!(eps.len(), 2);
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((eps[0] - 1.0).abs() < 1e-12);
        assert!((eps[1] - golden).abs() < 1e-12);
        assert!((cf[0].e - (-0.5)).abs() < 1e-12);
        assert!((cf[1].e - (-(3.0 + 5.0_f64.sqrt()) / 4.0)).abs() < 1e-12);
        assert!(cf[0].multiple_roots && cf[1].multiple_roots);
        for c in &cf {
            let t = c.eps.unwrap();
            let res = 2.0 * t.powi(3) - 4.0 * t * t + 2.0;
            assert!(res.abs() <= 1e-12, "cubic residual {res}");
        }
    }

    #[test]
    fn inadmissible_branch_detected() {
        // potential ii with εk = −1.5 violates εk > −1
        let params = Params {
            mu: mu_from_k(PotentialId::II, 1.5, 1.0).unwrap(),
            ..Params::default()
        };
        assert!(matches!(
            closed_form_energy(PotentialId::II, 1, Branch::Sign(-1), &params),
            Err(Error::InadmissibleBranch { .. })
        ));
    }

    #[test]
    fn hbar_limit_examples() {
        let params = Params {
            mu1: 0.3,
            mu2: 0.8,
            k: 1.3,
            omega: 1.7,
            hbar: 0.6,
            mu: 0.4,
        };
        for id in PotentialId::ALL {
            let checks = hbar_limit_check(id, &params).unwrap();
            for c in &checks {
                assert!(c.pass, "potential {id}: constant {} fails", c.constant);
            }
        }
    }

    #[test]
    fn catalog_algebras_pass_validate() {
        use crate::algebra::{validate_algebra, RawAlgebra};
        let spec = get_potential(PotentialId::III, &Params::default()).unwrap();
        for alg in [&spec.classical, &spec.quantum] {
            let raw = RawAlgebra {
                alpha: alg.alpha,
                beta: 0.0,
                gamma: alg.gamma,
                a: alg.a,
                b: -alg.gamma,
                c: -alg.alpha,
                delta: alg.delta.clone(),
                epsilon: alg.epsilon.clone(),
                zeta: alg.zeta.clone(),
                d: alg.d.clone(),
                e: alg.delta.map(|x| -x),
                z: alg.z.clone(),
                casimir: alg.casimir.clone(),
                flavor: alg.flavor,
                hbar: alg.hbar,
            };
            let v = validate_algebra(raw).unwrap();
            assert_eq!(&v, alg);
        }
    }
}
