//! Explicit (p+1)×(p+1) Fock-basis matrices for a solved representation,
//! plus numerical verification of every algebra relation and both Casimir
//! forms.
//!
//! C is built from its own closed form C = b†ΔAρ − ρΔA b, *not* as [A,B], so
//! the commutation relation [A,B] = C is a genuine check rather than a
//! tautology. All arithmetic is floating point; with dims ≤ 21 the residuals
//! sit at roundoff (≪ 1e-9) when (u, E) actually solve the constraints.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::algebra::QuadraticAlgebra;
use crate::parafermion::StructureFunction;
use crate::{Error, Result};

/// Matrices of one finite-dimensional representation.
#[derive(Clone, Debug)]
pub struct MatrixRep {
    pub p: usize,
    pub u: f64,
    pub e: f64,
    /// Number operator, diag(0..p).
    pub n: DMatrix<f64>,
    /// Lowering operator: b[n-1, n] = √Φ(n).
    pub lower: DMatrix<f64>,
    /// Raising operator, transpose of `lower`.
    pub raise: DMatrix<f64>,
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
    pub c: DMatrix<f64>,
    /// Φ(0), Φ(1), …, Φ(p+1).
    pub phi: Vec<f64>,
    /// Normalization scale of Φ (largest coefficient magnitude, ≥ 1).
    pub phi_scale: f64,
}

/// Normalized residual norms of the representation checks.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct ResidualReport {
    /// ‖[A,B] − C‖ (eq. "algebra1").
    pub algebra1: f64,
    /// ‖[A,C] − (αA² + γ{A,B} + δA + εB + ζ)‖.
    pub algebra2: f64,
    /// ‖[B,C] − (aA² − γB² − α{A,B} + dA − δB + z)‖.
    pub algebra3: f64,
    /// ‖K_matrix − K(E)·I‖ for the first Casimir form.
    pub casimir: f64,
    /// ‖K_matrix(form 1) − K_matrix(form 2)‖, the symmetrized-triple variant.
    pub casimir_forms: f64,
    /// |Φ(0)| and |Φ(p+1)| over the Φ coefficient scale.
    pub phi0: f64,
    pub phi_p1: f64,
    /// ‖B − Bᵀ‖ and ‖C + Cᵀ‖ (construction sanity).
    pub b_symmetry: f64,
    pub c_antisymmetry: f64,
    /// ‖b_lower^(p+1)‖ (structural nilpotency).
    pub nilpotency: f64,
    /// ‖N(N−1)···(N−p)‖ (faithfulness).
    pub faithfulness: f64,
}

impl ResidualReport {
    /// Largest residual that the verification gates on.
    pub fn max(&self) -> f64 {
        [
            self.algebra1,
            self.algebra2,
            self.algebra3,
            self.casimir,
            self.casimir_forms,
            self.phi0,
            self.phi_p1,
            self.b_symmetry,
            self.c_antisymmetry,
            self.nilpotency,
            self.faithfulness,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn amax(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Φ(0..p+1) with the unitarity check: Φ(x) must be non-negative (within
/// −1e-10·scale) for x = 1..p.
pub fn phi_samples(sf: &StructureFunction<f64>, p: usize) -> Result<(Vec<f64>, f64)> {
    let scale = sf.phi_scale();
    let phi: Vec<f64> = (0..=p + 1).map(|x| sf.phi(x as f64)).collect();
    for (n, &v) in phi.iter().enumerate().take(p + 1).skip(1) {
        if v < -1e-10 * scale {
            return Err(Error::NegativePhi { x: n, value: v });
        }
    }
    Ok((phi, scale))
}

/// Ladder matrices (N, b, b†) of the order-p deformed parafermion.
#[allow(clippy::type_complexity)]
pub fn build_ladder(
    sf: &StructureFunction<f64>,
    p: usize,
) -> Result<(DMatrix<f64>, DMatrix<f64>, DMatrix<f64>, Vec<f64>, f64)> {
    let dim = p + 1;
    let (phi, scale) = phi_samples(sf, p)?;
    let n = DMatrix::from_fn(dim, dim, |i, j| if i == j { i as f64 } else { 0.0 });
    let mut lower = DMatrix::zeros(dim, dim);
    for m in 1..=p {
        lower[(m - 1, m)] = phi[m].max(0.0).sqrt();
    }
    let raise = lower.transpose();
    Ok((n, lower, raise, phi, scale))
}

/// Full generator matrices A, B, C from the deformed-oscillator realization.
pub fn build_generators(
    algebra: &QuadraticAlgebra<f64>,
    u: f64,
    e: f64,
    p: usize,
) -> Result<MatrixRep> {
    let sf = StructureFunction::new(algebra, u, e)?;
    let dim = p + 1;
    let (n, lower, raise, phi, phi_scale) = build_ladder(&sf, p)?;

    let mut a = DMatrix::zeros(dim, dim);
    let mut b = DMatrix::zeros(dim, dim);
    let mut c = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        a[(i, i)] = sf.a_diag(i);
        b[(i, i)] = sf.b_diag(i)?;
    }
    for m in 0..p {
        // The ladder weight enters the symmetric generators through the
        // product ρ(m)Φ(m+1): the off-diagonal elements of B and C are
        // √(ρ(m)Φ(m+1)) and ±ΔA(m)√(ρ(m)Φ(m+1)) — the recurrences that Φ
        // solves pair Φ(x+1) with a single power of ρ(x).
        let rho = sf.rho(m)?;
        let da = sf.a_diag(m + 1) - sf.a_diag(m);
        let s = (rho * phi[m + 1]).max(0.0).sqrt();
        b[(m + 1, m)] = s;
        b[(m, m + 1)] = s;
        c[(m + 1, m)] = da * s;
        c[(m, m + 1)] = -da * s;
    }

    Ok(MatrixRep {
        p,
        u,
        e,
        n,
        lower,
        raise,
        a,
        b,
        c,
        phi,
        phi_scale,
    })
}

fn anticomm(x: &DMatrix<f64>, y: &DMatrix<f64>) -> DMatrix<f64> {
    x * y + y * x
}

/// Residual of LHS − Σ terms, normalized by the largest matrix in play.
fn rel_residual(lhs: &DMatrix<f64>, terms: &[DMatrix<f64>]) -> f64 {
    let mut sum = lhs.clone();
    let mut scale = amax(lhs).max(1.0);
    for t in terms {
        scale = scale.max(amax(t));
        sum -= t;
    }
    amax(&sum) / scale
}

/// Residuals of the three commutation relations at energy E.
pub fn algebra_residuals(
    rep: &MatrixRep,
    algebra: &QuadraticAlgebra<f64>,
) -> (f64, f64, f64) {
    let e = rep.e;
    let (al, ga, aa) = (algebra.alpha, algebra.gamma, algebra.a);
    let de = algebra.delta.eval(&e);
    let ep = algebra.epsilon.eval(&e);
    let ze = algebra.zeta.eval(&e);
    let dd = algebra.d.eval(&e);
    let zz = algebra.z.eval(&e);
    let id = DMatrix::identity(rep.p + 1, rep.p + 1);
    let (a, b, c) = (&rep.a, &rep.b, &rep.c);

    let r1 = rel_residual(&(a * b - b * a), std::slice::from_ref(c));
    let r2 = rel_residual(
        &(a * c - c * a),
        &[
            (a * a) * al,
            anticomm(a, b) * ga,
            a * de,
            b * ep,
            &id * ze,
        ],
    );
    let r3 = rel_residual(
        &(b * c - c * b),
        &[
            (a * a) * aa,
            (b * b) * -ga,
            anticomm(a, b) * -al,
            a * dd,
            b * -de,
            &id * zz,
        ],
    );
    (r1, r2, r3)
}

/// Both Casimir matrix forms. Returns (‖K₁ − K(E)·I‖, ‖K₁ − K₂‖), normalized.
pub fn casimir_residuals(rep: &MatrixRep, algebra: &QuadraticAlgebra<f64>) -> (f64, f64) {
    let e = rep.e;
    let (al, ga, aa) = (algebra.alpha, algebra.gamma, algebra.a);
    let de = algebra.delta.eval(&e);
    let ep = algebra.epsilon.eval(&e);
    let ze = algebra.zeta.eval(&e);
    let dd = algebra.d.eval(&e);
    let zz = algebra.z.eval(&e);
    let k = algebra.casimir_value(&e);
    let dim = rep.p + 1;
    let id = DMatrix::identity(dim, dim);
    let (a, b, c) = (&rep.a, &rep.b, &rep.c);
    let a2 = a * a;
    let a3 = &a2 * a;
    let b2 = b * b;

    // First printed form:
    // K = C² − α{A²,B} − γ{A,B²} + (αγ−δ){A,B} + (γ²−ε)B² + (γδ−2ζ)B
    //     + (2a/3)A³ + (d + aγ/3 + α²)A² + (aε/3 + αδ + 2z)A
    let k1_terms = [
        c * c,
        anticomm(&a2, b) * -al,
        anticomm(a, &b2) * -ga,
        anticomm(a, b) * (al * ga - de),
        &b2 * (ga * ga - ep),
        b * (ga * de - 2.0 * ze),
        &a3 * (2.0 * aa / 3.0),
        &a2 * (dd + aa * ga / 3.0 + al * al),
        a * (aa * ep / 3.0 + al * de + 2.0 * zz),
    ];
    let mut k1 = DMatrix::zeros(dim, dim);
    let mut scale = k.abs().max(1.0);
    for t in &k1_terms {
        scale = scale.max(amax(t));
        k1 += t;
    }
    let r_val = amax(&(&k1 - &id * k)) / scale;

    // Symmetrized form, with {X,Y,Z} the full 6-term sum:
    // K = C² + (2a/3)A³ − (α/3){A,A,B} − (γ/3){A,B,B} + (2α²/3 + d + 2aγ/3)A²
    //     + (−ε + 2γ²/3)B² + (−δ + aγ/3){A,B} + (2αδ/3 + aε/3 + dγ/3 + 2z)A
    //     + (−αε/3 + 2δγ/3 − 2ζ)B + (γz/3 − αζ/3)
    let aab = (&a2 * b + a * b * a + b * &a2) * 2.0;
    let abb = (a * &b2 + b * a * b + &b2 * a) * 2.0;
    let k2_terms = [
        c * c,
        &a3 * (2.0 * aa / 3.0),
        aab * (-al / 3.0),
        abb * (-ga / 3.0),
        &a2 * (2.0 * al * al / 3.0 + dd + 2.0 * aa * ga / 3.0),
        &b2 * (-ep + 2.0 * ga * ga / 3.0),
        anticomm(a, b) * (-de + aa * ga / 3.0),
        a * (2.0 * al * de / 3.0 + aa * ep / 3.0 + dd * ga / 3.0 + 2.0 * zz),
        b * (-al * ep / 3.0 + 2.0 * de * ga / 3.0 - 2.0 * ze),
        &id * (ga * zz / 3.0 - al * ze / 3.0),
    ];
    let mut k2 = DMatrix::zeros(dim, dim);
    let mut scale2 = scale;
    for t in &k2_terms {
        scale2 = scale2.max(amax(t));
        k2 += t;
    }
    let r_forms = amax(&(&k1 - &k2)) / scale2;
    (r_val, r_forms)
}

/// Full residual report for one representation.
pub fn verify(rep: &MatrixRep, algebra: &QuadraticAlgebra<f64>) -> ResidualReport {
    let (algebra1, algebra2, algebra3) = algebra_residuals(rep, algebra);
    let (casimir, casimir_forms) = casimir_residuals(rep, algebra);
    let dim = rep.p + 1;

    let b_symmetry = amax(&(&rep.b - rep.b.transpose())) / amax(&rep.b).max(1.0);
    let c_antisymmetry = amax(&(&rep.c + rep.c.transpose())) / amax(&rep.c).max(1.0);

    let mut nil = DMatrix::identity(dim, dim);
    for _ in 0..dim {
        nil = &nil * &rep.lower;
    }
    let nilpotency = amax(&nil);

    let mut faith = DMatrix::identity(dim, dim);
    for n in 0..=rep.p {
        faith = &faith * (&rep.n - DMatrix::identity(dim, dim) * (n as f64));
    }
    let faithfulness = amax(&faith);

    ResidualReport {
        algebra1,
        algebra2,
        algebra3,
        casimir,
        casimir_forms,
        phi0: rep.phi[0].abs() / rep.phi_scale,
        phi_p1: rep.phi[rep.p + 1].abs() / rep.phi_scale,
        b_symmetry,
        c_antisymmetry,
        nilpotency,
        faithfulness,
    }
}
