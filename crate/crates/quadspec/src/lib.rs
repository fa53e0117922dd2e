//! Energy spectra of two-dimensional superintegrable systems from the
//! representation theory of their quadratic symmetry algebras.
//!
//! The pipeline: a Hamiltonian with two extra quadratic integrals A, B closes
//! a quadratic algebra [A,B]=C, [A,C]=..., [B,C]=... with energy-dependent
//! structure constants. Realizing the algebra on a deformed (parafermionic)
//! oscillator turns the hunt for (p+1)-dimensional unitary representations
//! into a two-equation polynomial system Φ(0)=0, Φ(p+1)=0 in the shift u and
//! the energy E. Solving it reproduces the closed-form spectra of the four
//! catalog potentials, and everything is cross-checked three ways: explicit
//! matrix representations, an independent grid-scan root oracle, and a
//! numerical verification of the classical Poisson-algebra limit.
//!
//! Core algebra types are generic over the scalar ring ([`scalar::Scalar`]),
//! so the same structure-constant bookkeeping runs in `f64`, exact rationals,
//! or polynomials in ħ² (used for the exact semiclassical-limit checks).
//! Concrete aliases for the common instantiations live at the crate root.

pub mod algebra;
pub mod catalog;
pub mod classical;
pub mod matrixrep;
pub mod output;
pub mod parafermion;
pub mod repsolve;
pub mod scalar;

use num_rational::BigRational;

pub use scalar::{HbarPoly, Scalar};

/// Floating-point quadratic algebra, the workhorse for solving and matrices.
pub type Algebra64 = algebra::QuadraticAlgebra<f64>;
/// Exact-rational algebra (classical structure constants).
pub type AlgebraExact = algebra::QuadraticAlgebra<BigRational>;
/// Algebra whose constants are polynomials in ħ² (quantum side, exact).
pub type AlgebraHbar = algebra::QuadraticAlgebra<HbarPoly>;
/// Structure function over f64.
pub type StructureFunction64 = parafermion::StructureFunction<f64>;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("Jacobi constraint violated: {identity} (coefficient {index})")]
    JacobiViolation { identity: &'static str, index: usize },
    #[error("the algebra must be supplied with beta = 0 (rotate the generators first)")]
    NonzeroBeta,
    #[error("energy polynomial degree {got} exceeds maximum {max}")]
    DegreeTooHigh { got: usize, max: usize },
    #[error("no parafermionic construction: gamma = 0 and epsilon(E) = {epsilon} <= 0")]
    UnsupportedCase { epsilon: f64 },
    #[error("pole of {factor} at lattice point n = {n}")]
    PoleAtLattice { factor: &'static str, n: f64 },
    #[error("structure function negative at x = {x}: Phi = {value}")]
    NegativePhi { x: usize, value: f64 },
    #[error("neither algebra case applies anywhere in the search box")]
    CaseUndefinedOnBox,
    #[error("unknown potential id: {0}")]
    UnknownPotential(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("branch {branch} is inadmissible: {constraint}")]
    InadmissibleBranch { branch: String, constraint: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("algebra JSON violates the schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
