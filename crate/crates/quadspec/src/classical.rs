//! Numerical verification of the classical Poisson-algebra side.
//!
//! Observables are phase-space functions evaluated with forward-mode dual
//! numbers carrying a full 4-gradient, so first-order Poisson brackets are
//! exact to machine precision. The nested brackets {A,C}, {B,C} with
//! C = {A,B} need second derivatives; the outer derivative of C is taken by
//! central finite differences of the (exact) inner bracket, which is why the
//! closure tolerance is 1e-6 rather than machine epsilon.

use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::QuadraticAlgebra;
use crate::catalog::{self, Params, PotentialId};
use crate::Result;

/// Dual number over the 4 phase-space coordinates (x, y, px, py).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual {
    pub v: f64,
    pub g: [f64; 4],
}

impl Dual {
    pub const fn c(v: f64) -> Dual {
        Dual { v, g: [0.0; 4] }
    }

    /// Seed variable number `i` (0 = x, 1 = y, 2 = px, 3 = py).
    pub fn var(v: f64, i: usize) -> Dual {
        let mut g = [0.0; 4];
        g[i] = 1.0;
        Dual { v, g }
    }

    pub fn sqrt(self) -> Dual {
        let s = self.v.sqrt();
        let dv = 0.5 / s;
        Dual {
            v: s,
            g: self.g.map(|gi| gi * dv),
        }
    }

    pub fn recip(self) -> Dual {
        let inv = 1.0 / self.v;
        let dv = -inv * inv;
        Dual {
            v: inv,
            g: self.g.map(|gi| gi * dv),
        }
    }

    pub fn powi(self, n: i32) -> Dual {
        let dv = f64::from(n) * self.v.powi(n - 1);
        Dual {
            v: self.v.powi(n),
            g: self.g.map(|gi| gi * dv),
        }
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, r: Dual) -> Dual {
        Dual {
            v: self.v + r.v,
            g: [
                self.g[0] + r.g[0],
                self.g[1] + r.g[1],
                self.g[2] + r.g[2],
                self.g[3] + r.g[3],
            ],
        }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, r: Dual) -> Dual {
        self + (-r)
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual {
            v: -self.v,
            g: self.g.map(|gi| -gi),
        }
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, r: Dual) -> Dual {
        Dual {
            v: self.v * r.v,
            g: [
                self.g[0] * r.v + self.v * r.g[0],
                self.g[1] * r.v + self.v * r.g[1],
                self.g[2] * r.v + self.v * r.g[2],
                self.g[3] * r.v + self.v * r.g[3],
            ],
        }
    }
}

impl Div for Dual {
    type Output = Dual;
    #[allow(clippy::suspicious_arithmetic_impl)] // a/b as a * b⁻¹, chain rule included
    fn div(self, r: Dual) -> Dual {
        self * r.recip()
    }
}

impl Mul<f64> for Dual {
    type Output = Dual;
    fn mul(self, r: f64) -> Dual {
        Dual {
            v: self.v * r,
            g: self.g.map(|gi| gi * r),
        }
    }
}

impl Add<f64> for Dual {
    type Output = Dual;
    fn add(self, r: f64) -> Dual {
        Dual {
            v: self.v + r,
            ..self
        }
    }
}

/// Cartesian phase-space point.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PhasePoint {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

impl PhasePoint {
    pub fn duals(&self) -> [Dual; 4] {
        [
            Dual::var(self.x, 0),
            Dual::var(self.y, 1),
            Dual::var(self.px, 2),
            Dual::var(self.py, 3),
        ]
    }

    fn shifted(&self, i: usize, h: f64) -> PhasePoint {
        let mut q = *self;
        match i {
            0 => q.x += h,
            1 => q.y += h,
            2 => q.px += h,
            _ => q.py += h,
        }
        q
    }
}

/// A phase-space observable with exact dual-number gradients.
#[derive(Clone)]
pub struct Observable {
    #[allow(clippy::type_complexity)]
    f: Arc<dyn Fn(&[Dual; 4]) -> Dual + Send + Sync>,
}

impl Observable {
    pub fn new(f: impl Fn(&[Dual; 4]) -> Dual + Send + Sync + 'static) -> Observable {
        Observable { f: Arc::new(f) }
    }

    pub fn eval(&self, pt: &PhasePoint) -> Dual {
        (self.f)(&pt.duals())
    }

    pub fn value(&self, pt: &PhasePoint) -> f64 {
        self.eval(pt).v
    }

    pub fn grad(&self, pt: &PhasePoint) -> [f64; 4] {
        self.eval(pt).g
    }
}

/// {f, g} = f_x g_px + f_y g_py − f_px g_x − f_py g_y, gradients exact.
pub fn poisson_bracket(f: &Observable, g: &Observable, pt: &PhasePoint) -> f64 {
    let fg = f.grad(pt);
    let gg = g.grad(pt);
    fg[0] * gg[2] + fg[1] * gg[3] - fg[2] * gg[0] - fg[3] * gg[1]
}

/// Finite-difference oracle for the bracket (values only, central steps).
pub fn poisson_bracket_fd(f: &Observable, g: &Observable, pt: &PhasePoint, h: f64) -> f64 {
    let d = |obs: &Observable, i: usize| {
        (obs.value(&pt.shifted(i, h)) - obs.value(&pt.shifted(i, -h))) / (2.0 * h)
    };
    d(f, 0) * d(g, 2) + d(f, 1) * d(g, 3) - d(f, 2) * d(g, 0) - d(f, 3) * d(g, 1)
}

/// {f, C}(pt) where C(q) = {a, b}(q): inner bracket exact via duals, outer
/// derivative of C by central finite differences with step `h`.
pub fn bracket_with_bracket(
    f: &Observable,
    a: &Observable,
    b: &Observable,
    pt: &PhasePoint,
    h: f64,
) -> f64 {
    let fg = f.grad(pt);
    let dc = |i: usize| {
        (poisson_bracket(a, b, &pt.shifted(i, h)) - poisson_bracket(a, b, &pt.shifted(i, -h)))
            / (2.0 * h)
    };
    fg[0] * dc(2) + fg[1] * dc(3) - fg[2] * dc(0) - fg[3] * dc(1)
}

/// The classical triple (H, A, B) for one catalog potential.
#[derive(Clone)]
pub struct ClassicalObservables {
    pub h: Observable,
    pub a: Observable,
    pub b: Observable,
}

/// Per-relation residual maxima (all normalized by the largest term).
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct ClosureResiduals {
    pub ha: f64,
    pub hb: f64,
    pub ac: f64,
    pub bc: f64,
    pub casimir: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub potential: String,
    pub samples: usize,
    pub seed: u64,
    pub max: ClosureResiduals,
    pub mean: ClosureResiduals,
}

/// Finite-difference step for the outer derivative of C = {A,B}.
const FD_STEP: f64 = 1e-5;

/// Closure residuals of the full quadratic Poisson algebra at one point.
pub fn closure_residuals_at(
    algebra: &QuadraticAlgebra<f64>,
    obs: &ClassicalObservables,
    pt: &PhasePoint,
) -> ClosureResiduals {
    let h = obs.h.value(pt);
    let av = obs.a.value(pt);
    let bv = obs.b.value(pt);
    let (alpha, gamma, aa) = (algebra.alpha, algebra.gamma, algebra.a);
    let delta = algebra.delta.eval(&h);
    let epsilon = algebra.epsilon.eval(&h);
    let zeta = algebra.zeta.eval(&h);
    let dd = algebra.d.eval(&h);
    let zz = algebra.z.eval(&h);

    let norm = |lhs: f64, terms: &[f64]| {
        let scale = terms
            .iter()
            .fold(lhs.abs().max(1.0), |acc, t| acc.max(t.abs()));
        (lhs - terms.iter().sum::<f64>()).abs() / scale
    };

    let ha = {
        let v = poisson_bracket(&obs.h, &obs.a, pt);
        // normalize against the gradient scale of H and A
        let s = obs
            .h
            .grad(pt)
            .iter()
            .chain(obs.a.grad(pt).iter())
            .fold(1.0f64, |acc, g| acc.max(g.abs()));
        v.abs() / (s * s)
    };
    let hb = {
        let v = poisson_bracket(&obs.h, &obs.b, pt);
        let s = obs
            .h
            .grad(pt)
            .iter()
            .chain(obs.b.grad(pt).iter())
            .fold(1.0f64, |acc, g| acc.max(g.abs()));
        v.abs() / (s * s)
    };

    let ac = norm(
        bracket_with_bracket(&obs.a, &obs.a, &obs.b, pt, FD_STEP),
        &[
            alpha * av * av,
            2.0 * gamma * av * bv,
            delta * av,
            epsilon * bv,
            zeta,
        ],
    );
    let bc = norm(
        bracket_with_bracket(&obs.b, &obs.a, &obs.b, pt, FD_STEP),
        &[
            aa * av * av,
            -gamma * bv * bv,
            -2.0 * alpha * av * bv,
            dd * av,
            -delta * bv,
            zz,
        ],
    );

    let casimir = {
        let c = poisson_bracket(&obs.a, &obs.b, pt);
        let terms = [
            c * c,
            -2.0 * alpha * av * av * bv,
            -2.0 * gamma * av * bv * bv,
            -2.0 * delta * av * bv,
            -epsilon * bv * bv,
            -2.0 * zeta * bv,
            (2.0 / 3.0) * aa * av * av * av,
            dd * av * av,
            2.0 * zz * av,
        ];
        let k_pt: f64 = terms.iter().sum();
        let k_h = algebra.casimir_value(&h);
        let scale = terms
            .iter()
            .fold(k_h.abs().max(1.0), |acc, t| acc.max(t.abs()));
        (k_pt - k_h).abs() / scale
    };

    ClosureResiduals {
        ha,
        hb,
        ac,
        bc,
        casimir,
    }
}

/// |K_pointwise(pt) − K(H(pt))|, normalized (wrapper used by the CLI).
pub fn classical_casimir_residual(id: PotentialId, params: &Params, pt: &PhasePoint) -> Result<f64> {
    let spec = catalog::get_potential(id, params)?;
    Ok(closure_residuals_at(&spec.classical, &spec.observables, pt).casimir)
}

/// Draw an in-domain sample point for a potential: coordinate magnitudes in
/// [0.5, 2.0] with random signs where allowed, momenta in [−1, 1]; points too
/// close to the r ± x singular sets (potentials iii/iv) are resampled.
/// Potential iv lives on the y > 0 sheet: its integrals mix √(r+x) and
/// √(r−x), whose product is |y|, so the closure holds where ξη = y ≥ 0 in
/// parabolic coordinates ξ = √(r+x), η = √(r−x).
pub fn sample_point(id: PotentialId, rng: &mut ChaCha8Rng) -> PhasePoint {
    loop {
        let mag = |rng: &mut ChaCha8Rng| rng.gen_range(0.5_f64..2.0);
        let sgn = |rng: &mut ChaCha8Rng| if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let x = mag(rng) * sgn(rng);
        let y = if id == PotentialId::IV {
            mag(rng)
        } else {
            mag(rng) * sgn(rng)
        };
        let px = rng.gen_range(-1.0..1.0);
        let py = rng.gen_range(-1.0..1.0);
        let r = x.hypot(y);
        let ok = match id {
            PotentialId::I | PotentialId::II => true,
            PotentialId::III | PotentialId::IV => x.abs() < 0.9 * r,
        };
        if ok {
            return PhasePoint { x, y, px, py };
        }
    }
}

/// Verify {H,A} = {H,B} = 0, the quadratic-algebra closure, and the
/// pointwise Casimir over a seeded sample.
pub fn verify_closure(
    id: PotentialId,
    params: &Params,
    samples: usize,
    seed: u64,
) -> Result<ClosureReport> {
    let spec = catalog::get_potential(id, params)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max = ClosureResiduals::default();
    let mut mean = ClosureResiduals::default();
    for _ in 0..samples {
        let pt = sample_point(id, &mut rng);
        let r = closure_residuals_at(&spec.classical, &spec.observables, &pt);
        max.ha = max.ha.max(r.ha);
        max.hb = max.hb.max(r.hb);
        max.ac = max.ac.max(r.ac);
        max.bc = max.bc.max(r.bc);
        max.casimir = max.casimir.max(r.casimir);
        mean.ha += r.ha;
        mean.hb += r.hb;
        mean.ac += r.ac;
        mean.bc += r.bc;
        mean.casimir += r.casimir;
    }
    if samples > 0 {
        let n = samples as f64;
        mean.ha /= n;
        mean.hb /= n;
        mean.ac /= n;
        mean.bc /= n;
        mean.casimir /= n;
    }
    Ok(ClosureReport {
        potential: id.to_string(),
        samples,
        seed,
        max,
        mean,
    })
}
