//! The threshold-limit objects: the critical manifold of the slow-fast field,
//! the reduced angular flow on it, and the composite profiles they induce at
//! small eps.
//!
//! As the segregation strength approaches its threshold the radial pair
//! `(w1, w2)` becomes fast and collapses onto a graph over the angular pair;
//! what remains is a scalar heteroclinic flow for the angle from `pi/2` to
//! `0`. Everything downstream (initial guesses, deviation diagnostics, the
//! surface-tension coefficient) is built from that flow.

use crate::error::Error;
use crate::mesh::{interp_cubic, simpson, Mesh};
use crate::model::ModelParams;
use crate::profile::{BoundaryConditions, CartesianProfile, SlowFastProfile};

/// The graph `(w1, w2) = (W(phi1, phi2), 0)` that the fast radial dynamics
/// relax onto.
pub fn critical_manifold_point(phi1: f64, phi2: f64, lambda: f64) -> (f64, f64) {
    let inv_l2 = 1.0 / (lambda * lambda);
    let (sin, cos) = phi1.sin_cos();
    let (s2, c2) = (sin * sin, cos * cos);
    let num = phi2 * phi2 + (inv_l2 + 1.0) * s2 * c2;
    let den = 2.0 * (1.0 + (inv_l2 - 1.0) * c2);
    (num / den, 0.0)
}

/// Right side of the reduced angular flow on the critical manifold,
/// `phi1' = -sin(2 phi1) / (2 lambda sqrt(1 + (1/lambda^2 - 1) cos^2 phi1))`.
///
/// Negative on `(0, pi/2)`: the angle falls from the pure-v state to the
/// pure-u state.
pub fn reduced_rhs(phi1: f64, lambda: f64) -> f64 {
    let inv_l2 = 1.0 / (lambda * lambda);
    let c = phi1.cos();
    let bracket = 1.0 + (inv_l2 - 1.0) * c * c;
    -(2.0 * phi1).sin() / (2.0 * lambda * bracket.sqrt())
}

/// The reduced heteroclinic, normalized so the angle passes through `pi/4`
/// at `x = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedSolution {
    x: Vec<f64>,
    phi1: Vec<f64>,
    phi2: Vec<f64>,
    lambda: f64,
    h: f64,
}

impl ReducedSolution {
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn phi1(&self) -> &[f64] {
        &self.phi1
    }

    /// `phi2 = phi1'`, stored as the flow's right side evaluated at `phi1`,
    /// which is what the derivative equals along exact solutions.
    pub fn phi2(&self) -> &[f64] {
        &self.phi2
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn half_length(&self) -> f64 {
        *self.x.last().expect("reduced meshes are non-empty")
    }

    /// Cubic interpolation of the angle at an off-node point (clamped to the
    /// solved range).
    pub fn sample_phi1(&self, x: f64) -> f64 {
        interp_cubic(&self.x, &self.phi1, x)
    }

    /// Derivative at an off-node point, slaved to the flow through
    /// [`reduced_rhs`] so it stays consistent with the sampled angle.
    pub fn sample_phi2(&self, x: f64) -> f64 {
        reduced_rhs(self.sample_phi1(x), self.lambda)
    }
}

/// Default reduced-solution mesh for a given mass ratio.
pub fn default_reduced_mesh(lambda: f64) -> (f64, usize) {
    (12.0 * lambda.max(1.0), 4801)
}

/// Per-step local error budget for the one-step integrator, measured by step
/// doubling. Sized to admit every mesh the solver defaults produce (spacing
/// up to ~0.1) while rejecting grossly under-resolved ones; the default
/// reduced mesh sits about four orders of magnitude below it.
pub const REDUCED_STEP_ERROR_LIMIT: f64 = 1e-8;

fn rk4_step(phi: f64, h: f64, lambda: f64) -> f64 {
    let k1 = reduced_rhs(phi, lambda);
    let k2 = reduced_rhs(phi + 0.5 * h * k1, lambda);
    let k3 = reduced_rhs(phi + 0.5 * h * k2, lambda);
    let k4 = reduced_rhs(phi + h * k3, lambda);
    phi + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrate the reduced flow outward from `phi1(0) = pi/4` over a uniform
/// mesh on `[-half_length, half_length]` with `n` nodes (odd, at least 3).
///
/// Classical fourth-order one-step integration; each step is checked by step
/// doubling and the solve fails with [`Error::MeshTooCoarse`] if the local
/// error estimate exceeds [`REDUCED_STEP_ERROR_LIMIT`].
pub fn solve_reduced(lambda: f64, half_length: f64, n: usize) -> Result<ReducedSolution, Error> {
    if !lambda.is_finite() || lambda < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "lambda must be finite and >= 1, got {lambda}"
        )));
    }
    if !half_length.is_finite() || half_length <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "half-length must be positive, got {half_length}"
        )));
    }
    if n < 3 || n % 2 == 0 {
        return Err(Error::InvalidParameter(format!(
            "node count must be odd and at least 3, got {n}"
        )));
    }
    let mid = (n - 1) / 2;
    let h = half_length / mid as f64;
    let x: Vec<f64> = (0..n).map(|i| (i as f64 - mid as f64) * h).collect();
    let mut phi1 = vec![0.0; n];
    phi1[mid] = std::f64::consts::FRAC_PI_4;

    let advance = |from: f64, step: f64| -> Result<f64, Error> {
        let full = rk4_step(from, step, lambda);
        let halfway = rk4_step(from, 0.5 * step, lambda);
        let doubled = rk4_step(halfway, 0.5 * step, lambda);
        let estimate = (full - doubled).abs() / 15.0;
        if estimate > REDUCED_STEP_ERROR_LIMIT {
            return Err(Error::MeshTooCoarse {
                estimate,
                limit: REDUCED_STEP_ERROR_LIMIT,
            });
        }
        Ok(full)
    };

    for i in mid..n - 1 {
        phi1[i + 1] = advance(phi1[i], h)?;
    }
    for i in (1..=mid).rev() {
        phi1[i - 1] = advance(phi1[i], -h)?;
    }

    let phi2: Vec<f64> = phi1.iter().map(|&p| reduced_rhs(p, lambda)).collect();
    Ok(ReducedSolution {
        x,
        phi1,
        phi2,
        lambda,
        h,
    })
}

/// Lift a reduced solution onto the critical manifold: the angular pair is
/// copied, the radial pair takes its graph values. The result is a singular
/// (eps = 0) slow-fast profile.
pub fn singular_lift(reduced: &ReducedSolution) -> SlowFastProfile {
    let lambda = reduced.lambda();
    let w1: Vec<f64> = reduced
        .phi1()
        .iter()
        .zip(reduced.phi2())
        .map(|(&p1, &p2)| critical_manifold_point(p1, p2, lambda).0)
        .collect();
    SlowFastProfile {
        x: reduced.x().to_vec(),
        w1,
        w2: vec![0.0; reduced.len()],
        phi1: reduced.phi1().to_vec(),
        phi2: reduced.phi2().to_vec(),
        lambda,
        eps: 0.0,
    }
}

/// Build the leading-order wall profile at finite eps from a reduced
/// solution: radius `1 - eps^2 * W` on the manifold, angle from the reduced
/// flow, endpoints pinned to the exact rest states.
///
/// The profile lives on the reduced solution's own mesh, so solver and
/// reduced meshes should be chosen to coincide when the result seeds Newton.
pub fn composite_guess(
    reduced: &ReducedSolution,
    params: &ModelParams,
) -> Result<CartesianProfile, Error> {
    if params.lambda() != reduced.lambda() {
        return Err(Error::InvalidParameter(format!(
            "reduced flow solved at lambda = {} but params carry lambda = {}",
            reduced.lambda(),
            params.lambda()
        )));
    }
    let mesh = Mesh::from_nodes(reduced.x().to_vec())?;
    let eps2 = params.eps() * params.eps();
    let n = mesh.len();
    let mut u = Vec::with_capacity(n);
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let (w1, _) = critical_manifold_point(reduced.phi1()[i], reduced.phi2()[i], params.lambda());
        let r = 1.0 - eps2 * w1;
        if r <= 0.0 {
            return Err(Error::DegenerateRadius {
                node: i,
                radius_sq: r * r,
            });
        }
        let (sin, cos) = reduced.phi1()[i].sin_cos();
        u.push(r * cos);
        v.push(r * sin);
    }
    let bc = BoundaryConditions::default();
    u[0] = bc.left.0;
    v[0] = bc.left.1;
    u[n - 1] = bc.right.0;
    v[n - 1] = bc.right.1;
    CartesianProfile::new(mesh, u, v, *params, bc)
}

/// Closed form of the shape integral `int sin^2(2 phi1) dx` along the reduced
/// heteroclinic: `(4/3) (1 + lambda + lambda^2) / (1 + lambda)`.
///
/// Grouped as one quotient so rational values round once; integer mass ratios
/// hit the correctly rounded fraction (e.g. exactly `28.0 / 9.0` at 2).
pub fn reduced_energy_integral(lambda: f64) -> f64 {
    4.0 * (1.0 + lambda + lambda * lambda) / (3.0 * (1.0 + lambda))
}

/// The same shape integral by composite Simpson quadrature of a solved
/// reduced profile; agrees with [`reduced_energy_integral`] to quadrature
/// accuracy and serves as its independent cross-check.
pub fn reduced_energy_quadrature(reduced: &ReducedSolution) -> f64 {
    let vals: Vec<f64> = reduced
        .phi1()
        .iter()
        .map(|&p| {
            let s = (2.0 * p).sin();
            s * s
        })
        .collect();
    simpson(&vals, reduced.h())
}

/// Limit of energy/eps as the threshold is approached:
/// `(1 + lambda + lambda^2) / (3 (1 + lambda))`, one quarter of the shape
/// integral.
pub fn sigma_ratio_limit(lambda: f64) -> f64 {
    reduced_energy_integral(lambda) / 4.0
}
