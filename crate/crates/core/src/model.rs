//! The coupled wall equations, their first integral, the slow-fast change of
//! variables, and linearization data at the two rest states.
//!
//! Two frames appear throughout. The *fast* frame uses the original spatial
//! variable `z`; the *slow* frame uses `x = eps * z`, which is the natural
//! scale of the wall core when the segregation strength `coupling = 1 + eps^2`
//! sits just above threshold. States carry a frame tag so that derivative
//! components are never mixed up between the two.

use crate::error::Error;
use nalgebra::Matrix4;
use serde::Serialize;

/// Wall parameters: mass ratio `lambda >= 1` and segregation strength.
///
/// `coupling` and `eps` are locked together by `coupling = 1 + eps^2`; the two
/// constructors derive one from the other so the relation holds to machine
/// precision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    lambda: f64,
    coupling: f64,
    eps: f64,
}

impl ModelParams {
    pub fn from_eps(lambda: f64, eps: f64) -> Result<Self, Error> {
        if !lambda.is_finite() || lambda < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda must be finite and >= 1, got {lambda}"
            )));
        }
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "eps must be finite and > 0, got {eps}"
            )));
        }
        Ok(Self {
            lambda,
            coupling: 1.0 + eps * eps,
            eps,
        })
    }

    /// Rebuild parameters from previously stored fields.
    ///
    /// Persistence keeps `coupling` and `eps` side by side; rederiving one
    /// from the other would lose the last bit through the square root, so
    /// both are accepted verbatim after a consistency check.
    pub fn from_raw_parts(lambda: f64, coupling: f64, eps: f64) -> Result<Self, Error> {
        let params = Self::from_eps(lambda, eps)?;
        if !coupling.is_finite() || (coupling - (1.0 + eps * eps)).abs() > 1e-12 * coupling {
            return Err(Error::InvalidParameter(format!(
                "coupling {coupling} is inconsistent with eps {eps}"
            )));
        }
        Ok(Self { coupling, ..params })
    }

    pub fn from_coupling(lambda: f64, coupling: f64) -> Result<Self, Error> {
        if !coupling.is_finite() || coupling <= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "coupling must be finite and > 1, got {coupling}"
            )));
        }
        let eps = (coupling - 1.0).sqrt();
        let mut params = Self::from_eps(lambda, eps)?;
        // Keep the caller's coupling verbatim; eps = sqrt(coupling - 1) is the
        // derived quantity in this direction.
        params.coupling = coupling;
        Ok(params)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }
}

/// Spatial frame a Cartesian state's derivatives refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Frame {
    /// Original variable `z`; derivatives are d/dz.
    FastZ,
    /// Stretched variable `x = eps * z`; derivatives are d/dx.
    SlowX,
}

/// Pointwise wall data in the component amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianState {
    pub u: f64,
    pub v: f64,
    pub du: f64,
    pub dv: f64,
    pub frame: Frame,
}

impl CartesianState {
    pub fn new(u: f64, v: f64, du: f64, dv: f64, frame: Frame) -> Self {
        Self { u, v, du, dv, frame }
    }
}

/// Pointwise data in the slow-fast variables `(w1, w2, phi1, phi2)`.
///
/// `phi1` is the polar angle of `(u, v)`, `phi2` its x-derivative; `w1`
/// measures the radial defect through `r = 1 - eps^2 * w1`, and
/// `w2 = eps * dw1/dx` is its fast companion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowFastState {
    pub w1: f64,
    pub w2: f64,
    pub phi1: f64,
    pub phi2: f64,
}

impl SlowFastState {
    pub fn new(w1: f64, w2: f64, phi1: f64, phi2: f64) -> Self {
        Self { w1, w2, phi1, phi2 }
    }
}

fn cubic_terms(u: f64, v: f64, coupling: f64) -> (f64, f64) {
    (
        u * (u * u - 1.0 + coupling * v * v),
        v * (v * v - 1.0 + coupling * u * u),
    )
}

/// Second derivatives `(u'', v'')` prescribed by the wall equations in the
/// state's own frame.
pub fn rhs_cartesian(state: &CartesianState, params: &ModelParams) -> (f64, f64) {
    let (fu, fv) = cubic_terms(state.u, state.v, params.coupling);
    let l2 = params.lambda * params.lambda;
    match state.frame {
        Frame::FastZ => (fu / l2, fv),
        Frame::SlowX => {
            let e2 = params.eps * params.eps;
            (fu / (l2 * e2), fv / e2)
        }
    }
}

/// Defect of the first integral of the wall equations.
///
/// In the fast frame this is the conserved density itself,
/// `lambda^2 du^2/2 + dv^2/2 - (1 - u^2 - v^2)^2/4 - (coupling-1)/2 * u^2 v^2`,
/// which vanishes identically along connecting orbits. In the slow frame the
/// same quantity is rescaled by `2/eps^2` so that its size stays O(1) as the
/// threshold is approached:
/// `lambda^2 du^2 + dv^2 - (1 - u^2 - v^2)^2/(2 eps^2) - u^2 v^2`.
pub fn hamiltonian_residual(state: &CartesianState, params: &ModelParams) -> f64 {
    let l2 = params.lambda * params.lambda;
    let pot = 1.0 - state.u * state.u - state.v * state.v;
    let uv2 = state.u * state.u * state.v * state.v;
    match state.frame {
        Frame::FastZ => {
            0.5 * l2 * state.du * state.du + 0.5 * state.dv * state.dv - 0.25 * pot * pot
                - 0.5 * (params.coupling - 1.0) * uv2
        }
        Frame::SlowX => {
            let e2 = params.eps * params.eps;
            l2 * state.du * state.du + state.dv * state.dv - pot * pot / (2.0 * e2) - uv2
        }
    }
}

/// Map a slow-fast state to the Cartesian one (slow frame).
///
/// Fails when the encoded radius `1 - eps^2 w1` is not positive, since the
/// polar chart does not reach such points.
pub fn slowfast_to_cartesian(
    state: &SlowFastState,
    params: &ModelParams,
) -> Result<CartesianState, Error> {
    let eps = params.eps;
    let r = 1.0 - eps * eps * state.w1;
    if r <= 0.0 {
        return Err(Error::DegenerateRadius {
            node: 0,
            radius_sq: r * r,
        });
    }
    let (sin, cos) = state.phi1.sin_cos();
    Ok(CartesianState {
        u: r * cos,
        v: r * sin,
        du: -eps * state.w2 * cos - r * state.phi2 * sin,
        dv: -eps * state.w2 * sin + r * state.phi2 * cos,
        frame: Frame::SlowX,
    })
}

/// Invert [`slowfast_to_cartesian`] at a single point.
///
/// Accepts either frame (fast-frame derivatives are rescaled by `1/eps`).
/// Fails where the radius degenerates, since the angle is then undefined.
pub fn cartesian_to_slowfast_state(
    state: &CartesianState,
    params: &ModelParams,
) -> Result<SlowFastState, Error> {
    let r_sq = state.u * state.u + state.v * state.v;
    if r_sq <= f64::MIN_POSITIVE {
        return Err(Error::DegenerateRadius {
            node: 0,
            radius_sq: r_sq,
        });
    }
    let eps = params.eps;
    let (du, dv) = match state.frame {
        Frame::SlowX => (state.du, state.dv),
        Frame::FastZ => (state.du / eps, state.dv / eps),
    };
    let r = r_sq.sqrt();
    let phi1 = state.v.atan2(state.u);
    let (sin, cos) = phi1.sin_cos();
    Ok(SlowFastState {
        w1: (1.0 - r) / (eps * eps),
        w2: -(du * cos + dv * sin) / eps,
        phi1,
        phi2: (dv * cos - du * sin) / r,
    })
}

/// The slow-fast vector field, d/dx of `(w1, w2, phi1, phi2)`.
///
/// The first two rows carry the `1/eps` of the fast radial dynamics; the
/// angular pair is slow.
pub fn slowfast_rhs(state: &SlowFastState, params: &ModelParams) -> Result<[f64; 4], Error> {
    let eps = params.eps;
    if eps <= 0.0 {
        return Err(Error::EpsilonZero);
    }
    let lambda = params.lambda;
    let inv_l2 = 1.0 / (lambda * lambda);
    let (sin, cos) = state.phi1.sin_cos();
    let (c2, s2) = (cos * cos, sin * sin);
    let r = 1.0 - eps * eps * state.w1;
    let poly = eps * eps * state.w1 * state.w1 - 2.0 * state.w1;
    let bracket = 1.0 + (inv_l2 - 1.0) * c2;
    let f2 = -r * state.phi2 * state.phi2 - r * poly * bracket
        - r * r * r * (inv_l2 + 1.0) * s2 * c2;
    let f4 = 2.0 * eps * state.w2 * state.phi2 / r
        + (1.0 - inv_l2) * poly * sin * cos
        + r * r * (sin * cos * c2 - inv_l2 * cos * s2 * sin);
    Ok([state.w2 / eps, f2 / eps, state.phi2, f4])
}

/// Relative step used by the finite-difference Jacobian: cube root of machine
/// epsilon, the usual optimum for central differences.
pub const JACOBIAN_STEP_SCALE: f64 = 6.055454452393343e-6;

fn fd_jacobian<F>(f: F, state: &SlowFastState, scale: f64) -> Matrix4<f64>
where
    F: Fn(&SlowFastState) -> [f64; 4],
{
    let base = [state.w1, state.w2, state.phi1, state.phi2];
    let mut jac = Matrix4::zeros();
    for (j, &xj) in base.iter().enumerate() {
        let h = scale * xj.abs().max(1.0);
        let mut plus = base;
        let mut minus = base;
        plus[j] = xj + h;
        minus[j] = xj - h;
        // Evaluate at the actually representable abscissae.
        let span = plus[j] - minus[j];
        let fp = f(&SlowFastState::new(plus[0], plus[1], plus[2], plus[3]));
        let fm = f(&SlowFastState::new(minus[0], minus[1], minus[2], minus[3]));
        for i in 0..4 {
            jac[(i, j)] = (fp[i] - fm[i]) / span;
        }
    }
    jac
}

/// Finite-difference Jacobian of [`slowfast_rhs`] at a state.
pub fn linearize_slowfast(state: &SlowFastState, params: &ModelParams) -> Result<Matrix4<f64>, Error> {
    linearize_slowfast_with_step(state, params, JACOBIAN_STEP_SCALE)
}

/// Same as [`linearize_slowfast`] with an explicit relative differencing step.
pub fn linearize_slowfast_with_step(
    state: &SlowFastState,
    params: &ModelParams,
    scale: f64,
) -> Result<Matrix4<f64>, Error> {
    if params.eps <= 0.0 {
        return Err(Error::EpsilonZero);
    }
    let f = |s: &SlowFastState| slowfast_rhs(s, params).expect("eps > 0 checked above");
    Ok(fd_jacobian(f, state, scale))
}

/// Which rest state of the slow-fast field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EquilibriumSide {
    /// `(0, 0, pi/2, 0)`: the pure-v state the wall leaves as x -> -inf.
    Left,
    /// `(0, 0, 0, 0)`: the pure-u state it reaches as x -> +inf.
    Right,
}

/// Closed-form linearization data at a rest state.
///
/// `eigenvalues` lists the fast pair first, then the slow pair, each `+` before
/// `-`; `eigendirections[k]` is the eigenvector of `eigenvalues[k]`, normalized
/// so its last nonzero coordinate block ends in 1.
#[derive(Debug, Clone, Serialize)]
pub struct EquilibriumSpec {
    pub side: EquilibriumSide,
    pub state: [f64; 4],
    pub eigenvalues: [f64; 4],
    pub eigendirections: [[f64; 4]; 4],
}

/// Eigenvalues and eigendirections of the slow-fast field at a rest state.
pub fn analytic_spectrum(side: EquilibriumSide, params: &ModelParams) -> EquilibriumSpec {
    let lambda = params.lambda;
    let eps = params.eps;
    let sqrt2 = std::f64::consts::SQRT_2;
    match side {
        EquilibriumSide::Left => {
            let fast = sqrt2 / eps;
            let slow = 1.0 / lambda;
            EquilibriumSpec {
                side,
                state: [0.0, 0.0, std::f64::consts::FRAC_PI_2, 0.0],
                eigenvalues: [fast, -fast, slow, -slow],
                eigendirections: [
                    [1.0 / sqrt2, 1.0, 0.0, 0.0],
                    [-1.0 / sqrt2, 1.0, 0.0, 0.0],
                    [0.0, 0.0, lambda, 1.0],
                    [0.0, 0.0, -lambda, 1.0],
                ],
            }
        }
        EquilibriumSide::Right => {
            let fast = sqrt2 / (lambda * eps);
            EquilibriumSpec {
                side,
                state: [0.0, 0.0, 0.0, 0.0],
                eigenvalues: [fast, -fast, 1.0, -1.0],
                eigendirections: [
                    [lambda / sqrt2, 1.0, 0.0, 0.0],
                    [-lambda / sqrt2, 1.0, 0.0, 0.0],
                    [0.0, 0.0, 1.0, 1.0],
                    [0.0, 0.0, -1.0, 1.0],
                ],
            }
        }
    }
}

/// Real spectrum of a 4x4 matrix, ascending. Imaginary parts are expected to
/// be negligible (the matrices of interest have real spectra).
pub fn real_spectrum(matrix: &Matrix4<f64>) -> [f64; 4] {
    let eigs = matrix.complex_eigenvalues();
    let mut out: Vec<f64> = eigs.iter().map(|c| c.re).collect();
    out.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    [out[0], out[1], out[2], out[3]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn params(lambda: f64, eps: f64) -> ModelParams {
        ModelParams::from_eps(lambda, eps).unwrap()
    }

    #[test]
    fn coupling_and_eps_stay_locked() {
        let p = params(2.0, 0.2);
        assert_eq!(p.coupling(), 1.0 + 0.2 * 0.2);
        let q = ModelParams::from_coupling(2.0, 1.04).unwrap();
        assert_eq!(q.coupling(), 1.04);
        assert_abs_diff_eq!(q.eps() * q.eps(), 0.04, epsilon = 1e-16);
    }

    #[test]
    fn params_reject_bad_values() {
        assert!(ModelParams::from_eps(0.5, 0.1).is_err());
        assert!(ModelParams::from_eps(1.0, 0.0).is_err());
        assert!(ModelParams::from_eps(1.0, -0.1).is_err());
        assert!(ModelParams::from_coupling(1.0, 1.0).is_err());
        assert!(ModelParams::from_coupling(1.0, f64::NAN).is_err());
    }

    #[test]
    fn raw_parts_round_trip_is_bitwise() {
        let p = params(2.0, 0.2);
        let q = ModelParams::from_raw_parts(p.lambda(), p.coupling(), p.eps()).unwrap();
        assert_eq!(q.lambda(), p.lambda());
        assert_eq!(q.coupling(), p.coupling());
        assert_eq!(q.eps(), p.eps());
        // Inconsistent pairs are refused.
        assert!(ModelParams::from_raw_parts(2.0, 1.1, 0.2).is_err());
    }

    #[test]
    fn rhs_vanishes_at_rest_states() {
        for &(lambda, eps) in &[(1.0, 0.1), (2.0, 0.2), (4.0, 0.05)] {
            let p = params(lambda, eps);
            for frame in [Frame::FastZ, Frame::SlowX] {
                for &(u, v) in &[(0.0, 1.0), (1.0, 0.0)] {
                    let (ddu, ddv) = rhs_cartesian(&CartesianState::new(u, v, 0.0, 0.0, frame), &p);
                    assert_eq!(ddu, 0.0);
                    assert_eq!(ddv, 0.0);
                }
            }
        }
    }

    #[test]
    fn rhs_matches_hand_value() {
        // u = v = 1, lambda = 1, coupling = 2 in the fast frame:
        // u'' = (1 - 1 + 2)/1 = 2, v'' = 2.
        let p = ModelParams::from_coupling(1.0, 2.0).unwrap();
        let s = CartesianState::new(1.0, 1.0, 0.0, 0.0, Frame::FastZ);
        let (ddu, ddv) = rhs_cartesian(&s, &p);
        assert_abs_diff_eq!(ddu, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ddv, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn slow_frame_rhs_rescales_fast_frame() {
        let p = params(1.5, 0.2);
        let e2 = p.eps() * p.eps();
        let fast = CartesianState::new(0.4, 0.7, 0.0, 0.0, Frame::FastZ);
        let slow = CartesianState::new(0.4, 0.7, 0.0, 0.0, Frame::SlowX);
        let (fu, fv) = rhs_cartesian(&fast, &p);
        let (su, sv) = rhs_cartesian(&slow, &p);
        assert_relative_eq!(su, fu / e2, max_relative = 1e-15);
        assert_relative_eq!(sv, fv / e2, max_relative = 1e-15);
    }

    #[test]
    fn hamiltonian_zero_at_rest_states() {
        for &(lambda, eps) in &[(1.0, 0.05), (2.0, 0.3), (3.0, 0.5)] {
            let p = params(lambda, eps);
            for frame in [Frame::FastZ, Frame::SlowX] {
                for &(u, v) in &[(0.0, 1.0), (1.0, 0.0)] {
                    let h = hamiltonian_residual(&CartesianState::new(u, v, 0.0, 0.0, frame), &p);
                    assert_eq!(h, 0.0);
                }
            }
        }
    }

    #[test]
    fn hamiltonian_hand_values() {
        // (1,1,0,0), lambda = 1, coupling = 2: -(1-2)^2/4 - (1/2)*1 = -0.75.
        let p = ModelParams::from_coupling(1.0, 2.0).unwrap();
        let h = hamiltonian_residual(&CartesianState::new(1.0, 1.0, 0.0, 0.0, Frame::FastZ), &p);
        assert_abs_diff_eq!(h, -0.75, epsilon = 1e-15);

        // On the unit circle the quartic term vanishes; only the cross term
        // remains: -((coupling-1)/2) * u^2 v^2 = -0.02 * 0.25 = -0.005.
        let p = ModelParams::from_coupling(1.0, 1.04).unwrap();
        let r = FRAC_PI_4.cos();
        let h = hamiltonian_residual(&CartesianState::new(r, r, 0.0, 0.0, Frame::FastZ), &p);
        assert_abs_diff_eq!(h, -0.005, epsilon = 1e-15);
    }

    #[test]
    fn slowfast_to_cartesian_hand_value() {
        // (w1, w2, phi1, phi2) = (0.25, 0, pi/4, -0.5), eps = 0.2:
        // r = 0.99, u = v = 0.99/sqrt(2), du = +0.99*0.5/sqrt(2).
        let p = params(1.0, 0.2);
        let s = SlowFastState::new(0.25, 0.0, FRAC_PI_4, -0.5);
        let c = slowfast_to_cartesian(&s, &p).unwrap();
        let inv_sqrt2 = 0.5_f64.sqrt();
        assert_relative_eq!(c.u, 0.99 * inv_sqrt2, max_relative = 1e-14);
        assert_relative_eq!(c.v, 0.99 * inv_sqrt2, max_relative = 1e-14);
        assert_relative_eq!(c.du, 0.99 * 0.5 * inv_sqrt2, max_relative = 1e-14);
        assert_relative_eq!(c.dv, -0.99 * 0.5 * inv_sqrt2, max_relative = 1e-14);
        assert_eq!(c.frame, Frame::SlowX);
    }

    #[test]
    fn slowfast_to_cartesian_rejects_collapsed_radius() {
        // eps^2 w1 = 0.25 * 5 > 1 leaves the polar chart.
        let p = params(1.0, 0.5);
        let s = SlowFastState::new(5.0, 0.0, FRAC_PI_4, 0.0);
        match slowfast_to_cartesian(&s, &p) {
            Err(Error::DegenerateRadius { .. }) => {}
            other => panic!("expected degenerate radius, got {other:?}"),
        }
    }

    #[test]
    fn radial_defect_hand_value() {
        // u = v = 0.48, eps = 0.2: r = sqrt(0.4608), w1 = (1 - r)/0.04.
        let p = params(1.0, 0.2);
        let s = CartesianState::new(0.48, 0.48, 0.0, 0.0, Frame::SlowX);
        let sf = cartesian_to_slowfast_state(&s, &p).unwrap();
        let expected = (1.0 - 0.4608_f64.sqrt()) / 0.04;
        assert_relative_eq!(sf.w1, expected, max_relative = 1e-14);
        assert_relative_eq!(sf.phi1, FRAC_PI_4, max_relative = 1e-14);
    }

    #[test]
    fn degenerate_radius_is_rejected() {
        let p = params(1.0, 0.2);
        let s = CartesianState::new(0.0, 0.0, 0.1, 0.1, Frame::SlowX);
        assert!(matches!(
            cartesian_to_slowfast_state(&s, &p),
            Err(Error::DegenerateRadius { .. })
        ));
    }

    #[test]
    fn slowfast_rhs_hand_value() {
        // At (0, 0, pi/4, 0) with lambda = 1, eps = 0.1 only the cubic angular
        // potential acts: row2 = -(1 + 1) * (1/2)(1/2) / eps = -5; row4 = 0.
        let p = params(1.0, 0.1);
        let f = slowfast_rhs(&SlowFastState::new(0.0, 0.0, FRAC_PI_4, 0.0), &p).unwrap();
        assert_abs_diff_eq!(f[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f[1], -5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f[2], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(f[3], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn slowfast_rhs_vanishes_at_rest_states() {
        for &(lambda, eps) in &[(1.0, 0.1), (2.0, 0.2), (4.0, 0.4)] {
            let p = params(lambda, eps);
            for phi in [0.0, FRAC_PI_2] {
                let f = slowfast_rhs(&SlowFastState::new(0.0, 0.0, phi, 0.0), &p).unwrap();
                for fi in f {
                    // cos(pi/2) rounds to ~6e-17, so "zero" means roundoff here.
                    assert_abs_diff_eq!(fi, 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn fast_rows_collapse_on_the_critical_manifold() {
        // On the graph w1 = W(phi1, phi2), w2 = 0 the leading part of the fast
        // rows cancels, leaving O(eps) remainders.
        for &lambda in &[1.0, 2.0] {
            for &phi in &[0.3, FRAC_PI_4, 1.2] {
                let (w1, w2) = crate::singular::critical_manifold_point(phi, 0.0, lambda);
                for &eps in &[0.1, 0.05, 0.025] {
                    let p = params(lambda, eps);
                    let f = slowfast_rhs(&SlowFastState::new(w1, w2, phi, 0.0), &p).unwrap();
                    assert_eq!(f[0], 0.0);
                    assert!(
                        f[1].abs() <= 20.0 * eps,
                        "fast row {} too large at eps {eps}",
                        f[1]
                    );
                }
            }
        }
    }

    #[test]
    fn fd_jacobian_of_constant_field_is_zero() {
        let f = |_: &SlowFastState| [3.0, -1.0, 0.5, 2.0];
        let j = fd_jacobian(f, &SlowFastState::new(0.3, -0.2, 0.9, 0.1), JACOBIAN_STEP_SCALE);
        assert_eq!(j, Matrix4::zeros());
    }

    #[test]
    fn numerical_spectrum_matches_analytic_at_rest_states() {
        for &lambda in &[1.0, 2.0] {
            for &eps in &[0.05, 0.1, 0.2, 0.3, 0.4, 0.5] {
                let p = params(lambda, eps);
                for side in [EquilibriumSide::Left, EquilibriumSide::Right] {
                    let spec = analytic_spectrum(side, &p);
                    let state = SlowFastState::new(
                        spec.state[0],
                        spec.state[1],
                        spec.state[2],
                        spec.state[3],
                    );
                    let jac = linearize_slowfast(&state, &p).unwrap();
                    let got = real_spectrum(&jac);
                    let mut want = spec.eigenvalues;
                    want.sort_by(|a, b| a.partial_cmp(b).unwrap());
                    for (g, w) in got.iter().zip(want.iter()) {
                        assert_relative_eq!(g, w, max_relative = 1e-6);
                    }
                }
            }
        }
    }

    #[test]
    fn analytic_directions_are_eigenvectors() {
        // J * d = mu * d checked against the differenced Jacobian.
        for &lambda in &[1.0, 2.0, 3.0] {
            let p = params(lambda, 0.1);
            for side in [EquilibriumSide::Left, EquilibriumSide::Right] {
                let spec = analytic_spectrum(side, &p);
                let state =
                    SlowFastState::new(spec.state[0], spec.state[1], spec.state[2], spec.state[3]);
                let jac = linearize_slowfast(&state, &p).unwrap();
                for (mu, dir) in spec.eigenvalues.iter().zip(spec.eigendirections.iter()) {
                    let d = nalgebra::Vector4::new(dir[0], dir[1], dir[2], dir[3]);
                    let jd = jac * d;
                    let scale = mu.abs().max(1.0);
                    for i in 0..4 {
                        assert_abs_diff_eq!(jd[i], mu * d[i], epsilon = 1e-5 * scale);
                    }
                }
            }
        }
    }

    #[test]
    fn spectrum_hand_value() {
        // Left rest state at lambda = 2, eps = 0.1.
        let p = params(2.0, 0.1);
        let spec = analytic_spectrum(EquilibriumSide::Left, &p);
        assert_relative_eq!(spec.eigenvalues[0], 14.142135623730951, max_relative = 1e-15);
        assert_relative_eq!(spec.eigenvalues[1], -14.142135623730951, max_relative = 1e-15);
        assert_abs_diff_eq!(spec.eigenvalues[2], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(spec.eigenvalues[3], -0.5, epsilon = 1e-15);
    }

    #[test]
    fn eigenvalues_pair_to_zero_sums() {
        for &lambda in &[1.0, 1.7, 4.0] {
            for &eps in &[0.05, 0.3] {
                let p = params(lambda, eps);
                for side in [EquilibriumSide::Left, EquilibriumSide::Right] {
                    let spec = analytic_spectrum(side, &p);
                    assert_abs_diff_eq!(
                        spec.eigenvalues[0] + spec.eigenvalues[1],
                        0.0,
                        epsilon = 1e-12
                    );
                    assert_abs_diff_eq!(
                        spec.eigenvalues[2] + spec.eigenvalues[3],
                        0.0,
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn slowfast_round_trip_is_identity(
            w1 in -5.0..5.0f64,
            w2 in -5.0..5.0f64,
            phi1 in 0.01..(FRAC_PI_2 - 0.01),
            phi2 in -2.0..2.0f64,
            eps in 0.05..0.5f64,
            lambda in 1.0..4.0f64,
        ) {
            // Keep r = 1 - eps^2 w1 safely positive.
            prop_assume!(1.0 - eps * eps * w1 > 0.1);
            let p = ModelParams::from_eps(lambda, eps).unwrap();
            let s = SlowFastState::new(w1, w2, phi1, phi2);
            let c = slowfast_to_cartesian(&s, &p).unwrap();
            let back = cartesian_to_slowfast_state(&c, &p).unwrap();
            prop_assert!((back.w1 - w1).abs() <= 1e-9 * w1.abs().max(1.0));
            prop_assert!((back.w2 - w2).abs() <= 1e-10 * w2.abs().max(1.0));
            prop_assert!((back.phi1 - phi1).abs() <= 1e-12);
            prop_assert!((back.phi2 - phi2).abs() <= 1e-11 * phi2.abs().max(1.0));
        }

        #[test]
        fn hamiltonian_scaling_between_frames(
            u in 0.05..0.95f64,
            v in 0.05..0.95f64,
            dux in -0.5..0.5f64,
            dvx in -0.5..0.5f64,
            eps in 0.05..0.5f64,
        ) {
            // The slow-frame value is 2/eps^2 times the fast-frame value of the
            // same physical state.
            let p = ModelParams::from_eps(1.3, eps).unwrap();
            let slow = CartesianState::new(u, v, dux, dvx, Frame::SlowX);
            let fast = CartesianState::new(u, v, eps * dux, eps * dvx, Frame::FastZ);
            let hs = hamiltonian_residual(&slow, &p);
            let hf = hamiltonian_residual(&fast, &p);
            let scale = hs.abs().max(hf.abs()).max(1.0);
            prop_assert!((hs - 2.0 / (eps * eps) * hf).abs() <= 1e-9 * scale);
        }
    }
}
