//! Mesh-resolved wall profiles in Cartesian and slow-fast coordinates.

use crate::error::Error;
use crate::mesh::{derivative, Mesh};
use crate::model::{cartesian_to_slowfast_state, CartesianState, Frame, ModelParams};

/// Dirichlet values pinned at the two mesh ends, as `(u, v)` pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConditions {
    pub left: (f64, f64),
    pub right: (f64, f64),
}

impl Default for BoundaryConditions {
    /// The wall data: pure-v state on the left, pure-u state on the right.
    fn default() -> Self {
        Self {
            left: (0.0, 1.0),
            right: (1.0, 0.0),
        }
    }
}

/// A wall profile sampled on a mesh, in the slow frame.
///
/// Only the amplitudes are stored; derivatives and the slow-fast companion
/// quantities are recomputed from them with the module-standard stencils, so
/// a profile has exactly one source of truth.
#[derive(Debug, Clone, PartialEq)]
pub struct CartesianProfile {
    mesh: Mesh,
    u: Vec<f64>,
    v: Vec<f64>,
    params: ModelParams,
    center: f64,
    bc: BoundaryConditions,
}

impl CartesianProfile {
    pub fn new(
        mesh: Mesh,
        u: Vec<f64>,
        v: Vec<f64>,
        params: ModelParams,
        bc: BoundaryConditions,
    ) -> Result<Self, Error> {
        if u.len() != mesh.len() || v.len() != mesh.len() {
            return Err(Error::ShapeMismatch(format!(
                "mesh has {} nodes but u has {} and v has {}",
                mesh.len(),
                u.len(),
                v.len()
            )));
        }
        let mut profile = Self {
            mesh,
            u,
            v,
            params,
            center: f64::NAN,
            bc,
        };
        profile.center = profile.crossing().unwrap_or(f64::NAN);
        Ok(profile)
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// The `x` at which `u` and `v` cross, tracked at construction time.
    /// `NaN` when the profile has no unique crossing.
    pub fn center(&self) -> f64 {
        self.center
    }

    pub fn bc(&self) -> &BoundaryConditions {
        &self.bc
    }

    /// Same amplitudes under different parameters (continuation rungs).
    pub fn with_params(&self, params: ModelParams) -> Self {
        let mut out = self.clone();
        out.params = params;
        out
    }

    pub fn du_dx(&self) -> Vec<f64> {
        derivative(&self.u, self.mesh.h())
    }

    pub fn dv_dx(&self) -> Vec<f64> {
        derivative(&self.v, self.mesh.h())
    }

    /// Pointwise states with slow-frame derivative components.
    pub fn states(&self) -> Vec<CartesianState> {
        let du = self.du_dx();
        let dv = self.dv_dx();
        (0..self.mesh.len())
            .map(|i| CartesianState::new(self.u[i], self.v[i], du[i], dv[i], Frame::SlowX))
            .collect()
    }

    /// Locate the unique zero of `u - v` by linear interpolation.
    ///
    /// Counts exact zero nodes and sign flips between neighbors; anything but
    /// exactly one crossing is an error.
    pub fn crossing(&self) -> Result<f64, Error> {
        let n = self.mesh.len();
        let d: Vec<f64> = self.u.iter().zip(&self.v).map(|(u, v)| u - v).collect();
        let mut crossings = Vec::new();
        for (i, &di) in d.iter().enumerate() {
            if di == 0.0 {
                crossings.push(self.mesh.nodes()[i]);
            }
        }
        for i in 0..n - 1 {
            if d[i] * d[i + 1] < 0.0 {
                let x = self.mesh.nodes()[i] + self.mesh.h() * d[i] / (d[i] - d[i + 1]);
                crossings.push(x);
            }
        }
        if crossings.len() != 1 {
            return Err(Error::MultipleCrossings {
                count: crossings.len(),
            });
        }
        Ok(crossings[0])
    }
}

/// A profile in the slow-fast variables. `eps = 0` marks a singular-limit
/// object (a lift of the reduced flow), which no finite-eps conversion
/// accepts or produces.
#[derive(Debug, Clone, PartialEq)]
pub struct SlowFastProfile {
    pub x: Vec<f64>,
    pub w1: Vec<f64>,
    pub w2: Vec<f64>,
    pub phi1: Vec<f64>,
    pub phi2: Vec<f64>,
    pub lambda: f64,
    pub eps: f64,
}

/// Tolerated roundoff excursion of extracted angles outside `[0, pi/2]`.
const ANGLE_SLACK: f64 = 1e-12;

pub(crate) fn clamped_angle(v: f64, u: f64) -> Option<f64> {
    let phi = v.atan2(u);
    let top = std::f64::consts::FRAC_PI_2;
    if phi < -ANGLE_SLACK || phi > top + ANGLE_SLACK {
        return None;
    }
    Some(phi.clamp(0.0, top))
}

/// Extract the slow-fast representation of a profile.
///
/// Amplitude quantities (`phi1`, `w1`) come from the nodal values; the
/// derivative pair (`phi2`, `w2 = eps * dw1/dx`) from finite differences on
/// the mesh, since profiles store no derivative fields.
pub fn cartesian_to_slowfast(profile: &CartesianProfile) -> Result<SlowFastProfile, Error> {
    let params = profile.params();
    let eps = params.eps();
    let n = profile.mesh().len();
    let mut w1 = Vec::with_capacity(n);
    let mut phi1 = Vec::with_capacity(n);
    for i in 0..n {
        let (u, v) = (profile.u()[i], profile.v()[i]);
        let r_sq = u * u + v * v;
        if r_sq <= f64::MIN_POSITIVE {
            return Err(Error::DegenerateRadius {
                node: i,
                radius_sq: r_sq,
            });
        }
        let phi = clamped_angle(v, u).ok_or(Error::AngleOutOfRange {
            node: i,
            angle: v.atan2(u),
        })?;
        phi1.push(phi);
        w1.push((1.0 - r_sq.sqrt()) / (eps * eps));
    }
    let h = profile.mesh().h();
    let phi2 = derivative(&phi1, h);
    let w2: Vec<f64> = derivative(&w1, h).iter().map(|d| eps * d).collect();
    Ok(SlowFastProfile {
        x: profile.mesh().nodes().to_vec(),
        w1,
        w2,
        phi1,
        phi2,
        lambda: params.lambda(),
        eps,
    })
}

/// Convert a finite-eps slow-fast profile back to amplitudes.
///
/// Only the nodal `(u, v)` are reconstructed (profiles store nothing else);
/// boundary values are taken from the converted end states.
pub fn slowfast_to_cartesian_profile(
    profile: &SlowFastProfile,
    params: &ModelParams,
) -> Result<CartesianProfile, Error> {
    if profile.eps != 0.0 && profile.eps != params.eps() {
        return Err(Error::InvalidParameter(format!(
            "profile was extracted at eps = {} but params carry eps = {}",
            profile.eps,
            params.eps()
        )));
    }
    let mesh = Mesh::from_nodes(profile.x.clone())?;
    let mut u = Vec::with_capacity(mesh.len());
    let mut v = Vec::with_capacity(mesh.len());
    for i in 0..mesh.len() {
        let state = crate::model::slowfast_to_cartesian(
            &crate::model::SlowFastState::new(
                profile.w1[i],
                profile.w2[i],
                profile.phi1[i],
                profile.phi2[i],
            ),
            params,
        )
        .map_err(|err| match err {
            Error::DegenerateRadius { radius_sq, .. } => {
                Error::DegenerateRadius { node: i, radius_sq }
            }
            other => other,
        })?;
        u.push(state.u);
        v.push(state.v);
    }
    let n = mesh.len();
    let bc = BoundaryConditions {
        left: (u[0], v[0]),
        right: (u[n - 1], v[n - 1]),
    };
    CartesianProfile::new(mesh, u, v, *params, bc)
}

/// Slow-fast extraction that never fails: angles are clamped into `[0, pi/2]`
/// outright and a degenerate radius just produces the limiting `w1`.
/// Diagnostics use this so they can report on malformed profiles instead of
/// refusing them.
pub(crate) fn slowfast_lenient(profile: &CartesianProfile) -> SlowFastProfile {
    let params = profile.params();
    let eps = params.eps();
    let n = profile.mesh().len();
    let mut w1 = Vec::with_capacity(n);
    let mut phi1 = Vec::with_capacity(n);
    for i in 0..n {
        let (u, v) = (profile.u()[i], profile.v()[i]);
        let r = (u * u + v * v).sqrt();
        phi1.push(v.atan2(u).clamp(0.0, std::f64::consts::FRAC_PI_2));
        w1.push((1.0 - r) / (eps * eps));
    }
    let h = profile.mesh().h();
    let phi2 = derivative(&phi1, h);
    let w2: Vec<f64> = derivative(&w1, h).iter().map(|d| eps * d).collect();
    SlowFastProfile {
        x: profile.mesh().nodes().to_vec(),
        w1,
        w2,
        phi1,
        phi2,
        lambda: params.lambda(),
        eps,
    }
}

/// Pointwise slow-fast states of a profile via the exact derivative inversion
/// (used by tests; the profile-level extraction path is [`cartesian_to_slowfast`]).
pub fn pointwise_slowfast(
    profile: &CartesianProfile,
) -> Result<Vec<crate::model::SlowFastState>, Error> {
    profile
        .states()
        .iter()
        .map(|s| cartesian_to_slowfast_state(s, profile.params()))
        .collect()
}
