//! Machine-checkable diagnostics over computed profiles: conserved-quantity
//! defects, qualitative shape booleans, distance to the critical manifold,
//! weighted convergence-rate deviations, and the energy asymptotics.
//!
//! Reports never throw on defective profiles — a bad wall produces a report
//! with failing booleans, not an error. The float-exact forms of the shape
//! checks are unattainable in the far tails, where the amplitudes saturate
//! (`u == 1.0` for many consecutive nodes once `1 - u` drops below roundoff),
//! so the booleans are defined with explicit roundoff slack plus, where the
//! property would otherwise be vacuous, a strict witness in the core.

use crate::error::Error;
use crate::mesh::{fit_slope, simpson};
use crate::model::{hamiltonian_residual, ModelParams};
use crate::profile::{slowfast_lenient, CartesianProfile};
use crate::singular::{
    critical_manifold_point, default_reduced_mesh, sigma_ratio_limit, solve_reduced,
    ReducedSolution,
};
use crate::solver::{solve_heteroclinic, SolverConfig};
use rayon::prelude::*;
use serde::Serialize;

/// Roundoff slack for the unit-disk bound.
const DISK_SLACK: f64 = 1e-14;
/// Roundoff slack for the angular-velocity sign check.
const PHI2_SLACK: f64 = 1e-13;
/// Roundoff slack for the monotonicity checks. Converged walls saturate at
/// the far-field values, where consecutive nodes flicker by one ulp around
/// 1, so "monotone" has to mean monotone modulo that flicker.
const MONOTONE_SLACK: f64 = 1e-13;

/// Weighted sup-norm distances between a finite-eps profile and the reduced
/// flow, one per slow-fast component. The weights decay in both tails at the
/// linearization rates (squared for the radial pair), so each value bounds
/// the deviation uniformly relative to the expected tail profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedDeviations {
    pub phi1: f64,
    pub phi2: f64,
    pub w1: f64,
    pub w2: f64,
}

/// Everything the suite measures on one profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    /// Sup over nodes of the slow-scaled first-integral residual.
    pub hamiltonian_sup: f64,
    /// `u` non-decreasing nodewise (strictness saturates in the tails).
    pub monotone_u: bool,
    /// `v` non-increasing nodewise.
    pub monotone_v: bool,
    /// `u^2 + v^2` within the closed unit disk at interior nodes, strictly
    /// inside somewhere (distinguishes a wall from an on-circle equilibrium).
    pub disk_bound: bool,
    /// `arctan(v/u)` non-increasing nodewise.
    pub angle_decreasing: bool,
    /// Angular velocity non-positive at interior nodes and strictly negative
    /// somewhere.
    pub phi2_negative: bool,
    /// Sup of `|u(x) - v(-x)|` when the mass ratio is exactly 1; absent
    /// otherwise.
    pub symmetry_defect: Option<f64>,
    /// Sup over the interior 90% of the mesh of the distance between the
    /// extracted radial component and its critical-manifold value.
    pub manifold_distance: f64,
    pub weighted_deviations: WeightedDeviations,
    /// Wall energy of the profile.
    pub energy: f64,
    /// Energy divided by eps; converges to [`sigma_ratio_limit`].
    pub sigma_ratio: f64,
}

impl ValidationReport {
    /// All qualitative shape checks at once.
    pub fn shape_ok(&self) -> bool {
        self.monotone_u
            && self.monotone_v
            && self.disk_bound
            && self.angle_decreasing
            && self.phi2_negative
    }
}

/// Wall energy by composite Simpson quadrature of the slow-frame integrand.
pub fn energy_of_profile(profile: &CartesianProfile) -> f64 {
    let params = profile.params();
    let eps = params.eps();
    let l2 = params.lambda() * params.lambda();
    let du = profile.du_dx();
    let dv = profile.dv_dx();
    let values: Vec<f64> = profile
        .u()
        .iter()
        .zip(profile.v())
        .zip(du.iter().zip(&dv))
        .map(|((&u, &v), (&du, &dv))| {
            let defect = 1.0 - u * u - v * v;
            0.5 * eps * (l2 * du * du + dv * dv)
                + defect * defect / (4.0 * eps)
                + 0.5 * eps * u * u * v * v
        })
        .collect();
    simpson(&values, profile.mesh().h())
}

/// Weighted sup-norm deviations of a profile from the reduced flow, per
/// component. The comparison window is `|x| <= L_common - 2` for the angular
/// pair and the interior 90% of that for the radial pair, whose extraction
/// divides by eps^2 and amplifies tail roundoff.
pub fn weighted_deviation(
    profile: &CartesianProfile,
    reduced: &ReducedSolution,
) -> WeightedDeviations {
    debug_assert_eq!(
        profile.params().lambda(),
        reduced.lambda(),
        "deviation compares objects at the same mass ratio"
    );
    let sf = slowfast_lenient(profile);
    let lambda = profile.params().lambda();
    let phi_window = profile.mesh().half_length().min(reduced.half_length()) - 2.0;
    let w_window = 0.9 * phi_window;
    let mut dev = WeightedDeviations {
        phi1: 0.0,
        phi2: 0.0,
        w1: 0.0,
        w2: 0.0,
    };
    for (i, &x) in profile.mesh().nodes().iter().enumerate() {
        if x.abs() > phi_window {
            continue;
        }
        let weight = (x / lambda).exp().min((-x).exp());
        let phi1_ref = reduced.sample_phi1(x);
        let phi2_ref = reduced.sample_phi2(x);
        dev.phi1 = dev.phi1.max((sf.phi1[i] - phi1_ref).abs() / weight);
        dev.phi2 = dev.phi2.max((sf.phi2[i] - phi2_ref).abs() / weight);
        if x.abs() <= w_window {
            let weight_sq = weight * weight;
            let (w1_ref, _) = critical_manifold_point(phi1_ref, phi2_ref, lambda);
            dev.w1 = dev.w1.max((sf.w1[i] - w1_ref).abs() / weight_sq);
            dev.w2 = dev.w2.max(sf.w2[i].abs() / weight_sq);
        }
    }
    dev
}

/// Evaluate the full report against a caller-supplied reduced solution.
/// Total: defective profiles yield failing booleans, never errors.
pub fn validate_profile_with(
    profile: &CartesianProfile,
    reduced: &ReducedSolution,
) -> ValidationReport {
    let params = profile.params();
    let n = profile.mesh().len();
    let nodes = profile.mesh().nodes();

    let hamiltonian_sup = profile
        .states()
        .iter()
        .map(|state| hamiltonian_residual(state, params).abs())
        .fold(0.0, f64::max);

    let monotone_u = profile.u().windows(2).all(|w| w[1] >= w[0] - MONOTONE_SLACK);
    let monotone_v = profile.v().windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);

    let radius_sq =
        |i: usize| profile.u()[i] * profile.u()[i] + profile.v()[i] * profile.v()[i];
    let disk_bound = (1..n - 1).all(|i| radius_sq(i) <= 1.0 + DISK_SLACK)
        && (1..n - 1).any(|i| radius_sq(i) < 1.0 - DISK_SLACK);

    let sf = slowfast_lenient(profile);
    let angle_decreasing = sf.phi1.windows(2).all(|w| w[1] <= w[0] + MONOTONE_SLACK);
    let phi2_interior = &sf.phi2[1..n - 1];
    let phi2_negative = phi2_interior.iter().all(|&p| p <= PHI2_SLACK)
        && phi2_interior.iter().any(|&p| p < 0.0);

    let symmetry_defect = (params.lambda() == 1.0).then(|| {
        (0..n)
            .map(|i| (profile.u()[i] - profile.v()[n - 1 - i]).abs())
            .fold(0.0, f64::max)
    });

    let manifold_window = 0.9 * profile.mesh().half_length();
    let manifold_distance = (0..n)
        .filter(|&i| nodes[i].abs() <= manifold_window)
        .map(|i| {
            let (w1_ref, _) = critical_manifold_point(sf.phi1[i], sf.phi2[i], params.lambda());
            (sf.w1[i] - w1_ref).abs()
        })
        .fold(0.0, f64::max);

    let energy = energy_of_profile(profile);

    ValidationReport {
        hamiltonian_sup,
        monotone_u,
        monotone_v,
        disk_bound,
        angle_decreasing,
        phi2_negative,
        symmetry_defect,
        manifold_distance,
        weighted_deviations: weighted_deviation(profile, reduced),
        energy,
        sigma_ratio: energy / params.eps(),
    }
}

/// [`validate_profile_with`] against the default reduced solution for the
/// profile's mass ratio. Fails only if that companion solve does.
pub fn validate_profile(profile: &CartesianProfile) -> Result<ValidationReport, Error> {
    let lambda = profile.params().lambda();
    let (half, n) = default_reduced_mesh(lambda);
    let reduced = solve_reduced(lambda, half, n)?;
    Ok(validate_profile_with(profile, &reduced))
}

/// Convergence-rate measurements across a decreasing eps ladder.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateStudy {
    pub lambda: f64,
    pub eps_list: Vec<f64>,
    pub deviations: Vec<WeightedDeviations>,
    pub sigma_ratios: Vec<f64>,
    pub sigma_limit: f64,
    /// Log-log slopes of the deviations against eps; `NaN` when the ladder
    /// has fewer than two rungs.
    pub slope_phi1: f64,
    pub slope_phi2: f64,
    pub slope_w1: f64,
    /// Successive ratios `D_phi1(eps_{k+1}) / D_phi1(eps_k)`.
    pub phi1_halving_ratios: Vec<f64>,
    /// Successive shrink factors of `|sigma_ratio - sigma_limit|`.
    pub sigma_shrink_factors: Vec<f64>,
}

/// Solve the wall at every eps in the (strictly decreasing) ladder, measure
/// deviations and energy ratios, and fit the convergence rates. Rungs solve
/// concurrently; results are assembled in ladder order, so the study is
/// deterministic.
pub fn rate_study(
    lambda: f64,
    eps_list: &[f64],
    config: &SolverConfig,
) -> Result<RateStudy, Error> {
    rate_study_detailed(lambda, eps_list, config).map(|(study, _)| study)
}

/// [`rate_study`] keeping the solved profile of every rung (for persistence).
pub fn rate_study_detailed(
    lambda: f64,
    eps_list: &[f64],
    config: &SolverConfig,
) -> Result<(RateStudy, Vec<CartesianProfile>), Error> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter(
            "rate study needs at least one eps".into(),
        ));
    }
    if !eps_list.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter(
            "eps ladder must be strictly decreasing".into(),
        ));
    }
    let (half, n) = default_reduced_mesh(lambda);
    let reduced = solve_reduced(lambda, half, n)?;

    let solved: Vec<Result<(CartesianProfile, WeightedDeviations, f64), Error>> = eps_list
        .par_iter()
        .map(|&eps| {
            let params = ModelParams::from_eps(lambda, eps)?;
            let profile = solve_heteroclinic(&params, config)?;
            let dev = weighted_deviation(&profile, &reduced);
            let sigma = energy_of_profile(&profile) / eps;
            Ok((profile, dev, sigma))
        })
        .collect();

    let mut profiles = Vec::with_capacity(eps_list.len());
    let mut deviations = Vec::with_capacity(eps_list.len());
    let mut sigma_ratios = Vec::with_capacity(eps_list.len());
    for result in solved {
        let (profile, dev, sigma) = result?;
        profiles.push(profile);
        deviations.push(dev);
        sigma_ratios.push(sigma);
    }

    let sigma_limit = sigma_ratio_limit(lambda);
    let ln_eps: Vec<f64> = eps_list.iter().map(|e| e.ln()).collect();
    let slope_of = |pick: fn(&WeightedDeviations) -> f64| -> f64 {
        if eps_list.len() < 2 {
            return f64::NAN;
        }
        let ln_dev: Vec<f64> = deviations.iter().map(|d| pick(d).ln()).collect();
        fit_slope(&ln_eps, &ln_dev)
    };
    let slope_phi1 = slope_of(|d| d.phi1);
    let slope_phi2 = slope_of(|d| d.phi2);
    let slope_w1 = slope_of(|d| d.w1);
    let phi1_halving_ratios = deviations
        .windows(2)
        .map(|w| w[1].phi1 / w[0].phi1)
        .collect();
    let sigma_shrink_factors = sigma_ratios
        .windows(2)
        .map(|w| (w[0] - sigma_limit).abs() / (w[1] - sigma_limit).abs())
        .collect();

    let study = RateStudy {
        lambda,
        eps_list: eps_list.to_vec(),
        deviations,
        sigma_ratios,
        sigma_limit,
        slope_phi1,
        slope_phi2,
        slope_w1,
        phi1_halving_ratios,
        sigma_shrink_factors,
    };
    Ok((study, profiles))
}
