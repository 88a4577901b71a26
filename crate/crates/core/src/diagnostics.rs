//! Post-processing of solver runs: the boundary shift `ϑ₀`, the
//! centre-of-mass law, truncated perturbation energies, field errors against
//! the Barenblatt solution and boundary rate fits.
//!
//! Time derivatives of the flow map are taken from the equation of motion,
//! `η_tt = −η_t + F(η)` and `η_ttt = −η_tt + DF(η) η_t`, rather than by
//! differencing stored time levels.

use crate::affine::CorrectionTrajectory;
use crate::error::Result;
use crate::num::{fit_rate, log_uniform_resample, quad_weighted, RateFit};
use crate::solver1d::{nodal_derivative, FlowState1D, Grid1D, RunOutput1D};
use crate::solver3d::{FlowState3D, Grid3D, RunOutput3D};
use crate::state::{FlowState, Scheme};

/// Number of log-uniform samples used for boundary rate fits.
pub const RESAMPLE_COUNT: usize = 64;

/// `ϑ₀ = M⁻¹ ∫ ρ̄₀ (w₀ + w₁) dx`, the limit of the centre of mass, by exact
/// integration of the piecewise-linear interpolant of `w₀ + w₁` against `ρ̄₀`.
pub fn shift_theta0(state0: &FlowState1D, grid: &Grid1D) -> Result<f64> {
    let p = &grid.profile;
    let x = &grid.nodes;
    let f: Vec<f64> = (0..x.len())
        .map(|i| (state0.eta[i] - x[i]) + (state0.eta_t[i] - x[i] / p.k))
        .collect();
    let mut moment = 0.0;
    let mut mass = 0.0;
    for j in 0..x.len() - 1 {
        let (a, b) = (x[j], x[j + 1]);
        let tol = 1e-15 * (b - a);
        let left = quad_weighted(|y| p.initial_density(y) * (b - y) / (b - a), (a, b), tol)?;
        let right = quad_weighted(|y| p.initial_density(y) * (y - a) / (b - a), (a, b), tol)?;
        moment += left * f[j] + right * f[j + 1];
        mass += left + right;
    }
    Ok(moment / mass)
}

/// Deviation of the discrete centre of mass from `ϑ(0) + (1 − e^{−t}) ϑ'(0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CenterOfMassReport {
    pub theta_initial: f64,
    pub theta_rate: f64,
    pub deviation: Vec<(f64, f64)>,
    pub max_deviation: f64,
}

pub fn center_of_mass_law(out: &RunOutput1D, grid: &Grid1D) -> CenterOfMassReport {
    let s0 = &out.snapshots[0];
    let total = grid.total_mass();
    let weighted = |v: &[f64]| grid.masses.iter().zip(v).map(|(m, x)| m * x).sum::<f64>() / total;
    let theta_initial = weighted(&s0.eta);
    let theta_rate = weighted(&s0.eta_t);
    let deviation: Vec<(f64, f64)> = out
        .center_of_mass
        .iter()
        .map(|&(t, th)| (t, th - theta_initial + (-t).exp_m1() * theta_rate))
        .collect();
    let max_deviation = deviation.iter().fold(0.0f64, |m, d| m.max(d.1.abs()));
    CenterOfMassReport {
        theta_initial,
        theta_rate,
        deviation,
        max_deviation,
    }
}

/// Truncated perturbation energies at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub t: f64,
    /// `𝓔_j` for `j = 0, 1, 2`.
    pub e: [f64; 3],
    pub e01: f64,
    pub e02: f64,
    pub e11: f64,
    /// `∫ ρ̄₀ w²` (`∫ r⁴ ρ̄₀ ζ²` in 3D), the part of `𝓔₀` left out of `𝓔̃`.
    pub l2: f64,
    pub total: f64,
}

impl EnergyReport {
    /// `𝓔̃ = 𝓔 − ∫ ρ̄₀ w²`.
    pub fn tilde_total(&self) -> f64 {
        (self.total - self.l2).max(0.0)
    }

    fn assemble(t: f64, e: [f64; 3], e01: f64, e02: f64, e11: f64, l2: f64) -> Self {
        Self {
            t,
            e,
            e01,
            e02,
            e11,
            l2,
            total: e.iter().sum::<f64>() + e01 + e02 + e11,
        }
    }
}

fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(a, b)| 0.5 * (a[1] - a[0]) * (b[0] + b[1]))
        .sum()
}

/// `(η, η_t, η_tt, η_ttt)` at the nodes.
fn flow_derivatives<S: Scheme>(scheme: &S, state: &FlowState) -> Result<[Vec<f64>; 4]> {
    let n = state.len();
    let mut acc = vec![0.0; n];
    scheme.acceleration(&state.eta, state.t, &mut acc)?;
    let tt: Vec<f64> = acc.iter().zip(&state.eta_t).map(|(a, v)| a - v).collect();
    let mut jv = vec![0.0; n];
    scheme.acceleration_jvp(&state.eta, &state.eta_t, &mut jv);
    let ttt = jv.iter().zip(&tt).map(|(j, a)| j - a).collect();
    Ok([state.eta.clone(), state.eta_t.clone(), tt, ttt])
}

/// Energies of `w = η − x η̃_x` in one dimension:
///
/// ```text
/// 𝓔_j   = (1+t)^{2j} ∫ ρ̄₀ (∂ₜʲw)² + ρ̄₀^γ (∂ₜʲw_x)² + (1+t) ρ̄₀ (∂ₜʲw_t)²
/// 𝓔_j,i = (1+t)^{2j} ∫ ρ̄₀^{1+(i−1)(γ−1)} (∂ₜʲ∂ₓⁱw)² + ρ̄₀^{γ+i(γ−1)} (∂ₜʲ∂ₓⁱw_x)²
/// ```
///
/// for `j ≤ 2` and `j + i ≤ 2`.
pub fn energies(state: &FlowState1D, correction: &CorrectionTrajectory, grid: &Grid1D) -> Result<EnergyReport> {
    let t = state.t;
    let g = grid.profile.gamma;
    let x = &grid.nodes;
    let lam = correction.tilde_eta_x_derivatives(t)?;
    let eta = flow_derivatives(grid, state)?;
    let w: Vec<Vec<f64>> = (0..4)
        .map(|j| eta[j].iter().zip(x).map(|(e, xi)| e - xi * lam[j]).collect())
        .collect();
    let rho = &grid.rho0;
    let s = 1.0 + t;
    let pw = |p: f64| -> Vec<f64> { rho.iter().map(|r| r.powf(p)).collect() };
    let (w1, wg) = (pw(1.0), pw(g));
    let integral = |weight: &[f64], f: &[f64]| {
        let y: Vec<f64> = weight.iter().zip(f).map(|(a, b)| a * b * b).collect();
        trapezoid(x, &y)
    };
    let mut e = [0.0; 3];
    for (j, ej) in e.iter_mut().enumerate() {
        let wx = nodal_derivative(&w[j], x);
        *ej = s.powi(2 * j as i32)
            * (integral(&w1, &w[j]) + integral(&wg, &wx) + s * integral(&w1, &w[j + 1]));
    }
    let e_ji = |j: usize, i: usize| {
        let mut d = w[j].clone();
        for _ in 0..i {
            d = nodal_derivative(&d, x);
        }
        let d1 = nodal_derivative(&d, x);
        let a = pw(1.0 + (i as f64 - 1.0) * (g - 1.0));
        let b = pw(g + i as f64 * (g - 1.0));
        s.powi(2 * j as i32) * (integral(&a, &d) + integral(&b, &d1))
    };
    let l2 = integral(&w1, &w[0]);
    Ok(EnergyReport::assemble(t, e, e_ji(0, 1), e_ji(0, 2), e_ji(1, 1), l2))
}

/// Value at `r = 0` of `f/r` for a field with `f(0) = 0`, from the quadratic
/// through the origin and the first two nodes.
fn origin_slope(f: &[f64], r: &[f64]) -> f64 {
    let (r1, r2) = (r[1], r[2]);
    (f[1] * r2 * r2 - f[2] * r1 * r1) / (r1 * r2 * (r2 - r1))
}

/// Energies of `ζ = η/r − η̃_r` for spherically symmetric flow:
///
/// ```text
/// 𝓔_j   = (1+t)^{2j} ∫ r⁴ρ̄₀ (∂ₜʲζ)² + r²ρ̄₀^γ |∂ₜʲ(ζ, rζ_r)|² + (1+t) r⁴ρ̄₀ (∂ₜʲζ_t)²
/// 𝓔_j,i = (1+t)^{2j} ∫ r²ρ̄₀^{1+(i−1)(γ−1)} (∂ₜʲ∂ᵣⁱζ)² + r⁴ρ̄₀^{γ+i(γ−1)} (∂ₜʲ∂ᵣⁱζ_r)²
/// ```
pub fn energies3(state: &FlowState3D, correction: &CorrectionTrajectory, grid: &Grid3D) -> Result<EnergyReport> {
    let t = state.t;
    let g = grid.profile.gamma;
    let r = &grid.nodes;
    let lam = correction.tilde_eta_x_derivatives(t)?;
    let eta = flow_derivatives(grid, state)?;
    let z: Vec<Vec<f64>> = (0..4)
        .map(|j| {
            let mut q: Vec<f64> = eta[j].iter().zip(r).map(|(e, ri)| e / ri - lam[j]).collect();
            q[0] = origin_slope(&eta[j], r) - lam[j];
            q
        })
        .collect();
    let rho = &grid.rho0;
    let s = 1.0 + t;
    let pw = |p: f64, m: i32| -> Vec<f64> { rho.iter().zip(r).map(|(a, ri)| a.powf(p) * ri.powi(m)).collect() };
    let integral = |weight: &[f64], f: &[f64]| {
        let y: Vec<f64> = weight.iter().zip(f).map(|(a, b)| a * b * b).collect();
        trapezoid(r, &y)
    };
    let (r4, r2g) = (pw(1.0, 4), pw(g, 2));
    let mut e = [0.0; 3];
    for (j, ej) in e.iter_mut().enumerate() {
        let rz: Vec<f64> = nodal_derivative(&z[j], r).iter().zip(r).map(|(d, ri)| d * ri).collect();
        *ej = s.powi(2 * j as i32)
            * (integral(&r4, &z[j]) + integral(&r2g, &z[j]) + integral(&r2g, &rz) + s * integral(&r4, &z[j + 1]));
    }
    let e_ji = |j: usize, i: usize| {
        let mut d = z[j].clone();
        for _ in 0..i {
            d = nodal_derivative(&d, r);
        }
        let d1 = nodal_derivative(&d, r);
        let a = pw(1.0 + (i as f64 - 1.0) * (g - 1.0), 2);
        let b = pw(g + i as f64 * (g - 1.0), 4);
        s.powi(2 * j as i32) * (integral(&a, &d) + integral(&b, &d1))
    };
    let l2 = integral(&r4, &z[0]);
    Ok(EnergyReport::assemble(t, e, e_ji(0, 1), e_ji(0, 2), e_ji(1, 1), l2))
}

/// Weighted sup-norm errors against the Barenblatt solution along its own
/// particle paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldErrors {
    pub t: f64,
    /// `max |ρ(η) − ρ̄(η̄)| / (ρ̄₀ (1+t)^{−2/(γ+1)})`, or `(1+t)^{−4/(3γ−1)}` in 3D.
    pub density: f64,
    /// `max |u(η) − ū(η̄)| (1+t)`, divided by `r` in 3D.
    pub velocity: f64,
}

/// Field errors in one dimension. The weight `ρ̄₀(x)` cancels against the
/// common factor of both densities, so boundary nodes are included.
pub fn field_errors(state: &FlowState1D, grid: &Grid1D) -> FieldErrors {
    let p = &grid.profile;
    let s = 1.0 + state.t;
    let bar_x = s.powf(1.0 / p.k);
    let bar_xt = s.powf(1.0 / p.k - 1.0) / p.k;
    let strain = nodal_derivative(&state.eta, &grid.nodes);
    let scale = s.powf(2.0 / (p.gamma + 1.0));
    let density = strain.iter().fold(0.0f64, |m, d| m.max((1.0 / d - 1.0 / bar_x).abs() * scale));
    let velocity = state
        .eta_t
        .iter()
        .zip(&grid.nodes)
        .fold(0.0f64, |m, (v, x)| m.max((v - x * bar_xt).abs() * s));
    FieldErrors {
        t: state.t,
        density,
        velocity,
    }
}

/// Field errors for spherically symmetric flow, with density
/// `r²ρ̄₀/(η²η_r)` against `ρ̄₀ (1+t)^{−3/k}`.
pub fn field_errors3(state: &FlowState3D, grid: &Grid3D) -> FieldErrors {
    let p = &grid.profile;
    let s = 1.0 + state.t;
    let bar_r = s.powf(1.0 / p.k);
    let bar_rt = s.powf(1.0 / p.k - 1.0) / p.k;
    let q = crate::solver3d::relative_position(state, grid);
    let strain = crate::solver3d::radial_strain(state, grid);
    let scale = s.powf(4.0 / (3.0 * p.gamma - 1.0));
    let density = q
        .iter()
        .zip(&strain)
        .fold(0.0f64, |m, (q, d)| m.max((1.0 / (q * q * d) - bar_r.powi(-3)).abs() * scale));
    let velocity = state
        .eta_t
        .iter()
        .zip(&grid.nodes)
        .skip(1)
        .fold(0.0f64, |m, (v, r)| m.max((v / r - bar_rt).abs() * s));
    FieldErrors {
        t: state.t,
        density,
        velocity,
    }
}

/// Long-time behaviour of a run.
#[derive(Debug, Clone)]
pub struct AsymptoticsReport {
    pub theta0: f64,
    /// `(t, x₊ − x̄₊ − ϑ₀)` in 1D, `(t, R − R̄)` in 3D, at every step.
    pub boundary_residuals: Vec<(f64, f64)>,
    /// `(t, x₋ − x̄₋ − ϑ₀)`; empty in 3D.
    pub lower_residuals: Vec<(f64, f64)>,
    pub field_errors: Vec<FieldErrors>,
    pub energies: Vec<EnergyReport>,
    /// `[max(10², t_end/100), t_end]`.
    pub window: (f64, f64),
    pub boundary_fit: Option<RateFit>,
    pub density_fit: Option<RateFit>,
    pub velocity_fit: Option<RateFit>,
    pub energy_fit: Option<RateFit>,
}

/// Fit window `[max(10², t_end/100), t_end]`.
pub fn fit_window(t_end: f64) -> (f64, f64) {
    ((t_end / 100.0).max(1e2), t_end)
}

/// Fit of `|v|` over the window after log-uniform resampling; `None` when the
/// run is too short or the series touches zero.
pub fn resampled_fit(series: &[(f64, f64)], window: (f64, f64)) -> Option<RateFit> {
    if !(window.1 > window.0) {
        return None;
    }
    let abs: Vec<(f64, f64)> = series.iter().map(|&(t, v)| (t, v.abs())).collect();
    let samples = log_uniform_resample(&abs, window, RESAMPLE_COUNT).ok()?;
    fit_rate(&samples, window).ok()
}

fn snapshot_fit(series: impl Iterator<Item = (f64, f64)>, window: (f64, f64)) -> Option<RateFit> {
    let v: Vec<(f64, f64)> = series.collect();
    fit_rate(&v, window).ok()
}

fn finish(
    theta0: f64,
    boundary_residuals: Vec<(f64, f64)>,
    lower_residuals: Vec<(f64, f64)>,
    field_errors: Vec<FieldErrors>,
    energies: Vec<EnergyReport>,
    t_end: f64,
) -> AsymptoticsReport {
    let window = fit_window(t_end);
    let boundary_fit = resampled_fit(&boundary_residuals, window);
    let density_fit = snapshot_fit(field_errors.iter().map(|f| (f.t, f.density)), window);
    let velocity_fit = snapshot_fit(field_errors.iter().map(|f| (f.t, f.velocity)), window);
    let energy_fit = snapshot_fit(energies.iter().map(|e| (e.t, e.total)), window);
    AsymptoticsReport {
        theta0,
        boundary_residuals,
        lower_residuals,
        field_errors,
        energies,
        window,
        boundary_fit,
        density_fit,
        velocity_fit,
        energy_fit,
    }
}

/// Boundary residuals, field errors and energies of a one-dimensional run.
pub fn boundary_asymptotics(
    out: &RunOutput1D,
    grid: &Grid1D,
    correction: &CorrectionTrajectory,
    theta0: f64,
) -> Result<AsymptoticsReport> {
    let p = &grid.profile;
    let upper = out
        .boundary
        .iter()
        .map(|&(t, _, xp)| (t, xp - p.boundary_radius(t) - theta0))
        .collect();
    let lower = out
        .boundary
        .iter()
        .map(|&(t, xm, _)| (t, xm + p.boundary_radius(t) - theta0))
        .collect();
    let fields = out.snapshots.iter().map(|s| field_errors(s, grid)).collect();
    let energy = out
        .snapshots
        .iter()
        .map(|s| energies(s, correction, grid))
        .collect::<Result<Vec<_>>>()?;
    let t_end = out.snapshots.last().map_or(0.0, |s| s.t);
    Ok(finish(theta0, upper, lower, fields, energy, t_end))
}

/// Radius residual `R − R̄`, field errors and energies of a spherical run.
pub fn radius_asymptotics(
    out: &RunOutput3D,
    grid: &Grid3D,
    correction: &CorrectionTrajectory,
) -> Result<AsymptoticsReport> {
    let p = &grid.profile;
    let residual = out
        .radius
        .iter()
        .map(|&(t, r)| (t, r - p.boundary_radius(t)))
        .collect();
    let fields = out.snapshots.iter().map(|s| field_errors3(s, grid)).collect();
    let energy = out
        .snapshots
        .iter()
        .map(|s| energies3(s, correction, grid))
        .collect::<Result<Vec<_>>>()?;
    let t_end = out.snapshots.last().map_or(0.0, |s| s.t);
    Ok(finish(0.0, residual, Vec::new(), fields, energy, t_end))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::integrate_correction;
    use crate::perturbation::PerturbationSpec;
    use crate::solver1d::{init_state, run};
    use crate::solver3d::{init_state3, run3};
    use crate::state::{RunOptions, SnapshotLadder};
    use crate::{BarenblattProfile, Dim};

    fn setup(n: usize, t_end: f64) -> (Grid1D, CorrectionTrajectory) {
        let p = BarenblattProfile::solve(2.0, 1.0, Dim::One).unwrap();
        (
            Grid1D::uniform(&p, n).unwrap(),
            integrate_correction(2.0, Dim::One, t_end, 1e-12).unwrap(),
        )
    }

    #[test]
    fn theta0_simple_cases() {
        let (g, c) = setup(100, 1.0);
        let s = init_state(&g, &c, &PerturbationSpec::Zero).unwrap();
        assert!(shift_theta0(&s, &g).unwrap().abs() < 1e-15);
        let s = init_state(&g, &c, &PerturbationSpec::Translation { epsilon: 0.01 }).unwrap();
        assert!((shift_theta0(&s, &g).unwrap() - 0.01).abs() < 1e-15);
        let even = PerturbationSpec::Bump { epsilon: 0.01, center: 0.0, width: 0.4 };
        let s = init_state(&g, &c, &even).unwrap();
        assert!(shift_theta0(&s, &g).unwrap() > 0.0);
        let s = init_state(&g, &c, &PerturbationSpec::Kick { v0: 0.05 }).unwrap();
        assert!((shift_theta0(&s, &g).unwrap() - 0.05).abs() < 1e-14);
    }

    #[test]
    fn theta0_converges_under_refinement() {
        let bump = PerturbationSpec::Bump { epsilon: 0.01, center: 0.8, width: 0.3 };
        let theta = |n| {
            let (g, c) = setup(n, 1.0);
            shift_theta0(&init_state(&g, &c, &bump).unwrap(), &g).unwrap()
        };
        let (a, b, c) = (theta(100), theta(200), theta(400));
        let ratio = (a - b) / (b - c);
        assert!((ratio - 4.0).abs() < 0.5, "{ratio}");
        assert!((b - c).abs() < 1e-6);
    }

    #[test]
    fn center_of_mass_for_translation_and_zero() {
        let (g, c) = setup(64, 3.0);
        for (pert, theta) in [
            (PerturbationSpec::Zero, 0.0),
            (PerturbationSpec::Translation { epsilon: 0.01 }, 0.01),
        ] {
            let out = run(&g, &c, &pert, 3.0, &RunOptions::default()).unwrap();
            let law = center_of_mass_law(&out, &g);
            assert!(law.max_deviation < 1e-13);
            assert!((law.theta_initial - theta).abs() < 1e-15);
        }
    }

    #[test]
    fn energies_vanish_for_barenblatt_start() {
        let (g, c) = setup(100, 1.0);
        let s = init_state(&g, &c, &PerturbationSpec::Zero).unwrap();
        let e = energies(&s, &c, &g).unwrap();
        assert!(e.total < 1e-25, "{e:?}");
    }

    #[test]
    fn translation_energy_has_no_gradient_part() {
        let (g, c) = setup(100, 1.0);
        let eps = 0.01;
        let s = init_state(&g, &c, &PerturbationSpec::Translation { epsilon: eps }).unwrap();
        let e = energies(&s, &c, &g).unwrap();
        assert!(e.e01 < 1e-28 && e.e02 < 1e-28 && e.e11 < 1e-28);
        assert!((e.l2 - eps * eps * g.total_mass()).abs() < 1e-3 * eps * eps);
        assert!(e.e[1] < 1e-25 && e.e[2] < 1e-25);
        assert!(e.total >= e.l2);
    }

    #[test]
    fn energies_nonnegative_on_bump_run() {
        let (g, c) = setup(100, 20.0);
        let pert = PerturbationSpec::Bump { epsilon: 0.005, center: 0.8, width: 0.3 };
        let out = run(&g, &c, &pert, 20.0, &RunOptions::default()).unwrap();
        for s in &out.snapshots {
            let e = energies(s, &c, &g).unwrap();
            assert!(e.e.iter().all(|v| *v >= 0.0) && e.e01 >= 0.0 && e.e02 >= 0.0 && e.e11 >= 0.0);
            assert!(e.total > 0.0);
        }
    }

    #[test]
    fn time_derivatives_match_differences() {
        let (g, c) = setup(50, 2.0);
        let pert = PerturbationSpec::Bump { epsilon: 0.01, center: 0.3, width: 0.5 };
        let mut s = init_state(&g, &c, &pert).unwrap();
        let d = flow_derivatives(&g, &s).unwrap();
        let dt = 1e-4;
        let mut acc = vec![0.0; s.len()];
        let before = d[2].clone();
        crate::state::split_step(&g, &mut s, dt, &mut acc).unwrap();
        let after = flow_derivatives(&g, &s).unwrap();
        for i in 0..s.len() {
            let fd = (after[2][i] - before[i]) / dt;
            assert!((fd - 0.5 * (d[3][i] + after[3][i])).abs() < 1e-5 * (1.0 + fd.abs()), "{i}");
        }
    }

    #[test]
    fn field_errors_of_zero_run_follow_h() {
        let (g, c) = setup(200, 50.0);
        let out = run(&g, &c, &PerturbationSpec::Zero, 50.0, &RunOptions::default()).unwrap();
        for s in out.snapshots.iter().skip(1) {
            let f = field_errors(s, &g);
            let t = s.t;
            let lam = c.tilde_eta_x(t).unwrap();
            let bar = c.bar_eta_x(t);
            let want = c.h(t).unwrap() / (lam * bar) * (1.0 + t).powf(2.0 / 3.0);
            assert!((f.density / want - 1.0).abs() < 1e-3, "{t}");
            let want_u = g.radius() * c.h_t(t).unwrap().abs() * (1.0 + t);
            assert!((f.velocity - want_u).abs() < 5e-3 * want_u + 1e-4, "{t}: {} {want_u}", f.velocity);
            // velocity error at the centre node is |w_t(0)|
            assert!(s.eta_t[100].abs() < 1e-13);
        }
    }

    #[test]
    fn translation_residual_matches_h() {
        let t_end = 400.0;
        let (g, c) = setup(200, t_end);
        let eps = 0.01;
        let pert = PerturbationSpec::Translation { epsilon: eps };
        let out = run(&g, &c, &pert, t_end, &RunOptions::default()).unwrap();
        let th = shift_theta0(&out.snapshots[0], &g).unwrap();
        let rep = boundary_asymptotics(&out, &g, &c, th).unwrap();
        for &(t, r) in rep.boundary_residuals.iter().step_by(50) {
            let want = g.radius() * c.h(t).unwrap();
            assert!((r - want).abs() < 2e-3 * want + 1e-12, "{t}: {r} {want}");
        }
        assert_eq!(rep.window, (100.0, 400.0));
        let fit = rep.boundary_fit.unwrap();
        assert!(fit.exponent < -0.4 && fit.exponent > -0.7, "{fit:?}");
    }

    #[test]
    fn short_runs_have_no_fits() {
        let (g, c) = setup(32, 5.0);
        let out = run(&g, &c, &PerturbationSpec::Zero, 5.0, &RunOptions::default()).unwrap();
        let rep = boundary_asymptotics(&out, &g, &c, 0.0).unwrap();
        assert!(rep.boundary_fit.is_none() && rep.density_fit.is_none());
        assert_eq!(rep.field_errors.len(), out.snapshots.len());
    }

    #[test]
    fn spherical_reports() {
        let p = BarenblattProfile::solve(2.0, 1.0, Dim::Three).unwrap();
        let g = Grid3D::uniform(&p, 100).unwrap();
        let c = integrate_correction(2.0, Dim::Three, 30.0, 1e-12).unwrap();
        let s0 = init_state3(&g, &c, &PerturbationSpec::Zero).unwrap();
        assert!(energies3(&s0, &c, &g).unwrap().total < 1e-25);
        let dil = PerturbationSpec::Translation { epsilon: 0.01 };
        let s0 = init_state3(&g, &c, &dil).unwrap();
        let e = energies3(&s0, &c, &g).unwrap();
        assert!(e.e01 < 1e-26 && e.l2 > 0.0);
        let opts = RunOptions { ladder: SnapshotLadder::Linear { every: 10.0 }, ..Default::default() };
        let out = run3(&g, &c, &dil, 30.0, &opts).unwrap();
        let rep = radius_asymptotics(&out, &g, &c).unwrap();
        assert_eq!(rep.theta0, 0.0);
        assert!(rep.lower_residuals.is_empty());
        let last = rep.boundary_residuals.last().unwrap();
        // dilation plus the correction push R above the Barenblatt radius
        assert!(last.1 > 0.0 && last.1 < 0.2 * g.radius());
        let f = field_errors3(&out.snapshots[0], &g);
        assert!(f.velocity < 1e-12 && f.density > 0.0);
    }
}
