//! The acceptance suite: ten self-contained checks of the profile, the ODE
//! families, the two solvers and the long-time diagnostics.
//!
//! Every check is independent, so a caller may run them in any order or in
//! parallel. [`run_all`] runs them sequentially.

use std::fmt;
use std::str::FromStr;

use crate::affine::{
    barenblatt_affine, conserved_quantity, exact_affine_flow, integrate_affine, integrate_correction,
    CorrectionTrajectory,
};
use crate::barenblatt::{curvature_constant, similarity_index, BarenblattProfile};
use crate::diagnostics::{
    boundary_asymptotics, center_of_mass_law, energies, fit_window, radius_asymptotics, resampled_fit, shift_theta0,
};
use crate::error::{Error, Result};
use crate::num::{fit_rate, log_uniform_resample};
use crate::perturbation::PerturbationSpec;
use crate::solver1d::{run, Grid1D};
use crate::solver3d::{run3, Grid3D};
use crate::state::RunOptions;
use crate::Dim;

const ODE_TOL: f64 = 1e-12;
const GRID_N: usize = 200;
const LONG_T: f64 = 1e4;
const FIT_SAMPLES: usize = 64;

/// Deliberate defects used to check that the suite can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Scales the curvature constant `B` by 1.1 in the profile checks.
    PerturbB,
}

impl FromStr for Fault {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perturb-b" | "perturb_b" | "B" => Ok(Fault::PerturbB),
            other => Err(Error::InvalidInput(format!("unknown fault '{other}' (known: perturb-b)"))),
        }
    }
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {:>2} {:<24} {}", self.id, self.name, self.detail)
    }
}

/// Identifiers and names of the criteria, in order.
pub const CRITERIA: [(u8, &str); 10] = [
    (1, "barenblatt-exactness"),
    (2, "profile-constants"),
    (3, "correction-rates"),
    (4, "affine-family"),
    (5, "solver-oracle"),
    (6, "exact-invariances"),
    (7, "boundary-shift"),
    (8, "energy-boundedness"),
    (9, "spherical-radius"),
    (10, "field-errors"),
];

/// Runs criterion `id` (1 to 10).
pub fn run_criterion(id: u8, fault: Option<Fault>) -> CriterionResult {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map_or("unknown", |c| c.1);
    let outcome = match id {
        1 => barenblatt_exactness(fault),
        2 => profile_constants(fault),
        3 => correction_rates(),
        4 => affine_family(),
        5 => solver_oracle(),
        6 => exact_invariances(),
        7 => boundary_shift(),
        8 => energy_boundedness(),
        9 => spherical_radius(),
        10 => field_error_rates(),
        _ => Err(Error::InvalidInput(format!("no criterion {id}"))),
    };
    match outcome {
        Ok((passed, detail)) => CriterionResult { id, name, passed, detail },
        Err(e) => CriterionResult {
            id,
            name,
            passed: false,
            detail: format!("aborted: {e}"),
        },
    }
}

pub fn run_all(fault: Option<Fault>) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|c| run_criterion(c.0, fault)).collect()
}

type Outcome = Result<(bool, String)>;

fn profile_under_test(gamma: f64, dim: Dim, fault: Option<Fault>) -> Result<BarenblattProfile> {
    let p = BarenblattProfile::solve(gamma, 1.0, dim)?;
    match fault {
        None => Ok(p),
        Some(Fault::PerturbB) => BarenblattProfile::with_constants(gamma, p.mass, dim, p.a, 1.1 * p.b),
    }
}

fn barenblatt_exactness(fault: Option<Fault>) -> Outcome {
    let step = 1e-4;
    let mut worst_res: f64 = 0.0;
    let mut worst_mass: f64 = 0.0;
    for gamma in [1.5, 2.0, 3.0] {
        for dim in [Dim::One, Dim::Three] {
            let p = profile_under_test(gamma, dim, fault)?;
            for t in [0.5, 5.0] {
                let r = p.boundary_radius(t - step);
                for frac in [0.1, 0.3, 0.5, 0.7, 0.9] {
                    worst_res = worst_res.max(p.pme_residual(frac * r, t, step)?.abs());
                }
            }
            for t in [0.0, 1.0, 10.0, 1e3] {
                worst_mass = worst_mass.max((p.mass_at(t, 1e-12)? - p.mass).abs());
            }
        }
    }
    Ok((
        worst_res < 1e-5 && worst_mass < 1e-8,
        format!("max |pme residual| {worst_res:.3e} (< 1e-5), max mass error {worst_mass:.3e} (< 1e-8)"),
    ))
}

/// Both coefficient equations obtained by substituting the self-similar
/// ansatz into `ρ_t = Δ(ρ^γ)`: the `P^α` terms give `n/k = 2Bn(α+1)` and the
/// `ξ²P^{α−1}` terms give `2αB/k = 4B²α(α+1)`.
fn matched_curvature(gamma: f64, dim: Dim) -> (f64, f64) {
    let k = similarity_index(gamma, dim);
    let n = dim.n();
    let alpha = 1.0 / (gamma - 1.0);
    let from_level = (n / k) / (2.0 * n * (alpha + 1.0));
    let from_slope = (2.0 * alpha / k) / (4.0 * alpha * (alpha + 1.0));
    (from_level, from_slope)
}

/// Mass of the t = 0 profile by composite Simpson after `x = R sin θ`, which
/// turns `(A − Bx²)^α dx` into the smooth `A^α R cos^{2α+1}θ dθ`.
fn simpson_mass(p: &BarenblattProfile, panels: usize) -> f64 {
    let r = p.initial_radius();
    let alpha = p.alpha();
    let f = |th: f64| {
        let (s, c) = th.sin_cos();
        let base = p.a.powf(alpha) * c.max(0.0).powf(2.0 * alpha + 1.0) * r;
        match p.dim {
            Dim::One => 2.0 * base,
            Dim::Three => 4.0 * std::f64::consts::PI * (r * s).powi(2) * base,
        }
    };
    let n = 2 * panels;
    let h = std::f64::consts::FRAC_PI_2 / n as f64;
    let mut sum = f(0.0) + f(std::f64::consts::FRAC_PI_2);
    for i in 1..n {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    sum * h / 3.0
}

fn profile_constants(fault: Option<Fault>) -> Outcome {
    let mut worst_b: f64 = 0.0;
    let mut worst_mass: f64 = 0.0;
    let mut a2 = [0.0; 2];
    for gamma in [1.5, 2.0, 3.0] {
        for (j, dim) in [Dim::One, Dim::Three].into_iter().enumerate() {
            let p = profile_under_test(gamma, dim, fault)?;
            let (level, slope) = matched_curvature(gamma, dim);
            for b in [p.b, curvature_constant(gamma, dim)] {
                worst_b = worst_b.max((b - level).abs()).max((b - slope).abs());
            }
            worst_mass = worst_mass.max((simpson_mass(&p, 4000) - p.mass).abs());
            if gamma == 2.0 {
                a2[j] = p.a;
            }
        }
    }
    let a_ok = (a2[0] - 0.36056).abs() < 5e-6 && (a2[1] - 0.1348).abs() < 5e-5;
    Ok((
        worst_b < 1e-12 && worst_mass < 1e-8 && a_ok,
        format!(
            "max |B − matched| {worst_b:.3e}, max mass error {worst_mass:.3e}, A(γ=2) = {:.6} / {:.5}",
            a2[0], a2[1]
        ),
    ))
}

/// Exponent of `v(t)/ln(2+t)` on a window, fitted to log-uniform resamples.
fn log_normalized_fit(series: &[(f64, f64)], window: (f64, f64)) -> Result<f64> {
    let scaled: Vec<(f64, f64)> = series.iter().map(|&(t, v)| (t, v.abs() / (2.0 + t).ln())).collect();
    let samples = log_uniform_resample(&scaled, window, FIT_SAMPLES)?;
    Ok(fit_rate(&samples, window)?.exponent)
}

fn correction_rates() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for (dim, target) in [(Dim::One, -2.0 / 3.0), (Dim::Three, -4.0 / 5.0)] {
        let c = integrate_correction(2.0, dim, LONG_T, ODE_TOL)?;
        let h: Vec<(f64, f64)> = c.samples().map(|(t, h, _)| (t, h)).collect();
        let exponent = log_normalized_fit(&h, (1e2, LONG_T))?;
        let signs = c.samples().skip(1).all(|(t, h, _)| {
            h >= 0.0 && c.tilde_eta_xt(t).is_ok_and(|v| v >= 0.0)
        });
        passed &= (exponent - target).abs() <= 0.07 && signs;
        parts.push(format!("n={}: exponent {exponent:.4} (target {target:.4}), signs ok {signs}", dim.n()));
    }
    Ok((passed, parts.join("; ")))
}

fn affine_family() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for dim in [Dim::One, Dim::Three] {
        let p = BarenblattProfile::solve(2.0, 1.0, dim)?;
        let init = barenblatt_affine(&p, 0.0);
        let traj = integrate_affine(init, 2.0, dim, LONG_T, 1e-10)?;
        let q0 = conserved_quantity(&init, 2.0, dim);
        let drift = traj
            .states()
            .filter(|s| s.t <= 1e3)
            .map(|s| (conserved_quantity(&s, 2.0, dim) / q0 - 1.0).abs())
            .fold(0.0, f64::max);
        let scaled = |t: f64| -> Result<f64> {
            let s = traj.at(t)?;
            let bar = barenblatt_affine(&p, t);
            let dev = [(s.a, bar.a), (s.b, bar.b), (s.e, bar.e)]
                .iter()
                .map(|(v, w)| ((v - w) / w).abs())
                .fold(0.0, f64::max);
            Ok(dev * (1.0 + t) / (2.0 + t).ln())
        };
        let mut maxima = Vec::new();
        for decade in 1..4 {
            let lo = 10f64.powi(decade);
            let mut m: f64 = 0.0;
            for j in 0..=FIT_SAMPLES {
                m = m.max(scaled(lo * 10f64.powf(j as f64 / FIT_SAMPLES as f64))?);
            }
            maxima.push(m);
        }
        let monotone = maxima.windows(2).all(|w| w[1] <= w[0]);
        passed &= drift < 1e-8 && monotone;
        parts.push(format!(
            "n={}: drift {drift:.2e}, decade maxima {:.4} {:.4} {:.4}",
            dim.n(),
            maxima[0],
            maxima[1],
            maxima[2]
        ));
    }
    Ok((passed, parts.join("; ")))
}

fn oracle_error(dim: Dim, cells: usize, p: &BarenblattProfile, c: &CorrectionTrajectory, lambda: f64) -> Result<f64> {
    let (eta, nodes) = match dim {
        Dim::One => {
            let g = Grid1D::uniform(p, cells)?;
            let out = run(&g, c, &PerturbationSpec::Zero, 10.0, &RunOptions::default())?;
            (out.snapshots.last().map(|s| s.eta.clone()), g.nodes)
        }
        Dim::Three => {
            let g = Grid3D::uniform(p, cells)?;
            let out = run3(&g, c, &PerturbationSpec::Zero, 10.0, &RunOptions::default())?;
            (out.snapshots.last().map(|s| s.eta.clone()), g.nodes)
        }
    };
    let eta = eta.ok_or(Error::InsufficientHistory { needed: 1, found: 0 })?;
    Ok(eta
        .iter()
        .zip(&nodes)
        .map(|(e, x)| (e - lambda * x).abs())
        .fold(0.0, f64::max))
}

fn solver_oracle() -> Outcome {
    let mut passed = true;
    let mut parts = Vec::new();
    for dim in [Dim::One, Dim::Three] {
        let p = BarenblattProfile::solve(2.0, 1.0, dim)?;
        let c = integrate_correction(2.0, dim, 10.0, ODE_TOL)?;
        let flow = exact_affine_flow(2.0, dim, 1.0 / p.k, 10.0, 1e-13)?;
        let lambda = flow.lambda(10.0)?;
        let errs = [100, 200, 400]
            .iter()
            .map(|&n| oracle_error(dim, n, &p, &c, lambda))
            .collect::<Result<Vec<_>>>()?;
        let orders = [(errs[0] / errs[1]).log2(), (errs[1] / errs[2]).log2()];
        let bound = 5e-5 * p.initial_radius();
        passed &= orders.iter().all(|&o| o >= 1.8) && errs[2] < bound;
        parts.push(format!(
            "n={}: orders {:.3} {:.3}, error(400) {:.3e} (< {bound:.3e})",
            dim.n(),
            orders[0],
            orders[1],
            errs[2]
        ));
    }
    Ok((passed, parts.join("; ")))
}

fn exact_invariances() -> Outcome {
    let (eps, v0, t_end) = (0.01, 0.05, 10.0);
    let p = BarenblattProfile::solve(2.0, 1.0, Dim::One)?;
    let c = integrate_correction(2.0, Dim::One, t_end, ODE_TOL)?;
    let flow = exact_affine_flow(2.0, Dim::One, 1.0 / p.k, t_end, 1e-13)?;
    let g = Grid1D::uniform(&p, GRID_N)?;
    let opts = RunOptions {
        dt_max: Some(5e-4),
        ..RunOptions::default()
    };
    let mut shape: f64 = 0.0;
    let mut com: f64 = 0.0;
    for pert in [PerturbationSpec::Translation { epsilon: eps }, PerturbationSpec::Kick { v0 }] {
        let out = run(&g, &c, &pert, t_end, &opts)?;
        for s in &out.snapshots {
            let lambda = flow.lambda(s.t)?;
            let offset = match pert {
                PerturbationSpec::Kick { .. } => v0 * (1.0 - (-s.t).exp()),
                _ => eps,
            };
            for (e, x) in s.eta.iter().zip(&g.nodes) {
                shape = shape.max((e - lambda * x - offset).abs());
            }
        }
        com = com.max(center_of_mass_law(&out, &g).max_deviation);
    }
    Ok((
        shape < 1e-7 && com < 1e-8,
        format!("closed-form error {shape:.3e} (< 1e-7), centre-of-mass deviation {com:.3e} (< 1e-8)"),
    ))
}

fn interpolate(series: &[(f64, f64)], t: f64) -> Result<f64> {
    let i = series.partition_point(|s| s.0 < t);
    if i == 0 || i == series.len() {
        return Err(Error::OutOfRange {
            t,
            lo: series.first().map_or(f64::NAN, |s| s.0),
            hi: series.last().map_or(f64::NAN, |s| s.0),
        });
    }
    let ((t0, v0), (t1, v1)) = (series[i - 1], series[i]);
    Ok(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
}

fn asymmetric_bump(epsilon: f64) -> PerturbationSpec {
    PerturbationSpec::Bump {
        epsilon,
        center: 0.8,
        width: 0.3,
    }
}

fn boundary_shift() -> Outcome {
    let p = BarenblattProfile::solve(2.0, 1.0, Dim::One)?;
    let c = integrate_correction(2.0, Dim::One, LONG_T, ODE_TOL)?;
    let g = Grid1D::uniform(&p, GRID_N)?;
    let out = run(&g, &c, &asymmetric_bump(0.01), LONG_T, &RunOptions::default())?;
    let theta0 = shift_theta0(&out.snapshots[0], &g)?;
    let rep = boundary_asymptotics(&out, &g, &c, theta0)?;
    let at = interpolate(&rep.boundary_residuals, 1e3)?.abs();
    let baseline = p.initial_radius() * c.h(1e3)?;
    let exponent = rep.boundary_fit.map(|f| f.exponent).ok_or(Error::InsufficientSamples {
        needed: crate::num::MIN_FIT_SAMPLES,
        found: 0,
    })?;
    Ok((
        at < 3.0 * baseline && exponent <= -0.5,
        format!("ϑ₀ {theta0:.4e}, |residual(1e3)| {at:.4e} (< {:.4e}), exponent {exponent:.4} (≤ −0.5)", 3.0 * baseline),
    ))
}

fn energy_boundedness() -> Outcome {
    let t_end = 1e3;
    let p = BarenblattProfile::solve(2.0, 1.0, Dim::One)?;
    let c = integrate_correction(2.0, Dim::One, t_end, ODE_TOL)?;
    let g = Grid1D::uniform(&p, GRID_N)?;
    let out = run(&g, &c, &asymmetric_bump(0.005), t_end, &RunOptions::default())?;
    let e0 = energies(&out.snapshots[0], &c, &g)?.total;
    let mut ratio: f64 = 0.0;
    for s in &out.snapshots {
        ratio = ratio.max(energies(s, &c, &g)?.total / e0);
    }
    Ok((ratio <= 10.0, format!("max E(t)/E(0) {ratio:.4} (≤ 10)")))
}

fn spherical_radius() -> Outcome {
    let gamma = 2.0;
    let p = BarenblattProfile::solve(gamma, 1.0, Dim::Three)?;
    let c = integrate_correction(gamma, Dim::Three, LONG_T, ODE_TOL)?;
    let g = Grid3D::uniform(&p, GRID_N)?;
    let window = (1e2, LONG_T);
    let missing = || Error::InsufficientSamples {
        needed: crate::num::MIN_FIT_SAMPLES,
        found: 0,
    };
    let zero = run3(&g, &c, &PerturbationSpec::Zero, LONG_T, &RunOptions::default())?;
    let growth = resampled_fit(&zero.radius, window).ok_or_else(missing)?.exponent;
    let target = 1.0 / (3.0 * gamma - 1.0);
    let dilated = run3(&g, &c, &PerturbationSpec::Translation { epsilon: 0.01 }, LONG_T, &RunOptions::default())?;
    let rep = radius_asymptotics(&dilated, &g, &c)?;
    let decay = rep.boundary_fit.ok_or_else(missing)?.exponent;
    Ok((
        ((growth - target) / target).abs() <= 0.02 && decay <= -0.5,
        format!("growth exponent {growth:.5} (target {target:.4} ± 2%), R − R̄ exponent {decay:.4} (≤ −0.5)"),
    ))
}

fn field_error_rates() -> Outcome {
    let gamma = 2.0;
    let p = BarenblattProfile::solve(gamma, 1.0, Dim::One)?;
    let c = integrate_correction(gamma, Dim::One, LONG_T, ODE_TOL)?;
    let g = Grid1D::uniform(&p, GRID_N)?;
    let out = run(&g, &c, &PerturbationSpec::Zero, LONG_T, &RunOptions::default())?;
    let rep = boundary_asymptotics(&out, &g, &c, 0.0)?;
    let window = fit_window(LONG_T);
    let density: Vec<(f64, f64)> = rep.field_errors.iter().map(|f| (f.t, f.density)).collect();
    let velocity: Vec<(f64, f64)> = rep.field_errors.iter().map(|f| (f.t, f.velocity)).collect();
    let d = log_normalized_fit(&density, window)?;
    let v = log_normalized_fit(&velocity, window)?;
    let target = -gamma / (gamma + 1.0);
    Ok((
        (d - target).abs() <= 0.1 && (v - target).abs() <= 0.1,
        format!("density exponent {d:.4}, velocity exponent {v:.4} (target {target:.4} ± 0.1)"),
    ))
}
