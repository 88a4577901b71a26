//! Lagrangian solver for spherically symmetric flow,
//!
//! ```text
//! ρ̄₀ η_tt + ρ̄₀ η_t + (η/r)² [ (r² ρ̄₀ / (η² η_r))^γ ]_r = 0   on  (0, √(A/B)),
//! ```
//!
//! with `η(0, t) = 0`. The face pressure uses the shell volume ratio
//! `(r₊³ − r₋³)/(η₊³ − η₋³)` in place of `r²/(η² η_r)`, which stays finite in
//! the innermost shell. Node masses are `m_i = k r_i (ρ̄₀^γ(r_{i−½}) − ρ̄₀^γ(r_{i+½}))`
//! so that `η = λ(t) r` is an exact solution of the semi-discrete system.

use crate::affine::CorrectionTrajectory;
use crate::barenblatt::BarenblattProfile;
use crate::error::{Error, Result};
use crate::perturbation::PerturbationSpec;
use crate::state::{march, split_step, RunOptions, Scheme};
use crate::Dim;
use std::f64::consts::PI;

pub use crate::state::FlowState as FlowState3D;

/// Radial reference grid `0 = r₀ < r₁ < … < r_N = √(A/B)`.
#[derive(Debug, Clone)]
pub struct Grid3D {
    pub profile: BarenblattProfile,
    pub nodes: Vec<f64>,
    pub rho0: Vec<f64>,
    /// Node masses per unit solid angle; the centre node carries none.
    pub masses: Vec<f64>,
    /// `ρ̄₀^γ` at the faces between consecutive nodes.
    pub face_weights: Vec<f64>,
}

impl Grid3D {
    pub fn uniform(profile: &BarenblattProfile, cells: usize) -> Result<Self> {
        let r = profile.initial_radius();
        let nodes = (0..=cells).map(|i| r * i as f64 / cells as f64).collect();
        Self::from_nodes(profile, nodes)
    }

    /// Grid refined towards the vacuum boundary.
    pub fn graded(profile: &BarenblattProfile, cells: usize) -> Result<Self> {
        let r = profile.initial_radius();
        let nodes = (0..=cells)
            .map(|i| r * (0.5 * PI * i as f64 / cells as f64).sin())
            .collect();
        Self::from_nodes(profile, nodes)
    }

    pub fn from_nodes(profile: &BarenblattProfile, mut nodes: Vec<f64>) -> Result<Self> {
        if profile.dim != Dim::Three {
            return Err(Error::InvalidInput("radial grid needs a 3D profile".into()));
        }
        if nodes.len() < 3 {
            return Err(Error::InvalidInput("grid needs at least two cells".into()));
        }
        if nodes[0] != 0.0 || nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput(
                "radial nodes must start at 0 and increase strictly".into(),
            ));
        }
        let n = nodes.len() - 1;
        nodes[n] = profile.initial_radius();
        let face_pos: Vec<f64> = nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let face_weights = face_pos.iter().map(|&f| profile.initial_pressure(f)).collect();
        let rho0 = nodes.iter().map(|&r| profile.initial_density(r)).collect();
        let mut masses = vec![0.0; n + 1];
        for i in 1..=n {
            let outer = if i == n { 0.0 } else { profile.initial_pressure(face_pos[i]) };
            let m = profile.k * nodes[i] * (profile.initial_pressure(face_pos[i - 1]) - outer);
            if !(m > 0.0) {
                return Err(Error::InvalidInput(format!("non-positive mass at node {i}")));
            }
            masses[i] = m;
        }
        Ok(Self {
            profile: *profile,
            nodes,
            rho0,
            masses,
            face_weights,
        })
    }

    pub fn cells(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Discrete mass `4π Σ m_i`.
    pub fn total_mass(&self) -> f64 {
        4.0 * PI * self.masses.iter().sum::<f64>()
    }

    pub fn radius(&self) -> f64 {
        self.profile.initial_radius()
    }

    fn volume_ratio(&self, eta: &[f64], j: usize) -> f64 {
        let (r0, r1) = (self.nodes[j], self.nodes[j + 1]);
        let (e0, e1) = (eta[j], eta[j + 1]);
        (r1.powi(3) - r0.powi(3)) / (e1.powi(3) - e0.powi(3))
    }

    fn check_order(&self, eta: &[f64], t: f64) -> Result<()> {
        if eta[0] != 0.0 {
            return Err(Error::PositivityLost { t, what: "centre position" });
        }
        match eta.windows(2).position(|w| !(w[1] > w[0])) {
            Some(node) => Err(Error::Interpenetration { t, node }),
            None => Ok(()),
        }
    }
}

impl Scheme for Grid3D {
    fn acceleration(&self, eta: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        self.check_order(eta, t)?;
        let g = self.profile.gamma;
        let n = self.cells();
        out[0] = 0.0;
        let mut inner = self.face_weights[0] * self.volume_ratio(eta, 0).powf(g);
        for i in 1..=n {
            let outer = if i < n {
                self.face_weights[i] * self.volume_ratio(eta, i).powf(g)
            } else {
                0.0
            };
            out[i] = -eta[i] * eta[i] * (outer - inner) / self.masses[i];
            inner = outer;
        }
        Ok(())
    }

    fn acceleration_jvp(&self, eta: &[f64], v: &[f64], out: &mut [f64]) {
        let g = self.profile.gamma;
        let n = self.cells();
        // face pressure and its derivative along v
        let face = |j: usize| -> (f64, f64) {
            if j >= n {
                return (0.0, 0.0);
            }
            let vr = self.volume_ratio(eta, j);
            let p = self.face_weights[j] * vr.powf(g);
            let d3 = eta[j + 1].powi(3) - eta[j].powi(3);
            let dd3 = 3.0 * (eta[j + 1].powi(2) * v[j + 1] - eta[j].powi(2) * v[j]);
            (p, -g * p * dd3 / d3)
        };
        out[0] = 0.0;
        let mut inner = face(0);
        for i in 1..=n {
            let outer = face(i);
            out[i] = -(2.0 * eta[i] * v[i] * (outer.0 - inner.0) + eta[i] * eta[i] * (outer.1 - inner.1))
                / self.masses[i];
            inner = outer;
        }
    }

    fn stable_dt(&self, eta: &[f64], cfl: f64) -> f64 {
        let g = self.profile.gamma;
        let n = self.cells();
        let mut stiff = vec![0.0; n];
        let mut dt = f64::INFINITY;
        for j in 0..n {
            let dr = self.nodes[j + 1] - self.nodes[j];
            let s = (eta[j + 1] - eta[j]) / dr;
            let p0 = self.face_weights[j];
            let c2 = g * p0.powf((g - 1.0) / g) * s.powf(-g - 1.0);
            if c2 > 0.0 {
                dt = dt.min(cfl * dr / c2.sqrt());
            }
            let v = self.volume_ratio(eta, j);
            let p = p0 * v.powf(g);
            stiff[j] = 3.0 * g * p * eta[j + 1].powi(2) / (eta[j + 1].powi(3) - eta[j].powi(3));
        }
        for i in 1..=n {
            let kr = if i < n { stiff[i] } else { 0.0 };
            let omega2 = 2.0 * eta[i] * eta[i] * (stiff[i - 1] + kr) / self.masses[i];
            if omega2 > 0.0 {
                dt = dt.min(2.0 * cfl / omega2.sqrt());
            }
        }
        dt
    }
}

/// Initial state `η = r(1 + ζ₀)`, `η_t = r(η̃_xt(0) + ζ₁)`.
pub fn init_state3(grid: &Grid3D, correction: &CorrectionTrajectory, pert: &PerturbationSpec) -> Result<FlowState3D> {
    let (z0, z1) = pert.sample(&grid.nodes)?;
    let strain = correction.tilde_eta_xt(0.0)?;
    let eta: Vec<f64> = grid.nodes.iter().zip(&z0).map(|(r, z)| r * (1.0 + z)).collect();
    let eta_t = grid.nodes.iter().zip(&z1).map(|(r, z)| r * (strain + z)).collect();
    if let Some(i) = eta.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(format!(
            "perturbed initial radii are not monotone at node {i}"
        )));
    }
    Ok(FlowState3D::new(eta, eta_t, 0.0))
}

pub fn step3(state: &mut FlowState3D, grid: &Grid3D, dt: f64) -> Result<()> {
    let mut acc = vec![0.0; state.len()];
    split_step(grid, state, dt, &mut acc)
}

pub fn cfl_dt3(state: &FlowState3D, grid: &Grid3D, cfl: f64) -> f64 {
    grid.stable_dt(&state.eta, cfl)
}

/// Output of [`run3`].
#[derive(Debug, Clone)]
pub struct RunOutput3D {
    pub snapshots: Vec<FlowState3D>,
    /// `(t, R(t))` at every accepted step.
    pub radius: Vec<(f64, f64)>,
}

pub fn run3(
    grid: &Grid3D,
    correction: &CorrectionTrajectory,
    pert: &PerturbationSpec,
    t_end: f64,
    opts: &RunOptions,
) -> Result<RunOutput3D> {
    let state = init_state3(grid, correction, pert)?;
    let n = grid.cells();
    let mut radius = Vec::new();
    let snapshots = march(grid, state, t_end, opts, |s| radius.push((s.t, s.eta[n])))?;
    Ok(RunOutput3D { snapshots, radius })
}

/// `η_r` at the nodes; the centre uses the symmetric limit `η_r(0) = η₁/r₁`.
pub fn radial_strain(state: &FlowState3D, grid: &Grid3D) -> Vec<f64> {
    let mut s = crate::solver1d::nodal_derivative(&state.eta, &grid.nodes);
    s[0] = state.eta[1] / grid.nodes[1];
    s
}

/// `η/r` at the nodes, extended to the centre by `η_r(0)`.
pub fn relative_position(state: &FlowState3D, grid: &Grid3D) -> Vec<f64> {
    let mut q: Vec<f64> = state.eta.iter().zip(&grid.nodes).map(|(e, r)| e / r).collect();
    q[0] = radial_strain(state, grid)[0];
    q
}

/// Eulerian density `r² ρ̄₀ / (η² η_r)` at the nodes.
pub fn reconstructed_density3(state: &FlowState3D, grid: &Grid3D) -> Vec<f64> {
    let q = relative_position(state, grid);
    let s = radial_strain(state, grid);
    (0..grid.nodes.len())
        .map(|i| grid.rho0[i] / (q[i] * q[i] * s[i]))
        .collect()
}

/// Trapezoidal `4π ∫ ρ η² dη`.
pub fn eulerian_mass3(state: &FlowState3D, grid: &Grid3D) -> f64 {
    let rho = reconstructed_density3(state, grid);
    let f: Vec<f64> = rho.iter().zip(&state.eta).map(|(r, e)| r * e * e).collect();
    4.0 * PI
        * state
            .eta
            .windows(2)
            .zip(f.windows(2))
            .map(|(e, v)| 0.5 * (v[0] + v[1]) * (e[1] - e[0]))
            .sum::<f64>()
}

/// Gap between `η/r` at the first interior node and the centre limit,
/// a measure of the regularity of the flow at the origin.
pub fn origin_regularity(state: &FlowState3D, grid: &Grid3D) -> f64 {
    let q = relative_position(state, grid);
    let s = radial_strain(state, grid);
    // second-order one-sided estimate of η_r(0) from η₁, η₂ (η₀ = 0)
    let (r1, r2) = (grid.nodes[1], grid.nodes[2]);
    let (e1, e2) = (state.eta[1], state.eta[2]);
    let d0 = (e1 * r2 * r2 - e2 * r1 * r1) / (r1 * r2 * (r2 - r1));
    (d0 - q[1]).abs().max((d0 - s[0]).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::integrate_correction;

    fn setup(n: usize) -> (Grid3D, CorrectionTrajectory) {
        let p = BarenblattProfile::solve(2.0, 1.0, Dim::Three).unwrap();
        (Grid3D::uniform(&p, n).unwrap(), integrate_correction(2.0, Dim::Three, 50.0, 1e-12).unwrap())
    }

    #[test]
    fn grid_masses() {
        let (g, _) = setup(200);
        assert_eq!(g.masses[0], 0.0);
        assert!((g.total_mass() - 1.0).abs() < 1e-3, "{}", g.total_mass());
        assert!(Grid3D::from_nodes(&g.profile, vec![0.1, 0.2, 0.3]).is_err());
    }

    #[test]
    fn init_states() {
        let (g, c) = setup(32);
        let s = init_state3(&g, &c, &PerturbationSpec::Zero).unwrap();
        assert_eq!(s.eta, g.nodes);
        assert!((s.eta_t[32] - g.radius() / 5.0).abs() < 1e-15);
        let s = init_state3(&g, &c, &PerturbationSpec::Translation { epsilon: 0.01 }).unwrap();
        assert!((s.eta[10] - 1.01 * g.nodes[10]).abs() < 1e-15);
        assert_eq!(s.eta[0], 0.0);
        let fold = PerturbationSpec::Bump { epsilon: -2.0, center: 0.5, width: 0.05 };
        assert!(init_state3(&g, &c, &fold).is_err());
    }

    #[test]
    fn dilation_is_preserved() {
        let (g, c) = setup(40);
        let mut s = init_state3(&g, &c, &PerturbationSpec::Zero).unwrap();
        for _ in 0..300 {
            let dt = cfl_dt3(&s, &g, 0.4);
            step3(&mut s, &g, dt).unwrap();
        }
        let l = s.eta[40] / g.nodes[40];
        for (r, e) in g.nodes.iter().zip(&s.eta) {
            assert!((e - l * r).abs() < 1e-12 * l * g.radius());
        }
        assert_eq!(s.eta[0], 0.0);
        assert_eq!(s.eta_t[0], 0.0);
    }

    #[test]
    fn radius_tracks_oracle() {
        let (g, c) = setup(200);
        let out = run3(&g, &c, &PerturbationSpec::Zero, 10.0, &RunOptions::default()).unwrap();
        for &(t, r) in &out.radius {
            let l = c.tilde_eta_x(t).unwrap();
            assert!((r / (l * g.radius()) - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn mass_and_origin_along_bump_run() {
        let (g, c) = setup(200);
        let pert = PerturbationSpec::Bump { epsilon: 0.01, center: 0.3, width: 0.2 };
        let out = run3(&g, &c, &pert, 20.0, &RunOptions::default()).unwrap();
        let dr = g.nodes[1];
        for s in &out.snapshots {
            assert!((eulerian_mass3(s, &g) - 1.0).abs() < 5e-3, "{}", eulerian_mass3(s, &g));
            assert!(origin_regularity(s, &g) < 50.0 * dr * dr);
            assert_eq!(s.eta_t[0], 0.0);
        }
    }

    #[test]
    fn dt_halves_with_refinement() {
        let (g, c) = setup(100);
        let (g2, _) = setup(200);
        let d1 = cfl_dt3(&init_state3(&g, &c, &PerturbationSpec::Zero).unwrap(), &g, 0.4);
        let d2 = cfl_dt3(&init_state3(&g2, &c, &PerturbationSpec::Zero).unwrap(), &g2, 0.4);
        assert!((d1 / d2 - 2.0).abs() < 0.1, "{d1} {d2}");
    }
}
