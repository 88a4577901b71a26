//! Lagrangian fixed-domain solver for the one-dimensional vacuum free-boundary
//! problem
//!
//! ```text
//! ρ̄₀ η_tt + ρ̄₀ η_t + (ρ̄₀^γ η_x^{−γ})_x = 0   on  I = (−√(A/B), √(A/B)).
//! ```
//!
//! Nodes carry lumped masses `m_i`; the stress `σ = ρ̄₀^γ η_x^{−γ}` lives on
//! the faces between nodes and vanishes on the two exterior faces at the
//! vacuum boundary, so no boundary condition is imposed. The node masses are
//! the first-moment masses `m_i = x_i⁻¹ ∫_{cell} x ρ̄₀ dx`, which equal
//! `k (ρ̄₀^γ(x_{i−½}) − ρ̄₀^γ(x_{i+½})) / x_i` because `(ρ̄₀^γ)_x = −x ρ̄₀ / k`.
//! With these weights every affine motion `η = λ(t) x` is an exact solution of
//! the semi-discrete system whenever `λ'' + λ' = λ^{−γ}/k`.

use crate::affine::CorrectionTrajectory;
use crate::barenblatt::BarenblattProfile;
use crate::error::{Error, Result};
use crate::num::quad_weighted;
use crate::perturbation::PerturbationSpec;
use crate::state::{march, split_step, RunOptions, Scheme};
use crate::Dim;

pub use crate::state::FlowState as FlowState1D;

/// Reference grid on the initial Barenblatt interval.
#[derive(Debug, Clone)]
pub struct Grid1D {
    pub profile: BarenblattProfile,
    /// `N + 1` increasing reference positions from `−√(A/B)` to `√(A/B)`.
    pub nodes: Vec<f64>,
    /// `ρ̄₀` at the nodes.
    pub rho0: Vec<f64>,
    /// Lumped node masses.
    pub masses: Vec<f64>,
    /// `ρ̄₀^γ` at the `N` interior faces (face `j` sits between nodes `j` and `j + 1`).
    pub face_weights: Vec<f64>,
}

impl Grid1D {
    /// Uniform grid with `cells` intervals.
    pub fn uniform(profile: &BarenblattProfile, cells: usize) -> Result<Self> {
        let r = profile.initial_radius();
        let nodes = (0..=cells)
            .map(|i| -r + 2.0 * r * i as f64 / cells as f64)
            .collect::<Vec<_>>();
        Self::from_nodes(profile, nodes)
    }

    /// Cosine-clustered grid, refined towards both vacuum boundaries.
    pub fn graded(profile: &BarenblattProfile, cells: usize) -> Result<Self> {
        let r = profile.initial_radius();
        let nodes = (0..=cells)
            .map(|i| -r * (std::f64::consts::PI * i as f64 / cells as f64).cos())
            .collect::<Vec<_>>();
        Self::from_nodes(profile, nodes)
    }

    pub fn from_nodes(profile: &BarenblattProfile, mut nodes: Vec<f64>) -> Result<Self> {
        if profile.dim != Dim::One {
            return Err(Error::InvalidInput("one-dimensional grid needs a 1D profile".into()));
        }
        if nodes.len() < 3 {
            return Err(Error::InvalidInput("grid needs at least two cells".into()));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("grid nodes must be strictly increasing".into()));
        }
        let r = profile.initial_radius();
        let n = nodes.len() - 1;
        nodes[0] = -r;
        nodes[n] = r;
        // Symmetric grids put the centre node exactly at zero.
        if n.is_multiple_of(2) && nodes[n / 2].abs() < 1e-12 * r {
            nodes[n / 2] = 0.0;
        }

        let face_pos: Vec<f64> = nodes.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let face_weights: Vec<f64> = face_pos.iter().map(|&f| profile.initial_pressure(f)).collect();
        let rho0 = nodes.iter().map(|&x| profile.initial_density(x)).collect();

        let mut masses = Vec::with_capacity(n + 1);
        for i in 0..=n {
            let left = if i == 0 { nodes[0] } else { face_pos[i - 1] };
            let right = if i == n { nodes[n] } else { face_pos[i] };
            let x = nodes[i];
            let straddles = left < 0.0 && right > 0.0;
            let m = if !straddles && x != 0.0 {
                let pl = profile.initial_pressure(left);
                let pr = profile.initial_pressure(right);
                profile.k * (pl - pr) / x
            } else {
                quad_weighted(|y| profile.initial_density(y), (left, right), 1e-15)?
            };
            if !(m > 0.0) {
                return Err(Error::InvalidInput(format!("non-positive mass at node {i}")));
            }
            masses.push(m);
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

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    pub fn radius(&self) -> f64 {
        self.profile.initial_radius()
    }
}

impl Scheme for Grid1D {
    fn acceleration(&self, eta: &[f64], t: f64, out: &mut [f64]) -> Result<()> {
        let g = self.profile.gamma;
        let n = self.cells();
        let mut left_stress = 0.0;
        for i in 0..=n {
            let right_stress = if i < n {
                let d = eta[i + 1] - eta[i];
                if !(d > 0.0) {
                    return Err(Error::Interpenetration { t, node: i });
                }
                let s = d / (self.nodes[i + 1] - self.nodes[i]);
                self.face_weights[i] * s.powf(-g)
            } else {
                0.0
            };
            out[i] = -(right_stress - left_stress) / self.masses[i];
            left_stress = right_stress;
        }
        Ok(())
    }

    fn acceleration_jvp(&self, eta: &[f64], v: &[f64], out: &mut [f64]) {
        let g = self.profile.gamma;
        let n = self.cells();
        let mut left = 0.0;
        for i in 0..=n {
            let right = if i < n {
                let dx = self.nodes[i + 1] - self.nodes[i];
                let s = (eta[i + 1] - eta[i]) / dx;
                -g * self.face_weights[i] * s.powf(-g - 1.0) * (v[i + 1] - v[i]) / dx
            } else {
                0.0
            };
            out[i] = -(right - left) / self.masses[i];
            left = right;
        }
    }

    fn stable_dt(&self, eta: &[f64], cfl: f64) -> f64 {
        let g = self.profile.gamma;
        let n = self.cells();
        // Stiffness of each face spring and its sound speed bound.
        let mut stiff = vec![0.0; n];
        let mut dt = f64::INFINITY;
        for j in 0..n {
            let dx = self.nodes[j + 1] - self.nodes[j];
            let s = (eta[j + 1] - eta[j]) / dx;
            let p = self.face_weights[j];
            let c2 = g * p.powf((g - 1.0) / g) * s.powf(-g - 1.0);
            if c2 > 0.0 {
                dt = dt.min(cfl * dx / c2.sqrt());
            }
            stiff[j] = g * p * s.powf(-g - 1.0) / dx;
        }
        // Node-wise Gershgorin bound; binds near the degenerate boundary nodes.
        for i in 0..=n {
            let kl = if i > 0 { stiff[i - 1] } else { 0.0 };
            let kr = if i < n { stiff[i] } else { 0.0 };
            let omega2 = 2.0 * (kl + kr) / self.masses[i];
            if omega2 > 0.0 {
                dt = dt.min(2.0 * cfl / omega2.sqrt());
            }
        }
        dt
    }
}

/// Initial state `η = x + w₀`, `η_t = x (η̄_xt(0) + h_t(0)) + w₁`.
pub fn init_state(grid: &Grid1D, correction: &CorrectionTrajectory, pert: &PerturbationSpec) -> Result<FlowState1D> {
    let (w0, w1) = pert.sample(&grid.nodes)?;
    let strain = correction.tilde_eta_xt(0.0)?;
    let eta: Vec<f64> = grid.nodes.iter().zip(&w0).map(|(x, w)| x + w).collect();
    let eta_t: Vec<f64> = grid.nodes.iter().zip(&w1).map(|(x, w)| x * strain + w).collect();
    if let Some(i) = eta.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput(format!(
            "perturbed initial positions are not monotone at node {i}"
        )));
    }
    Ok(FlowState1D::new(eta, eta_t, 0.0))
}

/// Advances `state` by one step of size `dt`.
pub fn step(state: &mut FlowState1D, grid: &Grid1D, dt: f64) -> Result<()> {
    let mut acc = vec![0.0; state.len()];
    split_step(grid, state, dt, &mut acc)
}

/// Stable time step `cfl · min Δx / c_eff` with `c_eff² = γ ρ̄₀^{γ−1} η_x^{−γ−1}`,
/// further limited by a node-wise stiffness bound.
pub fn cfl_dt(state: &FlowState1D, grid: &Grid1D, cfl: f64) -> f64 {
    grid.stable_dt(&state.eta, cfl)
}

/// Output of [`run`].
#[derive(Debug, Clone)]
pub struct RunOutput1D {
    pub snapshots: Vec<FlowState1D>,
    /// `(t, x₋(t), x₊(t))` at every accepted step.
    pub boundary: Vec<(f64, f64, f64)>,
    /// `(t, ϑ(t))` discrete centre of mass at every accepted step.
    pub center_of_mass: Vec<(f64, f64)>,
}

/// Runs the solver from the perturbed Barenblatt start to `t_end`.
pub fn run(
    grid: &Grid1D,
    correction: &CorrectionTrajectory,
    pert: &PerturbationSpec,
    t_end: f64,
    opts: &RunOptions,
) -> Result<RunOutput1D> {
    let state = init_state(grid, correction, pert)?;
    let n = grid.cells();
    let total = grid.total_mass();
    let mut boundary = Vec::new();
    let mut com = Vec::new();
    let snapshots = march(grid, state, t_end, opts, |s| {
        boundary.push((s.t, s.eta[0], s.eta[n]));
        let m: f64 = grid.masses.iter().zip(&s.eta).map(|(m, x)| m * x).sum();
        com.push((s.t, m / total));
    })?;
    Ok(RunOutput1D {
        snapshots,
        boundary,
        center_of_mass: com,
    })
}

/// Discrete `η_x` at the nodes: centred inside, one-sided at the two ends.
pub fn strain(state: &FlowState1D, grid: &Grid1D) -> Vec<f64> {
    nodal_derivative(&state.eta, &grid.nodes)
}

pub(crate) fn nodal_derivative(f: &[f64], x: &[f64]) -> Vec<f64> {
    let n = f.len() - 1;
    (0..=n)
        .map(|i| {
            let (a, b) = if i == 0 {
                (0, 1)
            } else if i == n {
                (n - 1, n)
            } else {
                (i - 1, i + 1)
            };
            (f[b] - f[a]) / (x[b] - x[a])
        })
        .collect()
}

/// Eulerian density `ρ(η(x,t), t) = ρ̄₀(x) / η_x` at the nodes.
pub fn reconstructed_density(state: &FlowState1D, grid: &Grid1D) -> Vec<f64> {
    strain(state, grid)
        .iter()
        .zip(&grid.rho0)
        .map(|(s, r)| r / s)
        .collect()
}

/// Trapezoidal Eulerian mass `∫ ρ dη` of the reconstructed density.
pub fn eulerian_mass(state: &FlowState1D, grid: &Grid1D) -> f64 {
    let rho = reconstructed_density(state, grid);
    state
        .eta
        .windows(2)
        .zip(rho.windows(2))
        .map(|(e, r)| 0.5 * (r[0] + r[1]) * (e[1] - e[0]))
        .sum()
}

/// Discrete centre of mass `Σ m_i η_i / Σ m_i`.
pub fn center_of_mass(state: &FlowState1D, grid: &Grid1D) -> f64 {
    grid.masses.iter().zip(&state.eta).map(|(m, x)| m * x).sum::<f64>() / grid.total_mass()
}

/// One-sided slope of `c² = γ(ρ̄₀/η_x)^{γ−1}` at the right vacuum boundary,
/// divided by the Barenblatt value at the same time.
pub fn vacuum_slope_ratio(state: &FlowState1D, grid: &Grid1D) -> f64 {
    let g = grid.profile.gamma;
    let n = grid.cells();
    let rho = reconstructed_density(state, grid);
    let c2 = g * rho[n - 1].powf(g - 1.0);
    let slope = -c2 / (state.eta[n] - state.eta[n - 1]);
    // Same stencil applied to the Barenblatt profile at the matching positions.
    let p = &grid.profile;
    let xb = p.lagrangian_flow(grid.nodes[n - 1], state.t);
    let rb = p.boundary_radius(state.t);
    let reference = -p.sound_speed_sq(xb, state.t) / (rb - xb);
    slope / reference
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::affine::{exact_affine_flow, integrate_correction};
    use crate::state::SnapshotLadder;

    fn setup(n: usize) -> (Grid1D, CorrectionTrajectory) {
        let p = BarenblattProfile::solve(2.0, 1.0, Dim::One).unwrap();
        (Grid1D::uniform(&p, n).unwrap(), integrate_correction(2.0, Dim::One, 50.0, 1e-12).unwrap())
    }

    #[test]
    fn grid_is_symmetric_and_mass_close() {
        let (g, _) = setup(200);
        assert_eq!(g.nodes[100], 0.0);
        for i in 0..=200 {
            assert!((g.nodes[i] + g.nodes[200 - i]).abs() < 1e-14);
            assert!((g.masses[i] - g.masses[200 - i]).abs() < 1e-15);
        }
        assert!((g.total_mass() - 1.0).abs() < 1e-3);
        // first moment cancels exactly
        let moment: f64 = g.masses.iter().zip(&g.nodes).map(|(m, x)| m * x).sum();
        assert!(moment.abs() < 1e-14);
    }

    #[test]
    fn init_states() {
        let (g, c) = setup(64);
        let s = init_state(&g, &c, &PerturbationSpec::Zero).unwrap();
        assert_eq!(s.eta, g.nodes);
        for (x, v) in g.nodes.iter().zip(&s.eta_t) {
            assert!((v - x / 3.0).abs() < 1e-15);
        }
        let s = init_state(&g, &c, &PerturbationSpec::Translation { epsilon: 0.01 }).unwrap();
        for (x, e) in g.nodes.iter().zip(&s.eta) {
            assert!((e - x - 0.01).abs() < 1e-15);
        }
        // a steep bump folds the grid
        let steep = PerturbationSpec::Bump { epsilon: 0.5, center: 0.0, width: 0.1 };
        assert!(init_state(&g, &c, &steep).is_err());
        let mild = PerturbationSpec::Bump { epsilon: 0.01, center: 0.8, width: 0.3 };
        assert!(init_state(&g, &c, &mild).is_ok());
    }

    #[test]
    fn affine_motion_is_preserved_by_the_scheme() {
        let (g, c) = setup(50);
        let mut s = init_state(&g, &c, &PerturbationSpec::Zero).unwrap();
        for _ in 0..200 {
            let dt = cfl_dt(&s, &g, 0.4);
            step(&mut s, &g, dt).unwrap();
        }
        let lambda = s.eta[40] / g.nodes[40];
        for (x, e) in g.nodes.iter().zip(&s.eta) {
            assert!((e - lambda * x).abs() < 1e-12 * lambda.max(1.0) * g.radius());
        }
    }

    #[test]
    fn dt_behaviour() {
        let (g, c) = setup(100);
        let (g2, _) = setup(200);
        let s = init_state(&g, &c, &PerturbationSpec::Zero).unwrap();
        let s2 = init_state(&g2, &c, &PerturbationSpec::Zero).unwrap();
        let dt = cfl_dt(&s, &g, 0.4);
        let dt2 = cfl_dt(&s2, &g2, 0.4);
        assert!(dt > 0.0);
        assert!((dt / dt2 - 2.0).abs() < 0.05, "{dt} {dt2}");
        // dt grows along the expanding Barenblatt trajectory
        let f = exact_affine_flow(2.0, Dim::One, 1.0 / 3.0, 100.0, 1e-10).unwrap();
        let mut prev = 0.0;
        for t in [0.0, 1.0, 10.0, 100.0] {
            let l = f.lambda(t).unwrap();
            let st = FlowState1D::new(g.nodes.iter().map(|x| l * x).collect(), vec![0.0; 101], t);
            let d = cfl_dt(&st, &g, 0.4);
            assert!(d > prev);
            prev = d;
        }
    }

    #[test]
    fn short_run_tracks_affine_oracle() {
        let (g, c) = setup(200);
        let out = run(&g, &c, &PerturbationSpec::Zero, 10.0, &RunOptions::default()).unwrap();
        let r = g.radius();
        for &(t, xm, xp) in &out.boundary {
            let l = c.tilde_eta_x(t).unwrap();
            assert!((xp / (l * r) - 1.0).abs() < 1e-3);
            assert!((xm / (-l * r) - 1.0).abs() < 1e-3);
        }
        assert!(out.boundary.windows(2).all(|w| w[1].0 > w[0].0));
        assert_eq!(out.snapshots.last().unwrap().t, 10.0);
    }

    #[test]
    fn zero_length_run() {
        let (g, c) = setup(32);
        let out = run(&g, &c, &PerturbationSpec::Zero, 0.0, &RunOptions::default()).unwrap();
        assert_eq!(out.snapshots.len(), 1);
        assert_eq!(out.snapshots[0].t, 0.0);
    }

    #[test]
    fn center_of_mass_law_holds_for_kick() {
        let (g, c) = setup(100);
        let v0 = 0.05;
        let opts = RunOptions {
            cfl: 0.4,
            ladder: SnapshotLadder::Linear { every: 1.0 },
            dt_max: None,
        };
        let out = run(&g, &c, &PerturbationSpec::Kick { v0 }, 5.0, &opts).unwrap();
        for &(t, theta) in &out.center_of_mass {
            assert!((theta - v0 * (-(-t).exp_m1())).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_and_vacuum_slope_along_run() {
        let (g, c) = setup(200);
        let pert = PerturbationSpec::Bump { epsilon: 0.01, center: 0.8, width: 0.3 };
        let out = run(&g, &c, &pert, 20.0, &RunOptions::default()).unwrap();
        for s in &out.snapshots {
            assert!((eulerian_mass(s, &g) - 1.0).abs() < 2e-3);
            let ratio = vacuum_slope_ratio(s, &g);
            assert!(ratio > 0.5 && ratio < 2.0, "t = {}: {ratio}", s.t);
        }
    }

    #[test]
    fn interpenetration_aborts() {
        let (g, c) = setup(16);
        let mut s = init_state(&g, &c, &PerturbationSpec::Zero).unwrap();
        // Collide two neighbours head-on.
        s.eta_t[8] = 1e4;
        s.eta_t[9] = -1e4;
        let r = step(&mut s, &g, 0.01);
        assert!(matches!(r, Err(Error::Interpenetration { .. })));
    }
}
