//! ODE-level exact solutions.
//!
//! * The affine family `c² = e(t) − b(t)|x|²`, `u = a(t) x` of the damped
//!   Euler system. Substituting the ansatz into the mass and momentum
//!   equations and matching powers of `|x|` gives
//!
//!   ```text
//!   a' = −a² − a + 2b/(γ−1)
//!   b' = −(n(γ−1)+2) a b
//!   e' = −n(γ−1) a e
//!   ```
//!
//!   with the first integral `e^{n(γ−1)+2} / b^{n(γ−1)}`.
//! * The boundary correction `h(t)` that turns the Barenblatt particle path
//!   `η̄ = x(1+t)^{1/k}` into the exact Lagrangian solution
//!   `η̃ = x(η̄_x + h)` of the fixed-domain problem.
//! * The scalar affine flow `λ'' + λ' = λ^{1−k}/k`, which is what `η = λ(t)x`
//!   must satisfy when the reference density is the Barenblatt profile.

use crate::barenblatt::{similarity_index, BarenblattProfile};
use crate::error::{Error, Result};
use crate::num::{integrate_ode_with, OdeOptions, OdeProblem, Trajectory};
use crate::Dim;

/// Coefficients of the affine particular solution at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineState {
    /// Strain rate.
    pub a: f64,
    /// Curvature of the squared sound speed.
    pub b: f64,
    /// Central squared sound speed.
    pub e: f64,
    pub t: f64,
}

impl AffineState {
    pub fn sound_speed_sq(&self, r: f64) -> f64 {
        self.e - self.b * r * r
    }

    pub fn velocity(&self, r: f64) -> f64 {
        self.a * r
    }

    /// Radius `√(e/b)` of the support.
    pub fn radius(&self) -> f64 {
        (self.e / self.b).sqrt()
    }
}

/// Time derivatives `(a', b', e')` of the affine coefficients.
pub fn affine_rhs(s: &AffineState, gamma: f64, dim: Dim) -> [f64; 3] {
    let ng = dim.n() * (gamma - 1.0);
    [
        -s.a * s.a - s.a + 2.0 * s.b / (gamma - 1.0),
        -(ng + 2.0) * s.a * s.b,
        -ng * s.a * s.e,
    ]
}

/// First integral `e^{n(γ−1)+2} / b^{n(γ−1)}` of the affine system.
pub fn conserved_quantity(s: &AffineState, gamma: f64, dim: Dim) -> f64 {
    let ng = dim.n() * (gamma - 1.0);
    ((ng + 2.0) * s.e.ln() - ng * s.b.ln()).exp()
}

/// Affine coefficients of the Barenblatt solution, `c̄² = γ ρ̄^{γ−1}`.
pub fn barenblatt_affine(p: &BarenblattProfile, t: f64) -> AffineState {
    let s = 1.0 + t;
    let n = p.dim.n();
    AffineState {
        a: 1.0 / (p.k * s),
        b: p.gamma * p.b / s,
        e: p.gamma * p.a * s.powf(-n * (p.gamma - 1.0) / p.k),
        t,
    }
}

/// Integrated affine trajectory.
#[derive(Debug, Clone)]
pub struct AffineTrajectory {
    pub gamma: f64,
    pub dim: Dim,
    traj: Trajectory,
}

impl AffineTrajectory {
    pub fn len(&self) -> usize {
        self.traj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traj.is_empty()
    }

    pub fn states(&self) -> impl Iterator<Item = AffineState> + '_ {
        self.traj.iter().map(|(t, y)| AffineState { a: y[0], b: y[1], e: y[2], t })
    }

    pub fn final_state(&self) -> AffineState {
        let y = self.traj.final_state();
        AffineState {
            a: y[0],
            b: y[1],
            e: y[2],
            t: self.traj.final_time(),
        }
    }

    pub fn at(&self, t: f64) -> Result<AffineState> {
        let y = self.traj.interpolate(t)?;
        Ok(AffineState { a: y[0], b: y[1], e: y[2], t })
    }
}

/// Integrates the affine system from `init` to `t_end`.
pub fn integrate_affine(init: AffineState, gamma: f64, dim: Dim, t_end: f64, tol: f64) -> Result<AffineTrajectory> {
    if !(init.e > 0.0 && init.b > 0.0) {
        return Err(Error::InvalidInput("affine state needs e > 0 and b > 0".into()));
    }
    if !(gamma > 1.0) {
        return Err(Error::InvalidInput(format!("adiabatic exponent must exceed 1, got {gamma}")));
    }
    // Integrate (a, ln b, ln e): the logarithms keep b and e positive through
    // many decades of decay and make the first integral linear in the state.
    let ng = dim.n() * (gamma - 1.0);
    let problem = OdeProblem::new(init.t, vec![init.a, init.b.ln(), init.e.ln()], move |_t, y: &[f64], dy: &mut [f64]| {
        let (a, b) = (y[0], y[1].exp());
        dy[0] = -a * a - a + 2.0 * b / (gamma - 1.0);
        dy[1] = -(ng + 2.0) * a;
        dy[2] = -ng * a;
    });
    let opts = OdeOptions::new(tol, tol * 1e-2).with_max_step_frac(0.05);
    let log_traj = integrate_ode_with(&problem, t_end, &opts)?;

    // Re-express samples in (a, b, e) with matching derivatives for interpolation.
    let mut out = Vec::with_capacity(log_traj.len());
    for i in 0..log_traj.len() {
        let t = log_traj.times()[i];
        let y = log_traj.state(i);
        let s = AffineState { a: y[0], b: y[1].exp(), e: y[2].exp(), t };
        if !(s.b > 0.0 && s.e > 0.0 && s.b.is_finite() && s.e.is_finite()) {
            return Err(Error::PositivityLost { t, what: "affine b or e" });
        }
        out.push(s);
    }
    Ok(AffineTrajectory {
        gamma,
        dim,
        traj: rebuild(&out, gamma, dim),
    })
}

fn rebuild(states: &[AffineState], gamma: f64, dim: Dim) -> Trajectory {
    let mut tr = Trajectory::empty(3);
    for s in states {
        let d = affine_rhs(s, gamma, dim);
        tr.push_sample(s.t, &[s.a, s.b, s.e], &d);
    }
    tr
}

/// Samples of a scalar second-order ODE solution `(y, y_t)` with cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct ScalarFlow {
    traj: Trajectory,
}

impl ScalarFlow {
    pub fn t_range(&self) -> (f64, f64) {
        (self.traj.times()[0], self.traj.final_time())
    }

    pub fn len(&self) -> usize {
        self.traj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traj.is_empty()
    }

    /// Stored samples `(t, y, y_t)`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.traj.iter().map(|(t, y)| (t, y[0], y[1]))
    }

    pub fn value(&self, t: f64) -> Result<f64> {
        self.traj.component_at(0, t)
    }

    pub fn rate(&self, t: f64) -> Result<f64> {
        self.traj.component_at(1, t)
    }
}

fn second_order_options(tol: f64) -> OdeOptions {
    OdeOptions::new(tol, tol * 1e-2).with_max_step_frac(0.02)
}

/// Solution of the boundary-correction problem
/// `h'' + h' − k⁻¹(η̄_x + h)^{1−k} + η̄_xtt + η̄_xt = 0`, `h(0) = h'(0) = 0`,
/// with `η̄_x = (1+t)^{1/k}`.
#[derive(Debug, Clone)]
pub struct CorrectionTrajectory {
    pub gamma: f64,
    pub dim: Dim,
    pub k: f64,
    flow: ScalarFlow,
}

impl CorrectionTrajectory {
    /// Stored samples `(t, h, h_t)`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.flow.samples()
    }

    pub fn len(&self) -> usize {
        self.flow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flow.is_empty()
    }

    pub fn t_end(&self) -> f64 {
        self.flow.t_range().1
    }

    pub fn h(&self, t: f64) -> Result<f64> {
        self.flow.value(t)
    }

    pub fn h_t(&self, t: f64) -> Result<f64> {
        self.flow.rate(t)
    }

    /// `η̄_x(t) = (1+t)^{1/k}`.
    pub fn bar_eta_x(&self, t: f64) -> f64 {
        (1.0 + t).powf(1.0 / self.k)
    }

    pub fn bar_eta_xt(&self, t: f64) -> f64 {
        (1.0 + t).powf(1.0 / self.k - 1.0) / self.k
    }

    /// `η̃_x = η̄_x + h`.
    pub fn tilde_eta_x(&self, t: f64) -> Result<f64> {
        Ok(self.bar_eta_x(t) + self.h(t)?)
    }

    pub fn tilde_eta_xt(&self, t: f64) -> Result<f64> {
        Ok(self.bar_eta_xt(t) + self.h_t(t)?)
    }

    /// `(η̃_x, ∂_t η̃_x, ∂_t² η̃_x, ∂_t³ η̃_x)` with the higher derivatives
    /// taken from the ODE `λ'' = −λ' + λ^{1−k}/k` rather than by differencing.
    pub fn tilde_eta_x_derivatives(&self, t: f64) -> Result<[f64; 4]> {
        let l = self.tilde_eta_x(t)?;
        let l1 = self.tilde_eta_xt(t)?;
        let k = self.k;
        let l2 = -l1 + l.powf(1.0 - k) / k;
        let l3 = -l2 + (1.0 - k) / k * l.powf(-k) * l1;
        Ok([l, l1, l2, l3])
    }
}

/// Integrates the boundary correction `h` on `[0, t_end]`.
pub fn integrate_correction(gamma: f64, dim: Dim, t_end: f64, tol: f64) -> Result<CorrectionTrajectory> {
    if !(gamma > 1.0) {
        return Err(Error::InvalidInput(format!("adiabatic exponent must exceed 1, got {gamma}")));
    }
    let k = similarity_index(gamma, dim);
    let problem = OdeProblem::new(0.0, vec![0.0, 0.0], move |t, y: &[f64], dy: &mut [f64]| {
        let s = 1.0 + t;
        let bar = s.powf(1.0 / k);
        let bar_t = s.powf(1.0 / k - 1.0) / k;
        let bar_tt = (1.0 / k - 1.0) * s.powf(1.0 / k - 2.0) / k;
        dy[0] = y[1];
        dy[1] = -y[1] + (bar + y[0]).powf(1.0 - k) / k - bar_tt - bar_t;
    });
    let traj = integrate_ode_with(&problem, t_end, &second_order_options(tol))?;
    Ok(CorrectionTrajectory {
        gamma,
        dim,
        k,
        flow: ScalarFlow { traj },
    })
}

/// Scalar affine flow `η = λ(t) x` of the fixed-domain problem.
#[derive(Debug, Clone)]
pub struct AffineFlow {
    pub gamma: f64,
    pub dim: Dim,
    pub k: f64,
    pub a0: f64,
    flow: ScalarFlow,
}

impl AffineFlow {
    /// Stored samples `(t, λ, λ_t)`.
    pub fn samples(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.flow.samples()
    }

    pub fn len(&self) -> usize {
        self.flow.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flow.is_empty()
    }

    pub fn lambda(&self, t: f64) -> Result<f64> {
        self.flow.value(t)
    }

    pub fn lambda_t(&self, t: f64) -> Result<f64> {
        self.flow.rate(t)
    }
}

/// Integrates `λ'' + λ' = λ^{1−k}/k`, `λ(0) = 1`, `λ'(0) = a0`.
///
/// With `a0 = 1/k` (the Barenblatt strain rate at t = 0) this coincides with
/// `η̃_x = η̄_x + h`.
pub fn exact_affine_flow(gamma: f64, dim: Dim, a0: f64, t_end: f64, tol: f64) -> Result<AffineFlow> {
    if !(gamma > 1.0) {
        return Err(Error::InvalidInput(format!("adiabatic exponent must exceed 1, got {gamma}")));
    }
    let k = similarity_index(gamma, dim);
    let problem = OdeProblem::new(0.0, vec![1.0, a0], move |_t, y: &[f64], dy: &mut [f64]| {
        dy[0] = y[1];
        dy[1] = if y[0] > 0.0 {
            -y[1] + y[0].powf(1.0 - k) / k
        } else {
            f64::NAN
        };
    });
    let traj = integrate_ode_with(&problem, t_end, &second_order_options(tol)).map_err(|e| match e {
        Error::NonFinite { t } => Error::PositivityLost { t, what: "affine flow λ" },
        other => other,
    })?;
    Ok(AffineFlow {
        gamma,
        dim,
        k,
        a0,
        flow: ScalarFlow { traj },
    })
}
