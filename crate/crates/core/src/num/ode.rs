use crate::error::{Error, Result};

use super::{bracket_index, hermite, hermite_slope};

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Difference between the 5th and embedded 4th order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// Initial value problem `y' = rhs(t, y)`, `y(t0) = y0`.
///
/// The right-hand side writes the derivative into its output slice and must not
/// carry hidden state between calls.
pub struct OdeProblem<F> {
    pub t0: f64,
    pub y0: Vec<f64>,
    pub rhs: F,
}

impl<F> OdeProblem<F>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    pub fn new(t0: f64, y0: Vec<f64>, rhs: F) -> Self {
        Self { t0, y0, rhs }
    }

    pub fn dimension(&self) -> usize {
        self.y0.len()
    }
}

/// Step-size control settings for [`integrate_ode_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Caps each step at `frac * (1 + |t|)`; keeps the stored samples dense
    /// enough for Hermite interpolation on long geometric time spans.
    pub max_step_frac: Option<f64>,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            rel_tol,
            abs_tol,
            max_step_frac: None,
            max_steps: 10_000_000,
        }
    }

    pub fn with_max_step_frac(mut self, frac: f64) -> Self {
        self.max_step_frac = Some(frac);
        self
    }
}

/// Accepted samples of an ODE solution together with the derivative at each sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dim: usize,
    times: Vec<f64>,
    states: Vec<f64>,
    derivs: Vec<f64>,
}

impl Trajectory {
    pub(crate) fn empty(dim: usize) -> Self {
        Self {
            dim,
            times: Vec::new(),
            states: Vec::new(),
            derivs: Vec::new(),
        }
    }

    pub(crate) fn push_sample(&mut self, t: f64, y: &[f64], dy: &[f64]) {
        self.times.push(t);
        self.states.extend_from_slice(y);
        self.derivs.extend_from_slice(dy);
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn state(&self, i: usize) -> &[f64] {
        &self.states[i * self.dim..(i + 1) * self.dim]
    }

    pub fn derivative(&self, i: usize) -> &[f64] {
        &self.derivs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory holds the initial sample")
    }

    pub fn final_state(&self) -> &[f64] {
        self.state(self.len() - 1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &[f64])> + '_ {
        self.times
            .iter()
            .zip(self.states.chunks_exact(self.dim))
            .map(|(&t, y)| (t, y))
    }

    /// Cubic Hermite interpolation of component `comp` at time `t`.
    pub fn component_at(&self, comp: usize, t: f64) -> Result<f64> {
        let (i, t0, t1) = self.locate(t)?;
        let d = self.dim;
        Ok(hermite(
            t0,
            t1,
            self.states[i * d + comp],
            self.states[(i + 1) * d + comp],
            self.derivs[i * d + comp],
            self.derivs[(i + 1) * d + comp],
            t,
        ))
    }

    /// Time derivative of the Hermite interpolant of component `comp`.
    pub fn component_slope_at(&self, comp: usize, t: f64) -> Result<f64> {
        let (i, t0, t1) = self.locate(t)?;
        let d = self.dim;
        Ok(hermite_slope(
            t0,
            t1,
            self.states[i * d + comp],
            self.states[(i + 1) * d + comp],
            self.derivs[i * d + comp],
            self.derivs[(i + 1) * d + comp],
            t,
        ))
    }

    pub fn interpolate(&self, t: f64) -> Result<Vec<f64>> {
        (0..self.dim).map(|c| self.component_at(c, t)).collect()
    }

    fn locate(&self, t: f64) -> Result<(usize, f64, f64)> {
        let lo = self.times[0];
        let hi = self.final_time();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfRange { t, lo, hi });
        }
        if self.len() == 1 {
            return Ok((0, lo, lo));
        }
        let i = bracket_index(&self.times, t);
        Ok((i, self.times[i], self.times[i + 1]))
    }
}

/// Integrates `problem` from `t0` to `t_end` with an adaptive Dormand–Prince 5(4) pair.
pub fn integrate_ode<F>(problem: &OdeProblem<F>, t_end: f64, rel_tol: f64, abs_tol: f64) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    integrate_ode_with(problem, t_end, &OdeOptions::new(rel_tol, abs_tol))
}

/// Like [`integrate_ode`] with explicit step-control options.
///
/// Local error is measured per step while `h <= 1` and per unit step beyond,
/// so that very long integrations do not accumulate error linearly in the
/// number of large steps.
pub fn integrate_ode_with<F>(problem: &OdeProblem<F>, t_end: f64, opts: &OdeOptions) -> Result<Trajectory>
where
    F: Fn(f64, &[f64], &mut [f64]),
{
    let n = problem.dimension();
    if n == 0 {
        return Err(Error::InvalidInput("ODE dimension must be at least 1".into()));
    }
    if !(t_end > problem.t0) {
        return Err(Error::InvalidInput(format!(
            "t_end = {t_end} must exceed t0 = {}",
            problem.t0
        )));
    }
    if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0) {
        return Err(Error::InvalidInput("tolerances must be positive".into()));
    }
    let rhs = &problem.rhs;
    let scale = |a: f64, b: f64| opts.abs_tol + opts.rel_tol * a.abs().max(b.abs());

    let mut t = problem.t0;
    let mut y = problem.y0.clone();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    rhs(t, &y, &mut k[0]);
    check_finite(t, &k[0])?;

    let mut traj = Trajectory::empty(n);
    traj.push_sample(t, &y, &k[0]);

    let rms = |v: &[f64], s: &dyn Fn(usize) -> f64| -> f64 {
        (v.iter().enumerate().map(|(i, x)| (x / s(i)).powi(2)).sum::<f64>() / n as f64).sqrt()
    };
    let d0 = rms(&y, &|i| scale(y[i], y[i]));
    let d1 = rms(&k[0], &|i| scale(y[i], y[i]));
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(t_end - t);

    let mut stage = vec![0.0; n];
    let mut y_new = vec![0.0; n];
    let mut steps = 0usize;

    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::StepSizeUnderflow { t, step: h });
        }
        if let Some(frac) = opts.max_step_frac {
            h = h.min(frac * (1.0 + t.abs()));
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepSizeUnderflow { t, step: h });
        }

        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for j in 0..s {
                    acc += h * A[s][j] * k[j][i];
                }
                stage[i] = acc;
            }
            rhs(t + C[s] * h, &stage, &mut k[s]);
            check_finite(t + C[s] * h, &k[s])?;
        }
        // Stage 7 is evaluated at the 5th-order solution (FSAL).
        y_new.copy_from_slice(&stage);

        let mut err = 0.0;
        for i in 0..n {
            let mut e = 0.0;
            for (s, es) in E.iter().enumerate() {
                e += es * k[s][i];
            }
            e *= h;
            err += (e / scale(y[i], y_new[i])).powi(2);
        }
        let mut err = (err / n as f64).sqrt();
        if h > 1.0 {
            err *= h;
        }
        if !err.is_finite() {
            return Err(Error::NonFinite { t });
        }

        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y.copy_from_slice(&y_new);
            k.swap(0, 6);
            traj.push_sample(t, &y, &k[0]);
            steps += 1;
            let factor = if err == 0.0 {
                MAX_FACTOR
            } else {
                (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
            };
            h *= factor;
        } else {
            h *= (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, 1.0);
        }
    }
    Ok(traj)
}

fn check_finite(t: f64, v: &[f64]) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { t })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay() -> OdeProblem<impl Fn(f64, &[f64], &mut [f64])> {
        OdeProblem::new(0.0, vec![1.0], |_t, y: &[f64], dy: &mut [f64]| dy[0] = -y[0])
    }

    #[test]
    fn exponential_decay() {
        let tr = integrate_ode(&decay(), 1.0, 1e-10, 1e-12).unwrap();
        assert_eq!(tr.times()[0], 0.0);
        assert_eq!(tr.final_time(), 1.0);
        assert!((tr.final_state()[0] - (-1.0f64).exp()).abs() < 1e-9);
        assert!(tr.times().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn constant_solution_is_exact() {
        let p = OdeProblem::new(0.0, vec![3.25], |_t, _y: &[f64], dy: &mut [f64]| dy[0] = 0.0);
        let tr = integrate_ode(&p, 10.0, 1e-8, 1e-8).unwrap();
        assert!(tr.iter().all(|(_, y)| y[0] == 3.25));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            integrate_ode(&decay(), 0.0, 1e-8, 1e-8),
            Err(Error::InvalidInput(_))
        ));
        assert!(matches!(
            integrate_ode(&decay(), 1.0, 0.0, 1e-8),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn nan_in_rhs_aborts() {
        let p = OdeProblem::new(0.0, vec![1.0], |t, _y: &[f64], dy: &mut [f64]| {
            dy[0] = if t > 0.5 { f64::NAN } else { 1.0 }
        });
        assert!(matches!(integrate_ode(&p, 1.0, 1e-8, 1e-8), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn blow_up_underflows() {
        // y' = y^2, y(0) = 1 blows up at t = 1.
        let p = OdeProblem::new(0.0, vec![1.0], |_t, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * y[0]);
        let r = integrate_ode(&p, 2.0, 1e-8, 1e-8);
        assert!(matches!(
            r,
            Err(Error::StepSizeUnderflow { .. }) | Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn error_shrinks_with_tolerance() {
        // Harmonic oscillator over a few periods.
        let p = OdeProblem::new(0.0, vec![1.0, 0.0], |_t, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0];
        });
        let t_end = 10.0;
        let err = |tol: f64| {
            let tr = integrate_ode(&p, t_end, tol, tol * 1e-2).unwrap();
            let y = tr.final_state();
            ((y[0] - t_end.cos()).powi(2) + (y[1] + t_end.sin()).powi(2)).sqrt()
        };
        for tol in [1e-6, 1e-7, 1e-8] {
            let coarse = err(tol);
            let fine = err(tol / 16.0);
            assert!(coarse / fine >= 8.0, "tol {tol}: {coarse:e} -> {fine:e}");
        }
    }

    #[test]
    fn hermite_interpolation_is_accurate_with_step_cap() {
        let opts = OdeOptions::new(1e-12, 1e-14).with_max_step_frac(0.01);
        let tr = integrate_ode_with(&decay(), 5.0, &opts).unwrap();
        for t in [0.013, 0.77, 2.5, 4.999] {
            let y = tr.component_at(0, t).unwrap();
            // cubic Hermite remainder h⁴/384 · max|y⁗| with h = 0.01
            assert!((y - (-t).exp()).abs() < 3e-11, "{t}: {:e}", y - (-t).exp());
            let dy = tr.component_slope_at(0, t).unwrap();
            assert!((dy + (-t).exp()).abs() < 1e-7);
        }
        assert!(matches!(tr.component_at(0, 5.1), Err(Error::OutOfRange { .. })));
    }
}
