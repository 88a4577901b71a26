use crate::error::{Error, Result};

use std::collections::VecDeque;

/// Number of previous time levels kept on a [`FlowState`].
pub const HISTORY_LEVELS: usize = 3;

/// One stored time level `(t, η, η_t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeLevel {
    pub t: f64,
    pub eta: Vec<f64>,
    pub eta_t: Vec<f64>,
}

/// Lagrangian positions and velocities on the reference grid.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub eta: Vec<f64>,
    pub eta_t: Vec<f64>,
    pub t: f64,
    /// Most recent previous levels, newest last.
    pub history: VecDeque<TimeLevel>,
}

impl FlowState {
    pub fn new(eta: Vec<f64>, eta_t: Vec<f64>, t: f64) -> Self {
        Self {
            eta,
            eta_t,
            t,
            history: VecDeque::with_capacity(HISTORY_LEVELS),
        }
    }

    pub(crate) fn remember(&mut self) {
        if self.history.len() == HISTORY_LEVELS {
            self.history.pop_front();
        }
        self.history.push_back(TimeLevel {
            t: self.t,
            eta: self.eta.clone(),
            eta_t: self.eta_t.clone(),
        });
    }

    /// Copy without the stored history, as kept in run snapshots.
    pub fn snapshot(&self) -> Self {
        Self::new(self.eta.clone(), self.eta_t.clone(), self.t)
    }

    pub fn len(&self) -> usize {
        self.eta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eta.is_empty()
    }
}

/// Output times of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnapshotLadder {
    /// `t = 2^{j/per_octave}`, `j = 0, 1, …`.
    Geometric { per_octave: u32 },
    /// `t = j · every`.
    Linear { every: f64 },
}

impl Default for SnapshotLadder {
    fn default() -> Self {
        SnapshotLadder::Geometric { per_octave: 4 }
    }
}

impl SnapshotLadder {
    /// Output times in `(0, t_end]`, always ending with `t_end`.
    pub fn times(&self, t_end: f64) -> Vec<f64> {
        let mut out = Vec::new();
        match *self {
            SnapshotLadder::Geometric { per_octave } => {
                let per = per_octave.max(1) as f64;
                let mut j = 0i32;
                loop {
                    let t = 2f64.powf(j as f64 / per);
                    if t >= t_end {
                        break;
                    }
                    out.push(t);
                    j += 1;
                }
            }
            SnapshotLadder::Linear { every } => {
                if every > 0.0 {
                    let mut j = 1u64;
                    while (j as f64) * every < t_end {
                        out.push(j as f64 * every);
                        j += 1;
                    }
                }
            }
        }
        if t_end > 0.0 {
            out.push(t_end);
        }
        out
    }
}

/// Options shared by the 1D and 3D time loops.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Courant number, `0 < cfl ≤ 0.9`.
    pub cfl: f64,
    pub ladder: SnapshotLadder,
    /// Optional hard cap on the time step.
    pub dt_max: Option<f64>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            cfl: 0.4,
            ladder: SnapshotLadder::default(),
            dt_max: None,
        }
    }
}


/// Spatial semi-discretisation driven by [`split_step`].
pub(crate) trait Scheme {
    /// Conservative acceleration (pressure part only, damping excluded).
    fn acceleration(&self, eta: &[f64], t: f64, out: &mut [f64]) -> Result<()>;
    /// Directional derivative of the acceleration along `v`.
    fn acceleration_jvp(&self, eta: &[f64], v: &[f64], out: &mut [f64]);
    /// Largest stable step for the given Courant number.
    fn stable_dt(&self, eta: &[f64], cfl: f64) -> f64;
}

/// `dt − (1 − e^{−dt})`, accurate for small `dt`.
fn drift_remainder(dt: f64) -> f64 {
    if dt < 0.1 {
        // alternating series dt²/2 − dt³/6 + …
        let mut term = dt * dt / 2.0;
        let mut sum = 0.0;
        for j in 3..14 {
            sum += term;
            term *= -dt / j as f64;
        }
        sum
    } else {
        dt + (-dt).exp_m1()
    }
}

/// One step of the exponential velocity-Verlet scheme for `η_tt + η_t = F(η)`:
///
/// ```text
/// η⁺ = η + (1 − e^{−dt}) v + (dt − 1 + e^{−dt}) F(η)
/// v⁺ = e^{−dt} v + (1 − e^{−dt} − β) F(η) + β F(η⁺),   β = (dt − 1 + e^{−dt})/dt
/// ```
///
/// The damping is integrated exactly, the step is exact for a constant force
/// and reduces to leapfrog when the damping is switched off.
pub(crate) fn split_step<S: Scheme>(scheme: &S, state: &mut FlowState, dt: f64, acc: &mut [f64]) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidInput(format!("time step must be positive, got {dt}")));
    }
    state.remember();
    let decay = (-dt).exp();
    let drift = -(-dt).exp_m1();
    let rem = drift_remainder(dt);
    let beta = rem / dt;
    scheme.acceleration(&state.eta, state.t, acc)?;
    for ((x, v), a) in state.eta.iter_mut().zip(state.eta_t.iter_mut()).zip(acc.iter()) {
        *x += drift * *v + rem * a;
        *v = decay * *v + (drift - beta) * a;
    }
    let t_new = state.t + dt;
    scheme.acceleration(&state.eta, t_new, acc)?;
    for (v, a) in state.eta_t.iter_mut().zip(acc.iter()) {
        *v += beta * a;
    }
    state.t = t_new;
    if state.eta_t.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { t: t_new });
    }
    Ok(())
}

/// Marches `state` to `t_end`, landing exactly on each ladder time.
///
/// `on_step` sees the initial state and every accepted step; the returned
/// snapshots start with the initial state.
pub(crate) fn march<S: Scheme>(
    scheme: &S,
    mut state: FlowState,
    t_end: f64,
    opts: &RunOptions,
    mut on_step: impl FnMut(&FlowState),
) -> Result<Vec<FlowState>> {
    if !(opts.cfl > 0.0 && opts.cfl <= 0.9) {
        return Err(Error::InvalidInput(format!("cfl must lie in (0, 0.9], got {}", opts.cfl)));
    }
    if !(t_end >= state.t) {
        return Err(Error::InvalidInput(format!("t_end = {t_end} precedes the start time")));
    }
    let mut acc = vec![0.0; state.len()];
    let mut snapshots = vec![state.snapshot()];
    on_step(&state);
    for target in opts.ladder.times(t_end) {
        while state.t < target {
            let mut dt = scheme.stable_dt(&state.eta, opts.cfl);
            if let Some(cap) = opts.dt_max {
                dt = dt.min(cap);
            }
            let remaining = target - state.t;
            // avoid a sliver step right before the output time
            if dt >= remaining || remaining - dt < 1e-3 * dt {
                dt = remaining;
            }
            split_step(scheme, &mut state, dt, &mut acc)?;
            if dt == remaining {
                state.t = target;
            }
            on_step(&state);
        }
        snapshots.push(state.snapshot());
    }
    Ok(snapshots)
}
