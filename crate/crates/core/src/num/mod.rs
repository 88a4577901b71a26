//! Shared numerical kernels: an adaptive Dormand–Prince integrator, adaptive
//! Gauss–Kronrod quadrature, Brent root bracketing and log-log rate fitting.
//!
//! Everything here is a pure function of its inputs.

mod fit;
mod ode;
mod quad;
mod root;

pub use fit::{fit_rate, log_uniform_resample, RateFit, MIN_FIT_SAMPLES};
pub use ode::{integrate_ode, integrate_ode_with, OdeOptions, OdeProblem, Trajectory};
pub use quad::quad_weighted;
pub use root::find_root;

/// Cubic Hermite interpolation on `[t0, t1]` from values and slopes at the ends.
pub(crate) fn hermite(t0: f64, t1: f64, y0: f64, y1: f64, d0: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    if h == 0.0 {
        return y0;
    }
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Derivative of [`hermite`] with respect to `t`.
pub(crate) fn hermite_slope(t0: f64, t1: f64, y0: f64, y1: f64, d0: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    if h == 0.0 {
        return d0;
    }
    let s = (t - t0) / h;
    let s2 = s * s;
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1
}

/// Index `i` such that `ts[i] <= t <= ts[i + 1]`; `ts` must be sorted and hold at least two entries.
pub(crate) fn bracket_index(ts: &[f64], t: f64) -> usize {
    let n = ts.len();
    match ts.partition_point(|&x| x <= t) {
        0 => 0,
        p if p >= n => n - 2,
        p => p - 1,
    }
}
