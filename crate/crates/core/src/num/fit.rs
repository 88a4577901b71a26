use crate::error::{Error, Result};

pub const MIN_FIT_SAMPLES: usize = 8;

/// Power-law fit `v ≈ amplitude * (1 + t)^exponent` over a time window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub exponent: f64,
    pub amplitude: f64,
    pub window: (f64, f64),
    /// RMS of the residual in `ln v`.
    pub residual_rms: f64,
}

/// Least-squares fit of `ln v` against `ln(1 + t)` on samples with `t` in `window`.
pub fn fit_rate(series: &[(f64, f64)], window: (f64, f64)) -> Result<RateFit> {
    let (lo, hi) = window;
    if !(lo < hi) {
        return Err(Error::InvalidInput(format!("empty fit window [{lo}, {hi}]")));
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(t, v) in series {
        if t < lo || t > hi {
            continue;
        }
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::NonPositiveSample { t, v });
        }
        xs.push((1.0 + t).ln());
        ys.push(v.ln());
    }
    if xs.len() < MIN_FIT_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_FIT_SAMPLES,
            found: xs.len(),
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidInput("fit window holds a single time".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(RateFit {
        exponent: slope,
        amplitude: intercept.exp(),
        window,
        residual_rms: (rss / n).sqrt(),
    })
}

/// Linear interpolation of a time-sorted series at `count` log-uniform times
/// spanning `window`. Dense step-by-step series would otherwise let the late
/// times dominate a least-squares fit in `ln(1 + t)`.
pub fn log_uniform_resample(series: &[(f64, f64)], window: (f64, f64), count: usize) -> Result<Vec<(f64, f64)>> {
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi) || count < 2 {
        return Err(Error::InvalidInput(format!("bad resampling window [{lo}, {hi}]")));
    }
    let (first, last) = match (series.first(), series.last()) {
        (Some(f), Some(l)) => (f.0, l.0),
        _ => return Err(Error::InsufficientSamples { needed: 2, found: 0 }),
    };
    if lo < first || hi > last {
        return Err(Error::OutOfRange { t: if lo < first { lo } else { hi }, lo: first, hi: last });
    }
    let mut out = Vec::with_capacity(count);
    let mut j = 0;
    for i in 0..count {
        let t = if i + 1 == count {
            hi
        } else {
            lo * (hi / lo).powf(i as f64 / (count - 1) as f64)
        };
        while j + 2 < series.len() && series[j + 1].0 < t {
            j += 1;
        }
        let (t0, v0) = series[j];
        let (t1, v1) = series[(j + 1).min(series.len() - 1)];
        let v = if t1 > t0 { v0 + (v1 - v0) * (t - t0) / (t1 - t0) } else { v0 };
        out.push((t, v));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn geometric(lo: f64, hi: f64, n: usize, f: impl Fn(f64) -> f64) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let t = lo * (hi / lo).powf(i as f64 / (n - 1) as f64);
                (t, f(t))
            })
            .collect()
    }

    #[test]
    fn exact_inverse() {
        let s = geometric(100.0, 1e4, 40, |t| 1.0 / (1.0 + t));
        let fit = fit_rate(&s, (100.0, 1e4)).unwrap();
        assert!((fit.exponent + 1.0).abs() < 1e-6);
        assert!(fit.residual_rms < 1e-10);
    }

    #[test]
    fn amplitude_recovered() {
        let s = geometric(1.0, 1e4, 50, |t| 5.0 * (1.0 + t).powf(-2.0 / 3.0));
        let fit = fit_rate(&s, (100.0, 1e4)).unwrap();
        assert!((fit.exponent + 2.0 / 3.0).abs() < 1e-6);
        assert!((fit.amplitude - 5.0).abs() < 1e-6);
    }

    #[test]
    fn logarithm_biases_slope_upward() {
        let s = geometric(100.0, 1e4, 60, |t| (1.0 + t).ln() / (1.0 + t));
        let fit = fit_rate(&s, (100.0, 1e4)).unwrap();
        assert!(fit.exponent > -1.0 && fit.exponent < -0.85, "{}", fit.exponent);
    }

    #[test]
    fn too_few_samples() {
        let s = geometric(100.0, 1e4, 7, |t| 1.0 / t);
        assert!(matches!(
            fit_rate(&s, (100.0, 1e4)),
            Err(Error::InsufficientSamples { found: 7, .. })
        ));
    }

    #[test]
    fn non_positive_rejected() {
        let mut s = geometric(100.0, 1e4, 20, |t| 1.0 / t);
        s[5].1 = 0.0;
        assert!(matches!(fit_rate(&s, (100.0, 1e4)), Err(Error::NonPositiveSample { .. })));
    }

    #[test]
    fn resampling_is_log_uniform() {
        let dense: Vec<_> = (0..=10_000).map(|i| (i as f64, 2.0 * i as f64)).collect();
        let r = log_uniform_resample(&dense, (10.0, 1e4), 4).unwrap();
        let ts: Vec<f64> = r.iter().map(|p| p.0).collect();
        for (t, want) in ts.iter().zip([10.0, 100.0, 1000.0, 1e4]) {
            assert!((t / want - 1.0).abs() < 1e-12);
        }
        for (t, v) in r {
            assert!((v - 2.0 * t).abs() < 1e-9);
        }
        assert!(log_uniform_resample(&dense, (10.0, 2e4), 4).is_err());
    }

    proptest! {
        #[test]
        fn recovers_power_laws(p in -3.0f64..3.0, amp in 1e-3f64..1e3) {
            let s = geometric(10.0, 1e5, 30, |t| amp * (1.0 + t).powf(p));
            let fit = fit_rate(&s, (10.0, 1e5)).unwrap();
            prop_assert!((fit.exponent - p).abs() < 1e-6);
            prop_assert!((fit.amplitude / amp - 1.0).abs() < 1e-6);
        }
    }
}
