//! Initial perturbations of the Barenblatt start.
//!
//! In one dimension the fields are the displacement `w₀` and velocity `w₁`
//! added to `η = x`, `η_t = x/k`. In the spherically symmetric solver they are
//! the relative fields `ζ₀`, `ζ₁` with `η = r(1 + ζ₀)`, `η_t = r(1/k + ζ₁)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum PerturbationSpec {
    Zero,
    /// Constant displacement (a rigid shift in 1D, a uniform dilation in 3D).
    Translation { epsilon: f64 },
    /// Constant initial velocity perturbation.
    Kick { v0: f64 },
    /// Gaussian displacement `ε exp(−(x − x_c)²/σ²)` with zero velocity perturbation.
    Bump { epsilon: f64, center: f64, width: f64 },
    /// Displacement and velocity sampled at the grid nodes.
    Custom { w0: Vec<f64>, w1: Vec<f64> },
}

impl PerturbationSpec {
    /// Evaluates `(w₀, w₁)` at the given nodes.
    pub fn sample(&self, nodes: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = nodes.len();
        let fill = |v: f64| vec![v; n];
        match self {
            PerturbationSpec::Zero => Ok((fill(0.0), fill(0.0))),
            PerturbationSpec::Translation { epsilon } => Ok((fill(*epsilon), fill(0.0))),
            PerturbationSpec::Kick { v0 } => Ok((fill(0.0), fill(*v0))),
            PerturbationSpec::Bump { epsilon, center, width } => {
                if !(*width > 0.0) {
                    return Err(Error::InvalidInput("bump width must be positive".into()));
                }
                let w0 = nodes
                    .iter()
                    .map(|x| epsilon * (-((x - center) / width).powi(2)).exp())
                    .collect();
                Ok((w0, fill(0.0)))
            }
            PerturbationSpec::Custom { w0, w1 } => {
                if w0.len() != n || w1.len() != n {
                    return Err(Error::InvalidInput(format!(
                        "custom perturbation has {} / {} samples for {n} nodes",
                        w0.len(),
                        w1.len()
                    )));
                }
                if w0.iter().chain(w1).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidInput("custom perturbation is not finite".into()));
                }
                Ok((w0.clone(), w1.clone()))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples() {
        let nodes = [-1.0, 0.0, 1.0];
        let (w0, w1) = PerturbationSpec::Translation { epsilon: 0.5 }.sample(&nodes).unwrap();
        assert_eq!(w0, vec![0.5; 3]);
        assert_eq!(w1, vec![0.0; 3]);
        let (w0, _) = PerturbationSpec::Bump { epsilon: 1.0, center: 0.0, width: 1.0 }
            .sample(&nodes)
            .unwrap();
        assert_eq!(w0[1], 1.0);
        assert!((w0[0] - (-1.0f64).exp()).abs() < 1e-15);
        assert!(PerturbationSpec::Custom { w0: vec![0.0; 2], w1: vec![0.0; 3] }
            .sample(&nodes)
            .is_err());
    }
}
