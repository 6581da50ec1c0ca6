use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the coarse-to-fine variational flow solver.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowParams {
    /// Weight of the robust smoothness term.
    pub alpha: f64,
    /// Per-level downscale factor, in `(0, 1)`.
    pub pyramid_ratio: f64,
    /// Smallest side length a pyramid level may have.
    pub min_width: usize,
    /// Relinearizations (re-warps) per level.
    pub outer_iterations: usize,
    /// Robust-weight updates per relinearization.
    pub inner_iterations: usize,
    /// SOR sweeps per linear system.
    pub sor_iterations: usize,
    /// Over-relaxation factor, in `(0, 2)`.
    pub sor_omega: f64,
    /// Constant of the penalty `ψ(s²) = sqrt(s² + ε²)`.
    pub epsilon: f64,
}

impl Default for FlowParams {
    fn default() -> Self {
        FlowParams {
            alpha: 0.012,
            pyramid_ratio: 0.75,
            min_width: 20,
            outer_iterations: 7,
            inner_iterations: 1,
            sor_iterations: 30,
            sor_omega: 1.8,
            epsilon: 1e-3,
        }
    }
}

impl FlowParams {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidConfig(format!("flow: {msg}")));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return fail("alpha must be positive");
        }
        if !(self.pyramid_ratio > 0.0 && self.pyramid_ratio < 1.0) {
            return fail("pyramid_ratio must lie in (0, 1)");
        }
        if self.min_width < 4 {
            return fail("min_width must be at least 4");
        }
        if self.outer_iterations == 0 || self.inner_iterations == 0 || self.sor_iterations == 0 {
            return fail("iteration counts must be at least 1");
        }
        if !(self.sor_omega > 0.0 && self.sor_omega < 2.0) {
            return fail("sor_omega must lie in (0, 2)");
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return fail("epsilon must be positive");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        FlowParams::default().validate().unwrap();
    }

    #[test]
    fn out_of_range_values_are_rejected() {
        let bad = [
            FlowParams {
                alpha: 0.0,
                ..Default::default()
            },
            FlowParams {
                pyramid_ratio: 1.0,
                ..Default::default()
            },
            FlowParams {
                min_width: 3,
                ..Default::default()
            },
            FlowParams {
                sor_iterations: 0,
                ..Default::default()
            },
            FlowParams {
                sor_omega: 2.0,
                ..Default::default()
            },
            FlowParams {
                epsilon: -1.0,
                ..Default::default()
            },
        ];
        for p in bad {
            assert!(p.validate().is_err(), "{p:?}");
        }
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let p: FlowParams = serde_json::from_str(r#"{"alpha": 0.02}"#).unwrap();
        assert_eq!(p.alpha, 0.02);
        assert_eq!(p.sor_iterations, 30);
    }
}
