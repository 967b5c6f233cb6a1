//! Residual thresholds.

use serde::{Deserialize, Serialize};

/// Policy turning a relative tolerance into the effective threshold used by
/// residual checks.
///
/// The effective threshold is `base_rtol * max(1, kappa)` when
/// `condition_scale` is on and `base_rtol` otherwise, where `kappa` is the
/// condition estimate relevant to the check at hand.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TolerancePolicy {
    pub base_rtol: f64,
    pub condition_scale: bool,
    pub machine_eps: f64,
}

impl Default for TolerancePolicy {
    fn default() -> Self {
        Self {
            base_rtol: 1e-10,
            condition_scale: true,
            machine_eps: f64::EPSILON,
        }
    }
}

impl TolerancePolicy {
    pub fn with_rtol(base_rtol: f64) -> Self {
        Self {
            base_rtol,
            ..Self::default()
        }
    }

    /// Effective threshold for a check with condition estimate `kappa`.
    pub fn threshold(&self, kappa: f64) -> f64 {
        if self.condition_scale {
            self.base_rtol * kappa.max(1.0)
        } else {
            self.base_rtol
        }
    }

    /// Threshold for checks with no meaningful conditioning dependence.
    pub fn flat(&self) -> f64 {
        self.base_rtol
    }

    pub fn validate(&self) -> Result<(), super::NumError> {
        if !(self.base_rtol > 0.0 && self.base_rtol.is_finite()) {
            return Err(super::NumError::Malformed(format!(
                "base_rtol must be positive and finite, got {}",
                self.base_rtol
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_scales_with_condition() {
        let tol = TolerancePolicy::default();
        assert_eq!(tol.threshold(0.5), 1e-10);
        assert_eq!(tol.threshold(1e4), 1e-6);
        let flat = TolerancePolicy {
            condition_scale: false,
            ..tol
        };
        assert_eq!(flat.threshold(1e4), 1e-10);
    }

    #[test]
    fn rejects_nonpositive_rtol() {
        assert!(TolerancePolicy::with_rtol(0.0).validate().is_err());
        assert!(TolerancePolicy::with_rtol(f64::NAN).validate().is_err());
        assert!(TolerancePolicy::default().validate().is_ok());
    }
}
