use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric policy shared by every decision in the crate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative threshold below which a coefficient counts as zero.
    pub tau_zero: f64,
    /// Root clustering radius, relative to the root spread.
    pub tau_root: f64,
    /// Margin for sign tests, relative to the evaluation magnitude.
    pub tau_sign: f64,
    /// Residual threshold for a convex combination to count as the zero polynomial.
    pub tau_proper: f64,
    /// Starting epsilon for the perturbation routines.
    pub epsilon_perturb: f64,
    /// Retry budget for epsilon-halving loops.
    pub max_retries: usize,
    /// Run properness checks in exact rational arithmetic.
    #[serde(default)]
    pub exact_rational: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tau_zero: 1e-12,
            tau_root: 1e-6,
            tau_sign: 1e-9,
            tau_proper: 1e-9,
            epsilon_perturb: 1e-2,
            max_retries: 40,
            exact_rational: false,
        }
    }
}

impl Tolerances {
    /// Named profiles; `default` is what the acceptance suite runs with.
    pub fn profile(name: &str) -> Result<Self> {
        let base = Tolerances::default();
        match name {
            "default" => Ok(base),
            "strict" => Ok(Tolerances {
                tau_root: 1e-8,
                tau_sign: 1e-11,
                tau_proper: 1e-11,
                ..base
            }),
            "loose" => Ok(Tolerances {
                tau_zero: 1e-10,
                tau_root: 1e-5,
                tau_sign: 1e-7,
                tau_proper: 1e-7,
                ..base
            }),
            other => Err(Error::InvalidTolerance(format!("unknown profile `{other}`"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("tau_zero", self.tau_zero),
            ("tau_root", self.tau_root),
            ("tau_sign", self.tau_sign),
            ("tau_proper", self.tau_proper),
            ("epsilon_perturb", self.epsilon_perturb),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidTolerance(format!("{name} must be positive, got {v}")));
            }
        }
        if self.epsilon_perturb >= 1.0 {
            return Err(Error::InvalidTolerance("epsilon_perturb must be below 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_validate() {
        for name in ["default", "strict", "loose"] {
            Tolerances::profile(name).unwrap().validate().unwrap();
        }
        assert!(Tolerances::profile("nope").is_err());
        let bad = Tolerances {
            epsilon_perturb: 1.5,
            ..Tolerances::default()
        };
        assert!(bad.validate().is_err());
        let bad = Tolerances {
            tau_root: 0.0,
            ..Tolerances::default()
        };
        assert!(bad.validate().is_err());
    }
}
