use serde::{Deserialize, Serialize};

/// Numerical tolerance policy for the floating-point side of the workbench.
///
/// Exact (rational) computations ignore these. The defaults are tuned for
/// dense double-precision models of real dimension up to 64.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Residual bound for eigenpairs and eigenvalue clustering width.
    pub eig_tol: f64,
    /// Singular-value threshold for rank decisions on subspaces.
    pub rank_tol: f64,
    /// Minimum distance of a spectral cutoff from the spectrum.
    pub gap_tol: f64,
    /// Default parameter step for operator paths.
    pub path_step: f64,
}

impl ToleranceConfig {
    pub const fn new(eig_tol: f64, rank_tol: f64, gap_tol: f64, path_step: f64) -> Self {
        ToleranceConfig {
            eig_tol,
            rank_tol,
            gap_tol,
            path_step,
        }
    }

    /// Tighter profile, selectable through `WORKBENCH_TOLERANCE_PROFILE=strict`.
    pub const fn strict() -> Self {
        ToleranceConfig::new(1e-12, 1e-10, 1e-8, 1e-3)
    }

    /// Resolve a profile by name (`default` or `strict`).
    pub fn from_profile(name: &str) -> Option<Self> {
        match name {
            "default" => Some(ToleranceConfig::default()),
            "strict" => Some(ToleranceConfig::strict()),
            _ => None,
        }
    }

    pub fn validate(&self) -> crate::Result<()> {
        for (name, v) in [
            ("eig_tol", self.eig_tol),
            ("rank_tol", self.rank_tol),
            ("gap_tol", self.gap_tol),
            ("path_step", self.path_step),
        ] {
            if !(v > 0.0) {
                return Err(crate::Error::OutOfRange(format!(
                    "tolerance {name} must be strictly positive, got {v}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig::new(1e-10, 1e-8, 1e-6, 1e-2)
    }
}
