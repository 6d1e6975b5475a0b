use super::SolverError;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// L∞ residual target.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    /// Step multiplier on each backtrack.
    pub backtrack_factor: f64,
    pub min_step: f64,
    /// A step must bring the residual below this fraction of the old one.
    pub sufficient_decrease: f64,
    pub continuity_dt0: f64,
    pub dt_min: f64,
    pub dt_growth: f64,
    /// Stages finishing in at most this many Newton iterations grow `dt`.
    pub fast_stage_iters: usize,
    /// Relative residual for the inner linear solves.
    pub linear_tol: f64,
    pub linear_max_iters: usize,
    /// Largest system handed to the dense fallback.
    pub dense_limit: usize,
    /// Absolute slack allowed in `σ_k(λ̲) ≥ ψ`.
    pub subsolution_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-9,
            max_newton_iters: 50,
            backtrack_factor: 0.5,
            min_step: 2f64.powi(-20),
            sufficient_decrease: 0.99,
            continuity_dt0: 0.25,
            dt_min: 2f64.powi(-12),
            dt_growth: 1.5,
            fast_stage_iters: 4,
            linear_tol: 1e-10,
            linear_max_iters: 20_000,
            dense_limit: 2500,
            subsolution_tol: 1e-12,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let positive = [
            ("newton_tol", self.newton_tol),
            ("min_step", self.min_step),
            ("continuity_dt0", self.continuity_dt0),
            ("dt_min", self.dt_min),
            ("linear_tol", self.linear_tol),
            ("subsolution_tol", self.subsolution_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(SolverError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.newton_tol >= 1.0 {
            return Err(SolverError::Config("newton_tol must be below 1".into()));
        }
        if !(self.backtrack_factor > 0.0 && self.backtrack_factor < 1.0) {
            return Err(SolverError::Config("backtrack_factor must lie in (0, 1)".into()));
        }
        if !(self.sufficient_decrease > 0.0 && self.sufficient_decrease <= 1.0) {
            return Err(SolverError::Config("sufficient_decrease must lie in (0, 1]".into()));
        }
        if self.dt_growth < 1.0 {
            return Err(SolverError::Config("dt_growth must be at least 1".into()));
        }
        if self.dt_min > self.continuity_dt0 || self.continuity_dt0 > 1.0 {
            return Err(SolverError::Config("need dt_min ≤ continuity_dt0 ≤ 1".into()));
        }
        if self.max_newton_iters == 0 || self.linear_max_iters == 0 {
            return Err(SolverError::Config("iteration limits must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SolverConfig::default();
        c.validate().unwrap();
        assert_eq!(c.min_step, 1.0 / 1048576.0);
        assert_eq!(c.dt_min, 1.0 / 4096.0);
    }

    #[test]
    fn rejects_bad_values() {
        let c = SolverConfig { newton_tol: 2.0, ..Default::default() };
        assert!(c.validate().is_err());
        let c = SolverConfig { dt_min: 0.5, ..Default::default() };
        assert!(c.validate().is_err());
        let c = SolverConfig { linear_tol: -1.0, ..Default::default() };
        assert!(c.validate().is_err());
    }
}
