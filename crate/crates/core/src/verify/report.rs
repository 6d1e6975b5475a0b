use std::fmt::Write as _;
use std::io::Write;

/// Slacks below this count as violations.
pub const SLACK_TOL: f64 = -1e-10;

/// Aggregate of one named check over all samples.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckSummary {
    pub name: &'static str,
    pub evaluations: u64,
    pub violations: u64,
    pub worst_slack: f64,
    /// Input that produced `worst_slack`.
    pub worst_input: Vec<f64>,
    /// Extra parameters of the worst case (index tuple, ε, …).
    pub worst_detail: String,
}

impl CheckSummary {
    pub(crate) fn new(name: &'static str) -> Self {
        Self {
            name,
            evaluations: 0,
            violations: 0,
            worst_slack: f64::INFINITY,
            worst_input: Vec::new(),
            worst_detail: String::new(),
        }
    }

    pub(crate) fn record(&mut self, slack: f64, input: &[f64], detail: impl FnOnce() -> String) {
        self.evaluations += 1;
        // NaN counts as a violation
        if !(slack >= SLACK_TOL) {
            self.violations += 1;
        }
        if slack < self.worst_slack || (slack.is_nan() && !self.worst_slack.is_nan()) {
            self.worst_slack = slack;
            self.worst_input = input.to_vec();
            self.worst_detail = detail();
        }
    }

    /// Folds a later partial summary into this one; ties keep the earlier case.
    pub(crate) fn merge(&mut self, other: CheckSummary) {
        self.evaluations += other.evaluations;
        self.violations += other.violations;
        if other.worst_slack < self.worst_slack || (other.worst_slack.is_nan() && !self.worst_slack.is_nan()) {
            self.worst_slack = other.worst_slack;
            self.worst_input = other.worst_input;
            self.worst_detail = other.worst_detail;
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagnosticReport {
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    pub seed: u64,
    pub checks: Vec<CheckSummary>,
    /// Largest quadratic-split witness on the `σ_k = 1` level set.
    pub quad_split_max_witness: f64,
    pub quad_split_bound: f64,
}

impl DiagnosticReport {
    pub fn total_violations(&self) -> u64 {
        self.checks.iter().map(|c| c.violations).sum()
    }

    pub fn has_violations(&self) -> bool {
        self.total_violations() > 0
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// `n,k,check,evaluations,violations,worst_slack,worst_input,worst_detail`;
    /// vector entries are separated by `;`.
    pub fn write_csv<W: Write>(&self, mut out: W, header: bool) -> std::io::Result<()> {
        if header {
            writeln!(out, "n,k,check,evaluations,violations,worst_slack,worst_input,worst_detail")?;
        }
        for c in &self.checks {
            let input: Vec<String> = c.worst_input.iter().map(|v| v.to_string()).collect();
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                self.n,
                self.k,
                c.name,
                c.evaluations,
                c.violations,
                c.worst_slack,
                input.join(";"),
                c.worst_detail
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "n = {}, k = {}, {} samples, seed {}", self.n, self.k, self.samples, self.seed);
        for c in &self.checks {
            let _ = writeln!(
                s,
                "  {:<20} {:>9} evaluations  {:>4} violations  worst slack {:.3e}",
                c.name, c.evaluations, c.violations, c.worst_slack
            );
        }
        let _ = writeln!(
            s,
            "  quad-split witness max {:.4} (bound {:.4})",
            self.quad_split_max_witness, self.quad_split_bound
        );
        let _ = writeln!(s, "  total violations: {}", self.total_violations());
        s
    }
}
