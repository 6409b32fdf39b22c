use serde::Serialize;

/// One pass/fail line of a validation report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// Passes when `value <= tolerance` (and `value` is not NaN).
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance,
            pass: value <= tolerance,
        }
    }

    /// Informational entry; always passes.
    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Check {
            name: name.into(),
            value,
            tolerance: f64::INFINITY,
            pass: true,
        }
    }

    pub fn line(&self) -> String {
        let verdict = if self.pass { "PASS" } else { "FAIL" };
        if self.tolerance.is_finite() {
            format!("{verdict} {:<36} {:.3e} (tol {:.1e})", self.name, self.value, self.tolerance)
        } else {
            format!("INFO {:<36} {:.6e}", self.name, self.value)
        }
    }
}
