//! Verification reports: a named list of pass/fail checks with the numbers
//! that produced the verdict, serialized as JSON.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::Params;

/// One verified quantity. Two-sided checks pass when
/// |value - expected| <= tolerance; one-sided checks encode the bound in
/// `expected` with `tolerance` zero and the direction in the name/docs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub paper_anchor: String,
}

impl Check {
    /// Two-sided: value must match `expected` within absolute `tol`.
    pub fn close(name: &str, value: f64, expected: f64, tol: f64, anchor: &str) -> Check {
        Check {
            name: name.into(),
            value,
            expected,
            tolerance: tol,
            pass: value.is_finite() && (value - expected).abs() <= tol,
            paper_anchor: anchor.into(),
        }
    }

    /// Two-sided with tolerance relative to |expected|.
    pub fn close_rel(name: &str, value: f64, expected: f64, rel: f64, anchor: &str) -> Check {
        Check::close(name, value, expected, rel * expected.abs(), anchor)
    }

    /// One-sided: value must not exceed `bound`.
    pub fn at_most(name: &str, value: f64, bound: f64, anchor: &str) -> Check {
        Check {
            name: name.into(),
            value,
            expected: bound,
            tolerance: 0.0,
            pass: value.is_finite() && value <= bound,
            paper_anchor: anchor.into(),
        }
    }

    /// One-sided: value must reach at least `bound`.
    pub fn at_least(name: &str, value: f64, bound: f64, anchor: &str) -> Check {
        Check {
            name: name.into(),
            value,
            expected: bound,
            tolerance: 0.0,
            pass: value.is_finite() && value >= bound,
            paper_anchor: anchor.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub suite: String,
    pub params: Params,
    pub checks: Vec<Check>,
    pub series_file: Option<String>,
    /// Wall-clock seconds; the one field exempt from the bit-identical
    /// reproducibility guarantee.
    pub wallclock_s: f64,
}

impl Report {
    pub fn new(suite: &str, params: Params) -> Report {
        Report {
            suite: suite.into(),
            params,
            checks: Vec::new(),
            series_file: None,
            wallclock_s: 0.0,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    /// The report passes iff every check passes.
    pub fn pass(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| crate::error::Error::BadConfig(e.to_string()))?;
        text.push('\n');
        Ok(text)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// One human-readable line per check.
    pub fn render_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.pass { "pass" } else { "FAIL" };
            out.push_str(&format!(
                "[{verdict}] {suite}/{name}: value {value:.9e}, expected {expected:.9e} (tol {tol:.3e})\n",
                suite = self.suite,
                name = c.name,
                value = c.value,
                expected = c.expected,
                tol = c.tolerance,
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::Params;

    fn params() -> Params {
        Params::new(1, 2.0, 2.0).unwrap()
    }

    #[test]
    fn check_constructors() {
        assert!(Check::close("a", 1.0, 1.0 + 1e-13, 1e-12, "x").pass);
        assert!(!Check::close("a", 1.0, 1.1, 1e-12, "x").pass);
        assert!(Check::close_rel("a", 100.0, 100.05, 1e-3, "x").pass);
        assert!(Check::at_most("a", 0.01, 0.02, "x").pass);
        assert!(!Check::at_most("a", 0.03, 0.02, "x").pass);
        assert!(Check::at_least("a", 1.02, 1.01, "x").pass);
        assert!(!Check::at_least("a", f64::NAN, 0.0, "x").pass);
        assert!(!Check::close("a", f64::NAN, 0.0, 1.0, "x").pass);
    }

    #[test]
    fn report_pass_requires_all_checks() {
        let mut r = Report::new("constants", params());
        assert!(!r.pass(), "empty report must not pass");
        r.push(Check::at_most("one", 0.0, 1.0, "x"));
        assert!(r.pass());
        r.push(Check::at_most("two", 2.0, 1.0, "x"));
        assert!(!r.pass());
        assert!(r.render_lines().contains("FAIL"));
    }

    #[test]
    fn json_round_trip_and_field_names() {
        let mut r = Report::new("constants", params());
        r.push(Check::close("C_iso_two_forms", 125.0 / 9.0, 125.0 / 9.0, 1e-12, "sharp product"));
        let text = r.to_json().unwrap();
        for key in
            ["\"suite\"", "\"params\"", "\"checks\"", "\"series_file\"", "\"wallclock_s\"",
             "\"name\"", "\"value\"", "\"expected\"", "\"tolerance\"", "\"pass\"",
             "\"paper_anchor\""]
        {
            assert!(text.contains(key), "missing {key} in {text}");
        }
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        let checks: Vec<Check> =
            serde_json::from_value(back["checks"].clone()).unwrap();
        assert_eq!(checks.len(), 1);
        assert!(checks[0].pass);
        assert_eq!(back["params"]["n"], serde_json::json!(1));
    }

    #[test]
    fn writes_to_nested_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("deep/run/report.json");
        let mut r = Report::new("quadrature", params());
        r.push(Check::at_most("mass_error", 1e-8, 1e-6, "unit mass"));
        r.write_json(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("mass_error"));
    }
}
