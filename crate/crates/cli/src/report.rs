use rug::Float;
use serde::Serialize;

use gfn_core::numeric::format_float;
use gfn_core::Rat;

/// Significant digits used for values in reports.
pub const VALUE_DIGITS: u32 = 24;

/// Fixed CSV header.
pub const CSV_HEADER: &str = "suite,check,value,reference,abs_err,tol,pass";

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub check: String,
    pub value: String,
    pub reference: String,
    pub abs_err: String,
    pub tol: String,
    pub pass: bool,
}

fn fmt_err(x: &Float) -> String {
    if x.is_zero() {
        "0".to_string()
    } else {
        format_float(x, 6)
    }
}

impl Check {
    /// Numerical comparison `|value − reference| < tol`.
    pub fn close(
        suite: &str,
        check: impl Into<String>,
        value: &Float,
        reference: &Float,
        tol: f64,
    ) -> Self {
        let err = Float::with_val(value.prec(), value - reference).abs();
        let pass = err.is_finite() && err < tol;
        Check {
            suite: suite.to_string(),
            check: check.into(),
            value: format_float(value, VALUE_DIGITS),
            reference: format_float(reference, VALUE_DIGITS),
            abs_err: fmt_err(&err),
            tol: format!("{tol:e}"),
            pass,
        }
    }

    /// Magnitude bound `|value| < tol` (or `> tol` when `above`).
    pub fn bound(
        suite: &str,
        check: impl Into<String>,
        value: &Float,
        tol: f64,
        above: bool,
    ) -> Self {
        let pass = value.is_finite() && if above { *value > tol } else { *value < tol };
        Check {
            suite: suite.to_string(),
            check: check.into(),
            value: fmt_err(value),
            reference: if above {
                format!("> {tol:e}")
            } else {
                "0".to_string()
            },
            abs_err: fmt_err(value),
            tol: format!("{tol:e}"),
            pass,
        }
    }

    /// Exact rational equality.
    pub fn exact(suite: &str, check: impl Into<String>, value: &Rat, reference: &Rat) -> Self {
        let err = Rat::from(value - reference).abs();
        Check {
            suite: suite.to_string(),
            check: check.into(),
            value: value.to_string(),
            reference: reference.to_string(),
            abs_err: err.to_string(),
            tol: "0".to_string(),
            pass: err == 0,
        }
    }

    /// A boolean condition, recorded with descriptive values.
    pub fn flag(
        suite: &str,
        check: impl Into<String>,
        value: impl Into<String>,
        reference: impl Into<String>,
        pass: bool,
    ) -> Self {
        Check {
            suite: suite.to_string(),
            check: check.into(),
            value: value.into(),
            reference: reference.into(),
            abs_err: if pass { "0" } else { "-" }.to_string(),
            tol: "-".to_string(),
            pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub precision_digits: u32,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn new(suite: &str, precision_digits: u32, seed: u64, checks: Vec<Check>) -> Self {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        SuiteReport {
            suite: suite.to_string(),
            precision_digits,
            seed,
            pass,
            checks,
        }
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_csv(&self, header: bool) -> String {
        let mut out = String::new();
        if header {
            out.push_str(CSV_HEADER);
            out.push('\n');
        }
        for c in &self.checks {
            let row = [
                &c.suite,
                &c.check,
                &c.value,
                &c.reference,
                &c.abs_err,
                &c.tol,
            ];
            let cells: Vec<String> = row.iter().map(|x| csv_cell(x)).collect();
            out.push_str(&cells.join(","));
            out.push(',');
            out.push_str(if c.pass { "true" } else { "false" });
            out.push('\n');
        }
        out
    }

    pub fn to_pretty(&self) -> String {
        let mut out = format!(
            "suite {}: {} ({} checks, {} digits)\n",
            self.suite,
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.len(),
            self.precision_digits
        );
        for c in &self.checks {
            out.push_str(&format!(
                "  [{}] {}: value {} ref {} err {} tol {}\n",
                if c.pass { "ok" } else { "FAIL" },
                c.check,
                c.value,
                c.reference,
                c.abs_err,
                c.tol
            ));
        }
        out
    }
}

fn csv_cell(x: &str) -> String {
    if x.contains([',', '"', '\n']) {
        format!("\"{}\"", x.replace('"', "\"\""))
    } else {
        x.to_string()
    }
}
