//! One report type, two renderings carrying identical values.
//!
//! Every number is formatted once, to twelve significant digits, and that
//! string travels into both the text table and the JSON document; a
//! comparison row records its expected value and tolerance alongside.

use std::collections::BTreeMap;

use serde::Serialize;

/// Twelve significant digits; non-finite values spelled out.
pub fn sig(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else if v == f64::INFINITY {
        "inf".to_string()
    } else if v == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{v:.11e}")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub name: String,
    pub what: String,
    pub value: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pass: Option<bool>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, String>,
}

impl Row {
    pub fn value(name: impl Into<String>, what: impl Into<String>, v: f64) -> Self {
        Row {
            name: name.into(),
            what: what.into(),
            value: sig(v),
            numeric: v.is_finite().then_some(v),
            pass: None,
            extra: BTreeMap::new(),
        }
    }

    pub fn text(name: impl Into<String>, what: impl Into<String>, value: impl Into<String>) -> Self {
        Row {
            name: name.into(),
            what: what.into(),
            value: value.into(),
            numeric: None,
            pass: None,
            extra: BTreeMap::new(),
        }
    }

    /// Comparison row: `got` against `want` within `tol`, bottom matching
    /// bottom exactly.
    pub fn check(
        name: impl Into<String>,
        what: impl Into<String>,
        got: f64,
        want: f64,
        tol: f64,
    ) -> Self {
        let pass = if want == f64::NEG_INFINITY || got == f64::NEG_INFINITY {
            got == want
        } else {
            (got - want).abs() <= tol
        };
        Row::value(name, what, got)
            .with("expected", sig(want))
            .with("tolerance", format!("{tol:.0e}"))
            .passed(pass)
    }

    pub fn with(mut self, key: &str, val: impl Into<String>) -> Self {
        self.extra.insert(key.to_string(), val.into());
        self
    }

    pub fn passed(mut self, ok: bool) -> Self {
        self.pass = Some(ok);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: String,
    pub ok: bool,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Report { command: command.into(), ok: true, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Row) {
        if row.pass == Some(false) {
            self.ok = false;
        }
        self.rows.push(row);
    }

    pub fn table(&self) -> String {
        let name_w = self.rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(4);
        let what_w = self.rows.iter().map(|r| r.what.len()).max().unwrap_or(0).max(4);
        let value_w = self.rows.iter().map(|r| r.value.len()).max().unwrap_or(0).max(5);
        let mut out = String::new();
        for r in &self.rows {
            out.push_str(&format!(
                "{:<name_w$}  {:<what_w$}  {:>value_w$}",
                r.name, r.what, r.value
            ));
            if let Some(pass) = r.pass {
                out.push_str(if pass { "  PASS" } else { "  FAIL" });
            }
            for (k, v) in &r.extra {
                out.push_str(&format!("  {k}={v}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn emit(&self, as_json: bool) {
        if as_json {
            println!("{}", self.json());
        } else {
            print!("{}", self.table());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formats_twelve_significant_digits() {
        assert_eq!(sig(2.0 / 3.0), "6.66666666667e-1");
        assert_eq!(sig(-1.0), "-1.00000000000e0");
        assert_eq!(sig(f64::NEG_INFINITY), "-inf");
    }

    #[test]
    fn table_and_json_carry_the_same_value_strings() {
        let mut report = Report::new("eval");
        report.push(Row::value("call", "superhedge", 2.0 / 3.0).with("h", sig(2.0 / 3.0)));
        report.push(Row::check("gap", "minimax", 1.0 + 1e-12, 1.0, 1e-9));
        let table = report.table();
        let parsed: serde_json::Value = serde_json::from_str(&report.json()).unwrap();
        for row in parsed["rows"].as_array().unwrap() {
            assert!(table.contains(row["value"].as_str().unwrap()));
        }
        assert!(table.contains("PASS"));
        assert!(report.ok);
    }

    #[test]
    fn failing_row_marks_the_report() {
        let mut report = Report::new("reproduce");
        report.push(Row::check("x", "value", 1.0, 2.0, 1e-9));
        assert!(!report.ok);
        assert!(report.table().contains("FAIL"));
    }

    #[test]
    fn bottom_matches_bottom_only() {
        assert_eq!(Row::check("a", "v", f64::NEG_INFINITY, f64::NEG_INFINITY, 1e-9).pass, Some(true));
        assert_eq!(Row::check("a", "v", 0.0, f64::NEG_INFINITY, 1e-9).pass, Some(false));
        assert_eq!(Row::check("a", "v", f64::NEG_INFINITY, 0.0, 1e-9).pass, Some(false));
    }
}
