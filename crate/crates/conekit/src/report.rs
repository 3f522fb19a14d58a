//! Machine-readable verification reports.
//!
//! Every check the library runs is recorded as a [`CheckRecord`]
//! (expected value, computed value, tolerance, verdict, provenance tag)
//! inside a [`VerificationReport`] that also carries the command
//! descriptor, an echo of the inputs, the crate version and the sampling
//! seed.  The JSON rendering is schema-stable under the version tag
//! `"conekit/1"`; rationals are rendered as `p/q` strings and floats
//! with 17 significant digits so values round-trip losslessly.

use std::collections::BTreeMap;
use std::fmt::Display;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::rational::format_rational;

/// Schema tag carried by every JSON report.
pub const SCHEMA: &str = "conekit/1";

/// Origin of a check's expected value: an externally tabulated constant
/// (`Paper`), an identity immediate from the definitions (`Trivial`), or
/// a value derived independently inside this crate (`Derived`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Paper,
    Trivial,
    Derived,
}

/// One verified quantity.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub tolerance: String,
    pub pass: bool,
    pub provenance: Provenance,
}

/// A full report: descriptor, input echo, environment stamp and the
/// accumulated check records.  `pass` is true iff every record passes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub command: String,
    pub inputs: BTreeMap<String, String>,
    pub version: String,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<CheckRecord>,
}

/// Renders a float with 17 significant digits (lossless for `f64`).
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

impl VerificationReport {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        VerificationReport {
            schema: SCHEMA.to_string(),
            command: command.into(),
            inputs: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            pass: true,
            checks: Vec::new(),
        }
    }

    /// Echoes an input parameter into the report.
    pub fn input(&mut self, key: impl Into<String>, value: impl Display) {
        self.inputs.insert(key.into(), value.to_string());
    }

    /// Appends a record and folds its verdict into the overall status.
    pub fn push(&mut self, record: CheckRecord) -> bool {
        let pass = record.pass;
        self.pass &= pass;
        self.checks.push(record);
        pass
    }

    /// Records a float comparison `|computed − expected| ≤ tolerance`.
    pub fn record_float(
        &mut self,
        name: impl Into<String>,
        computed: f64,
        expected: f64,
        tolerance: f64,
        provenance: Provenance,
    ) -> bool {
        let pass = (computed - expected).abs() <= tolerance && computed.is_finite();
        self.push(CheckRecord {
            name: name.into(),
            expected: fmt_float(expected),
            computed: fmt_float(computed),
            tolerance: fmt_float(tolerance),
            pass,
            provenance,
        })
    }

    /// Records an upper bound `computed ≤ bound` (for error suprema).
    pub fn record_bound(
        &mut self,
        name: impl Into<String>,
        computed: f64,
        bound: f64,
        provenance: Provenance,
    ) -> bool {
        let pass = computed.is_finite() && computed <= bound;
        self.push(CheckRecord {
            name: name.into(),
            expected: format!("<= {}", fmt_float(bound)),
            computed: fmt_float(computed),
            tolerance: fmt_float(bound),
            pass,
            provenance,
        })
    }

    /// Records an exact rational comparison (tolerance `0`).
    pub fn record_exact(
        &mut self,
        name: impl Into<String>,
        computed: &BigRational,
        expected: &BigRational,
        provenance: Provenance,
    ) -> bool {
        self.push(CheckRecord {
            name: name.into(),
            expected: format_rational(expected),
            computed: format_rational(computed),
            tolerance: "0".to_string(),
            pass: computed == expected,
            provenance,
        })
    }

    /// Records a yes/no condition.
    pub fn record_bool(
        &mut self,
        name: impl Into<String>,
        computed: bool,
        expected: bool,
        provenance: Provenance,
    ) -> bool {
        self.push(CheckRecord {
            name: name.into(),
            expected: expected.to_string(),
            computed: computed.to_string(),
            tolerance: "0".to_string(),
            pass: computed == expected,
            provenance,
        })
    }

    /// Absorbs another report's checks (and verdict), prefixing their
    /// names.
    pub fn absorb(&mut self, prefix: &str, other: VerificationReport) {
        for mut check in other.checks {
            check.name = format!("{prefix}.{}", check.name);
            self.push(check);
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV rendering: one row per check, fields quoted as needed.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name,expected,computed,tolerance,pass,provenance\n");
        for c in &self.checks {
            let provenance = match c.provenance {
                Provenance::Paper => "paper",
                Provenance::Trivial => "trivial",
                Provenance::Derived => "derived",
            };
            let row = [
                c.name.as_str(),
                c.expected.as_str(),
                c.computed.as_str(),
                c.tolerance.as_str(),
                if c.pass { "true" } else { "false" },
                provenance,
            ]
            .map(csv_escape)
            .join(",");
            out.push_str(&row);
            out.push('\n');
        }
        out
    }

    /// Human-readable per-check lines, one `PASS`/`FAIL` per record.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let verdict = if c.pass { "PASS" } else { "FAIL" };
            out.push_str(&format!(
                "{verdict}  {}  computed={}  expected={}  tol={}\n",
                c.name, c.computed, c.expected, c.tolerance
            ));
        }
        out.push_str(&format!(
            "{}  {} ({}/{} checks)\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.command,
            self.checks.iter().filter(|c| c.pass).count(),
            self.checks.len()
        ));
        out
    }
}

fn csv_escape(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}
