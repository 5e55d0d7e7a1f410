//! Output helpers: JSON with sorted keys and plain CSV.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

/// Pretty JSON with object keys in sorted order (serde_json's default map is a BTreeMap).
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    let v: Value = serde_json::to_value(value).expect("report values are always serializable");
    let mut s = serde_json::to_string_pretty(&v).expect("Value always serializes");
    s.push('\n');
    s
}

/// `{"re": .., "im": ..}`
pub fn complex_json(z: Complex64) -> Value {
    serde_json::json!({ "re": z.re, "im": z.im })
}

/// Comma-separated rows with a header line; floats in Rust's shortest round-trip form.
pub struct Csv {
    out: String,
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        let mut out = header.join(",");
        out.push('\n');
        Self { out }
    }

    pub fn row(&mut self, fields: &[f64]) {
        let line: Vec<String> = fields.iter().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(self.out, "{}", line.join(","));
    }

    pub fn finish(self) -> String {
        self.out
    }
}
