//! Deterministic report rendering: JSON with floats printed at a fixed
//! 12 significant digits, CSV flattening of per-class tables, and a
//! human-readable text summary.
//!
//! Determinism contract: for a fixed input value the emitted bytes are
//! identical across runs. Object keys are already sorted (serde_json maps
//! are BTreeMaps here), and every float goes through [`fmt_float`].

use serde_json::Value;

use crate::verify::ExperimentReport;

/// Render a float with exactly 12 significant digits. Values whose
/// decimal exponent lies in [−4, 14] are printed in plain decimal
/// notation, others in scientific notation; both forms are valid JSON
/// numbers. Non-finite values render as quoted strings.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "\"NaN\"".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "\"inf\"".into() } else { "\"-inf\"".into() };
    }
    if x == 0.0 {
        return "0.00000000000".into();
    }
    let sci = format!("{:.11e}", x);
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    debug_assert_eq!(digits.len(), 12);
    let sign = if neg { "-" } else { "" };
    if (-4..=14).contains(&exp) {
        let pos = exp + 1; // decimal point position within the digit run
        let body = if pos <= 0 {
            format!("0.{}{}", "0".repeat((-pos) as usize), digits)
        } else if pos as usize >= digits.len() {
            format!("{}{}", digits, "0".repeat(pos as usize - digits.len()))
        } else {
            format!("{}.{}", &digits[..pos as usize], &digits[pos as usize..])
        };
        format!("{sign}{body}")
    } else {
        format!("{sign}{}.{}e{exp}", &digits[..1], &digits[1..])
    }
}

fn fmt_number(n: &serde_json::Number) -> String {
    if n.is_i64() || n.is_u64() {
        n.to_string()
    } else {
        fmt_float(n.as_f64().expect("finite json number"))
    }
}

/// Serialize a JSON value deterministically: sorted keys, floats at 12
/// significant digits, no insignificant whitespace.
pub fn json_to_string(v: &Value) -> String {
    let mut out = String::new();
    write_json(v, &mut out);
    out
}

fn write_json(v: &Value, out: &mut String) {
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => out.push_str(&fmt_number(n)),
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string escape"));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_json(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (k, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(k).expect("string escape"));
                out.push(':');
                write_json(item, out);
            }
            out.push('}');
        }
    }
}

/// One scalar cell for CSV/text: like JSON but with bare strings and
/// arrays joined by `;`.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => fmt_number(n),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(cell).collect::<Vec<_>>().join(";"),
        Value::Object(_) => json_to_string(v),
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Zero out wall-clock noise so reports are byte-stable across runs.
pub fn normalize_runtime(report: &mut ExperimentReport) {
    report.runtime_ms = 0;
}

/// Flatten an experiment report to CSV: `#`-prefixed metadata lines,
/// then a header over the sorted union of per-class keys, then one row
/// per class.
pub fn report_to_csv(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(&format!("# experiment={}\n", report.experiment));
    out.push_str(&format!("# field={}\n", report.field));
    out.push_str(&format!("# modulus={}\n", report.modulus));
    for (k, v) in &report.params {
        out.push_str(&format!("# param.{k}={v}\n"));
    }
    for (k, v) in &report.extrema {
        out.push_str(&format!("# extrema.{k}={}\n", cell(v)));
    }
    out.push_str(&format!("# bound_log={}\n", fmt_float(report.bound_log)));
    out.push_str(&format!("# verdict={}\n", report.verdict));
    let mut keys: Vec<&String> = Vec::new();
    for row in &report.per_class {
        for k in row.keys() {
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
    }
    keys.sort();
    out.push_str(
        &keys
            .iter()
            .map(|k| csv_escape(k))
            .collect::<Vec<_>>()
            .join(","),
    );
    out.push('\n');
    for row in &report.per_class {
        let cells: Vec<String> = keys
            .iter()
            .map(|k| row.get(*k).map(|v| csv_escape(&cell(v))).unwrap_or_default())
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// Human-readable summary table for the text output format.
pub fn report_to_text(report: &ExperimentReport) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "experiment {} on {} mod {}\n",
        report.experiment, report.field, report.modulus
    ));
    for (k, v) in &report.params {
        out.push_str(&format!("  param {k} = {v}\n"));
    }
    for (k, v) in &report.extrema {
        out.push_str(&format!("  {k} = {}\n", cell(v)));
    }
    out.push_str(&format!("  bound_log = {}\n", fmt_float(report.bound_log)));
    out.push_str(&format!("  verdict = {}\n", report.verdict));
    for row in &report.per_class {
        let pairs: Vec<String> = row.iter().map(|(k, v)| format!("{k}={}", cell(v))).collect();
        out.push_str(&format!("  - {}\n", pairs.join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn float_formatting_fixed_significant_digits() {
        assert_eq!(fmt_float(0.0), "0.00000000000");
        assert_eq!(fmt_float(1.0), "1.00000000000");
        assert_eq!(fmt_float(-34.9065850399), "-34.9065850399");
        assert_eq!(fmt_float(0.000123456789012), "0.000123456789012");
        assert_eq!(fmt_float(1.5e-7), "1.50000000000e-7");
        assert_eq!(fmt_float(2.5e17), "2.50000000000e17");
        // Round-trips as a JSON number with 12 significant digits.
        let v: f64 = fmt_float(std::f64::consts::PI).parse().unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-11);
    }

    #[test]
    fn json_is_sorted_and_deterministic() {
        let v = json!({"b": 1.5, "a": [true, null, "x,y"], "c": {"z": 2, "y": 0.1}});
        let s = json_to_string(&v);
        assert_eq!(
            s,
            "{\"a\":[true,null,\"x,y\"],\"b\":1.50000000000,\"c\":{\"y\":0.100000000000,\"z\":2}}"
        );
        assert_eq!(s, json_to_string(&v));
        // Valid JSON: parses back.
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["c"]["z"], json!(2));
    }

    #[test]
    fn csv_escaping() {
        assert_eq!(csv_escape("plain"), "plain");
        assert_eq!(csv_escape("a,b"), "\"a,b\"");
        assert_eq!(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
