use serde_json::{Number, Value};

/// Rounds to 12 significant digits, so values that differ only by floating-point noise print
/// identically.
pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

/// A real as JSON: rounded, with infinities and NaN spelled out as strings.
pub fn real(x: f64) -> Value {
    match Number::from_f64(round12(x)) {
        Some(n) => Value::Number(n),
        None if x.is_nan() => Value::String("nan".into()),
        None if x > 0.0 => Value::String("inf".into()),
        None => Value::String("-inf".into()),
    }
}

pub fn reals(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|x| real(*x)).collect())
}

/// Counts too large for a JSON number are written as decimal strings.
pub fn count(n: u128) -> Value {
    match u64::try_from(n) {
        Ok(n) => Value::Number(n.into()),
        Err(_) => Value::String(n.to_string()),
    }
}

/// Compact JSON; object keys come out sorted, so equal results print byte-identically.
pub fn emit_json(v: &Value) -> String {
    serde_json::to_string(v).expect("JSON values serialize")
}

/// Left-aligned text columns separated by two spaces.
pub fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> =
        (0..cols).map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r.iter().enumerate().map(|(c, s)| format!("{s:<w$}", w = widths[c])).collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}
