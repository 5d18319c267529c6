//! Number formatting and output tables.

use std::fmt::Write as _;

/// Significant digits written for every number.
pub const SIG_DIGITS: usize = 12;

/// `printf("%.12g")` formatting; infinities are written as `inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = SIG_DIGITS as i32;
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        trim_zeros(&format!("{:.*}", (p - 1 - exp) as usize, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV table with a fixed header; fields are quoted when needed.
pub struct Table {
    header: Vec<&'static str>,
    numeric: Vec<bool>,
    rows: Vec<Vec<String>>,
}

impl Table {
    /// `numeric` names the columns emitted as JSON numbers.
    pub fn new(header: &[&'static str], numeric: &[&str]) -> Self {
        Self {
            header: header.to_vec(),
            numeric: header.iter().map(|h| numeric.contains(h)).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
        // writes to a Vec cannot fail
        let _ = w.write_record(&self.header);
        for r in &self.rows {
            let _ = w.write_record(r);
        }
        String::from_utf8(w.into_inner().unwrap_or_default()).unwrap_or_default()
    }

    /// Array of objects keyed by the header. Empty fields become `null`,
    /// non-finite numbers stay strings.
    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Map<String, serde_json::Value>> = self
            .rows
            .iter()
            .map(|r| {
                self.header
                    .iter()
                    .zip(&self.numeric)
                    .zip(r)
                    .map(|((k, &num), v)| (k.to_string(), json_value(v, num)))
                    .collect()
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).unwrap_or_default();
        s.push('\n');
        s
    }
}

fn json_value(v: &str, numeric: bool) -> serde_json::Value {
    if v.is_empty() {
        return serde_json::Value::Null;
    }
    if !numeric {
        return match v {
            "true" => serde_json::Value::Bool(true),
            "false" => serde_json::Value::Bool(false),
            _ => serde_json::Value::String(v.into()),
        };
    }
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => serde_json::Number::from_f64(x)
            .map(serde_json::Value::Number)
            .unwrap_or_else(|| serde_json::Value::String(v.into())),
        _ => serde_json::Value::String(v.into()),
    }
}

/// Human-readable list of lines.
pub fn lines(items: impl IntoIterator<Item = String>) -> String {
    let mut out = String::new();
    for l in items {
        let _ = writeln!(out, "{l}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        assert_eq!(fmt_num(5.0), "5");
        assert_eq!(fmt_num(10.0 / 3.0), "3.33333333333");
        assert_eq!(fmt_num(20.0 / 3.0), "6.66666666667");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1e-7), "1e-07");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_num(0.0001), "0.0001");
        assert_eq!(fmt_num(-2.5), "-2.5");
        assert_eq!(fmt_num(f64::INFINITY), "inf");
        assert_eq!(fmt_num(999999999999.9), "1e+12");
    }

    #[test]
    fn table_outputs() {
        let mut t = Table::new(&["id", "m"], &["m"]);
        t.push(vec!["a,b".into(), "5".into()]);
        t.push(vec!["c".into(), String::new()]);
        assert_eq!(t.to_csv(), "id,m\n\"a,b\",5\nc,\n");
        t.push(vec!["7".into(), "2.5".into()]);
        let j = t.to_json();
        assert!(j.contains("\"m\": null"));
        assert!(j.contains("\"id\": \"7\"") && j.contains("\"m\": 2.5"));
    }
}
