use serde_json::{json, Value};

/// Nine significant digits, plain decimal when the exponent is moderate.
pub fn fmt9(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.8e}");
    let (mant, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-6..=15).contains(&exp) {
        return sci;
    }
    let neg = mant.starts_with('-');
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut s = if exp >= 0 {
        let int_len = exp as usize + 1;
        if digits.len() <= int_len {
            format!("{digits}{}", "0".repeat(int_len - digits.len()))
        } else {
            format!("{}.{}", &digits[..int_len], &digits[int_len..])
        }
    } else {
        format!("0.{}{digits}", "0".repeat((-exp - 1) as usize))
    };
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if neg {
        format!("-{s}")
    } else {
        s
    }
}

#[derive(Clone, Debug)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt9(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) => json!(fmt9(*v)),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// Result of a command: a table, human summary lines, and optional structured detail.
#[derive(Clone, Debug)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<String>,
    pub detail: Option<Value>,
}

pub struct Header<'a> {
    pub command: &'a str,
    pub seed: Option<u64>,
    pub config_hash: &'a str,
}

pub const SCHEMA_VERSION: u32 = 1;

impl Report {
    pub fn to_csv(&self, h: &Header) -> String {
        let mut out = format!(
            "# tubekit {} schema={} command={} seed={} config={}\n",
            env!("CARGO_PKG_VERSION"),
            SCHEMA_VERSION,
            h.command,
            h.seed.map_or("none".to_string(), |s| s.to_string()),
            h.config_hash
        );
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.iter().map(Cell::csv).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, h: &Header) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        let mut v = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "schema": SCHEMA_VERSION,
            "command": h.command,
            "seed": h.seed,
            "config": h.config_hash,
            "columns": self.columns,
            "rows": rows,
            "summary": self.summary,
        });
        if let Some(d) = &self.detail {
            v["detail"] = d.clone();
        }
        let mut s = serde_json::to_string_pretty(&v).expect("json");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::fmt9;

    #[test]
    fn nine_digits() {
        assert_eq!(fmt9(0.5493061443340549), "0.549306144");
        assert_eq!(fmt9(std::f64::consts::PI), "3.14159265");
        assert_eq!(fmt9(1.0), "1");
        assert_eq!(fmt9(-2.5e-3), "-0.0025");
        assert_eq!(fmt9(123456789012.0), "123456789000");
        assert_eq!(fmt9(9.999999999), "10");
        assert_eq!(fmt9(1e-9), "1.00000000e-9");
    }
}
