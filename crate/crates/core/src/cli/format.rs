//! Report rows and their CSV / JSON encodings.
//!
//! Every number passes through [`fmt_num`] before it reaches either encoding,
//! so the two formats carry the same digits.

use std::fmt::Write as _;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// `%.12g`-style formatting. Infinities become `+inf` / `-inf`.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "+inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = SIGNIFICANT_DIGITS;
    // Round once in scientific form; the exponent after rounding picks the style.
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= p as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Field {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Missing,
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Num(x) => fmt_num(*x),
            Field::Int(i) => i.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Missing => String::new(),
            Field::Text(s) => {
                if s.contains([',', '"', '\n']) {
                    format!("\"{}\"", s.replace('"', "\"\""))
                } else {
                    s.clone()
                }
            }
        }
    }

    fn json(&self) -> String {
        match self {
            Field::Num(x) if x.is_finite() => fmt_num(*x),
            Field::Num(x) => json_string(&fmt_num(*x)),
            Field::Int(i) => i.to_string(),
            Field::Bool(b) => b.to_string(),
            Field::Missing => "null".into(),
            Field::Text(s) => json_string(s),
        }
    }
}

impl From<f64> for Field {
    fn from(x: f64) -> Self {
        Field::Num(x)
    }
}

impl From<usize> for Field {
    fn from(x: usize) -> Self {
        Field::Int(x as i64)
    }
}

impl From<bool> for Field {
    fn from(b: bool) -> Self {
        Field::Bool(b)
    }
}

impl From<&str> for Field {
    fn from(s: &str) -> Self {
        Field::Text(s.into())
    }
}

impl From<String> for Field {
    fn from(s: String) -> Self {
        Field::Text(s)
    }
}

impl<T: Into<Field>> From<Option<T>> for Field {
    fn from(x: Option<T>) -> Self {
        x.map_or(Field::Missing, Into::into)
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("string serialization")
}

pub type Row = Vec<(String, Field)>;

/// Ordered rows with identical columns plus a summary block.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub command: String,
    pub rows: Vec<Row>,
    pub summary: Row,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl Report {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), ..Self::default() }
    }

    pub fn push_row(&mut self, row: Row) {
        self.rows.push(row);
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Field>) {
        self.summary.push((key.into(), value.into()));
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    /// Header, rows, then `# key: value` summary lines.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(first) = self.rows.first() {
            let header: Vec<&str> = first.iter().map(|(k, _)| k.as_str()).collect();
            out.push_str(&header.join(","));
            out.push('\n');
        }
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|(_, v)| v.csv()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        for (k, v) in &self.summary {
            let _ = writeln!(out, "# {k}: {}", v.csv());
        }
        out
    }

    pub fn to_json(&self) -> String {
        let object = |row: &Row| {
            let kv: Vec<String> = row.iter().map(|(k, v)| format!("{}: {}", json_string(k), v.json())).collect();
            format!("{{{}}}", kv.join(", "))
        };
        let mut out = String::new();
        let _ = writeln!(out, "{{");
        let _ = writeln!(out, "  \"command\": {},", json_string(&self.command));
        let _ = writeln!(out, "  \"rows\": [");
        for (i, row) in self.rows.iter().enumerate() {
            let comma = if i + 1 < self.rows.len() { "," } else { "" };
            let _ = writeln!(out, "    {}{comma}", object(row));
        }
        let _ = writeln!(out, "  ],");
        let _ = writeln!(out, "  \"summary\": {}", object(&self.summary));
        let _ = writeln!(out, "}}");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(2.0), "2");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(3f64.log2()), "1.58496250072");
        assert_eq!(fmt_num(-1.0 / 3.0), "-0.333333333333");
        assert_eq!(fmt_num(1e-9), "1e-09");
        assert_eq!(fmt_num(1.5e-5), "1.5e-05");
        assert_eq!(fmt_num(0.0001), "0.0001");
        assert_eq!(fmt_num(1e12), "1e+12");
        assert_eq!(fmt_num(999999999999.9), "1e+12");
        assert_eq!(fmt_num(123456789012.0), "123456789012");
        assert_eq!(fmt_num(f64::INFINITY), "+inf");
        assert_eq!(fmt_num(-0.0), "0");
    }

    #[test]
    fn csv_and_json_share_digits() {
        let mut r = Report::new("t");
        r.push_row(vec![("x".into(), Field::Num(1.0 / 7.0)), ("y".into(), Field::Num(f64::INFINITY))]);
        r.summarize("violations", 0usize);
        let csv = r.to_csv();
        let json = r.to_json();
        assert!(csv.contains("0.142857142857,+inf"));
        assert!(json.contains("\"x\": 0.142857142857"));
        assert!(json.contains("\"y\": \"+inf\""));
        assert!(csv.ends_with("# violations: 0\n"));
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["summary"]["violations"], 0);
    }
}
