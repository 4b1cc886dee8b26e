//! Tabular artifact emission: versioned CSV and a mirroring JSON encoding,
//! both byte-reproducible for a fixed configuration and seed.

use std::fmt::Write as _;

/// One table value.  Floats are rendered with up to 17 significant digits
/// so they round-trip exactly.
#[derive(Clone, Debug)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) => g17(*v),
            Cell::Text(v) => {
                debug_assert!(
                    !v.contains(',') && !v.contains('\n') && !v.contains('"'),
                    "table text must not need quoting"
                );
                v.clone()
            }
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::UInt(v) => v.to_string(),
            Cell::Float(v) if v.is_finite() => g17(*v),
            Cell::Float(v) => serde_json::to_string(&g17(*v)).unwrap(),
            Cell::Text(v) => serde_json::to_string(v).unwrap(),
        }
    }
}

/// A rectangular report: named columns and one row per parameter tuple.
pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    /// Schema-versioned CSV: a `#schema=1` comment line, the header, then
    /// the rows.  LF endings throughout.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("#schema=1\n");
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    /// The same rows as an array of flat records, one record per line,
    /// numbers formatted exactly as in the CSV.
    pub fn to_json(&self) -> String {
        let mut out = String::from("[\n");
        for (i, row) in self.rows.iter().enumerate() {
            out.push_str("  {");
            for (j, (name, cell)) in self.columns.iter().zip(row).enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                let _ = write!(out, "{}: {}", serde_json::to_string(name).unwrap(), cell.json());
            }
            out.push('}');
            if i + 1 < self.rows.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("]\n");
        out
    }
}

/// Shortest faithful rendering with 17 significant digits: fixed notation
/// for moderate exponents, scientific otherwise, trailing zeros trimmed.
/// Matches the C `%.17g` conversion.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x < 0.0 { "-inf".into() } else { "inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let epos = sci.find('e').unwrap();
    let exp: i32 = sci[epos + 1..].parse().unwrap();
    if exp < -4 || exp >= 17 {
        let mantissa = sci[..epos].trim_end_matches('0').trim_end_matches('.');
        format!(
            "{}e{}{:02}",
            mantissa,
            if exp < 0 { "-" } else { "+" },
            exp.abs()
        )
    } else {
        let decimals = (16 - exp).max(0) as usize;
        let fixed = format!("{x:.decimals$}");
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_rendering_matches_the_c_conversion() {
        assert_eq!(g17(0.0), "0");
        assert_eq!(g17(1.0), "1");
        assert_eq!(g17(0.5), "0.5");
        assert_eq!(g17(-2.25), "-2.25");
        assert_eq!(g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(g17(100000.0), "100000");
        assert_eq!(g17(1e16), "10000000000000000");
        assert_eq!(g17(1e17), "1e+17");
        assert_eq!(g17(1e-4), "0.0001");
        assert_eq!(g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(g17(6.5e-9), "6.5000000000000003e-09");
        assert_eq!(g17(1.25e120), "1.25e+120");
        assert_eq!(g17(f64::INFINITY), "inf");
    }

    #[test]
    fn rendered_floats_round_trip() {
        for &x in &[
            std::f64::consts::PI,
            -std::f64::consts::E,
            2.0f64.sqrt() * 1e-13,
            123456789.123456789,
            f64::MIN_POSITIVE,
            f64::MAX,
            5.0 / 7.0,
        ] {
            let back: f64 = g17(x).parse().unwrap();
            assert_eq!(back, x, "{x} rendered as {}", g17(x));
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["n", "value", "label"]);
        t.push(vec![
            Cell::Int(3),
            Cell::Float(0.25),
            Cell::Text("ok".into()),
        ]);
        t.push(vec![
            Cell::UInt(u64::MAX),
            Cell::Float(1e-30),
            Cell::Text("edge".into()),
        ]);
        assert_eq!(
            t.to_csv(),
            "#schema=1\nn,value,label\n3,0.25,ok\n18446744073709551615,1.0000000000000001e-30,edge\n"
        );
    }

    #[test]
    fn json_mirrors_the_rows() {
        let mut t = Table::new(vec!["n", "value"]);
        t.push(vec![Cell::Int(1), Cell::Float(0.5)]);
        t.push(vec![Cell::Int(2), Cell::Float(f64::NAN)]);
        let text = t.to_json();
        assert_eq!(
            text,
            "[\n  {\"n\": 1, \"value\": 0.5},\n  {\"n\": 2, \"value\": \"nan\"}\n]\n"
        );
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.as_array().unwrap().len(), 2);
        assert_eq!(parsed[0]["value"], 0.5);
    }
}
