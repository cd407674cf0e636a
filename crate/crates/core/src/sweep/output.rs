use serde_json::{json, Map, Value};

use super::config::{Format, SweepConfig};

const SIG_DIGITS: usize = 12;

/// `printf("%.12g", x)`.
pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= SIG_DIGITS as i32 {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        let decimals = (SIG_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Flag(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_number(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Flag(b) => u8::from(*b).to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => json!(i),
            Cell::Flag(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

/// Rows of one mode's output, with a fixed column set.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Written as a final CSV row and as a JSON object.
    pub summary: Option<Vec<Cell>>,
    /// Extra JSON-only payload, stored under `"report"`.
    pub report: Option<Value>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self { columns, rows: Vec::new(), summary: None, report: None }
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in self.rows.iter().chain(self.summary.iter()) {
            debug_assert_eq!(row.len(), self.columns.len());
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    fn row_object(&self, row: &[Cell]) -> Value {
        let map: Map<String, Value> =
            self.columns.iter().zip(row).map(|(c, v)| ((*c).to_string(), v.json())).collect();
        Value::Object(map)
    }

    pub fn to_json(&self, config: &SweepConfig) -> String {
        let rows: Vec<Value> = self.rows.iter().map(|r| self.row_object(r)).collect();
        let mut doc = json!({
            "metadata": {
                "tool": "alphasqkd",
                "version": env!("CARGO_PKG_VERSION"),
                "mode": config.mode.name(),
                "seed": config.seed,
                "columns": self.columns,
                "config": config,
            },
            "rows": rows,
        });
        if let Some(s) = &self.summary {
            doc["summary"] = self.row_object(s);
        }
        if let Some(r) = &self.report {
            doc["report"] = r.clone();
        }
        let mut text = serde_json::to_string_pretty(&doc).expect("serializable document");
        text.push('\n');
        text
    }

    pub fn render(&self, config: &SweepConfig) -> String {
        match config.format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(config),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_printf_g() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.5, "0.5"),
            (1e-5, "1e-05"),
            (0.0001, "0.0001"),
            (-0.0492, "-0.0492"),
            (1.0 / 3.0, "0.333333333333"),
            (123456789012.0, "123456789012"),
            (1234567890123.0, "1.23456789012e+12"),
            (0.262963049382716, "0.262963049383"),
            (2.0 / 3.0 * 1e-7, "6.66666666667e-08"),
            (0.9999999999999, "1"),
        ];
        for (x, want) in cases {
            assert_eq!(format_number(x), want, "{x}");
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(vec!["a", "b", "c"]);
        t.rows.push(vec![Cell::Num(0.25), Cell::Empty, Cell::Flag(true)]);
        t.summary = Some(vec![Cell::Text("min".into()), Cell::Int(3), Cell::Flag(false)]);
        assert_eq!(t.to_csv(), "a,b,c\n0.25,,1\nmin,3,0\n");
    }

    #[test]
    fn json_nulls_for_missing_values() {
        let mut t = Table::new(vec!["rate"]);
        t.rows.push(vec![Cell::Empty]);
        t.rows.push(vec![Cell::Num(f64::NAN)]);
        let v: Value = serde_json::from_str(&t.to_json(&SweepConfig::default())).unwrap();
        assert!(v["rows"][0]["rate"].is_null() && v["rows"][1]["rate"].is_null());
        assert_eq!(v["metadata"]["tool"], "alphasqkd");
    }
}
