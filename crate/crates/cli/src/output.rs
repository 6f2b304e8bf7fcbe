//! Number formatting and table emission.

use serde_json::{json, Map, Value};

use crate::args::Format;

/// `x` to `digits` significant digits: positional notation for exponents in
/// `[-5, digits)`, scientific otherwise. Trailing zeros are dropped.
pub fn format_sig(x: f64, digits: u32) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1) as usize;
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(u64),
    Real(f64),
}

/// A titled table plus the parameter echo that heads every output.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: &'static str,
    pub params: Vec<(&'static str, String)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(
        command: &'static str,
        params: Vec<(&'static str, String)>,
        columns: Vec<&'static str>,
    ) -> Self {
        Table {
            command,
            params,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, precision: u32) -> String {
        match format {
            Format::Csv => self.to_csv(precision),
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.to_json()).expect("table serializes");
                s.push('\n');
                s
            }
        }
    }

    /// `#`-prefixed provenance lines, the header row, then the data.
    pub fn to_csv(&self, precision: u32) -> String {
        let mut out = format!("# degpois {}\n", self.command);
        let echo: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        out.push_str(&format!("# {} precision={precision}\n", echo.join(" ")));
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match *c {
                    Cell::Int(i) => i.to_string(),
                    Cell::Real(x) => format_sig(x, precision),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Keys: `command`, `params`, `columns`, `rows`. Reals keep full precision.
    pub fn to_json(&self) -> Value {
        let params: Map<String, Value> = self
            .params
            .iter()
            .map(|(k, v)| (k.to_string(), Value::String(v.clone())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Array(
                    row.iter()
                        .map(|c| match *c {
                            Cell::Int(i) => json!(i),
                            Cell::Real(x) => json!(x),
                        })
                        .collect(),
                )
            })
            .collect();
        json!({
            "command": self.command,
            "params": params,
            "columns": self.columns,
            "rows": rows,
        })
    }
}
