//! CSV / JSON serialization of command results.

use std::fmt::Write as _;

use serde_json::{Map, Value};

/// `printf("%.12g")`.
pub fn fmt_g12(x: f64) -> String {
    const PREC: usize = 12;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", PREC - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if exp < -4 || exp >= PREC as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PREC as i32 - 1 - exp).max(0) as usize;
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
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn with_columns(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// What a command produces: scalar fields plus an optional table.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub fields: Map<String, Value>,
    pub table: Option<Table>,
    /// Rows of mixed text and numbers (provenance reports).
    pub records: Option<(Vec<String>, Vec<Vec<Value>>)>,
}

impl Report {
    pub fn field(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.fields.insert(key.to_string(), value.into());
        self
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    /// Column headers usable by a plotting script.
    pub fn plot_columns(&self) -> Option<&[String]> {
        self.table.as_ref().map(|t| t.columns.as_slice())
    }
}

fn json_key(column: &str) -> String {
    column.to_lowercase()
}

fn csv_value(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Number(n) => n.as_f64().map(fmt_g12).unwrap_or_else(|| n.to_string()),
        Value::String(s) if s.contains(',') || s.contains('"') => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => {
            let s = other.to_string();
            format!("\"{}\"", s.replace('"', "\"\""))
        }
    }
}

pub fn to_csv(report: &Report) -> String {
    let mut out = String::new();
    if let Some(t) = &report.table {
        out.push_str(&t.columns.join(","));
        out.push('\n');
        for row in &t.rows {
            let cells: Vec<String> = row.iter().map(|&x| fmt_g12(x)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
    } else if let Some((cols, rows)) = &report.records {
        out.push_str(&cols.join(","));
        out.push('\n');
        for row in rows {
            let cells: Vec<String> = row.iter().map(csv_value).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
    } else {
        let keys: Vec<&String> = report.fields.keys().collect();
        let _ = writeln!(out, "{}", keys.iter().map(|k| k.as_str()).collect::<Vec<_>>().join(","));
        let vals: Vec<String> = report.fields.values().map(csv_value).collect();
        let _ = writeln!(out, "{}", vals.join(","));
    }
    out
}

pub fn to_json(report: &Report) -> String {
    let mut obj = report.fields.clone();
    if let Some(t) = &report.table {
        let rows: Vec<Value> = t
            .rows
            .iter()
            .map(|row| {
                let m: Map<String, Value> = t
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, &x)| (json_key(c), serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)))
                    .collect();
                Value::Object(m)
            })
            .collect();
        obj.insert("rows".into(), Value::Array(rows));
    }
    if let Some((cols, rows)) = &report.records {
        let rows: Vec<Value> = rows
            .iter()
            .map(|row| Value::Object(cols.iter().map(|c| json_key(c)).zip(row.iter().cloned()).collect()))
            .collect();
        obj.insert("rows".into(), Value::Array(rows));
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("serializable");
    s.push('\n');
    s
}

/// Companion gnuplot script plotting every column against the first.
pub fn gnuplot_script(data_path: &str, columns: &[String], title: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "set datafile separator ','");
    let _ = writeln!(s, "set key autotitle columnhead");
    let _ = writeln!(s, "set title '{title}'");
    let _ = writeln!(s, "set xlabel '{}'", columns.first().map_or("", |c| c.as_str()));
    let series: Vec<String> = (2..=columns.len())
        .map(|i| format!("'{data_path}' using 1:{i} with lines"))
        .collect();
    let _ = writeln!(s, "plot {}", series.join(", \\\n     "));
    s
}
