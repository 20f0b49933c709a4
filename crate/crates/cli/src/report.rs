//! Report envelope and the three output formats.

use serde_json::{json, Map, Value};

pub type Row = Map<String, Value>;

pub const TOOL: &str = "seer-lab";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub args: Row,
    pub seed: Option<u64>,
    pub rows: Vec<Row>,
    pub summary: Option<Row>,
}

impl Report {
    pub fn new(command: &'static str, args: Row) -> Self {
        Report {
            command,
            args,
            seed: None,
            rows: Vec::new(),
            summary: None,
        }
    }

    pub fn envelope(&self, wall_time: Option<f64>) -> Value {
        let mut results = Map::new();
        results.insert(
            "rows".into(),
            Value::Array(self.rows.iter().cloned().map(Value::Object).collect()),
        );
        if let Some(s) = &self.summary {
            results.insert("summary".into(), Value::Object(s.clone()));
        }
        let mut env = json!({
            "tool": TOOL,
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "args": self.args,
            "seed": self.seed,
            "results": results,
        });
        if let Some(t) = wall_time {
            env["wall_time_s"] = num(t);
        }
        env
    }

    pub fn render(&self, format: Format, wall_time: Option<f64>) -> String {
        match format {
            Format::Json => {
                let mut s =
                    serde_json::to_string_pretty(&self.envelope(wall_time)).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut out = csv_block(&self.rows);
                if let Some(s) = &self.summary {
                    out.push('\n');
                    out.push_str(&csv_block(std::slice::from_ref(s)));
                }
                out
            }
            Format::Table => {
                let mut out = table_block(&self.rows);
                if let Some(s) = &self.summary {
                    if !self.rows.is_empty() {
                        out.push('\n');
                    }
                    let width = s.keys().map(|k| k.chars().count()).max().unwrap_or(0);
                    for (k, v) in s {
                        out.push_str(&format!("{k:<width$}  {}\n", cell(v, " ")));
                    }
                }
                if let Some(t) = wall_time {
                    out.push_str(&format!("\nwall time: {} s\n", cell(&num(t), " ")));
                }
                out
            }
        }
    }
}

/// Round to 12 significant digits; non-finite values become null.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().expect("float round trip");
    // normalize −0
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    serde_json::Number::from_f64(rounded)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

fn cell(v: &Value, sep: &str) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Array(xs) => xs
            .iter()
            .map(|x| cell(x, sep))
            .collect::<Vec<_>>()
            .join(sep),
        other => other.to_string(),
    }
}

fn columns(rows: &[Row]) -> Vec<String> {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        for k in r.keys() {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    cols
}

fn csv_field(s: String) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

fn csv_block(rows: &[Row]) -> String {
    let cols = columns(rows);
    let mut out = cols
        .iter()
        .cloned()
        .map(csv_field)
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for r in rows {
        let line: Vec<String> = cols
            .iter()
            .map(|c| match r.get(c) {
                None | Some(Value::Null) => String::new(),
                Some(v) => csv_field(cell(v, ";")),
            })
            .collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

fn table_block(rows: &[Row]) -> String {
    if rows.is_empty() {
        return String::new();
    }
    let cols = columns(rows);
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            cols.iter()
                .map(|c| r.get(c).map(|v| cell(v, " ")).unwrap_or_default())
                .collect()
        })
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| {
            cells
                .iter()
                .map(|r| r[i].chars().count())
                .chain([c.chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |items: &[String]| {
        let mut s = items
            .iter()
            .zip(&widths)
            .map(|(x, &w)| format!("{x:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        s.truncate(s.trim_end().len());
        s.push('\n');
        s
    };
    let mut out = line(&cols);
    out.push_str(&line(
        &widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>(),
    ));
    for r in &cells {
        out.push_str(&line(r));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(num(2.0 / 5f64.sqrt()).to_string(), "0.894427191");
        assert_eq!(num(1.0 / 3.0).to_string(), "0.333333333333");
        assert_eq!(num(-0.0).to_string(), "0.0");
        assert_eq!(num(f64::NAN), Value::Null);
    }

    #[test]
    fn csv_quotes_commas() {
        let mut r = Row::new();
        r.insert("subset".into(), json!("1,2"));
        r.insert("x".into(), num(0.5));
        assert_eq!(csv_block(&[r]), "subset,x\n\"1,2\",0.5\n");
    }
}
