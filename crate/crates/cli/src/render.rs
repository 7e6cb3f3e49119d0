//! Text renderings. CSV and human output are produced from the JSON value
//! only, so they cannot drift from it.

use serde_json::Value;

use ghzbell::thresholds::format_percent;

use crate::Format;

/// Which array inside the JSON value is the command's table.
#[derive(Debug, Clone, Copy)]
pub enum Table {
    Thresholds,
    Sweep,
    Verify,
}

impl Table {
    fn key(self) -> &'static str {
        match self {
            Table::Thresholds => "rows",
            Table::Sweep => "points",
            Table::Verify => "checks",
        }
    }

    fn columns(self) -> &'static [&'static str] {
        match self {
            Table::Thresholds => &["n", "v_cr_new", "v_cr_old", "eta_cr"],
            Table::Sweep => &["visibility", "lhs", "rhs", "violated", "standard_error_lhs"],
            Table::Verify => &["name", "passed", "detail"],
        }
    }
}

pub fn render(value: &Value, format: Format, table: Option<Table>) -> Result<String, String> {
    match format {
        Format::Json => Ok(format!("{}\n", serde_json::to_string(value).expect("JSON values serialize"))),
        Format::Csv => match table {
            Some(t) => Ok(csv(value, t)),
            None => Err("--format csv is only available for tabular commands".into()),
        },
        Format::Human => Ok(match table {
            Some(Table::Thresholds) => thresholds_human(value),
            Some(t) => human_table(value, t),
            None => human(value, 0),
        }),
    }
}

fn rows(value: &Value, t: Table) -> &[Value] {
    value[t.key()].as_array().map(Vec::as_slice).unwrap_or(&[])
}

fn cell(v: &Value) -> String {
    match v {
        Value::Number(x) if x.is_f64() => format!("{:.6}", x.as_f64().unwrap()),
        Value::String(s) if s.contains(',') || s.contains('"') => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        Value::Null => "inf".into(),
        other => other.to_string(),
    }
}

fn csv(value: &Value, t: Table) -> String {
    let mut out = t.columns().join(",");
    out.push('\n');
    for row in rows(value, t) {
        let cells: Vec<String> = t.columns().iter().map(|c| cell(&row[*c])).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

fn align(header: Vec<String>, body: Vec<Vec<String>>) -> String {
    let widths: Vec<usize> = (0..header.len())
        .map(|i| body.iter().map(|r| r[i].chars().count()).chain([header[i].chars().count()]).max().unwrap_or(0))
        .collect();
    let line = |r: &[String]| {
        let padded: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{}\n", padded.join("  ").trim_end())
    };
    std::iter::once(line(&header)).chain(body.iter().map(|r| line(r))).collect()
}

fn thresholds_human(value: &Value) -> String {
    let header = ["N", "V_cr new %", "V_cr old %", "eta_cr %"].map(String::from).to_vec();
    let body = rows(value, Table::Thresholds)
        .iter()
        .map(|r| {
            let pct = |k: &str| r[k].as_f64().map(format_percent).unwrap_or_default();
            vec![r["n"].to_string(), pct("v_cr_new"), pct("v_cr_old"), pct("eta_cr")]
        })
        .collect();
    align(header, body)
}

fn human_table(value: &Value, t: Table) -> String {
    let mut head = String::new();
    if let Value::Object(map) = value {
        for (k, v) in map.iter().filter(|(k, _)| k.as_str() != t.key()) {
            head.push_str(&format!("{k}: {}\n", scalar(v)));
        }
    }
    let header = t.columns().iter().map(|c| c.to_string()).collect();
    let body = rows(value, t)
        .iter()
        .map(|r| t.columns().iter().map(|c| scalar(&r[*c])).collect())
        .collect();
    head + &align(header, body)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "inf".into(),
        other => other.to_string(),
    }
}

fn human(value: &Value, depth: usize) -> String {
    let pad = "  ".repeat(depth);
    match value {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| match v {
                Value::Object(_) => format!("{pad}{k}:\n{}", human(v, depth + 1)),
                _ => format!("{pad}{k}: {}\n", scalar(v)),
            })
            .collect(),
        other => format!("{pad}{}\n", scalar(other)),
    }
}
