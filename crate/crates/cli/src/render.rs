//! Report rendering: canonical JSON, flat CSV, and a readable text form.

use clap::ValueEnum;
use num_rational::BigRational;
use serde_json::Value;

use l2rank_core::ratio_string;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub fn ratio_json(r: Option<&BigRational>) -> Value {
    match r {
        Some(r) => Value::String(ratio_string(r)),
        None => Value::Null,
    }
}

/// Renders a report; JSON is pretty-printed with sorted keys, so repeated
/// runs with the same configuration are byte-identical.
pub fn format_report(report: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut text = serde_json::to_string_pretty(report).expect("serializable");
            text.push('\n');
            text
        }
        Format::Csv => {
            let mut out = String::from("key,value\n");
            flatten("", report, &mut |key, value| {
                out.push_str(&format!("{key},{}\n", csv_cell(value)));
            });
            out
        }
        Format::Text => {
            let mut out = String::new();
            flatten("", report, &mut |key, value| {
                out.push_str(&format!("{key} = {}\n", text_cell(value)));
            });
            out
        }
    }
}

fn flatten(prefix: &str, v: &Value, emit: &mut impl FnMut(&str, &Value)) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, inner, emit);
            }
        }
        Value::Array(items) => {
            if items.iter().all(|i| !i.is_object() && !i.is_array()) {
                emit(prefix, v);
            } else {
                for (i, inner) in items.iter().enumerate() {
                    flatten(&format!("{prefix}[{i}]"), inner, emit);
                }
            }
        }
        other => emit(prefix, other),
    }
}

fn csv_cell(v: &Value) -> String {
    let raw = text_cell(v);
    if raw.contains(',') || raw.contains('"') {
        format!("\"{}\"", raw.replace('"', "\"\""))
    } else {
        raw
    }
}

fn text_cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let inner: Vec<String> = items.iter().map(text_cell).collect();
            format!("[{}]", inner.join(" "))
        }
        other => other.to_string(),
    }
}
