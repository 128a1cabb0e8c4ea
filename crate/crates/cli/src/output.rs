use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::args::Format;

/// Significant digits kept for long integers in CSV.
const CSV_DIGITS: usize = 30;

pub fn render(payload: &Value, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(payload).expect("payload serializes");
            s.push('\n');
            s
        }
        Format::Csv => to_csv(payload),
    }
}

#[derive(Serialize)]
pub struct RunManifest<'a> {
    pub command_line: String,
    pub alpha: Option<&'a str>,
    pub seed: Option<u64>,
    pub version: &'static str,
    pub timestamp: u64,
    pub format: &'static str,
    /// SHA-256 of the bytes written to standard output.
    pub checksum: String,
}

impl<'a> RunManifest<'a> {
    pub fn new(args: &[String], alpha: Option<&'a str>, seed: Option<u64>, format: Format, payload: &str) -> Self {
        RunManifest {
            command_line: args.join(" "),
            alpha,
            seed,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            format: match format {
                Format::Json => "json",
                Format::Csv => "csv",
            },
            checksum: format!("sha256:{:x}", Sha256::digest(payload.as_bytes())),
        }
    }
}

fn rows(payload: &Value) -> Vec<&Value> {
    match payload {
        Value::Array(items) => items.iter().collect(),
        Value::Object(map) => match map.get("rows").or_else(|| map.get("suites")) {
            Some(Value::Array(items)) => items.iter().collect(),
            _ => vec![payload],
        },
        _ => vec![payload],
    }
}

/// `d.ddd…e+k` with `CSV_DIGITS` significant digits for integers longer
/// than that; everything else unchanged.
fn shorten(s: &str) -> String {
    let (sign, digits) = s.strip_prefix('-').map_or(("", s), |d| ("-", d));
    if digits.len() <= CSV_DIGITS || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return s.to_string();
    }
    format!("{sign}{}.{}e+{}", &digits[..1], &digits[1..CSV_DIGITS], digits.len() - 1)
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => shorten(s),
        other => other.to_string(),
    }
}

fn flatten(v: &Value, prefix: &str, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(x, &key(k), out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            out.push((prefix.to_string(), items.iter().map(scalar).collect::<Vec<_>>().join(";")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(x, &key(&i.to_string()), out);
            }
        }
        other => out.push((if prefix.is_empty() { "value".into() } else { prefix.to_string() }, scalar(other))),
    }
}

fn to_csv(payload: &Value) -> String {
    let flat: Vec<Vec<(String, String)>> = rows(payload)
        .into_iter()
        .map(|r| {
            let mut out = Vec::new();
            flatten(r, "", &mut out);
            out
        })
        .collect();
    let mut header: Vec<String> = Vec::new();
    for row in &flat {
        for (k, _) in row {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for row in &flat {
        let rec: Vec<&str> = header
            .iter()
            .map(|h| row.iter().find(|(k, _)| k == h).map_or("", |(_, v)| v.as_str()))
            .collect();
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}
