//! Record rendering shared by every subcommand.
//!
//! Floats are rounded to 6 significant digits before printing; counts and
//! ratios are already exact strings.

use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// `key: value` lines; a lone field prints bare.
    Text,
    /// One JSON object per line.
    Json,
    Csv,
}

pub type Record = Map<String, Value>;

pub fn round6(x: f64) -> Value {
    if !x.is_finite() {
        return Value::String(x.to_string());
    }
    let r: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    Number::from_f64(r).map_or(Value::Null, Value::Number)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => *v = round6(n.as_f64().expect("f64")),
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn emit(out: &mut dyn Write, format: Format, records: Vec<Record>) -> io::Result<()> {
    let records: Vec<Record> = records
        .into_iter()
        .map(|r| {
            let mut v = Value::Object(r);
            round_floats(&mut v);
            match v {
                Value::Object(m) => m,
                _ => unreachable!(),
            }
        })
        .collect();
    match format {
        Format::Text => {
            for (i, r) in records.iter().enumerate() {
                if i > 0 {
                    writeln!(out)?;
                }
                if r.len() == 1 {
                    writeln!(out, "{}", plain(r.values().next().expect("one field")))?;
                } else {
                    for (k, v) in r {
                        writeln!(out, "{k}: {}", plain(v))?;
                    }
                }
            }
        }
        Format::Json => {
            for r in &records {
                writeln!(out, "{}", Value::Object(r.clone()))?;
            }
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            if let Some(first) = records.first() {
                w.write_record(first.keys())?;
            }
            for r in &records {
                w.write_record(r.values().map(plain))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round6(139.71934), serde_json::json!(139.719));
        assert_eq!(round6(0.000123456789), serde_json::json!(0.000123457));
        assert_eq!(round6(f64::INFINITY), serde_json::json!("inf"));
    }

    #[test]
    fn text_single_field_is_bare() {
        let mut r = Record::new();
        r.insert("count".into(), Value::String("120".into()));
        let mut buf = Vec::new();
        emit(&mut buf, Format::Text, vec![r]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "120\n");
    }
}
