//! CSV and JSON-lines serialization of curve records.
//!
//! Both formats carry the fields `quantity,r,eta_db,rho,value,stderr,b`.
//! Floats are written with 17 significant digits so they parse back to the
//! same `f64`. In CSV, missing coordinates are empty and `b` is
//! semicolon-joined; in JSON-lines they are `null` and an array.

use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::record::{CurveRecord, Quantity};
use crate::CliError;

pub const CSV_HEADER: &str = "quantity,r,eta_db,rho,value,stderr,b";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    JsonLines,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json-lines" | "jsonl" | "json" => Ok(Format::JsonLines),
            other => Err(CliError::Input(format!("unknown format {other:?} (csv or json-lines)"))),
        }
    }
}

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        // not representable in JSON; CSV readers accept these spellings
        format!("{x}")
    }
}

fn io_err(e: std::io::Error) -> CliError {
    CliError::Io(e.to_string())
}

fn csv_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn json_num(x: f64) -> String {
    if x.is_finite() {
        fmt_f64(x)
    } else {
        "null".into()
    }
}

fn json_opt(x: Option<f64>) -> String {
    x.map(json_num).unwrap_or_else(|| "null".into())
}

pub fn write_records<W: Write>(
    out: &mut W,
    records: &[CurveRecord],
    format: Format,
) -> Result<(), CliError> {
    match format {
        Format::Csv => {
            writeln!(out, "{CSV_HEADER}").map_err(io_err)?;
            for rec in records {
                let b: Vec<String> = rec.b.iter().map(|&x| fmt_f64(x)).collect();
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    rec.quantity,
                    csv_opt(rec.r),
                    csv_opt(rec.eta_db),
                    csv_opt(rec.rho),
                    fmt_f64(rec.value),
                    fmt_f64(rec.stderr),
                    b.join(";")
                )
                .map_err(io_err)?;
            }
        }
        Format::JsonLines => {
            for rec in records {
                let b: Vec<String> = rec.b.iter().map(|&x| json_num(x)).collect();
                writeln!(
                    out,
                    "{{\"quantity\":\"{}\",\"r\":{},\"eta_db\":{},\"rho\":{},\"value\":{},\"stderr\":{},\"b\":[{}]}}",
                    rec.quantity,
                    json_opt(rec.r),
                    json_opt(rec.eta_db),
                    json_opt(rec.rho),
                    json_num(rec.value),
                    json_num(rec.stderr),
                    b.join(",")
                )
                .map_err(io_err)?;
            }
        }
    }
    out.flush().map_err(io_err)
}

pub fn to_string(records: &[CurveRecord], format: Format) -> String {
    let mut buf = Vec::new();
    write_records(&mut buf, records, format).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("records are ASCII")
}

pub fn read_json_lines<R: BufRead>(input: R) -> Result<Vec<CurveRecord>, CliError> {
    input
        .lines()
        .filter(|l| l.as_ref().map_or(true, |s| !s.trim().is_empty()))
        .map(|line| {
            let line = line.map_err(io_err)?;
            serde_json::from_str(&line).map_err(|e| CliError::Input(format!("bad JSON line: {e}")))
        })
        .collect()
}

pub fn read_csv<R: std::io::Read>(input: R) -> Result<Vec<CurveRecord>, CliError> {
    let bad = |what: &str| CliError::Input(format!("bad CSV {what}"));
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = reader.headers().map_err(|e| CliError::Input(e.to_string()))?.clone();
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(bad("header"));
    }
    let num = |s: &str| s.parse::<f64>().map_err(|_| bad("number"));
    let opt = |s: &str| if s.is_empty() { Ok(None) } else { num(s).map(Some) };
    let mut out = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| CliError::Input(e.to_string()))?;
        let b = if row[6].is_empty() {
            Vec::new()
        } else {
            row[6].split(';').map(num).collect::<Result<Vec<_>, _>>()?
        };
        out.push(CurveRecord {
            quantity: row[0].parse::<Quantity>()?,
            r: opt(&row[1])?,
            eta_db: opt(&row[2])?,
            rho: opt(&row[3])?,
            value: num(&row[4])?,
            stderr: num(&row[5])?,
            b,
        });
    }
    Ok(out)
}
