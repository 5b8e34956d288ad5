//! Instance files: JSON `{"lower": [..], "upper": [..]}` or CSV rows
//! `lower,upper` with an optional header. Reals are written in shortest
//! round-trip form, so a written file reads back bit-identically.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceFormat {
    Json,
    Csv,
}

impl std::str::FromStr for InstanceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(InstanceFormat::Json),
            "csv" => Ok(InstanceFormat::Csv),
            other => Err(Error::Parse(format!("unknown instance format '{other}'"))),
        }
    }
}

impl InstanceFormat {
    /// Format implied by a file extension, if any.
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(InstanceFormat::Json),
            "csv" => Some(InstanceFormat::Csv),
            _ => None,
        }
    }

    /// JSON if the first non-blank byte opens an object, CSV otherwise.
    pub fn sniff(text: &str) -> Self {
        if text.trim_start().starts_with('{') {
            InstanceFormat::Json
        } else {
            InstanceFormat::Csv
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonInstance {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

pub fn parse_instance(text: &str, format: InstanceFormat) -> Result<Instance> {
    match format {
        InstanceFormat::Json => {
            let raw: JsonInstance =
                serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
            if raw.lower.len() != raw.upper.len() {
                return Err(Error::DimensionMismatch {
                    expected: raw.lower.len(),
                    got: raw.upper.len(),
                });
            }
            Instance::new(raw.lower, raw.upper)
        }
        InstanceFormat::Csv => parse_csv(text),
    }
}

fn parse_csv(text: &str) -> Result<Instance> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let (mut lower, mut upper) = (Vec::new(), Vec::new());
    for (row, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::Parse(e.to_string()))?;
        if rec.len() != 2 {
            return Err(Error::Parse(format!(
                "line {}: expected 2 fields, found {}",
                row + 1,
                rec.len()
            )));
        }
        if row == 0 && rec[0].eq_ignore_ascii_case("lower") && rec[1].eq_ignore_ascii_case("upper")
        {
            continue;
        }
        let field = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::Parse(format!("line {}: '{s}' is not a number", row + 1)))
        };
        lower.push(field(&rec[0])?);
        upper.push(field(&rec[1])?);
    }
    Instance::new(lower, upper)
}

pub fn format_instance(instance: &Instance, format: InstanceFormat) -> String {
    match format {
        InstanceFormat::Json => {
            let raw = JsonInstance {
                lower: instance.lower().to_vec(),
                upper: instance.upper().to_vec(),
            };
            serde_json::to_string(&raw).expect("finite reals serialize") + "\n"
        }
        InstanceFormat::Csv => {
            let mut s = String::from("lower,upper\n");
            for (lo, up) in instance.lower().iter().zip(instance.upper()) {
                writeln!(s, "{lo:?},{up:?}").unwrap();
            }
            s
        }
    }
}

/// Reads a file; `format` overrides extension and content sniffing.
pub fn read_instance(path: &Path, format: Option<InstanceFormat>) -> Result<Instance> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let format = format
        .or_else(|| InstanceFormat::from_path(path))
        .unwrap_or_else(|| InstanceFormat::sniff(&text));
    parse_instance(&text, format)
}

pub fn write_instance(
    path: &Path,
    instance: &Instance,
    format: Option<InstanceFormat>,
) -> Result<()> {
    let format = format
        .or_else(|| InstanceFormat::from_path(path))
        .unwrap_or(InstanceFormat::Json);
    std::fs::write(path, format_instance(instance, format))
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}
