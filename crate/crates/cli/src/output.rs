//! Record writers: CSV with a fixed header per record shape, or
//! newline-delimited JSON. All floats carry 17 significant digits so the
//! values round-trip exactly through text.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, Result};

use hypgreen_core::hyperbolic::HyperbolicPoint;

use crate::{Format, OutputArgs};
use crate::settings::ConfigMap;

/// 17 significant digits, round-trip exact for f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

enum FieldValue {
    Text(String),
    Number(String),
}

/// An ordered list of named fields; the order defines the CSV header.
pub struct Record {
    fields: Vec<(String, FieldValue)>,
}

impl Default for Record {
    fn default() -> Self {
        Self::new()
    }
}

impl Record {
    pub fn new() -> Self {
        Record { fields: Vec::new() }
    }

    pub fn field(mut self, name: &str, value: &str) -> Self {
        self.fields
            .push((name.into(), FieldValue::Text(value.into())));
        self
    }

    pub fn f64(mut self, name: &str, value: f64) -> Self {
        self.fields
            .push((name.into(), FieldValue::Number(fmt_f64(value))));
        self
    }

    pub fn usize(mut self, name: &str, value: usize) -> Self {
        self.fields
            .push((name.into(), FieldValue::Number(value.to_string())));
        self
    }

    /// Point coordinates joined with `;` (CSV-safe).
    pub fn point(self, name: &str, p: &HyperbolicPoint) -> Self {
        let mut coords: Vec<String> = p.tilde().iter().map(|c| fmt_f64(*c)).collect();
        coords.push(fmt_f64(p.height()));
        self.field(name, &coords.join(";"))
    }

    fn header(&self) -> String {
        self.fields
            .iter()
            .map(|(n, _)| n.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn csv_row(&self) -> String {
        self.fields
            .iter()
            .map(|(_, v)| match v {
                FieldValue::Text(t) | FieldValue::Number(t) => t.as_str(),
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    fn json_line(&self) -> String {
        let body = self
            .fields
            .iter()
            .map(|(n, v)| match v {
                FieldValue::Text(t) => format!("\"{}\":\"{}\"", escape_json(n), escape_json(t)),
                FieldValue::Number(t) => format!("\"{}\":{}", escape_json(n), t),
            })
            .collect::<Vec<_>>()
            .join(",");
        format!("{{{body}}}")
    }
}

fn escape_json(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

pub fn open_writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Sink enforcing one header per stream (CSV) or bare object lines (JSON).
pub struct OutputSink {
    writer: Box<dyn Write>,
    format: Format,
    header: Option<String>,
}

impl OutputSink {
    pub fn create(args: &OutputArgs, cfg: &ConfigMap) -> Result<Self> {
        let format = match args.format {
            Some(f) => f,
            None => match cfg.get_string("format").as_deref() {
                Some("json") => Format::Json,
                Some("csv") | None => Format::Csv,
                Some(other) => bail!("unknown format `{other}`"),
            },
        };
        let path = args.out.clone().or(cfg.get_string("out").map(Into::into));
        Ok(OutputSink {
            writer: open_writer(path.as_deref())?,
            format,
            header: None,
        })
    }

    pub fn write_record(&mut self, rec: &Record) -> Result<()> {
        match self.format {
            Format::Csv => {
                let header = rec.header();
                match &self.header {
                    None => {
                        writeln!(self.writer, "{header}")?;
                        self.header = Some(header);
                    }
                    Some(h) if *h != header => bail!("record shape changed mid-stream"),
                    _ => {}
                }
                writeln!(self.writer, "{}", rec.csv_row())?;
            }
            Format::Json => {
                writeln!(self.writer, "{}", rec.json_line())?;
            }
        }
        Ok(())
    }

    /// Trailing summary block: `#`-prefixed lines in CSV, a JSON object
    /// with a `summary` key in JSON.
    pub fn write_summary(&mut self, lines: &[String]) -> Result<()> {
        match self.format {
            Format::Csv => {
                for l in lines {
                    writeln!(self.writer, "# {l}")?;
                }
            }
            Format::Json => {
                for l in lines {
                    writeln!(self.writer, "{{\"summary\":\"{}\"}}", escape_json(l))?;
                }
            }
        }
        Ok(())
    }

    pub fn finish(&mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}
