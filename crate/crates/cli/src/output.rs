//! Report assembly: a header echoing the resolved configuration, a table of
//! results and trailing notes, rendered as text, CSV or JSON.

use std::io::Write;

use clap::ValueEnum;
use gauss_sieve::lab::{write_csv, ExperimentReport};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Complex(Complex64),
    Text(String),
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => short_real(*v),
            Cell::Complex(z) if z.im.abs() < 5e-7 => short_real(z.re),
            Cell::Complex(z) => {
                let sign = if z.im < 0.0 { '-' } else { '+' };
                format!("{}{sign}{}i", short_real(z.re), short_real(z.im.abs()))
            }
            Cell::Text(s) => s.clone(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Real(v) => v.to_string(),
            Cell::Complex(z) => z.to_string(),
            other => other.text(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Real(v) => json!(v),
            Cell::Complex(z) => json!([z.re, z.im]),
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<Complex64> for Cell {
    fn from(v: Complex64) -> Self {
        Cell::Complex(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

fn short_real(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-4..1e7).contains(&a) {
        format!("{v:.6e}")
    } else {
        format!("{v:.6}")
    }
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub enum Body {
    Table(Table),
    /// Experiment rows keep the library's CSV schema.
    Reports(Vec<ExperimentReport>),
}

pub struct Report {
    /// Resolved configuration: command name, parameters, seed and so on.
    pub config: Map<String, Value>,
    pub quadrature: Value,
    pub body: Body,
    pub notes: Vec<String>,
}

impl Report {
    fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("# sieve-lab {}", gauss_sieve::VERSION)];
        for (k, v) in &self.config {
            lines.push(format!("# {k} = {}", plain(v)));
        }
        if let Value::Object(q) = &self.quadrature {
            for (k, v) in q {
                lines.push(format!("# quadrature.{k} = {}", plain(v)));
            }
        }
        lines
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                let body = match &self.body {
                    Body::Table(t) => {
                        let rows: Vec<Value> = t
                            .rows
                            .iter()
                            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
                            .collect();
                        json!({ "columns": t.columns, "rows": rows })
                    }
                    Body::Reports(r) => json!({ "reports": r }),
                };
                let doc = json!({
                    "version": gauss_sieve::VERSION,
                    "config": self.config,
                    "quadrature": self.quadrature,
                    "result": body,
                    "notes": self.notes,
                });
                serde_json::to_writer_pretty(&mut *out, &doc)?;
                writeln!(out)
            }
            Format::Csv | Format::Text => {
                for line in self.header_lines() {
                    writeln!(out, "{line}")?;
                }
                match (&self.body, format) {
                    (Body::Table(t), Format::Csv) => write_table_csv(t, out)?,
                    (Body::Table(t), _) => write_table_text(t, out)?,
                    (Body::Reports(r), Format::Csv) => {
                        write_csv(r, &mut *out).map_err(std::io::Error::other)?
                    }
                    (Body::Reports(r), _) => write_table_text(&reports_table(r), out)?,
                }
                for note in &self.notes {
                    writeln!(out, "# {note}")?;
                }
                Ok(())
            }
        }
    }
}

fn plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn write_table_csv(t: &Table, out: &mut dyn Write) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&t.columns)?;
    for row in &t.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    w.flush()
}

fn write_table_text(t: &Table, out: &mut dyn Write) -> std::io::Result<()> {
    let cells: Vec<Vec<String>> = t
        .rows
        .iter()
        .map(|r| r.iter().map(Cell::text).collect())
        .collect();
    let widths: Vec<usize> = (0..t.columns.len())
        .map(|k| {
            cells
                .iter()
                .map(|r| r[k].len())
                .chain([t.columns[k].len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |items: Vec<&str>| {
        items
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    writeln!(out, "{}", line(t.columns.clone()))?;
    for r in &cells {
        writeln!(out, "{}", line(r.iter().map(String::as_str).collect()))?;
    }
    Ok(())
}

fn reports_table(reports: &[ExperimentReport]) -> Table {
    let mut t = Table::new(&["experiment", "trial", "lhs", "rhs", "ratio"]);
    for r in reports {
        let trial = match r.trial {
            Some(k) => Cell::Int(k as i64),
            None => Cell::Text(format!("max of {}", r.trials)),
        };
        t.push(vec![
            r.experiment.as_str().into(),
            trial,
            r.lhs.into(),
            r.rhs_bound.into(),
            r.ratio.into(),
        ]);
    }
    t
}
