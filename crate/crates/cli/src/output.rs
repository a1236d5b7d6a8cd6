//! Rendering in the three output formats.

use clap::ValueEnum;
use num_complex::Complex64;
use serde::Serialize;

use jacobi0::json::{to_canonical_json, BiTerm, SeriesDoc};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Pretty,
}

/// Flat rows for CSV output.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub fn num(x: f64) -> String {
    // no "-0" in tables
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

pub fn re_im(z: Complex64) -> [String; 2] {
    [num(z.re), num(z.im)]
}

pub fn render<T: Serialize>(value: &T, table: impl FnOnce() -> Table, format: Format) -> Result<String, String> {
    match format {
        Format::Json => to_canonical_json(value, false).map_err(|e| e.to_string()),
        Format::Pretty => to_canonical_json(value, true).map_err(|e| e.to_string()),
        Format::Csv => {
            let table = table();
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.header).map_err(|e| e.to_string())?;
            for row in &table.rows {
                w.write_record(row).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())
        }
    }
}

pub fn series_table(doc: &SeriesDoc) -> Table {
    match doc {
        SeriesDoc::Biseries(b) => {
            let exact = b.terms.iter().any(|t| matches!(t, BiTerm::Exact { .. }));
            let mut t = Table::new(if exact { &["n", "r", "num", "den"] } else { &["n", "r", "re", "im"] });
            for term in &b.terms {
                t.push(match term {
                    BiTerm::Exact { n, r, num, den } => vec![n.to_string(), r.to_string(), num.clone(), den.clone()],
                    BiTerm::Complex { n, r, re, im } => vec![n.to_string(), r.to_string(), self::num(*re), self::num(*im)],
                });
            }
            t
        }
        SeriesDoc::Fracqseries(f) => {
            // raw coefficients; the series value is scale · Σ c q^{e/D}
            let [sr, si] = f.scale.unwrap_or([1.0, 0.0]);
            let mut t = Table::new(&["e", "D", "re", "im", "scale_re", "scale_im"]);
            for term in &f.terms {
                t.push(vec![
                    term.e.to_string(),
                    f.denominator.to_string(),
                    num(term.re),
                    num(term.im),
                    num(sr),
                    num(si),
                ]);
            }
            t
        }
    }
}
