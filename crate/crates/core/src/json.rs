//! JSON interchange for series and deterministic float formatting.
//!
//! ```
//! use jacobi0::json::{parse_series, series_json, SeriesDoc};
//! use jacobi0::weierstrass::sigma_series;
//!
//! let text = series_json(&SeriesDoc::from(&sigma_series(2)), false).unwrap();
//! assert!(text.starts_with(r#"{"kind":"biseries","field":"exact","N":2"#));
//! let back = parse_series(&text).unwrap().into_biseries().unwrap();
//! assert_eq!(back, sigma_series(2));
//! ```

use std::io;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};

use crate::error::{Error, Result};
use crate::qseries::{BiSeries, FieldTag, FracQSeries};

/// A series document, tagged by `"kind"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SeriesDoc {
    Biseries(BiSeriesDoc),
    Fracqseries(FracQSeriesDoc),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BiSeriesDoc {
    pub field: FieldTag,
    #[serde(rename = "N")]
    pub order: usize,
    pub terms: Vec<BiTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BiTerm {
    Exact { n: usize, r: i64, num: String, den: String },
    Complex { n: usize, r: i64, re: f64, im: f64 },
}

/// Raw coefficients; the value is `scale · Σ (re + i·im) q^{e/D}`.
/// `truncation` and `scale` are omitted when they carry no information
/// (truncation at the last term, scale 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracQSeriesDoc {
    #[serde(rename = "D")]
    pub denominator: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<[f64; 2]>,
    pub terms: Vec<FracTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FracTerm {
    pub e: i64,
    pub re: f64,
    pub im: f64,
}

impl From<&BiSeries> for SeriesDoc {
    fn from(s: &BiSeries) -> Self {
        let terms = match s.field() {
            FieldTag::Exact => s
                .exact_terms()
                .map(|(n, r, c)| BiTerm::Exact {
                    n,
                    r,
                    num: c.numer().to_string(),
                    den: c.denom().to_string(),
                })
                .collect(),
            FieldTag::Complex => s
                .complex_terms()
                .into_iter()
                .map(|(n, r, c)| BiTerm::Complex { n, r, re: c.re, im: c.im })
                .collect(),
        };
        SeriesDoc::Biseries(BiSeriesDoc {
            field: s.field(),
            order: s.order(),
            terms,
        })
    }
}

impl From<&FracQSeries> for SeriesDoc {
    fn from(s: &FracQSeries) -> Self {
        let terms: Vec<FracTerm> = s.terms().map(|(e, c)| FracTerm { e, re: c.re, im: c.im }).collect();
        let last = terms.last().map(|t| t.e);
        let scale = s.scale();
        SeriesDoc::Fracqseries(FracQSeriesDoc {
            denominator: s.denominator(),
            truncation: (Some(s.truncation()) != last).then_some(s.truncation()),
            scale: (scale != Complex64::new(1.0, 0.0)).then_some([scale.re, scale.im]),
            terms,
        })
    }
}

fn parse_big(s: &str) -> Result<BigInt> {
    s.parse().map_err(|_| Error::Parse(format!("`{s}` is not a decimal integer")))
}

impl SeriesDoc {
    pub fn into_biseries(self) -> Result<BiSeries> {
        let SeriesDoc::Biseries(doc) = self else {
            return Err(Error::Parse("expected a biseries document".into()));
        };
        let mut out = match doc.field {
            FieldTag::Exact => BiSeries::exact(doc.order),
            FieldTag::Complex => BiSeries::complex(doc.order),
        };
        for t in doc.terms {
            match t {
                BiTerm::Exact { n, r, num, den } => {
                    let den = parse_big(&den)?;
                    if den == BigInt::from(0) {
                        return Err(Error::Parse("zero denominator".into()));
                    }
                    out.insert_exact(n, r, BigRational::new(parse_big(&num)?, den))?
                }
                BiTerm::Complex { n, r, re, im } => out.insert_complex(n, r, Complex64::new(re, im))?,
            }
        }
        Ok(out)
    }

    pub fn into_fracqseries(self) -> Result<FracQSeries> {
        let SeriesDoc::Fracqseries(doc) = self else {
            return Err(Error::Parse("expected a fracqseries document".into()));
        };
        if doc.denominator == 0 {
            return Err(Error::Parse("D must be positive".into()));
        }
        let min = doc.terms.iter().map(|t| t.e).min().unwrap_or(0);
        let top = doc.terms.iter().map(|t| t.e).max().unwrap_or(0);
        let mut out = FracQSeries::new(doc.denominator, min, doc.truncation.unwrap_or(top));
        for t in doc.terms {
            out.add_term(t.e, Complex64::new(t.re, t.im));
        }
        let [re, im] = doc.scale.unwrap_or([1.0, 0.0]);
        Ok(out.scaled(Complex64::new(re, im)))
    }
}

pub fn parse_series(text: &str) -> Result<SeriesDoc> {
    Ok(serde_json::from_str(text)?)
}

/// Wraps a `serde_json` formatter so every float is written as `{:.16e}`
/// (17 significant digits), making output byte-stable.
pub struct CanonicalFormatter<F>(pub F);

macro_rules! forward {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl<F: Formatter> Formatter for CanonicalFormatter<F> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    forward!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        end_object_key(),
        begin_object_value(),
        end_object_value(),
    );
}

/// Serialises `value` with [`CanonicalFormatter`]; `pretty` indents by two
/// spaces.
pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T, pretty: bool) -> Result<String> {
    let mut buf = Vec::new();
    if pretty {
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter(PrettyFormatter::new()));
        value.serialize(&mut ser)?;
    } else {
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter(CompactFormatter));
        value.serialize(&mut ser)?;
    }
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn series_json(doc: &SeriesDoc, pretty: bool) -> Result<String> {
    to_canonical_json(doc, pretty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::delta_qexp;
    use crate::klein::klein_qexp;
    use crate::weierstrass::{sigma_series, RationalPair};

    #[test]
    fn exact_series_round_trip() {
        let s = sigma_series(5);
        let text = series_json(&SeriesDoc::from(&s), false).unwrap();
        assert!(text.contains(r#"{"n":4,"r":-1,"num":"-22","den":"1"}"#), "{text}");
        assert_eq!(parse_series(&text).unwrap().into_biseries().unwrap(), s);
    }

    #[test]
    fn complex_series_round_trip() {
        let s = sigma_series(3).to_complex();
        let text = series_json(&SeriesDoc::from(&s), true).unwrap();
        assert!(text.contains("\"field\": \"complex\""));
        assert_eq!(parse_series(&text).unwrap().into_biseries().unwrap(), s);
    }

    #[test]
    fn frac_series_round_trip() {
        let s = klein_qexp(&RationalPair::from_fractions(1, 3, 1, 5), 3);
        let text = series_json(&SeriesDoc::from(&s), false).unwrap();
        assert!(text.starts_with(r#"{"kind":"fracqseries","D":18,"#), "{text}");
        assert!(text.contains("\"scale\""));
        assert_eq!(parse_series(&text).unwrap().into_fracqseries().unwrap(), s);

        let d = delta_qexp(4);
        let text = series_json(&SeriesDoc::from(&d), false).unwrap();
        assert!(text.contains(r#"{"e":2,"re":-2.4000000000000000e1,"im":0.0000000000000000e0}"#), "{text}");
    }

    #[test]
    fn floats_use_seventeen_digits() {
        let text = to_canonical_json(&[0.1f64, -3.0, 1e-300], false).unwrap();
        assert_eq!(text, "[1.0000000000000001e-1,-3.0000000000000000e0,1.0000000000000000e-300]");
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(back, vec![0.1, -3.0, 1e-300]);
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let doc = SeriesDoc::from(&delta_qexp(2));
        assert!(doc.into_biseries().is_err());
        assert!(parse_series(r#"{"kind":"other"}"#).is_err());
        let bad = r#"{"kind":"biseries","field":"exact","N":1,"terms":[{"n":0,"r":0,"num":"1","den":"0"}]}"#;
        assert!(parse_series(bad).unwrap().into_biseries().is_err());
    }
}
