//! Argument parsers for clap.

use num_complex::Complex64;

use jacobi0::weierstrass::parse_rational;
use jacobi0::{RationalPair, UnimodularMatrix};

fn real(s: &str) -> Result<f64, String> {
    let s = s.trim();
    if s.contains('/') {
        let r = parse_rational(s).map_err(|e| e.to_string())?;
        return Ok(*r.numer() as f64 / *r.denom() as f64);
    }
    s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"))
}

/// `"a+bi"`, `"a-bi"`, `"bi"`, `"i"`, `"a"`; components are decimals or
/// `p/q`.
pub fn complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err("empty complex number".into());
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(real(&t)?, 0.0));
    };
    // split at the last sign that is not the leading one or part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => real(v)?,
    };
    Ok(Complex64::new(real(re)?, im))
}

pub fn tau(s: &str) -> Result<Complex64, String> {
    let t = complex(s)?;
    if t.im > 0.0 && t.is_finite() {
        Ok(t)
    } else {
        Err(format!("τ = {s} is not in the upper half-plane"))
    }
}

pub fn pair(s: &str) -> Result<RationalPair, String> {
    s.parse().map_err(|e: jacobi0::Error| e.to_string())
}

pub fn matrix(s: &str) -> Result<UnimodularMatrix, String> {
    s.parse().map_err(|e: jacobi0::Error| e.to_string())
}

pub fn tolerance(s: &str) -> Result<f64, String> {
    let v = real(s)?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("tolerance must be positive, got {s}"))
    }
}

pub fn trunc(s: &str) -> Result<usize, String> {
    match s.trim().parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("truncation must be a positive integer, got {s}")),
    }
}
