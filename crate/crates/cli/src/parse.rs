//! Parsers for the command-line vector and range arguments.

use std::ops::RangeInclusive;

use wtdyn::{CompactVector, C64};

use crate::error::{CliError, Result};

/// Parses `index:value` entries separated by commas, e.g. `0:1,3:0.5+0.5i`.
/// Values are real or complex (`a+bi`, `a-bi`, `bi`). Repeated indices add up.
pub fn parse_sparse_vector(spec: &str) -> Result<CompactVector> {
    let bad = |msg: String| CliError::BadArgument(format!("vector spec {spec:?}: {msg}"));
    let mut entries = Vec::new();
    for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (index, value) = item
            .split_once(':')
            .ok_or_else(|| bad(format!("entry {item:?} is not index:value")))?;
        let index: i64 = index
            .trim()
            .parse()
            .map_err(|_| bad(format!("index {index:?} is not an integer")))?;
        let value = parse_complex(value.trim()).ok_or_else(|| bad(format!("value {value:?} is not a number")))?;
        entries.push((index, value));
    }
    if entries.is_empty() {
        return Err(bad("no entries".into()));
    }
    Ok(CompactVector::from_sparse(&entries))
}

fn parse_complex(s: &str) -> Option<C64> {
    let Some(body) = s.strip_suffix('i') else {
        return finite(s.parse().ok()?).map(|re| C64::new(re, 0.0));
    };
    // split at the last sign that is not part of an exponent or the leading sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (body[..i].parse().ok()?, parse_imaginary(&body[i..])?),
        None => (0.0, parse_imaginary(body)?),
    };
    Some(C64::new(finite(re)?, finite(im)?))
}

fn parse_imaginary(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => s.parse().ok(),
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// `a..b` or `a..=b` (both inclusive), or a single `b` meaning `default_start..=b`.
pub fn parse_range(spec: &str, default_start: usize) -> Result<RangeInclusive<usize>> {
    let bad = || CliError::BadArgument(format!("range {spec:?} is not N, A..B or A..=B"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let (a, b) = match spec.split_once("..") {
        Some((a, b)) => (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?),
        None => (default_start, num(spec)?),
    };
    if a > b {
        return Err(bad());
    }
    Ok(a..=b)
}
