//! Value parsers for grid, window and list flags.

use clap::ValueEnum;
use fpl_core::geometry::{BoundingBox, MetricTag};
use fpl_core::stats::log_spaced;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Metric {
    Euclid,
    Sphere,
}

impl From<Metric> for MetricTag {
    fn from(m: Metric) -> Self {
        match m {
            Metric::Euclid => MetricTag::Euclidean,
            Metric::Sphere => MetricTag::Spherical,
        }
    }
}

fn floats(text: &str, n: Option<usize>) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("not a number: '{s}'")))
        .collect::<Result<_, _>>()?;
    match n {
        Some(n) if v.len() != n => Err(format!("expected {n} comma-separated numbers, got {}", v.len())),
        _ => Ok(v),
    }
}

pub fn parse_window(text: &str) -> Result<BoundingBox, String> {
    let v = floats(text, Some(4))?;
    BoundingBox::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

pub fn parse_root(text: &str) -> Result<[f64; 4], String> {
    let v = floats(text, Some(4))?;
    Ok([v[0], v[1], v[2], v[3]])
}

/// A list of positive sample points: `log:a:b:k` (k per decade from a to
/// b), `pow:base:m0:m1` (`base^-m` for m0..=m1), or a comma list.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub text: String,
    pub values: Vec<f64>,
}

impl SampleGrid {
    pub fn range(&self) -> (f64, f64) {
        let lo = self.values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.values.iter().cloned().fold(0.0, f64::max);
        (lo, hi)
    }
}

pub fn parse_grid(text: &str) -> Result<SampleGrid, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| format!("not a number: '{s}'"));
    let values = match parts.as_slice() {
        ["log", a, b, k] => {
            let (a, b) = (num(a)?, num(b)?);
            let k: usize = k.parse().map_err(|_| format!("bad per-decade count '{k}'"))?;
            if !(a > 0.0 && b >= a && k > 0) {
                return Err("log grid needs 0 < a <= b and a positive per-decade count".into());
            }
            log_spaced(a, b, k)
        }
        ["pow", base, m0, m1] => {
            let base = num(base)?;
            let (m0, m1): (i32, i32) = (
                m0.parse().map_err(|_| format!("bad exponent '{m0}'"))?,
                m1.parse().map_err(|_| format!("bad exponent '{m1}'"))?,
            );
            if !(base > 1.0 && m0 <= m1) {
                return Err("pow grid needs base > 1 and m0 <= m1".into());
            }
            (m0..=m1).map(|m| base.powi(-m)).collect()
        }
        [list] => floats(list, None)?,
        _ => return Err(format!("unrecognized grid '{text}'")),
    };
    if values.is_empty() || values.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err("grid values must be positive and finite".into());
    }
    Ok(SampleGrid {
        text: text.to_string(),
        values,
    })
}
