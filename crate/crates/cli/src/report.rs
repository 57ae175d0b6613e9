//! `fpl report`: a markdown summary of analysis files with pass/fail
//! lines against fixed acceptance envelopes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::Args;
use fpl_core::error::FormatError;
use serde_json::Value;

use crate::output::sink;

/// sup/inf of N(x)/x^s must stay below this.
pub const ENVELOPE_SPREAD: f64 = 10.0;
/// Allowed gap between two estimates of the same exponent.
pub const EXPONENT_AGREEMENT: f64 = 0.05;
/// N(β/ε)/n(ε) must lie in [1/C, C].
pub const COMPARISON_C: f64 = 64.0;

#[derive(Args)]
pub struct ReportArgs {
    /// Analysis outputs (CSV or JSON) from `fpl analyze`.
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Analysis {
    Csv {
        header: BTreeMap<String, String>,
        rows: Vec<Vec<String>>,
    },
    Json(Value),
}

impl Analysis {
    fn kind(&self) -> String {
        match self {
            Analysis::Csv { header, .. } => header.get("analysis").cloned().unwrap_or_default(),
            Analysis::Json(v) => v["analysis"].as_str().unwrap_or_default().to_string(),
        }
    }

    fn header_f64(&self, key: &str) -> Option<f64> {
        match self {
            Analysis::Csv { header, .. } => header.get(key)?.parse().ok(),
            Analysis::Json(_) => None,
        }
    }
}

fn load(path: &Path) -> anyhow::Result<Analysis> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        return Ok(Analysis::Json(v));
    }
    let mut header = BTreeMap::new();
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(kv) = line.strip_prefix("# ") {
            let (k, v) = kv.split_once('=').ok_or_else(|| FormatError::Line {
                line: i + 1,
                message: "comment header line without '='".into(),
            })?;
            header.insert(k.to_string(), v.to_string());
        } else if !line.is_empty() {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    if !header.contains_key("analysis") {
        return Err(FormatError::Line {
            line: 1,
            message: format!("{} has no '# analysis=' header", path.display()),
        }
        .into());
    }
    Ok(Analysis::Csv { header, rows })
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn show(x: Option<f64>) -> String {
    x.map_or("none".to_string(), |v| format!("{v:.6}"))
}

fn column(rows: &[Vec<String>], k: usize) -> Vec<f64> {
    rows.iter().skip(1).filter_map(|r| r.get(k)?.parse().ok()).collect()
}

pub fn run(a: ReportArgs) -> anyhow::Result<()> {
    let mut loaded = Vec::new();
    for p in &a.inputs {
        loaded.push((p.clone(), load(p)?));
    }
    let mut table = String::new();
    let mut checks = String::new();
    let mut exponent: Option<f64> = None;
    let mut dimension: Option<f64> = None;
    for (path, an) in &loaded {
        let name = path.display();
        let kind = an.kind();
        match (kind.as_str(), an) {
            ("ncurv", Analysis::Csv { rows, .. }) => {
                let n = column(rows, 1);
                let monotone = n.windows(2).all(|w| w[0] <= w[1]);
                let _ = writeln!(table, "| {name} | ncurv | {} samples, N up to {} |", n.len(), n.last().copied().unwrap_or(0.0));
                let _ = writeln!(checks, "- N(x) nondecreasing ({name}): {}", verdict(monotone));
            }
            ("scaling", Analysis::Csv { .. }) => {
                let (sup, inf) = (an.header_f64("sup"), an.header_f64("inf"));
                let s = an.header_f64("s").unwrap_or(f64::NAN);
                let _ = writeln!(table, "| {name} | scaling | s = {s:.6}, sup = {}, inf = {} |", show(sup), show(inf));
                let ok = matches!((sup, inf), (Some(a), Some(b)) if a.is_finite() && b > 0.0 && a / b < ENVELOPE_SPREAD);
                let spread = match (sup, inf) {
                    (Some(a), Some(b)) => format!("sup/inf = {:.4}", a / b),
                    _ => "no nonzero ratios".into(),
                };
                let _ = writeln!(
                    checks,
                    "- Theorem Main envelope: {} ({spread}, limit {ENVELOPE_SPREAD}; {name})",
                    verdict(ok)
                );
            }
            ("boxdim", Analysis::Csv { .. }) => {
                let d = an.header_f64("dimension");
                let r2 = an.header_f64("r_squared").unwrap_or(f64::NAN);
                let _ = writeln!(table, "| {name} | boxdim | slope = {}, r^2 = {r2:.6} |", show(d));
                dimension = dimension.or(d);
            }
            ("compare", Analysis::Csv { .. }) => {
                let (hi, lo) = (an.header_f64("max_ratio"), an.header_f64("min_ratio"));
                let _ = writeln!(table, "| {name} | compare | ratios in [{}, {}] |", show(lo), show(hi));
                let ok = matches!((lo, hi), (Some(l), Some(h)) if l >= 1.0 / COMPARISON_C && h <= COMPARISON_C);
                let _ = writeln!(
                    checks,
                    "- Comparison lemma envelope [1/{COMPARISON_C}, {COMPARISON_C}]: {} ({name})",
                    verdict(ok)
                );
            }
            ("exponent", Analysis::Json(v)) => {
                let e = v["result"]["E"].as_f64();
                let t = v["result"]["crossover"]["t"].as_f64();
                let _ = writeln!(table, "| {name} | exponent | E = {}, crossover t = {} |", show(e), show(t));
                if let (Some(e), Some(t)) = (e, t) {
                    let _ = writeln!(
                        checks,
                        "- Exponent slope vs partial-sum crossover: {} (|E - t| = {:.4}, limit {EXPONENT_AGREEMENT}; {name})",
                        verdict((e - t).abs() <= EXPONENT_AGREEMENT),
                        (e - t).abs()
                    );
                }
                exponent = exponent.or(e);
            }
            ("homogeneity", Analysis::Json(v)) => {
                let r = &v["result"];
                let get = |check: &str, key: &str| -> Option<f64> {
                    (r[check]["status"] == "computed").then(|| r[check][key].as_f64()).flatten()
                };
                let alpha = get("alpha", "alpha");
                let beta = get("beta", "beta");
                let delta = get("delta", "delta");
                let tau = get("tau", "tau");
                let show = |x: Option<f64>| x.map_or("inapplicable".to_string(), |v| format!("{v:.6}"));
                let _ = writeln!(
                    table,
                    "| {name} | homogeneity | alpha = {}, beta = {}, delta = {}, tau = {} |",
                    show(alpha),
                    show(beta),
                    show(delta),
                    show(tau)
                );
                let finite = |x: Option<f64>| x.is_some_and(|v| v.is_finite() && v > 0.0);
                let _ = writeln!(
                    checks,
                    "- Homogeneity conditions (1), (2), (4) finite: {} ({name})",
                    verdict(finite(alpha) && finite(beta) && finite(tau))
                );
            }
            (other, _) => {
                let _ = writeln!(table, "| {name} | {other} | unrecognized |");
            }
        }
    }
    if let (Some(e), Some(d)) = (exponent, dimension) {
        let _ = writeln!(
            checks,
            "- Corollary check log N/log x vs boxdim slope: {} (|E - dim| = {:.4}, limit {EXPONENT_AGREEMENT})",
            verdict((e - d).abs() <= EXPONENT_AGREEMENT),
            (e - d).abs()
        );
    }

    let mut w = sink(a.out.as_deref())?;
    writeln!(w, "# Packing analysis summary\n")?;
    writeln!(w, "| file | analysis | values |")?;
    writeln!(w, "|---|---|---|")?;
    write!(w, "{table}")?;
    writeln!(w, "\n## Checks\n")?;
    if checks.is_empty() {
        writeln!(w, "- no checks apply to these inputs")?;
    } else {
        write!(w, "{checks}")?;
    }
    w.flush()?;
    Ok(())
}
