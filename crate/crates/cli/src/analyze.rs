//! `fpl analyze`: statistics and homogeneity reports over packing and
//! raster files.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Subcommand};
use fpl_core::dynamics::{extract_packing, label_components, ComponentMap, Grid, DEFAULT_MIN_CELLS};
use fpl_core::geometry::MetricTag;
use fpl_core::homogeneity::{
    carpet_points, curve_points, exact_shapes, homogeneity_report, raster_points, raster_shapes, HomogeneityParams,
};
use fpl_core::packing::Packing;
use fpl_core::raster::{read_raster, RasterHeader};
use fpl_core::stats::{
    box_count, compare_n_n, curvature_distribution, dimension_estimate, exponent_estimate, fmt_f64,
    scaling_ratio_series, write_box_csv, write_compare_csv, write_ncurv_csv, write_scaling_csv, CurvatureDistribution,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::args::{parse_grid, SampleGrid};
use crate::output::{sink, write_json, Header, UsageError};

#[derive(Subcommand)]
pub enum AnalyzeKind {
    /// Curvature distribution N(x) on an x grid (CSV).
    Ncurv(NcurvArgs),
    /// Exponent E as the log-log slope of N(x), with the partial-sum crossover (JSON).
    Exponent(ExponentArgs),
    /// Box counts n(eps) of the unresolved cells of a raster (CSV).
    Boxdim(BoxdimArgs),
    /// Quasi-ball, scale-density, separation and fatness constants (JSON).
    Homogeneity(HomogeneityArgs),
    /// N(x)/x^s along an x grid (CSV).
    Scaling(ScalingArgs),
    /// N(beta/eps)/n(eps) along an eps grid (CSV).
    Compare(CompareArgs),
}

#[derive(Args)]
pub struct NcurvArgs {
    /// Packing (.jsonl) or raster (.pgm with JSON sidecar).
    input: PathBuf,
    /// log:a:b:per-decade, pow:base:m0:m1 or a comma list.
    #[arg(long, value_parser = parse_grid)]
    x_grid: Option<SampleGrid>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ExponentArgs {
    input: PathBuf,
    /// The fit range is the span of this grid; sampling density is fixed.
    #[arg(long, value_parser = parse_grid)]
    x_grid: Option<SampleGrid>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BoxdimArgs {
    /// Raster (.pgm with JSON sidecar).
    input: PathBuf,
    /// Box sizes; defaults to halving from a quarter of the raster width.
    #[arg(long, value_parser = parse_grid)]
    eps_grid: Option<SampleGrid>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ScalingArgs {
    input: PathBuf,
    /// Exponent s: a number, or a boxdim CSV / exponent JSON report.
    #[arg(long)]
    s: Option<String>,
    #[arg(long, value_parser = parse_grid)]
    x_grid: Option<SampleGrid>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct CompareArgs {
    /// Packing whose N is compared.
    input: PathBuf,
    /// Raster whose unresolved cells give n(eps).
    #[arg(long)]
    raster: PathBuf,
    #[arg(long, default_value_t = std::f64::consts::SQRT_2)]
    beta: f64,
    #[arg(long, value_parser = parse_grid)]
    eps_grid: Option<SampleGrid>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct HomogeneityArgs {
    /// Packing (.jsonl) or raster (.pgm). Rasters supply component regions
    /// and unresolved cells as ball centers.
    input: PathBuf,
    /// Ball centers sampled from the residual set.
    #[arg(long, default_value_t = 500)]
    points: usize,
    #[arg(long, default_value_t = 8)]
    radii_per_decade: usize,
    /// Smallest ball radius. Defaults to four times the smallest curve
    /// diameter, and for rasters at least 16 cell widths.
    #[arg(long)]
    r_min: Option<f64>,
    #[arg(long)]
    r_max: Option<f64>,
    /// Trial beta for listing scale-density failures.
    #[arg(long, default_value_t = 10.0)]
    beta: f64,
    #[arg(long, default_value_t = 50_000_000)]
    pair_budget: usize,
    #[arg(long, default_value_t = 10_000)]
    fatness_samples: usize,
    /// Base-3 digits per carpet sample point.
    #[arg(long, default_value_t = 30)]
    carpet_depth: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run(kind: AnalyzeKind) -> anyhow::Result<()> {
    match kind {
        AnalyzeKind::Ncurv(a) => ncurv(a),
        AnalyzeKind::Exponent(a) => exponent(a),
        AnalyzeKind::Boxdim(a) => boxdim(a),
        AnalyzeKind::Homogeneity(a) => homogeneity(a),
        AnalyzeKind::Scaling(a) => scaling(a),
        AnalyzeKind::Compare(a) => compare(a),
    }
}

fn is_raster(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"))
}

struct RasterInput {
    header: RasterHeader,
    grid: Grid,
    map: ComponentMap,
}

fn load_raster(path: &Path) -> anyhow::Result<RasterInput> {
    let (image, header) = read_raster(path).with_context(|| format!("reading raster {}", path.display()))?;
    let grid = image.to_grid(header.bbox);
    let map = label_components(&grid);
    Ok(RasterInput { header, grid, map })
}

fn raster_packing(r: &RasterInput) -> Packing {
    let metric = r
        .header
        .parameters
        .get("metric")
        .and_then(|v| serde_json::from_value::<MetricTag>(v.clone()).ok())
        .unwrap_or(MetricTag::Euclidean);
    let min_cells = r
        .header
        .parameters
        .get("min_cells")
        .and_then(|v| v.as_u64())
        .map_or(DEFAULT_MIN_CELLS, |v| v as usize);
    extract_packing(&r.map, metric, min_cells)
}

fn load_packing(path: &Path) -> anyhow::Result<Packing> {
    if is_raster(path) {
        return Ok(raster_packing(&load_raster(path)?));
    }
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(Packing::read_jsonl(BufReader::new(file)).with_context(|| format!("reading packing {}", path.display()))?)
}

fn base_header(analysis: &str, input: &Path, p: Option<&Packing>) -> Header {
    let mut h = Header::new(analysis);
    h.push("input", input.display());
    if let Some(p) = p {
        h.push("provenance", &p.provenance);
        h.push("metric", p.metric);
        h.push("curves", p.len());
    }
    h.push("threads", rayon::current_num_threads());
    h
}

fn inverse_range(d: &CurvatureDistribution) -> (f64, f64) {
    let inv = d.inverse_diameters();
    (inv[0], inv[inv.len() - 1])
}

/// `[10 x_min, x_max / 10]` when that is nonempty, else the full range.
fn resolved_range(d: &CurvatureDistribution) -> (f64, f64) {
    let (lo, hi) = inverse_range(d);
    if 10.0 * lo < hi / 10.0 {
        (10.0 * lo, hi / 10.0)
    } else {
        (lo, hi)
    }
}

fn default_x_grid(range: (f64, f64)) -> SampleGrid {
    let text = format!("log:{}:{}:16", fmt_f64(range.0), fmt_f64(range.1));
    parse_grid(&text).expect("positive range")
}

fn ncurv(a: NcurvArgs) -> anyhow::Result<()> {
    let p = load_packing(&a.input)?;
    let d = curvature_distribution(&p)?;
    let xs = a.x_grid.unwrap_or_else(|| default_x_grid(inverse_range(&d)));
    let mut h = base_header("ncurv", &a.input, Some(&p));
    h.push("x_grid", &xs.text);
    let mut w = sink(a.out.as_deref())?;
    write_ncurv_csv(&mut w, &h.0, &d, &xs.values)?;
    w.flush()?;
    Ok(())
}

fn exponent(a: ExponentArgs) -> anyhow::Result<()> {
    let p = load_packing(&a.input)?;
    let d = curvature_distribution(&p)?;
    let (lo, hi) = match a.x_grid.as_ref() {
        Some(g) => g.range(),
        // raster packings lose curves at both ends of the range
        None if p.provenance.contains("raster") => {
            let r = resolved_range(&d);
            if exponent_estimate(&d, r.0, r.1).is_ok() {
                r
            } else {
                inverse_range(&d)
            }
        }
        None => inverse_range(&d),
    };
    let est = exponent_estimate(&d, lo, hi)?;
    let mut h = base_header("exponent", &a.input, Some(&p));
    h.push("x_range", format!("{},{}", fmt_f64(lo), fmt_f64(hi)));
    write_json(
        a.out.as_deref(),
        &json!({ "analysis": "exponent", "config": h.to_json(), "result": est }),
    )
}

fn default_eps(grid: &Grid) -> Vec<f64> {
    let span = grid.bbox.width().max(grid.bbox.height());
    let mut out = Vec::new();
    let mut e = span / 4.0;
    while e >= 2.0 * grid.cell * (1.0 - 1e-9) {
        out.push(e);
        e /= 2.0;
    }
    out
}

fn boxdim(a: BoxdimArgs) -> anyhow::Result<()> {
    if !is_raster(&a.input) {
        return Err(UsageError::Invalid("boxdim needs a .pgm raster".into()).into());
    }
    let r = load_raster(&a.input)?;
    let (eps_text, eps) = match a.eps_grid {
        Some(g) => (g.text, g.values),
        None => ("halving".to_string(), default_eps(&r.grid)),
    };
    let series = box_count(&r.grid, &eps)?;
    let fit = dimension_estimate(&series)?;
    let mut h = base_header("boxdim", &a.input, None);
    h.push("width", r.grid.width);
    h.push("height", r.grid.height);
    h.push("cell", fmt_f64(r.grid.cell));
    if let Some(m) = &r.header.map {
        h.push("map", m);
    }
    h.push("eps_grid", eps_text);
    h.push("convention", "grid_cover");
    h.push("dimension", fmt_f64(fit.slope()));
    h.push("r_squared", fmt_f64(fit.fit.r_squared));
    h.push("stderr", fmt_f64(fit.fit.stderr));
    let mut w = sink(a.out.as_deref())?;
    write_box_csv(&mut w, &h.0, &series)?;
    w.flush()?;
    Ok(())
}

/// `--s` as a number, or read from a report: `# dimension=` in a boxdim
/// CSV, or `result.E` in an exponent JSON.
fn resolve_s(arg: Option<&str>) -> anyhow::Result<(f64, String)> {
    let arg = arg.ok_or(UsageError::MissingDimension)?;
    if let Ok(v) = arg.parse::<f64>() {
        if !(v > 0.0) {
            return Err(UsageError::Invalid(format!("--s must be positive, got {v}")).into());
        }
        return Ok((v, arg.to_string()));
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path).with_context(|| format!("reading --s report {arg}"))?;
    if let Ok(v) = serde_json::from_str::<serde_json::Value>(&text) {
        if let Some(e) = v["result"]["E"].as_f64() {
            return Ok((e, format!("{arg} (E)")));
        }
    }
    for line in BufReader::new(text.as_bytes()).lines() {
        let line = line?;
        if let Some(v) = line.strip_prefix("# dimension=") {
            let s: f64 = v.trim().parse().with_context(|| format!("bad dimension in {arg}"))?;
            return Ok((s, format!("{arg} (dimension)")));
        }
    }
    Err(fpl_core::error::FormatError::Line {
        line: 1,
        message: format!("{arg} holds neither a dimension header nor an exponent result"),
    }
    .into())
}

fn scaling(a: ScalingArgs) -> anyhow::Result<()> {
    let (s, s_source) = resolve_s(a.s.as_deref())?;
    let p = load_packing(&a.input)?;
    let d = curvature_distribution(&p)?;
    let xs = a.x_grid.unwrap_or_else(|| default_x_grid(resolved_range(&d)));
    let series = scaling_ratio_series(&d, s, &xs.values);
    let mut h = base_header("scaling", &a.input, Some(&p));
    h.push("s", fmt_f64(s));
    h.push("s_source", s_source);
    h.push("x_grid", &xs.text);
    h.push("sup", series.sup.map_or("none".into(), fmt_f64));
    h.push("inf", series.inf.map_or("none".into(), fmt_f64));
    let mut w = sink(a.out.as_deref())?;
    write_scaling_csv(&mut w, &h.0, &series)?;
    w.flush()?;
    Ok(())
}

fn compare(a: CompareArgs) -> anyhow::Result<()> {
    if !(a.beta > 0.0) {
        return Err(UsageError::Invalid("--beta must be positive".into()).into());
    }
    let p = load_packing(&a.input)?;
    let d = curvature_distribution(&p)?;
    let r = load_raster(&a.raster)?;
    let (eps_text, eps) = match a.eps_grid {
        Some(g) => (g.text, g.values),
        None => ("halving".to_string(), default_eps(&r.grid)),
    };
    let series = box_count(&r.grid, &eps)?;
    let cmp = compare_n_n(&d, &series, a.beta);
    let mut h = base_header("compare", &a.input, Some(&p));
    h.push("raster", a.raster.display());
    h.push("beta", fmt_f64(a.beta));
    h.push("eps_grid", eps_text);
    h.push("max_ratio", cmp.max_ratio.map_or("none".into(), fmt_f64));
    h.push("min_ratio", cmp.min_ratio.map_or("none".into(), fmt_f64));
    h.push("low_confidence", cmp.low_confidence);
    let mut w = sink(a.out.as_deref())?;
    write_compare_csv(&mut w, &h.0, &cmp)?;
    w.flush()?;
    Ok(())
}

const RASTER_MIN_CELLS_PER_RADIUS: f64 = 16.0;

fn homogeneity(a: HomogeneityArgs) -> anyhow::Result<()> {
    let mut params = HomogeneityParams {
        points: a.points,
        radii_per_decade: a.radii_per_decade,
        r_min: a.r_min,
        r_max: a.r_max,
        trial_beta: a.beta,
        pair_budget: a.pair_budget,
        fatness_samples: a.fatness_samples,
        seed: a.seed,
    };
    // residual points use their own stream so fatness draws stay fixed
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    rng.set_stream(1);
    let (p, shapes, residual, sampler) = if is_raster(&a.input) {
        let r = load_raster(&a.input)?;
        let p = raster_packing(&r);
        if params.r_min.is_none() {
            // balls a few cells wide mostly meet components lost to the raster
            let d_min = p.curves().last().map_or(0.0, |c| c.diameter);
            params.r_min = Some((4.0 * d_min).max(RASTER_MIN_CELLS_PER_RADIUS * r.grid.cell));
        }
        let shapes = raster_shapes(&p, &r.map);
        let pts = raster_points(&r.grid, a.points, &mut rng);
        (p, shapes, pts, "raster-cells".to_string())
    } else {
        let p = load_packing(&a.input)?;
        let shapes = exact_shapes(&p);
        if p.provenance.starts_with("carpet") {
            let pts = carpet_points(a.points, a.carpet_depth, &mut rng);
            (p, shapes, pts, format!("carpet-digits depth={}", a.carpet_depth))
        } else {
            let pts = curve_points(&p, a.points, &mut rng);
            (p, shapes, pts, "curve-points".to_string())
        }
    };
    let report = homogeneity_report(&p, &shapes, &residual, &sampler, &params);
    let h = base_header("homogeneity", &a.input, Some(&p));
    write_json(
        a.out.as_deref(),
        &json!({ "analysis": "homogeneity", "config": h.to_json(), "result": report }),
    )
}
