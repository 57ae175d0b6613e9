//! `fpl gen`: packings and rasters from the three generators.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Subcommand};
use fpl_core::dynamics::{
    classify_critical_orbits, classify_grid, detect_attractors, detect_attractors_allowing_parabolic,
    extract_packing, label_components, window_warnings, ClassifyParams, ComponentMap, GridSpec, DEFAULT_MIN_CELLS,
};
use fpl_core::expr::parse_dynamical_map;
use fpl_core::generators::{apollonian_generate, carpet_generate, carpet_raster, DescartesQuadruple};
use fpl_core::geometry::{BoundingBox, MetricTag};
use fpl_core::packing::Packing;
use fpl_core::raster::{sidecar_path, write_raster, RasterHeader, RasterImage};
use serde_json::json;

use crate::args::{parse_root, parse_window, Metric};
use crate::output::warn;

const CONNECTIVITY_DISCLAIMER: &str = "components are 4-connected flood-fill regions of basin cells at this resolution; \
     connectivity of the true Fatou components is not certified";

#[derive(Subcommand)]
pub enum GenKind {
    /// Sierpinski carpet squares, plus a raster when --grid is given.
    Carpet(CarpetArgs),
    /// Apollonian circle packing grown from a Descartes quadruple.
    Apollonian(ApollonianArgs),
    /// Fatou-component packing of a rational map, plus its raster.
    Julia(JuliaArgs),
}

#[derive(Args)]
pub struct CarpetArgs {
    #[arg(long)]
    levels: u32,
    /// Raster side in cells; a multiple of 3^levels. The raster is written
    /// next to --out with a .pgm extension.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct ApollonianArgs {
    /// Signed curvatures k1,k2,k3,k4 (outer circle negative).
    #[arg(long, value_parser = parse_root, allow_hyphen_values = true)]
    root: [f64; 4],
    #[arg(long)]
    max_curvature: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct JuliaArgs {
    #[arg(long)]
    map: String,
    /// Cells along the longer side of the window.
    #[arg(long, default_value_t = 512)]
    grid: usize,
    /// x0,y0,x1,y1
    #[arg(long, value_parser = parse_window, allow_hyphen_values = true, default_value = "-2,-2,2,2")]
    window: BoundingBox,
    /// Iteration budget per cell.
    #[arg(long, default_value_t = 1000)]
    iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    capture_radius: f64,
    /// Cells whose distance estimate is below this many cell widths stay unresolved.
    #[arg(long, default_value_t = 1.0)]
    band: f64,
    /// Iterations spent following each critical orbit.
    #[arg(long, default_value_t = 2000)]
    orbit_budget: usize,
    /// Components smaller than this many cells are dropped.
    #[arg(long, default_value_t = DEFAULT_MIN_CELLS)]
    min_cells: usize,
    #[arg(long, value_enum, default_value = "euclid")]
    metric: Metric,
    /// Continue past a suspected parabolic cycle, leaving its basin unresolved.
    #[arg(long)]
    allow_parabolic: bool,
    /// Raster path; defaults to --out with a .pgm extension.
    #[arg(long)]
    raster: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

pub fn run(kind: GenKind) -> anyhow::Result<()> {
    match kind {
        GenKind::Carpet(a) => carpet(a),
        GenKind::Apollonian(a) => apollonian(a),
        GenKind::Julia(a) => julia(a),
    }
}

fn write_packing(p: &Packing, path: &Path) -> anyhow::Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    p.write_jsonl(&mut w)?;
    w.flush()?;
    Ok(())
}

fn summary(value: serde_json::Value) {
    println!("{value}");
}

fn carpet(a: CarpetArgs) -> anyhow::Result<()> {
    let p = carpet_generate(a.levels)?;
    write_packing(&p, &a.out)?;
    let mut raster = None;
    if let Some(res) = a.grid {
        let grid = carpet_raster(a.levels, res)?;
        let map = label_components(&grid);
        let path = a.out.with_extension("pgm");
        let mut parameters = BTreeMap::new();
        parameters.insert("generator".into(), json!("carpet"));
        parameters.insert("levels".into(), json!(a.levels));
        write_map_raster(&map, &path, res, None, parameters)?;
        raster = Some(path);
    }
    summary(json!({
        "curves": p.len(),
        "packing": a.out,
        "raster": raster,
        "provenance": p.provenance,
    }));
    Ok(())
}

fn apollonian(a: ApollonianArgs) -> anyhow::Result<()> {
    let root = DescartesQuadruple::from_curvatures(a.root)?;
    let run = apollonian_generate(&root, a.max_curvature)?;
    if run.identity_failures > 0 {
        warn(format!(
            "{} of {} quadruples failed the Descartes identity check",
            run.identity_failures, run.quadruples_formed
        ));
    }
    write_packing(&run.packing, &a.out)?;
    summary(json!({
        "curves": run.packing.len(),
        "integral": run.integral,
        "quadruples": run.quadruples_formed,
        "identity_failures": run.identity_failures,
        "packing": a.out,
        "provenance": run.packing.provenance,
    }));
    Ok(())
}

fn write_map_raster(
    map: &ComponentMap,
    path: &Path,
    resolution: usize,
    map_text: Option<String>,
    parameters: BTreeMap<String, serde_json::Value>,
) -> anyhow::Result<()> {
    let (image, quantized) = RasterImage::from_components(map);
    if quantized {
        warn("more than 65534 components: raster pixel values wrap and are no longer unique ids");
    }
    let header = RasterHeader {
        bbox: map.bbox,
        width: map.width,
        height: map.height,
        cell: map.cell,
        resolution,
        map: map_text,
        parameters,
        quantized,
    };
    write_raster(path, &image, &header).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn julia(a: JuliaArgs) -> anyhow::Result<()> {
    let f = parse_dynamical_map(&a.map)?;
    let attractors = if a.allow_parabolic {
        let (set, parabolic) = detect_attractors_allowing_parabolic(&f, a.orbit_budget)?;
        for c in &parabolic {
            warn(format!(
                "parabolic cycle suspected (period {}, multiplier modulus {:.6}); its basin is left unresolved",
                c.period, c.multiplier
            ));
        }
        set
    } else {
        detect_attractors(&f, a.orbit_budget)?
    };
    let orbits = classify_critical_orbits(&f, &attractors, a.orbit_budget, 1)?;
    if orbits.recurrence_suspected() {
        warn("a critical orbit in the Julia set appears recurrent; semi-hyperbolicity is not confirmed");
    }
    for w in window_warnings(&f, &attractors, &a.window) {
        warn(w);
    }
    warn(CONNECTIVITY_DISCLAIMER);

    let spec = GridSpec::new(a.window, a.grid)?;
    let params = ClassifyParams {
        max_iters: a.iters,
        capture_radius: a.capture_radius,
        band: a.band,
    };
    let grid = classify_grid(&f, &attractors, &spec, params);
    let map = label_components(&grid);
    let metric: MetricTag = a.metric.into();
    let mut packing = extract_packing(&map, metric, a.min_cells);
    packing.provenance = format!(
        "julia map={} grid={} window={},{},{},{} iters={} capture_radius={} band={} orbit_budget={} min_cells={} {}",
        a.map,
        a.grid,
        a.window.min[0],
        a.window.min[1],
        a.window.max[0],
        a.window.max[1],
        a.iters,
        a.capture_radius,
        a.band,
        a.orbit_budget,
        a.min_cells,
        packing.provenance
    );
    write_packing(&packing, &a.out)?;

    let raster = a.raster.clone().unwrap_or_else(|| a.out.with_extension("pgm"));
    let mut parameters = BTreeMap::new();
    parameters.insert("generator".into(), json!("julia"));
    parameters.insert("iters".into(), json!(a.iters));
    parameters.insert("capture_radius".into(), json!(a.capture_radius));
    parameters.insert("band".into(), json!(a.band));
    parameters.insert("orbit_budget".into(), json!(a.orbit_budget));
    parameters.insert("min_cells".into(), json!(a.min_cells));
    parameters.insert("metric".into(), json!(metric));
    parameters.insert("attractors".into(), json!(attractors.len()));
    parameters.insert("unresolved_fraction".into(), json!(grid.unresolved_fraction()));
    parameters.insert("critical_orbits".into(), serde_json::to_value(&orbits)?);
    write_map_raster(&map, &raster, a.grid, Some(a.map.clone()), parameters)?;

    summary(json!({
        "curves": packing.len(),
        "components": map.len(),
        "attractors": attractors.len(),
        "unresolved_fraction": grid.unresolved_fraction(),
        "packing": a.out,
        "raster": raster,
        "sidecar": sidecar_path(&raster),
    }));
    Ok(())
}
