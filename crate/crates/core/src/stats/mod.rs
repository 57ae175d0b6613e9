//! Distribution function `N(x)`, exponent estimates, box counts and the
//! scaling-ratio series.

pub mod boxcount;
pub mod distribution;
pub mod exponent;
pub mod fit;

pub use boxcount::{box_count, compare_n_n, dimension_estimate, BoxCountSeries, Comparison, DimensionEstimate};
pub use distribution::{
    curvature_distribution, eval_n, scaling_ratio_series, CurvatureDistribution, ScalingRatioSeries, ScalingRow,
};
pub use exponent::{exponent_estimate, log_spaced, ExponentEstimate};
pub use fit::{least_squares, LineFit};

use std::io::Write;

/// `# key=value` lines, in the given order.
pub fn write_comment_header<W: Write>(out: &mut W, header: &[(String, String)]) -> std::io::Result<()> {
    for (k, v) in header {
        writeln!(out, "# {k}={v}")?;
    }
    Ok(())
}

/// Shortest representation that round-trips.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

pub fn write_scaling_csv<W: Write>(
    mut out: W,
    header: &[(String, String)],
    series: &ScalingRatioSeries,
) -> std::io::Result<()> {
    write_comment_header(&mut out, header)?;
    writeln!(out, "x,N,ratio")?;
    for r in &series.rows {
        writeln!(out, "{},{},{}", fmt_f64(r.x), r.n, fmt_f64(r.ratio))?;
    }
    Ok(())
}

pub fn write_box_csv<W: Write>(mut out: W, header: &[(String, String)], series: &BoxCountSeries) -> std::io::Result<()> {
    write_comment_header(&mut out, header)?;
    writeln!(out, "eps,n")?;
    for &(e, n) in &series.points {
        writeln!(out, "{},{}", fmt_f64(e), n)?;
    }
    Ok(())
}

pub fn write_compare_csv<W: Write>(mut out: W, header: &[(String, String)], cmp: &Comparison) -> std::io::Result<()> {
    write_comment_header(&mut out, header)?;
    writeln!(out, "eps,N,n,ratio")?;
    for r in &cmp.rows {
        writeln!(out, "{},{},{},{}", fmt_f64(r.eps), r.big_n, r.small_n, fmt_f64(r.ratio))?;
    }
    Ok(())
}

/// `(x, N(x))` at every sample of a log grid.
pub fn write_ncurv_csv<W: Write>(
    mut out: W,
    header: &[(String, String)],
    d: &CurvatureDistribution,
    xs: &[f64],
) -> std::io::Result<()> {
    write_comment_header(&mut out, header)?;
    writeln!(out, "x,N")?;
    for &x in xs {
        writeln!(out, "{},{}", fmt_f64(x), d.count(x))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::carpet::carpet_generate;

    #[test]
    fn csv_layout() {
        let d = curvature_distribution(&carpet_generate(2).unwrap()).unwrap();
        let s = scaling_ratio_series(&d, 1.0, &[1.0, 10.0]);
        let mut buf = Vec::new();
        write_scaling_csv(&mut buf, &[("s".into(), "1".into())], &s).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "# s=1\nx,N,ratio\n1.0,1,1.0\n10.0,10,1.0\n");
    }
}
