//! Deterministic SVG rendering of experiment summaries.
//!
//! One SVG per parameter: mean error lines per estimator over the n grid,
//! shaded 2.5-97.5 percentile bands, and a dashed zero reference line.
//! Identical input bytes produce identical output bytes (fixed-precision
//! coordinates, estimators drawn in sorted order).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 480.0;
const MARGIN_LEFT: f64 = 78.0;
const MARGIN_RIGHT: f64 = 24.0;
const MARGIN_TOP: f64 = 34.0;
const MARGIN_BOTTOM: f64 = 54.0;

/// Parsed row of a summary CSV.
#[derive(Debug, Clone)]
struct SummaryRecord {
    n: f64,
    estimator: String,
    param: String,
    reps: usize,
    mean: f64,
    q025: f64,
    q975: f64,
}

fn color_for(estimator: &str) -> &'static str {
    match estimator {
        "ols_lim" => "#1f77b4",
        "tsls_lim" => "#ff7f0e",
        "tsls_lis" => "#2ca02c",
        _ => "#7f7f7f",
    }
}

fn parse_summary(text: &str) -> Result<Vec<SummaryRecord>> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty summary file".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    let need = |name: &str| -> Result<usize> {
        cols.iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::Format(format!("missing column `{name}`")))
    };
    let (ci_n, ci_est, ci_param) = (need("n")?, need("estimator")?, need("param")?);
    let ci_reps = need("reps")?;
    let ci_mean = need("mean_err")?;
    let (ci_q025, ci_q975) = (need("q025")?, need("q975")?);
    let mut out = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < cols.len() {
            return Err(Error::Format(format!(
                "line {}: expected {} fields, got {}",
                idx + 2,
                cols.len(),
                fields.len()
            )));
        }
        let num = |i: usize| -> Result<f64> {
            fields[i]
                .parse::<f64>()
                .map_err(|_| Error::Format(format!("line {}: bad number `{}`", idx + 2, fields[i])))
        };
        out.push(SummaryRecord {
            n: num(ci_n)?,
            estimator: fields[ci_est].to_string(),
            param: fields[ci_param].to_string(),
            reps: num(ci_reps)? as usize,
            mean: num(ci_mean)?,
            q025: num(ci_q025)?,
            q975: num(ci_q975)?,
        });
    }
    Ok(out)
}

fn fmt_coord(v: f64) -> String {
    format!("{v:.2}")
}

fn nice_ticks(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

fn render_param_svg(param: &str, records: &[&SummaryRecord]) -> String {
    // Axis ranges include zero and all band edges.
    let mut x_lo = f64::INFINITY;
    let mut x_hi = f64::NEG_INFINITY;
    let mut y_lo = 0.0f64;
    let mut y_hi = 0.0f64;
    for r in records {
        x_lo = x_lo.min(r.n);
        x_hi = x_hi.max(r.n);
        for v in [r.mean, r.q025, r.q975] {
            if v.is_finite() {
                y_lo = y_lo.min(v);
                y_hi = y_hi.max(v);
            }
        }
    }
    if !x_lo.is_finite() {
        x_lo = 0.0;
        x_hi = 1.0;
    }
    if x_hi == x_lo {
        x_hi = x_lo + 1.0;
    }
    let pad = (y_hi - y_lo).max(1e-12) * 0.06;
    y_lo -= pad;
    y_hi += pad;

    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let sx = move |x: f64| MARGIN_LEFT + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = move |y: f64| MARGIN_TOP + (y_hi - y) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" font-family="sans-serif" font-size="15" text-anchor="middle">mean error in {param} with 95% band</text>"#,
        WIDTH / 2.0
    );

    // Axes.
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1"/>"#,
        fmt_coord(MARGIN_LEFT),
        fmt_coord(MARGIN_TOP),
        fmt_coord(MARGIN_LEFT),
        fmt_coord(HEIGHT - MARGIN_BOTTOM)
    );
    let _ = writeln!(
        svg,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black" stroke-width="1"/>"#,
        fmt_coord(MARGIN_LEFT),
        fmt_coord(HEIGHT - MARGIN_BOTTOM),
        fmt_coord(WIDTH - MARGIN_RIGHT),
        fmt_coord(HEIGHT - MARGIN_BOTTOM)
    );
    for t in nice_ticks(x_lo, x_hi, 5) {
        let x = sx(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{1}" x2="{0}" y2="{2}" stroke="black"/>"#,
            fmt_coord(x),
            fmt_coord(HEIGHT - MARGIN_BOTTOM),
            fmt_coord(HEIGHT - MARGIN_BOTTOM + 5.0)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="middle">{}</text>"#,
            fmt_coord(x),
            fmt_coord(HEIGHT - MARGIN_BOTTOM + 20.0),
            t.round() as i64
        );
    }
    for t in nice_ticks(y_lo, y_hi, 5) {
        let y = sy(t);
        let _ = writeln!(
            svg,
            r#"<line x1="{1}" y1="{0}" x2="{2}" y2="{0}" stroke="black"/>"#,
            fmt_coord(y),
            fmt_coord(MARGIN_LEFT - 5.0),
            fmt_coord(MARGIN_LEFT)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="12" text-anchor="end">{:.3}</text>"#,
            fmt_coord(MARGIN_LEFT - 8.0),
            fmt_coord(y + 4.0),
            t
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13" text-anchor="middle">n</text>"#,
        fmt_coord(MARGIN_LEFT + plot_w / 2.0),
        fmt_coord(HEIGHT - 12.0)
    );

    // Zero reference line.
    if y_lo < 0.0 && y_hi > 0.0 {
        let y0 = sy(0.0);
        let _ = writeln!(
            svg,
            r#"<line x1="{0}" y1="{1}" x2="{2}" y2="{1}" stroke="black" stroke-width="1" stroke-dasharray="4 3"/>"#,
            fmt_coord(MARGIN_LEFT),
            fmt_coord(y0),
            fmt_coord(WIDTH - MARGIN_RIGHT)
        );
    }

    // Group by estimator in sorted order for deterministic bytes.
    let mut series: BTreeMap<&str, Vec<&SummaryRecord>> = BTreeMap::new();
    for r in records {
        series.entry(r.estimator.as_str()).or_default().push(r);
    }
    for rows in series.values_mut() {
        rows.sort_by(|a, b| a.n.partial_cmp(&b.n).unwrap());
    }

    for (est, rows) in &series {
        let color = color_for(est);
        // Band polygon unless degenerate (single replication).
        let banded: Vec<&&SummaryRecord> = rows
            .iter()
            .filter(|r| r.reps > 1 && r.q025.is_finite() && r.q975.is_finite())
            .collect();
        if banded.len() >= 2 {
            let mut pts = String::new();
            for r in &banded {
                let _ = write!(pts, "{},{} ", fmt_coord(sx(r.n)), fmt_coord(sy(r.q975)));
            }
            for r in banded.iter().rev() {
                let _ = write!(pts, "{},{} ", fmt_coord(sx(r.n)), fmt_coord(sy(r.q025)));
            }
            let _ = writeln!(
                svg,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.2" stroke="none"/>"#,
                pts.trim_end()
            );
        }
        let mut pts = String::new();
        for r in rows.iter().filter(|r| r.mean.is_finite()) {
            let _ = write!(pts, "{},{} ", fmt_coord(sx(r.n)), fmt_coord(sy(r.mean)));
        }
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            pts.trim_end()
        );
    }

    // Legend, one entry per estimator.
    let mut ly = MARGIN_TOP + 14.0;
    for est in series.keys() {
        let color = color_for(est);
        let lx = WIDTH - MARGIN_RIGHT - 150.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="{color}" stroke-width="2"/>"#,
            fmt_coord(lx),
            fmt_coord(ly - 4.0),
            fmt_coord(lx + 26.0),
            fmt_coord(ly - 4.0)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="13">{est}</text>"#,
            fmt_coord(lx + 32.0),
            fmt_coord(ly)
        );
        ly += 18.0;
    }

    svg.push_str("</svg>\n");
    svg
}

/// Renders one SVG per parameter found in the summary CSV text; returns
/// `(file name, svg bytes)` pairs in sorted parameter order.
pub fn render_summary(text: &str) -> Result<Vec<(String, String)>> {
    let records = parse_summary(text)?;
    if records.is_empty() {
        return Err(Error::Format("summary file has no data rows".into()));
    }
    let mut params: Vec<String> = records.iter().map(|r| r.param.clone()).collect();
    params.sort();
    params.dedup();
    let mut out = Vec::new();
    for param in params {
        let rows: Vec<&SummaryRecord> = records.iter().filter(|r| r.param == param).collect();
        out.push((format!("{param}.svg"), render_param_svg(&param, &rows)));
    }
    Ok(out)
}

/// Reads a summary CSV and writes the per-parameter SVGs into `out_dir`.
pub fn plot_summary_file(input: &Path, out_dir: &Path) -> Result<Vec<PathBuf>> {
    let text = std::fs::read_to_string(input)?;
    let rendered = render_summary(&text)?;
    std::fs::create_dir_all(out_dir)?;
    let mut paths = Vec::new();
    for (name, svg) in rendered {
        let path = out_dir.join(name);
        std::fs::write(&path, svg)?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "n,estimator,param,reps,ok,unstable,failed,mean_err,sd,se,q025,q975\n\
100,ols_lim,delta,5,5,0,0,-0.1,0.05,0.02,-0.2,0.0\n\
200,ols_lim,delta,5,5,0,0,-0.12,0.04,0.018,-0.19,-0.03\n\
100,tsls_lim,delta,5,5,0,0,0.01,0.08,0.035,-0.15,0.18\n\
200,tsls_lim,delta,5,5,0,0,0.0,0.06,0.027,-0.12,0.11\n\
100,ols_lim,rho,5,5,0,0,0.2,0.05,0.02,0.1,0.3\n\
200,ols_lim,rho,5,5,0,0,0.22,0.04,0.018,0.15,0.29\n";

    #[test]
    fn renders_one_svg_per_param() {
        let out = render_summary(SAMPLE).unwrap();
        assert_eq!(out.len(), 2);
        assert_eq!(out[0].0, "delta.svg");
        assert_eq!(out[1].0, "rho.svg");
        let delta = &out[0].1;
        // Two estimators: two mean polylines, two band polygons, a legend
        // entry each.
        assert_eq!(delta.matches("<polyline").count(), 2);
        assert_eq!(delta.matches("<polygon").count(), 2);
        assert!(delta.contains("ols_lim") && delta.contains("tsls_lim"));
        assert!(delta.contains("stroke-dasharray"));
    }

    #[test]
    fn rendering_is_deterministic() {
        let a = render_summary(SAMPLE).unwrap();
        let b = render_summary(SAMPLE).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn single_replication_drops_band() {
        let text = SAMPLE.replace(",5,5,0,0,", ",1,1,0,0,");
        let out = render_summary(&text).unwrap();
        assert_eq!(out[0].1.matches("<polygon").count(), 0);
        assert!(out[0].1.matches("<polyline").count() > 0);
    }

    #[test]
    fn missing_column_is_named() {
        let broken = SAMPLE.replace("q025", "qlow");
        let err = render_summary(&broken).unwrap_err();
        assert!(err.to_string().contains("q025"), "{err}");
    }
}
