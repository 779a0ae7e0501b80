//! Self-contained SVG scatter and line plots with a 10-color categorical palette.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::dataset::Label;
use crate::error::{Error, Result};
use crate::projection::Projection2D;

pub const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
];

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 56.0;
const LEGEND_W: f64 = 130.0;

fn color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Maps data coordinates into the plot area.
struct Frame {
    x: (f64, f64),
    y: (f64, f64),
}

impl Frame {
    fn fit(xs: impl Iterator<Item = f64> + Clone, ys: impl Iterator<Item = f64> + Clone) -> Self {
        let range = |it: &mut dyn Iterator<Item = f64>| {
            let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
            if !lo.is_finite() {
                (0.0, 1.0)
            } else if lo == hi {
                (lo - 0.5, hi + 0.5)
            } else {
                let pad = 0.05 * (hi - lo);
                (lo - pad, hi + pad)
            }
        };
        Self { x: range(&mut xs.clone()), y: range(&mut ys.clone()) }
    }

    fn px(&self, x: f64) -> f64 {
        MARGIN + (x - self.x.0) / (self.x.1 - self.x.0) * (WIDTH - 2.0 * MARGIN - LEGEND_W)
    }

    fn py(&self, y: f64) -> f64 {
        HEIGHT - MARGIN - (y - self.y.0) / (self.y.1 - self.y.0) * (HEIGHT - 2.0 * MARGIN)
    }

    fn axes(&self, svg: &mut String, title: &str, xlabel: &str, ylabel: &str) {
        let (x0, x1) = (self.px(self.x.0), self.px(self.x.1));
        let (y0, y1) = (self.py(self.y.0), self.py(self.y.1));
        let _ = writeln!(svg, r##"<rect x="{x0:.2}" y="{y1:.2}" width="{:.2}" height="{:.2}" fill="none" stroke="#333"/>"##, x1 - x0, y0 - y1);
        for k in 0..=4 {
            let t = k as f64 / 4.0;
            let xv = self.x.0 + t * (self.x.1 - self.x.0);
            let yv = self.y.0 + t * (self.y.1 - self.y.0);
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#, self.px(xv), y0 + 16.0, tick(xv));
            let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#, x0 - 6.0, self.py(yv) + 4.0, tick(yv));
        }
        let _ = writeln!(svg, r#"<text x="{:.2}" y="24" font-size="15" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, escape(title));
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#, (x0 + x1) / 2.0, HEIGHT - 14.0, escape(xlabel));
        let _ = writeln!(svg, r#"<text x="16" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#, (y0 + y1) / 2.0, (y0 + y1) / 2.0, escape(ylabel));
    }
}

fn tick(v: f64) -> String {
    if v.abs() >= 1000.0 || (v != 0.0 && v.abs() < 0.01) {
        format!("{v:.1e}")
    } else {
        format!("{v:.2}")
    }
}

fn legend(svg: &mut String, entries: &[(String, &'static str)]) {
    let x = WIDTH - LEGEND_W + 8.0;
    for (i, (name, c)) in entries.iter().enumerate() {
        let y = MARGIN + 18.0 * i as f64;
        let _ = writeln!(svg, r#"<rect x="{x:.2}" y="{:.2}" width="10" height="10" fill="{c}"/>"#, y - 9.0);
        let _ = writeln!(svg, r#"<text x="{:.2}" y="{y:.2}" font-size="11">{}</text>"#, x + 16.0, escape(name));
    }
}

fn header() -> String {
    format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    )
}

fn save(path: &Path, svg: &str) -> Result<()> {
    let mut out = super::create(path)?;
    out.write_all(svg.as_bytes()).and_then(|_| out.flush()).map_err(|e| Error::io(path, e))
}

/// Renders a scatter plot with one `<circle>` per point, colored by label.
pub fn render_scatter(coords: &[(f64, f64)], labels: &[Label], title: &str) -> String {
    let frame = Frame::fit(coords.iter().map(|p| p.0), coords.iter().map(|p| p.1));
    let mut classes: Vec<Label> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    let slot = |l: Label| classes.binary_search(&l).unwrap_or(0);
    let mut svg = header();
    frame.axes(&mut svg, title, "MDS 1", "MDS 2");
    svg.push_str("<g stroke=\"none\" fill-opacity=\"0.7\">\n");
    for (&(x, y), &l) in coords.iter().zip(labels) {
        let _ = writeln!(svg, r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{}"/>"#, frame.px(x), frame.py(y), color(slot(l)));
    }
    svg.push_str("</g>\n");
    let entries: Vec<(String, &str)> = classes.iter().enumerate().map(|(i, c)| (format!("class {c}"), color(i))).collect();
    legend(&mut svg, &entries);
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg_scatter(path: impl AsRef<Path>, projection: &Projection2D, labels: &[Label], title: &str) -> Result<()> {
    let coords: Vec<(f64, f64)> = projection.coords.rows().into_iter().map(|r| (r[0], r[1])).collect();
    save(path.as_ref(), &render_scatter(&coords, labels, title))
}

/// A named curve; `None` values leave a gap in the drawn line.
#[derive(Debug, Clone, PartialEq)]
pub struct LineSeries {
    pub name: String,
    pub points: Vec<(f64, Option<f64>)>,
}

pub fn render_lines(series: &[LineSeries], title: &str, xlabel: &str, ylabel: &str) -> String {
    let all = || series.iter().flat_map(|s| s.points.iter().filter_map(|&(x, y)| y.map(|y| (x, y))));
    let frame = Frame::fit(all().map(|p| p.0), all().map(|p| p.1));
    let mut svg = header();
    frame.axes(&mut svg, title, xlabel, ylabel);
    for (i, s) in series.iter().enumerate() {
        let mut segment: Vec<String> = Vec::new();
        let flush = |seg: &mut Vec<String>, svg: &mut String| {
            if seg.len() > 1 {
                let _ = writeln!(svg, r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#, color(i), seg.join(" "));
            }
            seg.clear();
        };
        for &(x, y) in &s.points {
            match y {
                Some(y) => {
                    segment.push(format!("{:.2},{:.2}", frame.px(x), frame.py(y)));
                    let _ = writeln!(svg, r#"<rect x="{:.2}" y="{:.2}" width="4" height="4" fill="{}"/>"#, frame.px(x) - 2.0, frame.py(y) - 2.0, color(i));
                }
                None => flush(&mut segment, &mut svg),
            }
        }
        flush(&mut segment, &mut svg);
    }
    let entries: Vec<(String, &str)> = series.iter().enumerate().map(|(i, s)| (s.name.clone(), color(i))).collect();
    legend(&mut svg, &entries);
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg_lines(path: impl AsRef<Path>, series: &[LineSeries], title: &str, xlabel: &str, ylabel: &str) -> Result<()> {
    save(path.as_ref(), &render_lines(series, title, xlabel, ylabel))
}

/// Renders a grayscale image, one square cell per pixel; 0 is black, 1 white.
pub fn render_image(pixels: &Array2<f64>, title: &str) -> String {
    let (rows, cols) = pixels.dim();
    let cell = 12usize;
    let (w, h) = (cols * cell, rows * cell + 24);
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    let _ = writeln!(svg, r#"<text x="4" y="16" font-family="sans-serif" font-size="13">{}</text>"#, escape(title));
    for ((r, c), &v) in pixels.indexed_iter() {
        let g = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
        let _ = writeln!(svg, r#"<rect x="{}" y="{}" width="{cell}" height="{cell}" fill="rgb({g},{g},{g})"/>"#, c * cell, 24 + r * cell);
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_svg_image(path: impl AsRef<Path>, pixels: &Array2<f64>, title: &str) -> Result<()> {
    save(path.as_ref(), &render_image(pixels, title))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_circle_per_point() {
        let coords = vec![(0.0, 0.0), (1.0, 2.0), (3.0, -1.0)];
        let svg = render_scatter(&coords, &[0, 1, 1], "t & <b>");
        assert_eq!(svg.matches("<circle").count(), 3);
        assert!(svg.contains("t &amp; &lt;b&gt;"));
        assert!(svg.contains("class 1"));
    }

    #[test]
    fn gaps_split_polylines() {
        let s = LineSeries { name: "a".into(), points: vec![(0.0, Some(0.0)), (1.0, Some(-0.1)), (2.0, None), (3.0, Some(-0.3)), (4.0, Some(-0.2))] };
        let svg = render_lines(&[s], "GDV", "layer", "GDV");
        assert_eq!(svg.matches("<polyline").count(), 2);
    }

    #[test]
    fn degenerate_ranges_do_not_produce_nan() {
        let svg = render_scatter(&[(1.0, 1.0), (1.0, 1.0)], &[0, 0], "");
        assert!(!svg.contains("NaN"));
    }

    #[test]
    fn image_has_one_cell_per_pixel() {
        let px = Array2::from_shape_fn((28, 28), |(r, c)| (r * 28 + c) as f64 / 783.0);
        let svg = render_image(&px, "proto");
        assert_eq!(svg.matches("<rect").count(), 28 * 28 + 1);
        assert!(svg.contains("rgb(0,0,0)") && svg.contains("rgb(255,255,255)"));
    }
}
