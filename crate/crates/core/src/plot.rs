//! SVG figures: a strip chart of quantified nominal values and a parallel
//! coordinates plot of clustered learners.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::cluster::{FeaturePoint, AXIS_NAMES, DIMS};
use crate::error::{Error, Result};
use crate::quantify::{pair_report, AttributeValueMap, NominalAttribute};

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

pub fn escape_xml(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn pairs_attr(pairs: &[(u8, u8)]) -> String {
    pairs
        .iter()
        .map(|(a, b)| format!("{a}-{b}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn pairs_text(pairs: &[(u8, u8)]) -> String {
    pairs
        .iter()
        .map(|(a, b)| format!("{a} &amp; {b}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// One marker per parameter on a number line, with the most and least
/// similar parameter pairs written underneath.
pub fn values_svg(values: &AttributeValueMap, attribute: NominalAttribute) -> Result<String> {
    values.validate()?;
    const WIDTH: f64 = 640.0;
    const HEIGHT: f64 = 240.0;
    const LEFT: f64 = 60.0;
    const RIGHT: f64 = 580.0;
    const AXIS_Y: f64 = 130.0;

    let lo = values.iter().map(|(_, v)| v).fold(f64::INFINITY, f64::min);
    let hi = values
        .iter()
        .map(|(_, v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    let x_of = |v: f64| {
        let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.0 };
        LEFT + t * (RIGHT - LEFT)
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<text class="title" x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape_xml(attribute.title())
    );
    let _ = writeln!(
        svg,
        r#"<line class="axis" x1="{LEFT}" y1="{AXIS_Y}" x2="{RIGHT}" y2="{AXIS_Y}" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text class="tick" x="{LEFT}" y="{}" text-anchor="middle">{}</text>"#,
        AXIS_Y + 18.0,
        lo.round()
    );
    let _ = writeln!(
        svg,
        r#"<text class="tick" x="{RIGHT}" y="{}" text-anchor="middle">{}</text>"#,
        AXIS_Y + 18.0,
        hi.round()
    );
    for (p, v) in values.iter() {
        let x = x_of(v);
        let color = PALETTE[usize::from(p - 1) % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<circle class="param" data-param="{p}" data-value="{v}" cx="{x:.3}" cy="{AXIS_Y}" r="5" fill="{color}"/>"#
        );
        // labels stack so coincident markers stay readable
        let _ = writeln!(
            svg,
            r#"<text class="label" x="{x:.3}" y="{}" text-anchor="middle" fill="{color}">{p}</text>"#,
            AXIS_Y - 12.0 - 13.0 * f64::from(p - 1)
        );
    }

    let report = pair_report(values);
    let _ = writeln!(
        svg,
        r#"<text class="nearest" data-pairs="{}" data-distance="{}" x="{LEFT}" y="{}">Most similar: {} (distance {:.2})</text>"#,
        pairs_attr(&report.nearest),
        report.nearest_distance,
        AXIS_Y + 50.0,
        pairs_text(&report.nearest),
        report.nearest_distance
    );
    let _ = writeln!(
        svg,
        r#"<text class="farthest" data-pairs="{}" data-distance="{}" x="{LEFT}" y="{}">Least similar: {} (distance {:.2})</text>"#,
        pairs_attr(&report.farthest),
        report.farthest_distance,
        AXIS_Y + 70.0,
        pairs_text(&report.farthest),
        report.farthest_distance
    );
    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Geometry of the parallel coordinates plot.
pub mod parcoords {
    pub const WIDTH: f64 = 800.0;
    pub const HEIGHT: f64 = 420.0;
    pub const LEFT: f64 = 80.0;
    pub const RIGHT: f64 = 720.0;
    pub const TOP: f64 = 60.0;
    pub const BOTTOM: f64 = 360.0;

    pub fn axis_x(axis: usize) -> f64 {
        LEFT + axis as f64 * (RIGHT - LEFT) / (super::DIMS - 1) as f64
    }

    /// Ordinate for `value` on an axis spanning `[min, max]`; a flat axis
    /// puts everything at the bottom.
    pub fn axis_y(value: f64, min: f64, max: f64) -> f64 {
        let t = if max > min {
            (value - min) / (max - min)
        } else {
            0.0
        };
        BOTTOM - t * (BOTTOM - TOP)
    }
}

/// One vertical axis per attribute, each scaled from its minimum (bottom) to
/// maximum (top); one polyline per learner colored by cluster.
pub fn parcoords_svg(points: &[FeaturePoint], assignment: &[usize], title: &str) -> Result<String> {
    use parcoords::*;

    if points.is_empty() {
        return Err(Error::NoPoints);
    }
    if assignment.len() != points.len() {
        return Err(Error::InvalidArgument(format!(
            "{} cluster labels for {} points",
            assignment.len(),
            points.len()
        )));
    }
    let mut min = [f64::INFINITY; DIMS];
    let mut max = [f64::NEG_INFINITY; DIMS];
    for p in points {
        for d in 0..DIMS {
            min[d] = min[d].min(p.coords[d]);
            max[d] = max[d].max(p.coords[d]);
        }
    }

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<text class="title" x="{}" y="24" text-anchor="middle" font-size="16">{}</text>"#,
        WIDTH / 2.0,
        escape_xml(title)
    );
    for (p, &cluster) in points.iter().zip(assignment) {
        let coords: Vec<String> = (0..DIMS)
            .map(|d| {
                format!(
                    "{:.3},{:.3}",
                    axis_x(d),
                    axis_y(p.coords[d], min[d], max[d])
                )
            })
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline class="learner" data-learner="{}" data-cluster="{cluster}" fill="none" stroke="{}" stroke-opacity="0.6" points="{}"/>"#,
            escape_xml(&p.learner_id),
            PALETTE[cluster % PALETTE.len()],
            coords.join(" ")
        );
    }
    for (d, name) in AXIS_NAMES.iter().enumerate() {
        let x = axis_x(d);
        let _ = writeln!(
            svg,
            r#"<line class="axis" data-axis="{d}" x1="{x:.3}" y1="{TOP}" x2="{x:.3}" y2="{BOTTOM}" stroke="black"/>"#
        );
        let _ = writeln!(
            svg,
            r#"<text class="axis-label" x="{x:.3}" y="{}" text-anchor="middle">{}</text>"#,
            BOTTOM + 36.0,
            escape_xml(name)
        );
        let _ = writeln!(
            svg,
            r#"<text class="axis-max" x="{x:.3}" y="{}" text-anchor="middle">{}</text>"#,
            TOP - 8.0,
            max[d].round()
        );
        let _ = writeln!(
            svg,
            r#"<text class="axis-min" x="{x:.3}" y="{}" text-anchor="middle">{}</text>"#,
            BOTTOM + 18.0,
            min[d].round()
        );
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

pub fn export_values(
    values: &AttributeValueMap,
    attribute: NominalAttribute,
    path: impl AsRef<Path>,
) -> Result<()> {
    write_file(path.as_ref(), &values_svg(values, attribute)?)
}

pub fn export_parcoords(
    points: &[FeaturePoint],
    assignment: &[usize],
    title: &str,
    path: impl AsRef<Path>,
) -> Result<()> {
    write_file(path.as_ref(), &parcoords_svg(points, assignment, title)?)
}
