//! Planar rendering of a partition tree.
//!
//! Leaves are drawn as squares colored by label; an optional polyline (for instance a
//! reference boundary) is drawn on top. Output depends only on the inputs, so equal
//! results give byte-identical files.

use std::fmt::Write as _;

use crate::geometry::Rect;
use crate::tree::{Label, PartitionTree};

const CANVAS: f64 = 600.0;
const MARGIN: f64 = 20.0;

/// Reads a polyline from CSV text: one `x,y` pair per line, `#` comments and a
/// non-numeric header allowed.
pub fn read_polyline(text: &str) -> Result<Vec<[f64; 2]>, String> {
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split(',').map(|s| s.trim().parse::<f64>());
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(x)), Some(Ok(y)), None) => points.push([x, y]),
            _ if points.is_empty() && i == 0 => continue,
            _ => return Err(format!("line {}: expected two numbers", i + 1)),
        }
    }
    Ok(points)
}

fn fill(label: Label) -> &'static str {
    match label {
        Label::Included => "#4c9a5a",
        Label::Excluded => "#d9d9d9",
        Label::Unknown => "#e8a33d",
    }
}

/// SVG 1.1 document for a two-dimensional tree, or `None` for other dimensions.
pub fn render_svg(tree: &PartitionTree, overlay: Option<&[[f64; 2]]>) -> Option<String> {
    if tree.dim() != 2 {
        log::warn!("event=svg_skipped dim={}", tree.dim());
        return None;
    }
    let leaves = tree.leaves();
    let mut view = leaves
        .iter()
        .map(|&id| tree.nodes()[id].target_box().to_rect())
        .reduce(|a, b| Rect {
            lo: vec![a.lo[0].min(b.lo[0]), a.lo[1].min(b.lo[1])],
            hi: vec![a.hi[0].max(b.hi[0]), a.hi[1].max(b.hi[1])],
        })?;
    for p in overlay.unwrap_or_default() {
        for (i, &v) in p.iter().enumerate() {
            view.lo[i] = view.lo[i].min(v);
            view.hi[i] = view.hi[i].max(v);
        }
    }
    let span = (view.hi[0] - view.lo[0])
        .max(view.hi[1] - view.lo[1])
        .max(f64::MIN_POSITIVE);
    let scale = (CANVAS - 2.0 * MARGIN) / span;
    let sx = |x: f64| MARGIN + (x - view.lo[0]) * scale;
    // The y axis points up.
    let sy = |y: f64| MARGIN + (view.hi[1] - y) * scale;
    let width = 2.0 * MARGIN + (view.hi[0] - view.lo[0]) * scale;
    let height = 2.0 * MARGIN + (view.hi[1] - view.lo[1]) * scale;

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width:.3}\" height=\"{height:.3}\" viewBox=\"0 0 {width:.3} {height:.3}\">"
    );
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g stroke=\"#333333\" stroke-width=\"0.3\">\n");
    for &id in &leaves {
        let n = &tree.nodes()[id];
        let (c, r) = (&n.target_center, n.target_radius);
        let _ = writeln!(
            out,
            "<rect x=\"{:.4}\" y=\"{:.4}\" width=\"{:.4}\" height=\"{:.4}\" fill=\"{}\"/>",
            sx(c[0] - r),
            sy(c[1] + r),
            2.0 * r * scale,
            2.0 * r * scale,
            fill(n.label)
        );
    }
    out.push_str("</g>\n");
    if let Some(points) = overlay.filter(|p| p.len() >= 2) {
        out.push_str("<polyline fill=\"none\" stroke=\"#1f3b99\" stroke-width=\"1.5\" points=\"");
        let coords: Vec<String> = points
            .iter()
            .map(|p| format!("{:.4},{:.4}", sx(p[0]), sy(p[1])))
            .collect();
        out.push_str(&coords.join(" "));
        out.push_str("\"/>\n");
    }
    out.push_str("</svg>\n");
    Some(out)
}
