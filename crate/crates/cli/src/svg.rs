//! Native SVG scatter rendering: the first two embedding dimensions, domains
//! drawn with distinct marker shapes, anchor pairs joined by faint lines.

use manifold_align::embed::Embedding;
use std::fmt::Write;

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const MARGIN: f64 = 36.0;

fn extent(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || hi - lo < 1e-12 {
        // a degenerate axis still renders; everything maps to the midline
        (lo.min(0.0), lo.min(0.0) + 1.0)
    } else {
        (lo, hi)
    }
}

pub fn scatter(embedding: &Embedding, anchors: &[(usize, usize)]) -> String {
    let coords = &embedding.coords;
    let dim = coords.ncols();
    let axis = |row: usize, c: usize| if c < dim { coords[(row, c)] } else { 0.0 };
    let (x_lo, x_hi) = extent((0..coords.nrows()).map(|r| axis(r, 0)));
    let (y_lo, y_hi) = extent((0..coords.nrows()).map(|r| axis(r, 1)));
    let px = |v: f64| MARGIN + (v - x_lo) / (x_hi - x_lo) * (WIDTH - 2.0 * MARGIN);
    // SVG y grows downward
    let py = |v: f64| HEIGHT - MARGIN - (v - y_lo) / (y_hi - y_lo) * (HEIGHT - 2.0 * MARGIN);
    let point = |row: usize| (px(axis(row, 0)), py(axis(row, 1)));

    let x_range = &embedding.domain_ranges[0];
    let y_range = &embedding.domain_ranges[1];
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" \
         width=\"{WIDTH}\" height=\"{HEIGHT}\">\n\
         <rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>\n"
    );

    for &(i, j) in anchors {
        let (x1, y1) = point(x_range.start + i);
        let (x2, y2) = point(y_range.start + j);
        let _ = write!(
            svg,
            "<line x1=\"{x1:.2}\" y1=\"{y1:.2}\" x2=\"{x2:.2}\" y2=\"{y2:.2}\" \
             stroke=\"#9ca3af\" stroke-width=\"0.6\" opacity=\"0.6\"/>\n"
        );
    }

    let anchored_x: Vec<usize> = anchors.iter().map(|&(i, _)| i).collect();
    let anchored_y: Vec<usize> = anchors.iter().map(|&(_, j)| j).collect();
    for (idx, row) in x_range.clone().enumerate() {
        let (cx, cy) = point(row);
        let stroke = if anchored_x.contains(&idx) {
            " stroke=\"#111827\" stroke-width=\"1.2\""
        } else {
            ""
        };
        let _ = write!(
            svg,
            "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"#2563eb\" \
             opacity=\"0.85\"{stroke}/>\n",
            cx,
            cy - 4.4,
            cx - 4.0,
            cy + 3.2,
            cx + 4.0,
            cy + 3.2
        );
    }
    for (idx, row) in y_range.clone().enumerate() {
        let (cx, cy) = point(row);
        let stroke = if anchored_y.contains(&idx) {
            " stroke=\"#111827\" stroke-width=\"1.2\""
        } else {
            ""
        };
        let _ = write!(
            svg,
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"3.4\" fill=\"#dc2626\" \
             opacity=\"0.85\"{stroke}/>\n"
        );
    }

    let _ = write!(
        svg,
        "<polygon points=\"{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}\" fill=\"#2563eb\"/>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">domain X</text>\n\
         <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3.4\" fill=\"#dc2626\"/>\n\
         <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"12\">domain Y</text>\n\
         </svg>\n",
        MARGIN + 4.0,
        14.0 - 4.4,
        MARGIN,
        14.0 + 3.2,
        MARGIN + 8.0,
        14.0 + 3.2,
        MARGIN + 16.0,
        18.0,
        MARGIN + 94.0,
        14.0,
        MARGIN + 104.0,
        18.0
    );
    svg
}
