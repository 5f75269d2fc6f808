//! SVG 1.1 rendering of refined polylines and curvature combs.

use std::fmt::Write;

use conicsub::{curvature_comb, BoundingBox, Point64, Polyline64};

/// Screen mapping fitted to the input bounding box with a 5% margin.
/// World `y` is negated so that the curve is drawn upright.
struct View {
    min_x: f64,
    min_y: f64,
    width: f64,
    height: f64,
    size: f64,
}

impl View {
    fn fit(bbox: &BoundingBox<f64>) -> Self {
        let size = bbox.width().max(bbox.height());
        let size = if size > 0.0 { size } else { 1.0 };
        let margin = 0.05 * size;
        Self {
            min_x: bbox.min.x - margin,
            min_y: -bbox.max.y - margin,
            width: bbox.width() + 2.0 * margin,
            height: bbox.height() + 2.0 * margin,
            size,
        }
    }

    fn map(&self, p: Point64) -> (f64, f64) {
        (p.x, 0.0 - p.y)
    }
}

fn path_data(view: &View, poly: &Polyline64) -> String {
    let mut d = String::new();
    for (i, &p) in poly.points.iter().enumerate() {
        let (x, y) = view.map(p);
        let _ = write!(d, "{}{x} {y}", if i == 0 { "M" } else { " L" });
    }
    if poly.is_closed() {
        d.push_str(" Z");
    }
    d
}

/// Renders `refined` as one path and `original` vertices as circles. With
/// `comb`, curvature teeth of the refined polyline are drawn as lines.
pub fn render(original: &Polyline64, refined: &Polyline64, comb: bool) -> String {
    let bbox = original.bounding_box().expect("non-empty input");
    let view = View::fit(&bbox);
    let stroke = 0.003 * view.size;
    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}">"#,
        view.min_x, view.min_y, view.width, view.height
    );
    if comb {
        let _ = writeln!(s, r##"<g stroke="#888888" stroke-width="{}">"##, stroke * 0.5);
        for (base, tip) in curvature_comb(refined, None) {
            let ((x1, y1), (x2, y2)) = (view.map(base), view.map(tip));
            let _ = writeln!(s, r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>"#);
        }
        let _ = writeln!(s, "</g>");
    }
    let _ = writeln!(
        s,
        r##"<path d="{}" fill="none" stroke="#1f4e9c" stroke-width="{stroke}"/>"##,
        path_data(&view, refined)
    );
    let _ = writeln!(s, r##"<g fill="#c0392b">"##);
    for &p in &original.points {
        let (x, y) = view.map(p);
        let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="{}"/>"#, 2.0 * stroke);
    }
    let _ = writeln!(s, "</g>");
    s.push_str("</svg>\n");
    s
}
