//! SVG rendering of curves with frozen edges and overlays.

use std::fmt::Write as _;

use crate::geometry::{Ball, BBox, Point};

#[derive(Clone, Debug, Default)]
pub struct SvgOptions {
    /// Only edges meeting this ball are drawn.
    pub region: Option<Ball>,
    pub balls: Vec<Ball>,
    /// Normal arrows as (foot, unit normal).
    pub normals: Vec<(Point, Point)>,
    pub title: Option<String>,
}

/// A polyline to draw; `frozen[i]` marks edge `i` (from vertex `i` to `i+1`).
pub struct SvgCurve<'a> {
    pub vertices: &'a [Point],
    pub frozen: &'a [bool],
    pub closed: bool,
}

impl SvgCurve<'_> {
    fn edge_count(&self) -> usize {
        if self.closed {
            self.vertices.len()
        } else {
            self.vertices.len().saturating_sub(1)
        }
    }

    fn edge(&self, i: usize) -> (Point, Point) {
        (self.vertices[i], self.vertices[(i + 1) % self.vertices.len()])
    }
}

fn fmt_pt(p: Point) -> String {
    // y is flipped so the picture has the usual orientation
    format!("{} {}", p.x, -p.y)
}

pub fn render(curve: &SvgCurve, opts: &SvgOptions) -> String {
    let keep = |i: usize| {
        opts.region.is_none_or(|w| {
            let (a, b) = curve.edge(i);
            crate::geometry::distance_point_segment(w.center, a, b) <= w.radius
        })
    };
    let shown: Vec<usize> = (0..curve.edge_count()).filter(|&i| keep(i)).collect();
    let mut bb = BBox::empty();
    for &i in &shown {
        let (a, b) = curve.edge(i);
        bb.grow(a);
        bb.grow(b);
    }
    for b in &opts.balls {
        bb.grow(b.center - Point::new(b.radius, b.radius));
        bb.grow(b.center + Point::new(b.radius, b.radius));
    }
    if shown.is_empty() && opts.balls.is_empty() {
        bb = BBox::of_points(&[Point::ORIGIN, Point::new(1.0, 1.0)]);
    }
    let (w, h) = ((bb.max.x - bb.min.x).max(1e-300), (bb.max.y - bb.min.y).max(1e-300));
    let span = w.max(h);
    let (mx, my) = (0.05 * w.max(1e-3 * span), 0.05 * h.max(1e-3 * span));
    let (x0, y0) = (bb.min.x - mx, -bb.max.y - my);
    let (vw, vh) = (w + 2.0 * mx, h + 2.0 * my);
    let stroke = 0.002 * vw.max(vh);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0} {y0} {vw} {vh}" width="800" height="{}">"#,
        (800.0 * vh / vw).round().max(1.0)
    );
    let _ = writeln!(
        s,
        "<style>.curve{{fill:none;stroke:#222;stroke-width:{stroke}}} .frozen{{fill:none;stroke:#d62728;stroke-width:{}}} .ball{{fill:none;stroke:#1f77b4;stroke-width:{stroke};stroke-dasharray:{} {}}} .normal{{stroke:#2ca02c;stroke-width:{stroke}}}</style>",
        2.0 * stroke,
        4.0 * stroke,
        2.0 * stroke
    );
    if let Some(t) = &opts.title {
        let _ = writeln!(s, "<title>{}</title>", t.replace('&', "&amp;").replace('<', "&lt;"));
    }

    // runs of consecutive shown edges become subpaths
    let mut d = String::new();
    let mut prev: Option<usize> = None;
    for &i in &shown {
        let (a, b) = curve.edge(i);
        if prev != Some(i.wrapping_sub(1)) || i == 0 {
            let _ = write!(d, "M{} ", fmt_pt(a));
        }
        let _ = write!(d, "L{} ", fmt_pt(b));
        prev = Some(i);
    }
    let _ = writeln!(
        s,
        r#"<path class="curve" data-segments="{}" d="{}"/>"#,
        shown.len(),
        d.trim_end()
    );
    let frozen: Vec<usize> = shown.iter().copied().filter(|&i| curve.frozen.get(i) == Some(&true)).collect();
    if !frozen.is_empty() {
        let mut d = String::new();
        for &i in &frozen {
            let (a, b) = curve.edge(i);
            let _ = write!(d, "M{} L{} ", fmt_pt(a), fmt_pt(b));
        }
        let _ = writeln!(
            s,
            r#"<path class="frozen" data-segments="{}" d="{}"/>"#,
            frozen.len(),
            d.trim_end()
        );
    }
    for b in &opts.balls {
        let _ = writeln!(
            s,
            r#"<circle class="ball" cx="{}" cy="{}" r="{}"/>"#,
            b.center.x, -b.center.y, b.radius
        );
    }
    let arrow = 0.05 * vw.max(vh);
    for &(p, n) in &opts.normals {
        let q = p + n * arrow;
        let _ = writeln!(
            s,
            r#"<line class="normal" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            p.x, -p.y, q.x, -q.y
        );
    }
    s.push_str("</svg>\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frozen_edges_get_their_own_class() {
        let v = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0)];
        let svg = render(
            &SvgCurve {
                vertices: &v,
                frozen: &[false, true],
                closed: false,
            },
            &SvgOptions::default(),
        );
        assert!(svg.contains(r#"class="curve" data-segments="2""#));
        assert!(svg.contains(r#"class="frozen" data-segments="1""#));
        // 5% margins around the unit box
        assert!(svg.contains(r#"viewBox="-0.05 -1.05 1.1 1.1""#), "{svg}");
    }
}
