use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::angle::{normal_angle_of, AngleRecord};
use crate::geometry::{BBox, Point};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrientedSegment {
    pub a: Point,
    pub b: Point,
    pub normal: AngleRecord,
}

impl OrientedSegment {
    pub fn new(a: Point, b: Point, normal: AngleRecord) -> Self {
        OrientedSegment { a, b, normal }
    }

    /// Segment with the clockwise outer normal computed from its direction.
    pub fn from_points(a: Point, b: Point) -> Result<Self> {
        Ok(OrientedSegment::new(a, b, normal_angle_of(b - a)?))
    }

    #[inline]
    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn direction(&self) -> Point {
        (self.b - self.a).unit()
    }

    pub fn midpoint(&self) -> Point {
        self.a.midpoint(self.b)
    }

    pub fn point_at(&self, t: f64) -> Point {
        self.a.lerp(self.b, t)
    }

    /// The concentric sub-segment with half the length.
    pub fn middle_half(&self) -> (Point, Point) {
        (self.point_at(0.25), self.point_at(0.75))
    }

    /// Angle between the tracked normal and the geometric one, in radians.
    pub fn normal_residual(&self) -> f64 {
        let t = self.direction();
        self.normal.normal().dot(t).abs().min(1.0).asin()
    }
}

/// Exact zero for points on the segment's supporting line between the ends.
#[inline]
pub fn distance_point_segment(p: Point, a: Point, b: Point) -> f64 {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return p.dist(a);
    }
    let t = (p - a).dot(d);
    if t <= 0.0 {
        p.dist(a)
    } else if t >= l2 {
        p.dist(b)
    } else {
        (d.cross(p - a) / l2.sqrt()).abs()
    }
}

/// Parameter in `[0,1]` and the closest point of `[a,b]` to `p`.
#[inline]
pub fn closest_on_segment(p: Point, a: Point, b: Point) -> (f64, Point) {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return (0.0, a);
    }
    let t = ((p - a).dot(d) / l2).clamp(0.0, 1.0);
    if t == 0.0 {
        (0.0, a)
    } else if t == 1.0 {
        (1.0, b)
    } else {
        (t, a + d * t)
    }
}

/// Length of `[a,b] ∩ B(c, r)`, from the exact chord parameters.
pub fn segment_length_in_disk(a: Point, b: Point, c: Point, r: f64) -> f64 {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return 0.0;
    }
    let f = a - c;
    // |f + t d|² = r²
    let bq = f.dot(d);
    let cq = f.norm2() - r * r;
    let disc = bq * bq - l2 * cq;
    if disc <= 0.0 {
        return 0.0;
    }
    let sq = disc.sqrt();
    let t0 = ((-bq - sq) / l2).max(0.0);
    let t1 = ((-bq + sq) / l2).min(1.0);
    if t1 <= t0 {
        0.0
    } else {
        (t1 - t0) * l2.sqrt()
    }
}

/// Proper or touching intersection of two closed segments.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_box(q1, q2, p1))
        || (d2 == 0.0 && on_box(q1, q2, p2))
        || (d3 == 0.0 && on_box(p1, p2, q1))
        || (d4 == 0.0 && on_box(p1, p2, q2))
}

#[inline]
fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn on_box(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
}

/// Circular arc from `start_angle` sweeping to `end_angle` in the given
/// orientation; the sweep is kept in `(0, π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub center: Point,
    pub radius: f64,
    pub start_angle: f64,
    pub end_angle: f64,
    pub orientation: Orientation,
}

impl Arc {
    pub fn new(center: Point, radius: f64, start_angle: f64, sweep: f64, orientation: Orientation) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("arc radius {radius}")));
        }
        if !(sweep > 0.0 && sweep < PI) {
            return Err(Error::InvalidParameter(format!("arc sweep {sweep} outside (0, π)")));
        }
        let end_angle = match orientation {
            Orientation::CounterClockwise => start_angle + sweep,
            Orientation::Clockwise => start_angle - sweep,
        };
        Ok(Arc {
            center,
            radius,
            start_angle,
            end_angle,
            orientation,
        })
    }

    pub fn sweep(&self) -> f64 {
        (self.end_angle - self.start_angle).abs()
    }

    pub fn length(&self) -> f64 {
        self.radius * self.sweep()
    }

    fn signed_sweep(&self) -> f64 {
        self.end_angle - self.start_angle
    }

    pub fn angle_at(&self, t: f64) -> f64 {
        self.start_angle + self.signed_sweep() * t
    }

    pub fn point_at(&self, t: f64) -> Point {
        self.center + Point::polar(self.radius, self.angle_at(t))
    }

    /// Unit tangent in the direction of travel.
    pub fn tangent_at(&self, t: f64) -> Point {
        let radial = Point::polar(1.0, self.angle_at(t));
        match self.orientation {
            Orientation::CounterClockwise => radial.perp(),
            Orientation::Clockwise => -radial.perp(),
        }
    }

    pub fn start(&self) -> Point {
        self.point_at(0.0)
    }

    pub fn end(&self) -> Point {
        self.point_at(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Outside,
    Boundary,
}

/// Closed polyline, vertices in clockwise order, closing edge implied.
#[derive(Clone, Debug, PartialEq)]
pub struct ClosedPolyline {
    pub vertices: Vec<Point>,
}

impl ClosedPolyline {
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegenerateInput(format!(
                "closed polyline needs 3 vertices, got {}",
                vertices.len()
            )));
        }
        if let Some(p) = vertices.iter().find(|p| !p.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite vertex {p:?}")));
        }
        Ok(ClosedPolyline { vertices })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn edge(&self, i: usize) -> (Point, Point) {
        let n = self.vertices.len();
        (self.vertices[i], self.vertices[(i + 1) % n])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        (0..self.vertices.len()).map(move |i| self.edge(i))
    }

    /// Edges as oriented segments with normals computed from direction.
    pub fn oriented_edges(&self) -> Result<Vec<OrientedSegment>> {
        self.edges().map(|(a, b)| OrientedSegment::from_points(a, b)).collect()
    }

    /// Shoelace area; negative for clockwise order.
    pub fn signed_area(&self) -> f64 {
        let o = self.vertices[0];
        let mut s = 0.0;
        for (a, b) in self.edges() {
            s += (a - o).cross(b - o);
        }
        0.5 * s
    }

    pub fn is_clockwise(&self) -> bool {
        self.signed_area() < 0.0
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn bbox(&self) -> BBox {
        BBox::of_points(&self.vertices)
    }

    pub fn diameter_bound(&self) -> f64 {
        self.bbox().diagonal()
    }

    /// Ray-crossing classification; points within `tol` of an edge are on
    /// the boundary. Linear in the number of edges.
    pub fn locate(&self, p: Point, tol: f64) -> Location {
        let mut inside = false;
        for (a, b) in self.edges() {
            if distance_point_segment(p, a, b) <= tol {
                return Location::Boundary;
            }
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if x > p.x {
                    inside = !inside;
                }
            }
        }
        if inside {
            Location::Inside
        } else {
            Location::Outside
        }
    }

    /// Brute-force simplicity check, quadratic; fine for fixtures. Large
    /// curves go through the segment index instead.
    pub fn is_simple_bruteforce(&self) -> bool {
        let n = self.len();
        for i in 0..n {
            let (a, b) = self.edge(i);
            for j in i + 1..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let (c, d) = self.edge(j);
                if segments_intersect(a, b, c, d) {
                    return false;
                }
            }
        }
        true
    }
}

pub fn point_in_polygon(p: Point, c: &ClosedPolyline, tol: f64) -> Location {
    c.locate(p, tol)
}

/// Regular `n`-gon with unit side, clockwise, edge 0 from `(-1/2, 0)` to
/// `(1/2, 0)` with outer normal `(0,1)`; the polygon lies below `y = 0`.
///
/// Returns the vertices together with the exact outer-normal angle of each
/// edge, `π/2 − 2πk/n`. Axis-parallel edges are snapped to be exactly
/// axis-parallel.
pub fn regular_polygon(n: usize) -> (Vec<Point>, Vec<AngleRecord>) {
    assert!(n >= 3);
    let apothem = 0.5 / (PI / n as f64).tan();
    let circum = 0.5 / (PI / n as f64).sin();
    let c = Point::new(0.0, -apothem);
    let step = 2.0 * PI / n as f64;
    let mut v: Vec<Point> = (0..n)
        .map(|k| {
            // vertex k is the start of edge k; going clockwise
            let phi = PI / 2.0 + step / 2.0 - k as f64 * step;
            c + Point::polar(circum, phi)
        })
        .collect();
    v[0] = Point::new(-0.5, 0.0);
    v[1] = Point::new(0.5, 0.0);
    let normals: Vec<AngleRecord> = (0..n)
        .map(|k| AngleRecord::exact(n as i64 - 4 * k as i64, 2 * n as i64))
        .collect();
    for (k, rec) in normals.iter().enumerate() {
        let nb = rec.normal();
        let (i, j) = (k, (k + 1) % n);
        if nb.x == 0.0 {
            let y = 0.5 * (v[i].y + v[j].y);
            v[i].y = y;
            v[j].y = y;
        } else if nb.y == 0.0 {
            let x = 0.5 * (v[i].x + v[j].x);
            v[i].x = x;
            v[j].x = x;
        }
    }
    (v, normals)
}
