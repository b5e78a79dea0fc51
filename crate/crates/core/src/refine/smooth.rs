//! Trimming and filleting: `G_{n+1}` → the C¹ curve `G̃_{n+1}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{normal_angle_of, AngleRecord, Arc, Orientation, Point};

/// Turns below this are treated as collinear.
pub const COLLINEAR_TURN: f64 = 1e-10;
/// Turns closer than this to π have no usable fillet.
pub const CUSP_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SmoothPiece {
    /// `T̃ᵢ`, the trimmed segment `src`.
    Line { a: Point, b: Point, src: u32 },
    /// Straight gap at a collinear junction after segment `src`.
    Connector { a: Point, b: Point, src: u32 },
    /// Fillet `Cᵢ` after segment `src`.
    Arc { arc: Arc, src: u32 },
}

impl SmoothPiece {
    pub fn length(&self) -> f64 {
        match self {
            SmoothPiece::Line { a, b, .. } | SmoothPiece::Connector { a, b, .. } => a.dist(*b),
            SmoothPiece::Arc { arc, .. } => arc.length(),
        }
    }

    pub fn start(&self) -> Point {
        match self {
            SmoothPiece::Line { a, .. } | SmoothPiece::Connector { a, .. } => *a,
            SmoothPiece::Arc { arc, .. } => arc.start(),
        }
    }

    pub fn end(&self) -> Point {
        match self {
            SmoothPiece::Line { b, .. } | SmoothPiece::Connector { b, .. } => *b,
            SmoothPiece::Arc { arc, .. } => arc.end(),
        }
    }

    pub fn src(&self) -> u32 {
        match self {
            SmoothPiece::Line { src, .. } | SmoothPiece::Connector { src, .. } | SmoothPiece::Arc { src, .. } => *src,
        }
    }

    pub fn is_line(&self) -> bool {
        matches!(self, SmoothPiece::Line { .. })
    }

    /// Point at arc length `s` from the start.
    #[inline]
    pub fn point_at(&self, s: f64) -> Point {
        match self {
            SmoothPiece::Line { a, b, .. } | SmoothPiece::Connector { a, b, .. } => {
                let l = a.dist(*b);
                if l == 0.0 {
                    *a
                } else {
                    a.lerp(*b, s / l)
                }
            }
            SmoothPiece::Arc { arc, .. } => arc.point_at(s / arc.length()),
        }
    }

    /// Unit tangent at arc length `s`.
    pub fn tangent_at(&self, s: f64) -> Point {
        match self {
            SmoothPiece::Line { a, b, .. } | SmoothPiece::Connector { a, b, .. } => (*b - *a).unit(),
            SmoothPiece::Arc { arc, .. } => arc.tangent_at(s / arc.length()),
        }
    }
}

/// What a chord lying on a source segment inherits from it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentTag {
    pub normal: AngleRecord,
    pub frozen: bool,
    pub registry: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct SmoothCurve {
    pub pieces: Vec<SmoothPiece>,
    /// One tag per source segment.
    pub tags: Vec<SegmentTag>,
    pub closed: bool,
    /// Trim per segment end, `a/400`.
    pub trim: f64,
    /// Largest tangent mismatch at a junction, radians.
    pub tangent_residual: f64,
    /// Largest positional gap between consecutive pieces.
    pub gap_residual: f64,
    pub min_radius: f64,
}

impl SmoothCurve {
    pub fn length(&self) -> f64 {
        self.pieces.iter().map(|p| p.length()).sum()
    }
}

fn angle_between(u: Point, v: Point) -> f64 {
    u.cross(v).atan2(u.dot(v)).abs()
}

/// Trims every segment by `a/400` at each end and joins consecutive trimmed
/// segments by the circular arc tangent to both. For an open chain the two
/// outer ends are left in place.
pub fn smooth(segments: &[(Point, Point)], a: f64, closed: bool) -> Result<SmoothCurve> {
    let tags = segments
        .iter()
        .map(|s| {
            normal_angle_of(s.1 - s.0).map(|normal| SegmentTag {
                normal,
                frozen: false,
                registry: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    smooth_tagged(segments, tags, a, closed)
}

pub fn smooth_tagged(segments: &[(Point, Point)], tags: Vec<SegmentTag>, a: f64, closed: bool) -> Result<SmoothCurve> {
    let t = segments.len();
    if tags.len() != t {
        return Err(Error::ConstructionBug(format!("{t} segments but {} tags", tags.len())));
    }
    if t == 0 || (closed && t < 3) {
        return Err(Error::DegenerateInput(format!("{t} segments to smooth")));
    }
    for i in 0..t {
        let next = if i + 1 < t {
            i + 1
        } else if closed {
            0
        } else {
            break;
        };
        if segments[i].1 != segments[next].0 {
            return Err(Error::Topology(format!(
                "segment {i} ends at {:?} but segment {next} starts at {:?}",
                segments[i].1, segments[next].0
            )));
        }
    }
    let d = a / 400.0;
    let min_len = segments.iter().map(|s| s.0.dist(s.1)).fold(f64::INFINITY, f64::min);
    if !(a > 0.0) || min_len < a * (1.0 - 1e-9) {
        return Err(Error::InvalidParameter(format!("trim base a = {a} exceeds the shortest segment {min_len}")));
    }
    let dirs: Vec<Point> = segments.iter().map(|s| (s.1 - s.0).unit()).collect();
    let trimmed: Vec<(Point, Point)> = (0..t)
        .map(|i| {
            let (p, q) = segments[i];
            let u = dirs[i];
            let start = if !closed && i == 0 { p } else { p + u * d };
            let end = if !closed && i == t - 1 { q } else { q - u * d };
            (start, end)
        })
        .collect();

    let mut pieces = Vec::with_capacity(2 * t);
    let mut tangent_residual: f64 = 0.0;
    let mut gap_residual: f64 = 0.0;
    let mut min_radius = f64::INFINITY;
    let junctions = if closed { t } else { t - 1 };
    for i in 0..t {
        pieces.push(SmoothPiece::Line {
            a: trimmed[i].0,
            b: trimmed[i].1,
            src: i as u32,
        });
        if i >= junctions {
            break;
        }
        let j = (i + 1) % t;
        let (u, v) = (dirs[i], dirs[j]);
        let p = trimmed[i].1;
        let q = trimmed[j].0;
        let theta = u.cross(v).atan2(u.dot(v));
        if theta.abs() < COLLINEAR_TURN {
            pieces.push(SmoothPiece::Connector { a: p, b: q, src: i as u32 });
            continue;
        }
        if theta.abs() > PI - CUSP_MARGIN {
            return Err(Error::DegenerateInput(format!(
                "cusp between segments {i} and {j} (turn {theta}); no tangent fillet exists"
            )));
        }
        let r = d / (theta.abs() / 2.0).tan();
        let (center, orientation) = if theta > 0.0 {
            (p + u.perp() * r, Orientation::CounterClockwise)
        } else {
            (p - u.perp() * r, Orientation::Clockwise)
        };
        let arc = Arc::new(center, r, (p - center).angle(), theta.abs(), orientation)?;
        tangent_residual = tangent_residual
            .max(angle_between(arc.tangent_at(0.0), u))
            .max(angle_between(arc.tangent_at(1.0), v));
        gap_residual = gap_residual.max(arc.start().dist(p)).max(arc.end().dist(q));
        min_radius = min_radius.min(r);
        pieces.push(SmoothPiece::Arc { arc, src: i as u32 });
    }
    Ok(SmoothCurve {
        pieces,
        tags,
        closed,
        trim: d,
        tangent_residual,
        gap_residual,
        min_radius,
    })
}
