//! Equal-chord re-inscription of a smooth curve.
//!
//! Vertices are marched along the curve, each placed at the first curve
//! point at chord distance `ℓ` from its predecessor. The chord count is
//! fixed first and `ℓ` is then solved so the march closes up. Positions are
//! held as `(piece, local arc length)`, never as a global arc length, so the
//! resolution is that of the coordinates rather than of the total length.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{closest_on_segment, Point};
use crate::refine::smooth::{SmoothCurve, SmoothPiece};

pub const DEFAULT_CHORD_BUDGET: u64 = 4_000_000;
pub const MAX_CLOSURE_ITERATIONS: u32 = 200;
/// Attempts at halving `ℓ` when the turn bound is violated.
const MAX_HALVINGS: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvePos {
    pub piece: u32,
    pub s: f64,
}

#[derive(Clone, Debug)]
pub struct Inscription {
    /// Vertex positions; the first is the anchor. For an open curve the end
    /// point is not included.
    pub positions: Vec<CurvePos>,
    pub vertices: Vec<Point>,
    pub chord_length: f64,
    /// Arc-length mismatch of the march before it was spread over the chords.
    pub closure_defect: f64,
    pub iterations: u32,
    /// Largest turn between consecutive chords.
    pub max_turn: f64,
    pub curve_length: f64,
}

impl Inscription {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

/// `min(a/200, 2r·sin(bound/2))` over the fillet radii, with a small margin.
pub fn target_chord_length(sc: &SmoothCurve, bound: f64, a: f64) -> f64 {
    let mut t = a / 200.0;
    for p in &sc.pieces {
        if let SmoothPiece::Arc { arc, .. } = p {
            t = t.min(2.0 * arc.radius * (bound / 2.0).sin());
        }
    }
    t * 0.999
}

#[inline]
fn wrap_pi(t: f64) -> f64 {
    let r = t.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

pub(crate) struct Track<'a> {
    pieces: &'a [SmoothPiece],
    lens: Vec<f64>,
    cum: Vec<f64>,
    total: f64,
    closed: bool,
}

impl<'a> Track<'a> {
    pub(crate) fn new(sc: &'a SmoothCurve) -> Self {
        let lens: Vec<f64> = sc.pieces.iter().map(|p| p.length()).collect();
        let mut cum = Vec::with_capacity(lens.len());
        let mut acc = 0.0;
        for l in &lens {
            cum.push(acc);
            acc += l;
        }
        Track {
            pieces: &sc.pieces,
            lens,
            cum,
            total: acc,
            closed: sc.closed,
        }
    }

    fn n(&self) -> usize {
        self.pieces.len()
    }

    #[inline]
    pub(crate) fn point(&self, pos: CurvePos) -> Point {
        self.pieces[pos.piece as usize].point_at(pos.s)
    }

    fn next(&self, p: usize) -> Option<usize> {
        if p + 1 < self.n() {
            Some(p + 1)
        } else if self.closed {
            Some(0)
        } else {
            None
        }
    }

    fn prev(&self, p: usize) -> Option<usize> {
        if p > 0 {
            Some(p - 1)
        } else if self.closed {
            Some(self.n() - 1)
        } else {
            None
        }
    }

    /// Moves `pos` by `delta` along the curve. Open ends extend straight.
    fn shift(&self, pos: CurvePos, delta: f64) -> CurvePos {
        let mut p = pos.piece as usize;
        let mut s = pos.s + delta;
        loop {
            if s > self.lens[p] {
                match self.next(p) {
                    Some(q) => {
                        s -= self.lens[p];
                        p = q;
                    }
                    None => break,
                }
            } else if s < 0.0 {
                match self.prev(p) {
                    Some(q) => {
                        p = q;
                        s += self.lens[p];
                    }
                    None => break,
                }
            } else {
                break;
            }
        }
        CurvePos { piece: p as u32, s }
    }

    /// Signed arc length from `from` to `to`, measured locally when the two
    /// are within a few pieces of each other. `laps` counts how many times
    /// the march wrapped past the last piece of a closed curve.
    fn gap(&self, from: CurvePos, to: CurvePos, laps: i64) -> f64 {
        const NEAR: usize = 8;
        let (pf, pt) = (from.piece as usize, to.piece as usize);
        let coarse = self.cum[pt] + to.s + laps as f64 * self.total - (self.cum[pf] + from.s);
        if pf == pt && coarse.abs() < 0.5 * self.total {
            return to.s - from.s;
        }
        if coarse >= 0.0 {
            let mut acc = self.lens[pf] - from.s;
            let mut p = pf;
            for _ in 0..NEAR {
                match self.next(p) {
                    Some(q) => p = q,
                    None => break,
                }
                if p == pt {
                    return acc + to.s;
                }
                acc += self.lens[p];
            }
        } else {
            let mut acc = from.s;
            let mut p = pf;
            for _ in 0..NEAR {
                match self.prev(p) {
                    Some(q) => p = q,
                    None => break,
                }
                if p == pt {
                    return -(acc + self.lens[p] - to.s);
                }
                acc += self.lens[p];
            }
        }
        coarse
    }

    /// First point after `pos` at chord distance `ell`; returns the position
    /// and whether the march wrapped past the end of a closed curve.
    fn step(&self, pos: CurvePos, ell: f64) -> Result<(CurvePos, bool)> {
        let c = self.point(pos);
        let mut q = pos.piece as usize;
        let mut s0 = pos.s;
        let mut wrapped = false;
        for _ in 0..self.n() + 2 {
            let piece = &self.pieces[q];
            let len = self.lens[q];
            let open_end = !self.closed && q + 1 == self.n();
            if open_end || c.dist(piece.point_at(len)) >= ell {
                let hi = if open_end { f64::INFINITY } else { len };
                let s = solve_on_piece(piece, c, ell, s0, hi);
                return Ok((CurvePos { piece: q as u32, s }, wrapped));
            }
            match self.next(q) {
                Some(n) => {
                    if n == 0 {
                        wrapped = true;
                    }
                    q = n;
                }
                None => unreachable!("open end handled above"),
            }
            s0 = 0.0;
        }
        Err(Error::NumericFailure {
            what: format!("no curve point at chord distance {ell}"),
            residual: ell,
        })
    }

    pub(crate) fn closest(&self, p: Point) -> CurvePos {
        let mut best = (f64::INFINITY, CurvePos { piece: 0, s: 0.0 });
        for (i, piece) in self.pieces.iter().enumerate() {
            let s = match piece {
                SmoothPiece::Line { a, b, .. } | SmoothPiece::Connector { a, b, .. } => {
                    closest_on_segment(p, *a, *b).0 * self.lens[i]
                }
                SmoothPiece::Arc { arc, .. } => {
                    let sw = arc.end_angle - arc.start_angle;
                    let phi = (p - arc.center).angle();
                    let t = wrap_pi(phi - arc.start_angle - sw / 2.0) / sw + 0.5;
                    t.clamp(0.0, 1.0) * self.lens[i]
                }
            };
            let d = piece.point_at(s).dist(p);
            if d < best.0 {
                best = (d, CurvePos { piece: i as u32, s });
            }
        }
        best.1
    }
}

/// Exit point of the curve piece from the disk `B(c, ell)` after `s0`.
fn solve_on_piece(piece: &SmoothPiece, c: Point, ell: f64, s0: f64, hi: f64) -> f64 {
    let s = match piece {
        SmoothPiece::Line { a, b, .. } | SmoothPiece::Connector { a, b, .. } => {
            let u = (*b - *a).unit();
            let w = c - *a;
            let t0 = u.dot(w);
            let h = u.cross(w);
            t0 + (ell * ell - h * h).max(0.0).sqrt()
        }
        SmoothPiece::Arc { arc, .. } => {
            let r = arc.radius;
            let sigma = if arc.end_angle >= arc.start_angle { 1.0 } else { -1.0 };
            let w = c - arc.center;
            let rho = w.norm();
            let q = ((ell * ell - (r - rho) * (r - rho)) / (4.0 * r * rho)).clamp(0.0, 1.0);
            let delta = 2.0 * q.sqrt().asin();
            let phi0 = arc.start_angle + sigma * s0 / r;
            let u0 = wrap_pi(sigma * (phi0 - w.angle()));
            s0 + r * (delta - u0).max(0.0)
        }
    };
    s.clamp(s0, hi)
}

struct March {
    positions: Vec<CurvePos>,
    end: CurvePos,
    laps: i64,
}

fn march(track: &Track, anchor: CurvePos, ell: f64, m: usize, keep: bool) -> Result<March> {
    let mut positions = Vec::with_capacity(if keep { m } else { 0 });
    let mut pos = anchor;
    let mut laps = 0i64;
    for _ in 0..m {
        if keep {
            positions.push(pos);
        }
        let (next, wrapped) = track.step(pos, ell)?;
        if wrapped {
            laps += 1;
        }
        pos = next;
    }
    Ok(March { positions, end: pos, laps })
}

fn turn(u: Point, v: Point) -> f64 {
    u.cross(v).atan2(u.dot(v)).abs()
}

/// Re-inscribes `m` equal chords. Closed curves start at `anchor`; open
/// curves run from the start of the first piece to the end of the last.
fn inscribe_with(track: &Track, anchor: CurvePos, m: usize) -> Result<Inscription> {
    let target = if track.closed {
        (anchor, 1i64)
    } else {
        let last = track.n() - 1;
        (
            CurvePos {
                piece: last as u32,
                s: track.lens[last],
            },
            0,
        )
    };
    let defect = |ell: f64| -> Result<f64> {
        let mr = march(track, anchor, ell, m, false)?;
        // a closed march must wrap exactly once to land near the anchor
        Ok(track.gap(target.0, mr.end, mr.laps - target.1))
    };
    let length = track.total;
    let mut hi = length / m as f64;
    let mut fhi = defect(hi)?;
    let mut grow = 0;
    while fhi < 0.0 {
        if fhi.abs() <= 1e-13 * hi {
            break;
        }
        hi *= 1.0 + 1e-6;
        fhi = defect(hi)?;
        grow += 1;
        if grow > 60 {
            return Err(Error::NumericFailure {
                what: "closure bracket (upper)".into(),
                residual: fhi,
            });
        }
    }
    let mut lo = hi * 0.95;
    let mut flo = defect(lo)?;
    let mut shrink = 0;
    while flo > 0.0 {
        lo *= 0.9;
        flo = defect(lo)?;
        shrink += 1;
        if shrink > 60 {
            return Err(Error::NumericFailure {
                what: "closure bracket (lower)".into(),
                residual: flo,
            });
        }
    }
    let tol = 1e-13;
    let (mut ell, mut f) = if fhi.abs() < flo.abs() { (hi, fhi) } else { (lo, flo) };
    let mut iterations = 0;
    let mut side = 0i8;
    let mut best = (ell, f);
    while f.abs() > tol * ell && iterations < MAX_CLOSURE_ITERATIONS {
        iterations += 1;
        let x = (lo * fhi - hi * flo) / (fhi - flo);
        let x = if x > lo && x < hi { x } else { 0.5 * (lo + hi) };
        if x <= lo || x >= hi {
            break;
        }
        let fx = defect(x)?;
        (ell, f) = (x, fx);
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx > 0.0 {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        } else {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        }
    }
    (ell, f) = best;
    // Over millions of steps the march end is only reproducible to rounding,
    // and the defect can jump between adjacent floats of ell. What is left
    // is spread over all m chords below, so it is bounded per chord.
    if f.abs() > (1e-6f64).max(1e-10 * m as f64) * ell {
        return Err(Error::NumericFailure {
            what: format!("equal-chord closure after {iterations} iterations"),
            residual: f / ell,
        });
    }
    let mr = march(track, anchor, ell, m, true)?;
    let d = track.gap(target.0, mr.end, mr.laps - target.1);
    let positions: Vec<CurvePos> = mr
        .positions
        .iter()
        .enumerate()
        .map(|(i, p)| if i == 0 { *p } else { track.shift(*p, -(i as f64 / m as f64) * d) })
        .collect();
    let vertices: Vec<Point> = positions.iter().map(|p| track.point(*p)).collect();
    let end = track.point(target.0);
    let mut max_turn: f64 = 0.0;
    let k = vertices.len();
    let chord = |i: usize| -> Point {
        if i + 1 < k {
            vertices[i + 1] - vertices[i]
        } else {
            end - vertices[k - 1]
        }
    };
    for i in 0..k {
        if i + 1 < k {
            max_turn = max_turn.max(turn(chord(i), chord(i + 1)));
        } else if track.closed {
            max_turn = max_turn.max(turn(chord(i), chord(0)));
        }
    }
    Ok(Inscription {
        positions,
        vertices,
        chord_length: ell,
        closure_defect: d,
        iterations,
        max_turn,
        curve_length: length,
    })
}

/// Inscribes equal chords of length at most `target` and consecutive turn
/// at most `bound`, halving the chord while the turn bound fails.
pub fn inscribe(sc: &SmoothCurve, target: f64, bound: f64, anchor: Option<Point>, budget: u64) -> Result<Inscription> {
    let track = Track::new(sc);
    let anchor = match (sc.closed, anchor) {
        (true, Some(p)) => track.closest(p),
        _ => CurvePos { piece: 0, s: 0.0 },
    };
    let mut m = (track.total / target).ceil().max(if sc.closed { 3.0 } else { 1.0 });
    for _ in 0..=MAX_HALVINGS {
        if m > budget as f64 {
            return Err(Error::ResourceLimit {
                what: "chord count",
                needed: m as u128,
                budget: budget as u128,
                hint: "refine locally with advance_windowed",
            });
        }
        let ins = inscribe_with(&track, anchor, m as usize)?;
        if ins.max_turn <= bound {
            return Ok(ins);
        }
        log::debug!("turn {} exceeds {bound} with {m} chords; halving", ins.max_turn);
        m *= 2.0;
    }
    Err(Error::NumericFailure {
        what: "consecutive-chord turn bound".into(),
        residual: bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Arc, Orientation};
    use crate::refine::smooth::smooth;

    fn circle(r: f64, k: usize) -> SmoothCurve {
        // k clockwise arcs make a full circle
        let sweep = 2.0 * PI / k as f64;
        let pieces = (0..k)
            .map(|i| SmoothPiece::Arc {
                arc: Arc::new(Point::ORIGIN, r, -(i as f64) * sweep, sweep, Orientation::Clockwise).unwrap(),
                src: i as u32,
            })
            .collect();
        SmoothCurve {
            pieces,
            tags: Vec::new(),
            closed: true,
            trim: 0.0,
            tangent_residual: 0.0,
            gap_residual: 0.0,
            min_radius: r,
        }
    }

    #[test]
    fn circle_recovers_regular_polygon() {
        for &(r, m) in &[(1.0, 64usize), (3.5, 1000), (0.01, 257)] {
            let sc = circle(r, 7);
            let target = 2.0 * PI * r / m as f64 * (1.0 + 1e-12);
            let ins = inscribe(&sc, target, PI, Some(Point::new(r, 0.0)), 1 << 20).unwrap();
            assert_eq!(ins.len(), m);
            let expected = 2.0 * r * (PI / m as f64).sin();
            assert!((ins.chord_length - expected).abs() <= 1e-9 * r, "{} vs {expected}", ins.chord_length);
            for i in 0..m {
                let l = ins.vertices[i].dist(ins.vertices[(i + 1) % m]);
                assert!((l - expected).abs() <= 1e-9 * r);
                assert!((ins.vertices[i].norm() - r).abs() <= 1e-12 * r.max(1.0));
            }
        }
    }

    #[test]
    fn square_chords_on_straight_parts_are_collinear() {
        let v = [Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 1.0), Point::new(1.0, 0.0)];
        let segs: Vec<_> = (0..4).map(|i| (v[i], v[(i + 1) % 4])).collect();
        let sc = smooth(&segs, 1.0, true).unwrap();
        let bound = PI / 32.0;
        let target = target_chord_length(&sc, bound, 1.0);
        let ins = inscribe(&sc, target, bound, Some(v[0]), 1 << 20).unwrap();
        let m = ins.len();
        let mut straight = 0;
        for i in 0..m {
            let (p, q) = (ins.positions[i], ins.positions[(i + 1) % m]);
            let l = ins.vertices[i].dist(ins.vertices[(i + 1) % m]);
            assert!((l - ins.chord_length).abs() <= 1e-9 * ins.chord_length);
            if p.piece == q.piece && sc.pieces[p.piece as usize].is_line() {
                straight += 1;
                let (a, b) = (ins.vertices[i], ins.vertices[(i + 1) % m]);
                // on an axis-aligned side one coordinate is shared exactly
                assert!(a.x == b.x || a.y == b.y);
            }
        }
        assert!(straight as f64 > 0.9 * m as f64);
        assert!(ins.max_turn <= bound);
        assert!(ins.chord_length <= 1.0 / 200.0);
    }

    #[test]
    fn open_run_lands_on_end() {
        let pts = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.5, 0.7), Point::new(2.5, 0.9)];
        let segs: Vec<_> = (0..3).map(|i| (pts[i], pts[i + 1])).collect();
        let sc = smooth(&segs, 0.8, false).unwrap();
        let bound = PI / 64.0;
        let target = target_chord_length(&sc, bound, 0.8);
        let ins = inscribe(&sc, target, bound, None, 1 << 22).unwrap();
        assert_eq!(ins.vertices[0], pts[0]);
        let k = ins.len();
        let last = ins.vertices[k - 1].dist(pts[3]);
        assert!((last - ins.chord_length).abs() <= 1e-9 * ins.chord_length);
        for w in ins.vertices.windows(2) {
            assert!((w[0].dist(w[1]) - ins.chord_length).abs() <= 1e-9 * ins.chord_length);
        }
    }

    #[test]
    fn budget_guard() {
        let sc = circle(1.0, 5);
        let err = inscribe(&sc, 1e-6, PI, Some(Point::new(1.0, 0.0)), 1000).unwrap_err();
        assert!(err.is_resource_limit());
    }
}
