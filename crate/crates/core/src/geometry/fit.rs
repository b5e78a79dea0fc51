//! The two-sided flatness functional
//! `D_E(x,r,P) = r⁻¹ max( sup_{E∩B} dist(·,P), sup_{P∩B} dist(·,E) )`
//! and its minimization over lines.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{Ball, Point};

/// Line `{ y : n·(y − center) = offset }` with direction angle `angle ∈ [0, π)`
/// and `n = (−sin θ, cos θ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    pub angle: f64,
    pub offset: f64,
}

impl Line {
    pub fn direction(&self) -> Point {
        Point::polar(1.0, self.angle)
    }

    pub fn normal(&self) -> Point {
        self.direction().perp()
    }

    /// Unit normal flipped to have a nonnegative component along `reference`.
    pub fn normal_towards(&self, reference: Point) -> Point {
        let n = self.normal();
        if n.dot(reference) < 0.0 {
            -n
        } else {
            n
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub line: Line,
    pub deviation: f64,
}

/// Points of `vertices` (a polyline) inside `ball`, resampled along arc
/// length at spacing `spacing`. Segment endpoints inside the ball are kept.
pub fn sample_polyline_in_ball(vertices: &[Point], closed: bool, ball: Ball, spacing: f64) -> Vec<Point> {
    let n = vertices.len();
    let edges = if closed { n } else { n.saturating_sub(1) };
    let mut out = Vec::new();
    let (c, r) = (ball.center, ball.radius);
    for i in 0..edges {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        push_clipped_samples(a, b, c, r, spacing, &mut out);
    }
    out
}

/// Appends samples of `[a,b] ∩ B(c,r)` at spacing `spacing`.
pub fn push_clipped_samples(a: Point, b: Point, c: Point, r: f64, spacing: f64, out: &mut Vec<Point>) {
    let d = b - a;
    let l2 = d.norm2();
    if l2 == 0.0 {
        return;
    }
    let f = a - c;
    let bq = f.dot(d);
    let cq = f.norm2() - r * r;
    let disc = bq * bq - l2 * cq;
    if disc < 0.0 {
        return;
    }
    let sq = disc.sqrt();
    let t0 = ((-bq - sq) / l2).max(0.0);
    let t1 = ((-bq + sq) / l2).min(1.0);
    if t1 < t0 {
        return;
    }
    let len = (t1 - t0) * l2.sqrt();
    let k = (len / spacing).ceil().max(1.0) as usize;
    for j in 0..=k {
        out.push(a + d * (t0 + (t1 - t0) * j as f64 / k as f64));
    }
}

/// Evaluates `D_E(x, r, P)` for sample points `pts` of `E ∩ B`.
pub fn deviation_for_line(pts: &[Point], ball: Ball, line: Line) -> f64 {
    let mut ws = Workspace::default();
    ws.prepare(pts, ball, line.angle);
    ws.eval(line.offset) / ball.radius
}

#[derive(Default)]
struct Workspace {
    // (t, signed height) of samples in the rotated frame, sorted by t
    th: Vec<(f64, f64)>,
    v: Vec<usize>,
    z: Vec<f64>,
    r: f64,
}

impl Workspace {
    fn prepare(&mut self, pts: &[Point], ball: Ball, angle: f64) {
        let d = Point::polar(1.0, angle);
        let n = d.perp();
        self.r = ball.radius;
        self.th.clear();
        self.th.extend(pts.iter().map(|p| {
            let q = *p - ball.center;
            (q.dot(d), q.dot(n))
        }));
        self.th.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    }

    /// Unnormalized two-sided sup distance for offset `c`.
    fn eval(&mut self, c: f64) -> f64 {
        let mut t1: f64 = 0.0;
        for &(_, h) in &self.th {
            t1 = t1.max((h - c).abs());
        }
        let half = (self.r * self.r - c * c).max(0.0).sqrt();
        let t2 = self.envelope_sup(c, half);
        t1.max(t2)
    }

    /// `sup_{|t|≤half} min_i sqrt((t − t_i)² + (h_i − c)²)` by the lower
    /// envelope of parabolas.
    fn envelope_sup(&mut self, c: f64, half: f64) -> f64 {
        let th = &self.th;
        if th.is_empty() {
            return 0.0;
        }
        let f = |i: usize| -> f64 {
            let (t, h) = th[i];
            (h - c) * (h - c) + t * t
        };
        self.v.clear();
        self.z.clear();
        self.v.push(0);
        self.z.push(f64::NEG_INFINITY);
        for q in 1..th.len() {
            let fq = f(q);
            loop {
                let p = *self.v.last().unwrap();
                let dt = th[q].0 - th[p].0;
                if dt == 0.0 {
                    // equal abscissae: keep the lower parabola
                    if fq < f(p) {
                        self.v.pop();
                        self.z.pop();
                        if self.v.is_empty() {
                            self.v.push(q);
                            self.z.push(f64::NEG_INFINITY);
                            break;
                        }
                        continue;
                    }
                    break;
                }
                let s = (fq - f(p)) / (2.0 * dt);
                if s <= *self.z.last().unwrap() && self.v.len() > 1 {
                    self.v.pop();
                    self.z.pop();
                    continue;
                }
                self.v.push(q);
                self.z.push(s);
                break;
            }
        }
        let val = |k: usize, t: f64| -> f64 {
            let (ti, hi) = th[self.v[k]];
            (t - ti) * (t - ti) + (hi - c) * (hi - c)
        };
        // active parabola at t
        let at = |t: f64| -> f64 {
            let k = match self.z.partition_point(|&zz| zz <= t) {
                0 => 0,
                k => k - 1,
            };
            val(k, t)
        };
        let mut best = at(-half).max(at(half));
        for k in 1..self.z.len() {
            let t = self.z[k];
            if t > -half && t < half {
                best = best.max(val(k, t));
            }
        }
        best.max(0.0).sqrt()
    }
}

const COARSE_ANGLES: usize = 180;
const COARSE_OFFSETS: usize = 41;
const ZOOM_HALF: usize = 10;
const ZOOM_ROUNDS: usize = 9;
const SEEDS: usize = 4;

/// Minimizes `D_E(x,r,P)` over lines: a `180 × 41` grid in
/// (angle, offset) followed by repeated 10× zooms around the best cells.
pub fn best_fit_line(points: &[Point], ball: Ball) -> Result<LineFit> {
    let r = ball.radius;
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("ball radius {r}")));
    }
    let pts: Vec<Point> = points.iter().copied().filter(|p| ball.contains(*p)).collect();
    if pts.len() < 2 {
        return Err(Error::DegenerateInput(format!(
            "{} sample point(s) inside the ball, need 2",
            pts.len()
        )));
    }
    let mut ws = Workspace::default();
    let d_theta = PI / COARSE_ANGLES as f64;
    let d_off = 2.0 * r / (COARSE_OFFSETS - 1) as f64;

    let mut coarse: Vec<(f64, f64, f64)> = Vec::with_capacity(COARSE_ANGLES * COARSE_OFFSETS);
    for i in 0..COARSE_ANGLES {
        let theta = i as f64 * d_theta;
        ws.prepare(&pts, ball, theta);
        for j in 0..COARSE_OFFSETS {
            let c = -r + j as f64 * d_off;
            coarse.push((ws.eval(c), theta, c));
        }
    }
    coarse.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut best = coarse[0];
    let mut seeds: Vec<(f64, f64, f64)> = Vec::new();
    for cand in &coarse {
        if seeds.len() == SEEDS {
            break;
        }
        let distinct = seeds
            .iter()
            .all(|s| angle_gap(s.1, cand.1) > 1.5 * d_theta || (s.2 - cand.2).abs() > 1.5 * d_off);
        if distinct {
            seeds.push(*cand);
        }
    }
    for seed in seeds {
        let refined = zoom(&mut ws, &pts, ball, seed, d_theta, d_off);
        if refined.0 < best.0 {
            best = refined;
        }
    }
    let theta = best.1.rem_euclid(PI);
    Ok(LineFit {
        line: Line {
            angle: theta,
            offset: if (best.1 - theta).abs() > 1.0 { -best.2 } else { best.2 },
        },
        deviation: (best.0 / r).min(1.0),
    })
}

fn angle_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}

fn zoom(
    ws: &mut Workspace,
    pts: &[Point],
    ball: Ball,
    mut best: (f64, f64, f64),
    mut dt: f64,
    mut dc: f64,
) -> (f64, f64, f64) {
    let r = ball.radius;
    for _ in 0..ZOOM_ROUNDS {
        let (t0, c0) = (best.1, best.2);
        dt /= ZOOM_HALF as f64;
        dc /= ZOOM_HALF as f64;
        for i in 0..=2 * ZOOM_HALF {
            let theta = t0 + (i as f64 - ZOOM_HALF as f64) * dt;
            ws.prepare(pts, ball, theta);
            for j in 0..=2 * ZOOM_HALF {
                let c = (c0 + (j as f64 - ZOOM_HALF as f64) * dc).clamp(-r, r);
                let v = ws.eval(c);
                if v < best.0 {
                    best = (v, theta, c);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line_points(theta: f64, h: f64, n: usize) -> Vec<Point> {
        let d = Point::polar(1.0, theta);
        (0..=n)
            .map(|k| d * (-1.0 + 2.0 * k as f64 / n as f64) + d.perp() * h)
            .collect()
    }

    // sampling at spacing r/500 leaves a quantization floor of r/1000 in D
    const QUANT: f64 = 1e-3 + 1e-12;

    #[test]
    fn collinear_on_axis() {
        let pts = line_points(0.0, 0.0, 1000);
        let fit = best_fit_line(&pts, Ball::new(Point::ORIGIN, 1.0)).unwrap();
        assert!(fit.deviation <= QUANT);
        assert!(angle_gap(fit.line.angle, 0.0) < 1e-6);
        assert!(fit.line.offset.abs() < 1e-6);
    }

    #[test]
    fn rotated_diameter_against_horizontal() {
        let beta = 0.4;
        let pts = line_points(beta, 0.0, 1000);
        let ball = Ball::new(Point::ORIGIN, 1.0);
        let against = deviation_for_line(&pts, ball, Line { angle: 0.0, offset: 0.0 });
        assert!((against - beta.sin()).abs() <= QUANT);
        let fit = best_fit_line(&pts, ball).unwrap();
        assert!(fit.deviation <= QUANT);
        assert!(angle_gap(fit.line.angle, beta) < 1e-6);
    }

    #[test]
    fn offset_chord() {
        let h: f64 = 0.1;
        let ball = Ball::new(Point::ORIGIN, 1.0);
        let half = (1.0 - h * h).sqrt();
        let pts: Vec<Point> = (0..=1000)
            .map(|k| Point::new(-half + 2.0 * half * k as f64 / 1000.0, h))
            .collect();
        // against the line through the center the deviation is h
        let centered = deviation_for_line(&pts, ball, Line { angle: 0.0, offset: 0.0 });
        assert!((centered - h).abs() < 5e-3);
        // the infimum over all lines is attained by y = h itself
        let fit = best_fit_line(&pts, ball).unwrap();
        assert!(fit.deviation <= QUANT);
        let foot = fit.line.normal() * fit.line.offset;
        assert!(foot.dist(Point::new(0.0, h)) <= QUANT, "{:?}", fit);
        let mut oracle = f64::INFINITY;
        for k in 0..=2000 {
            let c = -1.0 + 2.0 * k as f64 / 2000.0;
            oracle = oracle.min(deviation_for_line(&pts, ball, Line { angle: 0.0, offset: c }));
        }
        assert!(fit.deviation <= oracle + 1e-12);
    }

    #[test]
    fn too_few_points() {
        let e = best_fit_line(&[Point::ORIGIN], Ball::new(Point::ORIGIN, 1.0));
        assert!(matches!(e, Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn envelope_matches_bruteforce() {
        let pts: Vec<Point> = (0..40)
            .map(|k| {
                let t = k as f64 * 0.37;
                Point::new(t.sin() * 0.8, (1.7 * t).cos() * 0.3)
            })
            .collect();
        let ball = Ball::new(Point::ORIGIN, 1.0);
        for &(theta, c) in &[(0.0, 0.0), (0.7, 0.2), (2.0, -0.5), (1.1, 0.9)] {
            let got = deviation_for_line(&pts, ball, Line { angle: theta, offset: c });
            let line = Line { angle: theta, offset: c };
            let (d, n) = (line.direction(), line.normal());
            let t1 = pts.iter().map(|p| (p.dot(n) - c).abs()).fold(0.0, f64::max);
            let half = (1.0 - c * c).sqrt();
            let mut t2: f64 = 0.0;
            for k in 0..=200000 {
                let y = n * c + d * (-half + 2.0 * half * k as f64 / 200000.0);
                let m = pts.iter().map(|p| p.dist(y)).fold(f64::INFINITY, f64::min);
                t2 = t2.max(m);
            }
            let want = t1.max(t2);
            assert!((got - want).abs() < 1e-4, "{theta} {c}: {got} vs {want}");
            assert!(got >= want - 1e-12);
        }
    }
}
