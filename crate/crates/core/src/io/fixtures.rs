//! Small closed test curves and the figure sources.

use std::f64::consts::{PI, TAU};

use crate::error::Result;
use crate::geometry::Point;
use crate::refine::GenerationCurve;
use crate::snowflake::{generate_gamma, horizontal_source, replace_segment, GammaCurve, GeneratorParams};

/// Regular `n`-gon inscribed in the circle of radius `r`, clockwise.
pub fn disk(n: usize, r: f64) -> GenerationCurve {
    let v: Vec<Point> = (0..n).map(|i| Point::polar(r, -(i as f64) * TAU / n as f64)).collect();
    let l = 2.0 * r * (PI / n as f64).sin();
    GenerationCurve::from_vertices(0, v, l).expect("regular polygon")
}

/// Long thin rectangle `[−len/2, len/2] × [−1, 0]` with its top side cut
/// into chords of length `chord`.
pub fn strip(len: f64, chord: f64) -> GenerationCurve {
    let k = (len / chord).round().max(1.0) as usize;
    let mut v: Vec<Point> = (0..=k).map(|i| Point::new(-len / 2.0 + len * i as f64 / k as f64, 0.0)).collect();
    v.push(Point::new(len / 2.0, -1.0));
    v.push(Point::new(-len / 2.0, -1.0));
    GenerationCurve::from_vertices(0, v, len / k as f64).expect("rectangle")
}

/// A circle of radius `radius` through the origin with a corner of opening
/// `π − beta` at the origin; the two sides near the corner are straight
/// segments of length `radius`, sampled at spacing `chord`.
pub fn wedge(beta: f64, radius: f64, chord: f64) -> GenerationCurve {
    // rays from the corner at angles ±(π − beta)/2 around −y
    let half = (PI - beta) / 2.0;
    let dir_r = Point::polar(1.0, -PI / 2.0 + half);
    let dir_l = Point::polar(1.0, -PI / 2.0 - half);
    let k = (radius / chord).round().max(1.0) as usize;
    let mut v = Vec::new();
    // corner, then down the right ray
    for i in 0..=k {
        v.push(dir_r * (radius * i as f64 / k as f64));
    }
    // close with a circular arc below, from the end of the right ray round to
    // the end of the left ray
    let (p, q) = (dir_r * radius, dir_l * radius);
    let c = Point::new(0.0, -radius * half.cos() - radius * half.sin());
    let (ap, aq) = ((p - c).angle(), (q - c).angle());
    let mut sweep = aq - ap;
    if sweep > 0.0 {
        sweep -= TAU;
    }
    let rr = p.dist(c);
    let arc_n = ((rr * sweep.abs()) / chord).ceil() as usize;
    for j in 1..arc_n {
        v.push(c + Point::polar(rr, ap + sweep * j as f64 / arc_n as f64));
    }
    for i in (1..=k).rev() {
        v.push(dir_l * (radius * i as f64 / k as f64));
    }
    GenerationCurve::from_vertices(0, v, chord).expect("wedge")
}

/// Figure 1: a single replacement of a horizontal unit segment with `α = π/6`.
pub fn figure1() -> Result<Vec<Point>> {
    let c = replace_segment(&horizontal_source(1.0), PI / 6.0)?;
    Ok(vec![c[0].a, c[1].a, c[2].a, c[3].a, c[3].b])
}

/// Figure 2: `Γ` of a horizontal unit segment with normal `(0,1)` and `M = 2`.
pub fn figure2() -> Result<GammaCurve> {
    generate_gamma(&GeneratorParams::canonical(2, horizontal_source(1.0)))
}
