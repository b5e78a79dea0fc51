//! Geometric verifiers: Ahlfors ratios, flatness profiles, the tracked
//! flatness-failure balls, vertical mass and persistence of frozen segments.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{
    best_fit_line, push_clipped_samples, segment_length_in_disk, Ball, BBox, Location, Point,
};
use crate::refine::{AdvanceStats, FrozenRegistry, GenerationCurve};
use crate::wos::SpatialIndex;

/// Polyline length inside `ball`, exact up to rounding.
pub fn length_in_ball(index: &SpatialIndex, ball: Ball) -> f64 {
    index
        .edges_in_ball(ball.center, ball.radius)
        .into_iter()
        .map(|e| {
            let (a, b) = index.edge(e as usize);
            segment_length_in_disk(a, b, ball.center, ball.radius)
        })
        .sum()
}

/// Samples of the curve inside `ball` at spacing about `spacing`, thinned to
/// one per `spacing/4` cell so dense regions do not swamp the fit.
pub fn ball_samples(index: &SpatialIndex, ball: Ball, spacing: f64) -> Vec<Point> {
    let mut raw = Vec::new();
    for e in index.edges_in_ball(ball.center, ball.radius) {
        let (a, b) = index.edge(e as usize);
        push_clipped_samples(a, b, ball.center, ball.radius, spacing, &mut raw);
    }
    let cell = spacing / 4.0;
    let mut seen = HashSet::new();
    raw.retain(|p| {
        let q = (*p - ball.center) * (1.0 / cell);
        seen.insert((q.x.floor() as i64, q.y.floor() as i64))
    });
    raw
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AhlforsSample {
    pub center: Point,
    pub radius: f64,
    /// `H¹(curve ∩ B) / 2r`.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityReport {
    pub samples: Vec<AhlforsSample>,
    pub min: f64,
    pub max: f64,
    /// Radii dropped for lying outside `[2ℓ, diam/4]`.
    pub skipped_radii: Vec<f64>,
}

/// Ahlfors ratios at `samples` evenly spaced vertices (or at `centers` when
/// given) for each admissible radius.
pub fn ahlfors_scan(
    curve: &GenerationCurve,
    samples: usize,
    radii: &[f64],
    centers: Option<&[Point]>,
    exec: Exec,
) -> RegularityReport {
    let index = SpatialIndex::new(curve.vertices());
    let diam = index.bbox().diagonal();
    let lo = 2.0 * curve.chord_length;
    let (ok, skipped): (Vec<f64>, Vec<f64>) = radii.iter().partition(|&&r| r >= lo && r <= diam / 4.0);
    for r in &skipped {
        log::warn!("radius {r} outside [{lo}, {}]; skipped", diam / 4.0);
    }
    let owned: Vec<Point>;
    let centers = match centers {
        Some(c) => c,
        None => {
            let n = curve.len();
            let step = n.div_ceil(samples.max(1)).max(1);
            owned = (0..n).step_by(step).map(|i| curve.vertices()[i]).collect();
            &owned
        }
    };
    let jobs: Vec<(Point, f64)> = centers.iter().flat_map(|&c| ok.iter().map(move |&r| (c, r))).collect();
    let out = exec.map_slice(&jobs, |&(c, r)| AhlforsSample {
        center: c,
        radius: r,
        ratio: length_in_ball(&index, Ball::new(c, r)) / (2.0 * r),
    });
    let min = out.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
    let max = out.iter().map(|s| s.ratio).fold(f64::NEG_INFINITY, f64::max);
    RegularityReport {
        samples: out,
        min,
        max,
        skipped_radii: skipped,
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatnessResult {
    pub center: Point,
    pub radius: f64,
    pub d: f64,
    /// Unit normal of the best line, pointing to the exterior.
    pub line_normal: Point,
}

impl FlatnessResult {
    /// `|N_B − (1,0)|`.
    pub fn tilt(&self) -> f64 {
        self.line_normal.dist(Point::new(1.0, 0.0))
    }
}

/// Samples per radius used for the flatness fit.
pub const FIT_SAMPLES_PER_RADIUS: f64 = 100.0;

/// Best-fit flatness of the curve in `ball`, normal oriented outward.
pub fn flatness_at(index: &SpatialIndex, ball: Ball) -> Result<FlatnessResult> {
    let pts = ball_samples(index, ball, ball.radius / FIT_SAMPLES_PER_RADIUS);
    let fit = best_fit_line(&pts, ball)?;
    let n = fit.line.normal();
    // the side of the line farther from the curve decides: probe both
    let probe = |s: f64| index.locate(ball.center + n * (s * 0.5 * ball.radius), 0.0);
    let line_normal = match (probe(1.0), probe(-1.0)) {
        (Location::Outside, _) | (_, Location::Inside) => n,
        _ => -n,
    };
    Ok(FlatnessResult {
        center: ball.center,
        radius: ball.radius,
        d: fit.deviation,
        line_normal,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfilePoint {
    pub radius: f64,
    pub sup: f64,
    pub argmax: Point,
    pub centers: usize,
}

/// Centres for a flatness profile: every `stride`-th vertex plus frozen
/// chord midpoints, restricted to `region`, at most `max` in total.
pub fn profile_centers(curve: &GenerationCurve, stride: usize, region: Option<Ball>, max: usize) -> Vec<Point> {
    let inside = |p: &Point| region.is_none_or(|w| w.contains(*p));
    let mut c: Vec<Point> = curve.vertices().iter().step_by(stride.max(1)).copied().filter(inside).collect();
    c.extend(
        curve
            .frozen_edges()
            .into_iter()
            .map(|i| {
                let (a, b) = curve.edge(i);
                a.midpoint(b)
            })
            .filter(inside),
    );
    if c.len() > max {
        let step = c.len().div_ceil(max);
        c = c.into_iter().step_by(step).collect();
    }
    c
}

/// `sup_x D(x, r)` over `centers` for each radius. Radii below `4ℓ` are
/// skipped with a warning.
pub fn reifenberg_profile(curve: &GenerationCurve, radii: &[f64], centers: &[Point], exec: Exec) -> Vec<ProfilePoint> {
    let index = SpatialIndex::new(curve.vertices());
    let mut out = Vec::new();
    for &r in radii {
        if r < 4.0 * curve.chord_length {
            log::warn!("radius {r} below 4ℓ = {}; skipped", 4.0 * curve.chord_length);
            continue;
        }
        let ds = exec.map_slice(centers, |&c| {
            let pts = ball_samples(&index, Ball::new(c, r), r / FIT_SAMPLES_PER_RADIUS);
            best_fit_line(&pts, Ball::new(c, r)).map(|f| f.deviation).unwrap_or(0.0)
        });
        let (mut sup, mut argmax) = (0.0, centers.first().copied().unwrap_or(Point::ORIGIN));
        for (&d, &c) in ds.iter().zip(centers) {
            if d > sup {
                sup = d;
                argmax = c;
            }
        }
        out.push(ProfilePoint {
            radius: r,
            sup,
            argmax,
            centers: centers.len(),
        });
    }
    out
}

/// One generation of the horizontal lineage.
#[derive(Clone, Copy, Debug)]
pub struct Tracked<'a> {
    pub curve: &'a GenerationCurve,
    /// Index of the tracked horizontal chord.
    pub edge: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FailureBall {
    pub generation: u32,
    /// `Bₙ`: midpoint of the tracked chord, radius a quarter of its length,
    /// in the frame of the curve it was measured on.
    pub ball: Ball,
    pub flatness: FlatnessResult,
}

/// Flatness-failure balls along the horizontal lineage, each measured on
/// the deepest curve of `lineage` after re-centring on it with radius
/// `0.9·|L|/4`.
pub fn flatness_failure_balls(lineage: &[Tracked]) -> Result<Vec<FailureBall>> {
    let Some(last) = lineage.last() else {
        return Ok(Vec::new());
    };
    let index = SpatialIndex::new(last.curve.vertices());
    let mut out = Vec::new();
    for t in lineage {
        let c = t.curve;
        if t.edge >= c.len() {
            return Err(Error::ConstructionBug(format!("lineage edge {} out of range", t.edge)));
        }
        let (a, b) = c.edge(t.edge);
        let n = c.edges[t.edge].normal.normal();
        if a.y != b.y || !(b.x > a.x) || n != Point::new(0.0, 1.0) {
            return Err(Error::ConstructionBug(format!(
                "generation {} lineage chord {a:?}–{b:?} is not horizontal with normal (0,1)",
                c.generation
            )));
        }
        let map = |p: Point| {
            c.frame.map_into(&last.curve.frame, p).ok_or_else(|| {
                Error::ConstructionBug(format!("frame of generation {} is not a prefix", c.generation))
            })
        };
        let (a, b) = (map(a)?, map(b)?);
        let ball = Ball::new(a.midpoint(b), a.dist(b) / 4.0);
        let centre = index.nearest(ball.center).point;
        let tilde = Ball::new(centre, 0.9 * ball.radius);
        out.push(FailureBall {
            generation: c.generation,
            ball,
            flatness: flatness_at(&index, tilde)?,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerticalMass {
    pub generation: u32,
    pub vertical: f64,
    pub total: f64,
}

impl VerticalMass {
    pub fn ratio(&self) -> f64 {
        if self.total > 0.0 {
            self.vertical / self.total
        } else {
            0.0
        }
    }
}

/// `Σ H¹(S ∈ 𝒱) / H¹(G)` per built generation, from the frozen tags of the
/// assembled leaves.
pub fn vertical_mass_per_generation(stats: &[AdvanceStats]) -> Vec<VerticalMass> {
    stats
        .iter()
        .map(|s| VerticalMass {
            generation: s.generation,
            vertical: s.vertical_length,
            total: s.leaf_length,
        })
        .collect()
}

/// Frozen-tagged share of the length of a chord curve.
pub fn frozen_length_ratio(curve: &GenerationCurve) -> f64 {
    let (mut f, mut t) = (0.0, 0.0);
    for i in 0..curve.len() {
        let (a, b) = curve.edge(i);
        let l = a.dist(b);
        t += l;
        if curve.edges[i].frozen {
            f += l;
        }
    }
    f / t
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Persistence {
    pub entries: usize,
    /// Largest distance from a registered `½T` to the curve.
    pub max_half_distance: f64,
    /// Smallest share of a `T` covered by its frozen chords.
    pub min_coverage: f64,
    pub worst_entry: usize,
}

/// Persistence of the frozen segments registered at `generation`, measured
/// against `curve` (the generation they were frozen in, or a later one in
/// the same frame).
pub fn frozen_persistence(curve: &GenerationCurve, registry: &FrozenRegistry, generation: u32, coverage_from: &GenerationCurve) -> Persistence {
    let index = SpatialIndex::new(curve.vertices());
    let mut covered = vec![0.0f64; registry.len()];
    for (i, e) in coverage_from.edges.iter().enumerate() {
        if let (true, Some(p)) = (e.frozen, e.parent) {
            let t = &registry.entries[p as usize];
            let (a, b) = coverage_from.edge(i);
            let d = (t.b - t.a).unit();
            let (s0, s1) = ((a - t.a).dot(d), (b - t.a).dot(d));
            let (lo, hi) = (s0.min(s1).max(0.0), s0.max(s1).min(t.length()));
            covered[p as usize] += (hi - lo).max(0.0);
        }
    }
    let mut res = Persistence {
        entries: 0,
        max_half_distance: 0.0,
        min_coverage: f64::INFINITY,
        worst_entry: 0,
    };
    for (k, t) in registry.entries.iter().enumerate() {
        if t.generation != generation {
            continue;
        }
        res.entries += 1;
        let (h0, h1) = t.half();
        for j in 0..=16 {
            let d = index.distance(h0.lerp(h1, j as f64 / 16.0));
            res.max_half_distance = res.max_half_distance.max(d);
        }
        let cov = covered[k] / t.length();
        if cov < res.min_coverage {
            res.min_coverage = cov;
            res.worst_entry = k;
        }
    }
    res
}

/// Bounding box of the frozen chords of `curve`.
pub fn frozen_bbox(curve: &GenerationCurve) -> BBox {
    let mut b = BBox::empty();
    for i in curve.frozen_edges() {
        let (p, q) = curve.edge(i);
        b.grow(p);
        b.grow(q);
    }
    b
}
