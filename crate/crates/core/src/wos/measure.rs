//! Harmonic-measure statistics on a generated boundary.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{Ball, Point};
use crate::refine::{FrozenRegistry, GenerationCurve};
use crate::wos::walk::{run_walks, Absorption, Domain, MeasureEstimate, Side, WosConfig};

/// Absorptions needed inside a ball before its oscillation is trusted.
pub const MIN_BALL_ABSORPTIONS: u64 = 10_000;

/// A generated curve together with its walk domain.
pub struct Boundary<'a> {
    pub curve: &'a GenerationCurve,
    pub domain: Domain<'a>,
}

impl<'a> Boundary<'a> {
    pub fn new(curve: &'a GenerationCurve) -> Self {
        Boundary {
            curve,
            domain: Domain::new(curve.vertices()),
        }
    }

    /// Interior point of largest boundary distance on an `n × n` grid over
    /// the bounding box.
    pub fn interior_pole(&self, n: usize) -> Result<Point> {
        let b = self.domain.index.bbox();
        let mut best: Option<(f64, Point)> = None;
        for i in 0..n {
            for j in 0..n {
                let p = Point::new(
                    b.min.x + (b.max.x - b.min.x) * (i as f64 + 0.5) / n as f64,
                    b.min.y + (b.max.y - b.min.y) * (j as f64 + 0.5) / n as f64,
                );
                if self.domain.side_of(p) != Some(Side::Interior) {
                    continue;
                }
                let d = self.domain.index.distance(p);
                if best.is_none_or(|(bd, _)| d > bd) {
                    best = Some((d, p));
                }
            }
        }
        best.map(|(_, p)| p)
            .ok_or_else(|| Error::DegenerateInput(format!("no interior grid point on a {n}x{n} grid")))
    }

    /// Exterior point at distance about `diam` from the boundary.
    pub fn exterior_pole(&self) -> Point {
        let d = &self.domain;
        d.center + Point::new(d.radius + d.diameter(), 0.0)
    }

    /// A pole on `side` near `ball`: among points at radii `r/4 … 3r/4` in
    /// 16 directions, the one farthest from the boundary.
    pub fn local_pole(&self, ball: Ball, side: Side) -> Result<Point> {
        let mut best: Option<(f64, Point)> = None;
        for s in [0.25, 0.5, 0.75] {
            for k in 0..16 {
                let p = ball.center + Point::polar(s * ball.radius, k as f64 * TAU / 16.0);
                if self.domain.side_of(p) != Some(side) {
                    continue;
                }
                let d = self.domain.index.distance(p);
                if best.is_none_or(|(bd, _)| d > bd) {
                    best = Some((d, p));
                }
            }
        }
        best.map(|(_, p)| p)
            .ok_or_else(|| Error::EmptyWindow(format!("no {side:?} pole found near {ball:?}")))
    }

    /// F-membership: the nearest edge is frozen and the point projects into
    /// the middle half of its parent segment.
    pub fn in_f(&self, registry: &FrozenRegistry, a: &Absorption) -> bool {
        let e = &self.curve.edges[a.edge as usize];
        if !e.frozen {
            return false;
        }
        let Some(parent) = e.parent else { return false };
        let t = &registry.entries[parent as usize];
        let d = t.b - t.a;
        let s = (a.point - t.a).dot(d) / d.norm2();
        (0.25..=0.75).contains(&s)
    }

    pub fn check_window(&self, w: Ball) -> Result<()> {
        let d = self.domain.index.distance(w.center);
        if d > w.radius {
            return Err(Error::EmptyWindow(format!(
                "window {w:?} does not meet the boundary (distance {d})"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FMeasure {
    /// Targets: 0 = F (within the window if any), 1 = window.
    pub estimate: MeasureEstimate,
    pub pole: Point,
    pub window: Option<Ball>,
}

impl FMeasure {
    pub fn fraction(&self) -> f64 {
        self.estimate.fraction(0)
    }

    pub fn half_width(&self) -> f64 {
        self.estimate.half_width(0)
    }

    /// `ω(F ∩ B) / ω(B)` and its half-width.
    pub fn conditional(&self) -> Option<(f64, f64)> {
        self.window?;
        self.estimate.conditional(0, 1)
    }
}

/// Harmonic measure of `F` seen from `pole`, optionally restricted to a window.
pub fn measure_of_f(
    b: &Boundary,
    registry: &FrozenRegistry,
    pole: Point,
    cfg: &WosConfig,
    window: Option<Ball>,
    exec: Exec,
) -> Result<FMeasure> {
    if let Some(w) = window {
        b.check_window(w)?;
    }
    let out = run_walks(&b.domain, pole, Side::Interior, cfg, exec)?;
    Ok(FMeasure::from_outcomes(b, registry, &out, pole, cfg.epsilon, window))
}

impl FMeasure {
    /// Tallies walks already run from `pole`.
    pub fn from_outcomes(
        b: &Boundary,
        registry: &FrozenRegistry,
        out: &[Option<Absorption>],
        pole: Point,
        epsilon: f64,
        window: Option<Ball>,
    ) -> Self {
        let estimate = MeasureEstimate::tally(out, 2, epsilon, |a| {
            let inside = window.is_none_or(|w| w.contains(a.point));
            ((inside && b.in_f(registry, a)) as u64) | ((inside as u64) << 1)
        });
        warn_timeouts(&estimate);
        FMeasure { estimate, pole, window }
    }
}

fn warn_timeouts(e: &MeasureEstimate) {
    if e.timeout_fraction() >= 1e-3 {
        log::warn!(
            "{} of {} walks timed out ({:.3}%)",
            e.timeouts,
            e.total_walks,
            100.0 * e.timeout_fraction()
        );
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Oscillation {
    pub ball: Ball,
    pub pole: Point,
    pub total_walks: u64,
    pub timeouts: u64,
    pub absorbed: u64,
    pub mean_normal: Point,
    /// Mean of `|N − N̄|` with `N̄` the ω-mean normal.
    pub around_mean: f64,
    /// Mean of `|N − N_B|` for the supplied geometric normal.
    pub around_geometric: Option<f64>,
    /// Fewer than [`MIN_BALL_ABSORPTIONS`] absorptions landed in the ball.
    pub widened: bool,
}

/// ω-weighted oscillation of the outer normal over `ball`, from a pole
/// chosen near the ball (or `pole` if given).
pub fn omega_weighted_normal_oscillation(
    b: &Boundary,
    cfg: &WosConfig,
    ball: Ball,
    geometric_normal: Option<Point>,
    pole: Option<Point>,
    exec: Exec,
) -> Result<Oscillation> {
    b.check_window(ball)?;
    let pole = match pole {
        Some(p) => p,
        None => b.local_pole(ball, Side::Interior)?,
    };
    let out = run_walks(&b.domain, pole, Side::Interior, cfg, exec)?;
    Ok(Oscillation::from_outcomes(b, &out, pole, ball, geometric_normal))
}

impl Oscillation {
    /// Oscillation over `ball` from walks already run from `pole`.
    pub fn from_outcomes(
        b: &Boundary,
        out: &[Option<Absorption>],
        pole: Point,
        ball: Ball,
        geometric_normal: Option<Point>,
    ) -> Self {
        let normals: Vec<Point> = out
            .iter()
            .flatten()
            .filter(|a| ball.contains(a.point))
            .map(|a| b.curve.edges[a.edge as usize].normal.normal())
            .collect();
        let timeouts = out.iter().filter(|o| o.is_none()).count() as u64;
        let k = normals.len() as u64;
        let widened = k < MIN_BALL_ABSORPTIONS;
        if widened {
            log::warn!("only {k} absorptions inside {ball:?}; confidence is wider than requested");
        }
        let (mean_normal, around_mean, around_geometric) = if k == 0 {
            (Point::ORIGIN, f64::NAN, geometric_normal.map(|_| f64::NAN))
        } else {
            let inv = 1.0 / k as f64;
            let mean = normals.iter().fold(Point::ORIGIN, |s, &n| s + n) * inv;
            let dev = normals.iter().map(|&n| n.dist(mean)).sum::<f64>() * inv;
            let geo = geometric_normal.map(|g| normals.iter().map(|&n| n.dist(g)).sum::<f64>() * inv);
            (mean, dev, geo)
        };
        Oscillation {
            ball,
            pole,
            total_walks: out.len() as u64,
            timeouts,
            absorbed: k,
            mean_normal,
            around_mean,
            around_geometric,
            widened,
        }
    }
}

/// Consecutive-edge arcs of chord diameter at most `r`; edges outside
/// `region` get no arc.
pub fn partition_arcs(curve: &GenerationCurve, r: f64, region: Option<Ball>) -> (Vec<u32>, Vec<Ball>) {
    let n = curve.len();
    let mut arc_of = vec![u32::MAX; n];
    let mut arcs: Vec<(usize, usize)> = Vec::new();
    let mut open: Option<(usize, Point)> = None;
    for (e, slot) in arc_of.iter_mut().enumerate() {
        let (p, q) = curve.edge(e);
        if region.is_some_and(|w| !(w.contains(p) && w.contains(q))) {
            open = None;
            continue;
        }
        match open {
            Some((_, s)) if q.dist(s) <= r => {}
            _ => {
                arcs.push((e, e));
                open = Some((e, p));
            }
        }
        let id = arcs.len() - 1;
        arcs[id].1 = e;
        *slot = id as u32;
    }
    let bounds = arcs
        .iter()
        .map(|&(s, t)| {
            let mut bb = crate::geometry::BBox::empty();
            for e in s..=t {
                let (p, q) = curve.edge(e);
                bb.grow(p);
                bb.grow(q);
            }
            Ball::new(bb.center(), 0.5 * bb.diagonal())
        })
        .collect();
    (arc_of, bounds)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityRatio {
    pub scale: f64,
    pub arcs: usize,
    /// Arcs without hits on one of the sides.
    pub excluded: usize,
    pub balls: usize,
    /// Largest statistic over the sampled balls, and its centre.
    pub sup: f64,
    pub sup_center: Point,
    pub mean: f64,
    pub interior: MeasureEstimate,
    pub exterior: MeasureEstimate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityRatioParams {
    pub scale: f64,
    /// Only arcs inside this ball are used.
    pub region: Option<Ball>,
    /// Ball centres; arc starts are sampled when empty.
    pub centers: Vec<Point>,
    pub max_balls: usize,
    pub interior_pole: Point,
    pub exterior_pole: Point,
}

/// Mean oscillation of `log(ω⁻/ω⁺)` over arcs of size `scale`, in balls of
/// radius `5·scale`.
pub fn density_ratio_oscillation(b: &Boundary, cfg: &WosConfig, p: &DensityRatioParams, exec: Exec) -> Result<DensityRatio> {
    if !(p.scale > 0.0) {
        return Err(Error::InvalidParameter(format!("scale must be positive, got {}", p.scale)));
    }
    let (arc_of, bounds) = partition_arcs(b.curve, p.scale, p.region);
    if bounds.is_empty() {
        return Err(Error::EmptyWindow(format!("no arcs inside {:?}", p.region)));
    }
    let na = bounds.len();
    let count = |side, pole| -> Result<(Vec<u64>, MeasureEstimate)> {
        let out = run_walks(&b.domain, pole, side, cfg, exec)?;
        let mut hits = vec![0u64; na];
        for a in out.iter().flatten() {
            let id = arc_of[a.edge as usize];
            if id != u32::MAX {
                hits[id as usize] += 1;
            }
        }
        let est = MeasureEstimate::tally(&out, 1, cfg.epsilon, |a| (arc_of[a.edge as usize] != u32::MAX) as u64);
        warn_timeouts(&est);
        Ok((hits, est))
    };
    let (plus, interior) = count(Side::Interior, p.interior_pole)?;
    let (minus, exterior) = count(Side::Exterior, p.exterior_pole)?;
    let (np, nm) = (interior.total_walks as f64, exterior.total_walks as f64);
    let usable: Vec<bool> = (0..na).map(|i| plus[i] > 0 && minus[i] > 0).collect();
    let log_ratio: Vec<f64> = (0..na)
        .map(|i| ((minus[i] as f64 / nm) / (plus[i] as f64 / np)).ln())
        .collect();
    let excluded = usable.iter().filter(|&&u| !u).count();

    let centers: Vec<Point> = if p.centers.is_empty() {
        let step = na.div_ceil(p.max_balls.max(1));
        (0..na).step_by(step.max(1)).map(|i| bounds[i].center).collect()
    } else {
        p.centers.clone()
    };
    let radius = 5.0 * p.scale;
    let stats: Vec<f64> = centers
        .iter()
        .map(|&c| {
            let (mut w, mut wl) = (0.0, 0.0);
            let inside: Vec<usize> = (0..na)
                .filter(|&i| usable[i] && bounds[i].center.dist(c) + bounds[i].radius <= radius)
                .collect();
            for &i in &inside {
                w += plus[i] as f64;
                wl += plus[i] as f64 * log_ratio[i];
            }
            if w == 0.0 {
                return f64::NAN;
            }
            let m = wl / w;
            inside.iter().map(|&i| plus[i] as f64 * (log_ratio[i] - m).powi(2)).sum::<f64>() / w
        })
        .collect();
    let mut sup = f64::NEG_INFINITY;
    let mut sup_center = Point::ORIGIN;
    let (mut sum, mut k) = (0.0, 0);
    for (&s, &c) in stats.iter().zip(&centers) {
        if s.is_nan() {
            continue;
        }
        sum += s;
        k += 1;
        if s > sup {
            sup = s;
            sup_center = c;
        }
    }
    if k == 0 {
        return Err(Error::EmptyWindow("no sampled ball contains a usable arc".into()));
    }
    Ok(DensityRatio {
        scale: p.scale,
        arcs: na,
        excluded,
        balls: k,
        sup,
        sup_center,
        mean: sum / k as f64,
        interior,
        exterior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AngleRecord, Frame};
    use crate::refine::{ChordRun, EdgeInfo, RegistryEntry};
    use crate::snowflake::Coding;

    /// Axis square whose edges are the middle halves of registered segments.
    fn frozen_square() -> (GenerationCurve, FrozenRegistry) {
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(0.0, 1.0),
            Point::new(1.0, 1.0),
            Point::new(1.0, 0.0),
        ];
        let mut reg = FrozenRegistry::new();
        let mut edges = Vec::new();
        for i in 0..4 {
            let (p, q) = (v[i], v[(i + 1) % 4]);
            let d = q - p;
            reg.entries.push(RegistryEntry {
                generation: 1,
                a: p - d * 0.5,
                b: q + d * 0.5,
                coding: Coding::root(),
                source_edge: i as u32,
            });
            edges.push(EdgeInfo {
                frozen: true,
                parent: Some(i as u32),
                ..EdgeInfo::plain(AngleRecord::exact(2 - i as i64, 2), 1, 0)
            });
        }
        let runs = vec![ChordRun {
            level: 1,
            chord_length: 1.0,
        }];
        let c = GenerationCurve::new(1, Frame::identity(), v, edges, 1.0, runs).unwrap();
        (c, reg)
    }

    #[test]
    fn all_frozen_toy_has_full_f_mass() {
        let (c, reg) = frozen_square();
        let b = Boundary::new(&c);
        let cfg = WosConfig {
            walks: 2000,
            ..WosConfig::for_curve(1e-3, 2.0)
        };
        let pole = b.interior_pole(8).unwrap();
        let m = measure_of_f(&b, &reg, pole, &cfg, None, Exec::Sequential).unwrap();
        assert_eq!(m.fraction(), 1.0);
        let far = Ball::new(Point::new(5.0, 5.0), 1.0);
        let err = measure_of_f(&b, &reg, pole, &cfg, Some(far), Exec::Sequential).unwrap_err();
        assert!(matches!(err, Error::EmptyWindow(_)));
    }

    #[test]
    fn constant_normal_has_zero_oscillation() {
        let (c, _) = frozen_square();
        let b = Boundary::new(&c);
        let cfg = WosConfig {
            walks: 2000,
            ..WosConfig::for_curve(1e-3, 2.0)
        };
        // ball touching only the left side
        let ball = Ball::new(Point::new(0.0, 0.5), 0.3);
        let o = omega_weighted_normal_oscillation(&b, &cfg, ball, Some(Point::new(-1.0, 0.0)), None, Exec::Sequential)
            .unwrap();
        assert!(o.absorbed > 0);
        assert!(o.around_mean < 1e-12);
        assert!(o.around_geometric.unwrap() < 1e-12);
    }
}
