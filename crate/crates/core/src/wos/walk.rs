//! Walk-on-spheres absorption.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{Location, Point};
use crate::wos::index::SpatialIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Interior,
    Exterior,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WosConfig {
    /// Absorption distance.
    pub epsilon: f64,
    pub max_steps: u64,
    /// Largest step radius.
    pub sphere_cap: f64,
    pub seed: u64,
    pub walks: u64,
}

impl WosConfig {
    /// Defaults for a curve with finest chord `chord` and diameter `diam`.
    pub fn for_curve(chord: f64, diam: f64) -> Self {
        WosConfig {
            epsilon: chord / 4.0,
            max_steps: 1_000_000,
            sphere_cap: 10.0 * diam,
            seed: 0x5eed,
            walks: 100_000,
        }
    }

    pub fn validate(&self, diam: f64) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.sphere_cap >= diam) {
            return Err(Error::Config(format!(
                "sphere_cap {} is below the domain diameter {diam}",
                self.sphere_cap
            )));
        }
        if self.walks == 0 || self.max_steps == 0 {
            return Err(Error::Config("walks and max_steps must be positive".into()));
        }
        Ok(())
    }
}

/// Independent stream for walk `walk` under `seed`.
pub fn walk_rng(seed: u64, walk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(walk);
    rng
}

/// A closed polygonal boundary with its index and an enclosing circle.
pub struct Domain<'a> {
    pub index: SpatialIndex<'a>,
    pub center: Point,
    /// Radius of a circle about `center` containing the whole boundary.
    pub radius: f64,
}

impl<'a> Domain<'a> {
    pub fn new(pts: &'a [Point]) -> Self {
        let index = SpatialIndex::new(pts);
        let b = index.bbox();
        let center = b.center();
        let radius = pts.iter().map(|p| p.dist(center)).fold(0.0, f64::max);
        Domain { index, center, radius }
    }

    pub fn diameter(&self) -> f64 {
        self.index.bbox().diagonal()
    }

    /// Circle onto which far exterior walkers are returned.
    pub fn return_radius(&self) -> f64 {
        2.0 * self.radius
    }

    pub fn side_of(&self, p: Point) -> Option<Side> {
        match self.index.locate(p, 0.0) {
            Location::Inside => Some(Side::Interior),
            Location::Outside => Some(Side::Exterior),
            Location::Boundary => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Absorption {
    pub point: Point,
    pub edge: u32,
    pub steps: u32,
}

/// Absorption distance actually used at `x`: `ε`, floored well above the
/// rounding level of the coordinates so that deep local frames stay sound
/// far from the origin.
#[inline]
fn effective_epsilon(eps: f64, x: Point) -> f64 {
    eps.max(1e-13 * x.x.abs().max(x.y.abs()))
}

/// Exit point on the circle `|z − c| = R` of Brownian motion started at
/// `x` outside it: the interior harmonic measure seen from the inverse point,
/// sampled through the disk automorphism sending 0 to it.
fn poisson_return(x: Point, c: Point, r: f64, u: f64) -> Point {
    let z = x - c;
    let a = z * (r / z.norm2()); // inverse point, scaled to the unit disk
    let (cu, su) = (u.cos(), u.sin());
    // (e^{iu} + a) / (1 + conj(a)·e^{iu})
    let num = Point::new(cu + a.x, su + a.y);
    let den = Point::new(1.0 + a.x * cu + a.y * su, a.x * su - a.y * cu);
    let d2 = den.norm2();
    let w = Point::new((num.x * den.x + num.y * den.y) / d2, (num.y * den.x - num.x * den.y) / d2);
    c + w * r
}

fn walk_once(domain: &Domain, pole: Point, side: Side, cfg: &WosConfig, walk: u64) -> Option<Absorption> {
    let mut rng = walk_rng(cfg.seed, walk);
    let mut x = pole;
    let rr = domain.return_radius();
    let mut hint = None;
    for step in 0..cfg.max_steps {
        if side == Side::Exterior && (x - domain.center).norm2() > rr * rr {
            let u = rng.random::<f64>() * std::f64::consts::TAU;
            x = poisson_return(x, domain.center, rr, u);
            continue;
        }
        let near = domain.index.nearest_from(x, hint);
        hint = Some(near.edge);
        if near.distance <= effective_epsilon(cfg.epsilon, x) {
            return Some(Absorption {
                point: near.point,
                edge: near.edge,
                steps: step as u32,
            });
        }
        let rad = near.distance.min(cfg.sphere_cap);
        let u = rng.random::<f64>() * std::f64::consts::TAU;
        x += Point::polar(rad, u);
    }
    None
}

pub fn check_pole(domain: &Domain, pole: Point, side: Side, cfg: &WosConfig) -> Result<()> {
    if domain.side_of(pole) != Some(side) {
        return Err(Error::InvalidInput(format!("pole {pole:?} is not on the {side:?} side")));
    }
    let d = domain.index.distance(pole);
    if d <= cfg.epsilon {
        return Err(Error::InvalidInput(format!(
            "pole {pole:?} is within epsilon of the boundary (distance {d})"
        )));
    }
    Ok(())
}

/// One walk from `pole`; `None` on timeout.
pub fn wos_absorb(domain: &Domain, pole: Point, side: Side, cfg: &WosConfig, walk: u64) -> Result<Option<Absorption>> {
    check_pole(domain, pole, side, cfg)?;
    Ok(walk_once(domain, pole, side, cfg, walk))
}

/// `cfg.walks` walks, walk `k` on stream `k`; output order is walk order
/// whatever the scheduling.
pub fn run_walks(domain: &Domain, pole: Point, side: Side, cfg: &WosConfig, exec: Exec) -> Result<Vec<Option<Absorption>>> {
    check_pole(domain, pole, side, cfg)?;
    cfg.validate(0.0)?;
    Ok(exec.map_range(cfg.walks as usize, |k| walk_once(domain, pole, side, cfg, k as u64)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasureEstimate {
    pub total_walks: u64,
    pub timeouts: u64,
    /// Absorptions per target; targets may be nested.
    pub hits: Vec<u64>,
    pub epsilon: f64,
}

impl MeasureEstimate {
    /// Counts absorptions per target; `classify` returns a bit mask.
    pub fn tally<F>(outcomes: &[Option<Absorption>], targets: usize, epsilon: f64, classify: F) -> Self
    where
        F: Fn(&Absorption) -> u64,
    {
        let mut hits = vec![0u64; targets];
        let mut timeouts = 0;
        for o in outcomes {
            match o {
                Some(a) => {
                    let mask = classify(a);
                    for (t, h) in hits.iter_mut().enumerate() {
                        if mask >> t & 1 == 1 {
                            *h += 1;
                        }
                    }
                }
                None => timeouts += 1,
            }
        }
        MeasureEstimate {
            total_walks: outcomes.len() as u64,
            timeouts,
            hits,
            epsilon,
        }
    }

    pub fn fraction(&self, t: usize) -> f64 {
        self.hits[t] as f64 / self.total_walks as f64
    }

    /// 95% normal-approximation half-width.
    pub fn half_width(&self, t: usize) -> f64 {
        half_width(self.fraction(t), self.total_walks)
    }

    /// `hits[num] / hits[den]` with its half-width, if `den` was hit.
    pub fn conditional(&self, num: usize, den: usize) -> Option<(f64, f64)> {
        let n = self.hits[den];
        if n == 0 {
            return None;
        }
        let p = self.hits[num] as f64 / n as f64;
        Some((p, half_width(p, n)))
    }

    pub fn timeout_fraction(&self) -> f64 {
        self.timeouts as f64 / self.total_walks as f64
    }
}

pub fn half_width(p: f64, n: u64) -> f64 {
    1.96 * (p * (1.0 - p) / n as f64).sqrt()
}
