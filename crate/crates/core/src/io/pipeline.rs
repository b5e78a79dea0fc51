//! Multi-generation builds driven by a [`RunConfig`].

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{Ball, Frame, Point};
use crate::io::config::{RunConfig, WindowSpec};
use crate::refine::{
    advance_fitted, advance_tracked, focus, AdvanceParams, AdvanceStats, FrozenRegistry, GenerationCurve,
};

/// Sides of `Ω₀`.
pub const INITIAL_SIDES: usize = 100;

#[derive(Clone, Debug)]
pub struct GenerationRecord {
    pub curve: GenerationCurve,
    pub registry: FrozenRegistry,
    /// `None` for `Ω₀`.
    pub stats: Option<AdvanceStats>,
    /// Tracked horizontal chord, if still followed.
    pub lineage: Option<usize>,
    /// Refinement window in this curve's frame; `None` when global.
    pub window: Option<Ball>,
}

#[derive(Clone, Debug)]
pub struct Build {
    /// Index 0 is `Ω₀`.
    pub generations: Vec<GenerationRecord>,
}

impl Build {
    pub fn last(&self) -> &GenerationRecord {
        self.generations.last().expect("build has Ω₀")
    }

    /// `(generation, curve, lineage)` for every generation still tracked.
    pub fn lineage(&self) -> impl Iterator<Item = (&GenerationCurve, usize)> {
        self.generations.iter().filter_map(|g| g.lineage.map(|k| (&g.curve, k)))
    }
}

/// `Ω₀` with its horizontal top edge tracked.
pub fn initial() -> GenerationRecord {
    GenerationRecord {
        curve: GenerationCurve::initial_polygon(INITIAL_SIDES),
        registry: FrozenRegistry::new(),
        stats: None,
        lineage: Some(0),
        window: None,
    }
}

/// Ball around the tracked chord: centred at its midpoint, radius a
/// quarter of its length.
pub fn lineage_ball(curve: &GenerationCurve, k: usize) -> Ball {
    let (a, b) = curve.edge(k);
    Ball::new(a.midpoint(b), a.dist(b) / 4.0)
}

fn params(cfg: &RunConfig, m: u32, exec: Exec) -> AdvanceParams {
    let mut p = AdvanceParams::new(m).with_exec(exec);
    p.leaf_budget = cfg.leaf_budget;
    p.chord_budget = cfg.chord_budget;
    p
}

/// One generation step from `prev` under `spec`.
pub fn step(prev: &GenerationRecord, spec: WindowSpec, p: &AdvanceParams) -> Result<GenerationRecord> {
    let (curve, registry) = (&prev.curve, &prev.registry);
    let done = |adv: crate::refine::Advance, window: Option<Ball>| GenerationRecord {
        curve: adv.curve,
        registry: adv.registry,
        stats: Some(adv.stats),
        lineage: adv.lineage,
        window,
    };
    match spec {
        WindowSpec::Global => {
            let adv = advance_tracked(curve, registry, None, p, prev.lineage)?;
            Ok(done(adv, None))
        }
        WindowSpec::Tracked => {
            let k = prev
                .lineage
                .ok_or_else(|| Error::InvalidInput("tracked windows need a tracked chord".into()))?;
            let ball = lineage_ball(curve, k);
            let (cf, rf, wf) = focus(curve, registry, ball);
            match advance_tracked(&cf, &rf, Some(&[wf]), p, Some(k)) {
                Ok(adv) => Ok(done(adv, Some(wf))),
                Err(e) if e.is_resource_limit() => {
                    // the all-ones descendants shrink towards the chord's start
                    log::info!("tracked ball too large ({e}); fitting a window at the lineage start");
                    let start = cf.edge(k).0;
                    let (adv, r) = advance_fitted(&cf, &rf, start, wf.radius, p, Some(k))?;
                    Ok(done(adv, Some(Ball::new(start, r))))
                }
                Err(e) => Err(e),
            }
        }
        WindowSpec::Ball(abs) => {
            let local = Frame::identity()
                .map_into(&curve.frame, abs.center)
                .expect("identity is a prefix of every frame");
            let ball = Ball::new(local, abs.radius / (curve.frame.log2_scale() as f64).exp2());
            let (cf, rf, wf) = focus(curve, registry, ball);
            let track = prev.lineage.filter(|&k| {
                let (a, _) = cf.edge(k);
                wf.contains(a)
            });
            let (adv, r) = advance_fitted(&cf, &rf, wf.center, wf.radius, p, track)?;
            Ok(done(adv, Some(Ball::new(wf.center, r))))
        }
    }
}

/// Builds `cfg.generations` generations from `Ω₀`; `on_step` sees each new
/// record as soon as it exists.
pub fn build_with<F>(cfg: &RunConfig, exec: Exec, mut on_step: F) -> Result<Build>
where
    F: FnMut(&GenerationRecord) -> Result<()>,
{
    cfg.validate()?;
    let mut gens = vec![initial()];
    on_step(&gens[0])?;
    for n in 0..cfg.generations as usize {
        let p = params(cfg, cfg.schedule[n], exec);
        let next = step(&gens[n], cfg.window, &p).map_err(|e| match e {
            Error::ResourceLimit { what, needed, budget, .. } => Error::ResourceLimit {
                what,
                needed,
                budget,
                hint: "use a refinement window (advance_windowed) or raise the budgets",
            },
            e => e,
        })?;
        log::info!(
            "generation {}: {} edges, {} chords of length {:e}",
            next.curve.generation,
            next.curve.len(),
            next.stats.as_ref().map_or(0, |s| s.chords),
            next.curve.chord_length
        );
        on_step(&next)?;
        gens.push(next);
    }
    Ok(Build { generations: gens })
}

pub fn build(cfg: &RunConfig, exec: Exec) -> Result<Build> {
    build_with(cfg, exec, |_| Ok(()))
}

/// Nominal piece count `t_{n+1} = mₙ·4^(M²)` of a global step.
pub fn nominal_pieces(edges: usize, m: u32) -> u128 {
    edges as u128 * 4u128.pow(m * m)
}

/// `ℓ` in absolute units.
pub fn absolute_chord(curve: &GenerationCurve) -> f64 {
    curve.frame.length_to_absolute(curve.chord_length)
}

/// Point in the coordinates of `Ω₀`.
pub fn absolute(curve: &GenerationCurve, p: Point) -> Point {
    curve.frame.to_absolute(p)
}
