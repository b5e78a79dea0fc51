//! The subcommand drivers: generate, analyze, wos, export-svg, report.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geometry::{Ball, Point};
use crate::io::config::{RunConfig, WindowSpec};
use crate::io::fixtures;
use crate::io::pipeline::{absolute_chord, build_with, nominal_pieces, GenerationRecord};
use crate::io::report::{Check, Record, Report};
use crate::io::snapshot::{load_registry, load_snapshot, save_registry, save_snapshot};
use crate::io::svg::{render, SvgCurve, SvgOptions};
use crate::refine::{AdvanceStats, GenerationCurve};
use crate::regularity::{
    ahlfors_scan, flatness_failure_balls, frozen_persistence, profile_centers, reifenberg_profile, Tracked,
};
use crate::wos::{
    density_ratio_oscillation, measure_of_f, run_walks, Boundary, DensityRatioParams, FMeasure, MeasureEstimate,
    Oscillation, Side, WosConfig,
};

pub const MANIFEST: &str = "manifest.txt";

/// Floors and bounds used by the checks. The geometric ones mirror the
/// construction; the measure thresholds are calibrated by hand.
pub mod thresholds {
    pub const EQUAL_CHORD: f64 = 1e-9;
    pub const TANGENT: f64 = 1e-8;
    pub const AHLFORS_MIN: f64 = 0.4;
    pub const AHLFORS_MAX: f64 = 4.0;
    pub const VERTICAL_RATIO: f64 = 0.02;
    pub const TILT_MIN: f64 = 1.2;
    pub const F_FRACTION: f64 = 0.2;
    pub const F_CI_EXCLUDES: f64 = 0.1;
    pub const OSC_MEAN_MAX: f64 = 0.3;
    pub const OSC_GEOMETRIC_MIN: f64 = 1.0;
    pub const SCALE_RATIO_MAX: f64 = 2.0;
    pub const TIMEOUT_FRACTION: f64 = 1e-3;
}

pub fn snapshot_path(dir: &Path, n: u32) -> PathBuf {
    dir.join(format!("gen_{n}.snap"))
}

pub fn registry_path(dir: &Path, n: u32) -> PathBuf {
    dir.join(format!("registry_{n}.txt"))
}

pub fn stats_record(curve: &GenerationCurve, prev_edges: usize, s: &AdvanceStats, window: Option<Ball>) -> Record {
    let mut r = Record::new("generation")
        .with("generation", s.generation)
        .with("M", s.m)
        .with("m_prev", prev_edges)
        .with("t", nominal_pieces(prev_edges, s.m))
        .with("depth", s.depth)
        .with("segments", s.segments)
        .with("full_leaves", s.full_leaves)
        .with("refined_edges", s.refined_edges)
        .real("a", s.a)
        .with("chords", s.chords)
        .real("chord_length", s.chord_length)
        .real("chord_length_abs", absolute_chord(curve))
        .with("log2_scale", curve.frame.log2_scale())
        .with("runs", s.runs)
        .real("leaf_length", s.leaf_length)
        .real("vertical_length", s.vertical_length)
        .real("vertical_ratio", s.vertical_ratio())
        .real("wrap_length", s.wrap_length)
        .real("smooth_length", s.smooth_length)
        .real("max_turn", s.max_turn)
        .real("tangent_residual", s.tangent_residual)
        .real("closure_defect", s.closure_defect)
        .with("iterations", s.iterations)
        .with("new_frozen", s.new_frozen)
        .with("edges", curve.len());
    r = match window {
        Some(w) => r
            .real("window_x", w.center.x)
            .real("window_y", w.center.y)
            .real("window_r", w.radius),
        None => r.with("window", "global"),
    };
    r
}

pub fn stats_from_record(r: &Record) -> Result<(AdvanceStats, Option<Ball>)> {
    let f = |k: &str| -> Result<f64> {
        r.get_f64(k)
            .ok_or_else(|| Error::Parse { line: 0, msg: format!("manifest field {k} missing") })
    };
    let s = AdvanceStats {
        generation: f("generation")? as u32,
        m: f("M")? as u32,
        depth: f("depth")? as u32,
        segments: f("segments")? as u64,
        full_leaves: f("full_leaves")? as u64,
        refined_edges: f("refined_edges")? as usize,
        a: f("a")?,
        chords: f("chords")? as usize,
        chord_length: f("chord_length")?,
        runs: f("runs")? as usize,
        leaf_length: f("leaf_length")?,
        vertical_length: f("vertical_length")?,
        wrap_length: f("wrap_length")?,
        smooth_length: f("smooth_length")?,
        max_turn: f("max_turn")?,
        tangent_residual: f("tangent_residual")?,
        closure_defect: f("closure_defect")?,
        iterations: f("iterations")? as u32,
        new_frozen: f("new_frozen")? as usize,
    };
    let window = match (r.get_f64("window_x"), r.get_f64("window_y"), r.get_f64("window_r")) {
        (Some(x), Some(y), Some(rad)) => Some(Ball::new(Point::new(x, y), rad)),
        _ => None,
    };
    Ok((s, window))
}

/// Builds the generations, writing a snapshot and registry per generation
/// and a manifest.
pub fn cmd_generate(cfg: &RunConfig, exec: Exec) -> Result<Report> {
    fs::create_dir_all(&cfg.output)?;
    fs::write(cfg.output.join("config.txt"), cfg.to_text())?;
    let mut rep = Report::default();
    let mut prev_edges = 0usize;
    let dir = cfg.output.clone();
    let mut manifest = String::new();
    let res = build_with(cfg, exec, |g| {
        let n = g.curve.generation;
        save_snapshot(&snapshot_path(&dir, n), &g.curve, g.lineage)?;
        save_registry(&registry_path(&dir, n), &g.registry, &g.curve.frame)?;
        let r = match &g.stats {
            Some(s) => stats_record(&g.curve, prev_edges, s, g.window),
            None => Record::new("generation")
                .with("generation", n)
                .with("edges", g.curve.len())
                .real("chord_length", g.curve.chord_length),
        };
        manifest += &r.structured();
        manifest.push('\n');
        fs::write(dir.join(MANIFEST), &manifest)?;
        rep.push(r);
        prev_edges = g.curve.len();
        Ok(())
    });
    res?;
    for g in &rep.records {
        if g.get("chords").is_some() {
            let gen = g.get("generation").unwrap_or("?");
            let resid = g.get_f64("closure_defect").unwrap_or(f64::NAN);
            log::debug!("generation {gen}: closure defect {resid:e}");
        }
    }
    Ok(rep)
}

/// Generations written by [`cmd_generate`], rebuilt from disk.
pub fn load_build(dir: &Path) -> Result<Vec<GenerationRecord>> {
    let text = fs::read_to_string(dir.join(MANIFEST))?;
    let mut out = Vec::new();
    for r in text.lines().filter_map(Record::parse) {
        let n: u32 = r
            .get("generation")
            .and_then(|g| g.parse().ok())
            .ok_or_else(|| Error::Parse { line: 0, msg: "manifest record without generation".into() })?;
        let snap = load_snapshot(&snapshot_path(dir, n))?;
        let (registry, _) = load_registry(&registry_path(dir, n))?;
        let (stats, window) = if r.get("chords").is_some() {
            let (s, w) = stats_from_record(&r)?;
            (Some(s), w)
        } else {
            (None, None)
        };
        out.push(GenerationRecord {
            curve: snap.curve,
            registry,
            stats,
            lineage: snap.lineage,
            window,
        });
    }
    if out.is_empty() {
        return Err(Error::Parse { line: 0, msg: "empty manifest".into() });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalyzeFixture {
    Line,
    Wedge,
}

/// Dyadic radii `4ℓ, 8ℓ, …` up to `max`.
pub fn dyadic_radii(chord: f64, max: f64) -> Vec<f64> {
    let mut r = 4.0 * chord;
    let mut v = Vec::new();
    while r <= max {
        v.push(r);
        r *= 2.0;
    }
    v
}

/// Centre region and largest radius for which every test ball lies inside
/// the refinement window.
fn resolved_region(g: &GenerationRecord) -> (Option<Ball>, f64) {
    match g.window {
        Some(w) => (Some(w.scaled(0.75)), w.radius / 4.0),
        None => (None, g.curve.polyline.bbox().diagonal() / 4.0),
    }
}

pub fn analyze_generations(gens: &[GenerationRecord], exec: Exec) -> Result<Report> {
    use thresholds::*;
    let mut rep = Report::default();
    for g in gens.iter().skip(1) {
        let c = &g.curve;
        let n = c.generation;
        let resid = c.equal_chord_residual();
        rep.check(Check::new(&format!("equal_chord_g{n}"), resid <= EQUAL_CHORD, resid, format!("<= {EQUAL_CHORD:e}")));
        let turn = c.max_run_turn(n);
        let bound = GenerationCurve::angle_bound(n);
        rep.check(Check::new(&format!("turn_g{n}"), turn <= bound, turn, format!("<= {bound}")));
        if let Some(s) = &g.stats {
            rep.check(Check::new(
                &format!("tangent_g{n}"),
                s.tangent_residual <= TANGENT,
                s.tangent_residual,
                format!("<= {TANGENT:e}"),
            ));
            let v = s.vertical_ratio();
            rep.push(Record::new("vertical_mass").with("generation", n).with("full_leaves", s.full_leaves).real("ratio", v));
            // a window holding less than one level-M subtree says nothing
            if s.full_leaves >= 4u64.pow(s.m) {
                rep.check(Check::new(&format!("vertical_mass_g{n}"), v >= VERTICAL_RATIO, v, format!(">= {VERTICAL_RATIO}")));
            }
        }
        let (region, max_r) = resolved_region(g);
        let centers = profile_centers(c, 4, region, 64);
        if centers.is_empty() {
            rep.check(Check::new(&format!("centres_g{n}"), false, 0, "curve meets the window"));
            continue;
        }
        let radii = dyadic_radii(c.chord_length, max_r);
        let a = ahlfors_scan(c, 64, &radii, Some(&centers), exec);
        rep.push(
            Record::new("ahlfors")
                .with("generation", n)
                .with("samples", a.samples.len())
                .real("min", a.min)
                .real("max", a.max),
        );
        if !a.samples.is_empty() {
            rep.check(Check::new(
                &format!("ahlfors_g{n}"),
                a.min >= AHLFORS_MIN && a.max <= AHLFORS_MAX,
                format!("{:.4}..{:.4}", a.min, a.max),
                format!("[{AHLFORS_MIN}, {AHLFORS_MAX}]"),
            ));
        }
    }
    persistence_checks(gens, &mut rep);
    generation_scale_profile(gens, exec, &mut rep);
    let tracked: Vec<Tracked> = gens
        .iter()
        .filter_map(|g| g.lineage.map(|k| Tracked { curve: &g.curve, edge: k }))
        .collect();
    if tracked.len() >= 2 {
        let balls = flatness_failure_balls(&tracked)?;
        // the deepest generation's own ball is not resolved by any later curve
        for b in &balls[..balls.len() - 1] {
            let t = b.flatness.tilt();
            rep.push(
                Record::new("failure_ball")
                    .with("generation", b.generation)
                    .real("radius", b.flatness.radius)
                    .real("d", b.flatness.d)
                    .real("normal_x", b.flatness.line_normal.x)
                    .real("normal_y", b.flatness.line_normal.y)
                    .real("tilt", t),
            );
            rep.check(Check::new(&format!("tilt_g{}", b.generation), t >= TILT_MIN, t, format!(">= {TILT_MIN}")));
        }
    }
    Ok(rep)
}

/// Scale of generation `n` on the deepest curve: a quarter of the window
/// refined at `n`, with centres in the inner three quarters, so every test
/// ball sees fully refined curve. Global steps use a quarter of `ℓ_{n−1}`.
pub fn generation_scale(gens: &[GenerationRecord], n: usize) -> Option<(Ball, f64)> {
    let last = &gens.last()?.curve;
    let g = &gens[n];
    let k = ((g.curve.frame.log2_scale() - last.frame.log2_scale()) as f64).exp2();
    match g.window {
        Some(w) => {
            let c = g.curve.frame.map_into(&last.frame, w.center)?;
            Some((Ball::new(c, 0.75 * w.radius * k), w.radius * k / 4.0))
        }
        None => {
            let prev = &gens[n.checked_sub(1)?].curve;
            let kp = ((prev.frame.log2_scale() - last.frame.log2_scale()) as f64).exp2();
            let bb = last.polyline.bbox();
            let c = bb.min.lerp(bb.max, 0.5);
            Some((Ball::new(c, bb.diagonal()), prev.chord_length * kp / 4.0))
        }
    }
}

/// `sup D(x, r)` on the deepest curve at each generation's scale.
pub fn generation_scale_profile(gens: &[GenerationRecord], exec: Exec, rep: &mut Report) -> Vec<f64> {
    let last = &gens.last().expect("at least one generation").curve;
    let mut sups = Vec::new();
    for n in 1..gens.len() {
        let Some((region, r)) = generation_scale(gens, n) else {
            continue;
        };
        let centers = profile_centers(last, 4, Some(region), 64);
        let Some(p) = reifenberg_profile(last, &[r], &centers, exec).pop() else {
            continue;
        };
        rep.push(
            Record::new("reifenberg")
                .with("scale_of", n)
                .real("radius", r)
                .real("radius_abs", last.frame.length_to_absolute(r))
                .with("centres", centers.len())
                .real("sup_d", p.sup),
        );
        sups.push(p.sup);
    }
    if sups.len() >= 2 {
        let decreasing = sups.windows(2).all(|w| w[1] < w[0]);
        let vals: Vec<String> = sups.iter().map(|v| format!("{v:.4}")).collect();
        rep.check(Check::new("reifenberg_decreasing", decreasing, vals.join(">"), "strictly decreasing"));
    }
    sups
}

/// Frozen segments of each generation: their middle halves stay within
/// `2·Σ ℓⱼ` of the deepest curve, and the next generation keeps at least
/// 9/10 of each covered by frozen chords.
pub fn persistence_checks(gens: &[GenerationRecord], rep: &mut Report) {
    let last = gens.last().expect("at least one generation");
    let unit = last.curve.frame.length_to_absolute(1.0);
    for (i, g) in gens.iter().enumerate().take(gens.len() - 1).skip(1) {
        let n = g.curve.generation;
        let next = &gens[i + 1];
        let cov = frozen_persistence(&next.curve, &next.registry, n, &next.curve);
        if cov.entries == 0 {
            continue;
        }
        let far = frozen_persistence(&last.curve, &last.registry, n, &last.curve);
        let bound = 2.0 * gens[i..].iter().map(|h| absolute_chord(&h.curve) / unit).sum::<f64>();
        rep.push(
            Record::new("persistence")
                .with("generation", n)
                .with("entries", cov.entries)
                .real("max_half_distance", far.max_half_distance)
                .real("bound", bound)
                .real("min_coverage", cov.min_coverage),
        );
        rep.check(Check::new(
            &format!("frozen_distance_g{n}"),
            far.max_half_distance <= bound,
            far.max_half_distance,
            format!("<= {bound:e}"),
        ));
        rep.check(Check::new(&format!("frozen_coverage_g{n}"), cov.min_coverage >= 0.9, cov.min_coverage, ">= 0.9"));
    }
}

pub fn cmd_analyze(cfg: &RunConfig, fixture: Option<AnalyzeFixture>, exec: Exec) -> Result<Report> {
    let rep = match fixture {
        Some(AnalyzeFixture::Line) => {
            let c = fixtures::strip(64.0, 1.0 / 64.0);
            let radii = [0.125, 0.25, 0.5];
            let a = ahlfors_scan(&c, 1, &radii, Some(&[Point::ORIGIN]), exec);
            let mut rep = Report::default();
            for s in &a.samples {
                rep.push(Record::new("ahlfors").real("radius", s.radius).real("ratio", s.ratio));
            }
            let worst = a.samples.iter().map(|s| (s.ratio - 1.0).abs()).fold(0.0, f64::max);
            rep.check(Check::new("line_ratio_one", worst <= 1e-12, worst, "|ratio-1| <= 1e-12"));
            rep
        }
        Some(AnalyzeFixture::Wedge) => {
            let c = fixtures::wedge(std::f64::consts::FRAC_PI_2, 1.0, 1e-3);
            let radii = [1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0];
            let prof = reifenberg_profile(&c, &radii, &[Point::ORIGIN], exec);
            let mut rep = Report::default();
            for p in &prof {
                rep.push(Record::new("reifenberg").with("control", "negative").real("radius", p.radius).real("sup_d", p.sup));
            }
            let (lo, hi) = (prof.first().map_or(0.0, |p| p.sup), prof.last().map_or(0.0, |p| p.sup));
            rep.check(Check::new("wedge_non_decaying", lo >= 0.5 * hi && lo > 0.05, format!("{lo:.4} vs {hi:.4}"), "finest >= coarsest/2"));
            rep
        }
        None => analyze_generations(&load_build(&cfg.output)?, exec)?,
    };
    write_report(cfg, "analyze.report", &rep)?;
    Ok(rep)
}

fn write_report(cfg: &RunConfig, name: &str, rep: &Report) -> Result<()> {
    fs::create_dir_all(&cfg.output)?;
    fs::write(cfg.output.join(name), rep.render(crate::io::config::ReportFormat::Structured))?;
    Ok(())
}

/// Walk settings for a curve of finest chord `chord` and diameter `diam`.
pub fn wos_config(cfg: &RunConfig, chord: f64, diam: f64) -> WosConfig {
    let mut w = WosConfig::for_curve(chord, diam);
    if let Some(e) = cfg.epsilon {
        w.epsilon = e;
    }
    if let Some(c) = cfg.sphere_cap {
        w.sphere_cap = c;
    }
    w.max_steps = cfg.max_steps;
    w.seed = cfg.seed;
    w.walks = cfg.walks;
    w
}

fn estimate_record(kind: &str, e: &MeasureEstimate, t: usize) -> Record {
    Record::new(kind)
        .with("walks", e.total_walks)
        .with("timeouts", e.timeouts)
        .with("hits", e.hits[t])
        .real("fraction", e.fraction(t))
        .real("half_width", e.half_width(t))
        .real("epsilon", e.epsilon)
}

fn timeout_check(rep: &mut Report, name: &str, e: &MeasureEstimate) {
    let f = e.timeout_fraction();
    rep.check(Check::new(name, f < thresholds::TIMEOUT_FRACTION, f, "< 1e-3"));
}

/// Disk calibration: quarter-arc mass from the centre and the right half
/// circle seen from `(3,0)` outside.
pub fn disk_calibration(cfg: &RunConfig, exec: Exec) -> Result<Report> {
    let c = fixtures::disk(4096, 1.0);
    let b = Boundary::new(&c);
    let w = wos_config(cfg, c.chord_length, 2.0);
    let mut rep = Report::default();
    let out = run_walks(&b.domain, Point::ORIGIN, Side::Interior, &w, exec)?;
    let e = MeasureEstimate::tally(&out, 1, w.epsilon, |a| {
        let t = a.point.angle();
        (0.0..std::f64::consts::FRAC_PI_2).contains(&t) as u64
    });
    rep.push(estimate_record("disk_quarter", &e, 0).real("exact", 0.25));
    let dev = (e.fraction(0) - 0.25).abs();
    rep.check(Check::new("disk_quarter", dev <= 3.0 * e.half_width(0), dev, format!("<= 3 half-widths ({})", 3.0 * e.half_width(0))));
    timeout_check(&mut rep, "disk_timeouts", &e);

    let pole = Point::new(3.0, 0.0);
    let out = run_walks(&b.domain, pole, Side::Exterior, &w, exec)?;
    let e = MeasureEstimate::tally(&out, 1, w.epsilon, |a| (a.point.x > 0.0) as u64);
    let exact = exterior_disk_half(pole.x);
    rep.push(estimate_record("exterior_disk_half", &e, 0).real("exact", exact));
    let dev = (e.fraction(0) - exact).abs();
    rep.check(Check::new(
        "exterior_disk_half",
        dev <= 3.0 * e.half_width(0),
        dev,
        format!("<= 3 half-widths ({})", 3.0 * e.half_width(0)),
    ));
    timeout_check(&mut rep, "exterior_timeouts", &e);
    Ok(rep)
}

/// Exterior harmonic measure of the right half of the unit circle seen from
/// `(x,0)`, `x > 1`. Inversion sends the pole to `s = 1/x` inside the disk,
/// where the Poisson kernel integrates to `(2/π)·atan((1+s)/(1−s))`.
pub fn exterior_disk_half(x: f64) -> f64 {
    let s = 1.0 / x;
    2.0 / std::f64::consts::PI * ((1.0 + s) / (1.0 - s)).atan()
}

/// Pipeline walk statistics on the generations in `gens`.
pub fn wos_generations(cfg: &RunConfig, gens: &[GenerationRecord], exec: Exec) -> Result<Report> {
    use thresholds::*;
    let last = gens.last().expect("at least one generation");
    let c = &last.curve;
    let b = Boundary::new(c);
    let w = wos_config(cfg, c.chord_length, b.domain.diameter());
    let mut rep = Report::default();

    let pole = b.interior_pole(32)?;
    let m = measure_of_f(&b, &last.registry, pole, &w, None, exec)?;
    rep.push(estimate_record("measure_f", &m.estimate, 0).real("pole_x", pole.x).real("pole_y", pole.y));
    timeout_check(&mut rep, "global_timeouts", &m.estimate);
    let (p, h) = (m.fraction(), m.half_width());
    rep.check(Check::new("f_fraction", p >= F_FRACTION && p - h > F_CI_EXCLUDES, format!("{p:.5}±{h:.5}"), format!(">= {F_FRACTION}, CI above {F_CI_EXCLUDES}")));

    let tracked: Vec<Tracked> = gens
        .iter()
        .filter_map(|g| g.lineage.map(|k| Tracked { curve: &g.curve, edge: k }))
        .collect();
    if tracked.len() >= 2 {
        let balls = flatness_failure_balls(&tracked)?;
        let mut ratios = Vec::new();
        for fb in &balls[..balls.len() - 1] {
            let ball = Ball::new(fb.flatness.center, fb.flatness.radius);
            let (osc, fm) = ball_walks(&b, last, ball, fb.flatness.line_normal, &w, exec)?;
            let g = fb.generation;
            let cond = fm.conditional();
            rep.push(
                Record::new("failure_ball_wos")
                    .with("generation", g)
                    .real("radius", ball.radius)
                    .real("tilt", fb.flatness.tilt())
                    .with("absorbed", osc.absorbed)
                    .real("osc_mean", osc.around_mean)
                    .real("osc_geometric", osc.around_geometric.unwrap_or(f64::NAN))
                    .real("f_given_b", cond.map_or(f64::NAN, |c| c.0))
                    .real("f_given_b_half_width", cond.map_or(f64::NAN, |c| c.1))
                    .with("widened", osc.widened),
            );
            rep.check(Check::new(&format!("osc_mean_g{g}"), osc.around_mean <= OSC_MEAN_MAX, osc.around_mean, format!("<= {OSC_MEAN_MAX}")));
            let geo = osc.around_geometric.unwrap_or(f64::NAN);
            rep.check(Check::new(&format!("osc_geometric_g{g}"), geo >= OSC_GEOMETRIC_MIN, geo, format!(">= {OSC_GEOMETRIC_MIN}")));
            if let Some((r, _)) = cond {
                ratios.push(r);
            }

            let scale = ball.radius / 5.0;
            let dr = density_ratio_oscillation(
                &b,
                &w,
                &DensityRatioParams {
                    scale,
                    region: Some(ball.scaled(2.0)),
                    centers: vec![ball.center],
                    max_balls: 1,
                    interior_pole: b.local_pole(ball, Side::Interior)?,
                    exterior_pole: b.local_pole(ball, Side::Exterior)?,
                },
                exec,
            );
            match dr {
                Ok(d) => rep.push(
                    Record::new("density_ratio")
                        .with("generation", g)
                        .real("scale", scale)
                        .real("statistic", d.sup)
                        .with("arcs", d.arcs)
                        .with("excluded", d.excluded),
                ),
                Err(e) => log::warn!("density ratio at generation {g}: {e}"),
            }
        }
        for (k, pair) in ratios.windows(2).enumerate() {
            let q = pair[0].max(pair[1]) / pair[0].min(pair[1]);
            rep.check(Check::new(&format!("scale_stability_{k}"), q <= SCALE_RATIO_MAX, q, format!("<= {SCALE_RATIO_MAX}")));
        }
    }
    Ok(rep)
}

/// One walk batch from a local pole serving both the normal oscillation and
/// `ω(F ∩ B)/ω(B)` on `ball`.
pub fn ball_walks(
    b: &Boundary,
    g: &GenerationRecord,
    ball: Ball,
    geometric_normal: Point,
    w: &WosConfig,
    exec: Exec,
) -> Result<(Oscillation, FMeasure)> {
    b.check_window(ball)?;
    let pole = b.local_pole(ball, Side::Interior)?;
    let out = run_walks(&b.domain, pole, Side::Interior, w, exec)?;
    Ok((
        Oscillation::from_outcomes(b, &out, pole, ball, Some(geometric_normal)),
        FMeasure::from_outcomes(b, &g.registry, &out, pole, w.epsilon, Some(ball)),
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WosFixture {
    Disk,
}

pub fn cmd_wos(cfg: &RunConfig, fixture: Option<WosFixture>, exec: Exec) -> Result<Report> {
    let rep = match fixture {
        Some(WosFixture::Disk) => disk_calibration(cfg, exec)?,
        None => wos_generations(cfg, &load_build(&cfg.output)?, exec)?,
    };
    write_report(cfg, "wos.report", &rep)?;
    Ok(rep)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SvgSource {
    Figure1,
    Figure2,
}

/// Renders a snapshot (or a figure fixture) to SVG.
pub fn cmd_export_svg(snapshot: Option<&Path>, figure: Option<SvgSource>, opts: &SvgOptions, out: &Path) -> Result<usize> {
    let (vertices, frozen, closed) = match (figure, snapshot) {
        (Some(SvgSource::Figure1), _) => (fixtures::figure1()?, vec![false; 4], false),
        (Some(SvgSource::Figure2), _) => {
            let g = fixtures::figure2()?;
            let frozen = g.leaves.iter().map(|l| l.is_frozen()).collect();
            (g.vertices(), frozen, false)
        }
        (None, Some(p)) => {
            let s = load_snapshot(p)?;
            let frozen = s.curve.edges.iter().map(|e| e.frozen).collect();
            (s.curve.vertices().to_vec(), frozen, true)
        }
        (None, None) => return Err(Error::Config("export-svg needs a snapshot or a figure".into())),
    };
    let curve = SvgCurve {
        vertices: &vertices,
        frozen: &frozen,
        closed,
    };
    let svg = render(&curve, opts);
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(out, svg)?;
    Ok(if closed { vertices.len() } else { vertices.len() - 1 })
}

/// Collects the `*.report` files of the output directory.
pub fn cmd_report(cfg: &RunConfig) -> Result<Report> {
    let mut rep = Report::default();
    let mut names: Vec<PathBuf> = fs::read_dir(&cfg.output)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "report"))
        .collect();
    names.sort();
    if let Ok(m) = fs::read_to_string(cfg.output.join(MANIFEST)) {
        rep.records.extend(m.lines().filter_map(Record::parse));
    }
    for p in names {
        let r = Report::parse_structured(&fs::read_to_string(&p)?);
        rep.records.extend(r.records);
        rep.checks.extend(r.checks);
    }
    if rep.records.is_empty() && rep.checks.is_empty() {
        return Err(Error::Config(format!("nothing to report in {}", cfg.output.display())));
    }
    Ok(rep)
}

/// Default window used by the `generate` examples in the docs.
pub fn default_window() -> WindowSpec {
    WindowSpec::Tracked
}
