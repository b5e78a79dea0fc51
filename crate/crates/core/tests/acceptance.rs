//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion.
//! Pass criterion numbers as arguments to run a subset, e.g.
//! `cargo test --test acceptance -- 1 9`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, TAU};
use std::io::Write;
use std::time::{Duration, Instant};

use frozen_snowflake::exec::{with_threads, Exec};
use frozen_snowflake::geometry::{AngleRecord, Arc, OrientedSegment, Orientation, Point};
use frozen_snowflake::io::commands::{
    disk_calibration, generation_scale_profile, persistence_checks, wos_generations,
};
use frozen_snowflake::io::fixtures::{disk, wedge};
use frozen_snowflake::io::{build, GenerationRecord, Record, Report, RunConfig};
use frozen_snowflake::refine::{inscribe, GenerationCurve, SmoothCurve, SmoothPiece};
use frozen_snowflake::regularity::reifenberg_profile;
use frozen_snowflake::snowflake::*;
use frozen_snowflake::wos::*;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn say(line: &str) {
    // straight to the handle so the harness never swallows it
    let _ = writeln!(std::io::stdout().lock(), "{line}");
}

fn failed_checks(rep: &Report, prefix: &[&str]) -> Vec<String> {
    rep.checks
        .iter()
        .filter(|c| prefix.iter().any(|p| c.name.starts_with(p)))
        .filter(|c| !c.pass)
        .map(|c| format!("{} = {} ({})", c.name, c.measured, c.threshold))
        .collect()
}

fn count_checks(rep: &Report, prefix: &[&str]) -> usize {
    rep.checks.iter().filter(|c| prefix.iter().any(|p| c.name.starts_with(p))).count()
}

fn records<'a>(rep: &'a Report, kind: &'a str) -> impl Iterator<Item = &'a Record> {
    rep.records.iter().filter(move |r| r.kind == kind)
}

fn c1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut bad = 0;
    for _ in 0..1000 {
        let a = Point::new(rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0));
        let len = rng.random_range(1e-3..10.0);
        let b = a + Point::polar(len, rng.random_range(-PI..PI));
        let alpha = rng.random_range(0.0..=FRAC_PI_4);
        let s = OrientedSegment::from_points(a, b).unwrap();
        let l = s.length();
        let c = replace_segment(&s, alpha).unwrap();
        let want = l / (2.0 * (1.0 + alpha.cos()));
        for x in &c {
            worst = worst.max((x.length() - want).abs() / l);
        }
        let chained = c[0].a == a && c[3].b == b && (0..3).all(|i| c[i].b == c[i + 1].a);
        let outer = alpha == 0.0 || (c[1].b - a).dot(s.normal.normal()) > 0.0;
        if !chained || !outer {
            bad += 1;
        }
    }
    outcome(
        worst <= 1e-12 && bad == 0,
        format!("max length error {worst:.2e}·ℓ, {bad} chaining/side failures"),
    )
}

fn c2() -> Outcome {
    let src = OrientedSegment::new(Point::new(0.0, 1.0), Point::new(0.0, 0.0), AngleRecord::east());
    let g = generate_gamma(&GeneratorParams::canonical(2, src)).unwrap();
    let frozen = g.leaves.iter().filter(|l| l.is_frozen() && l.segment.a.x == 0.0 && l.segment.b.x == 0.0).count();
    let err = (g.total_length - 1.0).abs();
    outcome(
        g.leaves.len() == 256 && frozen == 256 && err < 1e-12,
        format!("{} leaves, {frozen} frozen vertical, length error {err:.1e}", g.leaves.len()),
    )
}

fn enumerate(m: u32) -> (BigRational, BigRational) {
    let steps = m * m;
    let total: u64 = 1 << (2 * steps);
    let (mut tail, mut hit) = (0u64, 0u64);
    for code in 0..total {
        let (mut s, mut touched) = (0i64, false);
        for k in 0..steps {
            s += match (code >> (2 * k)) & 3 {
                1 => 1,
                2 => -1,
                _ => 0,
            };
            touched |= s <= -(m as i64);
        }
        tail += (s <= -(m as i64)) as u64;
        hit += touched as u64;
    }
    let q = |n: u64| BigRational::new(n.into(), total.into());
    (q(tail), q(hit))
}

fn c3() -> Outcome {
    let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
    let mut ok = clt_tail_exact(1) == q(1, 4) && clt_tail_exact(2) == q(37, 256) && freeze_hit_exact(2) == q(46, 256);
    for m in 1..=3 {
        let (t, h) = enumerate(m);
        ok &= clt_tail_exact(m) == t && freeze_hit_exact(m) == h;
    }
    ok &= (1..=20).all(|m| freeze_hit_exact(m) >= clt_tail_exact(m));
    let t20 = rational_to_f64(&clt_tail_exact(20));
    ok &= (t20 - 0.0786496).abs() <= 0.02;
    outcome(ok, format!("clt_tail_exact(20) = {t20:.6}"))
}

fn c4() -> Outcome {
    let n = AngleRecord::exact(1, 2);
    let e3 = vertical_mass_exact(n, 3, 9).ratio();
    let mut ok = e3 >= 0.02;
    let mut detail = format!("M=3 exact {e3:.5}");
    for m in [4, 5] {
        let s = vertical_mass_sampled(n, m, m * m, 1_000_000, 11, Exec::available());
        ok &= s.ratio - s.half_width >= 0.02;
        detail += &format!(", M={m} {:.5}±{:.5}", s.ratio, s.half_width);
    }
    outcome(ok, detail)
}

fn c5() -> Outcome {
    let prev = GenerationCurve::initial_polygon(100);
    let (mut pieces, mut leaf_bad, mut dist_bad) = (0usize, 0usize, 0usize);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for j in 0..prev.len() {
        let src = prev.segment(j);
        let g = generate_gamma(&GeneratorParams::canonical(2, src)).unwrap();
        pieces += g.leaves.len();
        let l = src.length();
        let f = 1.0 / (2.0 * (1.0 + g.alpha.cos()));
        for leaf in &g.leaves {
            let k = leaf.depth() as i32;
            let x = leaf.length() / l;
            // endpoints sit at radius ~16, so lengths carry ~1e-12 relative rounding
            if x < 0.25f64.powi(k) * (1.0 - 1e-11) || x > f.powi(k) * (1.0 + 1e-11) {
                leaf_bad += 1;
            }
        }
        let r = g.total_length / l;
        lo = lo.min(r);
        hi = hi.max(r);
        if max_leaf_distance(&g) > 10.0 * g.alpha * l + 1e-12 {
            dist_bad += 1;
        }
    }
    outcome(
        pieces == 25600 && leaf_bad == 0 && dist_bad == 0 && lo >= 1.0 - 1e-12 && hi <= 12.0,
        format!("{pieces} segments, {leaf_bad} leaf-bound and {dist_bad} distance violations, H¹(Γ)/ℓ in [{lo:.4}, {hi:.4}]"),
    )
}

fn circle(r: f64, k: usize) -> SmoothCurve {
    let sweep = TAU / k as f64;
    SmoothCurve {
        pieces: (0..k)
            .map(|i| SmoothPiece::Arc {
                arc: Arc::new(Point::ORIGIN, r, -(i as f64) * sweep, sweep, Orientation::Clockwise).unwrap(),
                src: i as u32,
            })
            .collect(),
        tags: Vec::new(),
        closed: true,
        trim: 0.0,
        tangent_residual: 0.0,
        gap_residual: 0.0,
        min_radius: r,
    }
}

fn c6() -> Outcome {
    let b = build(&RunConfig::default(), Exec::available()).unwrap();
    let g = &b.generations[1];
    let s = g.stats.as_ref().unwrap();
    let eq = g.curve.equal_chord_residual();
    let turn = g.curve.max_run_turn(1);
    let bound = GenerationCurve::angle_bound(1);
    let mut circ = 0.0f64;
    for &(r, m) in &[(1.0, 64usize), (3.5, 1000), (0.01, 257)] {
        let ins = inscribe(&circle(r, 7), TAU * r / m as f64 * (1.0 + 1e-12), PI, Some(Point::new(r, 0.0)), 1 << 20).unwrap();
        let want = 2.0 * r * (PI / m as f64).sin();
        circ = circ.max(if ins.len() == m { (ins.chord_length - want).abs() / r } else { f64::INFINITY });
    }
    outcome(
        s.tangent_residual <= 1e-8 && eq <= 1e-9 && turn <= bound && circ <= 1e-9,
        format!(
            "tangent {:.1e}, equal-chord {eq:.1e}, turn {turn:.5} <= {bound:.5}, circle {circ:.1e}·R, {} chords",
            s.tangent_residual, s.chords
        ),
    )
}

fn deep_build() -> Vec<GenerationRecord> {
    let cfg = RunConfig {
        schedule: vec![2, 3, 4],
        generations: 3,
        ..RunConfig::default()
    };
    build(&cfg, Exec::available()).unwrap().generations
}

fn c7(gens: &[GenerationRecord]) -> Outcome {
    // generations 1–2 of the (2,3,4) build are the (2,3) build
    let mut rep = Report::default();
    persistence_checks(&gens[..3], &mut rep);
    let fails = failed_checks(&rep, &["frozen_"]);
    let n = count_checks(&rep, &["frozen_"]);
    let vals: Vec<String> = records(&rep, "persistence")
        .map(|r| {
            format!(
                "g{}: dist {} <= {}, coverage {}",
                r.get("generation").unwrap_or("?"),
                r.get("max_half_distance").unwrap_or("?"),
                r.get("bound").unwrap_or("?"),
                r.get("min_coverage").unwrap_or("?")
            )
        })
        .collect();
    outcome(n > 0 && fails.is_empty(), format!("{}; {}", vals.join("; "), fails.join(", ")))
}

fn c8(gens: &[GenerationRecord]) -> Outcome {
    let w = wedge(FRAC_PI_2, 1.0, 1e-3);
    let prof = reifenberg_profile(&w, &[1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0], &[Point::ORIGIN], Exec::available());
    let (fine, coarse) = (prof[0].sup, prof[3].sup);
    let wedge_ok = fine >= 0.5 * coarse && fine > 0.05;
    let mut rep = Report::default();
    let sups = generation_scale_profile(gens, Exec::available(), &mut rep);
    let decreasing = sups.len() == 3 && sups.windows(2).all(|w| w[1] < w[0]);
    let vals: Vec<String> = sups.iter().map(|v| format!("{v:.4}")).collect();
    outcome(
        wedge_ok && decreasing,
        format!("wedge {fine:.4} (r=1/32) vs {coarse:.4} (r=1/4); pipeline {}", vals.join(" > ")),
    )
}

fn c9() -> Outcome {
    let cfg = RunConfig::default();
    let rep = disk_calibration(&cfg, Exec::available()).unwrap();
    let mut ok = rep.all_pass();
    let c = disk(4096, 1.0);
    let d = Domain::new(c.vertices());
    let w = WosConfig {
        walks: 100_000,
        ..WosConfig::for_curve(c.chord_length, 2.0)
    };
    let out = run_walks(&d, Point::ORIGIN, Side::Interior, &w, Exec::available()).unwrap();
    let mut u: Vec<f64> = out.iter().flatten().map(|a| a.point.angle().rem_euclid(TAU) / TAU).collect();
    ok &= u.len() == out.len();
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let ks = u
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max);
    let crit = 1.6276 / n.sqrt();
    ok &= ks < crit;
    let small = WosConfig { walks: 20_000, ..w };
    let run = |threads| with_threads(threads, || run_walks(&d, Point::new(0.2, 0.3), Side::Interior, &small, Exec::available()).unwrap());
    let same = run(1) == run(8);
    ok &= same;
    let q = records(&rep, "disk_quarter").next().and_then(|r| r.get_f64("fraction")).unwrap_or(f64::NAN);
    let e = records(&rep, "exterior_disk_half").next().and_then(|r| r.get_f64("fraction")).unwrap_or(f64::NAN);
    outcome(
        ok,
        format!("quarter {q:.5}, exterior half {e:.5}, KS {ks:.5} < {crit:.5}, 1 vs 8 workers identical: {same}"),
    )
}

fn witness_build() -> Vec<GenerationRecord> {
    let cfg = RunConfig {
        schedule: vec![2, 2],
        generations: 2,
        chord_budget: 8_000_000,
        ..RunConfig::default()
    };
    build(&cfg, Exec::available()).unwrap().generations
}

fn c10(rep: &Report) -> Outcome {
    let fails = failed_checks(rep, &["f_fraction", "osc_", "scale_stability", "global_timeouts"]);
    let n = count_checks(rep, &["osc_"]);
    let f = rep.checks.iter().find(|c| c.name == "f_fraction").map_or("?".into(), |c| c.measured.clone());
    let balls: Vec<String> = records(rep, "failure_ball_wos")
        .map(|r| {
            format!(
                "g{}: tilt {:.3} b' {:.3} b {:.3} F|B {:.4}",
                r.get("generation").unwrap_or("?"),
                r.get_f64("tilt").unwrap_or(f64::NAN),
                r.get_f64("osc_mean").unwrap_or(f64::NAN),
                r.get_f64("osc_geometric").unwrap_or(f64::NAN),
                r.get_f64("f_given_b").unwrap_or(f64::NAN)
            )
        })
        .collect();
    let tilts_ok = records(rep, "failure_ball_wos").all(|r| r.get_f64("tilt").is_some_and(|t| t >= 1.2));
    outcome(
        n > 0 && tilts_ok && fails.is_empty(),
        format!("F = {f}; {}; failing: {}", balls.join("; "), if fails.is_empty() { "none".into() } else { fails.join(", ") }),
    )
}

fn disk_density(scale: f64) -> f64 {
    let c = disk(4096, 1.0);
    let b = Boundary::new(&c);
    let w = WosConfig {
        walks: 200_000,
        ..WosConfig::for_curve(c.chord_length, 2.0)
    };
    let p = DensityRatioParams {
        scale,
        region: None,
        centers: Vec::new(),
        max_balls: 32,
        interior_pole: Point::ORIGIN,
        exterior_pole: b.exterior_pole(),
    };
    density_ratio_oscillation(&b, &w, &p, Exec::available()).unwrap().sup
}

fn c11(rep: &Report) -> Outcome {
    let scales = [0.2, 0.1, 0.05];
    let disk: Vec<f64> = scales.iter().map(|&s| disk_density(s)).collect();
    let finest = *disk.last().unwrap();
    let built: Vec<(String, f64)> = records(rep, "density_ratio")
        .map(|r| (r.get("generation").unwrap_or("?").to_string(), r.get_f64("statistic").unwrap_or(f64::NAN)))
        .collect();
    let slow = built.windows(2).all(|w| w[1].1 >= 0.8 * w[0].1);
    let d: Vec<String> = scales.iter().zip(&disk).map(|(s, v)| format!("{v:.4}@{s}")).collect();
    let g: Vec<String> = built.iter().map(|(n, v)| format!("g{n} {v:.4}")).collect();
    outcome(
        finest < 0.05 && slow && !built.is_empty(),
        format!("disk {}; constructed {}", d.join(", "), g.join(", ")),
    )
}

const LIMITS: [u64; 11] = [1, 1, 10, 120, 10, 60, 300, 300, 120, 1800, 1800];

fn main() {
    let args: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let want = |k: u32| args.is_empty() || args.contains(&k);
    let mut failed = Vec::new();
    let mut report = |k: u32, o: Outcome, t: Duration| {
        let limit = Duration::from_secs(LIMITS[k as usize - 1]);
        let pass = o.pass && t <= limit;
        // the density-ratio criterion is exploratory: reported, not gating
        let gating = k != 11;
        say(&format!(
            "criterion {k:>2}: {}{} ({:.1} s, limit {} s) {}",
            if pass { "PASS" } else { "FAIL" },
            if gating { "" } else { " [not gating]" },
            t.as_secs_f64(),
            limit.as_secs(),
            o.detail
        ));
        if !pass && gating {
            failed.push(k);
        }
    };
    let timed = |f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let o = f();
        (o, t.elapsed())
    };

    for (k, f) in [(1, c1 as fn() -> Outcome), (2, c2), (3, c3), (4, c4), (5, c5), (6, c6), (9, c9)] {
        if want(k) {
            let (o, t) = timed(&mut || f());
            report(k, o, t);
        }
    }
    if want(7) || want(8) {
        let start = Instant::now();
        let gens = deep_build();
        let built = start.elapsed();
        if want(7) {
            let (o, t) = timed(&mut || c7(&gens));
            report(7, o, t + built);
        }
        if want(8) {
            let (o, t) = timed(&mut || c8(&gens));
            report(8, o, t + built);
        }
    }
    if want(10) || want(11) {
        let start = Instant::now();
        let gens = witness_build();
        let cfg = RunConfig {
            walks: 1_000_000,
            ..RunConfig::default()
        };
        let rep = wos_generations(&cfg, &gens, Exec::available()).unwrap();
        drop(gens);
        let shared = start.elapsed();
        for r in &rep.records {
            say(&format!("  {}", r.text()));
        }
        if want(10) {
            let (o, t) = timed(&mut || c10(&rep));
            report(10, o, t + shared);
        }
        if want(11) {
            let (o, t) = timed(&mut || c11(&rep));
            report(11, o, t + shared);
        }
    }
    if !failed.is_empty() {
        say(&format!("failed criteria: {failed:?}"));
        std::process::exit(1);
    }
}
