use std::f64::consts::{FRAC_PI_2, PI, TAU};

use frozen_snowflake::exec::{with_threads, Exec};
use frozen_snowflake::geometry::{distance_point_segment, Location, Point};
use frozen_snowflake::io::commands::exterior_disk_half;
use frozen_snowflake::io::fixtures::disk;
use frozen_snowflake::io::{build, RunConfig};
use frozen_snowflake::wos::*;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

fn cfg(chord: f64, walks: u64) -> WosConfig {
    WosConfig {
        walks,
        ..WosConfig::for_curve(chord, 2.0)
    }
}

fn star(radii: &[f64]) -> Vec<Point> {
    let n = radii.len();
    (0..n).map(|i| Point::polar(radii[i], -(i as f64) * TAU / n as f64)).collect()
}

fn winding_inside(pts: &[Point], p: Point) -> bool {
    let mut w = 0.0;
    for i in 0..pts.len() {
        let (a, b) = (pts[i] - p, pts[(i + 1) % pts.len()] - p);
        w += (a.x * b.y - a.y * b.x).atan2(a.dot(b));
    }
    w.abs() > PI
}

proptest! {
    #[test]
    fn index_agrees_with_brute_force(
        radii in prop::collection::vec(0.5..2.0f64, 3..200),
        qs in prop::collection::vec((-3.0..3.0f64, -3.0..3.0f64), 1..20),
    ) {
        let pts = star(&radii);
        let idx = SpatialIndex::new(&pts);
        let n = pts.len();
        for (x, y) in qs {
            let q = Point::new(x, y);
            let brute = (0..n)
                .map(|i| distance_point_segment(q, pts[i], pts[(i + 1) % n]))
                .fold(f64::INFINITY, f64::min);
            let got = idx.nearest(q);
            prop_assert!((got.distance - brute).abs() <= 1e-12);
            let (a, b) = idx.edge(got.edge as usize);
            prop_assert!((distance_point_segment(q, a, b) - brute).abs() <= 1e-12);
            if brute > 1e-9 {
                let inside = idx.locate(q, 0.0) == Location::Inside;
                prop_assert_eq!(inside, winding_inside(&pts, q));
            }
        }
    }
}

#[test]
fn disk_absorption_angles_are_uniform() {
    let c = disk(4096, 1.0);
    let d = Domain::new(c.vertices());
    let out = run_walks(&d, Point::ORIGIN, Side::Interior, &cfg(c.chord_length, 100_000), Exec::available()).unwrap();
    let mut u: Vec<f64> = out.iter().map(|a| a.unwrap().point.angle().rem_euclid(TAU) / TAU).collect();
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    let ks = u
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).max((i + 1) as f64 / n - x))
        .fold(0.0, f64::max);
    // 99% quantile of the Kolmogorov distribution
    let crit = 1.6276 / n.sqrt();
    assert!(ks < crit, "D = {ks}, critical {crit}");
}

#[test]
fn exterior_disk_matches_the_closed_form() {
    let c = disk(4096, 1.0);
    let d = Domain::new(c.vertices());
    for x in [1.5, 3.0, 6.0] {
        let out = run_walks(&d, Point::new(x, 0.0), Side::Exterior, &cfg(c.chord_length, 20_000), Exec::available()).unwrap();
        let e = MeasureEstimate::tally(&out, 1, 0.0, |a| (a.point.x > 0.0) as u64);
        let want = exterior_disk_half(x);
        assert!((e.fraction(0) - want).abs() <= 3.0 * e.half_width(0), "x={x}: {} vs {want}", e.fraction(0));
        assert!(e.timeout_fraction() < 1e-3);
    }
    // far away the two halves balance
    assert!((exterior_disk_half(1e9) - 0.5).abs() < 1e-8);
    assert!((exterior_disk_half(1.0 + 1e-12) - 1.0).abs() < 1e-5);
}

#[test]
fn hit_counts_do_not_depend_on_the_worker_count() {
    let c = disk(1024, 1.0);
    let d = Domain::new(c.vertices());
    let w = cfg(c.chord_length, 5_000);
    let run = |exec| run_walks(&d, Point::new(0.3, -0.1), Side::Interior, &w, exec).unwrap();
    let seq = run(Exec::Sequential);
    let one = with_threads(1, || run(Exec::available()));
    let eight = with_threads(8, || run(Exec::available()));
    assert_eq!(seq, one);
    assert_eq!(one, eight);
    let other = run_walks(&d, Point::new(0.3, -0.1), Side::Interior, &WosConfig { seed: 1, ..w }, Exec::available()).unwrap();
    assert_ne!(seq, other);
}

#[test]
fn disk_quarter_arc_and_half_width() {
    let c = disk(4096, 1.0);
    let d = Domain::new(c.vertices());
    let out = run_walks(&d, Point::ORIGIN, Side::Interior, &cfg(c.chord_length, 100_000), Exec::available()).unwrap();
    let e = MeasureEstimate::tally(&out, 1, 0.0, |a| (0.0..FRAC_PI_2).contains(&a.point.angle()) as u64);
    let z = Normal::standard().inverse_cdf(0.975);
    let p = e.fraction(0);
    assert!((e.half_width(0) - z * (p * (1.0 - p) / 1e5).sqrt()).abs() < 1e-4 * e.half_width(0));
    assert!((p - 0.25).abs() <= 3.0 * e.half_width(0), "{p}");
}

#[test]
fn halving_epsilon_moves_the_frozen_measure_little() {
    let b = build(&RunConfig::default(), Exec::available()).unwrap();
    let g = b.generations.last().unwrap();
    let bd = Boundary::new(&g.curve);
    let pole = bd.interior_pole(32).unwrap();
    let w = WosConfig {
        walks: 20_000,
        ..WosConfig::for_curve(g.curve.chord_length, bd.domain.diameter())
    };
    let half = WosConfig { epsilon: w.epsilon / 2.0, ..w };
    let a = measure_of_f(&bd, &g.registry, pole, &w, None, Exec::available()).unwrap();
    let h = measure_of_f(&bd, &g.registry, pole, &half, None, Exec::available()).unwrap();
    let diff = (a.fraction() - h.fraction()).abs();
    assert!(diff < 2.0 * a.half_width().max(h.half_width()), "{} vs {}", a.fraction(), h.fraction());
}

#[test]
fn interior_pole_of_the_disk_is_near_the_centre() {
    let c = disk(512, 1.0);
    let b = Boundary::new(&c);
    let p = b.interior_pole(33).unwrap();
    assert!(p.norm() < 0.05);
    let e = b.exterior_pole();
    assert_eq!(b.domain.side_of(e), Some(Side::Exterior));
}
