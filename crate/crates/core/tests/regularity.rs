use std::f64::consts::{FRAC_PI_2, SQRT_2};

use frozen_snowflake::exec::Exec;
use frozen_snowflake::geometry::{Ball, Point};
use frozen_snowflake::io::fixtures::{disk, strip, wedge};
use frozen_snowflake::regularity::*;
use frozen_snowflake::wos::SpatialIndex;

#[test]
fn straight_line_has_unit_ratio_and_zero_flatness() {
    let c = strip(64.0, 1.0 / 64.0);
    let centers = [Point::new(0.0, 0.0), Point::new(3.3, 0.0), Point::new(-7.1, 0.0)];
    let rep = ahlfors_scan(&c, 0, &[0.125, 0.25, 0.5], Some(&centers), Exec::available());
    assert_eq!(rep.samples.len(), 9);
    for s in &rep.samples {
        assert!((s.ratio - 1.0).abs() <= 1e-12, "{s:?}");
    }
    let idx = SpatialIndex::new(c.vertices());
    let f = flatness_at(&idx, Ball::new(Point::new(1.0, 0.0), 0.5)).unwrap();
    // D is measured on samples, so a line scores at most half the sample gap
    assert!(f.d <= 0.5 / FIT_SAMPLES_PER_RADIUS, "{f:?}");
    assert!((f.line_normal - Point::new(0.0, 1.0)).norm() < 1e-9);
    assert!((f.tilt() - SQRT_2).abs() < 1e-9);
}

#[test]
fn circle_ratios_approach_one_quadratically() {
    let big = 10.0;
    let c = disk(1 << 16, big);
    let idx = SpatialIndex::new(c.vertices());
    let x = c.vertices()[123];
    for r in [0.05, 0.1, 0.2, 0.4] {
        let exact = 4.0 * big * (r / (2.0 * big)).asin() / (2.0 * r);
        let got = length_in_ball(&idx, Ball::new(x, r)) / (2.0 * r);
        // chords lose O(ℓ²/R²) relative length
        assert!((got - exact).abs() < 1e-6, "r={r}: {got} vs {exact}");
        assert!(got - 1.0 <= (r / big).powi(2));
        let f = flatness_at(&idx, Ball::new(x, r)).unwrap();
        assert!(f.d <= r / big, "r={r}: d={}", f.d);
        // the outward normal of a circle is radial
        assert!((f.line_normal - x * (1.0 / x.norm())).norm() < 2.0 * r / big);
    }
}

#[test]
fn wedge_corner_flatness_does_not_decay() {
    let c = wedge(FRAC_PI_2, 1.0, 1e-3);
    let idx = SpatialIndex::new(c.vertices());
    let ds: Vec<f64> = [1.0 / 32.0, 1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0]
        .iter()
        .map(|&r| flatness_at(&idx, Ball::new(Point::ORIGIN, r)).unwrap().d)
        .collect();
    let lo = ds.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ds.iter().cloned().fold(0.0, f64::max);
    assert!(lo > 0.05, "{ds:?}");
    assert!(hi / lo < 1.5, "{ds:?}");
    let prof = reifenberg_profile(&c, &[1.0 / 32.0, 1.0 / 4.0], &[Point::ORIGIN], Exec::available());
    assert!(prof[0].sup >= 0.9 * prof[1].sup, "{prof:?}");
}

#[test]
fn vertical_mass_of_frozen_only_stats_is_one() {
    use frozen_snowflake::refine::AdvanceStats;
    let s = AdvanceStats {
        vertical_length: 2.0,
        leaf_length: 2.0,
        ..Default::default()
    };
    let v = vertical_mass_per_generation(&[s]);
    assert_eq!(v[0].ratio(), 1.0);
}
