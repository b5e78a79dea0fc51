use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::geometry::{OrientedSegment, Point};

/// Largest step angle accepted. At `π/2` the two middle children fold into
/// a needle; anything beyond would cross the source.
pub const MAX_ALPHA: f64 = FRAC_PI_2;

/// Common child length factor `1/(2(1+cos α))`.
#[inline]
pub fn child_factor(alpha: f64) -> f64 {
    1.0 / (2.0 * (1.0 + alpha.cos()))
}

/// Breakpoints `y₀ … y₄` of the replacement of `[a,b]` with outer normal
/// `perp(b − a)/|b − a|`.
#[inline]
pub fn breakpoints(a: Point, b: Point, alpha: f64) -> [Point; 5] {
    let d = b - a;
    let f = child_factor(alpha);
    let y1 = a + d * f;
    let y3 = b - d * f;
    let y2 = a + d * 0.5 + d.perp() * (f * alpha.sin());
    [a, y1, y2, y3, b]
}

/// Replaces `s` by four equal segments with the middle bump on the outer
/// side. Child rotation counts relative to `s` are `(0, +1, −1, 0)`.
pub fn replace_segment(s: &OrientedSegment, alpha: f64) -> Result<[OrientedSegment; 4]> {
    if !(0.0..=MAX_ALPHA).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha {alpha} outside [0, π/2]")));
    }
    if s.length() == 0.0 {
        return Err(Error::DegenerateInput("zero-length segment".into()));
    }
    let y = breakpoints(s.a, s.b, alpha);
    let rot = [0, 1, -1, 0];
    Ok(std::array::from_fn(|i| OrientedSegment::new(y[i], y[i + 1], s.normal.rotated(rot[i]))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::AngleRecord;
    use std::f64::consts::PI;

    #[test]
    fn figure_one_breakpoints() {
        let s = OrientedSegment::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), AngleRecord::exact(1, 2));
        let c = replace_segment(&s, PI / 6.0).unwrap();
        let want = [(0.0, 0.0), (0.2679492, 0.0), (0.5, 0.1339746), (0.7320508, 0.0), (1.0, 0.0)];
        let got = [c[0].a, c[1].a, c[2].a, c[3].a, c[3].b];
        for (g, w) in got.iter().zip(want) {
            assert!((g.x - w.0).abs() < 5e-8 && (g.y - w.1).abs() < 5e-8, "{g:?} vs {w:?}");
        }
    }

    #[test]
    fn zero_alpha_is_quadrisection() {
        let s = OrientedSegment::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), AngleRecord::exact(1, 2));
        let c = replace_segment(&s, 0.0).unwrap();
        let total: f64 = c.iter().map(|x| x.length()).sum();
        assert_eq!(total, 1.0);
        for x in &c {
            assert_eq!(x.length(), 0.25);
            assert_eq!(x.a.y, 0.0);
        }
    }

    #[test]
    fn rejects_out_of_range() {
        let s = OrientedSegment::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0), AngleRecord::exact(1, 2));
        assert!(replace_segment(&s, -0.1).is_err());
        assert!(replace_segment(&s, 1.6).is_err());
        assert!(replace_segment(&s, f64::NAN).is_err());
    }
}
