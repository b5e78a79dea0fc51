//! Outer-normal angles with an exact verticality test.
//!
//! An [`AngleRecord`] represents `γ + j·α` with `α = |γ|/M`. When `γ` is a
//! rational multiple of π the whole record is rational in units of π and
//! "normal equals (1,0)" is an integer congruence. Otherwise only the
//! principal solution `j = −M·sgn(γ)` can be decided exactly, which is the
//! one the construction relies on.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BaseAngle {
    /// `π·num/den`, reduced, `den > 0`, value in `(−π, π]`.
    Pi { num: i64, den: i64 },
    /// A real angle in `(−π, π]` that is not an exact multiple of π/2.
    Real(f64),
}

impl BaseAngle {
    pub fn pi_fraction(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let (mut n, mut d) = if den < 0 { (-num, -den) } else { (num, den) };
        let g = gcd(n.unsigned_abs(), d as u64) as i64;
        n /= g;
        d /= g;
        // into (−1, 1] in units of π
        let two_d = 2 * d;
        n = n.rem_euclid(two_d);
        if n > d {
            n -= two_d;
        }
        let g = gcd(n.unsigned_abs(), d as u64).max(1) as i64;
        BaseAngle::Pi { num: n / g, den: d / g }
    }

    pub fn radians(&self) -> f64 {
        match *self {
            BaseAngle::Pi { num, den } => PI * num as f64 / den as f64,
            BaseAngle::Real(t) => t,
        }
    }

    fn signum(&self) -> i64 {
        match *self {
            BaseAngle::Pi { num, .. } => num.signum(),
            BaseAngle::Real(t) => {
                if t > 0.0 {
                    1
                } else if t < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FreezeKind {
    /// `j = −M·sgn(γ)`: the first vertical occurrence.
    Principal,
    /// Any other `j` with `γ + jα ≡ 0 (mod 2π)`.
    WrapAround,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleRecord {
    pub base: BaseAngle,
    /// `M`; the step is `|γ|/M`.
    pub divisor: u32,
    pub count: i64,
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl AngleRecord {
    pub fn exact(num: i64, den: i64) -> Self {
        AngleRecord {
            base: BaseAngle::pi_fraction(num, den),
            divisor: 1,
            count: 0,
        }
    }

    pub fn east() -> Self {
        AngleRecord::exact(0, 1)
    }

    /// Wraps a floating angle; exact axis angles should come from
    /// [`normal_angle_of`] or [`AngleRecord::exact`] instead.
    pub fn real(theta: f64) -> Self {
        AngleRecord {
            base: BaseAngle::Real(reduce(theta)),
            divisor: 1,
            count: 0,
        }
    }

    /// Same base angle, step `|γ|/m`, counter reset.
    pub fn with_divisor(self, m: u32) -> Self {
        let flat = self.flattened();
        AngleRecord {
            base: flat.base,
            divisor: m.max(1),
            count: 0,
        }
    }

    pub fn rotated(self, dj: i64) -> Self {
        AngleRecord {
            count: self.count + dj,
            ..self
        }
    }

    pub fn base_radians(&self) -> f64 {
        self.base.radians()
    }

    /// The step `α = |γ|/M`.
    pub fn step(&self) -> f64 {
        self.base.radians().abs() / self.divisor.max(1) as f64
    }

    /// Rational value in units of π as `(num, den)` before reduction mod 2,
    /// when the base is exact.
    fn pi_units(&self) -> Option<(i128, i128)> {
        match self.base {
            BaseAngle::Pi { num, den } => {
                let m = self.divisor.max(1) as i128;
                let (p, q) = (num as i128, den as i128);
                Some((p * m + self.count as i128 * p.abs(), q * m))
            }
            BaseAngle::Real(_) => None,
        }
    }

    /// The represented angle reduced into `(−π, π]`.
    pub fn radians(&self) -> f64 {
        match self.pi_units() {
            Some((n, d)) => {
                let two_d = 2 * d;
                let mut r = n.rem_euclid(two_d);
                if r > d {
                    r -= two_d;
                }
                PI * (r as f64) / (d as f64)
            }
            None => {
                let g = self.base.radians();
                reduce(g + self.count as f64 * self.step())
            }
        }
    }

    /// Unit outer normal. Exact for axis directions of exact records.
    pub fn normal(&self) -> Point {
        if let Some((n, d)) = self.pi_units() {
            let two_d = 2 * d;
            let r = n.rem_euclid(two_d);
            if r == 0 {
                return Point::new(1.0, 0.0);
            }
            if r == d {
                return Point::new(-1.0, 0.0);
            }
            if 2 * r == d {
                return Point::new(0.0, 1.0);
            }
            if 2 * r == 3 * d {
                return Point::new(0.0, -1.0);
            }
        }
        let t = self.radians();
        Point::new(t.cos(), t.sin())
    }

    /// Clockwise tangent direction matching the normal (`t` with `n = perp(t)`).
    pub fn tangent(&self) -> Point {
        let n = self.normal();
        Point::new(n.y, -n.x)
    }

    /// Exact test for "normal is (1,0)".
    pub fn is_east(&self) -> bool {
        self.freeze_kind().is_some()
    }

    pub fn freeze_kind(&self) -> Option<FreezeKind> {
        let sgn = self.base.signum();
        let m = self.divisor.max(1) as i64;
        if sgn == 0 {
            return Some(FreezeKind::Principal);
        }
        if self.count == -m * sgn {
            return Some(FreezeKind::Principal);
        }
        match self.pi_units() {
            Some((n, d)) if n.rem_euclid(2 * d) == 0 => Some(FreezeKind::WrapAround),
            _ => None,
        }
    }

    /// Collapses `(γ, M, j)` into a fresh record with count 0, keeping
    /// exactness where possible.
    pub fn flattened(&self) -> Self {
        if self.count == 0 {
            return AngleRecord {
                divisor: 1,
                ..*self
            };
        }
        match self.pi_units() {
            Some((n, d)) => {
                let g = gcd(n.unsigned_abs() as u64, d as u64).max(1) as i128;
                AngleRecord::exact((n / g) as i64, (d / g) as i64)
            }
            None => {
                if self.is_east() {
                    AngleRecord::east()
                } else {
                    AngleRecord::real(self.radians())
                }
            }
        }
    }
}

/// Reduces an angle into `(−π, π]`.
pub fn reduce(theta: f64) -> f64 {
    let mut t = theta % (2.0 * PI);
    if t <= -PI {
        t += 2.0 * PI;
    } else if t > PI {
        t -= 2.0 * PI;
    }
    t
}

/// Outer normal angle of a clockwise edge with tangent `direction`.
///
/// The normal is `(−t_y, t_x)`. Axis directions come back exact.
pub fn normal_angle_of(direction: Point) -> Result<AngleRecord> {
    if !(direction.is_finite()) || (direction.x == 0.0 && direction.y == 0.0) {
        return Err(Error::InvalidInput(format!(
            "normal of a zero or non-finite direction {direction:?}"
        )));
    }
    let n = direction.perp();
    let rec = if n.y == 0.0 {
        if n.x > 0.0 {
            AngleRecord::exact(0, 1)
        } else {
            AngleRecord::exact(1, 1)
        }
    } else if n.x == 0.0 {
        if n.y > 0.0 {
            AngleRecord::exact(1, 2)
        } else {
            AngleRecord::exact(-1, 2)
        }
    } else {
        AngleRecord::real(n.y.atan2(n.x))
    };
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_directions() {
        let down = normal_angle_of(Point::new(0.0, -1.0)).unwrap();
        assert!(down.is_east());
        assert_eq!(down.radians(), 0.0);
        let right = normal_angle_of(Point::new(1.0, 0.0)).unwrap();
        assert_eq!(right.normal(), Point::new(0.0, 1.0));
        assert!((right.radians() - PI / 2.0).abs() < 1e-15);
        let left = normal_angle_of(Point::new(-1.0, 0.0)).unwrap();
        assert_eq!(left.normal(), Point::new(0.0, -1.0));
        assert!(normal_angle_of(Point::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn normal_is_perpendicular_round_trip() {
        for k in 0..64 {
            let t = Point::polar(1.0, 0.1 + k as f64 * 0.37);
            let rec = normal_angle_of(t).unwrap();
            assert!(rec.normal().dot(t).abs() < 1e-12);
            assert!(rec.tangent().dist(t) < 1e-12);
        }
    }

    #[test]
    fn principal_freeze_for_real_base() {
        let r = AngleRecord::real(1.234).with_divisor(5);
        assert!(!r.is_east());
        assert_eq!(r.rotated(-5).freeze_kind(), Some(FreezeKind::Principal));
        assert!(r.rotated(-5).radians().abs() < 1e-12);
        assert!(!r.rotated(5).is_east());
    }

    #[test]
    fn wraparound_for_pi_base() {
        // γ = π, M = 3: j = −3 is principal; j = +3 gives π + π = 2π ≡ 0.
        let r = AngleRecord::exact(1, 1).with_divisor(3);
        assert_eq!(r.rotated(-3).freeze_kind(), Some(FreezeKind::Principal));
        assert_eq!(r.rotated(3).freeze_kind(), Some(FreezeKind::WrapAround));
        assert_eq!(r.rotated(9).freeze_kind(), Some(FreezeKind::WrapAround));
        assert_eq!(r.rotated(1).freeze_kind(), None);
        // γ = π/2, M = 3: j = +9 gives π/2 + 3π/2 = 2π.
        let h = AngleRecord::exact(1, 2).with_divisor(3);
        assert_eq!(h.rotated(9).freeze_kind(), Some(FreezeKind::WrapAround));
        assert_eq!(h.rotated(-3).freeze_kind(), Some(FreezeKind::Principal));
    }

    #[test]
    fn flattening_keeps_exactness() {
        let h = AngleRecord::exact(1, 2).with_divisor(2).rotated(1);
        let f = h.flattened();
        assert_eq!(f.base, BaseAngle::Pi { num: 3, den: 4 });
        assert_eq!(f.count, 0);
        let g = AngleRecord::exact(-49, 50).with_divisor(2).rotated(-2);
        // −49π/50 − 2·(49π/100) = −98π/50 ≡ 2π/50
        assert_eq!(g.flattened().base, BaseAngle::Pi { num: 1, den: 25 });
    }

    #[test]
    fn pi_fraction_normalizes() {
        assert_eq!(BaseAngle::pi_fraction(-1, 1), BaseAngle::Pi { num: 1, den: 1 });
        assert_eq!(BaseAngle::pi_fraction(3, 2), BaseAngle::Pi { num: -1, den: 2 });
        assert_eq!(BaseAngle::pi_fraction(4, 8), BaseAngle::Pi { num: 1, den: 2 });
        assert_eq!(BaseAngle::pi_fraction(4, 2), BaseAngle::Pi { num: 0, den: 1 });
    }
}
