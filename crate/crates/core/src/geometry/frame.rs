//! Local coordinate frames for deep zooms.
//!
//! A step maps parent coordinates `p` to `(p − origin)·2^(−log2_scale)`.
//! Origins are existing vertices, so subtracting nearby coordinates is
//! exact, and the scale is a power of two, so rescaling is exact too.

use crate::geometry::Point;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameStep {
    pub origin: Point,
    pub log2_scale: i32,
}

impl FrameStep {
    #[inline]
    pub fn apply(&self, p: Point) -> Point {
        let k = (-self.log2_scale as f64).exp2();
        Point::new((p.x - self.origin.x) * k, (p.y - self.origin.y) * k)
    }

    #[inline]
    pub fn unapply(&self, p: Point) -> Point {
        let k = (self.log2_scale as f64).exp2();
        Point::new(p.x * k + self.origin.x, p.y * k + self.origin.y)
    }

    pub fn scale(&self) -> f64 {
        (self.log2_scale as f64).exp2()
    }
}

/// Composition of steps, outermost first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Frame {
    pub steps: Vec<FrameStep>,
}

impl Frame {
    pub fn identity() -> Self {
        Frame::default()
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn then(&self, step: FrameStep) -> Frame {
        let mut steps = self.steps.clone();
        steps.push(step);
        Frame { steps }
    }

    /// Total log2 scale: one local unit is `2^total` absolute units.
    pub fn log2_scale(&self) -> i32 {
        self.steps.iter().map(|s| s.log2_scale).sum()
    }

    /// Absolute coordinates; lossy once the frame is deep.
    pub fn to_absolute(&self, p: Point) -> Point {
        self.steps.iter().rev().fold(p, |q, s| s.unapply(q))
    }

    pub fn to_local(&self, p: Point) -> Point {
        self.steps.iter().fold(p, |q, s| s.apply(q))
    }

    /// Steps leading from this frame to `finer`, if this frame is a prefix of it.
    pub fn steps_to<'a>(&self, finer: &'a Frame) -> Option<&'a [FrameStep]> {
        finer.steps.starts_with(&self.steps).then(|| &finer.steps[self.steps.len()..])
    }

    /// Re-expresses `p` from this frame in `finer`.
    pub fn map_into(&self, finer: &Frame, p: Point) -> Option<Point> {
        Some(self.steps_to(finer)?.iter().fold(p, |q, s| s.apply(q)))
    }

    /// Length in absolute units of a local length.
    pub fn length_to_absolute(&self, l: f64) -> f64 {
        l * (self.log2_scale() as f64).exp2()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steps_are_exact_near_origin() {
        let o = Point::new(0.3, -7.25);
        let s = FrameStep { origin: o, log2_scale: -20 };
        let p = Point::new(0.3 + 1e-9, -7.25);
        let q = s.apply(p);
        assert_eq!(s.unapply(q), p);
        let f = Frame::identity().then(s).then(FrameStep {
            origin: q,
            log2_scale: -3,
        });
        assert_eq!(f.to_local(p), Point::ORIGIN);
        assert_eq!(f.log2_scale(), -23);
    }
}
