//! Planar primitives shared by the other modules.

pub mod angle;
pub mod fit;
pub mod frame;
mod point;
pub mod shapes;

pub use angle::{normal_angle_of, AngleRecord, BaseAngle, FreezeKind};
pub use fit::{best_fit_line, deviation_for_line, push_clipped_samples, sample_polyline_in_ball, Line, LineFit};
pub use frame::{Frame, FrameStep};
pub use point::{BBox, Ball, Point};
pub use shapes::{
    closest_on_segment, distance_point_segment, point_in_polygon, regular_polygon, segment_length_in_disk, segments_intersect, Arc,
    ClosedPolyline, Location, OrientedSegment, Orientation,
};
