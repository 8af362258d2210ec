//! Finite pointed metric spaces and the geometry used by the classifiers:
//! metric segments, midpoint sets, ball intersections ("lenses") and
//! step-bounded paths.

mod embedded;
mod geometry;
mod path;
mod space;

pub use embedded::{EmbeddedPointSet, PNorm};
pub use geometry::{
    lens, lens_diameter, metric_segment, mid_set, trivial_segment_pairs, SegmentQuery,
};
pub use path::{
    is_connectable, segment_in_set, shortest_constrained_path, Connectability, Reach,
    SegmentCoverage,
};
pub use space::{validate_metric, DistanceMatrix, FiniteMetricSpace, ValidationReport, Violation};

/// Anything that can report distances between indexed points.
///
/// Implemented by [`FiniteMetricSpace`] (table lookup) and by
/// [`EmbeddedPointSet`] (computed from coordinates, for samples too large
/// to tabulate).
pub trait Metric: Sync {
    fn len(&self) -> usize;
    fn d(&self, i: usize, j: usize) -> f64;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
