//! Gradient percolation on the triangular lattice.
//!
//! Sites are coloured occupied or vacant, either homogeneously or with the
//! linear gradient `p(y) = 1/2 − y/(2N)` across the strip `[0, ℓ] × [−N, N]`.
//! The crate extracts the percolation front separating the occupied cluster
//! of the bottom row from the vacant cluster of the top row, its outer
//! boundaries, crossing and arm events, and fits the power laws that govern
//! their sizes.

pub mod arms;
pub mod connectivity;
pub mod error;
pub mod front;
pub mod lattice;
pub mod oracle;
pub mod sampling;
pub mod scaling;
pub mod union_find;

pub use connectivity::{
    crossing_probability, has_crossing, label_clusters, ClusterLabels, Color, CrossingQuery, Orientation,
    Tally,
};
pub use error::{PercError, Result};
pub use lattice::{box_region, neighbors, x_of_edge, DualEdge, Region, SiteCoord};
pub use sampling::{gradient_field, sample, sample_coupled, Configuration, ProbabilityField, StripSpec};
