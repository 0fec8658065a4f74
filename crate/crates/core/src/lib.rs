//! Curvature data for parametric surfaces, Gaussian-curvature contours and
//! their projections, Gauss-map equivariance probes, and the classification
//! of sampled height fields whose curvature contours are concentric circles
//! or parallel lines.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod cli;
pub mod contour;
pub mod families;
pub mod fitgeom;
pub mod jet;
pub mod surface;
pub mod symmetry;
