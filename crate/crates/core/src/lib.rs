//! Packing analytics: curve packings of Apollonian, carpet and Fatou-component
//! type, their curvature distribution functions, box-counting dimensions and
//! homogeneity constants.

pub mod dynamics;
pub mod error;
pub mod expr;
pub mod generators;
pub mod homogeneity;
pub mod geometry;
pub mod packing;
pub mod raster;
pub mod stats;
