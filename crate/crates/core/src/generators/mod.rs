//! Reference packings with closed-form or exact-integer structure.

pub mod apollonian;
pub mod carpet;

pub use apollonian::{apollonian_generate, descartes_fourth, ApollonianRun, DescartesQuadruple};
pub use carpet::{carpet_generate, carpet_raster};
