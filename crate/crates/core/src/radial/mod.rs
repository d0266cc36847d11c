//! Logarithmic radial grids, quadrature, differentiation and the
//! spherical Bessel transform to momentum space.

mod bessel;
mod grid;
pub mod quadrature;

pub use bessel::{spherical_bessel_j, spherical_bessel_transform, spherical_bessel_transform_many};
pub use grid::{make_log_grid, RadialFunction, RadialGrid, MIN_GRID_POINTS};
pub(crate) use bessel::transform_labelled;
