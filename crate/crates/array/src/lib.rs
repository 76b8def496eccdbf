//! Site geometry of the trap array, crosstalk matrices and stochastic loading.

pub mod crosstalk;
pub mod geometry;
pub mod loading;

pub use crosstalk::{
    gaussian_crosstalk, paper_crosstalk_preset, paper_crosstalk_preset_with_floor, CrosstalkError,
    CrosstalkMatrix,
};
pub use geometry::{hex_positions, ArrayGeometry, GeometryError};
pub use loading::{load_array, LoadingError, LoadingModel};
