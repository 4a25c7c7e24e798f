//! Numerical Gaussian scale space on uniform planar grids.
//!
//! Fields are sampled from analytic functions ([`sample`]), smoothed with a
//! separable Gaussian ([`blur`]), searched for critical points ([`detect`]),
//! linked across a ladder of scales ([`track`]) and scanned for creation,
//! annihilation and merge events ([`find_events`]). [`level_sets`] and
//! [`GridField::gradient_vectors`] extract the geometry used for plots.

mod blur;
mod contour;
mod detect;
mod events;
mod grid;
mod track;

pub use blur::{blur, gaussian_kernel};
pub use contour::{level_sets, LevelSet, Polyline};
pub use detect::{detect, detect_with, DetectConfig};
pub use events::{find_events, EventKind, ScaleEvent};
pub use grid::{
    sample, GradientSample, GridField, LocalFit, PolySlice, ScalarField, Window, MIN_DETECT_DIM,
    MIN_SAMPLE_DIM,
};
pub use track::{
    track, BlurMode, Census, EndStatus, Rung, ScaleSpace, TrackConfig, TrackPoint, TrackRun,
    Trajectory,
};

use thiserror::Error;

use crate::poly::PolyError;

#[derive(Debug, Error, PartialEq)]
pub enum ScaleSpaceError {
    #[error("grid spacing must be positive and finite, got {0}")]
    Spacing(f64),
    #[error("degenerate window {0:?}")]
    Window([f64; 4]),
    #[error("grid of {nx}×{ny} nodes is too small")]
    TooSmall { nx: usize, ny: usize },
    #[error("expected {expected} values, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("non-finite value at node ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("scale increment must be non-negative and finite, got {0}")]
    NegativeScale(f64),
    #[error("ladder must start at {start} and increase strictly (rung {index})")]
    Ladder { start: f64, index: usize },
    #[error("ladder needs at least one rung")]
    EmptyLadder,
    #[error(transparent)]
    Poly(#[from] PolyError),
}
