//! Domain transforms, post-processing and plot extraction on
//! channel-sounding and acoustic datasets.
//!
//! All operations take the input by reference and return new values.
//! The DFT is unitary (`1/sqrt(N)` both ways) and spectra are stored
//! centred: bin `m` holds baseband frequency `(m - N/2) * df`.

mod plot;
mod process;
mod render;
mod transform;

use thiserror::Error;

use crate::error::ErrorClass;
use crate::model::ModelError;

pub use plot::{plot_cr, plot_rir, plot_tf, PlotKind, PlotSeries, Series, SeriesValues};
pub use process::{
    apply_pulse_shaping, deembed, oversample, pulse_response, reduce_bandwidth, select_band, PulseKind, PulseShape,
    FREQUENCY_RESPONSE_ATTR,
};
pub use render::{render, render_with, unwrap_phase, RenderFormat, RenderOptions, SVG_HEIGHT, SVG_WIDTH};
pub use transform::{cir_to_tf, sample_axis, sample_grid, tf_to_cir, DELAY_OFFSET_ATTR, GRID_TOLERANCE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("non-uniform grid: {0}")]
    NonUniformGrid(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("selection error: {0}")]
    Selection(String),
    #[error("profile error: {0}")]
    Profile(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl AnalysisError {
    pub fn class(&self) -> ErrorClass {
        match self {
            AnalysisError::Domain(_) => ErrorClass::Domain,
            AnalysisError::NonUniformGrid(_) => ErrorClass::NonUniformGrid,
            AnalysisError::Range(_) => ErrorClass::Range,
            AnalysisError::Selection(_) => ErrorClass::Selection,
            AnalysisError::Profile(_) => ErrorClass::Profile,
            AnalysisError::Model(e) => e.class(),
        }
    }
}
