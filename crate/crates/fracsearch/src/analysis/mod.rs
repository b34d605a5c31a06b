//! Period extraction, power-law fitting, and the scaling-hypothesis check.

mod fit;
mod hypothesis;
mod period;

pub use fit::{power_law_fit, spectral_dimension_from_fit, FitError, PowerLawFit};
pub use hypothesis::{
    check_hypothesis, fractal_dimension, gasket_spectral_dimension, inverse_spectral_comparison,
    DimensionSet, HypothesisReport, InverseSpectralReport,
};
pub use period::{estimate_period, mean_peak_probability, PeriodError, PeriodEstimate, Windowing};
