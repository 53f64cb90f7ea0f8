//! Three estimates of the spectrum on an energy grid: finite-section
//! eigenvalues, the periodic trace condition, and the zero set of the
//! Lyapunov exponent.

mod estimate;
mod tridiag;

pub use crate::grid::EnergyGrid;
pub use estimate::{
    cantor_diagnostic, compare_spectra, epsilon_rule, lyapunov_zero_set, trace_spectrum,
    CantorReport, ComparisonReport, Method, RefinementLevel, SpectrumEstimate,
};
pub use tridiag::{
    edge_mass, eigenvector, finite_section_spectrum, finite_section_with, interior_filter,
    sturm_count, tridiagonal_eigenvalues, SectionOptions, DEFAULT_SECTION_CAP, EDGE_FRACTION,
    EDGE_MASS_LIMIT,
};
