//! Convergence studies, persistence and study output.

mod config;
mod output;
mod persist;
mod study;

pub use config::{coarse_resolution, StudyConfig};
pub use output::{
    emit_outputs, parse_study_csv, plot_script, read_study_csv, study_csv, CSV_HEADER, TIMING_COLUMNS,
};
pub use persist::{load_basis, load_field, save_basis, save_field, BASIS_MAGIC, FIELD_MAGIC};
pub use study::{fitted_slope, run_study, StudyResult, StudyRow};
