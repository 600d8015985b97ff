//! Monte Carlo harness.

pub mod batch;
pub mod fano;
pub mod stats;
pub mod sweep;

pub use batch::{run_batch, run_trial, BatchResult, BatchSpec, TrialResult, BATCH_SCHEMA_VERSION};
pub use fano::{fano_experiment, FanoResult, FANO_MARGIN_HALF_WIDTHS};
pub use stats::{clopper_pearson_upper, wilson, wilson95, Interval, Z95};
pub use sweep::{contours, heatmap_svg, sweep, Contour, GridFile, SweepResult, SweepRow, SweepSpec, CSV_COLUMNS};
